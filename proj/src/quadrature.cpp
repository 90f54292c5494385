#include "spinrad/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "spinrad/errors.hpp"

namespace spinrad::quad {

namespace {

// Kronrod abscissae (positive half, descending) and weights; every second
// abscissa is a 10-point Gauss node.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b;
  std::vector<double> value, error;
};

void apply_rule(const VectorIntegrand& f, std::size_t dim, Panel& p, std::vector<double>& scratch,
                std::vector<double>& gauss) {
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  p.value.assign(dim, 0.0);
  p.error.assign(dim, 0.0);
  gauss.assign(dim, 0.0);
  scratch.resize(dim);
  std::span<double> out(scratch);

  f(c, out);
  for (std::size_t i = 0; i < dim; ++i) p.value[i] = kWgk[10] * out[i];
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    for (double x : {c - dx, c + dx}) {
      f(x, out);
      for (std::size_t i = 0; i < dim; ++i) {
        p.value[i] += kWgk[j] * out[i];
        if (j % 2 == 1) gauss[i] += kWg[j / 2] * out[i];
      }
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    p.value[i] *= h;
    p.error[i] = std::abs(p.value[i] - h * gauss[i]);
    if (!std::isfinite(p.value[i])) {
      throw DomainError("quadrature: non-finite integrand on [" + std::to_string(p.a) + ", " +
                        std::to_string(p.b) + "]");
    }
  }
}

}  // namespace

Result integrate(const VectorIntegrand& f, std::size_t dim, double a, double b, const Options& opt) {
  Result res;
  res.value.assign(dim, 0.0);
  res.error.assign(dim, 0.0);
  if (a == b) {
    res.converged = true;
    return res;
  }
  const double sign = b > a ? 1.0 : -1.0;
  if (b < a) std::swap(a, b);

  std::vector<double> scratch, gauss;
  std::vector<Panel> panels;
  panels.push_back({a, b, {}, {}});
  apply_rule(f, dim, panels.back(), scratch, gauss);
  res.evaluations = 21;

  auto totals = [&](std::vector<double>& v, std::vector<double>& e) {
    v.assign(dim, 0.0);
    e.assign(dim, 0.0);
    for (const auto& p : panels) {
      for (std::size_t i = 0; i < dim; ++i) {
        v[i] += p.value[i];
        e[i] += p.error[i];
      }
    }
  };

  std::vector<double> tol(dim);
  while (true) {
    totals(res.value, res.error);
    bool done = true;
    for (std::size_t i = 0; i < dim; ++i) {
      tol[i] = std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value[i]));
      if (res.error[i] > tol[i]) done = false;
    }
    if (done) {
      res.converged = true;
      break;
    }
    if (static_cast<int>(panels.size()) >= opt.max_segments) break;

    // Pick the panel contributing most to the worst-violated component.
    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t k = 0; k < panels.size(); ++k) {
      double score = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double t = std::max(tol[i], std::numeric_limits<double>::min());
        score = std::max(score, panels[k].error[i] / t);
      }
      if (score > worst_score) {
        worst_score = score;
        worst = k;
      }
    }
    Panel& p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;  // panel at machine resolution
    Panel right{mid, p.b, {}, {}};
    p.b = mid;
    apply_rule(f, dim, p, scratch, gauss);
    apply_rule(f, dim, right, scratch, gauss);
    res.evaluations += 42;
    panels.insert(panels.begin() + static_cast<std::ptrdiff_t>(worst) + 1, std::move(right));
  }
  res.segments = static_cast<int>(panels.size());
  for (auto& v : res.value) v *= sign;
  return res;
}

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opt) {
  return integrate([&f](double x, std::span<double> out) { out[0] = f(x); }, 1, a, b, opt);
}

GaussLegendre gauss_legendre(int n) {
  static constexpr std::array<double, 4> x4 = {-0.861136311594052575, -0.339981043584856265,
                                               0.339981043584856265, 0.861136311594052575};
  static constexpr std::array<double, 4> w4 = {0.347854845137453857, 0.652145154862546143,
                                               0.652145154862546143, 0.347854845137453857};
  static constexpr std::array<double, 8> x8 = {
      -0.960289856497536232, -0.796666477413626740, -0.525532409916328986, -0.183434642495649805,
      0.183434642495649805,  0.525532409916328986,  0.796666477413626740,  0.960289856497536232};
  static constexpr std::array<double, 8> w8 = {
      0.101228536290376259, 0.222381034453374471, 0.313706645877887287, 0.362683783378361983,
      0.362683783378361983, 0.313706645877887287, 0.222381034453374471, 0.101228536290376259};
  static constexpr std::array<double, 16> x16 = {
      -0.989400934991649933, -0.944575023073232576, -0.865631202387831744, -0.755404408355003034,
      -0.617876244402643748, -0.458016777657227386, -0.281603550779258913, -0.095012509837637440,
      0.095012509837637440,  0.281603550779258913,  0.458016777657227386,  0.617876244402643748,
      0.755404408355003034,  0.865631202387831744,  0.944575023073232576,  0.989400934991649933};
  static constexpr std::array<double, 16> w16 = {
      0.027152459411754095, 0.062253523938647893, 0.095158511682492785, 0.124628971255533872,
      0.149595988816576732, 0.169156519395002538, 0.182603415044923589, 0.189450610455068496,
      0.189450610455068496, 0.182603415044923589, 0.169156519395002538, 0.149595988816576732,
      0.124628971255533872, 0.095158511682492785, 0.062253523938647893, 0.027152459411754095};
  switch (n) {
    case 4: return {x4, w4};
    case 8: return {x8, w8};
    case 16: return {x16, w16};
    default: throw DomainError("gauss_legendre: n must be 4, 8 or 16");
  }
}

}  // namespace spinrad::quad
