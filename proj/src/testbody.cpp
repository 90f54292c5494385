#include "spinrad/testbody.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "spinrad/errors.hpp"
#include "spinrad/specfun.hpp"

namespace spinrad::testbody {

namespace {

constexpr double pi = std::numbers::pi;

TwoBodyResult run(const TwoBodyConfig& cfg, double Omega, double prefactor,
                  const std::function<double(double)>& f, const quad::Options& opt) {
  cfg.validate();
  if (!(Omega >= 0.0)) throw DomainError("Omega must be >= 0");
  TwoBodyResult r;
  r.close_warning = cfg.close_separation();
  if (Omega == 0.0) return r;
  const auto q = quad::integrate(f, 0.0, Omega, opt);
  r.value = prefactor * q.value[0];
  r.error = std::abs(prefactor) * q.error[0];
  r.converged = q.converged;
  return r;
}

// |S_1|^2 - 1 of the rotating disk and 1 - |S~_1|^2 of the static test disk.
double disk_gain(const TwoBodyConfig& c, double Omega, double w) {
  return -scattering::disk_flux_factor(c.source, c.R, Omega, w, 1);
}
double disk_absorption(const TwoBodyConfig& c, double w) {
  return scattering::disk_flux_factor(c.test, c.a, 0.0, w, 1);
}

double sphere_gain(const TwoBodyConfig& c, double Omega, double w, FluxRule rule) {
  const cplx S = scattering::sphere_smatrix_dipole(c.source, c.R, Omega, w, 1);
  return rule == FluxRule::Exact ? std::norm(S) - 1.0 : 2.0 * (S - 1.0).real();
}
cplx test_sphere_s(const TwoBodyConfig& c, double w) {
  return scattering::sphere_smatrix_dipole(c.test, c.a, 0.0, w, 1);
}

double im_alpha(const DielectricModel& m, double R, double w) {
  return material::sphere_polarizability(m, R, w).imag();
}

}  // namespace

void TwoBodyConfig::validate() const {
  if (!(R > 0.0) || !(a > 0.0) || !(d > 0.0)) throw DomainError("R, a and d must be > 0");
  if (!(d > R + a)) throw DomainError("bodies overlap: d must exceed R + a");
}

bool TwoBodyConfig::close_separation() const { return d < 3.0 * std::max(R, a); }

cplx translation_2d(int n, int m, double omega, double d) {
  return specfun::hankel(specfun::HankelKind::First, n - m, omega * d);
}

DipoleTranslation translation_3d_dipole(double omega, double d) {
  const cplx h0 = specfun::sph_bessel(specfun::SphericalKind::H1, 0, omega * d);
  return {h0, std::sqrt(2.0) * omega * d / 4.0 * h0};
}

TwoBodyResult torque_on_test_2d(const TwoBodyConfig& cfg, double Omega, const quad::Options& opt) {
  auto f = [&](double w) {
    const double h = std::norm(specfun::hankel(specfun::HankelKind::First, 0, w * cfg.d));
    return disk_gain(cfg, Omega, w) * h * disk_absorption(cfg, w);
  };
  return run(cfg, Omega, 1.0 / (8.0 * pi), f, opt);
}

TwoBodyResult torque_on_test_2d_asymptote(const TwoBodyConfig& cfg, double Omega, const quad::Options& opt) {
  auto f = [&](double w) { return disk_gain(cfg, Omega, w) * disk_absorption(cfg, w) / w; };
  return run(cfg, Omega, 1.0 / (4.0 * pi * pi * cfg.d), f, opt);
}

TwoBodyResult torque_on_test_3d(const TwoBodyConfig& cfg, double Omega, Kernel kernel, FluxRule rule,
                                const quad::Options& opt) {
  auto f = [&](double w) {
    const double k = kernel == Kernel::Exact ? std::norm(translation_3d_dipole(w, cfg.d).u_11E_11E)
                                             : 1.0 / ((w * cfg.d) * (w * cfg.d));
    const cplx St = test_sphere_s(cfg, w);
    const double absorb = rule == FluxRule::Exact ? 1.0 - std::norm(St) : -2.0 * (St - 1.0).real();
    return sphere_gain(cfg, Omega, w, rule) * k * absorb;
  };
  return run(cfg, Omega, 1.0 / (8.0 * pi), f, opt);
}

TwoBodyResult torque_on_test_3d_small(const TwoBodyConfig& cfg, double Omega, const quad::Options& opt) {
  auto f = [&](double w) {
    return std::pow(w, 4) * std::abs(im_alpha(cfg.source, cfg.R, w - Omega)) * im_alpha(cfg.test, cfg.a, w);
  };
  return run(cfg, Omega, 8.0 / (9.0 * pi * cfg.d * cfg.d), f, opt);
}

TwoBodyResult tangential_force_3d(const TwoBodyConfig& cfg, double Omega, FluxRule rule,
                                  const quad::Options& opt) {
  auto f = [&](double w) { return sphere_gain(cfg, Omega, w, rule) * (1.0 - test_sphere_s(cfg, w).real()); };
  return run(cfg, Omega, 1.0 / (32.0 * pi * cfg.d), f, opt);
}

TwoBodyResult tangential_force_3d_small(const TwoBodyConfig& cfg, double Omega, const quad::Options& opt) {
  auto f = [&](double w) {
    return std::pow(w, 6) * std::abs(im_alpha(cfg.source, cfg.R, w - Omega)) * im_alpha(cfg.test, cfg.a, w);
  };
  return run(cfg, Omega, 1.0 / (9.0 * pi * cfg.d), f, opt);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<SweepRow> sweep(TwoBodyConfig cfg, double Omega, const std::vector<double>& ds, Dimension dim) {
  std::vector<SweepRow> rows;
  for (double d : ds) {
    cfg.d = d;
    if (dim == Dimension::Two) {
      const auto t = torque_on_test_2d(cfg, Omega);
      rows.push_back({d, t.value, std::numeric_limits<double>::quiet_NaN(), t.close_warning});
    } else {
      const auto t = torque_on_test_3d(cfg, Omega);
      const auto f = tangential_force_3d(cfg, Omega);
      rows.push_back({d, t.value, f.value, t.close_warning});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "d,M_transfer,F_y,close_separation\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.d << ',' << r.torque << ',';
    if (!std::isnan(r.force)) os << r.force;
    os << ',' << (r.close_warning ? 1 : 0) << '\n';
  }
}

std::string to_json(const SweepRow& row, Dimension dim, int indent) {
  nlohmann::ordered_json j;
  j["M_transfer"] = row.torque;
  j["F_y"] = std::isnan(row.force) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(row.force);
  j["d"] = row.d;
  j["regimeFlags"] = {{"dimension", dim == Dimension::Two ? 2 : 3},
                      {"close_separation", row.close_warning},
                      {"single_reflection", true}};
  return j.dump(indent);
}

}  // namespace spinrad::testbody
