#include "spinrad/material.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spinrad/csv.hpp"
#include "spinrad/errors.hpp"

namespace spinrad::material {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

Tabulated::Tabulated(std::vector<double> omega, std::vector<double> re, std::vector<double> im)
    : omega_(std::move(omega)), re_(std::move(re)), im_(std::move(im)) {
  if (omega_.size() < 2 || re_.size() != omega_.size() || im_.size() != omega_.size()) {
    throw DomainError("tabulated eps needs at least two rows of (omega, re, im)");
  }
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (omega_[i] < 0.0) throw DomainError("tabulated eps: negative omega");
    if (im_[i] < 0.0) throw DomainError("tabulated eps: Im eps < 0 at positive omega");
    if (i > 0 && !(omega_[i] > omega_[i - 1])) {
      throw DomainError("tabulated eps: omega not strictly increasing");
    }
  }
}

Tabulated Tabulated::from_csv(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"omega", "re", "im"});
  std::vector<double> w, re, im;
  while (auto row = reader.next()) {
    if (row->size() != 3) throw ParseError("expected 3 columns", reader.line());
    const double wv = csv::to_double((*row)[0], reader.line());
    if (wv < 0.0) throw ParseError("negative omega", reader.line());
    if (!w.empty() && !(wv > w.back())) throw ParseError("omega not strictly increasing", reader.line());
    const double imv = csv::to_double((*row)[2], reader.line());
    if (imv < 0.0) throw ParseError("Im eps must be >= 0 for omega >= 0", reader.line());
    w.push_back(wv);
    re.push_back(csv::to_double((*row)[1], reader.line()));
    im.push_back(imv);
  }
  if (w.size() < 2) throw ParseError("need at least two data rows", reader.line());
  return Tabulated(std::move(w), std::move(re), std::move(im));
}

Tabulated Tabulated::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return from_csv(in);
}

cplx Tabulated::operator()(double w) const {
  const double a = std::abs(w);
  if (a < omega_.front() || a > omega_.back()) {
    std::ostringstream os;
    os << "tabulated eps: |omega| = " << a << " outside [" << omega_.front() << ", "
       << omega_.back() << "]";
    throw ExtrapolationError(os.str());
  }
  auto hi = std::upper_bound(omega_.begin(), omega_.end(), a);
  if (hi == omega_.end()) --hi;
  const std::size_t j = static_cast<std::size_t>(hi - omega_.begin());
  const std::size_t i = j - 1;
  const double t = (a - omega_[i]) / (omega_[j] - omega_[i]);
  const double re = re_[i] + t * (re_[j] - re_[i]);
  double im;
  if (im_[i] > 0.0 && im_[j] > 0.0) {
    im = std::exp(std::log(im_[i]) + t * (std::log(im_[j]) - std::log(im_[i])));
  } else {
    im = im_[i] + t * (im_[j] - im_[i]);
  }
  return {re, w < 0.0 ? -im : im};
}

bool Tabulated::lossy() const {
  return std::any_of(im_.begin(), im_.end(), [](double v) { return v > 0.0; });
}

cplx epsilon(const DielectricModel& model, double omega) {
  return std::visit(
      overloaded{
          [](const Vacuum&) { return cplx{1.0, 0.0}; },
          [omega](const Drude& d) {
            if (omega == 0.0) throw DomainError("Drude eps is singular at omega = 0");
            return cplx{1.0, 4.0 * kPi * d.sigma / omega};
          },
          [omega](const Lorentz& l) {
            const cplx den{l.omega_0 * l.omega_0 - omega * omega, -l.gamma * omega};
            return l.eps_inf + l.omega_p * l.omega_p / den;
          },
          [omega](const ConstantEps& c) { return cplx{c.re, c.im * sgn(omega)}; },
          [omega](const Tabulated& t) { return t(omega); },
      },
      model);
}

cplx susceptibility_omega2(const DielectricModel& model, double omega) {
  const double w2 = omega * omega;
  return std::visit(
      overloaded{
          [](const Vacuum&) { return cplx{0.0, 0.0}; },
          [omega](const Drude& d) { return cplx{0.0, 4.0 * kPi * d.sigma * omega}; },
          [w2, omega](const Lorentz& l) {
            const cplx den{l.omega_0 * l.omega_0 - w2, -l.gamma * omega};
            return (l.eps_inf - 1.0) * w2 + l.omega_p * l.omega_p * w2 / den;
          },
          [w2, omega](const ConstantEps& c) { return cplx{c.re - 1.0, c.im * sgn(omega)} * w2; },
          [w2, omega](const Tabulated& t) { return (t(omega) - 1.0) * w2; },
      },
      model);
}

bool is_lossy(const DielectricModel& model) {
  return std::visit(overloaded{
                        [](const Vacuum&) { return false; },
                        [](const Drude& d) { return d.sigma > 0.0; },
                        [](const Lorentz& l) { return l.gamma > 0.0 && l.omega_p != 0.0; },
                        [](const ConstantEps& c) { return c.im > 0.0; },
                        [](const Tabulated& t) { return t.lossy(); },
                    },
                    model);
}

std::string describe(const DielectricModel& model) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Vacuum&) { os << "vacuum"; },
                 [&](const Drude& d) { os << "drude(sigma=" << d.sigma << ")"; },
                 [&](const Lorentz& l) {
                   os << "lorentz(eps_inf=" << l.eps_inf << ",omega_p=" << l.omega_p
                      << ",omega_0=" << l.omega_0 << ",gamma=" << l.gamma << ")";
                 },
                 [&](const ConstantEps& c) { os << "constant(" << c.re << "," << c.im << ")"; },
                 [&](const Tabulated& t) {
                   os << "tabulated[" << t.omega_min() << "," << t.omega_max() << "]";
                 },
             },
             model);
  return os.str();
}

double bose_occupation(double omega, double T) {
  if (T < 0.0 || std::isnan(T)) throw DomainError("temperature must be >= 0");
  if (omega == 0.0) {
    if (T == 0.0) throw DomainError("bose_occupation: omega = 0 at T = 0");
    throw DivergenceError("bose_occupation: omega = 0 at T > 0");
  }
  if (T == 0.0) return omega > 0.0 ? 0.0 : -1.0;
  if (omega < 0.0) return -1.0 - 1.0 / std::expm1(-omega / T);
  return 1.0 / std::expm1(omega / T);
}

cplx eps_ratio(const DielectricModel& model, double omega, double shift) {
  if (omega == 0.0) {
    if (std::holds_alternative<Drude>(model)) return 1.0;
    const cplx eps = epsilon(model, 0.0);
    if (std::abs(eps + shift) <= 1e-13 * (std::abs(eps) + shift)) {
      throw DomainError("eps = -" + std::to_string(shift) + " pole at omega = 0");
    }
    return (eps - 1.0) / (eps + shift);
  }
  const cplx x = susceptibility_omega2(model, omega);
  // eps + shift = (eps - 1) + (1 + shift)
  const double w2 = (1.0 + shift) * omega * omega;
  const cplx den = x + w2;
  if (std::abs(den) <= 1e-13 * (std::abs(x) + w2)) {
    throw DomainError("eps = -" + std::to_string(shift) + " pole at omega = " + std::to_string(omega));
  }
  return x / den;
}

cplx sphere_polarizability(const DielectricModel& model, double R, double omega) {
  return R * R * R * eps_ratio(model, omega, 2.0);
}

void ThermalState::validate() const {
  if (!(T_object >= 0.0)) throw DomainError("T_object must be >= 0");
  if (!(T_env >= 0.0)) throw DomainError("T_env must be >= 0");
  if (!(Omega >= 0.0)) throw DomainError("Omega must be >= 0");
}

}  // namespace spinrad::material
