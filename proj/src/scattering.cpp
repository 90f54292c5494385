#include "spinrad/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "spinrad/csv.hpp"
#include "spinrad/errors.hpp"
#include "spinrad/quadrature.hpp"
#include "spinrad/specfun.hpp"

namespace spinrad::scattering {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void require_positive_frequency(double omega, const char* who) {
  if (!(omega > 0.0)) throw DomainError(std::string(who) + ": omega must be > 0");
}

struct DiskPQ {
  cplx p, q;
};

DiskPQ disk_pq(const DielectricModel& model, double R, double Omega, double omega, int m) {
  using specfun::bessel_j;
  using specfun::bessel_j_derivative;
  using specfun::bessel_y;
  using specfun::HankelKind;
  const cplx wt = disk_interior_frequency(model, Omega, omega, m);
  const cplx z = wt * R;
  const double x = omega * R;
  const cplx a = wt * bessel_j_derivative(m, z);
  const cplx b = omega * bessel_j(m, z);
  const double jx = bessel_j(m, x).real();
  const double djx = bessel_j_derivative(m, x).real();
  const cplx h1 = specfun::hankel(HankelKind::First, m, x);
  const cplx dh1 = specfun::hankel_derivative(HankelKind::First, m, x);
  return {a * jx - b * djx, a * h1.imag() - b * dh1.imag()};
}

}  // namespace

std::string to_string(Polarization p) {
  switch (p) {
    case Polarization::Scalar: return "scalar";
    case Polarization::E: return "E";
    case Polarization::M: return "M";
  }
  return "?";
}

Polarization polarization_from_string(const std::string& s) {
  if (s == "scalar" || s == "S" || s.empty()) return Polarization::Scalar;
  if (s == "E" || s == "e") return Polarization::E;
  if (s == "M" || s == "m") return Polarization::M;
  throw DomainError("unknown polarization \"" + s + "\"");
}

std::string extra_to_string(const Extra& e) {
  if (const auto* k = std::get_if<Kz>(&e)) {
    std::ostringstream os;
    os.precision(17);
    os << k->value;
    return os.str();
  }
  if (const auto* l = std::get_if<Ell>(&e)) return std::to_string(l->value);
  return "";
}

cplx disk_interior_frequency(const DielectricModel& model, double Omega, double omega, int m) {
  const double wp = omega - Omega * m;
  const cplx w2 = material::susceptibility_omega2(model, wp) + omega * omega;
  cplx wt = std::sqrt(w2);
  if (wt.imag() != 0.0 && sgn(wt.imag()) != sgn(wp) && wp != 0.0) wt = -wt;
  return wt;
}

cplx disk_smatrix(const DielectricModel& model, double R, double Omega, double omega, int m) {
  require_positive_frequency(omega, "disk_smatrix");
  const auto [p, q] = disk_pq(model, R, Omega, omega, m);
  const cplx den = p + kI * q;
  if (std::abs(den) < 1e-300) {
    throw ResonanceError("disk_smatrix: vanishing denominator at omega = " + std::to_string(omega) +
                         ", m = " + std::to_string(m));
  }
  return -(p - kI * q) / den;
}

double disk_flux_factor(const DielectricModel& model, double R, double Omega, double omega, int m) {
  require_positive_frequency(omega, "disk_flux_factor");
  const auto [p, q] = disk_pq(model, R, Omega, omega, m);
  const cplx d = p + kI * q;
  if (std::abs(d) < 1e-300) {
    throw ResonanceError("disk_flux_factor: vanishing denominator at omega = " +
                         std::to_string(omega) + ", m = " + std::to_string(m));
  }
  // Scale before squaring: |d| itself can be near the bottom of the range.
  const double s = std::max(std::abs(d.real()), std::abs(d.imag()));
  return 4.0 * ((p / s) * std::conj(q / s)).imag() / std::norm(d / s);
}

SmallVelocity disk_smatrix_smallvel(const DielectricModel& model, double R, double Omega, double omega) {
  const double wp = omega - Omega;
  // (omega - Omega)^2 Im eps(omega - Omega) = Im X(omega - Omega), finite at omega = Omega.
  const double im_x = material::susceptibility_omega2(model, wp).imag();
  const double r2 = R * R;
  const double size = std::max(omega, std::abs(disk_interior_frequency(model, Omega, omega, 1))) * R;
  return {-(kPi / 8.0) * omega * omega * r2 * r2 * im_x, size >= kSmallVelocityLimit};
}

cplx sphere_smatrix_dipole(const DielectricModel& model, double R, double Omega, double omega, int m) {
  require_positive_frequency(omega, "sphere_smatrix_dipole");
  if (m < -1 || m > 1) throw DomainError("sphere dipole channel needs m in {-1, 0, 1}");
  const cplx alpha = material::sphere_polarizability(model, R, omega - Omega * m);
  return 1.0 + kI * (4.0 * omega * omega * omega / 3.0) * alpha;
}

Block2 cylinder_smatrix_block(const DielectricModel& model, double R, double Omega, double omega,
                              double kz, int m) {
  require_positive_frequency(omega, "cylinder_smatrix_block");
  if (std::abs(kz) > omega) throw DomainError("cylinder block: |kz| > omega (evanescent)");
  if (m != 1 && m != -1) throw DomainError("cylinder block is available for m = +-1 only");
  cplx beta;
  try {
    beta = material::eps_ratio(model, omega - Omega * m, 1.0);
  } catch (const DomainError& e) {
    throw DomainError(std::string("cylinder block: surface plasmon pole, ") + e.what());
  }
  const cplx c = 0.5 * kPi * kI * beta * R * R;
  return {1.0 + c * omega * omega, c * omega * kz, c * omega * kz, 1.0 + c * kz * kz};
}

std::array<double, 2> block_row_fluxes(const Block2& b, FluxRule rule) {
  const cplx tm = b.mm - 1.0;
  const cplx te = b.ee - 1.0;
  if (rule == FluxRule::LeadingOrder) return {-2.0 * tm.real(), -2.0 * te.real()};
  return {-2.0 * tm.real() - std::norm(tm) - std::norm(b.me),
          -2.0 * te.real() - std::norm(te) - std::norm(b.em)};
}

double flux_factor(const ChannelAmplitude& ch) {
  if (ch.block) {
    const auto rows = block_row_fluxes(*ch.block, ch.rule);
    switch (ch.mode.pol) {
      case Polarization::M: return rows[0];
      case Polarization::E: return rows[1];
      case Polarization::Scalar: return rows[0] + rows[1];
    }
  }
  const cplx t = ch.S - 1.0;
  if (ch.rule == FluxRule::LeadingOrder) return -2.0 * t.real();
  return -2.0 * t.real() - std::norm(t);
}

std::pair<double, double> ScatteringSource::support(const ChannelGroup&) const {
  return {0.0, std::numeric_limits<double>::infinity()};
}

// ---------------------------------------------------------------- disk

DiskBody::DiskBody(DielectricModel model, double R, bool small_velocity)
    : model_(std::move(model)), R_(R), small_velocity_(small_velocity) {
  if (!(R > 0.0)) throw DomainError("disk radius must be > 0");
}

std::vector<ChannelGroup> DiskBody::groups(int m) const {
  if (small_velocity_ && m != 1) return {};
  return {ChannelGroup{m, std::monostate{}, Polarization::Scalar, 0}};
}

void DiskBody::sample(const ChannelGroup& g, double omega, double Omega,
                      std::vector<SubChannel>& out) const {
  out.clear();
  const double flux = small_velocity_ ? -disk_smatrix_smallvel(model_, R_, Omega, omega).value
                                      : disk_flux_factor(model_, R_, Omega, omega, g.m);
  out.push_back({1.0, flux});
}

// ---------------------------------------------------------------- sphere

SphereBody::SphereBody(DielectricModel model, double R, FluxRule rule)
    : model_(std::move(model)), R_(R), rule_(rule) {
  if (!(R > 0.0)) throw DomainError("sphere radius must be > 0");
}

std::vector<ChannelGroup> SphereBody::groups(int m) const {
  if (m < -1 || m > 1) return {};
  return {ChannelGroup{m, Ell{1}, Polarization::E, 0}};
}

void SphereBody::sample(const ChannelGroup& g, double omega, double Omega,
                        std::vector<SubChannel>& out) const {
  out.clear();
  const cplx alpha = material::sphere_polarizability(model_, R_, omega - Omega * g.m);
  const double c = 4.0 * omega * omega * omega / 3.0;
  // S - 1 = i c alpha, so -2 Re(S - 1) = 2 c Im alpha and |S - 1|^2 = c^2 |alpha|^2.
  double flux = 2.0 * c * alpha.imag();
  if (rule_ == FluxRule::Exact) flux -= c * c * std::norm(alpha);
  out.push_back({1.0, flux});
}

// ---------------------------------------------------------------- cylinder

CylinderBody::CylinderBody(DielectricModel model, double R, double L, FluxRule rule)
    : model_(std::move(model)), R_(R), L_(L), rule_(rule) {
  if (!(R > 0.0) || !(L > 0.0)) throw DomainError("cylinder radius and length must be > 0");
}

std::vector<ChannelGroup> CylinderBody::groups(int m) const {
  if (m != 1 && m != -1) return {};
  return {ChannelGroup{m, std::monostate{}, Polarization::M, 0},
          ChannelGroup{m, std::monostate{}, Polarization::E, 1}};
}

void CylinderBody::sample(const ChannelGroup& g, double omega, double Omega,
                          std::vector<SubChannel>& out) const {
  out.clear();
  const auto gl = quad::gauss_legendre(8);
  const std::size_t row = g.pol == Polarization::M ? 0 : 1;
  const cplx beta = material::eps_ratio(model_, omega - Omega * g.m, 1.0);
  const double r2 = R_ * R_;
  for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
    const double kz = omega * gl.nodes[j];
    const double weight = L_ / (2.0 * kPi) * omega * gl.weights[j];
    double flux;
    if (rule_ == FluxRule::LeadingOrder) {
      // -2 Re((i pi/2) beta R^2 k^2) = pi R^2 Im(beta) k^2 with k = omega or kz.
      const double k2 = row == 0 ? omega * omega : kz * kz;
      flux = kPi * r2 * beta.imag() * k2;
    } else {
      flux = block_row_fluxes(cylinder_smatrix_block(model_, R_, Omega, omega, kz, g.m), rule_)[row];
    }
    out.push_back({weight, flux});
  }
}

// ---------------------------------------------------------------- tables

ChannelTable::ChannelTable(std::vector<Channel> channels) : channels_(std::move(channels)) {
  for (const auto& c : channels_) {
    if (c.omega.empty() || c.omega.size() != c.S.size()) {
      throw DomainError("channel table: empty or ragged channel");
    }
    for (std::size_t i = 1; i < c.omega.size(); ++i) {
      if (!(c.omega[i] > c.omega[i - 1])) throw DomainError("channel table: omega not increasing");
    }
  }
}

ChannelTable ChannelTable::from_csv(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"omega", "m", "extra", "pol", "ReS", "ImS"});
  bool extra_is_l = false;
  auto scan_directives = [&] {
    for (const auto& c : reader.comments()) {
      const auto eq = c.find('=');
      if (eq == std::string::npos || csv::trim(c.substr(0, eq)) != "extra") continue;
      const std::string v = csv::trim(c.substr(eq + 1));
      if (v == "l") extra_is_l = true;
      else if (v == "kz") extra_is_l = false;
      else throw ParseError("extra directive must be kz or l", reader.line());
    }
  };
  scan_directives();

  std::vector<Channel> channels;
  auto same_key = [](const Channel& c, int m, const Extra& e, Polarization p) {
    return c.m == m && c.extra == e && c.pol == p;
  };
  while (auto row = reader.next()) {
    const int line = reader.line();
    scan_directives();
    if (row->size() != 6) throw ParseError("expected 6 columns", line);
    const auto& f = *row;
    const double omega = csv::to_double(f[0], line);
    if (!(omega > 0.0)) throw ParseError("omega must be > 0", line);
    const long long mm = csv::to_int(f[1], line);
    if (std::abs(mm) > 10000) throw ParseError("|m| too large", line);
    const int m = static_cast<int>(mm);
    Extra extra{};
    if (!f[2].empty()) {
      if (extra_is_l) {
        const long long l = csv::to_int(f[2], line);
        if (l < 0 || l < std::abs(m)) throw ParseError("multipole index l must satisfy l >= |m|", line);
        extra = Ell{static_cast<int>(l)};
      } else {
        const double kz = csv::to_double(f[2], line);
        if (std::abs(kz) > omega) throw ParseError("|kz| > omega (evanescent row)", line);
        extra = Kz{kz};
      }
    }
    Polarization pol;
    try {
      pol = polarization_from_string(f[3]);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line);
    }
    const cplx S{csv::to_double(f[4], line), csv::to_double(f[5], line)};
    auto it = std::find_if(channels.begin(), channels.end(),
                           [&](const Channel& c) { return same_key(c, m, extra, pol); });
    if (it == channels.end()) {
      channels.push_back(Channel{m, extra, pol, {}, {}});
      it = std::prev(channels.end());
    }
    if (!it->omega.empty() && !(omega > it->omega.back())) {
      throw ParseError("omega not strictly increasing within channel (m=" + std::to_string(m) + ")", line);
    }
    it->omega.push_back(omega);
    it->S.push_back(S);
  }
  if (channels.empty()) throw ParseError("channel table has no rows", reader.line());
  return ChannelTable(std::move(channels));
}

ChannelTable ChannelTable::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return from_csv(in);
}

std::vector<ChannelGroup> ChannelTable::groups(int m) const {
  std::vector<ChannelGroup> out;
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].m == m) out.push_back({m, channels_[i].extra, channels_[i].pol, i});
  }
  return out;
}

cplx ChannelTable::amplitude(std::size_t channel, double omega) const {
  const auto& c = channels_.at(channel);
  if (omega < c.omega.front() || omega > c.omega.back()) return 1.0;
  if (c.omega.size() == 1) return c.S.front();
  auto hi = std::upper_bound(c.omega.begin(), c.omega.end(), omega);
  if (hi == c.omega.end()) --hi;
  const auto j = static_cast<std::size_t>(hi - c.omega.begin());
  const double t = (omega - c.omega[j - 1]) / (c.omega[j] - c.omega[j - 1]);
  return c.S[j - 1] + t * (c.S[j] - c.S[j - 1]);
}

void ChannelTable::sample(const ChannelGroup& g, double omega, double, std::vector<SubChannel>& out) const {
  out.clear();
  out.push_back({1.0, 1.0 - std::norm(amplitude(g.index, omega))});
}

std::optional<int> ChannelTable::max_order() const {
  int top = 0;
  for (const auto& c : channels_) top = std::max(top, std::abs(c.m));
  return top;
}

std::vector<double> ChannelTable::breakpoints(const ChannelGroup& g) const {
  return channels_.at(g.index).omega;
}

std::pair<double, double> ChannelTable::support(const ChannelGroup& g) const {
  const auto& c = channels_.at(g.index);
  return {c.omega.front(), c.omega.back()};
}

bool ChannelTable::lossy() const {
  for (const auto& c : channels_) {
    for (const auto& s : c.S) {
      if (std::abs(std::norm(s) - 1.0) > 1e-12) return true;
    }
  }
  return false;
}

}  // namespace spinrad::scattering
