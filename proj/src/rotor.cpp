#include "spinrad/rotor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "spinrad/errors.hpp"
#include "spinrad/parallel.hpp"

namespace spinrad::rotor {

namespace {

constexpr double kStiffnessLimit = 0.1;
constexpr double kAdiabaticLimit = 0.1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double to_unit_open(std::uint64_t h) {
  // (0, 1]: never zero, so log() below is finite.
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

// log-log (or, for a non-positive end value, linear) interpolation table.
struct LawTable {
  std::vector<double> x, m1, m2;
  double m1_zero = 0.0, m2_zero = 0.0;

  static double interp(const std::vector<double>& x, const std::vector<double>& y, double v,
                       double at_zero) {
    const std::size_t n = x.size();
    if (v <= 0.0) return at_zero;
    if (v < x.front()) {
      if (at_zero != 0.0) return at_zero + (y.front() - at_zero) * v / x.front();
      const double k = std::log(y[1] / y[0]) / std::log(x[1] / x[0]);
      return y[0] * std::pow(v / x[0], k);
    }
    if (v >= x.back()) {
      const double k = std::log(y[n - 1] / y[n - 2]) / std::log(x[n - 1] / x[n - 2]);
      return y[n - 1] * std::pow(v / x[n - 1], k);
    }
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double s = std::log(v / x[i]) / std::log(x[i + 1] / x[i]);
    return std::exp(std::log(y[i]) + s * std::log(y[i + 1] / y[i]));
  }
};

void check_stiffness(const TorqueLaw& law, double omega, double dt, double hbar, double I) {
  const double stiff = dt * (hbar / I) * law.drift_slope(omega);
  if (stiff >= kStiffnessLimit) {
    std::ostringstream os;
    os << "time step too large: dt (hbar/I) dMbar/dOmega = " << stiff << " at Omega = " << omega
       << " (must be < " << kStiffnessLimit << ")";
    throw StepSizeError(os.str());
  }
}

// Simpson weights on a uniform grid with an even number of intervals.
double simpson(const std::vector<double>& y, double h) {
  const std::size_t n = y.size() - 1;
  double s = y.front() + y.back();
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
  return s * h / 3.0;
}

}  // namespace

double TorqueLaw::drift_slope(double Omega) const {
  double h = 1e-3 * std::abs(Omega);
  if (h == 0.0) h = 1e-6;
  if (Omega - h < 0.0 && Omega > 0.0) h = 0.5 * Omega;
  auto d = [&](double s) { return (drift(Omega + s) - drift(Omega - s)) / (2.0 * s); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

TorqueLaw power_law(double c, double k, double c2, double k2) {
  if (c < 0.0 || c2 < 0.0 || k < 0.0 || k2 < 0.0) {
    throw DomainError("power-law torque needs non-negative prefactors and exponents");
  }
  TorqueLaw law;
  law.drift = [c, k](double w) { return w > 0.0 ? c * std::pow(w, k) : 0.0; };
  law.diffusion = [c2, k2](double w) { return w > 0.0 ? c2 * std::pow(w, k2) : 0.0; };
  std::ostringstream os;
  os << "power law: Mbar = " << c << " Omega^" << k << ", Mbar2 = " << c2 << " Omega^" << k2;
  law.provenance = os.str();
  return law;
}

std::pair<double, double> torque_moments(const scattering::ScatteringSource& source,
                                         const material::ThermalState& state,
                                         const radiation::Numerics& num) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto weigher = [](double, int m, std::span<const radiation::ModeSample> samples, std::span<double> out) {
    double a = 0.0, b = 0.0;
    for (const auto& s : samples) {
      a += s.weight * s.N;
      b += s.weight * s.N * (s.N + 1.0);
    }
    out[0] = m * a / two_pi;
    out[1] = double(m) * m * b / two_pi;
  };
  const auto sum = radiation::integrate_modes(source, state, 2, weigher, num);
  return {sum.total[0], sum.total[1]};
}

TorqueLaw torque_law_from_radiation(const scattering::ScatteringSource& source, double T_object,
                                    const TorqueGridOptions& grid, const radiation::Numerics& num) {
  if (!(grid.omega_min > 0.0) || !(grid.omega_max > grid.omega_min) || grid.initial_points < 2) {
    throw DomainError("torque grid needs 0 < omega_min < omega_max and at least 2 points");
  }
  TorqueLaw law;
  if (!source.lossy()) {
    law.drift = [](double) { return 0.0; };
    law.diffusion = [](double) { return 0.0; };
    law.provenance = "radiation (" + source.name() + ", lossless: identically zero)";
    return law;
  }
  auto eval = [&](double w) { return torque_moments(source, material::ThermalState{T_object, 0.0, w}, num); };

  auto table = std::make_shared<LawTable>();
  const auto zero = eval(0.0);
  table->m1_zero = zero.first;
  table->m2_zero = zero.second;
  const double lmin = std::log(grid.omega_min), lmax = std::log(grid.omega_max);
  const int n0 = grid.initial_points;
  for (int i = 0; i < n0; ++i) {
    const double w = std::exp(lmin + (lmax - lmin) * i / (n0 - 1));
    const auto v = eval(w);
    if (!(v.first > 0.0) || !(v.second > 0.0)) {
      throw DomainError("torque law must be positive on the grid (Omega = " + std::to_string(w) + ")");
    }
    table->x.push_back(w);
    table->m1.push_back(v.first);
    table->m2.push_back(v.second);
  }
  while (true) {
    LawTable next;
    next.m1_zero = table->m1_zero;
    next.m2_zero = table->m2_zero;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < table->x.size(); ++i) {
      const double w = std::sqrt(table->x[i] * table->x[i + 1]);
      const auto v = eval(w);
      const double a = LawTable::interp(table->x, table->m1, w, table->m1_zero);
      const double b = LawTable::interp(table->x, table->m2, w, table->m2_zero);
      worst = std::max({worst, std::abs(a - v.first) / v.first, std::abs(b - v.second) / v.second});
      next.x.push_back(table->x[i]);
      next.m1.push_back(table->m1[i]);
      next.m2.push_back(table->m2[i]);
      next.x.push_back(w);
      next.m1.push_back(v.first);
      next.m2.push_back(v.second);
    }
    next.x.push_back(table->x.back());
    next.m1.push_back(table->m1.back());
    next.m2.push_back(table->m2.back());
    *table = std::move(next);
    if (worst <= grid.rel_tol) break;
    if (static_cast<int>(table->x.size()) > grid.max_points) {
      throw ConvergenceError("torque grid refinement did not reach the tolerance (worst " +
                             std::to_string(worst) + ")");
    }
  }
  std::shared_ptr<const LawTable> t = table;
  law.drift = [t](double w) { return LawTable::interp(t->x, t->m1, w, t->m1_zero); };
  law.diffusion = [t](double w) { return LawTable::interp(t->x, t->m2, w, t->m2_zero); };
  law.provenance = "radiation (" + source.name() + ", " + std::to_string(t->x.size()) + " grid points)";
  return law;
}

double counter_normal(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t counter) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(trajectory + 0x632BE59BD9B4E019ULL));
  const double u1 = to_unit_open(splitmix64(key ^ (2 * counter)));
  const double u2 = to_unit_open(splitmix64(key ^ (2 * counter + 1)));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Ensemble make_ensemble(double I, double dt, std::size_t n_traj, double omega_init,
                       std::optional<double> drive_omega, std::uint64_t seed, double hbar) {
  if (!(I > 0.0) || !(dt > 0.0) || !(hbar > 0.0)) throw DomainError("I, dt and hbar must be > 0");
  if (!(omega_init >= 0.0)) throw DomainError("initial Omega must be >= 0");
  if (drive_omega && !(*drive_omega > 0.0)) throw DomainError("drive set-point must be > 0");
  Ensemble e;
  e.I = I;
  e.hbar = hbar;
  e.dt = dt;
  e.drive_omega = drive_omega;
  e.seed = seed;
  e.omega.assign(n_traj, omega_init);
  return e;
}

namespace {

struct Stepper {
  const TorqueLaw& law;
  double k;      // hbar / I
  double dt;
  double drive;  // Mbar at the set-point, 0 if free
  std::uint64_t seed;

  // Returns the new Omega; `rate` receives the deterministic dOmega/dt.
  double advance(double w, std::uint64_t traj, std::uint64_t step, double& rate) const {
    rate = -k * (law.drift(w) - drive);
    const double noise = k * std::sqrt(std::max(law.diffusion(w), 0.0) * dt);
    double next = w + rate * dt;
    if (noise > 0.0) next += noise * counter_normal(seed, traj, step);
    return next < 0.0 ? -next : next;
  }
};

}  // namespace

void langevin_step(Ensemble& ens, const TorqueLaw& law) {
  if (ens.omega.empty()) return;
  const double top = *std::max_element(ens.omega.begin(), ens.omega.end());
  check_stiffness(law, top, ens.dt, ens.hbar, ens.I);
  if (ens.drive_omega) check_stiffness(law, *ens.drive_omega, ens.dt, ens.hbar, ens.I);
  const Stepper st{law, ens.hbar / ens.I, ens.dt, ens.drive_omega ? law.drift(*ens.drive_omega) : 0.0,
                   ens.seed};
  double rate;
  for (std::size_t i = 0; i < ens.omega.size(); ++i) ens.omega[i] = st.advance(ens.omega[i], i, ens.step, rate);
  ++ens.step;
  ens.t += ens.dt;
}

SimulationResult simulate(Ensemble ens, const TorqueLaw& law, std::uint64_t n_steps,
                          std::uint64_t record_every, unsigned threads) {
  SimulationResult res;
  const std::size_t n = ens.omega.size();
  double guard = ens.drive_omega.value_or(0.0);
  for (double w : ens.omega) guard = std::max(guard, w);
  guard = std::max(1.05 * guard, 1e-300);
  check_stiffness(law, guard, ens.dt, ens.hbar, ens.I);

  const Stepper st{law, ens.hbar / ens.I, ens.dt, ens.drive_omega ? law.drift(*ens.drive_omega) : 0.0,
                   ens.seed};
  const std::uint64_t n_rec = record_every ? n_steps / record_every + 1 : 0;
  std::vector<double> rec(n_rec * n);
  std::vector<double> adiabatic(n, 0.0);
  const std::uint64_t step0 = ens.step;

  parallel_for(n, threads, [&](std::size_t i) {
    double w = ens.omega[i];
    double local_guard = guard, rate = 0.0, worst = 0.0;
    for (std::uint64_t s = 0; s < n_steps; ++s) {
      if (record_every && s % record_every == 0) rec[(s / record_every) * n + i] = w;
      if (w > local_guard) {
        local_guard = 1.05 * w;
        check_stiffness(law, local_guard, ens.dt, ens.hbar, ens.I);
      }
      const double prev = w;
      w = st.advance(w, i, step0 + s, rate);
      if (prev > 0.0) worst = std::max(worst, std::abs(rate) / (prev * prev));
    }
    if (record_every && n_steps % record_every == 0) rec[(n_steps / record_every) * n + i] = w;
    ens.omega[i] = w;
    adiabatic[i] = worst;
  });

  for (std::uint64_t r = 0; r < n_rec; ++r) {
    const double t = ens.t + static_cast<double>(r * record_every) * ens.dt;
    for (std::size_t i = 0; i < n; ++i) res.samples.push_back({t, i, rec[r * n + i]});
  }
  ens.step += n_steps;
  ens.t += static_cast<double>(n_steps) * ens.dt;
  res.max_adiabaticity = adiabatic.empty() ? 0.0 : *std::max_element(adiabatic.begin(), adiabatic.end());
  res.adiabatic_warning = res.max_adiabaticity > kAdiabaticLimit;
  res.final = std::move(ens);
  return res;
}

// ---------------------------------------------------------------- stationary state

double StationaryDensity::mean() const {
  std::vector<double> y(omega.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = omega[i] * pdf[i];
  return simpson(y, omega[1] - omega[0]);
}

double StationaryDensity::variance() const {
  const double m = mean();
  std::vector<double> y(omega.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (omega[i] - m) * (omega[i] - m) * pdf[i];
  return simpson(y, omega[1] - omega[0]);
}

double StationaryDensity::cdf_at(double w) const {
  if (w <= omega.front()) return 0.0;
  if (w >= omega.back()) return 1.0;
  const auto it = std::upper_bound(omega.begin(), omega.end(), w);
  const std::size_t i = static_cast<std::size_t>(it - omega.begin()) - 1;
  const double s = (w - omega[i]) / (omega[i + 1] - omega[i]);
  return cdf[i] + s * (cdf[i + 1] - cdf[i]);
}

StationaryDensity fokker_planck_stationary(const TorqueLaw& law, double Omega0, double I,
                                           const StationaryOptions& opt) {
  if (!(Omega0 > 0.0) || !(I > 0.0)) throw DomainError("Omega0 and I must be > 0");
  if (!(opt.diffusion_scale > 0.0) || !(opt.hbar > 0.0)) {
    throw DomainError("diffusion scale and hbar must be > 0");
  }
  const double m0 = law.drift(Omega0);
  const double d0 = law.diffusion(Omega0);
  if (!(d0 > 0.0)) throw DomainError("stationary density needs Mbar2(Omega0) > 0");
  const double gain = I / (opt.diffusion_scale * opt.hbar);
  const double slope = law.drift_slope(Omega0);
  double width = slope > 0.0 ? std::sqrt(d0 / (gain * slope)) : Omega0;
  width = std::min(width, Omega0);
  double h = width / opt.points_per_width;
  const std::size_t left_steps = static_cast<std::size_t>(std::ceil(Omega0 / h));
  h = Omega0 / static_cast<double>(left_steps);

  auto g = [&](double w) { return (law.drift(w) - m0) / law.diffusion(w); };
  auto step_integral = [&](double a, double b) {
    return quad::integrate(g, a, b, quad::Options{1e-12, 0.0, 200}).value[0];
  };
  // log of the density up to a constant, from log(Mbar2 P) = -gain int_{Omega0} g.
  auto log_pdf = [&](double w, double log_q) { return log_q - std::log(law.diffusion(w)); };

  std::vector<double> right{log_pdf(Omega0, 0.0)};
  double lq = 0.0, peak = right[0];
  for (std::size_t j = 1;; ++j) {
    const double a = Omega0 + (j - 1) * h, b = Omega0 + j * h;
    lq -= gain * step_integral(a, b);
    const double lp = log_pdf(b, lq);
    right.push_back(lp);
    peak = std::max(peak, lp);
    if (lp < peak - opt.log_cutoff && lp < right[j - 1]) break;
    if (j > opt.max_points) {
      throw DomainError("stationary density does not decay at large Omega (no normalizable state)");
    }
  }

  const double lq_right = lq;
  std::vector<double> left;  // Omega0 - h, Omega0 - 2h, ...
  lq = 0.0;
  bool reached_zero = false;
  for (std::size_t j = 1; j <= left_steps; ++j) {
    const double b = Omega0 - (j - 1) * h;
    const double a = j == left_steps ? 0.0 : Omega0 - j * h;
    if (a == 0.0 && law.diffusion(0.0) <= 0.0) {
      reached_zero = true;
      break;
    }
    lq += gain * step_integral(a, b);
    const double lp = log_pdf(a, lq);
    left.push_back(lp);
    peak = std::max(peak, lp);
    if (lp < peak - opt.log_cutoff && (left.size() < 2 || lp < left[left.size() - 2])) break;
    if (j > opt.max_points) throw DomainError("stationary density grid too large");
  }
  if (reached_zero) {
    // The grid stops at Omega = h; at 0 the density is a limit.
    const std::size_t nl = left.size();
    const double lp_h = nl >= 1 ? left[nl - 1] : right[0];
    const double lp_2h = nl >= 2 ? left[nl - 2] : right[0];
    const double expo = (lp_2h - lp_h) / std::log(2.0);  // P ~ Omega^expo near 0
    if (lp_h > peak - opt.log_cutoff && expo <= -1.0) {
      const double k1 = std::log(law.drift(2.0 * h) / law.drift(h)) / std::log(2.0);
      const double k2 = std::log(law.diffusion(2.0 * h) / law.diffusion(h)) / std::log(2.0);
      std::ostringstream os;
      os << "stationary density is not integrable at Omega -> 0 (P ~ Omega^" << expo
         << "; local exponents Mbar ~ Omega^" << k1 << ", Mbar2 ~ Omega^" << k2 << ")";
      throw DomainError(os.str());
    }
    left.push_back(expo > 0.0 ? -INFINITY : lp_h);
  }

  StationaryDensity d;
  const double start = Omega0 - static_cast<double>(left.size()) * h;
  std::vector<double> logs(left.rbegin(), left.rend());
  logs.insert(logs.end(), right.begin(), right.end());
  if ((logs.size() - 1) % 2 == 1) {
    // Simpson needs an even interval count; extend the decayed right tail.
    const double a = Omega0 + (right.size() - 1) * h;
    const double b = a + h;
    logs.push_back(log_pdf(b, lq_right - gain * step_integral(a, b)));
  }
  d.omega.resize(logs.size());
  d.pdf.resize(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    d.omega[i] = std::max(start + static_cast<double>(i) * h, 0.0);
    d.pdf[i] = std::exp(logs[i] - peak);
  }
  const double norm = simpson(d.pdf, h);
  for (double& p : d.pdf) p /= norm;
  d.cdf.assign(d.pdf.size(), 0.0);
  for (std::size_t i = 1; i < d.pdf.size(); ++i) d.cdf[i] = d.cdf[i - 1] + 0.5 * h * (d.pdf[i] + d.pdf[i - 1]);
  const double last = d.cdf.back();
  for (double& c : d.cdf) c /= last;
  return d;
}

double uncertainty(const TorqueLaw& law, double Omega0, double I, double hbar, double diffusion_scale) {
  if (!(Omega0 > 0.0) || !(I > 0.0) || !(hbar > 0.0)) throw DomainError("Omega0, I and hbar must be > 0");
  const double slope = law.drift_slope(Omega0);
  if (!(slope > 0.0)) {
    throw DomainError("torque law is flat or decreasing at Omega0; the uncertainty is undefined");
  }
  return std::sqrt(diffusion_scale * hbar * I * law.diffusion(Omega0) / slope);
}

double ks_distance(std::vector<double> samples, const StationaryDensity& density) {
  if (samples.empty()) throw DomainError("KS distance of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double D = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = density.cdf_at(samples[i]);
    D = std::max({D, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  return D;
}

MomentSummary moments(const std::vector<double>& x) {
  MomentSummary m;
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= x.size() > 1 ? static_cast<double>(x.size() - 1) : 1.0;
  return m;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& s) {
  os << "t,traj_id,omega\n" << std::setprecision(17);
  for (const auto& r : s) os << r.t << ',' << r.traj << ',' << r.omega << '\n';
}

void write_density_csv(std::ostream& os, const StationaryDensity& d) {
  os << "omega,pdf\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.omega.size(); ++i) os << d.omega[i] << ',' << d.pdf[i] << '\n';
}

std::string summary_json(const MomentSummary& m, double I, double I_delta_analytic, int indent) {
  nlohmann::ordered_json j;
  j["mean"] = m.mean;
  j["var"] = m.var;
  j["IDeltaOmega_analytic"] = I_delta_analytic;
  j["IDeltaOmega_mc"] = I * std::sqrt(m.var);
  return j.dump(indent);
}

}  // namespace spinrad::rotor
