#include "spinrad/verify.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include "spinrad/errors.hpp"
#include "spinrad/material.hpp"
#include "spinrad/photonstats.hpp"
#include "spinrad/radiation.hpp"
#include "spinrad/rotor.hpp"
#include "spinrad/scattering.hpp"
#include "spinrad/specfun.hpp"
#include "spinrad/testbody.hpp"

namespace spinrad::verify {

namespace {

using cplx = std::complex<double>;
using material::ConstantEps;
using material::DielectricModel;
using material::Drude;
using material::ThermalState;
constexpr double pi = std::numbers::pi;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

radiation::Numerics numerics(const Options& opt) {
  radiation::Numerics n;
  n.threads = opt.threads;
  return n;
}

CriterionResult titled(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

bool within(double ratio, double tol) { return std::abs(ratio - 1.0) <= tol; }

CriterionResult c1_sphere(const Options& opt) {
  auto r = titled(1, "Drude sphere closed forms, sigma/Omega = 1e3");
  const auto t0 = std::chrono::steady_clock::now();
  const double R = 0.1, sigma = 1e3, Omega = 1.0;
  const auto res = radiation::integrate_power(scattering::SphereBody(Drude{sigma}, R),
                                              ThermalState{0.0, 0.0, Omega}, numerics(opt));
  const double P0 = std::pow(R, 3) * std::pow(Omega, 6) / (30.0 * pi * pi * sigma);
  const double M0 = std::pow(R, 3) * std::pow(Omega, 5) / (20.0 * pi * pi * sigma);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = within(res.P / P0, 0.02) && within(res.M / M0, 0.02) && secs < 1.0;
  r.measured = "P/P0 = " + fmt("%.5f", res.P / P0) + ", M/M0 = " + fmt("%.5f", res.M / M0) +
               " (band [0.98, 1.02], budget 1 s)";
  return r;
}

CriterionResult c2_cylinder_good(const Options& opt) {
  auto r = titled(2, "Drude cylinder, Omega << sigma");
  const auto t0 = std::chrono::steady_clock::now();
  const double R = 0.05, L = 2.0, sigma = 1e3, Omega = 1.0;
  const auto res = radiation::integrate_power_cylinder(Drude{sigma}, R, L, Omega, ThermalState{}, numerics(opt));
  const double P0 = L * R * R * std::pow(Omega, 6) / (90.0 * pi * pi * sigma);
  const double M0 = L * R * R * std::pow(Omega, 5) / (60.0 * pi * pi * sigma);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = within(res.P / P0, 0.02) && within(res.M / M0, 0.02) && secs < 5.0;
  r.measured = "P/P0 = " + fmt("%.5f", res.P / P0) + ", M/M0 = " + fmt("%.5f", res.M / M0) +
               " (tolerance 2%, budget 5 s)";
  return r;
}

CriterionResult c3_cylinder_poor(const Options& opt) {
  auto r = titled(3, "Drude cylinder, sigma << Omega (sigma/Omega = 1e-3)");
  const double R = 0.01, L = 1.0, sigma = 1e-3, Omega = 1.0;
  const auto res = radiation::integrate_power_cylinder(Drude{sigma}, R, L, Omega, ThermalState{}, numerics(opt));
  const double P0 = 8.0 * L * R * R * std::pow(Omega, 4) * sigma * std::log(Omega / sigma);
  r.pass = within(res.P / P0, 0.10);
  r.measured = "P / [8 L R^2 Omega^4 sigma log(Omega/sigma)] = " + fmt("%.4f", res.P / P0) + " (tolerance 10%)";
  return r;
}

CriterionResult c4_small_velocity(const Options&) {
  auto r = titled(4, "disk exact vs small-velocity |S_1|^2 - 1 at Omega R = 0.01");
  const double R = 0.01, Omega = 1.0;
  double worst = 0.0;
  for (double sigma : {0.1, 1.0, 10.0}) {
    const DielectricModel m = Drude{sigma};
    for (int k = 1; k < 100; ++k) {
      const double w = Omega * k / 100.0;
      const double exact = -scattering::disk_flux_factor(m, R, Omega, w, 1);
      const double approx = scattering::disk_smatrix_smallvel(m, R, Omega, w).value;
      worst = std::max(worst, std::abs(approx / exact - 1.0));
    }
  }
  r.pass = worst <= 0.05;
  r.measured = "max relative difference " + fmt("%.2e", worst) + " over omega in (0, Omega) (limit 5%)";
  return r;
}

struct Geometry {
  std::string name;
  std::unique_ptr<scattering::ScatteringSource> body;
};

std::vector<Geometry> suite_geometries() {
  const DielectricModel d = Drude{0.7};
  std::vector<Geometry> g;
  g.push_back({"disk", std::make_unique<scattering::DiskBody>(d, 0.3)});
  g.push_back({"sphere", std::make_unique<scattering::SphereBody>(d, 0.2)});
  g.push_back({"cylinder", std::make_unique<scattering::CylinderBody>(d, 0.1, 1.5)});
  // Tabulated copy of the disk's m = +-1 amplitudes.
  std::vector<scattering::ChannelTable::Channel> ch;
  for (int m : {1, -1}) {
    scattering::ChannelTable::Channel c{m, std::monostate{}, scattering::Polarization::Scalar, {}, {}};
    for (int k = 1; k <= 400; ++k) {
      const double w = 0.01 * k;
      c.omega.push_back(w);
      c.S.push_back(scattering::disk_smatrix(d, 0.3, 1.0, w, m));
    }
    ch.push_back(std::move(c));
  }
  g.push_back({"table", std::make_unique<scattering::ChannelTable>(std::move(ch))});
  return g;
}

CriterionResult c5_energy(const Options& opt) {
  auto r = titled(5, "energy bookkeeping Q = Omega M - P");
  double worst = 0.0;
  for (const auto& g : suite_geometries()) {
    for (const ThermalState& s : {ThermalState{0.0, 0.0, 1.0}, ThermalState{0.3, 0.0, 1.0}}) {
      const auto res = radiation::integrate_power(*g.body, s, numerics(opt));
      worst = std::max(worst, std::abs(res.Q - (s.Omega * res.M - res.P)) / std::abs(res.P));
    }
  }
  r.pass = worst < 1e-6;
  r.measured = "max |Q - (Omega M - P)|/P = " + fmt("%.2e", worst) + " over disk, sphere, cylinder, table (limit 1e-6)";
  return r;
}

CriterionResult c6_equilibrium(const Options& opt) {
  auto r = titled(6, "equilibrium null, static body at T = T_env");
  double worst = 0.0;
  for (const auto& g : suite_geometries()) {
    for (double T : {0.1, 1.0}) {
      const auto res = radiation::kirchhoff_power(*g.body, T, T, numerics(opt));
      worst = std::max(worst, std::abs(res.P));
    }
  }
  r.pass = worst < 1e-12;
  r.measured = "max |P| = " + fmt("%.2e", worst) + " (limit 1e-12)";
  return r;
}

// Taylor coefficients of f about 0 from a discrete Cauchy integral on |z| = rho.
std::vector<double> taylor_coefficients(const std::function<cplx(cplx)>& f, double rho, int count) {
  const int n = 256;
  std::vector<cplx> samples(n);
  for (int k = 0; k < n; ++k) samples[k] = f(std::polar(rho, 2.0 * pi * k / n));
  std::vector<double> c(count);
  for (int p = 0; p < count; ++p) {
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) s += samples[k] * std::polar(1.0, -2.0 * pi * k * p / n);
    c[p] = (s / double(n)).real() / std::pow(rho, p);
  }
  return c;
}

CriterionResult c7_counting(const Options&) {
  auto r = titled(7, "photon counting identities");
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double N : {1e-2, 1.0, 10.0}) {
    const auto d = photonstats::counting_distribution(N, 10000);
    double norm = d.tail, mean = 0.0, second = 0.0;
    for (std::size_t n = 0; n < d.P.size(); ++n) {
      norm += d.P[n];
      mean += n * d.P[n];
      second += double(n) * n * d.P[n];
    }
    const double var = second - mean * mean;
    worst = std::max({worst, std::abs(norm - 1.0), std::abs(mean / N - 1.0), std::abs(var / (N * (N + 1)) - 1.0)});
    const auto F = taylor_coefficients([&](cplx eta) { return -std::log(1.0 - eta * N); }, 0.5 / N, 9);
    double fact = 1.0;
    for (int p = 1; p <= 8; ++p) {
      fact *= p;
      worst = std::max(worst, std::abs(photonstats::cumulant(N, p) / (fact * F[p]) - 1.0));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = worst < 1e-8 && secs < 0.1;
  r.measured = "max deviation " + fmt("%.2e", worst) + " for N in {1e-2, 1, 10}, " + fmt("%.3f", secs) +
               " s (limits 1e-8, 0.1 s)";
  return r;
}

CriterionResult c8_entropy(const Options&) {
  auto r = titled(8, "entropy: combined rate >= 0 and Shannon sum");
  double lowest = INFINITY;
  for (int i = 0; i <= 30; ++i) {
    const double rr = std::pow(10.0, -6.0 + 6.0 * i / 30.0);
    for (int j = 0; j <= 40; ++j) {
      const double x = std::pow(10.0, -3.0 + 5.0 * j / 40.0);
      lowest = std::min(lowest, photonstats::combined_mode_entropy(x, rr));
    }
  }
  double worst = 0.0;
  for (double N : {1e-6, 1e-3, 0.1, 1.0, 10.0, 100.0}) {
    const double lq = std::log(N) - std::log1p(N);  // log of N/(N+1)
    double H = 0.0;
    for (int n = 0;; ++n) {
      const double lp = n * lq - std::log1p(N);
      const double p = std::exp(lp);
      H -= p * lp;
      if (lp < -60.0) break;
    }
    worst = std::max(worst, std::abs(H / photonstats::mode_entropy_rate(N) - 1.0));
  }
  r.pass = lowest >= 0.0 && worst < 1e-8;
  r.measured = "min combined entropy " + fmt("%.3e", lowest) + " on a 31x41 (r, x) grid, Shannon mismatch " +
               fmt("%.2e", worst) + " (limit 1e-8)";
  return r;
}

struct DrivenRun {
  rotor::TorqueLaw law;
  std::vector<double> omega;
  double I, Omega0;
  double seconds;
};

DrivenRun driven_rotor(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const double I = 1e4, Omega0 = 1.0, c = I / 5.0;
  const auto law = rotor::power_law(c, 5.0, c, 5.0);
  // Relaxation time I/(5c) = 1; run for ten of them.
  auto ens = rotor::make_ensemble(I, 0.01, 10000, Omega0, Omega0, opt.seed);
  const auto res = rotor::simulate(std::move(ens), law, 1000, 0, opt.threads);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {law, res.final.omega, I, Omega0, secs};
}

CriterionResult c9_uncertainty(const Options& opt) {
  auto r = titled(9, "rotor uncertainty I dOmega vs sqrt(hbar I Omega0 / 5)");
  const auto run = driven_rotor(opt);
  const auto m = rotor::moments(run.omega);
  const double mc = run.I * std::sqrt(m.var);
  const double target = std::sqrt(run.I * run.Omega0 / 5.0);
  r.pass = within(mc / target, 0.05) && run.seconds < 60.0;
  r.measured = "Langevin I dOmega = " + fmt("%.3f", mc) + ", formula " + fmt("%.3f", target) + ", ratio " +
               fmt("%.4f", mc / target) + " (tolerance 5%, 1e4 trajectories, " + fmt("%.1f", run.seconds) +
               " s of 60)";
  return r;
}

CriterionResult c10_fokker_planck(const Options& opt) {
  auto r = titled(10, "Fokker-Planck stationary density vs Monte Carlo");
  const auto run = driven_rotor(opt);
  const auto density = rotor::fokker_planck_stationary(run.law, run.Omega0, run.I);
  rotor::StationaryOptions half;
  half.diffusion_scale = 0.5;
  const auto density_half = rotor::fokker_planck_stationary(run.law, run.Omega0, run.I, half);
  const double ks = rotor::ks_distance(run.omega, density);
  const double ks_half = rotor::ks_distance(run.omega, density_half);
  const double limit = 3.0 / std::sqrt(double(run.omega.size()));
  r.pass = ks < limit;
  r.measured = "KS = " + fmt("%.4f", ks) + " (limit " + fmt("%.4f", limit) +
               "); with half the diffusion coefficient KS = " + fmt("%.4f", ks_half);
  return r;
}

CriterionResult c11_twobody(const Options&) {
  auto r = titled(11, "two-body torque exponents and lossless test body");
  using namespace testbody;
  std::vector<double> d2, t2, d3, t3;
  for (int i = 0; i <= 10; ++i) {
    const double s = std::pow(10.0, i / 10.0);
    const TwoBodyConfig disks{Drude{0.5}, 0.5, Drude{0.5}, 0.5, 50.0 * s};
    d2.push_back(disks.d);
    t2.push_back(torque_on_test_2d(disks, 1.0).value);
    const TwoBodyConfig spheres{Drude{1.0}, 0.2, Drude{1.0}, 0.2, s};
    d3.push_back(spheres.d);
    t3.push_back(torque_on_test_3d(spheres, 1.0).value);
  }
  const double s2 = loglog_slope(d2, t2), s3 = loglog_slope(d3, t3);
  const double lossless = std::max(
      std::abs(torque_on_test_2d(TwoBodyConfig{Drude{0.5}, 0.5, ConstantEps{3.0, 0.0}, 0.5, 5.0}, 1.0).value),
      std::abs(torque_on_test_3d(TwoBodyConfig{Drude{1.0}, 0.2, ConstantEps{3.0, 0.0}, 0.2, 2.0}, 1.0).value));
  r.pass = std::abs(s2 / -1.0 - 1.0) < 0.02 && std::abs(s3 / -2.0 - 1.0) < 0.02 && lossless < 1e-14;
  r.measured = "2D slope " + fmt("%.4f", s2) + " on d in [50, 500], 3D slope " + fmt("%.4f", s3) +
               " on d in [1, 10], lossless torque " + fmt("%.1e", lossless);
  return r;
}

CriterionResult c12_unitarity(const Options&) {
  auto r = titled(12, "superradiance and unitarity properties");
  double unitarity = 0.0;
  for (const DielectricModel& m : {DielectricModel{ConstantEps{2.5, 0.0}}, DielectricModel{material::Vacuum{}}}) {
    for (int mm = -3; mm <= 3; ++mm) {
      for (int k = 1; k <= 60; ++k) {
        const double w = 0.0731 * k;
        const cplx S = scattering::disk_smatrix(m, 0.4, 1.0, w, mm);
        unitarity = std::max(unitarity, std::abs(std::abs(S) - 1.0));
      }
    }
  }
  int wrong_sign = 0, samples = 0;
  const DielectricModel lossy = Drude{1.0};
  for (int mm = -2; mm <= 3; ++mm) {
    for (int k = 1; k <= 80; ++k) {
      const double w = 0.0497 * k;
      const double shift = w - 1.0 * mm;
      if (std::abs(shift) < 1e-6) continue;
      const double f = scattering::disk_flux_factor(lossy, 0.5, 1.0, w, mm);
      ++samples;
      if ((f > 0.0) != (shift > 0.0)) ++wrong_sign;
      if (std::abs(mm) <= 1) {
        const double fs = 2.0 * (1.0 - scattering::sphere_smatrix_dipole(lossy, 0.2, 1.0, w, mm).real());
        ++samples;
        if ((fs > 0.0) != (shift > 0.0)) ++wrong_sign;
      }
    }
  }
  double wronskian = 0.0;
  for (int m = 0; m <= 10; ++m) {
    for (int k = 1; k <= 60; ++k) {
      const double x = 0.5 * k;
      const double J = specfun::bessel_j(m, x).real(), Y = specfun::bessel_y(m, x).real();
      const double Jp = specfun::bessel_j_derivative(m, x).real();
      const double Yp = specfun::hankel_derivative(specfun::HankelKind::First, m, x).imag();
      wronskian = std::max(wronskian, std::abs((J * Yp - Jp * Y) * pi * x / 2.0 - 1.0));
    }
  }
  r.pass = unitarity < 1e-10 && wrong_sign == 0 && wronskian < 1e-10;
  r.measured = "lossless ||S|-1| " + fmt("%.1e", unitarity) + ", flux sign mismatches " +
               std::to_string(wrong_sign) + "/" + std::to_string(samples) + ", Wronskian error " +
               fmt("%.1e", wronskian);
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const Options& opt) {
  using Fn = CriterionResult (*)(const Options&);
  static constexpr Fn table[] = {c1_sphere,    c2_cylinder_good, c3_cylinder_poor, c4_small_velocity,
                                 c5_energy,    c6_equilibrium,   c7_counting,      c8_entropy,
                                 c9_uncertainty, c10_fokker_planck, c11_twobody,   c12_unitarity};
  if (id < 1 || id > kCriterionCount) throw RangeError("no acceptance criterion " + std::to_string(id));
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.pass = false;
    r.measured = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run(const std::vector<int>& ids, const Options& opt) {
  std::vector<CriterionResult> out;
  if (ids.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) out.push_back(run_criterion(i, opt));
  } else {
    for (int i : ids) out.push_back(run_criterion(i, opt));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[16];
  std::snprintf(head, sizeof head, "%s %2d  ", r.pass ? "PASS" : "FAIL", r.id);
  return head + r.title + ": " + r.measured + fmt(" [%.2f s]", r.seconds);
}

}  // namespace spinrad::verify
