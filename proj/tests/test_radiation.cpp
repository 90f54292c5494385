#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "spinrad/errors.hpp"
#include "spinrad/radiation.hpp"

using namespace spinrad::radiation;
using spinrad::material::ConstantEps;
using spinrad::material::DielectricModel;
using spinrad::material::Drude;
using spinrad::material::Lorentz;
using spinrad::scattering::CylinderBody;
using spinrad::scattering::DiskBody;
using spinrad::scattering::SphereBody;

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

// Composite Simpson rule, used as a slow but transparent reference.
template <class F>
double simpson(F f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Im of R^3 (eps - 1)/(eps + 2) for a Drude metal, straight from eps.
double drude_im_alpha(double sigma, double R, double w) {
  if (w == 0.0) return 0.0;
  const cd eps = 1.0 + cd(0.0, 4.0 * pi * sigma / w);
  return std::imag(R * R * R * (eps - 1.0) / (eps + 2.0));
}

}  // namespace

TEST_CASE("sphere at zero temperature: closed forms for a good conductor") {
  const double R = 0.1, sigma = 1e3, Omega = 1.0;
  const SphereBody body(Drude{sigma}, R);
  const auto r = integrate_power(body, ThermalState{0.0, 0.0, Omega});
  const double P0 = std::pow(R, 3) * std::pow(Omega, 6) / (30.0 * pi * pi * sigma);
  const double M0 = std::pow(R, 3) * std::pow(Omega, 5) / (20.0 * pi * pi * sigma);
  CHECK(r.P == doctest::Approx(P0).epsilon(1e-3));
  CHECK(r.M == doctest::Approx(M0).epsilon(1e-3));
  CHECK(r.m_max == 1);

  // Reference integral of the dipole flux, m = 1 only, Bose factor -1.
  auto n_density = [&](double w) {
    return -(8.0 * w * w * w / 3.0) * drude_im_alpha(sigma, R, w - Omega) / (2.0 * pi);
  };
  const double N_ref = simpson(n_density, 0.0, Omega);
  const double P_ref = simpson([&](double w) { return w * n_density(w); }, 0.0, Omega);
  CHECK(r.N == doctest::Approx(N_ref).epsilon(1e-8));
  CHECK(r.P == doctest::Approx(P_ref).epsilon(1e-8));
  CHECK(r.M == doctest::Approx(N_ref).epsilon(1e-8));
}

TEST_CASE("cylinder at zero temperature: good-conductor closed forms") {
  const double R = 0.05, L = 2.0, sigma = 1e4, Omega = 1.0;
  const auto r = integrate_power_cylinder(Drude{sigma}, R, L, Omega, ThermalState{});
  const double P0 = L * R * R * std::pow(Omega, 6) / (90.0 * pi * pi * sigma);
  const double M0 = L * R * R * std::pow(Omega, 5) / (60.0 * pi * pi * sigma);
  CHECK(r.P == doctest::Approx(P0).epsilon(1e-3));
  CHECK(r.M == doctest::Approx(M0).epsilon(1e-3));
}

TEST_CASE("cylinder: general sigma against the direct omega integral") {
  const double R = 0.05, L = 1.0, Omega = 1.0;
  for (double sigma : {1e-3, 0.1, 10.0}) {
    const auto r = integrate_power_cylinder(Drude{sigma}, R, L, Omega, ThermalState{});
    auto im_beta = [&](double w) {
      const double wp = w - Omega;
      if (wp == 0.0) return 0.0;
      const cd eps = 1.0 + cd(0.0, 4.0 * pi * sigma / wp);
      return std::imag((eps - 1.0) / (eps + 1.0));
    };
    const double P_ref =
        simpson([&](double w) { return std::pow(w, 4) * std::abs(im_beta(w)); }, 0.0, Omega, 20000) *
        2.0 * L * R * R / (3.0 * pi);
    CHECK(r.P == doctest::Approx(P_ref).epsilon(1e-6));
  }
}

TEST_CASE("energy balance Q = Omega M - P") {
  const DielectricModel d = Drude{0.7};
  const SphereBody sphere(d, 0.2);
  const DiskBody disk(d, 0.3);
  const CylinderBody cyl(d, 0.1, 1.5);
  for (const ThermalState& s : {ThermalState{0.0, 0.0, 1.0}, ThermalState{0.3, 0.0, 1.0},
                                ThermalState{0.2, 0.5, 0.8}}) {
    for (const ScatteringSource* src :
         {static_cast<const ScatteringSource*>(&sphere), static_cast<const ScatteringSource*>(&disk),
          static_cast<const ScatteringSource*>(&cyl)}) {
      const auto r = integrate_power(*src, s);
      const double scale = std::abs(s.Omega * r.M) + std::abs(r.P);
      CHECK(std::abs(r.Q - (s.Omega * r.M - r.P)) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("equilibrium: no net flux at Omega = 0 and equal temperatures") {
  const DielectricModel d = Lorentz{1.5, 1.0, 0.8, 0.1};
  for (double T : {0.0, 0.1, 1.0}) {
    const auto r = integrate_power(DiskBody(d, 0.4), ThermalState{T, T, 0.0});
    CHECK(r.P == 0.0);
    CHECK(r.M == 0.0);
    const auto s = integrate_power(SphereBody(d, 0.4), ThermalState{T, T, 0.0});
    CHECK(s.P == 0.0);
  }
}

TEST_CASE("zero-temperature rotating bodies lose energy and angular momentum") {
  for (double sigma : {0.05, 1.0, 20.0}) {
    for (double R : {0.1, 0.5}) {
      const auto r = integrate_power(DiskBody(Drude{sigma}, R), ThermalState{0.0, 0.0, 1.0});
      CHECK(r.P > 0.0);
      CHECK(r.M > 0.0);
      CHECK(r.P <= r.M);  // every photon has omega < Omega m
      CHECK(r.Q >= 0.0);
    }
  }
}

TEST_CASE("lossless bodies do not radiate") {
  const auto r = integrate_power(DiskBody(ConstantEps{3.0, 0.0}, 0.5), ThermalState{0.0, 0.0, 1.0});
  CHECK(std::abs(r.P) < 1e-14);
  CHECK(std::abs(r.M) < 1e-14);
}

TEST_CASE("Kirchhoff: static hot sphere against the direct integral") {
  const double sigma = 0.5, R = 0.2, T = 0.3;
  const SphereBody body(Drude{sigma}, R);
  const auto r = kirchhoff_power(body, T, 0.0);
  auto integrand = [&](double w) {
    if (w == 0.0) return 0.0;
    return 3.0 * w * (8.0 * w * w * w / 3.0) * drude_im_alpha(sigma, R, w) / std::expm1(w / T) /
           (2.0 * pi);
  };
  const double ref = simpson(integrand, 0.0, 40.0 * T, 40000);
  CHECK(r.P == doctest::Approx(ref).epsilon(1e-7));
  CHECK(std::abs(r.M) < 1e-12 * r.P);
  // Heat flows from hot to cold.
  CHECK(kirchhoff_power(body, 0.0, T).P < 0.0);
  CHECK_THROWS_AS(kirchhoff_power(body, -1.0, 0.0), spinrad::DomainError);
}

TEST_CASE("finite temperature: m = -1 channels absorb and radiate") {
  const auto r = integrate_power(SphereBody(Drude{1.0}, 0.3), ThermalState{0.5, 0.0, 0.2});
  CHECK(r.per_mode.size() == 3);
  CHECK(r.per_mode[0].m == 0);
  CHECK(r.per_mode[1].m == 1);
  CHECK(r.per_mode[2].m == -1);
  for (const auto& c : r.per_mode) CHECK(c.P > 0.0);
  CHECK(r.per_mode[1].M > 0.0);
  CHECK(r.per_mode[2].M < 0.0);
  CHECK(r.M > 0.0);
}

TEST_CASE("disk partial-wave sum converges and reports its truncation") {
  const DiskBody disk(Drude{0.5}, 0.6);
  const auto r = integrate_power(disk, ThermalState{0.0, 0.0, 1.0});
  CHECK(r.m_max >= 5);
  CHECK(r.truncation_tail <= 1e-6 * r.P);
  double P = 0.0;
  for (const auto& c : r.per_mode) {
    CHECK(c.m >= 1);
    P += c.P;
  }
  CHECK(P == doctest::Approx(r.P).epsilon(1e-14));

  Numerics tight;
  tight.msum.m_max = 1;
  CHECK_THROWS_AS(integrate_power(DiskBody(Drude{0.5}, 2.0), ThermalState{0.0, 0.0, 1.0}, tight),
                  spinrad::ConvergenceError);
}

TEST_CASE("threaded integration is bitwise reproducible") {
  const DiskBody disk(Drude{0.5}, 0.6);
  Numerics one, four;
  four.threads = 4;
  const ThermalState s{0.2, 0.1, 1.0};
  const auto a = integrate_power(disk, s, one);
  const auto b = integrate_power(disk, s, four);
  CHECK(a.P == b.P);
  CHECK(a.M == b.M);
  CHECK(a.N == b.N);
}

TEST_CASE("spectrum is consistent with the integrated power") {
  const SphereBody body(Drude{2.0}, 0.2);
  std::vector<double> omegas;
  for (int i = 1; i < 400; ++i) omegas.push_back(i / 400.0);
  const auto rows = spectrum(body, ThermalState{0.0, 0.0, 1.0}, omegas, 1);
  double P = 0.0;
  for (const auto& row : rows) P += row.dP_domega / 400.0;
  const auto r = integrate_power(body, ThermalState{0.0, 0.0, 1.0});
  CHECK(P == doctest::Approx(r.P).epsilon(1e-2));
  std::ostringstream os;
  write_spectrum_csv(os, rows);
  CHECK(os.str().rfind("omega,m,extra,pol,N,dP_domega\n", 0) == 0);
}

TEST_CASE("spin-down time") {
  const double I = 3.0, c5 = 0.01, W0 = 2.0;
  const double tau = spindown_timescale([&](double w) { return c5 * std::pow(w, 5); }, I, W0);
  const double ref = I / (4.0 * c5) * (std::pow(W0 / 10.0, -4) - std::pow(W0, -4));
  CHECK(tau == doctest::Approx(ref).epsilon(1e-9));
  CHECK_THROWS_AS(spindown_timescale([](double) { return 0.0; }, I, W0), spinrad::DivergenceError);

  const double R = 0.1, sigma = 1e3;
  const double tau_s = spindown_timescale(SphereBody(Drude{sigma}, R), 1e6, 1.0);
  const double c = std::pow(R, 3) / (20.0 * pi * pi * sigma);
  CHECK(tau_s == doctest::Approx(1e6 / (4.0 * c) * (1e4 - 1.0)).epsilon(2e-3));
}

TEST_CASE("JSON summary") {
  const auto r = integrate_power(SphereBody(Drude{2.0}, 0.2), ThermalState{0.0, 0.0, 1.0});
  const std::string j = to_json(r);
  CHECK(j.find("\"perMode\"") != std::string::npos);
  CHECK(j.find("\"P\"") != std::string::npos);
}
