#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "spinrad/errors.hpp"
#include "spinrad/material.hpp"
#include "spinrad/units.hpp"

using namespace spinrad::material;
using spinrad::units::Quantity;
using spinrad::units::UnitSystem;

namespace {
constexpr double pi = std::numbers::pi;

Tabulated sample_table() {
  std::istringstream in(
      "# silver-like toy data\n"
      "omega,re,im\n"
      "0.1,-20,5\n"
      "0.5,-8,1.5\n"
      "1.0,-2,0.4\n"
      "2.0,0.5,0.0\n");
  return Tabulated::from_csv(in);
}

std::vector<DielectricModel> lossy_models() {
  return {Drude{0.7}, Lorentz{2.0, 1.3, 0.9, 0.05}, ConstantEps{3.0, 0.4}};
}
}  // namespace

TEST_CASE("epsilon for the analytic models") {
  CHECK(epsilon(Vacuum{}, 3.0) == cplx(1.0, 0.0));
  const double sigma = 2.5, w = 0.3;
  const cplx d = epsilon(Drude{sigma}, w);
  CHECK(d.real() == 1.0);
  CHECK(d.imag() == doctest::Approx(4.0 * pi * sigma / w).epsilon(1e-15));
  CHECK(epsilon(Drude{sigma}, -w) == std::conj(d));
  CHECK_THROWS_AS(epsilon(Drude{sigma}, 0.0), spinrad::DomainError);
  CHECK(epsilon(ConstantEps{2.0, 0.0}, 1.0) == cplx(2.0, 0.0));
}

TEST_CASE("Hermitian symmetry and causality sign on a log grid") {
  for (const auto& m : lossy_models()) {
    for (double lw = -6.0; lw <= 3.0; lw += 0.25) {
      const double w = std::pow(10.0, lw);
      const cplx e = epsilon(m, w);
      CHECK(epsilon(m, -w) == std::conj(e));
      CHECK(e.imag() > 0.0);
      CHECK(epsilon(m, -w).imag() < 0.0);
      const cplx x = susceptibility_omega2(m, w);
      CHECK(std::abs(x - (e - 1.0) * w * w) <= 1e-12 * std::abs(x) + 1e-300);
    }
  }
}

TEST_CASE("tabulated model") {
  const auto t = sample_table();
  DielectricModel m = t;
  CHECK(epsilon(m, 0.5) == cplx(-8.0, 1.5));
  // Re linear, Im geometric mean at the midpoint of a cell.
  const cplx mid = epsilon(m, 0.75);
  CHECK(mid.real() == doctest::Approx(-5.0));
  CHECK(mid.imag() == doctest::Approx(std::sqrt(1.5 * 0.4)));
  CHECK(epsilon(m, -0.75) == std::conj(mid));
  // Im falls back to linear next to a zero sample.
  CHECK(epsilon(m, 1.5).imag() == doctest::Approx(0.2));
  CHECK_THROWS_AS(epsilon(m, 3.0), spinrad::ExtrapolationError);
  CHECK_THROWS_AS(epsilon(m, 0.01), spinrad::ExtrapolationError);
  CHECK(is_lossy(m));

  std::istringstream bad("omega,re,im\n0.1,1,0\n0.3,1,0\n0.2,1,0\n");
  try {
    Tabulated::from_csv(bad);
    FAIL("expected a parse error");
  } catch (const spinrad::ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::istringstream bad_header("w,re,im\n0.1,1,0\n");
  CHECK_THROWS_AS(Tabulated::from_csv(bad_header), spinrad::ParseError);
  std::istringstream bad_number("omega,re,im\n0.1,1,0\n0.2,x,0\n");
  CHECK_THROWS_AS(Tabulated::from_csv(bad_number), spinrad::ParseError);
}

TEST_CASE("bose occupation") {
  CHECK(bose_occupation(1.0, 0.0) == 0.0);
  CHECK(bose_occupation(-1.0, 0.0) == -1.0);
  CHECK(bose_occupation(2.0, 2.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-15));
  CHECK(bose_occupation(2.0, 2.0) == doctest::Approx(0.5819767068693265).epsilon(1e-14));
  CHECK_THROWS_AS(bose_occupation(0.0, 0.0), spinrad::DomainError);
  CHECK_THROWS_AS(bose_occupation(0.0, 1.0), spinrad::DivergenceError);
  for (double T : {0.01, 1.0, 100.0}) {
    for (double w : {1e-8, 1e-3, 0.5, 3.0, 200.0}) {
      CHECK(std::abs(bose_occupation(w, T) + bose_occupation(-w, T) + 1.0) < 1e-12 * std::max(1.0, T / w));
    }
  }
}

TEST_CASE("sphere polarizability") {
  CHECK(sphere_polarizability(Vacuum{}, 2.0, 1.0) == cplx(0.0));
  CHECK(sphere_polarizability(ConstantEps{2.0, 0.0}, 2.0, 0.7) == cplx(2.0, 0.0));
  const double R = 0.3, sigma = 50.0;
  for (double w : {1e-4, 1e-3, 1e-2}) {
    const cplx a = sphere_polarizability(Drude{sigma}, R, w);
    CHECK(a.imag() == doctest::Approx(3.0 * w * R * R * R / (4.0 * pi * sigma)).epsilon(1e-3));
    CHECK(sphere_polarizability(Drude{sigma}, R, -w).imag() < 0.0);
  }
  CHECK(sphere_polarizability(Drude{sigma}, R, 0.0) == cplx(R * R * R));
  CHECK_THROWS_AS(sphere_polarizability(ConstantEps{-2.0, 0.0}, 1.0, 1.0), spinrad::DomainError);
  const DielectricModel lossless = Lorentz{1.5, 1.0, 2.0, 0.0};
  for (double w : {0.1, 0.5, 1.5, 3.0}) CHECK(sphere_polarizability(lossless, 1.0, w).imag() == 0.0);
}

TEST_CASE("thermal state validation") {
  const ThermalState ok{0.0, 0.0, 1.0}, hot{-1.0, 0.0, 1.0}, spin{0.0, 0.0, -1.0};
  CHECK_NOTHROW(ok.validate());
  CHECK_THROWS_AS(hot.validate(), spinrad::DomainError);
  CHECK_THROWS_AS(spin.validate(), spinrad::DomainError);
}

TEST_CASE("unit round trips") {
  const auto u = UnitSystem::si_length_anchor(1e-7);
  CHECK(u.time_anchor() == doctest::Approx(1e-7 / 299792458.0));
  for (auto q : {Quantity::Length, Quantity::Time, Quantity::AngularVelocity, Quantity::Temperature,
                 Quantity::Energy, Quantity::Power, Quantity::Torque, Quantity::AngularMomentum,
                 Quantity::MomentOfInertia, Quantity::Rate, Quantity::Conductivity,
                 Quantity::ConductivitySI}) {
    for (double v : {1e-30, 3.7, 1e25}) {
      CHECK(std::abs(u.to_si(q, u.to_natural(q, v)) / v - 1.0) < 1e-12);
    }
  }
  // One natural length is the anchor; hbar/t0 of energy per t0 of time is power.
  CHECK(u.to_natural(Quantity::Length, 1e-7) == doctest::Approx(1.0));
  CHECK(u.scale(Quantity::Power) == doctest::Approx(u.scale(Quantity::Energy) / u.scale(Quantity::Time)));
  // Copper-like 6e7 S/m is about 5.4e17 1/s in Gaussian units.
  const double sg = UnitSystem::si_time_anchor(1.0).to_natural(Quantity::ConductivitySI, 6e7);
  CHECK(sg == doctest::Approx(6e7 / (4.0 * pi * 8.8541878128e-12)));
  const auto n = UnitSystem::natural();
  CHECK(n.to_natural(Quantity::Power, 2.5) == 2.5);
}
