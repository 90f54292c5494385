#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "spinrad/errors.hpp"
#include "spinrad/specfun.hpp"
#include "spinrad/testbody.hpp"

using namespace spinrad::testbody;
using spinrad::material::ConstantEps;
using spinrad::material::Drude;

namespace {
constexpr double pi = std::numbers::pi;

TwoBodyConfig drude_pair(double d, double s1 = 1e3, double s2 = 1e3, double R = 0.1, double a = 0.1) {
  return TwoBodyConfig{Drude{s1}, R, Drude{s2}, a, d};
}
}  // namespace

TEST_CASE("2D translation coefficients") {
  using spinrad::specfun::bessel_j;
  using spinrad::specfun::hankel;
  using spinrad::specfun::HankelKind;
  CHECK(translation_2d(3, 3, 1.2, 4.0) == hankel(HankelKind::First, 0, 1.2 * 4.0));
  const double w = 1.3, d = 3.0;
  for (int m : {0, 1, 2}) {
    for (double r2 : {0.3, 0.8, 1.4}) {
      for (double ph : {0.0, 0.7, 2.5, -1.9}) {
        // Test body centred at (-d, 0).
        const double x = -d + r2 * std::cos(ph), y = r2 * std::sin(ph);
        const double r1 = std::hypot(x, y), ph1 = std::atan2(y, x);
        const cplx lhs = hankel(HankelKind::First, m, w * r1) * std::polar(1.0, m * ph1);
        cplx rhs = 0.0;
        for (int n = -40; n <= 40; ++n) {
          rhs += translation_2d(n, m, w, d) * bessel_j(n, w * r2) * std::polar(1.0, n * ph);
        }
        CHECK(std::abs(lhs - rhs) < 1e-6 * std::abs(lhs));
      }
    }
  }
  for (double dd : {1e2, 1e3, 1e4}) {
    CHECK(std::abs(translation_2d(2, 1, 1.0, dd)) == doctest::Approx(std::sqrt(2.0 / (pi * dd))).epsilon(2.0 / dd));
  }
  const auto t = translation_3d_dipole(2.0, 5.0);
  CHECK(std::norm(t.u_11E_11E) == doctest::Approx(1.0 / 100.0).epsilon(1e-12));
  CHECK(std::abs(t.u_10M_11E - std::sqrt(2.0) * 10.0 / 4.0 * t.u_11E_11E) < 1e-15);
}

TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(drude_pair(0.15).validate(), spinrad::DomainError);
  CHECK(drude_pair(0.25).close_separation());
  CHECK_FALSE(drude_pair(0.35).close_separation());
  const auto r = torque_on_test_3d(drude_pair(0.25), 1.0);
  CHECK(r.close_warning);
}

TEST_CASE("2D torque on a test disk") {
  const TwoBodyConfig cfg{Drude{0.5}, 0.5, Drude{0.5}, 0.5, 5.0};
  const auto t = torque_on_test_2d(cfg, 1.0);
  CHECK(t.value > 0.0);
  CHECK(torque_on_test_2d(cfg, 0.0).value == 0.0);
  TwoBodyConfig clear = cfg;
  clear.test = ConstantEps{3.0, 0.0};
  CHECK(std::abs(torque_on_test_2d(clear, 1.0).value) < 1e-14);
  CHECK(std::abs(torque_on_test_2d_asymptote(clear, 1.0).value) < 1e-14);
  // Omega d = 50: the asymptotic 1/d form holds to 10%.
  TwoBodyConfig far = cfg;
  far.d = 50.0;
  const double full = torque_on_test_2d(far, 1.0).value;
  const double asym = torque_on_test_2d_asymptote(far, 1.0).value;
  CHECK(std::abs(full / asym - 1.0) < 0.1);
  std::vector<double> ds, ts;
  for (int i = 0; i <= 10; ++i) {
    far.d = 50.0 * std::pow(10.0, i / 10.0);
    ds.push_back(far.d);
    ts.push_back(torque_on_test_2d(far, 1.0).value);
  }
  CHECK(loglog_slope(ds, ts) == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("3D torque: small Drude pair closed form") {
  const double s1 = 1e3, s2 = 2e3, R = 0.1, a = 0.05, d = 4.0, W = 1.0;
  const auto cfg = drude_pair(d, s1, s2, R, a);
  const double c1 = 3.0 * R * R * R / (4.0 * pi * s1), c2 = 3.0 * a * a * a / (4.0 * pi * s2);
  const double closed = 8.0 / (9.0 * pi * d * d) * c1 * c2 * std::pow(W, 7) / 42.0;
  const auto small = torque_on_test_3d_small(cfg, W);
  CHECK(small.value == doctest::Approx(closed).epsilon(2e-3));
  // The channel form with first-order fluxes is the same integral.
  CHECK(torque_on_test_3d(cfg, W).value == doctest::Approx(small.value).epsilon(1e-9));
  CHECK(torque_on_test_3d(cfg, W, Kernel::FarField).value ==
        doctest::Approx(torque_on_test_3d(cfg, W, Kernel::Exact).value).epsilon(1e-12));
  CHECK(torque_on_test_3d(cfg, W, Kernel::Exact, FluxRule::Exact).value ==
        doctest::Approx(small.value).epsilon(1e-3));
  CHECK(torque_on_test_3d(drude_pair(2 * d, s1, s2, R, a), W).value ==
        doctest::Approx(small.value / 4.0).epsilon(1e-12));
}

TEST_CASE("3D tangential force") {
  const double s1 = 1e3, s2 = 1e3, R = 0.1, a = 0.1, d = 3.0, W = 1.0;
  const auto cfg = drude_pair(d, s1, s2, R, a);
  const double c1 = 3.0 * R * R * R / (4.0 * pi * s1), c2 = 3.0 * a * a * a / (4.0 * pi * s2);
  const double beta_8_2 = std::tgamma(8.0) * std::tgamma(2.0) / std::tgamma(10.0);
  const double closed = c1 * c2 * std::pow(W, 9) * beta_8_2 / (9.0 * pi * d);
  const auto small = tangential_force_3d_small(cfg, W);
  CHECK(small.value == doctest::Approx(closed).epsilon(2e-3));
  CHECK(tangential_force_3d(cfg, W).value == doctest::Approx(small.value).epsilon(1e-9));
  CHECK(tangential_force_3d(drude_pair(2 * d), W).value == doctest::Approx(small.value / 2.0).epsilon(1e-12));
  TwoBodyConfig clear = cfg;
  clear.test = ConstantEps{1.0, 0.0};
  CHECK(tangential_force_3d(clear, W).value == 0.0);
}

TEST_CASE("transferred torque and force are non-negative and need loss in both bodies") {
  for (double s : {0.1, 1.0, 10.0}) {
    for (double d : {1.0, 3.0, 10.0}) {
      const auto cfg = drude_pair(d, s, s, 0.2, 0.2);
      CHECK(torque_on_test_3d(cfg, 1.0).value >= 0.0);
      CHECK(tangential_force_3d(cfg, 1.0).value >= 0.0);
      const TwoBodyConfig disks{Drude{s}, 0.2, Drude{s}, 0.2, d};
      CHECK(torque_on_test_2d(disks, 1.0).value >= 0.0);
    }
  }
  const TwoBodyConfig clear_source{ConstantEps{2.0, 0.0}, 0.2, Drude{1.0}, 0.2, 3.0};
  CHECK(std::abs(torque_on_test_3d(clear_source, 1.0).value) < 1e-14);
  CHECK(std::abs(torque_on_test_2d(clear_source, 1.0).value) < 1e-14);
}

TEST_CASE("3D separation exponent") {
  std::vector<double> ds, ts;
  for (int i = 0; i <= 10; ++i) {
    ds.push_back(std::pow(10.0, i / 10.0));
    ts.push_back(torque_on_test_3d(drude_pair(ds.back(), 1.0, 1.0, 0.2, 0.2), 1.0).value);
  }
  CHECK(loglog_slope(ds, ts) == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("sweep output") {
  const auto rows = sweep(drude_pair(1.0), 1.0, {1.0, 2.0}, Dimension::Three);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].torque == doctest::Approx(rows[0].torque / 4.0));
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str().rfind("d,M_transfer,F_y,close_separation\n", 0) == 0);
  const auto rows2 = sweep(TwoBodyConfig{Drude{1.0}, 0.2, Drude{1.0}, 0.2, 1.0}, 1.0, {1.0}, Dimension::Two);
  CHECK(to_json(rows2[0], Dimension::Two).find("\"F_y\": null") != std::string::npos);
}
