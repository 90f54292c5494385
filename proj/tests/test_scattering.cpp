#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "spinrad/errors.hpp"
#include "spinrad/scattering.hpp"

using namespace spinrad::scattering;
using spinrad::material::ConstantEps;
using spinrad::material::DielectricModel;
using spinrad::material::Drude;
using spinrad::material::Lorentz;
using spinrad::material::Vacuum;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("disk interior frequency") {
  CHECK(disk_interior_frequency(Vacuum{}, 0.0, 0.7, 2) == cplx(0.7));
  const cplx w = disk_interior_frequency(ConstantEps{4.0, 0.0}, 0.0, 0.7, 1);
  CHECK(std::abs(w - cplx(1.4)) < 1e-15);
  // Superradiant side: Im omega~ follows sgn(omega - Omega m).
  const DielectricModel d = Drude{3.0};
  CHECK(disk_interior_frequency(d, 1.0, 0.4, 1).imag() < 0.0);
  CHECK(disk_interior_frequency(d, 1.0, 1.4, 1).imag() > 0.0);
  CHECK(disk_interior_frequency(d, 1.0, 0.4, -1).imag() > 0.0);
}

TEST_CASE("disk S-matrix: unitarity, absorption and superradiance") {
  const double R = 0.8;
  for (const DielectricModel& m : {DielectricModel{ConstantEps{3.0, 0.0}},
                                   DielectricModel{Lorentz{1.5, 1.0, 2.13, 0.0}}}) {
    for (double w : {0.05, 0.5, 1.3, 4.0}) {
      for (int n = -3; n <= 3; ++n) {
        CHECK(std::abs(std::abs(disk_smatrix(m, R, 0.7, w, n)) - 1.0) < 1e-10);
        CHECK(std::abs(disk_flux_factor(m, R, 0.7, w, n)) < 1e-10);
      }
    }
  }
  const DielectricModel d = Drude{0.5};
  for (double w : {0.1, 1.0, 3.0}) CHECK(std::abs(disk_smatrix(d, R, 0.0, w, 1)) < 1.0);
  CHECK(std::abs(disk_smatrix(d, R, 2.0, 1.0, 1)) > 1.0);
  // The closed form 1 - |S|^2 and the amplitude agree.
  for (double w : {0.3, 1.5, 2.5}) {
    for (int n : {-2, 0, 1, 2}) {
      const cplx S = disk_smatrix(d, R, 1.0, w, n);
      CHECK(disk_flux_factor(d, R, 1.0, w, n) == doctest::Approx(1.0 - std::norm(S)).epsilon(1e-9));
    }
  }
}

TEST_CASE("disk superradiance window on a grid") {
  const double R = 0.5, Omega = 1.0;
  for (const DielectricModel& model : {DielectricModel{Drude{0.3}}, DielectricModel{Drude{30.0}},
                                       DielectricModel{Lorentz{2.0, 1.0, 0.5, 0.2}}}) {
    for (int m = 1; m <= 3; ++m) {
      for (int k = 1; k < 40; ++k) {
        const double w = 0.1 * k * Omega;
        if (std::abs(w - Omega * m) < 1e-6 * Omega) continue;
        const double f = disk_flux_factor(model, R, Omega, w, m);
        CAPTURE(m);
        CAPTURE(w);
        CHECK((f < 0.0) == (w < Omega * m));
      }
    }
  }
}

TEST_CASE("static disk reciprocity") {
  const DielectricModel d = Drude{0.9};
  for (double w : {0.2, 1.1}) {
    for (int m = 1; m <= 4; ++m) {
      CHECK(std::abs(disk_smatrix(d, 1.0, 0.0, w, m) - disk_smatrix(d, 1.0, 0.0, w, -m)) < 1e-12);
    }
  }
}

TEST_CASE("small-velocity disk limit") {
  const DielectricModel d = Drude{1.0};
  CHECK(disk_smatrix_smallvel(d, 0.01, 1.0, 1.0).value == 0.0);
  CHECK(disk_smatrix_smallvel(d, 0.01, 1.0, 0.5).value > 0.0);
  CHECK(disk_smatrix_smallvel(d, 0.01, 1.0, 1.5).value < 0.0);
  CHECK_FALSE(disk_smatrix_smallvel(d, 0.01, 1.0, 0.5).warning);
  CHECK(disk_smatrix_smallvel(d, 1.0, 1.0, 0.5).warning);
  // At Omega R = 0.01 the exact amplitude agrees with the limit.
  for (double sigma : {0.1, 1.0, 10.0}) {
    const DielectricModel m = Drude{sigma};
    for (int k = 1; k < 20; ++k) {
      const double w = 0.05 * k;
      const double exact = -disk_flux_factor(m, 0.01, 1.0, w, 1);
      const double approx = disk_smatrix_smallvel(m, 0.01, 1.0, w).value;
      CHECK(std::abs(approx / exact - 1.0) < 1e-3);
    }
  }
}

TEST_CASE("small-velocity threshold") {
  // The limit needs both the outside and the inside wavelength to be long
  // compared with R. Below the 0.3 guard on max(omega, |omega~|) R the two
  // forms agree to a couple of percent; well past it they part ways.
  double worst_inside = 0.0, worst_outside = 0.0;
  for (double sigma : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const DielectricModel m = Drude{sigma};
    for (double R : {0.001, 0.01, 0.03, 0.1, 0.3, 1.0}) {
      for (double w : {0.1, 0.5, 0.9}) {
        const double exact = -disk_flux_factor(m, R, 1.0, w, 1);
        const auto approx = disk_smatrix_smallvel(m, R, 1.0, w);
        const double err = std::abs(approx.value / exact - 1.0);
        const double size = std::max(w, std::abs(disk_interior_frequency(m, 1.0, w, 1))) * R;
        CHECK(approx.warning == (size >= kSmallVelocityLimit));
        if (!approx.warning) worst_inside = std::max(worst_inside, err);
        if (size > 2.0) worst_outside = std::max(worst_outside, err);
      }
    }
  }
  CHECK(worst_inside < 0.02);
  CHECK(worst_outside > 0.5);
}

TEST_CASE("sphere dipole channel") {
  CHECK(sphere_smatrix_dipole(Vacuum{}, 1.0, 1.0, 0.5, 1) == cplx(1.0));
  CHECK_THROWS_AS(sphere_smatrix_dipole(Vacuum{}, 1.0, 1.0, 0.5, 2), spinrad::DomainError);
  const double R = 0.1, sigma = 5.0, Omega = 1.0;
  const DielectricModel d = Drude{sigma};
  SphereBody body(d, R);
  std::vector<SubChannel> out;
  for (double w : {0.2, 0.6, 0.9}) {
    body.sample(body.groups(1)[0], w, Omega, out);
    const auto alpha = spinrad::material::sphere_polarizability(d, R, w - Omega);
    CHECK(-out[0].flux == doctest::Approx(8.0 * w * w * w / 3.0 * std::abs(alpha.imag())).epsilon(1e-12));
    CHECK(out[0].flux < 0.0);
    const cplx S = sphere_smatrix_dipole(d, R, Omega, w, 1);
    ChannelAmplitude ch{{w, 1, Ell{1}, Polarization::E}, S, std::nullopt, FluxRule::LeadingOrder};
    CHECK(flux_factor(ch) == doctest::Approx(out[0].flux).epsilon(1e-6));
  }
  SphereBody lossless(ConstantEps{5.0, 0.0}, R);
  lossless.sample(lossless.groups(1)[0], 0.5, Omega, out);
  CHECK(out[0].flux == 0.0);
}

TEST_CASE("cylinder block") {
  const auto v = cylinder_smatrix_block(Vacuum{}, 0.1, 1.0, 0.5, 0.2);
  CHECK(v.mm == cplx(1.0));
  CHECK(v.ee == cplx(1.0));
  CHECK(v.me == cplx(0.0));
  const DielectricModel d = Drude{2.0};
  const auto b0 = cylinder_smatrix_block(d, 0.1, 1.0, 0.5, 0.0);
  CHECK(b0.ee == cplx(1.0));
  CHECK(b0.me == cplx(0.0));
  const auto b = cylinder_smatrix_block(d, 0.1, 1.0, 0.5, 0.3);
  CHECK(b.me == b.em);
  CHECK_THROWS_AS(cylinder_smatrix_block(d, 0.1, 1.0, 0.5, 0.6), spinrad::DomainError);
  CHECK_THROWS_AS(cylinder_smatrix_block(ConstantEps{-1.0, 0.0}, 0.1, 0.0, 0.5, 0.1),
                  spinrad::DomainError);
  // Lossless block is unitary to the order kept.
  const auto bl = cylinder_smatrix_block(ConstantEps{3.0, 0.0}, 0.1, 1.0, 0.5, 0.3);
  const auto rows = block_row_fluxes(bl, FluxRule::LeadingOrder);
  CHECK(rows[0] == 0.0);
  CHECK(rows[1] == 0.0);
}

TEST_CASE("cylinder flux integrated over kz") {
  // sum over rows of (|S|^2 - delta) integrated over kz in [-w, w] at leading
  // order: -pi R^2 Im beta (2 w^3 + 2 w^3 / 3) = -(8/3) pi R^2 Im beta w^3.
  const double R = 0.05, L = 3.0, Omega = 1.0, w = 0.6;
  const DielectricModel d = Drude{0.4};
  CylinderBody body(d, R, L);
  const auto beta = spinrad::material::eps_ratio(d, w - Omega, 1.0);
  std::vector<SubChannel> out;
  double total = 0.0;
  for (const auto& g : body.groups(1)) {
    body.sample(g, w, Omega, out);
    for (const auto& s : out) total += s.weight * s.flux;
  }
  const double want = L / (2.0 * pi) * (8.0 / 3.0) * pi * R * R * beta.imag() * w * w * w;
  CHECK(total == doctest::Approx(want).epsilon(1e-13));
  // The exact rows differ only at O(R^4).
  CylinderBody exact(d, R, L, FluxRule::Exact);
  double total_exact = 0.0;
  for (const auto& g : exact.groups(1)) {
    exact.sample(g, w, Omega, out);
    for (const auto& s : out) total_exact += s.weight * s.flux;
  }
  CHECK(std::abs(total_exact / total - 1.0) < 10.0 * R * R);
}

TEST_CASE("flux factor arithmetic") {
  ChannelAmplitude ch;
  ch.S = 1.0;
  CHECK(flux_factor(ch) == 0.0);
  ch.S = std::sqrt(1.5);
  CHECK(flux_factor(ch) == doctest::Approx(-0.5));
}

TEST_CASE("channel table parsing") {
  std::istringstream in(
      "omega,m,extra,pol,ReS,ImS\n"
      "0.1,1,,scalar,1.1,0\n"
      "0.5,1,,scalar,1.05,0\n"
      "0.2,2,0.1,E,0.9,0\n"
      "0.4,2,0.1,E,0.8,0.1\n");
  const auto t = ChannelTable::from_csv(in);
  CHECK(t.channels().size() == 2);
  CHECK(t.max_order() == 2);
  CHECK(t.lossy());
  CHECK(std::abs(t.amplitude(0, 0.3) - cplx(1.075, 0.0)) < 1e-15);
  CHECK(t.amplitude(0, 0.9) == cplx(1.0));
  const auto g = t.groups(2);
  REQUIRE(g.size() == 1);
  CHECK(std::get<Kz>(g[0].extra).value == 0.1);
  CHECK(t.support(g[0]) == std::pair<double, double>{0.2, 0.4});

  auto expect_line = [](const std::string& text, int line) {
    std::istringstream s(text);
    try {
      ChannelTable::from_csv(s);
      FAIL("expected parse error");
    } catch (const spinrad::ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_line("omega,m,extra,pol,ReS,ImS\n0.5,1,0.7,E,1,0\n", 2);
  expect_line("omega,m,extra,pol,ReS,ImS\n0.5,1,,E,1,0\n0.4,1,,E,1,0\n", 3);
  expect_line("omega,m,extra,pol,ReS,ImS\n0.5,1,,Q,1,0\n", 2);
  expect_line("omega,m,extra,pol,ReS\n", 1);
  expect_line("# extra=l\nomega,m,extra,pol,ReS,ImS\n0.5,2,1,E,1,0\n", 3);

  std::istringstream with_l("# extra=l\nomega,m,extra,pol,ReS,ImS\n0.5,1,1,E,1,0\n0.6,1,1,E,1,0\n");
  const auto tl = ChannelTable::from_csv(with_l);
  CHECK(std::get<Ell>(tl.channels()[0].extra).value == 1);
}
