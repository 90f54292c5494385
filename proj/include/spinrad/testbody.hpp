#pragma once

// Torque and tangential force exerted by the radiation of a rotating body on
// a static test body at separation d, to first reflection.
//
// Geometry: rotation about +z, separation along x. The 2D translation
// coefficients below expand waves of the rotating body about a test body
// centred at -d x; the 3D results depend on |translation|^2 only and hold for
// either side.

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "spinrad/material.hpp"
#include "spinrad/quadrature.hpp"
#include "spinrad/scattering.hpp"

namespace spinrad::testbody {

using cplx = std::complex<double>;
using material::DielectricModel;
using scattering::FluxRule;

struct TwoBodyConfig {
  DielectricModel source;  // rotating body
  double R = 0.0;
  DielectricModel test;    // static test body
  double a = 0.0;
  double d = 0.0;

  /// DomainError unless all sizes are positive and d > R + a.
  void validate() const;
  /// d < 3 max(R, a): higher reflections are no longer negligible.
  bool close_separation() const;
};

/// H1_{n-m}(omega d).
cplx translation_2d(int n, int m, double omega, double d);

struct DipoleTranslation {
  cplx u_11E_11E;  // h1_0(omega d)
  cplx u_10M_11E;  // sqrt(2) omega d / 4 * h1_0(omega d)
};
DipoleTranslation translation_3d_dipole(double omega, double d);

/// |translation|^2 of the (1,1,E) wave: exact |h1_0|^2 or the far-field 1/(omega d)^2.
/// For l = 0 the two coincide identically.
enum class Kernel { Exact, FarField };

struct TwoBodyResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  bool close_warning = false;
};

/// Disks in 2D, m = n = 1, T = 0:
/// (1/8pi) int_0^Omega (|S_1|^2 - 1) |H1_0(omega d)|^2 (1 - |S~_1|^2).
TwoBodyResult torque_on_test_2d(const TwoBodyConfig& cfg, double Omega, const quad::Options& opt = {});

/// Large-separation form (1/4pi^2 d) int_0^Omega (|S_1|^2 - 1)(1 - |S~_1|^2) / omega.
TwoBodyResult torque_on_test_2d_asymptote(const TwoBodyConfig& cfg, double Omega,
                                          const quad::Options& opt = {});

/// Spheres in 3D, (1,1,E) channel: (1/8pi) int (|S|^2 - 1) |U|^2 (1 - |S~|^2).
TwoBodyResult torque_on_test_3d(const TwoBodyConfig& cfg, double Omega, Kernel kernel = Kernel::Exact,
                                FluxRule rule = FluxRule::LeadingOrder, const quad::Options& opt = {});

/// (8 / 9 pi d^2) int_0^Omega omega^4 |Im alpha_1(omega - Omega)| Im alpha_2(omega).
TwoBodyResult torque_on_test_3d_small(const TwoBodyConfig& cfg, double Omega, const quad::Options& opt = {});

/// (1/32 pi d) int_0^Omega (|S|^2 - 1)(1 - Re S~), positive along +y.
TwoBodyResult tangential_force_3d(const TwoBodyConfig& cfg, double Omega, FluxRule rule = FluxRule::LeadingOrder,
                                  const quad::Options& opt = {});

/// (1 / 9 pi d) int_0^Omega omega^6 |Im alpha_1(omega - Omega)| Im alpha_2(omega).
TwoBodyResult tangential_force_3d_small(const TwoBodyConfig& cfg, double Omega,
                                        const quad::Options& opt = {});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

enum class Dimension { Two, Three };

struct SweepRow {
  double d;
  double torque;
  double force;  // NaN in 2D (not available)
  bool close_warning;
};

std::vector<SweepRow> sweep(TwoBodyConfig cfg, double Omega, const std::vector<double>& ds, Dimension dim);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::string to_json(const SweepRow& row, Dimension dim, int indent = 2);

}  // namespace spinrad::testbody
