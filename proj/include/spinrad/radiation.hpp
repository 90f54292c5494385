#pragma once

// Radiated photon number, energy, angular momentum and heat of a body.
//
// Per channel the photon flux density is
//   N(omega) = [n(omega - Omega m, T_object) - n(omega, T_env)] * (1 - |S|^2)
// and the totals are sum_m int d omega / 2 pi of N weighted by 1, omega, m and
// (Omega m - omega) for the photon rate, power P, torque M and heat Q.
// Frequencies are split at omega = Omega m; the open Gauss-Kronrod rule never
// touches that point, where the two factors are individually singular.

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "spinrad/material.hpp"
#include "spinrad/quadrature.hpp"
#include "spinrad/scattering.hpp"

namespace spinrad::radiation {

using material::ThermalState;
using scattering::ChannelGroup;
using scattering::ScatteringSource;

struct MSumPolicy {
  /// Highest |m| included. Unset: 5, extended by doubling while the last
  /// shell is above tail_rel_tol.
  std::optional<int> m_max;
  double tail_rel_tol = 1e-6;
  int cap = 200;
};

struct Numerics {
  quad::Options quad{1e-10, 0.0, 2000};
  MSumPolicy msum{};
  /// Thermal integrals stop at max(Omega m, 0) + thermal_cutoff * T.
  double thermal_cutoff = 40.0;
  unsigned threads = 1;
};

/// Occupation-weighted flux of one channel; the removable singularity at
/// omega = Omega m is resolved as a two-sided limit (0 at T_object = 0).
double mode_flux(double flux_factor, double omega, int m, const ThermalState& state);

/// Same, summed over the sub-channels of a source group.
double mode_flux(const ScatteringSource& source, const ChannelGroup& g, const ThermalState& state,
                 double omega);

/// Sub-channel weight and its photon flux density N.
struct ModeSample {
  double weight;
  double N;
};

/// Maps the samples of one group at omega into `out` (dim components).
using ModeWeigher =
    std::function<void(double omega, int m, std::span<const ModeSample> samples, std::span<double> out)>;

struct GroupIntegral {
  ChannelGroup group;
  std::vector<double> value;
  std::vector<double> error;
  bool converged = true;
  bool support_clipped = false;
};

struct ModeSum {
  std::vector<double> total;
  std::vector<double> quad_error;
  std::vector<double> tail;
  std::vector<GroupIntegral> groups;  // ordered m = 0, 1, -1, 2, -2, ...
  int m_max = 0;
  bool quad_converged = true;
  bool support_clipped = false;
};

/// Generic engine behind every integral of this module (and the entropy and
/// torque-diffusion integrals elsewhere): integrates `weigher` over omega for
/// each channel group and sums over m under the truncation policy.
ModeSum integrate_modes(const ScatteringSource& source, const ThermalState& state, std::size_t dim,
                        const ModeWeigher& weigher, const Numerics& num = {});

struct ModeContribution {
  int m;
  scattering::Extra extra;
  scattering::Polarization pol;
  double N, P, M, Q;
};

struct RadiationResult {
  double N = 0.0;  // photons per unit time
  double P = 0.0;
  double M = 0.0;
  double Q = 0.0;
  double error_N = 0.0, error_P = 0.0, error_M = 0.0, error_Q = 0.0;
  double truncation_tail = 0.0;
  int m_max = 0;
  std::vector<ModeContribution> per_mode;
  bool quad_converged = true;
  bool support_clipped = false;
  double omega_R = 0.0;  // Omega R regime indicator

  double quadrature_error() const { return error_P + error_M + error_Q; }
};

/// P, M, Q (and the photon rate) in one pass over the modes. Throws
/// ConvergenceError if the m-sum tail stays above tolerance up to the cap.
RadiationResult integrate_power(const ScatteringSource& source, const ThermalState& state,
                                const Numerics& num = {});

RadiationResult integrate_power_cylinder(const material::DielectricModel& model, double R, double L,
                                         double Omega, const ThermalState& state,
                                         const Numerics& num = {});

/// Static thermal exchange with the environment (state.Omega must be 0).
RadiationResult kirchhoff_power(const ScatteringSource& source, double T_object, double T_env,
                                const Numerics& num = {});

/// Time for the deterministic spin-down Omega0 -> Omega0/10 under
/// I dOmega/dt = -M(Omega). Throws DivergenceError if the torque vanishes.
double spindown_timescale(const std::function<double(double)>& torque, double I, double Omega0);

/// Same with the torque from integrate_power at zero temperature.
double spindown_timescale(const ScatteringSource& source, double I, double Omega0,
                          const Numerics& num = {});

struct SpectralRow {
  double omega;
  int m;
  scattering::Extra extra;
  scattering::Polarization pol;
  double N;         // photon flux density per unit omega (includes 1/2pi)
  double dP_domega;
};

/// Spectral densities on a frequency grid for |m| <= m_max.
std::vector<SpectralRow> spectrum(const ScatteringSource& source, const ThermalState& state,
                                  std::span<const double> omegas, int m_max);

void write_spectrum_csv(std::ostream& os, const std::vector<SpectralRow>& rows);
std::string to_json(const RadiationResult& r, int indent = 2);

}  // namespace spinrad::radiation
