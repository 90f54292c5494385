#pragma once

// Stochastic spin-down of a radiating rotor.
//
//   I dOmega = -hbar (Mbar(Omega) - Mbar_drive) dt + hbar sqrt(Mbar2(Omega)) dW
//
// with Mbar the mean radiated angular momentum per unit time (units of hbar)
// and Mbar2 its variance rate (units of hbar^2). Ito convention; the
// free-decay walk reflects at Omega = 0.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spinrad/radiation.hpp"

namespace spinrad::rotor {

struct TorqueLaw {
  std::function<double(double)> drift;      // Mbar(Omega)
  std::function<double(double)> diffusion;  // Mbar2(Omega)
  std::string provenance;

  /// dMbar/dOmega by a Richardson-extrapolated centered difference.
  double drift_slope(double Omega) const;
};

/// Mbar = c Omega^k, Mbar2 = c2 Omega^k2.
TorqueLaw power_law(double c, double k, double c2, double k2);

struct TorqueGridOptions {
  double omega_min = 1e-3;
  double omega_max = 10.0;
  int initial_points = 17;
  double rel_tol = 1e-6;
  int max_points = 4097;
};

/// Mbar and Mbar2 of a body at fixed temperatures, evaluated through the mode
/// integrals on a logarithmic grid over [omega_min, omega_max]. The grid is
/// doubled until log-log interpolation at the midpoints reproduces direct
/// evaluation to rel_tol; outside the grid the end segments are continued as
/// power laws.
TorqueLaw torque_law_from_radiation(const scattering::ScatteringSource& source, double T_object,
                                    const TorqueGridOptions& grid = {},
                                    const radiation::Numerics& num = {});

/// Mbar and Mbar2 evaluated directly at one rotation rate.
std::pair<double, double> torque_moments(const scattering::ScatteringSource& source,
                                         const material::ThermalState& state,
                                         const radiation::Numerics& num = {});

// ---------------------------------------------------------------- RNG

/// Standard normal number determined by (seed, trajectory, counter) alone.
double counter_normal(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t counter);

// ---------------------------------------------------------------- Langevin

struct Ensemble {
  double I = 1.0;
  double hbar = 1.0;
  double dt = 1e-3;
  /// Constant external torque hbar * Mbar(Omega_drive) holding the set-point.
  std::optional<double> drive_omega;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  double t = 0.0;
  std::vector<double> omega;
};

Ensemble make_ensemble(double I, double dt, std::size_t n_traj, double omega_init,
                       std::optional<double> drive_omega = std::nullopt, std::uint64_t seed = 0,
                       double hbar = 1.0);

/// One Euler-Maruyama step for every trajectory. Throws StepSizeError when
/// dt (hbar/I) dMbar/dOmega >= 0.1 at the largest current Omega.
void langevin_step(Ensemble& ens, const TorqueLaw& law);

struct TrajectorySample {
  double t;
  std::size_t traj;
  double omega;
};

struct SimulationResult {
  Ensemble final;
  std::vector<TrajectorySample> samples;  // every record_every steps
  double max_adiabaticity = 0.0;          // max |dOmega/dt| / Omega^2 seen
  bool adiabatic_warning = false;         // max_adiabaticity > 0.1
};

/// Runs n_steps steps; trajectories are independent and may be spread over
/// threads without changing the result.
SimulationResult simulate(Ensemble ens, const TorqueLaw& law, std::uint64_t n_steps,
                          std::uint64_t record_every = 0, unsigned threads = 1);

// ---------------------------------------------------------------- stationary state

struct StationaryDensity {
  std::vector<double> omega;
  std::vector<double> pdf;
  std::vector<double> cdf;

  double mean() const;
  double variance() const;
  double cdf_at(double w) const;
};

struct StationaryOptions {
  /// Coefficient of the diffusion term. 1 is the zero-flux solution
  /// P = C / Mbar2 * exp[-(I/hbar) int (Mbar - Mbar(Omega0)) / Mbar2]; 1/2
  /// is the density reached by the Langevin equation above.
  double diffusion_scale = 1.0;
  double hbar = 1.0;
  int points_per_width = 60;
  double log_cutoff = 40.0;
  std::size_t max_points = 200000;
};

/// Normalized stationary density of the driven rotor. DomainError if the
/// density cannot be normalized (diverges at Omega -> 0 or does not decay).
StationaryDensity fokker_planck_stationary(const TorqueLaw& law, double Omega0, double I,
                                           const StationaryOptions& opt = {});

/// I Delta Omega = sqrt(scale hbar I Mbar2 / Mbar') at Omega0.
/// DomainError if the torque law is flat or decreasing there.
double uncertainty(const TorqueLaw& law, double Omega0, double I, double hbar = 1.0,
                   double diffusion_scale = 1.0);

/// Kolmogorov-Smirnov distance between samples and a density.
double ks_distance(std::vector<double> samples, const StationaryDensity& density);

struct MomentSummary {
  double mean = 0.0;
  double var = 0.0;
};
MomentSummary moments(const std::vector<double>& x);

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& s);
void write_density_csv(std::ostream& os, const StationaryDensity& d);
std::string summary_json(const MomentSummary& m, double I, double I_delta_analytic, int indent = 2);

}  // namespace spinrad::rotor
