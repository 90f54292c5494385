#pragma once

// Counting statistics of the photons radiated into one mode, and the entropy
// they carry.
//
// Photons in a mode with mean occupation N per cell are geometrically
// distributed, P(n) = N^n / (N+1)^(n+1). A "cell" is one (omega, m, ...) mode
// over a time t and bandwidth d omega with t d omega / 2 pi = 1; rates follow
// by integrating per-cell quantities with d omega / 2 pi.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spinrad/radiation.hpp"

namespace spinrad::photonstats {

inline constexpr int kMaxCumulantOrder = 20;
inline constexpr int kMaxGlauberOrder = 30;

/// Factorial cumulant (p-1)! N^p. RangeError for p > 20, DomainError for p < 1.
double cumulant(double N, int p);

/// -log(1 - eta N). DomainError when eta N >= 1.
double generating_function(double N, double eta);

struct Distribution {
  std::vector<double> P;  // P(0..n_max)
  double tail = 0.0;      // probability of n > n_max
};

Distribution counting_distribution(double N, int n_max = 10000);

/// P(n) computed from the Taylor coefficients of exp F(eta) about eta = -1.
/// RangeError for n > 30.
double glauber_pn_consistency(double N, int n);

/// (N+1) log(N+1) - N log N, with the small-N expansion N (1 - log N).
double mode_entropy_rate(double N);

/// Field plus object entropy per mode for a grey body of absorptivity r at
/// x = omega / T radiating into a cold environment.
double combined_mode_entropy(double x, double r);

struct ModeStatistics {
  double N = 0.0;
  std::vector<double> cumulants;  // kappa_1 .. kappa_pmax
  Distribution distribution;
  double variance = 0.0;
};

ModeStatistics mode_statistics(double N, int p_max = 6, int n_max = 10000);

struct ModeEntropy {
  scattering::ChannelGroup group;
  double N = 0.0;            // photons per unit time in the group
  double entropy_rate = 0.0;
};

struct EntropyReport {
  std::vector<ModeEntropy> per_mode;
  double total_rate = 0.0;              // field entropy per unit time
  std::optional<double> object_rate;    // Q / T_object; unset at T_object = 0
  std::optional<double> combined_rate;
  double P = 0.0, Q = 0.0;
  double quad_error = 0.0;
};

/// Entropy generated by radiation into a cold environment (T_env = 0, so
/// every occupation is non-negative). DomainError for T_env > 0.
EntropyReport entropy_generation(const scattering::ScatteringSource& source,
                                 const material::ThermalState& state,
                                 const radiation::Numerics& num = {});

std::string to_json(const EntropyReport& r, int indent = 2);
void write_distribution_csv(std::ostream& os, const Distribution& d);

}  // namespace spinrad::photonstats
