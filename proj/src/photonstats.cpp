#include "spinrad/photonstats.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

#include "json.hpp"
#include "spinrad/errors.hpp"

namespace spinrad::photonstats {

namespace {

void require_occupation(double N) {
  if (!(N >= 0.0) || !std::isfinite(N)) throw DomainError("occupation N must be finite and >= 0");
}

}  // namespace

double cumulant(double N, int p) {
  require_occupation(N);
  if (p < 1) throw DomainError("cumulant order must be >= 1");
  if (p > kMaxCumulantOrder) throw RangeError("cumulant order above 20");
  return std::tgamma(static_cast<double>(p)) * std::pow(N, p);
}

double generating_function(double N, double eta) {
  require_occupation(N);
  if (eta * N >= 1.0) throw DomainError("generating function diverges for eta N >= 1");
  return -std::log1p(-eta * N);
}

Distribution counting_distribution(double N, int n_max) {
  require_occupation(N);
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  Distribution d;
  d.P.resize(static_cast<std::size_t>(n_max) + 1);
  const double q = N / (N + 1.0);
  double term = 1.0 / (N + 1.0);
  for (auto& p : d.P) {
    p = term;
    term *= q;
  }
  d.tail = std::pow(q, n_max + 1);
  return d;
}

double glauber_pn_consistency(double N, int n) {
  require_occupation(N);
  if (n < 0) throw DomainError("n must be >= 0");
  if (n > kMaxGlauberOrder) throw RangeError("Glauber route limited to n <= 30");
  // About eta0 = -1: F = F(eta0) + sum_k f_k (eta - eta0)^k with
  // f_k = a^k / k, a = N / (1 - eta0 N). g = exp F obeys k g_k = sum j f_j g_{k-j}.
  const double a = N / (1.0 + N);
  std::vector<double> f(n + 1, 0.0), g(n + 1, 0.0);
  double ak = 1.0;
  for (int k = 1; k <= n; ++k) {
    ak *= a;
    f[k] = ak / k;
  }
  g[0] = std::exp(generating_function(N, -1.0));
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * f[j] * g[k - j];
    g[k] = s / k;
  }
  return g[n];
}

double mode_entropy_rate(double N) {
  require_occupation(N);
  if (N == 0.0) return 0.0;
  if (N < 1e-12) return N * (1.0 - std::log(N));
  return (N + 1.0) * std::log1p(N) - N * std::log(N);
}

double combined_mode_entropy(double x, double r) {
  if (!(x > 0.0)) throw DomainError("x must be > 0");
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("absorptivity must lie in [0, 1]");
  const double u = r / std::expm1(x);
  return mode_entropy_rate(u) - x * u;
}

ModeStatistics mode_statistics(double N, int p_max, int n_max) {
  ModeStatistics s;
  s.N = N;
  for (int p = 1; p <= p_max; ++p) s.cumulants.push_back(cumulant(N, p));
  s.distribution = counting_distribution(N, n_max);
  s.variance = N * (N + 1.0);
  return s;
}

EntropyReport entropy_generation(const scattering::ScatteringSource& source,
                                 const material::ThermalState& state, const radiation::Numerics& num) {
  state.validate();
  if (state.T_env != 0.0) {
    throw DomainError("entropy generation is defined for radiation into a cold environment (T_env = 0)");
  }
  const double Omega = state.Omega;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto weigher = [Omega](double omega, int m, std::span<const radiation::ModeSample> samples,
                         std::span<double> out) {
    double n = 0.0, s = 0.0;
    for (const auto& x : samples) {
      // Tiny negative values are rounding noise of a vanishing flux factor.
      const double N = std::max(x.N, 0.0);
      n += x.weight * N;
      s += x.weight * mode_entropy_rate(N);
    }
    out[0] = s / two_pi;
    out[1] = n / two_pi;
    out[2] = omega * n / two_pi;
    out[3] = (Omega * m - omega) * n / two_pi;
  };
  const auto sum = radiation::integrate_modes(source, state, 4, weigher, num);
  EntropyReport r;
  r.total_rate = sum.total[0];
  r.P = sum.total[2];
  r.Q = sum.total[3];
  r.quad_error = sum.quad_error[0];
  for (const auto& g : sum.groups) r.per_mode.push_back({g.group, g.value[1], g.value[0]});
  if (state.T_object > 0.0) {
    r.object_rate = r.Q / state.T_object;
    r.combined_rate = r.total_rate + *r.object_rate;
  }
  return r;
}

std::string to_json(const EntropyReport& r, int indent) {
  nlohmann::ordered_json j;
  j["perMode"] = nlohmann::ordered_json::array();
  for (const auto& m : r.per_mode) {
    j["perMode"].push_back({{"mode",
                             {{"m", m.group.m},
                              {"extra", scattering::extra_to_string(m.group.extra)},
                              {"pol", scattering::to_string(m.group.pol)}}},
                            {"N", m.N},
                            {"entropyRate", m.entropy_rate}});
  }
  j["totalEntropyRate"] = r.total_rate;
  j["objectEntropyRate"] = r.object_rate ? nlohmann::ordered_json(*r.object_rate) : nullptr;
  j["combinedRate"] = r.combined_rate ? nlohmann::ordered_json(*r.combined_rate) : nullptr;
  j["P"] = r.P;
  j["Q"] = r.Q;
  j["quadratureError"] = r.quad_error;
  return j.dump(indent);
}

void write_distribution_csv(std::ostream& os, const Distribution& d) {
  os << std::setprecision(17) << "# tail=" << d.tail << "\nn,P\n";
  for (std::size_t n = 0; n < d.P.size(); ++n) os << n << ',' << d.P[n] << '\n';
}

}  // namespace spinrad::photonstats
