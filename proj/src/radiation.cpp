#include "spinrad/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "spinrad/errors.hpp"
#include "spinrad/parallel.hpp"

namespace spinrad::radiation {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double occupation_difference(double omega, int m, const ThermalState& s) {
  const double wp = omega - s.Omega * m;
  const double n_env = s.T_env == 0.0 ? 0.0 : material::bose_occupation(omega, s.T_env);
  return material::bose_occupation(wp, s.T_object) - n_env;
}

// Symmetric offset used to step over omega = Omega m.
double removable_step(double omega, const ThermalState& s) {
  return 1e-7 * std::max({omega, s.T_object, s.T_env});
}

struct Segment {
  double a, b;
};

struct GroupPlan {
  std::vector<Segment> segments;
  bool clipped = false;
  bool thermal_tail = false;
  double top = 0.0;
};

GroupPlan plan_group(const ScatteringSource& source, const ChannelGroup& g, const ThermalState& s,
                     const Numerics& num) {
  GroupPlan plan;
  const double t_max = std::max(s.T_object, s.T_env);
  const double resonance = s.Omega * g.m;
  double lo = 0.0, hi;
  if (t_max == 0.0) {
    hi = resonance;
  } else {
    hi = std::max(resonance, 0.0) + num.thermal_cutoff * t_max;
    plan.thermal_tail = true;
  }
  if (!(hi > lo)) return plan;

  const auto [s_lo, s_hi] = source.support(g);
  if (s_lo > lo) {
    plan.clipped = true;
    lo = s_lo;
  }
  if (s_hi < hi) {
    plan.clipped = true;
    plan.thermal_tail = false;  // amplitudes unknown beyond the table
    hi = s_hi;
  }
  if (!(hi > lo)) return plan;
  plan.top = hi;

  std::vector<double> cuts{lo, hi};
  if (resonance > lo && resonance < hi) cuts.push_back(resonance);
  for (double b : source.breakpoints(g)) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) plan.segments.push_back({cuts[i], cuts[i + 1]});
  return plan;
}

GroupIntegral integrate_group(const ScatteringSource& source, const ChannelGroup& g,
                              const ThermalState& s, std::size_t dim, const ModeWeigher& weigher,
                              const Numerics& num) {
  GroupIntegral out;
  out.group = g;
  out.value.assign(dim, 0.0);
  out.error.assign(dim, 0.0);
  const GroupPlan plan = plan_group(source, g, s, num);
  out.support_clipped = plan.clipped;
  if (plan.segments.empty()) return out;

  std::vector<scattering::SubChannel> subs;
  std::vector<ModeSample> samples;
  std::vector<double> tmp(dim);
  auto evaluate = [&](double omega, std::span<double> res) {
    source.sample(g, omega, s.Omega, subs);
    samples.resize(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
      samples[i] = {subs[i].weight, subs[i].flux * occupation_difference(omega, g.m, s)};
    }
    weigher(omega, g.m, samples, res);
  };
  auto f = [&](double omega, std::span<double> res) {
    if (omega == s.Omega * g.m) {
      if (s.T_object == 0.0) {
        std::fill(res.begin(), res.end(), 0.0);
        return;
      }
      const double h = removable_step(omega, s);
      evaluate(omega - h, res);
      evaluate(omega + h, tmp);
      for (std::size_t i = 0; i < dim; ++i) res[i] = 0.5 * (res[i] + tmp[i]);
      return;
    }
    evaluate(omega, res);
  };

  for (const auto& seg : plan.segments) {
    const auto r = quad::integrate(f, dim, seg.a, seg.b, num.quad);
    for (std::size_t i = 0; i < dim; ++i) {
      out.value[i] += r.value[i];
      out.error[i] += r.error[i];
    }
    out.converged = out.converged && r.converged;
  }
  if (plan.thermal_tail) {
    // Beyond the cutoff the integrand decays at least like exp(-omega/T):
    // the remainder is bounded by |f(top)| * T.
    std::vector<double> edge(dim);
    f(plan.top, edge);
    const double t_max = std::max(s.T_object, s.T_env);
    for (std::size_t i = 0; i < dim; ++i) out.error[i] += std::abs(edge[i]) * t_max;
  }
  return out;
}

std::vector<int> shell_orders(int shell, bool negative) {
  if (shell == 0) return {0};
  if (negative) return {shell, -shell};
  return {shell};
}

}  // namespace

double mode_flux(double flux_factor, double omega, int m, const ThermalState& state) {
  if (!(omega > 0.0)) throw DomainError("mode_flux: omega must be > 0");
  if (omega == state.Omega * m) {
    if (state.T_object > 0.0) {
      throw DivergenceError("mode_flux: omega = Omega m needs the channel's limiting form");
    }
    const double n_env = state.T_env == 0.0 ? 0.0 : material::bose_occupation(omega, state.T_env);
    return -n_env * flux_factor;
  }
  return occupation_difference(omega, m, state) * flux_factor;
}

double mode_flux(const ScatteringSource& source, const ChannelGroup& g, const ThermalState& state,
                 double omega) {
  if (!(omega > 0.0)) throw DomainError("mode_flux: omega must be > 0");
  std::vector<scattering::SubChannel> subs;
  auto at = [&](double w) {
    source.sample(g, w, state.Omega, subs);
    double total = 0.0;
    for (const auto& sc : subs) total += sc.weight * sc.flux * occupation_difference(w, g.m, state);
    return total;
  };
  if (omega == state.Omega * g.m) {
    if (state.T_object == 0.0) return 0.0;
    const double h = removable_step(omega, state);
    return 0.5 * (at(omega - h) + at(omega + h));
  }
  return at(omega);
}

ModeSum integrate_modes(const ScatteringSource& source, const ThermalState& state, std::size_t dim,
                        const ModeWeigher& weigher, const Numerics& num) {
  state.validate();
  ModeSum sum;
  sum.total.assign(dim, 0.0);
  sum.quad_error.assign(dim, 0.0);
  sum.tail.assign(dim, 0.0);
  const bool zero_t = std::max(state.T_object, state.T_env) == 0.0;
  if (zero_t && state.Omega == 0.0) return sum;

  const auto order_cap = source.max_order();
  int m_max = num.msum.m_max.value_or(std::min(5, num.msum.cap));
  if (m_max < 0) throw DomainError("m_max must be >= 0");
  const bool auto_extend = !num.msum.m_max.has_value();
  if (order_cap) m_max = std::min(m_max, *order_cap);
  const bool negative = !zero_t;  // at T = 0 only m >= 1 radiates

  std::vector<int> shell_of;  // shell index per group
  int done = -1;
  while (true) {
    std::vector<ChannelGroup> fresh;
    std::vector<int> fresh_shell;
    for (int shell = done + 1; shell <= m_max; ++shell) {
      for (int m : shell_orders(shell, negative)) {
        if (zero_t && m <= 0) continue;
        for (const auto& g : source.groups(m)) {
          fresh.push_back(g);
          fresh_shell.push_back(shell);
        }
      }
    }
    std::vector<GroupIntegral> results(fresh.size());
    parallel_for(fresh.size(), num.threads, [&](std::size_t i) {
      results[i] = integrate_group(source, fresh[i], state, dim, weigher, num);
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
      sum.groups.push_back(std::move(results[i]));
      shell_of.push_back(fresh_shell[i]);
    }
    done = m_max;

    std::vector<double> scale(dim, 0.0), last(dim, 0.0);
    for (std::size_t k = 0; k < sum.groups.size(); ++k) {
      for (std::size_t i = 0; i < dim; ++i) {
        scale[i] += std::abs(sum.groups[k].value[i]);
        if (shell_of[k] == m_max) last[i] += std::abs(sum.groups[k].value[i]);
      }
    }
    const bool exhausted = order_cap && m_max >= *order_cap;
    bool ok = true;
    for (std::size_t i = 0; i < dim; ++i) {
      sum.tail[i] = exhausted ? 0.0 : last[i];
      if (sum.tail[i] > num.msum.tail_rel_tol * scale[i]) ok = false;
    }
    if (ok) break;
    if (!auto_extend || m_max >= num.msum.cap) {
      std::ostringstream os;
      os << "partial-wave sum not converged: shell m = " << m_max << " still carries "
         << *std::max_element(last.begin(), last.end()) << " (tolerance "
         << num.msum.tail_rel_tol << " relative)";
      throw ConvergenceError(os.str());
    }
    m_max = std::min(2 * std::max(m_max, 1), num.msum.cap);
    if (order_cap) m_max = std::min(m_max, *order_cap);
  }

  sum.m_max = m_max;
  for (const auto& g : sum.groups) {
    for (std::size_t i = 0; i < dim; ++i) {
      sum.total[i] += g.value[i];
      sum.quad_error[i] += g.error[i];
    }
    sum.quad_converged = sum.quad_converged && g.converged;
    sum.support_clipped = sum.support_clipped || g.support_clipped;
  }
  return sum;
}

RadiationResult integrate_power(const ScatteringSource& source, const ThermalState& state,
                                const Numerics& num) {
  const double Omega = state.Omega;
  auto weigher = [Omega](double omega, int m, std::span<const ModeSample> samples, std::span<double> out) {
    double n = 0.0;
    for (const auto& s : samples) n += s.weight * s.N;
    n /= kTwoPi;
    out[0] = n;
    out[1] = omega * n;
    out[2] = m * n;
    out[3] = (Omega * m - omega) * n;
  };
  const ModeSum sum = integrate_modes(source, state, 4, weigher, num);
  RadiationResult r;
  r.N = sum.total[0];
  r.P = sum.total[1];
  r.M = sum.total[2];
  r.Q = sum.total[3];
  r.error_N = sum.quad_error[0];
  r.error_P = sum.quad_error[1];
  r.error_M = sum.quad_error[2];
  r.error_Q = sum.quad_error[3];
  r.truncation_tail = sum.tail[1];
  r.m_max = sum.m_max;
  r.quad_converged = sum.quad_converged;
  r.support_clipped = sum.support_clipped;
  r.omega_R = Omega * source.radius();
  for (const auto& g : sum.groups) {
    r.per_mode.push_back({g.group.m, g.group.extra, g.group.pol, g.value[0], g.value[1], g.value[2],
                          g.value[3]});
  }
  return r;
}

RadiationResult integrate_power_cylinder(const material::DielectricModel& model, double R, double L,
                                         double Omega, const ThermalState& state, const Numerics& num) {
  ThermalState s = state;
  s.Omega = Omega;
  return integrate_power(scattering::CylinderBody(model, R, L), s, num);
}

RadiationResult kirchhoff_power(const ScatteringSource& source, double T_object, double T_env,
                                const Numerics& num) {
  return integrate_power(source, ThermalState{T_object, T_env, 0.0}, num);
}

double spindown_timescale(const std::function<double(double)>& torque, double I, double Omega0) {
  if (!(I > 0.0) || !(Omega0 > 0.0)) throw DomainError("spindown: I and Omega0 must be > 0");
  auto inv = [&](double w) {
    const double m = torque(w);
    if (!(m > 0.0)) {
      throw DivergenceError("spindown: torque vanishes at Omega = " + std::to_string(w) +
                            "; the body never spins down");
    }
    return 1.0 / m;
  };
  const auto r = quad::integrate(inv, 0.1 * Omega0, Omega0, quad::Options{1e-10, 0.0, 500});
  return I * r.value[0];
}

double spindown_timescale(const ScatteringSource& source, double I, double Omega0, const Numerics& num) {
  return spindown_timescale(
      [&](double w) { return integrate_power(source, ThermalState{0.0, 0.0, w}, num).M; }, I, Omega0);
}

std::vector<SpectralRow> spectrum(const ScatteringSource& source, const ThermalState& state,
                                  std::span<const double> omegas, int m_max) {
  state.validate();
  std::vector<SpectralRow> rows;
  for (int shell = 0; shell <= m_max; ++shell) {
    for (int m : shell_orders(shell, true)) {
      for (const auto& g : source.groups(m)) {
        for (double w : omegas) {
          const double n = mode_flux(source, g, state, w) / kTwoPi;
          rows.push_back({w, m, g.extra, g.pol, n, w * n});
        }
      }
    }
  }
  return rows;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectralRow>& rows) {
  os << "omega,m,extra,pol,N,dP_domega\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.omega << ',' << r.m << ',' << scattering::extra_to_string(r.extra) << ','
       << scattering::to_string(r.pol) << ',' << r.N << ',' << r.dP_domega << '\n';
  }
}

std::string to_json(const RadiationResult& r, int indent) {
  nlohmann::ordered_json j;
  j["P"] = r.P;
  j["M"] = r.M;
  j["Q"] = r.Q;
  j["photon_rate"] = r.N;
  j["errors"] = {{"P", r.error_P}, {"M", r.error_M}, {"Q", r.error_Q}, {"photon_rate", r.error_N}};
  j["truncation_tail"] = r.truncation_tail;
  j["m_max"] = r.m_max;
  j["quadrature_converged"] = r.quad_converged;
  j["support_clipped"] = r.support_clipped;
  j["perMode"] = nlohmann::ordered_json::array();
  for (const auto& c : r.per_mode) {
    j["perMode"].push_back({{"m", c.m},
                            {"extra", scattering::extra_to_string(c.extra)},
                            {"pol", scattering::to_string(c.pol)},
                            {"N", c.N},
                            {"P", c.P},
                            {"M", c.M},
                            {"Q", c.Q}});
  }
  return j.dump(indent);
}

}  // namespace spinrad::radiation
