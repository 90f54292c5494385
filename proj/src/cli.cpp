#include "spinrad/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spinrad/csv.hpp"
#include "spinrad/errors.hpp"
#include "spinrad/photonstats.hpp"
#include "spinrad/radiation.hpp"
#include "spinrad/rotor.hpp"
#include "spinrad/testbody.hpp"
#include "spinrad/units.hpp"
#include "spinrad/verify.hpp"

namespace spinrad::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using units::Quantity;

struct Context {
  const config::Config& cfg;
  const RunOptions& opt;
  fs::path base;
  units::UnitSystem u;
  std::string subcommand;
};

std::string field(const std::string& s, const std::string& k) { return "[" + s + "] " + k; }

[[noreturn]] void bad(const std::string& s, const std::string& k, const std::string& why) {
  throw ConfigError(field(s, k) + ": " + why);
}

units::UnitSystem unit_system(const config::Config& cfg) {
  const auto t0 = cfg.real("scenario", "time_anchor");
  const auto r0 = cfg.real("scenario", "length_anchor");
  if (cfg.text("scenario", "units").value_or("natural") == "natural") {
    if (t0) bad("scenario", "time_anchor", "only used with units = SI");
    if (r0) bad("scenario", "length_anchor", "only used with units = SI");
    return units::UnitSystem::natural();
  }
  if (t0 && r0) bad("scenario", "length_anchor", "give either time_anchor or length_anchor, not both");
  if (t0) {
    if (!(*t0 > 0.0)) bad("scenario", "time_anchor", "must be > 0");
    return units::UnitSystem::si_time_anchor(*t0);
  }
  if (r0) {
    if (!(*r0 > 0.0)) bad("scenario", "length_anchor", "must be > 0");
    return units::UnitSystem::si_length_anchor(*r0);
  }
  if (const auto R = cfg.real("body", "R"); R && *R > 0.0) return units::UnitSystem::si_length_anchor(*R);
  bad("scenario", "time_anchor", "required with units = SI when [body] R is not given");
}

std::optional<double> get(const Context& c, const std::string& s, const std::string& k, Quantity q) {
  const auto v = c.cfg.real(s, k);
  if (!v) return std::nullopt;
  return c.u.to_natural(q, *v);
}

double need(const Context& c, const std::string& s, const std::string& k, Quantity q) {
  return c.u.to_natural(q, c.cfg.require_real(s, k));
}

double positive(double v, const std::string& s, const std::string& k) {
  if (!(v > 0.0)) bad(s, k, "must be > 0");
  return v;
}

double non_negative(double v, const std::string& s, const std::string& k) {
  if (!(v >= 0.0)) bad(s, k, "must be >= 0");
  return v;
}

long long count(const Context& c, const std::string& s, const std::string& k, long long def, long long lo) {
  const long long v = c.cfg.integer(s, k).value_or(def);
  if (v < lo) bad(s, k, "must be >= " + std::to_string(lo));
  return v;
}

void only_keys(const Context& c, const std::string& s, const std::vector<std::string>& allowed,
               const std::string& context) {
  for (const auto& spec : config::scenario_schema()) {
    if (spec.section != s || !c.cfg.has(s, spec.key)) continue;
    if (std::find(allowed.begin(), allowed.end(), spec.key) == allowed.end()) {
      bad(s, spec.key, "not used by " + context);
    }
  }
}

fs::path resolve(const Context& c, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : c.base / path;
}

// ---------------------------------------------------------------- inputs

material::DielectricModel material_from(const Context& c, const std::string& s) {
  const auto model = c.cfg.text(s, "model");
  if (!model) bad(s, "model", "required");
  if (*model == "vacuum") {
    only_keys(c, s, {"model"}, "model = vacuum");
    return material::Vacuum{};
  }
  if (*model == "drude") {
    only_keys(c, s, {"model", "sigma", "sigma_si"}, "model = drude");
    const bool gauss = c.cfg.has(s, "sigma"), si = c.cfg.has(s, "sigma_si");
    if (gauss == si) bad(s, "sigma", "give exactly one of sigma and sigma_si");
    if (si && !c.u.is_si()) bad(s, "sigma_si", "only used with units = SI");
    const double sigma = gauss ? need(c, s, "sigma", Quantity::Conductivity)
                               : need(c, s, "sigma_si", Quantity::ConductivitySI);
    return material::Drude{positive(sigma, s, gauss ? "sigma" : "sigma_si")};
  }
  if (*model == "lorentz") {
    only_keys(c, s, {"model", "eps_inf", "omega_p", "omega_0", "gamma"}, "model = lorentz");
    const double eps_inf = c.cfg.real(s, "eps_inf").value_or(1.0);
    return material::Lorentz{positive(eps_inf, s, "eps_inf"),
                             positive(need(c, s, "omega_p", Quantity::AngularVelocity), s, "omega_p"),
                             non_negative(need(c, s, "omega_0", Quantity::AngularVelocity), s, "omega_0"),
                             positive(need(c, s, "gamma", Quantity::AngularVelocity), s, "gamma")};
  }
  if (*model == "constant") {
    only_keys(c, s, {"model", "eps_re", "eps_im"}, "model = constant");
    return material::ConstantEps{c.cfg.require_real(s, "eps_re"),
                                 non_negative(c.cfg.real(s, "eps_im").value_or(0.0), s, "eps_im")};
  }
  only_keys(c, s, {"model", "file"}, "model = table");
  const fs::path path = resolve(c, c.cfg.require_text(s, "file"));
  std::ifstream in(path);
  if (!in) bad(s, "file", "cannot open '" + path.string() + "'");
  csv::Reader reader(in);
  reader.expect_header({"omega", "re", "im"});
  std::vector<double> w, re, im;
  while (const auto row = reader.next()) {
    if (row->size() != 3) throw ParseError("expected 3 columns in " + path.string(), reader.line());
    w.push_back(c.u.to_natural(Quantity::AngularVelocity, csv::to_double((*row)[0], reader.line())));
    re.push_back(csv::to_double((*row)[1], reader.line()));
    im.push_back(csv::to_double((*row)[2], reader.line()));
  }
  return material::Tabulated(std::move(w), std::move(re), std::move(im));
}

std::string geometry(const Context& c) {
  const auto g = c.cfg.text("scenario", "geometry");
  if (!g) bad("scenario", "geometry", "required");
  return *g;
}

std::unique_ptr<scattering::ScatteringSource> source_from(const Context& c) {
  const std::string g = geometry(c);
  const auto rule = c.cfg.text("body", "flux_rule").value_or("leading") == "exact"
                        ? scattering::FluxRule::Exact
                        : scattering::FluxRule::LeadingOrder;
  if (g == "table") {
    only_keys(c, "body", {"table", "R"}, "geometry = table");
    const fs::path path = resolve(c, c.cfg.require_text("body", "table"));
    auto table = scattering::ChannelTable::from_file(path);
    if (!c.u.is_si()) return std::make_unique<scattering::ChannelTable>(std::move(table));
    auto channels = table.channels();
    for (auto& ch : channels) {
      for (double& w : ch.omega) w = c.u.to_natural(Quantity::AngularVelocity, w);
      if (auto* kz = std::get_if<scattering::Kz>(&ch.extra)) kz->value *= c.u.scale(Quantity::Length);
    }
    return std::make_unique<scattering::ChannelTable>(std::move(channels));
  }
  const double R = positive(need(c, "body", "R", Quantity::Length), "body", "R");
  const auto model = material_from(c, "material");
  if (g == "disk") {
    only_keys(c, "body", {"R", "small_velocity"}, "geometry = disk");
    return std::make_unique<scattering::DiskBody>(model, R, c.cfg.boolean("body", "small_velocity").value_or(false));
  }
  if (g == "sphere") {
    only_keys(c, "body", {"R", "flux_rule"}, "geometry = sphere");
    return std::make_unique<scattering::SphereBody>(model, R, rule);
  }
  only_keys(c, "body", {"R", "L", "flux_rule"}, "geometry = cylinder");
  const double L = positive(need(c, "body", "L", Quantity::Length), "body", "L");
  return std::make_unique<scattering::CylinderBody>(model, R, L, rule);
}

material::ThermalState state_from(const Context& c) {
  material::ThermalState s;
  s.Omega = non_negative(get(c, "state", "Omega", Quantity::AngularVelocity).value_or(0.0), "state", "Omega");
  s.T_object = non_negative(get(c, "state", "T_object", Quantity::Temperature).value_or(0.0), "state", "T_object");
  s.T_env = non_negative(get(c, "state", "T_env", Quantity::Temperature).value_or(0.0), "state", "T_env");
  return s;
}

radiation::Numerics numerics_from(const Context& c) {
  radiation::Numerics n;
  const std::string s = "numerics";
  if (const auto v = c.cfg.real(s, "rel_tol")) {
    if (!(*v > 0.0 && *v < 1.0)) bad(s, "rel_tol", "must lie in (0, 1)");
    n.quad.rel_tol = *v;
  }
  if (const auto v = c.cfg.real(s, "abs_tol")) n.quad.abs_tol = non_negative(*v, s, "abs_tol");
  n.quad.max_segments = static_cast<int>(count(c, s, "max_segments", n.quad.max_segments, 1));
  if (c.cfg.has(s, "m_max")) n.msum.m_max = static_cast<int>(count(c, s, "m_max", 0, 0));
  if (const auto v = c.cfg.real(s, "tail_rel_tol")) {
    if (!(*v > 0.0 && *v < 1.0)) bad(s, "tail_rel_tol", "must lie in (0, 1)");
    n.msum.tail_rel_tol = *v;
  }
  n.msum.cap = static_cast<int>(count(c, s, "m_cap", n.msum.cap, 1));
  if (const auto v = c.cfg.real(s, "thermal_cutoff")) n.thermal_cutoff = positive(*v, s, "thermal_cutoff");
  n.threads = c.opt.threads;
  return n;
}

// ---------------------------------------------------------------- outputs

struct Regime {
  std::optional<double> omega_R;
  std::optional<double> adiabaticity;
};

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json header(const Context& c, const Regime& r) {
  ordered_json h;
  h["program"] = "spinrad";
  h["version"] = SPINRAD_VERSION;
  h["subcommand"] = c.subcommand;
  h["config_hash"] = config::hex64(c.cfg.hash());
  h["seed"] = c.opt.seed;
  h["units"] = c.u.is_si() ? "SI" : "natural";
  if (c.u.is_si()) h["time_anchor_s"] = c.u.time_anchor();
  h["regime"] = {{"omega_R", opt_json(r.omega_R)}, {"adiabaticity", opt_json(r.adiabaticity)}};
  return h;
}

std::string csv_header(const ordered_json& h) {
  std::ostringstream os;
  for (const auto& [k, v] : h.items()) {
    if (v.is_object()) {
      for (const auto& [k2, v2] : v.items()) os << "# " << k << '.' << k2 << '=' << v2.dump() << '\n';
    } else {
      os << "# " << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  }
  return os.str();
}

std::string json_doc(const ordered_json& h, const std::string& key, ordered_json body) {
  ordered_json j;
  j["header"] = h;
  j[key] = std::move(body);
  return j.dump(2) + "\n";
}

fs::path write_file(const Context& c, const std::string& name, const std::string& content) {
  fs::create_directories(c.opt.out_dir);
  const fs::path path = c.opt.out_dir / name;
  std::ofstream os(path, std::ios::binary);
  os << content;
  if (!os) throw ConfigError("--out: cannot write '" + path.string() + "'");
  return path;
}

Format pick(const Context& c, Format def) { return c.opt.format == Format::Auto ? def : c.opt.format; }

std::string unit(const Context& c, Quantity q) { return c.u.is_si() ? units::si_unit_name(q) : "natural units"; }

std::string g17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::optional<double> omega_R(const scattering::ScatteringSource& src, double Omega) {
  if (src.radius() > 0.0) return Omega * src.radius();
  return std::nullopt;
}

// ---------------------------------------------------------------- subcommands

RunReport do_spectrum(const Context& c) {
  const auto src = source_from(c);
  const auto st = state_from(c);
  const std::string s = "spectrum";
  const double w0 = positive(need(c, s, "omega_min", Quantity::AngularVelocity), s, "omega_min");
  const double w1 = need(c, s, "omega_max", Quantity::AngularVelocity);
  if (!(w1 > w0)) bad(s, "omega_max", "must exceed omega_min");
  const long long n = count(c, s, "points", 200, 2);
  const int m_max = static_cast<int>(count(c, s, "m_max", src->max_order().value_or(3), 0));
  std::vector<double> grid(n);
  for (long long i = 0; i < n; ++i) grid[i] = w0 + (w1 - w0) * double(i) / double(n - 1);
  auto rows = radiation::spectrum(*src, st, grid, m_max);
  for (auto& r : rows) {
    r.omega = c.u.to_si(Quantity::AngularVelocity, r.omega);
    r.dP_domega = c.u.to_si(Quantity::Energy, r.dP_domega);
  }
  const auto h = header(c, {omega_R(*src, st.Omega), std::nullopt});
  RunReport rep;
  if (pick(c, Format::Csv) == Format::Csv) {
    std::ostringstream os;
    os << csv_header(h);
    radiation::write_spectrum_csv(os, rows);
    rep.files.push_back(write_file(c, "spectrum.csv", os.str()));
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"omega", r.omega},
                     {"m", r.m},
                     {"extra", scattering::extra_to_string(r.extra)},
                     {"pol", scattering::to_string(r.pol)},
                     {"N", r.N},
                     {"dP_domega", r.dP_domega}});
    }
    rep.files.push_back(write_file(c, "spectrum.json", json_doc(h, "spectrum", std::move(arr))));
  }
  rep.summary = "spectrum: " + std::to_string(rows.size()) + " rows, |m| <= " + std::to_string(m_max) + "\n";
  return rep;
}

RunReport do_power(const Context& c) {
  const auto src = source_from(c);
  const auto st = state_from(c);
  auto res = radiation::integrate_power(*src, st, numerics_from(c));
  Regime regime{omega_R(*src, st.Omega), std::nullopt};
  if (const auto I = get(c, "rotor", "I", Quantity::MomentOfInertia); I && st.Omega > 0.0) {
    regime.adiabaticity = std::abs(res.M) / (positive(*I, "rotor", "I") * st.Omega * st.Omega);
  }
  auto conv = [&](Quantity q, double& v) { v = c.u.to_si(q, v); };
  conv(Quantity::Rate, res.N);
  conv(Quantity::Power, res.P);
  conv(Quantity::Torque, res.M);
  conv(Quantity::Power, res.Q);
  conv(Quantity::Rate, res.error_N);
  conv(Quantity::Power, res.error_P);
  conv(Quantity::Torque, res.error_M);
  conv(Quantity::Power, res.error_Q);
  conv(Quantity::Power, res.truncation_tail);
  for (auto& m : res.per_mode) {
    conv(Quantity::Rate, m.N);
    conv(Quantity::Power, m.P);
    conv(Quantity::Torque, m.M);
    conv(Quantity::Power, m.Q);
  }
  const auto h = header(c, regime);
  RunReport rep;
  rep.converged = res.quad_converged;
  if (pick(c, Format::Json) == Format::Json) {
    rep.files.push_back(write_file(c, "power.json", json_doc(h, "result", ordered_json::parse(radiation::to_json(res)))));
  } else {
    std::ostringstream os;
    os << csv_header(h) << "quantity,value\n";
    os << "photon_rate," << g17(res.N) << "\nP," << g17(res.P) << "\nM," << g17(res.M) << "\nQ," << g17(res.Q)
       << "\nerror_P," << g17(res.error_P) << "\nerror_M," << g17(res.error_M) << "\nerror_Q," << g17(res.error_Q)
       << "\ntruncation_tail," << g17(res.truncation_tail) << "\nm_max," << res.m_max << '\n';
    rep.files.push_back(write_file(c, "power.csv", os.str()));
  }
  std::ostringstream os;
  os << "P = " << res.P << " (" << unit(c, Quantity::Power) << ")\n"
     << "M = " << res.M << " (" << unit(c, Quantity::Torque) << ")\n"
     << "Q = " << res.Q << " (" << unit(c, Quantity::Power) << ")\n";
  if (!res.quad_converged) os << "warning: radiation quadrature did not reach rel_tol\n";
  rep.summary = os.str();
  return rep;
}

RunReport do_stats(const Context& c) {
  const auto src = source_from(c);
  const auto st = state_from(c);
  auto rep_e = photonstats::entropy_generation(*src, st, numerics_from(c));
  auto rate = [&](double v) { return c.u.to_si(Quantity::Rate, v); };
  for (auto& m : rep_e.per_mode) {
    m.N = rate(m.N);
    m.entropy_rate = rate(m.entropy_rate);
  }
  rep_e.total_rate = rate(rep_e.total_rate);
  if (rep_e.object_rate) rep_e.object_rate = rate(*rep_e.object_rate);
  if (rep_e.combined_rate) rep_e.combined_rate = rate(*rep_e.combined_rate);
  rep_e.P = c.u.to_si(Quantity::Power, rep_e.P);
  rep_e.Q = c.u.to_si(Quantity::Power, rep_e.Q);
  rep_e.quad_error = rate(rep_e.quad_error);

  const auto h = header(c, {omega_R(*src, st.Omega), std::nullopt});
  RunReport rep;
  std::optional<photonstats::ModeStatistics> ms;
  if (const auto N = c.cfg.real("stats", "occupation")) {
    const int p_max = static_cast<int>(count(c, "stats", "p_max", 6, 1));
    if (p_max > photonstats::kMaxCumulantOrder) bad("stats", "p_max", "must be <= 20");
    ms = photonstats::mode_statistics(non_negative(*N, "stats", "occupation"), p_max,
                                      static_cast<int>(count(c, "stats", "n_max", 200, 1)));
    std::ostringstream os;
    os << csv_header(h) << "# occupation=" << g17(ms->N) << "\n# variance=" << g17(ms->variance) << '\n';
    for (std::size_t p = 0; p < ms->cumulants.size(); ++p) {
      os << "# kappa_" << p + 1 << '=' << g17(ms->cumulants[p]) << '\n';
    }
    photonstats::write_distribution_csv(os, ms->distribution);
    rep.files.push_back(write_file(c, "distribution.csv", os.str()));
  } else {
    only_keys(c, "stats", {}, "stats without occupation");
  }
  if (pick(c, Format::Json) == Format::Json) {
    ordered_json body = ordered_json::parse(photonstats::to_json(rep_e));
    if (ms) {
      body["modeStatistics"] = {{"occupation", ms->N},
                                {"variance", ms->variance},
                                {"cumulants", ms->cumulants},
                                {"tail", ms->distribution.tail}};
    }
    rep.files.insert(rep.files.begin(), write_file(c, "stats.json", json_doc(h, "result", std::move(body))));
  } else {
    std::ostringstream os;
    os << csv_header(h) << "# total_entropy_rate=" << g17(rep_e.total_rate) << '\n'
       << "# object_entropy_rate=" << (rep_e.object_rate ? g17(*rep_e.object_rate) : "null") << '\n'
       << "# combined_rate=" << (rep_e.combined_rate ? g17(*rep_e.combined_rate) : "null") << '\n'
       << "m,extra,pol,N,entropy_rate\n";
    for (const auto& m : rep_e.per_mode) {
      os << m.group.m << ',' << scattering::extra_to_string(m.group.extra) << ','
         << scattering::to_string(m.group.pol) << ',' << g17(m.N) << ',' << g17(m.entropy_rate) << '\n';
    }
    rep.files.insert(rep.files.begin(), write_file(c, "stats.csv", os.str()));
  }
  std::ostringstream os;
  os << "field entropy rate = " << rep_e.total_rate << " (k_B per " << (c.u.is_si() ? "s" : "unit time") << ")\n";
  if (rep_e.combined_rate) os << "combined entropy rate = " << *rep_e.combined_rate << '\n';
  rep.summary = os.str();
  return rep;
}

rotor::TorqueLaw law_from(const Context& c, std::optional<double>& radius) {
  const std::string s = "rotor";
  const auto kind = c.cfg.text(s, "law");
  if (!kind) bad(s, "law", "required");
  if (*kind == "power") {
    for (const char* k : {"grid_min", "grid_max"}) {
      if (c.cfg.has(s, k)) bad(s, k, "not used by law = power");
    }
    const double k = c.cfg.require_real(s, "k"), k2 = c.cfg.require_real(s, "k2");
    double a = non_negative(c.cfg.require_real(s, "c"), s, "c");
    double a2 = non_negative(c.cfg.require_real(s, "c2"), s, "c2");
    // Rates per unit time in Omega^k: c carries time^(k - 1).
    if (c.u.is_si()) {
      a *= std::pow(c.u.time_anchor(), 1.0 - k);
      a2 *= std::pow(c.u.time_anchor(), 1.0 - k2);
    }
    return rotor::power_law(a, k, a2, k2);
  }
  for (const char* k : {"c", "k", "c2", "k2"}) {
    if (c.cfg.has(s, k)) bad(s, k, "not used by law = radiation");
  }
  const auto src = source_from(c);
  if (src->radius() > 0.0) radius = src->radius();
  rotor::TorqueGridOptions grid;
  grid.omega_min = positive(get(c, s, "grid_min", Quantity::AngularVelocity).value_or(grid.omega_min), s, "grid_min");
  grid.omega_max = get(c, s, "grid_max", Quantity::AngularVelocity).value_or(grid.omega_max);
  if (!(grid.omega_max > grid.omega_min)) bad(s, "grid_max", "must exceed grid_min");
  return rotor::torque_law_from_radiation(*src, state_from(c).T_object, grid, numerics_from(c));
}

RunReport do_rotor(const Context& c) {
  const std::string s = "rotor";
  const auto st = state_from(c);
  std::optional<double> radius;
  const auto law = law_from(c, radius);
  const double I = positive(need(c, s, "I", Quantity::MomentOfInertia), s, "I");
  const double dt = positive(need(c, s, "dt", Quantity::Time), s, "dt");
  const auto n_traj = count(c, s, "n_traj", 1000, 1);
  if (!c.cfg.has(s, "n_steps")) bad(s, "n_steps", "required");
  const auto n_steps = count(c, s, "n_steps", 0, 1);
  const auto every = count(c, s, "record_every", 0, 0);
  const bool driven = c.cfg.boolean(s, "driven").value_or(false);
  if (driven && !(st.Omega > 0.0)) bad("state", "Omega", "driven rotor needs Omega > 0");
  double w0 = get(c, s, "omega_init", Quantity::AngularVelocity).value_or(st.Omega);
  if (!(w0 > 0.0)) bad(s, "omega_init", "must be > 0 (or set [state] Omega)");
  const double scale = positive(c.cfg.real(s, "diffusion_scale").value_or(1.0), s, "diffusion_scale");
  if (!driven && c.cfg.has(s, "diffusion_scale")) bad(s, "diffusion_scale", "only used with driven = true");

  auto ens = rotor::make_ensemble(I, dt, static_cast<std::size_t>(n_traj), w0,
                                  driven ? std::optional<double>(st.Omega) : std::nullopt, c.opt.seed);
  const auto sim = rotor::simulate(std::move(ens), law, static_cast<std::uint64_t>(n_steps),
                                   static_cast<std::uint64_t>(every), c.opt.threads);
  const auto m = rotor::moments(sim.final.omega);
  double analytic = std::nan("");
  std::optional<rotor::StationaryDensity> density;
  std::optional<double> ks;
  if (driven) {
    analytic = rotor::uncertainty(law, st.Omega, I, 1.0, scale);
    rotor::StationaryOptions so;
    so.diffusion_scale = scale;
    density = rotor::fokker_planck_stationary(law, st.Omega, I, so);
    ks = rotor::ks_distance(sim.final.omega, *density);
  }

  const double av = c.u.to_si(Quantity::AngularVelocity, 1.0);
  std::vector<rotor::TrajectorySample> samples = sim.samples;
  for (auto& x : samples) {
    x.t = c.u.to_si(Quantity::Time, x.t);
    x.omega *= av;
  }
  if (density) {
    for (auto& w : density->omega) w *= av;
    for (auto& p : density->pdf) p /= av;
  }
  const rotor::MomentSummary msi{m.mean * av, m.var * av * av};
  ordered_json summary = ordered_json::parse(rotor::summary_json(
      msi, c.u.to_si(Quantity::MomentOfInertia, I), c.u.to_si(Quantity::AngularMomentum, analytic)));
  summary["diffusion_scale"] = scale;
  summary["ks_distance"] = opt_json(ks);
  summary["n_traj"] = n_traj;
  summary["t_final"] = c.u.to_si(Quantity::Time, sim.final.t);
  summary["max_adiabaticity"] = sim.max_adiabaticity;
  summary["adiabatic_warning"] = sim.adiabatic_warning;

  Regime regime{std::nullopt, sim.max_adiabaticity};
  if (radius) regime.omega_R = std::max(w0, st.Omega) * *radius;
  const auto h = header(c, regime);
  RunReport rep;
  if (pick(c, Format::Csv) == Format::Csv) {
    if (!samples.empty()) {
      std::ostringstream os;
      os << csv_header(h);
      rotor::write_trajectory_csv(os, samples);
      rep.files.push_back(write_file(c, "trajectories.csv", os.str()));
    }
    if (density) {
      std::ostringstream os;
      os << csv_header(h);
      rotor::write_density_csv(os, *density);
      rep.files.push_back(write_file(c, "density.csv", os.str()));
    }
    rep.files.push_back(write_file(c, "rotor.json", json_doc(h, "summary", summary)));
  } else {
    ordered_json body;
    body["summary"] = summary;
    ordered_json traj = ordered_json::array();
    for (const auto& x : samples) traj.push_back({{"t", x.t}, {"traj_id", x.traj}, {"omega", x.omega}});
    body["trajectories"] = std::move(traj);
    if (density) body["density"] = {{"omega", density->omega}, {"pdf", density->pdf}};
    ordered_json j;
    j["header"] = h;
    for (auto& [k, v] : body.items()) j[k] = v;
    rep.files.push_back(write_file(c, "rotor.json", j.dump(2) + "\n"));
  }
  std::ostringstream os;
  os << "mean Omega = " << msi.mean << ", I dOmega (ensemble) = " << summary["IDeltaOmega_mc"].get<double>();
  if (driven) os << ", I dOmega (stationary formula) = " << summary["IDeltaOmega_analytic"].dump();
  os << '\n';
  if (sim.adiabatic_warning) os << "warning: rotation is not adiabatic (max |dOmega/dt|/Omega^2 > 0.1)\n";
  rep.summary = os.str();
  return rep;
}

RunReport do_twobody(const Context& c) {
  const std::string s = "twobody";
  if (!c.cfg.has(s, "dimension")) bad(s, "dimension", "required");
  const auto dim_n = *c.cfg.integer(s, "dimension");
  if (dim_n != 2 && dim_n != 3) bad(s, "dimension", "must be 2 or 3");
  const auto dim = dim_n == 2 ? testbody::Dimension::Two : testbody::Dimension::Three;
  if (const auto g = c.cfg.text("scenario", "geometry"); g && *g != (dim_n == 2 ? "disk" : "sphere")) {
    bad("scenario", "geometry", dim_n == 2 ? "two-dimensional exchange needs disk" : "three-dimensional exchange needs sphere");
  }
  const auto st = state_from(c);
  if (!(st.Omega > 0.0)) bad("state", "Omega", "must be > 0");
  if (st.T_object != 0.0) bad("state", "T_object", "the exchange is evaluated at zero temperature");
  if (st.T_env != 0.0) bad("state", "T_env", "the exchange is evaluated at zero temperature");
  testbody::TwoBodyConfig tb{material_from(c, "material"),
                             positive(need(c, "body", "R", Quantity::Length), "body", "R"),
                             material_from(c, "test_material"), positive(need(c, s, "a", Quantity::Length), s, "a"),
                             0.0};
  const double d0 = need(c, s, "d_min", Quantity::Length);
  if (!(d0 > tb.R + tb.a)) bad(s, "d_min", "bodies overlap: must exceed R + a");
  const double d1 = get(c, s, "d_max", Quantity::Length).value_or(d0);
  if (!(d1 >= d0)) bad(s, "d_max", "must be >= d_min");
  const auto n = count(c, s, "points", d1 > d0 ? 10 : 1, 1);
  if (n == 1 && d1 > d0) bad(s, "points", "need at least 2 points for a range");
  std::vector<double> ds(n);
  for (long long i = 0; i < n; ++i) ds[i] = n == 1 ? d0 : d0 * std::pow(d1 / d0, double(i) / double(n - 1));
  auto rows = testbody::sweep(tb, st.Omega, ds, dim);

  std::optional<double> slope_t, slope_f;
  if (n >= 2) {
    std::vector<double> t, f;
    for (const auto& r : rows) {
      t.push_back(r.torque);
      f.push_back(r.force);
    }
    try {
      slope_t = testbody::loglog_slope(ds, t);
      if (dim == testbody::Dimension::Three) slope_f = testbody::loglog_slope(ds, f);
    } catch (const DomainError&) {
      // Zero transfer (a lossless body): no exponent to report.
    }
  }
  const double force_scale = c.u.to_si(Quantity::Energy, 1.0) / c.u.to_si(Quantity::Length, 1.0);
  bool close = false;
  for (auto& r : rows) {
    r.d = c.u.to_si(Quantity::Length, r.d);
    r.torque = c.u.to_si(Quantity::Torque, r.torque);
    r.force *= force_scale;
    close = close || r.close_warning;
  }
  auto h = header(c, {st.Omega * tb.R, std::nullopt});
  h["regime"]["close_separation"] = close;
  RunReport rep;
  if (pick(c, Format::Csv) == Format::Csv) {
    std::ostringstream os;
    os << csv_header(h) << "# torque_slope=" << opt_json(slope_t).dump() << "\n# force_slope=" << opt_json(slope_f).dump()
       << '\n';
    testbody::write_sweep_csv(os, rows);
    rep.files.push_back(write_file(c, "twobody.csv", os.str()));
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) arr.push_back(ordered_json::parse(testbody::to_json(r, dim)));
    ordered_json j;
    j["header"] = h;
    j["rows"] = std::move(arr);
    j["torque_slope"] = opt_json(slope_t);
    j["force_slope"] = opt_json(slope_f);
    rep.files.push_back(write_file(c, "twobody.json", j.dump(2) + "\n"));
  }
  std::ostringstream os;
  os << "twobody: " << rows.size() << " separations";
  if (slope_t) os << ", torque exponent " << *slope_t;
  if (slope_f) os << ", force exponent " << *slope_f;
  os << '\n';
  if (close) os << "warning: separations below 3 max(R, a); higher reflections are not negligible\n";
  rep.summary = os.str();
  return rep;
}

}  // namespace

RunReport run(const std::string& subcommand, const config::Config& cfg, const RunOptions& opt,
              const std::filesystem::path& base_dir) {
  const Context c{cfg, opt, base_dir, unit_system(cfg), subcommand};
  if (subcommand == "spectrum") return do_spectrum(c);
  if (subcommand == "power") return do_power(c);
  if (subcommand == "stats") return do_stats(c);
  if (subcommand == "rotor") return do_rotor(c);
  if (subcommand == "twobody") return do_twobody(c);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radiation, photon statistics and spin-down noise of rotating bodies", "spinrad"};
  app.set_version_flag("--version", std::string(SPINRAD_VERSION));
  std::string config_path, out_dir = ".", format;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--config", config_path, "Scenario file");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  app.fallthrough();
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"spectrum", "Per-mode photon flux density on a frequency grid"},
      {"power", "Radiated power, torque and heat"},
      {"stats", "Photon counting statistics and entropy"},
      {"rotor", "Langevin ensemble and stationary Fokker-Planck density"},
      {"twobody", "Torque and force on a static test body over a separation sweep"},
  };
  for (const auto& [name, help] : subs) app.add_subcommand(name, help);
  auto* verify = app.add_subcommand("verify", "Run the closed-form acceptance checks");
  std::vector<int> criteria;
  verify->add_option("criteria", criteria, "Criterion numbers (default: all)")->check(CLI::Range(1, verify::kCriterionCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    if (sub == "verify") {
      const auto results = verify::run(criteria, {seed, threads});
      int passed = 0;
      for (const auto& r : results) {
        out << verify::format_line(r) << '\n';
        passed += r.pass ? 1 : 0;
      }
      out << passed << " of " << results.size() << " criteria passed\n";
      return passed == static_cast<int>(results.size()) ? kExitOk : kExitFailure;
    }
    if (config_path.empty()) {
      err << "error: " << sub << " needs --config <path>\n"
          << "usage: spinrad " << sub << " --config <path> [--out dir] [--format csv|json] [--seed n] [--threads n]\n";
      return kExitConfig;
    }
    const auto cfg = config::Config::load(config_path);
    if (cfg.empty()) {
      err << "error: configuration '" << config_path << "' is empty\n";
      return kExitConfig;
    }
    RunOptions opt;
    opt.out_dir = out_dir;
    opt.format = format.empty() ? Format::Auto : format == "csv" ? Format::Csv : Format::Json;
    opt.seed = seed;
    opt.threads = threads;
    const auto rep = run(sub, cfg, opt, fs::path(config_path).parent_path());
    out << rep.summary;
    for (const auto& f : rep.files) out << "wrote " << f.string() << '\n';
    return rep.converged ? kExitOk : kExitNumeric;
  } catch (const ConvergenceError& e) {
    err << "error: numerical non-convergence in " << sub << ": " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << sub << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    err << "error: " << sub << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace spinrad::cli
