#include "spinrad/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "spinrad/csv.hpp"
#include "spinrad/errors.hpp"

namespace spinrad::config {

namespace {

std::vector<KeySpec> material_keys(const std::string& s) {
  return {
      {s, "model", Type::Choice, {"vacuum", "drude", "lorentz", "constant", "table"}, "dielectric model"},
      {s, "sigma", Type::Real, {}, "Gaussian conductivity (1/s in SI)"},
      {s, "sigma_si", Type::Real, {}, "SI conductivity in S/m (SI units only)"},
      {s, "eps_inf", Type::Real, {}, "Lorentz background permittivity"},
      {s, "omega_p", Type::Real, {}, "Lorentz plasma frequency"},
      {s, "omega_0", Type::Real, {}, "Lorentz resonance frequency"},
      {s, "gamma", Type::Real, {}, "Lorentz damping rate"},
      {s, "eps_re", Type::Real, {}, "constant permittivity, real part"},
      {s, "eps_im", Type::Real, {}, "constant permittivity, imaginary part"},
      {s, "file", Type::Text, {}, "CSV omega,re,im"},
  };
}

Schema build_schema() {
  Schema s = {
      {"scenario", "geometry", Type::Choice, {"disk", "sphere", "cylinder", "table"}, "rotating body"},
      {"scenario", "units", Type::Choice, {"natural", "SI"}, "unit system of every input and output"},
      {"scenario", "time_anchor", Type::Real, {}, "SI seconds per natural time unit"},
      {"scenario", "length_anchor", Type::Real, {}, "SI metres per natural length unit"},
      {"body", "R", Type::Real, {}, "radius"},
      {"body", "L", Type::Real, {}, "cylinder length"},
      {"body", "flux_rule", Type::Choice, {"leading", "exact"}, "sphere/cylinder flux truncation"},
      {"body", "small_velocity", Type::Boolean, {}, "disk: thin small-velocity amplitude"},
      {"body", "table", Type::Text, {}, "CSV omega,m,extra,pol,ReS,ImS"},
      {"state", "Omega", Type::Real, {}, "rotation rate"},
      {"state", "T_object", Type::Real, {}, "body temperature"},
      {"state", "T_env", Type::Real, {}, "environment temperature"},
      {"numerics", "rel_tol", Type::Real, {}, "quadrature relative tolerance"},
      {"numerics", "abs_tol", Type::Real, {}, "quadrature absolute tolerance"},
      {"numerics", "max_segments", Type::Integer, {}, "quadrature panel limit"},
      {"numerics", "m_max", Type::Integer, {}, "fixed angular momentum cutoff"},
      {"numerics", "tail_rel_tol", Type::Real, {}, "m-sum tail tolerance"},
      {"numerics", "m_cap", Type::Integer, {}, "largest automatic m cutoff"},
      {"numerics", "thermal_cutoff", Type::Real, {}, "thermal integrals stop this many T above Omega m"},
      {"spectrum", "omega_min", Type::Real, {}, "first frequency"},
      {"spectrum", "omega_max", Type::Real, {}, "last frequency"},
      {"spectrum", "points", Type::Integer, {}, "number of frequencies"},
      {"spectrum", "m_max", Type::Integer, {}, "largest |m| listed"},
      {"stats", "occupation", Type::Real, {}, "mean occupation for the counting distribution"},
      {"stats", "n_max", Type::Integer, {}, "largest photon number listed"},
      {"stats", "p_max", Type::Integer, {}, "highest factorial cumulant"},
      {"rotor", "I", Type::Real, {}, "moment of inertia"},
      {"rotor", "law", Type::Choice, {"power", "radiation"}, "torque law"},
      {"rotor", "c", Type::Real, {}, "Mbar = c Omega^k"},
      {"rotor", "k", Type::Real, {}, "drift exponent"},
      {"rotor", "c2", Type::Real, {}, "Mbar2 = c2 Omega^k2"},
      {"rotor", "k2", Type::Real, {}, "diffusion exponent"},
      {"rotor", "dt", Type::Real, {}, "time step"},
      {"rotor", "n_traj", Type::Integer, {}, "ensemble size"},
      {"rotor", "n_steps", Type::Integer, {}, "number of steps"},
      {"rotor", "record_every", Type::Integer, {}, "trajectory sampling interval in steps (0: none)"},
      {"rotor", "omega_init", Type::Real, {}, "initial rotation rate"},
      {"rotor", "driven", Type::Boolean, {}, "hold Omega with a constant external torque"},
      {"rotor", "diffusion_scale", Type::Real, {}, "diffusion coefficient of the stationary density"},
      {"rotor", "grid_min", Type::Real, {}, "torque law grid, lowest Omega"},
      {"rotor", "grid_max", Type::Real, {}, "torque law grid, highest Omega"},
      {"twobody", "dimension", Type::Integer, {}, "2 (disks) or 3 (spheres)"},
      {"twobody", "a", Type::Real, {}, "test body radius"},
      {"twobody", "d_min", Type::Real, {}, "smallest separation"},
      {"twobody", "d_max", Type::Real, {}, "largest separation"},
      {"twobody", "points", Type::Integer, {}, "separations, log spaced"},
  };
  for (const auto& k : material_keys("material")) s.push_back(k);
  for (const auto& k : material_keys("test_material")) s.push_back(k);
  return s;
}

std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string field(const std::string& s, const std::string& k) { return "[" + s + "] " + k; }

std::string fail_at(int line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

Value parse_value(const KeySpec& spec, const std::string& raw, int line) {
  const std::string name = field(spec.section, spec.key);
  switch (spec.type) {
    case Type::Real:
      try {
        return csv::to_double(raw, line);
      } catch (const ParseError&) {
        throw ConfigError(fail_at(line, name + ": expected a real number, got '" + raw + "'"));
      }
    case Type::Integer:
      try {
        return csv::to_int(raw, line);
      } catch (const ParseError&) {
        throw ConfigError(fail_at(line, name + ": expected an integer, got '" + raw + "'"));
      }
    case Type::Boolean:
      if (raw == "true" || raw == "1" || raw == "yes") return true;
      if (raw == "false" || raw == "0" || raw == "no") return false;
      throw ConfigError(fail_at(line, name + ": expected true or false, got '" + raw + "'"));
    case Type::Text:
      if (raw.empty()) throw ConfigError(fail_at(line, name + ": empty value"));
      return raw;
    case Type::Choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), raw) == spec.choices.end()) {
        std::string list;
        for (const auto& c : spec.choices) list += (list.empty() ? "" : "|") + c;
        throw ConfigError(fail_at(line, name + ": expected one of " + list + ", got '" + raw + "'"));
      }
      return raw;
  }
  return raw;
}

std::string format_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

}  // namespace

const Schema& scenario_schema() {
  static const Schema s = build_schema();
  return s;
}

Config Config::parse(std::istream& in, const Schema& schema) {
  std::set<std::string> sections;
  for (const auto& k : schema) sections.insert(k.section);

  Config cfg;
  std::string line, section;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string body = csv::trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(fail_at(n, "unterminated section header"));
      section = csv::trim(body.substr(1, body.size() - 2));
      if (!sections.count(section)) throw ConfigError(fail_at(n, "unknown section [" + section + "]"));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fail_at(n, "expected 'key = value'"));
    const std::string key = csv::trim(body.substr(0, eq));
    const std::string raw = csv::trim(body.substr(eq + 1));
    if (section.empty()) throw ConfigError(fail_at(n, "key '" + key + "' outside any section"));
    const auto spec = std::find_if(schema.begin(), schema.end(),
                                   [&](const KeySpec& k) { return k.section == section && k.key == key; });
    if (spec == schema.end()) throw ConfigError(fail_at(n, "unknown key " + field(section, key)));
    if (!cfg.values_.emplace(std::make_pair(section, key), parse_value(*spec, raw, n)).second) {
      throw ConfigError(fail_at(n, "duplicate key " + field(section, key)));
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse(in, schema);
}

const Value* Config::find(const std::string& section, const std::string& key) const {
  const auto it = values_.find({section, key});
  return it == values_.end() ? nullptr : &it->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::optional<double> Config::real(const std::string& section, const std::string& key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  return std::get<double>(*v);
}

std::optional<long long> Config::integer(const std::string& section, const std::string& key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  return std::get<long long>(*v);
}

std::optional<bool> Config::boolean(const std::string& section, const std::string& key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  return std::get<bool>(*v);
}

std::optional<std::string> Config::text(const std::string& section, const std::string& key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  return std::get<std::string>(*v);
}

double Config::require_real(const std::string& section, const std::string& key) const {
  const auto v = real(section, key);
  if (!v) throw ConfigError(field(section, key) + ": required");
  return *v;
}

std::string Config::require_text(const std::string& section, const std::string& key) const {
  const auto v = text(section, key);
  if (!v) throw ConfigError(field(section, key) + ": required");
  return *v;
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k.first << '.' << k.second << '=' << format_value(v) << '\n';
  return os.str();
}

std::uint64_t Config::hash() const { return fnv1a64(canonical()); }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace spinrad::config
