#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "spinrad/cli.hpp"
#include "spinrad/config.hpp"
#include "spinrad/errors.hpp"

namespace fs = std::filesystem;
using spinrad::ConfigError;
using spinrad::config::Config;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& tag) {
    dir = fs::temp_directory_path() / ("spinrad_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "spinrad");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = spinrad::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kSphere = R"(
[scenario]
geometry = sphere
[body]
R = 0.1
[material]
model = drude
sigma = 1000
[state]
Omega = 1
)";

const char* kRotor = R"(
[state]
Omega = 1
[rotor]
law = power
I = 1000
c = 200
k = 5
c2 = 200
k2 = 5
dt = 0.01
n_traj = 200
n_steps = 300
record_every = 50
driven = true
)";

}  // namespace

TEST_CASE("config: typed values, comments and sections") {
  const auto c = parse(R"(
# leading comment
[body]
R = 0.25        # trailing
small_velocity = yes ; other style
[rotor]
n_steps = 40
law = power
[material]
file = data/eps#1.csv
)");
  CHECK(*c.real("body", "R") == 0.25);
  CHECK(*c.boolean("body", "small_velocity"));
  CHECK(*c.integer("rotor", "n_steps") == 40);
  CHECK(*c.text("rotor", "law") == "power");
  CHECK(*c.text("material", "file") == "data/eps#1.csv");
  CHECK_FALSE(c.has("body", "L"));
  CHECK_THROWS_AS(c.require_real("body", "L"), ConfigError);
}

TEST_CASE("config: strict rejection with line and field") {
  CHECK(error_of("[body]\nradius = 1\n") == "line 2: unknown key [body] radius");
  CHECK(error_of("[bodies]\n") == "line 1: unknown section [bodies]");
  CHECK(error_of("R = 1\n") == "line 1: key 'R' outside any section");
  CHECK(error_of("[body]\nR = 1\nR = 2\n") == "line 3: duplicate key [body] R");
  CHECK(error_of("[body]\nR = one\n").find("[body] R: expected a real number") != std::string::npos);
  CHECK(error_of("[rotor]\nn_steps = 1.5\n").find("[rotor] n_steps: expected an integer") != std::string::npos);
  CHECK(error_of("[rotor]\nlaw = linear\n").find("expected one of power|radiation") != std::string::npos);
  CHECK(error_of("[body]\nsmall_velocity = maybe\n").find("expected true or false") != std::string::npos);
  CHECK(error_of("[body\n").find("unterminated") != std::string::npos);
  CHECK(error_of("[body]\nR 1\n").find("expected 'key = value'") != std::string::npos);
  CHECK(error_of("[body]\nR = nan\n").find("expected a real number") != std::string::npos);
}

TEST_CASE("config: canonical form and hash") {
  const auto a = parse("[body]\nR = 1e3\nL = 2\n[state]\nOmega = 1\n");
  const auto b = parse("[state]\nOmega=1.0\n[body]\nL = 2.0   # same\nR = 1000\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != parse("[body]\nR = 1001\nL = 2\n[state]\nOmega = 1\n").hash());
  CHECK(spinrad::config::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(spinrad::config::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(spinrad::config::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("cli: usage and exit codes") {
  Scratch s("exit");
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"power"}).code == 2);
  CHECK(run_cli({"power", "--config", s.write("empty.ini", "# nothing\n").string()}).code == 2);
  CHECK(run_cli({"power", "--config", (s.dir / "missing.ini").string()}).code == 2);
  CHECK(run_cli({"power", "--format", "xml", "--config", s.write("a.ini", kSphere).string()}).code == 2);

  const auto unknown = run_cli({"power", "--config", s.write("u.ini", "[body]\nradius = 1\n").string()});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("[body] radius") != std::string::npos);

  const auto unused = run_cli(
      {"power", "--config", s.write("x.ini", std::string(kSphere) + "eps_re = 2\n").string(), "--out", s.dir.string()});
  CHECK(unused.code == 2);
  CHECK(unused.err.find("[state] eps_re") != std::string::npos);

  const auto wrong_model = run_cli({"power", "--out", s.dir.string(), "--config",
                                    s.write("m.ini", "[scenario]\ngeometry = sphere\n[body]\nR = 0.1\n"
                                                     "[material]\nmodel = drude\nsigma = 1\neps_re = 2\n")
                                        .string()});
  CHECK(wrong_model.code == 2);
  CHECK(wrong_model.err.find("[material] eps_re: not used by model = drude") != std::string::npos);

  const auto diverge = run_cli({"power", "--out", s.dir.string(), "--config",
                                s.write("c.ini", "[scenario]\ngeometry = disk\n[body]\nR = 2\n[material]\n"
                                                 "model = drude\nsigma = 1\n[state]\nOmega = 1\n"
                                                 "[numerics]\nm_cap = 2\ntail_rel_tol = 1e-12\n")
                                    .string()});
  CHECK(diverge.code == 3);
  CHECK(diverge.err.find("partial-wave sum") != std::string::npos);

  const auto hot_env = run_cli({"stats", "--out", s.dir.string(), "--config",
                                s.write("h.ini", std::string(kSphere) + "T_env = 0.1\n").string()});
  CHECK(hot_env.code == 2);

  const auto overlap = run_cli({"twobody", "--out", s.dir.string(), "--config",
                                s.write("o.ini", std::string(kSphere) +
                                                     "[test_material]\nmodel = drude\nsigma = 1\n"
                                                     "[twobody]\ndimension = 3\na = 0.1\nd_min = 0.15\n")
                                    .string()});
  CHECK(overlap.code == 2);
  CHECK(overlap.err.find("[twobody] d_min") != std::string::npos);
}

TEST_CASE("cli: power output carries the header block") {
  Scratch s("power");
  const auto cfg = s.write("s.ini", kSphere);
  const auto r = run_cli({"power", "--config", cfg.string(), "--out", s.dir.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(s.dir / "power.json"));
  CHECK(j["header"]["program"] == "spinrad");
  CHECK(j["header"]["version"] == SPINRAD_VERSION);
  CHECK(j["header"]["config_hash"] == spinrad::config::hex64(Config::load(cfg).hash()));
  CHECK(j["header"]["regime"]["omega_R"].get<double>() == doctest::Approx(0.1));
  CHECK(j["header"]["regime"]["adiabaticity"].is_null());
  const double P0 = std::pow(0.1, 3) / (30.0 * std::numbers::pi * std::numbers::pi * 1000.0);
  CHECK(j["result"]["P"].get<double>() == doctest::Approx(P0).epsilon(1e-3));

  REQUIRE(run_cli({"power", "--config", cfg.string(), "--out", s.dir.string(), "--format", "csv"}).code == 0);
  const std::string csv = slurp(s.dir / "power.csv");
  CHECK(csv.rfind("# program=spinrad\n", 0) == 0);
  CHECK(csv.find("# regime.omega_R=0.1") != std::string::npos);
  CHECK(csv.find("quantity,value\nphoton_rate,") != std::string::npos);
}

TEST_CASE("cli: SI input reproduces the hand-converted sphere power in watts") {
  Scratch s("si");
  const auto cfg = s.write("si.ini", R"(
[scenario]
geometry = sphere
units = SI
[body]
R = 1e-6
[material]
model = drude
sigma_si = 5.8e7
[state]
Omega = 1e9
)");
  REQUIRE(run_cli({"power", "--config", cfg.string(), "--out", s.dir.string()}).code == 0);
  const auto j = nlohmann::json::parse(slurp(s.dir / "power.json"));
  // hbar R^3 Omega^6 / (30 pi^2 c^3 sigma) and hbar R^3 Omega^5 / (20 pi^2 c^3 sigma),
  // sigma = sigma_SI / (4 pi eps0) in 1/s.
  const double pi = std::numbers::pi;
  const double hbar = 1.054571817e-34, c = 299792458.0, eps0 = 8.8541878128e-12;
  const double sigma = 5.8e7 / (4.0 * pi * eps0);
  const double P = hbar * 1e-18 * std::pow(1e9, 6) / (30.0 * pi * pi * c * c * c * sigma);
  const double M = hbar * 1e-18 * std::pow(1e9, 5) / (20.0 * pi * pi * c * c * c * sigma);
  CHECK(j["header"]["units"] == "SI");
  CHECK(j["result"]["P"].get<double>() == doctest::Approx(P).epsilon(1e-6));
  CHECK(j["result"]["M"].get<double>() == doctest::Approx(M).epsilon(1e-6));

  // Same body in natural units with R as the length unit.
  const double t0 = 1e-6 / c;
  const auto nat = s.write("nat.ini", "[scenario]\ngeometry = sphere\n[body]\nR = 1\n[material]\nmodel = drude\n"
                                      "sigma = " + std::to_string(sigma * t0) + "\n[state]\nOmega = " +
                                      std::to_string(1e9 * t0) + "\n");
  fs::create_directories(s.dir / "nat");
  REQUIRE(run_cli({"power", "--config", nat.string(), "--out", (s.dir / "nat").string()}).code == 0);
  const auto jn = nlohmann::json::parse(slurp(s.dir / "nat" / "power.json"));
  CHECK(jn["result"]["P"].get<double>() * hbar / (t0 * t0) == doctest::Approx(P).epsilon(1e-5));
}

TEST_CASE("cli: identical config and seed give byte-identical files") {
  Scratch s("det");
  const auto cfg = s.write("r.ini", kRotor);
  auto run_into = [&](const std::string& sub, const std::vector<std::string>& extra) {
    const fs::path out = s.dir / sub;
    std::vector<std::string> args = {"rotor", "--config", cfg.string(), "--out", out.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(run_cli(args).code == 0);
    return out;
  };
  const auto a = run_into("a", {"--seed", "7"});
  const auto b = run_into("b", {"--seed", "7", "--threads", "3"});
  const auto d = run_into("d", {"--seed", "8"});
  for (const char* f : {"trajectories.csv", "density.csv", "rotor.json"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  CHECK(slurp(a / "trajectories.csv") != slurp(d / "trajectories.csv"));
  const auto j = nlohmann::json::parse(slurp(a / "rotor.json"));
  CHECK(j["header"]["seed"] == 7);
  CHECK(j["header"]["regime"]["adiabaticity"].get<double>() > 0.0);
  CHECK(j["summary"]["IDeltaOmega_analytic"].get<double>() == doctest::Approx(std::sqrt(1000.0 / 5.0)));

  const auto e = run_into("e", {"--seed", "7", "--format", "json"});
  const auto je = nlohmann::json::parse(slurp(e / "rotor.json"));
  CHECK(je["trajectories"].size() == 200 * 7);  // t = 0 and every 50 steps
  CHECK(je["density"]["omega"].size() == je["density"]["pdf"].size());
}

TEST_CASE("cli: spectrum, stats and twobody artifacts") {
  Scratch s("misc");
  const auto sph = s.write("s.ini", std::string(kSphere) + "[spectrum]\nomega_min = 0.1\nomega_max = 1.5\npoints = 8\n");
  REQUIRE(run_cli({"spectrum", "--config", sph.string(), "--out", s.dir.string()}).code == 0);
  const std::string spec = slurp(s.dir / "spectrum.csv");
  CHECK(spec.find("omega,m,extra,pol,N,dP_domega\n") != std::string::npos);
  REQUIRE(run_cli({"spectrum", "--config", sph.string(), "--out", s.dir.string(), "--format", "json"}).code == 0);
  CHECK(nlohmann::json::parse(slurp(s.dir / "spectrum.json"))["spectrum"].size() == 8 * 3);

  const auto warm = s.write("w.ini", R"(
[scenario]
geometry = disk
[body]
R = 0.5
[material]
model = drude
sigma = 1
[state]
Omega = 1
T_object = 0.2
[stats]
occupation = 1.0
n_max = 20
)");
  REQUIRE(run_cli({"stats", "--config", warm.string(), "--out", s.dir.string()}).code == 0);
  const auto st = nlohmann::json::parse(slurp(s.dir / "stats.json"));
  CHECK(st["result"]["combinedRate"].get<double>() >= 0.0);
  CHECK(st["result"]["modeStatistics"]["variance"].get<double>() == doctest::Approx(2.0));
  CHECK(slurp(s.dir / "distribution.csv").find("n,P\n0,0.5") != std::string::npos);

  const auto tb = s.write("t.ini", R"(
[scenario]
geometry = sphere
[body]
R = 0.2
[material]
model = drude
sigma = 1
[test_material]
model = drude
sigma = 1
[state]
Omega = 1
[twobody]
dimension = 3
a = 0.2
d_min = 1
d_max = 10
points = 6
)");
  const auto r = run_cli({"twobody", "--config", tb.string(), "--out", s.dir.string(), "--format", "json"});
  REQUIRE(r.code == 0);
  const auto tj = nlohmann::json::parse(slurp(s.dir / "twobody.json"));
  CHECK(tj["torque_slope"].get<double>() == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(tj["force_slope"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(tj["rows"].size() == 6);
  CHECK(tj["header"]["regime"]["close_separation"] == false);
}
