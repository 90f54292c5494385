#pragma once

// Batch front-end: one scenario file in, result files out.
//
//   spinrad <subcommand> --config scenario.ini [--out dir] [--format csv|json]
//           [--seed n] [--threads n]
//
// Subcommands: spectrum, power, stats, rotor, twobody, verify. Every file
// written starts with a header block (program version, config hash, seed,
// unit system and regime flags): '#' lines in CSV, a "header" object in JSON.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "spinrad/config.hpp"

namespace spinrad::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

enum class Format { Auto, Csv, Json };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  Format format = Format::Auto;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::string summary;    // lines for stdout
  bool converged = true;  // false: results written, but a tolerance was missed
};

/// Runs spectrum, power, stats, rotor or twobody. Relative file names in the
/// config resolve against base_dir. Invalid input raises ConfigError naming
/// the field.
RunReport run(const std::string& subcommand, const config::Config& cfg, const RunOptions& opt,
              const std::filesystem::path& base_dir = ".");

/// Whole command line; returns the exit status (0 ok, 2 configuration error,
/// 3 numerical non-convergence, 1 anything else).
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spinrad::cli
