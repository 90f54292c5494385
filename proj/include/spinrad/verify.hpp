#pragma once

// Closed-form acceptance checks of the whole library, shared by the
// acceptance test binary and `spinrad verify`.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace spinrad::verify {

inline constexpr int kCriterionCount = 12;

struct Options {
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string measured;  // what was compared, with the numbers
  double seconds = 0.0;
};

/// Runs criterion id in [1, 12]. RangeError otherwise.
CriterionResult run_criterion(int id, const Options& opt = {});

/// Runs the listed criteria (all when empty) in order.
std::vector<CriterionResult> run(const std::vector<int>& ids = {}, const Options& opt = {});

/// "PASS  3  title: measured (0.12 s)"
std::string format_line(const CriterionResult& r);

}  // namespace spinrad::verify
