#pragma once

// Minimal reader for the comma-separated inputs (no quoting). Lines starting
// with '#' are comments; they are collected so callers can look for
// directives. Blank lines are skipped.

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace spinrad::csv {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the first non-comment line and requires it to equal `names`.
  void expect_header(const std::vector<std::string>& names);

  /// Next data row split on commas with surrounding whitespace trimmed.
  std::optional<std::vector<std::string>> next();

  /// 1-based line number of the last line returned.
  int line() const { return line_; }

  const std::vector<std::string>& comments() const { return comments_; }

 private:
  std::optional<std::string> next_line();

  std::istream& in_;
  int line_ = 0;
  std::vector<std::string> comments_;
};

std::vector<std::string> split(const std::string& s, char sep = ',');
std::string trim(const std::string& s);

/// Strict numeric conversion; the whole field must parse. Throws ParseError.
double to_double(const std::string& field, int line);
long long to_int(const std::string& field, int line);

}  // namespace spinrad::csv
