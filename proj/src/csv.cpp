#include "spinrad/csv.hpp"

#include <charconv>
#include <cmath>

#include "spinrad/errors.hpp"

namespace spinrad::csv {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<std::string> Reader::next_line() {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    const std::string t = trim(raw);
    if (t.empty()) continue;
    if (t.front() == '#') {
      comments_.push_back(trim(t.substr(1)));
      continue;
    }
    return t;
  }
  return std::nullopt;
}

void Reader::expect_header(const std::vector<std::string>& names) {
  auto line = next_line();
  if (!line) throw ParseError("missing header", line_);
  const auto got = split(*line);
  if (got != names) {
    std::string want;
    for (std::size_t i = 0; i < names.size(); ++i) want += (i ? "," : "") + names[i];
    throw ParseError("header must be \"" + want + "\"", line_);
  }
}

std::optional<std::vector<std::string>> Reader::next() {
  auto line = next_line();
  if (!line) return std::nullopt;
  return split(*line);
}

double to_double(const std::string& field, int line) {
  if (field.empty()) throw ParseError("empty numeric field", line);
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("not a finite number: \"" + field + "\"", line);
  }
  return v;
}

long long to_int(const std::string& field, int line) {
  long long v = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("not an integer: \"" + field + "\"", line);
  }
  return v;
}

}  // namespace spinrad::csv
