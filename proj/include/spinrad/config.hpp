#pragma once

// Scenario files: INI-style sections of typed "key = value" lines.
//
//   # comment
//   [body]
//   R = 0.1        ; trailing comments start with '#' or ';' after whitespace
//
// Every section and key must appear in the schema; values are parsed to the
// declared type at load time so errors carry the line number.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace spinrad::config {

enum class Type { Real, Integer, Boolean, Text, Choice };

struct KeySpec {
  std::string section;
  std::string key;
  Type type;
  std::vector<std::string> choices;  // Choice only
  std::string help;
};

using Schema = std::vector<KeySpec>;

/// The keys understood by the command-line front-end.
const Schema& scenario_schema();

using Value = std::variant<double, long long, bool, std::string>;

class Config {
 public:
  static Config parse(std::istream& in, const Schema& schema = scenario_schema());
  static Config load(const std::filesystem::path& path, const Schema& schema = scenario_schema());

  bool empty() const { return values_.empty(); }
  bool has(const std::string& section, const std::string& key) const;

  std::optional<double> real(const std::string& section, const std::string& key) const;
  std::optional<long long> integer(const std::string& section, const std::string& key) const;
  std::optional<bool> boolean(const std::string& section, const std::string& key) const;
  std::optional<std::string> text(const std::string& section, const std::string& key) const;

  /// ConfigError naming [section] key when absent.
  double require_real(const std::string& section, const std::string& key) const;
  std::string require_text(const std::string& section, const std::string& key) const;

  /// "section.key=value" lines in sorted order with normalized values.
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;

 private:
  const Value* find(const std::string& section, const std::string& key) const;
  std::map<std::pair<std::string, std::string>, Value> values_;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace spinrad::config
