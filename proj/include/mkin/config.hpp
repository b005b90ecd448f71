#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Sectioned key = value configuration files:
//
//   [grid]
//   n_v = 32        # comment
//   l_v = 8.0
//
// One file fully determines a run; the normalized text participates in the
// config hash stamped on every output.

namespace mkin {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

  std::string require_string(const std::string& section, const std::string& key) const;
  double require_double(const std::string& section, const std::string& key) const;

  // canonical "section.key = value" lines, sorted; input to the config hash
  std::string normalized() const;
  std::uint64_t hash(std::uint64_t seed) const;

 private:
  std::map<std::string, std::string> kv_;  // "section.key" -> raw value
};

}  // namespace mkin
