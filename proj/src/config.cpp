#include "mkin/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "mkin/io.hpp"

namespace mkin {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError("config: empty section name at line " + std::to_string(lineno));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    for (unsigned char c : key) {
      if (!std::isalnum(c) && c != '_' && c != '-') {
        throw ConfigError("config: malformed key '" + key + "' at line " +
                          std::to_string(lineno));
      }
    }
    cfg.kv_[section + "." + key] = val;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return kv_.count(lower(section) + "." + lower(key)) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  auto it = kv_.find(lower(section) + "." + lower(key));
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  auto it = kv_.find(lower(section) + "." + lower(key));
  if (it == kv_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + section + "." + key + ": '" +
                      it->second + "'");
  }
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const double v = get_double(section, key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config: expected integer for " + section + "." + key);
  return i;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  auto it = kv_.find(lower(section) + "." + lower(key));
  if (it == kv_.end()) return fallback;
  const std::string v = lower(it->second);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean for " + section + "." + key + ": '" + it->second + "'");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
  auto it = kv_.find(lower(section) + "." + lower(key));
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config: bad list entry for " + section + "." + key + ": '" + item + "'");
    }
  }
  return out;
}

std::string Config::require_string(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("config: missing required key " + section + "." + key);
  return get_string(section, key, "");
}

double Config::require_double(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("config: missing required key " + section + "." + key);
  return get_double(section, key, 0.0);
}

std::string Config::normalized() const {
  std::string out;
  for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t Config::hash(std::uint64_t seed) const {
  return fnv1a(normalized() + "|seed=" + std::to_string(seed));
}

}  // namespace mkin
