#include "kdvlab/config.hpp"

#include <cerrno>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kdvlab/util.hpp"

namespace kdvlab {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* type) {
  throw std::invalid_argument("config key '" + key + "': cannot parse '" +
                              value + "' as " + type);
}

}  // namespace

bool Config::has(const std::string& key) const { return values.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) {
  values[key] = value;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  errno = 0;
  char* end = nullptr;
  double parsed = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE) {
    bad_value(key, v, "a number");
  }
  return parsed;
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  errno = 0;
  char* end = nullptr;
  long parsed = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE ||
      parsed < INT_MIN || parsed > INT_MAX) {
    bad_value(key, v, "an integer");
  }
  return int(parsed);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (!v.empty() && v[0] == '-') bad_value(key, v, "an unsigned integer");
  errno = 0;
  char* end = nullptr;
  unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE) {
    bad_value(key, v, "an unsigned integer");
  }
  return std::uint64_t(parsed);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& kv : values) {
    out += kv.first;
    out += '=';
    out += kv.second;
    out += '\n';
  }
  return out;
}

std::uint64_t Config::hash() const { return fnv1a64(canonical()); }

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(
          str_printf("config line %d: expected key=value, got '%s'", line_no,
                     body.c_str()));
    }
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(str_printf("config line %d: empty key", line_no));
    }
    cfg.set(key, value);
  }
  return cfg;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_overrides(Config& config, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || trim(item.substr(0, eq)).empty()) {
      throw std::invalid_argument("override '" + item + "' is not key=value");
    }
    config.set(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
  }
}

std::string file_preamble(const std::string& run,
                          const Config& config,
                          const std::vector<std::pair<std::string, double>>& constants) {
  std::string out = "# run: " + run + "\n";
  out += str_printf("# config-hash: %016llx\n",
                    (unsigned long long)config.hash());
  for (const auto& kv : config.values) {
    out += "# config " + kv.first + "=" + kv.second + "\n";
  }
  for (const auto& named : constants) {
    out += str_printf("# const %s=%.17g\n", named.first.c_str(), named.second);
  }
  return out;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace kdvlab
