#pragma once
// Flat key=value run configuration shared by the command-line lab: files hold
// one `key = value` pair per line ('#' starts a comment), command-line
// overrides use the same syntax, and the canonical serialization (sorted
// keys, `key=value` lines) is hashed so every emitted artifact can name the
// exact configuration that produced it.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace kdvlab {

struct Config {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  // Typed getters fall back to `fallback` when the key is absent and throw
  // std::invalid_argument when a present value fails to parse fully.
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Sorted "key=value\n" lines; the configuration hash is FNV-1a of this.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// Parses config text; throws std::invalid_argument naming the line number of
// the first malformed line (no '=', or empty key).
Config parse_config_text(const std::string& text);

// Loads and parses a config file; throws std::runtime_error if unreadable.
Config load_config_file(const std::string& path);

// Applies "key=value" override strings in order (later wins).
void apply_overrides(Config& config, const std::vector<std::string>& overrides);

// Comment preamble stamped at the top of every emitted file: the run kind,
// the configuration hash, and the named tolerances/constants the run used,
// one '#' line each.  The caller appends its own CSV header row after it.
std::string file_preamble(const std::string& run,
                          const Config& config,
                          const std::vector<std::pair<std::string, double>>& constants);

// RFC-4180-style field escaping: wraps the field in double quotes (doubling
// embedded quotes) when it contains a comma, quote, or line break.
std::string csv_field(const std::string& raw);

}  // namespace kdvlab
