#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace biovolt {

/// Flat key tree of dotted-path settings. Loadable from a TOML-style file
/// ([section] headers prefix the keys that follow), overridable from
/// "key=value" strings and from BIOVOLT_* environment variables (double
/// underscore separates path components: BIOVOLT_ENV__DT -> env.dt).
class Config {
public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  void apply_override(const std::string& key_equals_value);
  void apply_env_overrides();

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;

  /// Sorted "key = value" lines; the digest input.
  std::string canonical() const;
  /// FNV-1a 64-bit over the canonical form.
  std::uint64_t digest() const;

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

} // namespace biovolt
