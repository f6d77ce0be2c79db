#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace helio {

/// Flat `key=value` document: one key per line, `#` starts a comment, order preserved.
class KvConfig {
 public:
  static KvConfig parse(std::istream& in);
  static KvConfig parse(std::string_view text);
  static KvConfig load(const std::string& path);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;

  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  /// Replaces an existing value in place or appends a new key.
  void set(std::string key, std::string value);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// Keys present in the document but never read through a getter.
  std::vector<std::string> unconsumed() const;

  void write(std::ostream& out) const;
  std::string to_string() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  mutable std::set<std::string, std::less<>> consumed_;
};

bool parse_bool(std::string_view text);

}  // namespace helio
