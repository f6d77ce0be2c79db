#include "helio/kvconfig.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "helio/error.hpp"
#include "helio/text.hpp"

namespace helio {

KvConfig KvConfig::parse(std::istream& in) {
  KvConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      raise(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key(trim(view.substr(0, eq)));
    std::string value(trim(view.substr(eq + 1)));
    if (key.empty()) raise(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": empty key");
    if (cfg.has(key)) raise(ErrorCode::BadConfig, "duplicate key '" + key + "'");
    cfg.entries_.emplace_back(std::move(key), std::move(value));
  }
  return cfg;
}

KvConfig KvConfig::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

KvConfig KvConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::BadConfig, "cannot open config file '" + path + "'");
  return parse(in);
}

bool KvConfig::has(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return true;
  }
  return false;
}

std::optional<std::string> KvConfig::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) {
      consumed_.insert(k);
      return v;
    }
  }
  return std::nullopt;
}

std::string KvConfig::require(std::string_view key) const {
  auto v = get(key);
  if (!v) raise(ErrorCode::BadConfig, "missing key '" + std::string(key) + "'");
  return *v;
}

double KvConfig::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return parse_double(*v);
  } catch (const Error&) {
    raise(ErrorCode::BadConfig, "key '" + std::string(key) + "' is not a number: '" + *v + "'");
  }
}

long long KvConfig::get_int(std::string_view key, long long fallback) const {
  auto v = get(key);
  return v ? parse_int(*v) : fallback;
}

bool KvConfig::get_bool(std::string_view key, bool fallback) const {
  auto v = get(key);
  return v ? parse_bool(*v) : fallback;
}

void KvConfig::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

std::vector<std::string> KvConfig::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (!consumed_.contains(k)) out.push_back(k);
  }
  return out;
}

void KvConfig::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

std::string KvConfig::to_string() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  raise(ErrorCode::BadConfig, "not a boolean: '" + std::string(text) + "'");
}

}  // namespace helio
