#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcsynth/error.hpp"

namespace plcsynth::detail {

struct Entry {
  std::string value;
  std::size_t line;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Key/value pairs; consumers take() what they understand and finish() rejects the rest.
class Entries {
 public:
  explicit Entries(std::string_view text) {
    std::size_t line = 0, pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view ln = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line;
      if (auto hash = ln.find('#'); hash != std::string_view::npos) ln = ln.substr(0, hash);
      ln = trim(ln);
      if (ln.empty()) continue;
      auto eq = ln.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key = value", line);
      std::string key(trim(ln.substr(0, eq)));
      std::string value(trim(ln.substr(eq + 1)));
      if (key.empty()) throw ParseError("empty key", line);
      if (value.empty()) throw ParseError("empty value for '" + key + "'", line);
      if (!map_.emplace(key, Entry{value, line}).second) {
        throw ParseError("duplicate key '" + key + "'", line);
      }
    }
  }

  bool has(const std::string& key) const { return map_.count(key) != 0; }

  bool has_prefix(const std::string& prefix) const {
    auto it = map_.lower_bound(prefix);
    return it != map_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
  }

  std::optional<Entry> take(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    Entry e = it->second;
    map_.erase(it);
    return e;
  }

  Entry require(const std::string& key) {
    auto e = take(key);
    if (!e) throw ParseError("missing required key '" + key + "'");
    return *e;
  }

  double number(const std::string& key) { return to_number(require(key)); }

  void number_if(const std::string& key, double& out) {
    if (auto e = take(key)) out = to_number(*e);
  }

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (auto it = map_.lower_bound(prefix);
         it != map_.end() && it->first.compare(0, prefix.size(), prefix) == 0; ++it) {
      out.push_back(it->first);
    }
    return out;
  }

  void finish() const {
    if (map_.empty()) return;
    // Report the earliest offending line.
    auto first = map_.begin();
    for (auto it = map_.begin(); it != map_.end(); ++it) {
      if (it->second.line < first->second.line) first = it;
    }
    throw ParseError("unknown key '" + first->first + "'", first->second.line);
  }

  static double to_number(const Entry& e) { return to_number(e.value, e.line); }

  static double to_number(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ParseError("bad number '" + std::string(s) + "'", line);
    }
    return v;
  }

 private:
  std::map<std::string, Entry> map_;
};

}  // namespace plcsynth::detail
