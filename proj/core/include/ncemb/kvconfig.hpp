#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>

namespace ncemb {

// Flat "key = value" document. '#' starts a comment, blank lines are
// ignored, later assignments override earlier ones. Used for training
// configs; command-line flags override file values.
class KvConfig {
public:
  KvConfig() = default;

  static KvConfig parse(std::istream& in);
  static KvConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  void set(const std::string& key, std::string value);

  double as_double(const std::string& key) const;
  long as_int(const std::string& key) const;
  bool as_bool(const std::string& key) const;

  /// Throws ConfigError naming the first key not in `known`.
  void reject_unknown_keys(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Deterministic "key = value" dump, one per line, sorted by key.
  std::string resolved_text() const;

private:
  std::map<std::string, std::string> entries_;
};

} // namespace ncemb
