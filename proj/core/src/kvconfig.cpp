#include "ncemb/kvconfig.hpp"

#include "ncemb/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ncemb {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

} // namespace

KvConfig KvConfig::parse(std::istream& in) {
  KvConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value', got \"" + line + "\"", line_no);
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    config.entries_[key] = value;
  }
  return config;
}

KvConfig KvConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open config file: " + path);
  return parse(in);
}

bool KvConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

const std::string& KvConfig::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string KvConfig::get_or(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

void KvConfig::set(const std::string& key, std::string value) {
  entries_[key] = std::move(value);
}

double KvConfig::as_double(const std::string& key) const {
  const std::string& raw = get(key);
  try {
    std::size_t used = 0;
    double value = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + raw);
  }
}

long KvConfig::as_int(const std::string& key) const {
  const std::string& raw = get(key);
  try {
    std::size_t used = 0;
    long value = std::stol(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: " + raw);
  }
}

bool KvConfig::as_bool(const std::string& key) const {
  std::string raw = get(key);
  std::transform(raw.begin(), raw.end(), raw.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (raw == "1" || raw == "true" || raw == "yes" || raw == "on") return true;
  if (raw == "0" || raw == "false" || raw == "no" || raw == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + raw);
}

void KvConfig::reject_unknown_keys(const std::set<std::string>& known) const {
  for (const auto& [key, _] : entries_) {
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);
  }
}

std::string KvConfig::resolved_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : entries_) {
    out << key << " = " << value << "\n";
  }
  return out.str();
}

} // namespace ncemb
