#include "config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

namespace mrcli {

namespace {

std::string
trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void
bad_line(std::size_t line, const std::string& what)
{
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

// strips a trailing comment that is not inside quotes
std::string
strip_comment(const std::string& s)
{
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"')
      quoted = !quoted;
    else if (s[i] == '#' && !quoted)
      return s.substr(0, i);
  }
  return s;
}

} // namespace

ConfigFile
ConfigFile::parse(std::istream& in, const std::vector<std::string>& allowed)
{
  ConfigFile cfg;
  std::string raw;
  std::string section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty())
      continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        bad_line(line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      bad_line(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      bad_line(line, "missing key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    else if (value.empty())
      bad_line(line, "missing value for '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (std::find(allowed.begin(), allowed.end(), full) == allowed.end())
      bad_line(line, "unknown key '" + full + "'");
    if (cfg.values_.count(full))
      bad_line(line, "duplicate key '" + full + "'");
    cfg.values_[full] = { value, line };
  }
  return cfg;
}

ConfigFile
ConfigFile::load(const std::string& path, const std::vector<std::string>& allowed)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path);
  return parse(in, allowed);
}

std::optional<std::string>
ConfigFile::text(const std::string& key) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return std::nullopt;
  return it->second.value;
}

std::optional<double>
ConfigFile::number(const std::string& key) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return std::nullopt;
  const auto& v = it->second.value;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    bad_line(it->second.line, "'" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::optional<unsigned long long>
ConfigFile::integer(const std::string& key) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return std::nullopt;
  const auto& v = it->second.value;
  unsigned long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    bad_line(it->second.line,
             "'" + key + "' expects a nonnegative integer, got '" + v + "'");
  return out;
}

} // namespace mrcli
