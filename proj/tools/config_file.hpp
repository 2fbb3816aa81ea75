#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrcli {

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Flat `[section]` / `key = value` text. Keys are stored as
//! "section.key"; values keep their line for error messages.
class ConfigFile
{
public:
  //! `allowed` lists the accepted "section.key" names.
  static ConfigFile parse(std::istream& in, const std::vector<std::string>& allowed);
  static ConfigFile load(const std::string& path,
                         const std::vector<std::string>& allowed);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key) const;
  std::optional<double> number(const std::string& key) const;
  std::optional<unsigned long long> integer(const std::string& key) const;

private:
  struct Entry
  {
    std::string value;
    std::size_t line = 0;
  };
  std::map<std::string, Entry> values_;
};

} // namespace mrcli
