#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace rankforge::cli {

// Flat `key = value` settings grouped under `[section]` headers.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text, std::string base_dir = ".");
  static ConfigFile read(const std::string& path);

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }
  // Throws ConfigError naming the section.
  void require_section(const std::string& section) const;
  // Throws ConfigError on keys outside `allowed`.
  void check_keys(const std::string& section, const std::set<std::string>& allowed) const;

  // "section.key=value"; creates the section when needed.
  void apply_override(std::string_view assignment);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  // Relative values resolve against the directory of the config file.
  std::string get_path(const std::string& section, const std::string& key,
                       const std::string& fallback = "") const;
  std::size_t get_size(const std::string& section, const std::string& key,
                       std::size_t fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string base_dir_ = ".";
};

}  // namespace rankforge::cli
