#include "config_file.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

#include "CLI11.hpp"
#include "rankforge/core/error.hpp"
#include "rankforge/core/io.hpp"

namespace rankforge::cli {

namespace {

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& value, const char* expected) {
  throw ConfigError("[" + section + "] " + key + " = \"" + value + "\" is not " + expected);
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, std::string base_dir) {
  ConfigFile cfg;
  cfg.base_dir_ = std::move(base_dir);
  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.parents.empty() || item.parents.front() == "default") {
      throw ConfigError("config key \"" + item.name + "\" appears before any [section]");
    }
    std::string section = item.parents.front();
    for (std::size_t i = 1; i < item.parents.size(); ++i) section += "." + item.parents[i];
    auto& entries = cfg.sections_[section];
    if (item.name == "++" || item.name == "--") continue;
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i) value += ",";
      value += item.inputs[i];
    }
    entries[item.name] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::read(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path);
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse(io::read_file(path), dir.empty() ? "." : dir);
}

void ConfigFile::require_section(const std::string& section) const {
  if (!has_section(section)) throw ConfigError("config is missing section [" + section + "]");
}

void ConfigFile::check_keys(const std::string& section,
                            const std::set<std::string>& allowed) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return;
  for (const auto& [key, _] : it->second) {
    if (!allowed.count(key)) {
      std::string names;
      for (const auto& a : allowed) names += (names.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key \"" + key + "\" in [" + section + "]; known keys: " + names);
    }
  }
}

void ConfigFile::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq || dot == 0 ||
      dot + 1 == eq) {
    throw ConfigError("override \"" + std::string(assignment) + "\" must look like section.key=value");
  }
  sections_[std::string(assignment.substr(0, dot))]
           [std::string(assignment.substr(dot + 1, eq - dot - 1))] =
      std::string(assignment.substr(eq + 1));
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

std::string ConfigFile::get_path(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
  auto v = get(section, key);
  if (!v || v->empty()) return fallback;
  std::filesystem::path p(*v);
  if (p.is_absolute() || base_dir_ == ".") return p.string();
  return (std::filesystem::path(base_dir_) / p).lexically_normal().string();
}

std::size_t ConfigFile::get_size(const std::string& section, const std::string& key,
                                 std::size_t fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size()) {
    bad_value(section, key, *v, "a non-negative integer");
  }
  return out;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size()) {
    bad_value(section, key, *v, "an integer");
  }
  return out;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  double out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size()) {
    bad_value(section, key, *v, "a number");
  }
  return out;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  bad_value(section, key, *v, "a boolean");
}

}  // namespace rankforge::cli
