#include "rankforge/prompt/template.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>

#include "rankforge/core/error.hpp"
#include "rankforge/core/io.hpp"

namespace rankforge::prompt {

namespace detail {
const std::map<std::string, std::string>& builtin_template_assets();
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

void PromptTemplate::validate() const {
  std::vector<std::string> required;
  switch (mode) {
    case InvocationKind::kListwise:
      required = {"{query}", "{num}", "{passages}"};
      break;
    case InvocationKind::kPointwise:
      required = {"{query}", "{passage}"};
      break;
    case InvocationKind::kPairwise:
      required = {"{query}", "{passage_a}", "{passage_b}"};
      break;
  }
  for (const auto& p : required) {
    if (body.find(p) == std::string::npos) {
      throw ConfigError("template \"" + name + "\" is missing placeholder " + p);
    }
  }
}

PromptTemplate parse_template(std::string_view name, std::string_view asset) {
  PromptTemplate tpl;
  tpl.name = std::string(name);
  std::map<std::string, std::string> sections;
  std::string current;
  std::size_t pos = 0;
  while (pos <= asset.size()) {
    std::size_t end = asset.find('\n', pos);
    if (end == std::string_view::npos) end = asset.size();
    std::string_view line = asset.substr(pos, end - pos);
    pos = end + 1;
    std::string t = trim(line);
    if (t == "[meta]" || t == "[system]" || t == "[user]") {
      current = t.substr(1, t.size() - 2);
      sections[current];
      continue;
    }
    if (current.empty()) {
      if (!t.empty()) throw ConfigError("template \"" + tpl.name + "\": text before any section");
      continue;
    }
    sections[current].append(line);
    sections[current].push_back('\n');
    if (end == asset.size()) break;
  }

  if (auto it = sections.find("meta"); it != sections.end()) {
    std::size_t p = 0;
    const std::string& meta = it->second;
    while (p < meta.size()) {
      std::size_t e = meta.find('\n', p);
      if (e == std::string::npos) e = meta.size();
      std::string line = trim(std::string_view(meta).substr(p, e - p));
      p = e + 1;
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("template meta line without '=': " + line);
      std::string key = trim(std::string_view(line).substr(0, eq));
      std::string value = trim(std::string_view(line).substr(eq + 1));
      if (key == "mode") {
        tpl.mode = invocation_kind_from_string(value);
      } else if (key == "grammar") {
        tpl.grammar = value;
      } else {
        throw ConfigError("unknown template meta key \"" + key + "\"");
      }
    }
  }
  if (auto it = sections.find("system"); it != sections.end()) {
    std::string s = trim(it->second);
    if (!s.empty()) tpl.system_message = std::move(s);
  }
  auto user = sections.find("user");
  if (user == sections.end()) throw ConfigError("template \"" + tpl.name + "\" has no [user] section");
  tpl.body = trim(user->second);
  tpl.validate();
  return tpl;
}

PromptTemplate load_template_file(const std::string& path) {
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find('.'); dot != std::string::npos) name = name.substr(0, dot);
  return parse_template(name, io::read_file(path));
}

const PromptTemplate& builtin_template(std::string_view name) {
  static std::once_flag once;
  static std::map<std::string, PromptTemplate> parsed;
  std::call_once(once, [] {
    for (const auto& [n, asset] : detail::builtin_template_assets()) {
      parsed.emplace(n, parse_template(n, asset));
    }
  });
  auto it = parsed.find(lower(name));
  if (it == parsed.end()) {
    std::string known;
    for (const auto& [n, _] : parsed) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown template \"" + std::string(name) + "\" (known: " + known + ")");
  }
  return it->second;
}

std::vector<std::string> builtin_template_names() {
  std::vector<std::string> names;
  for (const auto& [n, _] : detail::builtin_template_assets()) names.push_back(n);
  return names;
}

std::string substitute(std::string_view body,
                       const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      auto close = body.find('}', i);
      if (close != std::string_view::npos) {
        std::string_view key = body.substr(i + 1, close - i - 1);
        auto it = std::find_if(values.begin(), values.end(),
                               [&](const auto& kv) { return kv.first == key; });
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(body[i]);
    ++i;
  }
  return out;
}

}  // namespace rankforge::prompt
