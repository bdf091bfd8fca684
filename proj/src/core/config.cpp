#include "solo9/core/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace solo9 {
namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  int order = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(name, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError(name, lineno, "empty section name");
      if (!cfg.sections_.count(section)) cfg.sections_[section].order = order++;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(name, lineno, "expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(name, lineno, "empty key");
    if (section.empty()) throw ParseError(name, lineno, "entry before any [section]");
    auto& sec = cfg.sections_[section];
    sec.entries[key] = Entry{value, lineno, static_cast<int>(sec.entries.size())};
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.entries.count(key) > 0;
}

bool Config::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

std::vector<std::string> Config::sections_with_prefix(const std::string& prefix) const {
  std::vector<std::pair<int, std::string>> found;
  for (const auto& [name, sec] : sections_)
    if (name.rfind(prefix, 0) == 0) found.emplace_back(sec.order, name);
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& [_, name] : found) out.push_back(name);
  return out;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto it = sections_.find(section);
  if (it == sections_.end()) return out;
  std::vector<std::pair<int, std::string>> ordered;
  for (const auto& [key, e] : it->second.entries) ordered.emplace_back(e.order, key);
  std::sort(ordered.begin(), ordered.end());
  for (auto& [_, key] : ordered) out.push_back(key);
  return out;
}

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end())
    throw ValidationError(name_ + ": missing section [" + section + "]");
  auto jt = it->second.entries.find(key);
  if (jt == it->second.entries.end())
    throw ValidationError(name_ + ": missing key '" + key + "' in [" + section + "]");
  return jt->second;
}

void Config::fail(const std::string& section, const std::string& key,
                  const std::string& why) const {
  const Entry& e = entry(section, key);
  throw ParseError(name_, e.line, "[" + section + "] " + key + ": " + why);
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) fail(section, key, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::invalid_argument&) {
    fail(section, key, "not a number: '" + v + "'");
  } catch (const std::out_of_range&) {
    fail(section, key, "number out of range: '" + v + "'");
  }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  try {
    size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) fail(section, key, "trailing characters in integer '" + v + "'");
    return static_cast<int>(n);
  } catch (const std::invalid_argument&) {
    fail(section, key, "not an integer: '" + v + "'");
  } catch (const std::out_of_range&) {
    fail(section, key, "integer out of range: '" + v + "'");
  }
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  std::string v = entry(section, key).value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(section, key, "not a boolean: '" + v + "'");
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}

VecX Config::get_vector(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  std::istringstream in(v);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    try {
      size_t pos = 0;
      vals.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(section, key, "not a number in vector: '" + tok + "'");
    }
  }
  if (vals.empty()) fail(section, key, "empty vector");
  return Eigen::Map<VecX>(vals.data(), static_cast<int>(vals.size()));
}

void Config::set_override(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ValidationError("override must be section.key=value, got '" + assignment + "'");
  std::string path = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  auto dot = path.rfind('.');
  if (dot == std::string::npos)
    throw ValidationError("override key must be section.key, got '" + path + "'");
  set(path.substr(0, dot), path.substr(dot + 1), value);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  auto& sec = sections_[section];
  auto it = sec.entries.find(key);
  if (it != sec.entries.end())
    it->second.value = value;
  else
    sec.entries[key] = Entry{value, 0, static_cast<int>(sec.entries.size())};
}

}  // namespace solo9
