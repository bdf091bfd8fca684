#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solo9/core/types.hpp"

namespace solo9 {

/// Sectioned key=value config file.
///
/// Format: `[section]` headers (dots allowed, e.g. `[link.front_base]`),
/// `key = value` entries, `#` comments. Values keep their raw text; typed
/// getters parse on demand and report the file/line on failure.
class Config {
 public:
  Config() = default;

  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& name);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  /// Section names with the given prefix, in file order ("link." -> link.*).
  std::vector<std::string> sections_with_prefix(const std::string& prefix) const;

  /// Keys of one section in file order.
  std::vector<std::string> keys(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Whitespace-separated list of doubles.
  VecX get_vector(const std::string& section, const std::string& key) const;

  /// Applies a `section.key=value` override string (CLI `--set`).
  void set_override(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::string& name() const { return name_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    int order = 0;
  };
  struct Section {
    std::map<std::string, Entry> entries;
    int order = 0;
  };

  const Entry& entry(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& why) const;

  std::string name_ = "<none>";
  std::map<std::string, Section> sections_;
};

}  // namespace solo9
