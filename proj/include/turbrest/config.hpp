#pragma once

#include "turbrest/image.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace turbrest {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Flat "key = value" file with "[section]" headers. Lines of the form
/// "name: value" are accepted too (used for "zone k: c_start c_end cycles").
/// '#' and ';' start comments. Entries keep file order.
class Config {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  const std::vector<Entry>* section(const std::string& name) const;
  bool has_section(const std::string& name) const { return section(name) != nullptr; }
  std::optional<std::string> get(const std::string& section, const std::string& key) const;

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;

  // Replaces an existing value or appends it.
  void set(const std::string& section, const std::string& key, std::string value);

  const std::string& origin() const { return origin_; }

 private:
  std::vector<std::pair<std::string, std::vector<Entry>>> sections_;
  std::string origin_;
};

}  // namespace turbrest
