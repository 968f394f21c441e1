#include "turbrest/config.hpp"

#include "turbrest/io_util.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <sstream>

namespace turbrest {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  cfg.sections_.emplace_back("", std::vector<Entry>{});
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::size_t current = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      // A repeated header continues the earlier section.
      auto it = std::find_if(cfg.sections_.begin(), cfg.sections_.end(),
                             [&](const auto& sec) { return sec.first == name; });
      if (it == cfg.sections_.end()) {
        cfg.sections_.emplace_back(name, std::vector<Entry>{});
        current = cfg.sections_.size() - 1;
      } else {
        current = static_cast<std::size_t>(it - cfg.sections_.begin());
      }
      continue;
    }
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find(':');
    if (sep == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    Entry e{trim(line.substr(0, sep)), trim(line.substr(sep + 1)), lineno};
    if (e.key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.sections_[current].second.push_back(std::move(e));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse(read_file(path), path.string());
}

const std::vector<Config::Entry>* Config::section(const std::string& name) const {
  for (const auto& [n, entries] : sections_) {
    if (n == name) return &entries;
  }
  return nullptr;
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  std::optional<std::string> found;
  for (const auto& [n, entries] : sections_) {
    if (n != section) continue;
    for (const auto& e : entries) {
      if (e.key == key) found = e.value;  // last assignment wins
    }
  }
  return found;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v->c_str(), &end);
  if (end == v->c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(origin_ + ": [" + section + "] " + key + " is not a number: '" + *v + "'");
  }
  return d;
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(origin_ + ": [" + section + "] " + key + " is not an integer: '" + *v + "'");
  }
  return i;
}

void Config::set(const std::string& section, const std::string& key, std::string value) {
  for (auto& [n, entries] : sections_) {
    if (n != section) continue;
    for (auto& e : entries) {
      if (e.key == key) {
        e.value = std::move(value);
        return;
      }
    }
  }
  for (auto& [n, entries] : sections_) {
    if (n == section) {
      entries.push_back({key, std::move(value), 0});
      return;
    }
  }
  sections_.emplace_back(section, std::vector<Entry>{{key, std::move(value), 0}});
}

}  // namespace turbrest
