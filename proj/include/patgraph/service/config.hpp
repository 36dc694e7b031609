#pragma once

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "patgraph/error.hpp"

namespace patgraph::service {

// Settings for a running service. File format is `key = value` per line;
// `#` starts a comment. Every key can be overridden by PATGRAPH_<KEY>.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path snapshot_path;
  std::filesystem::path lexicon_path;
  std::string dot_engine;
  std::filesystem::path documents_dir;
  std::size_t page_size = 20;

  static constexpr const char* kKeys[] = {"listen", "snapshot", "lexicon", "dot_engine", "documents", "page_size"};

  void set(const std::string& key, const std::string& value) {
    if (key == "listen") {
      auto colon = value.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorKind::ConfigError, "listen must be host:port");
      host = value.substr(0, colon);
      port = parse_number<int>(key, value.substr(colon + 1));
      if (port < 0 || port > 65535) throw Error(ErrorKind::ConfigError, "port out of range");
    } else if (key == "snapshot") {
      snapshot_path = value;
    } else if (key == "lexicon") {
      lexicon_path = value;
    } else if (key == "dot_engine") {
      dot_engine = value;
    } else if (key == "documents") {
      documents_dir = value;
    } else if (key == "page_size") {
      page_size = parse_number<std::size_t>(key, value);
      if (page_size == 0) throw Error(ErrorKind::ConfigError, "page_size must be positive");
    } else {
      throw Error(ErrorKind::ConfigError, "unknown configuration key '" + key + "'");
    }
  }

  static ServiceConfig parse(std::string_view text) {
    ServiceConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::ConfigError, "line " + std::to_string(number) + ": expected key = value");
      }
      cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    }
    return cfg;
  }

  static ServiceConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  // PATGRAPH_LISTEN, PATGRAPH_SNAPSHOT, ... take precedence over the file.
  void apply_env() {
    for (const char* key : kKeys) {
      std::string name = "PATGRAPH_";
      for (const char* c = key; *c; ++c) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
      if (const char* v = std::getenv(name.c_str())) set(key, v);
    }
  }

  void validate() const {
    if (!snapshot_path.empty()) {
      auto parent = snapshot_path.parent_path();
      if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        throw Error(ErrorKind::ConfigError, "snapshot directory does not exist: " + parent.string());
      }
    }
    if (!lexicon_path.empty()) {
      auto parent = lexicon_path.parent_path();
      if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        throw Error(ErrorKind::ConfigError, "lexicon directory does not exist: " + parent.string());
      }
    }
    if (!documents_dir.empty() && !std::filesystem::is_directory(documents_dir)) {
      throw Error(ErrorKind::ConfigError, "documents directory does not exist: " + documents_dir.string());
    }
  }

 private:
  static std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
  }

  template <class N>
  static N parse_number(const std::string& key, std::string_view v) {
    N n{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || p != v.data() + v.size()) {
      throw Error(ErrorKind::ConfigError, "bad number for " + key + ": '" + std::string(v) + "'");
    }
    return n;
  }
};

}  // namespace patgraph::service
