#pragma once

// Plain-text composite description. See README for the schema.
//
//   [subdomain]            [interface]
//   id = 1                 id = 0
//   origin = 0 0.25        a = 1 east
//   m = 8                  b = 2 west
//   n = 16
//   dx = 0.125
//   dy = 0.0625
//   kappa = 0
//   west = dirichlet_face
//   east = interface
//   south = neumann
//   north = neumann
//
// Blank lines and text after '#' are ignored. Interface coupling and node
// pairing are derived from the two rectangles.

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fftddm/error.hpp"
#include "fftddm/geometry.hpp"

namespace fftddm {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Section {
  std::string kind;
  int line = 0;
  std::map<std::string, std::pair<std::string, int>> keys;  // value, line
};

[[noreturn]] inline void config_error(const std::string& source, int line, const std::string& msg) {
  throw InvalidArgument(source + ":" + std::to_string(line) + ": " + msg);
}

inline const std::pair<std::string, int>& require_key(const Section& s, const std::string& key,
                                                      const std::string& source) {
  auto it = s.keys.find(key);
  if (it == s.keys.end()) config_error(source, s.line, "[" + s.kind + "] is missing '" + key + "'");
  return it->second;
}

inline double parse_double(const std::pair<std::string, int>& v, const std::string& source) {
  std::istringstream is(v.first);
  double d = 0;
  std::string rest;
  if (!(is >> d) || (is >> rest)) config_error(source, v.second, "expected a number, got '" + v.first + "'");
  return d;
}

inline long parse_int(const std::pair<std::string, int>& v, const std::string& source) {
  std::istringstream is(v.first);
  long d = 0;
  std::string rest;
  if (!(is >> d) || (is >> rest)) config_error(source, v.second, "expected an integer, got '" + v.first + "'");
  return d;
}

}  // namespace detail

inline CompositeDomain parse_composite(std::istream& in, const std::string& source = "<config>") {
  std::vector<detail::Section> sections;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') detail::config_error(source, lineno, "malformed section header");
      const std::string kind = detail::trim(line.substr(1, line.size() - 2));
      if (kind != "subdomain" && kind != "interface") {
        detail::config_error(source, lineno, "unknown section [" + kind + "]");
      }
      sections.push_back({kind, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) detail::config_error(source, lineno, "expected 'key = value'");
    if (sections.empty()) detail::config_error(source, lineno, "key outside of a section");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!sections.back().keys.emplace(key, std::pair{value, lineno}).second) {
      detail::config_error(source, lineno, "duplicate key '" + key + "'");
    }
  }

  std::vector<RectSubdomain> subs;
  std::vector<std::pair<const detail::Section*, int>> pending;
  for (const auto& sec : sections) {
    if (sec.kind != "subdomain") continue;
    static const char* known[] = {"id", "origin", "m", "n", "dx", "dy", "kappa", "west", "east", "south", "north"};
    for (const auto& [k, v] : sec.keys) {
      bool ok = false;
      for (const char* name : known) ok = ok || k == name;
      if (!ok) detail::config_error(source, v.second, "unknown key '" + k + "' in [subdomain]");
    }
    RectSubdomain s;
    s.id = static_cast<int>(detail::parse_int(detail::require_key(sec, "id", source), source));
    {
      const auto& o = detail::require_key(sec, "origin", source);
      std::istringstream is(o.first);
      std::string rest;
      if (!(is >> s.x0 >> s.y0) || (is >> rest)) detail::config_error(source, o.second, "origin needs two numbers");
    }
    const long m = detail::parse_int(detail::require_key(sec, "m", source), source);
    const long n = detail::parse_int(detail::require_key(sec, "n", source), source);
    if (m < 1 || n < 1) detail::config_error(source, sec.line, "m and n must be >= 1");
    s.m = static_cast<std::size_t>(m);
    s.n = static_cast<std::size_t>(n);
    s.dx = detail::parse_double(detail::require_key(sec, "dx", source), source);
    s.dy = detail::parse_double(detail::require_key(sec, "dy", source), source);
    auto kappa = sec.keys.find("kappa");
    if (kappa != sec.keys.end()) s.kappa = detail::parse_double(kappa->second, source);
    for (Edge e : kAllEdges) {
      const auto& v = detail::require_key(sec, std::string(to_string(e)), source);
      const auto kind = parse_boundary_kind(v.first);
      if (!kind) detail::config_error(source, v.second, "unknown boundary kind '" + v.first + "'");
      s.edge_bc[static_cast<int>(e)] = *kind;
    }
    subs.push_back(s);
  }

  auto find = [&](int id) -> const RectSubdomain* {
    for (const auto& s : subs) {
      if (s.id == id) return &s;
    }
    return nullptr;
  };
  std::vector<Interface> itfs;
  for (const auto& sec : sections) {
    if (sec.kind != "interface") continue;
    for (const auto& [k, v] : sec.keys) {
      if (k != "id" && k != "a" && k != "b") detail::config_error(source, v.second, "unknown key '" + k + "' in [interface]");
    }
    const int id = static_cast<int>(detail::parse_int(detail::require_key(sec, "id", source), source));
    auto side = [&](const char* key) {
      const auto& v = detail::require_key(sec, key, source);
      std::istringstream is(v.first);
      int sid = 0;
      std::string edge, rest;
      if (!(is >> sid >> edge) || (is >> rest)) {
        detail::config_error(source, v.second, std::string(key) + " needs '<subdomain id> <edge>'");
      }
      const auto e = parse_edge(edge);
      if (!e) detail::config_error(source, v.second, "unknown edge '" + edge + "'");
      const RectSubdomain* s = find(sid);
      if (!s) detail::config_error(source, v.second, "unknown subdomain id " + std::to_string(sid));
      return std::pair{s, *e};
    };
    const auto [sa, ea] = side("a");
    const auto [sb, eb] = side("b");
    itfs.push_back(make_interface(id, *sa, ea, *sb, eb));
  }
  return CompositeDomain(std::move(subs), std::move(itfs));
}

inline CompositeDomain load_composite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration '" + path + "'");
  return parse_composite(in, path);
}

/// Writes a composite back in the same format.
inline std::string to_config_text(const CompositeDomain& c) {
  std::ostringstream os;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& s : c.subdomains()) {
    os << "[subdomain]\n"
       << "id = " << s.id << "\n"
       << "origin = " << num(s.x0) << " " << num(s.y0) << "\n"
       << "m = " << s.m << "\n"
       << "n = " << s.n << "\n"
       << "dx = " << num(s.dx) << "\n"
       << "dy = " << num(s.dy) << "\n"
       << "kappa = " << num(s.kappa) << "\n";
    for (Edge e : kAllEdges) os << to_string(e) << " = " << to_string(s.bc(e)) << "\n";
    os << "\n";
  }
  for (const auto& itf : c.interfaces()) {
    os << "[interface]\n"
       << "id = " << itf.id << "\n"
       << "a = " << itf.side_a.subdomain_id << " " << to_string(itf.side_a.edge) << "\n"
       << "b = " << itf.side_b.subdomain_id << " " << to_string(itf.side_b.edge) << "\n\n";
  }
  return os.str();
}

}  // namespace fftddm
