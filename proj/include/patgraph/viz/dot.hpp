#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "patgraph/error.hpp"
#include "patgraph/fad/fad_store.hpp"
#include "patgraph/scoring/scoring.hpp"

namespace patgraph::viz {

struct AbstractionLevel {
  enum class Kind { DesignerName, PatmineType, Supertype };
  Kind kind = Kind::DesignerName;
  unsigned level = 1;  // Supertype only; >= 1

  static AbstractionLevel designer_name() { return {Kind::DesignerName, 1}; }
  static AbstractionLevel patmine_type() { return {Kind::PatmineType, 1}; }
  static AbstractionLevel supertype(unsigned k) {
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "supertype level must be positive");
    return {Kind::Supertype, k};
  }

  // designer-name | patmine-type | supertype:<k>
  static AbstractionLevel parse(std::string_view s) {
    if (s.empty() || s == "designer-name") return designer_name();
    if (s == "patmine-type") return patmine_type();
    if (s.rfind("supertype", 0) == 0) {
      auto rest = s.substr(9);
      if (rest.empty()) return supertype(1);
      if (rest.front() == ':' || rest.front() == '=') rest.remove_prefix(1);
      unsigned k = 0;
      auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
      if (ec == std::errc{} && p == rest.data() + rest.size() && k > 0) return supertype(k);
    }
    throw Error(ErrorKind::InvalidArgument,
                "unknown abstraction level '" + std::string(s) +
                    "' (expected designer-name, patmine-type or supertype:<k>)");
  }

  std::string label_for(const fad::GeometryRecord& g) const {
    switch (kind) {
      case Kind::DesignerName: return g.name;
      case Kind::PatmineType: return g.patmine_type;
      case Kind::Supertype: {
        // Chain: PatMine_type, then labels from specific to general.
        std::vector<std::string> chain{g.patmine_type};
        for (const auto& l : g.abstraction_labels) {
          if (std::find(chain.begin(), chain.end(), l) == chain.end()) chain.push_back(l);
        }
        return chain[std::min<std::size_t>(level, chain.size() - 1)];
      }
    }
    return g.name;
  }
};

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline std::string fgi_label(const fad::FgiRecord& f) {
  std::string ids;
  for (const auto& id : f.function_ids) {
    if (!ids.empty()) ids += ", ";
    ids += id;
  }
  return f.action + " (" + ids + ")";
}

// Geometry-only digraph: one node per geometry, one edge per FGI. When a
// report is given, elements of side `highlight_side_a ? a : b` are marked.
inline std::string to_dot(const fad::FadModel& m, const AbstractionLevel& level = {},
                          const scoring::OverlapReport* highlight = nullptr, bool highlight_side_a = true) {
  std::set<NodeId> hot_nodes;
  std::set<EdgeId> hot_edges;
  if (highlight) {
    for (const auto& g : highlight->geometries) hot_nodes.insert(highlight_side_a ? g.a_node : g.b_node);
    for (const auto& f : highlight->fgis) hot_edges.insert(highlight_side_a ? f.a_edge : f.b_edge);
  }
  constexpr const char* kHot = ", penwidth=3, color=red";
  std::ostringstream out;
  out << "digraph " << dot_quote(m.unique_id) << " {\n";
  for (const auto& p : m.products) {
    for (const auto& g : p.geometries) {
      out << "  " << dot_quote(p.product_id + "/" + g.geometric_id) << " [label=" << dot_quote(level.label_for(g))
          << (hot_nodes.count(g.node) ? kHot : "") << "];\n";
    }
  }
  for (const auto& p : m.products) {
    for (const auto& f : p.fgis) {
      out << "  " << dot_quote(p.product_id + "/" + f.from_id) << " -> " << dot_quote(p.product_id + "/" + f.to_id)
          << " [label=" << dot_quote(fgi_label(f)) << (hot_edges.count(f.edge) ? kHot : "") << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

// Runs the external dot engine: `engine -T<format>` over `dot_text`.
inline std::string render_dot(const std::string& engine, const std::string& dot_text, const std::string& format = "svg") {
  if (engine.empty()) throw Error(ErrorKind::InvalidArgument, "no dot engine configured");
  if (format.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789") != std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "bad output format '" + format + "'");
  }
  auto dir = std::filesystem::temp_directory_path();
  auto in = dir / ("patgraph-" + std::to_string(std::hash<std::string>{}(dot_text)) + "-" +
                   std::to_string(reinterpret_cast<std::uintptr_t>(&dot_text)) + ".dot");
  {
    std::ofstream f(in, std::ios::binary);
    f << dot_text;
    if (!f) throw Error(ErrorKind::IoFailure, "cannot write " + in.string());
  }
  std::string cmd = "'" + engine + "' -T" + format + " '" + in.string() + "' 2>/dev/null";
  std::string result;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(in);
    throw Error(ErrorKind::IoFailure, "cannot run dot engine " + engine);
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.append(buf.data(), n);
  int status = ::pclose(pipe);
  std::filesystem::remove(in);
  if (status != 0) throw Error(ErrorKind::IoFailure, "dot engine failed with status " + std::to_string(status));
  return result;
}

}  // namespace patgraph::viz
