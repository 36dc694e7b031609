#pragma once

// Validates DOT text with an external parser and reports its node and edge
// statement counts. Uses graphviz when found at configure time, otherwise
// pydot through the configured Python interpreter.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "support.hpp"

namespace testsupport {

struct DotCounts {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::string validator;
};

inline std::optional<std::string> run_capture(const std::string& cmd) {
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return std::nullopt;
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  if (::pclose(pipe) != 0) return std::nullopt;
  return out;
}

inline std::string dot_executable() { return PATGRAPH_DOT_EXECUTABLE; }
inline std::string python_executable() { return PATGRAPH_PYTHON; }

inline std::optional<DotCounts> validate_dot(const std::string& text) {
  TempDir dir;
  auto file = dir / "g.dot";
  std::ofstream(file) << text;
  DotCounts c;
  if (!dot_executable().empty()) {
    auto out = run_capture("'" + dot_executable() + "' -Tplain '" + file.string() + "' 2>/dev/null");
    if (!out) return std::nullopt;
    std::istringstream in(*out);
    std::string word;
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      ls >> word;
      if (word == "node") ++c.nodes;
      if (word == "edge") ++c.edges;
    }
    c.validator = "dot";
    return c;
  }
  if (python_executable().empty()) return std::nullopt;
  const char* script =
      "import sys, pydot\n"
      "gs = pydot.graph_from_dot_file(sys.argv[1])\n"
      "assert gs and len(gs) == 1\n"
      "g = gs[0]\n"
      "ns = [n for n in g.get_nodes() if n.get_name() not in ('node', 'edge', 'graph')]\n"
      "print(len(ns), len(g.get_edges()))\n";
  auto py = dir / "check.py";
  std::ofstream(py) << script;
  auto out = run_capture("'" + python_executable() + "' '" + py.string() + "' '" + file.string() + "' 2>/dev/null");
  if (!out) return std::nullopt;
  std::istringstream in(*out);
  if (!(in >> c.nodes >> c.edges)) return std::nullopt;
  c.validator = "pydot";
  return c;
}

}  // namespace testsupport
