#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "patgraph/error.hpp"
#include "patgraph/graph/graph_store.hpp"

namespace patgraph {

inline constexpr const char* kSnapshotFormat = "patgraph-1";

// Snapshot layout, one JSON record per line:
//   {"format":"patgraph-1","next_node":N,"next_edge":M}
//   {"constraint":{"label":..,"property":..}}       (zero or more)
//   {"node":{"id":..,"labels":[..],"props":{..}}}    (zero or more)
//   {"edge":{"id":..,"type":..,"from":..,"to":..,"props":{..}}}
//   {"end":{"nodes":n,"edges":m}}
// The trailer lets a loader tell a truncated file from a short one.
inline void write_snapshot(const GraphStore& store, std::ostream& out) {
  using nlohmann::json;
  out << json{{"format", kSnapshotFormat},
              {"next_node", store.next_node_id()},
              {"next_edge", store.next_edge_id()}}
             .dump()
      << '\n';
  for (const auto& c : store.constraints()) {
    out << json{{"constraint", {{"label", c.label}, {"property", c.property}}}}.dump() << '\n';
  }
  for (NodeId id : store.node_ids()) {
    const GraphNode& n = store.node(id);
    out << json{{"node", {{"id", n.id.value}, {"labels", n.labels}, {"props", to_json(n.props)}}}}.dump()
        << '\n';
  }
  for (EdgeId id : store.edge_ids()) {
    const GraphEdge& e = store.edge(id);
    out << json{{"edge",
                 {{"id", e.id.value},
                  {"type", e.type},
                  {"from", e.from.value},
                  {"to", e.to.value},
                  {"props", to_json(e.props)}}}}
               .dump()
        << '\n';
  }
  out << json{{"end", {{"nodes", store.node_count()}, {"edges", store.edge_count()}}}}.dump() << '\n';
}

inline GraphStore read_snapshot(std::istream& in) {
  using nlohmann::json;
  GraphStore store;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  bool ended = false;
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorKind::FormatError, "snapshot line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (ended) throw fail("data after end record");
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw fail(std::string("malformed record: ") + e.what());
    }
    try {
      if (!header) {
        if (!rec.is_object() || rec.value("format", "") != kSnapshotFormat) {
          throw fail("missing patgraph-1 header");
        }
        header = true;
        store.reserve_ids(rec.at("next_node").get<std::uint64_t>(),
                          rec.at("next_edge").get<std::uint64_t>());
        continue;
      }
      if (rec.contains("constraint")) {
        const auto& c = rec.at("constraint");
        store.add_constraint(c.at("label").get<std::string>(), c.at("property").get<std::string>());
      } else if (rec.contains("node")) {
        const auto& n = rec.at("node");
        store.restore_node(GraphNode{NodeId{n.at("id").get<std::uint64_t>()},
                                     n.at("labels").get<std::vector<std::string>>(),
                                     props_from_json(n.at("props"))});
      } else if (rec.contains("edge")) {
        const auto& e = rec.at("edge");
        store.restore_edge(GraphEdge{EdgeId{e.at("id").get<std::uint64_t>()},
                                     e.at("type").get<std::string>(),
                                     NodeId{e.at("from").get<std::uint64_t>()},
                                     NodeId{e.at("to").get<std::uint64_t>()},
                                     props_from_json(e.at("props"))});
      } else if (rec.contains("end")) {
        const auto& t = rec.at("end");
        if (t.at("nodes").get<std::size_t>() != store.node_count() ||
            t.at("edges").get<std::size_t>() != store.edge_count()) {
          throw fail("record counts do not match the end record");
        }
        ended = true;
      } else {
        throw fail("unknown record");
      }
    } catch (const json::exception& e) {
      throw fail(std::string("bad record: ") + e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::FormatError) throw;
      throw fail(e.what());
    }
  }
  if (!header) throw Error(ErrorKind::FormatError, "snapshot is empty");
  if (!ended) throw Error(ErrorKind::FormatError, "snapshot is truncated (no end record)");
  return store;
}

inline void snapshot_save(const GraphStore& store, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + tmp.string());
    write_snapshot(store, out);
    out.flush();
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot replace " + path.string() + ": " + ec.message());
}

inline GraphStore snapshot_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  return read_snapshot(in);
}

}  // namespace patgraph
