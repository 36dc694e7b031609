#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nlohmann/json.hpp"
#include "patgraph/error.hpp"
#include "patgraph/fad/fad_store.hpp"
#include "patgraph/graph/graph_store.hpp"

namespace patgraph::viz {

struct DocNode {
  std::uint64_t id = 0;
  std::vector<std::string> labels;
  PropertyMap props;
  friend bool operator==(const DocNode&, const DocNode&) = default;
};

struct DocEdge {
  std::uint64_t id = 0;
  std::uint64_t source = 0;
  std::uint64_t target = 0;
  std::string type;
  PropertyMap props;
  friend bool operator==(const DocEdge&, const DocEdge&) = default;
};

struct GraphDocument {
  std::vector<DocNode> nodes;
  std::vector<DocEdge> edges;
  friend bool operator==(const GraphDocument&, const GraphDocument&) = default;
};

// Distinct nodes and edges in first-appearance order.
struct Entities {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  friend bool operator==(const Entities&, const Entities&) = default;
};

enum class Projection { Full, GeometryOnly };

// Collapses tabular rows, which repeat shared elements, into entity sets.
// Works on any row of variants holding NodeId / EdgeId alternatives.
template <class Row>
Entities tabular_to_entities(const std::vector<Row>& rows) {
  Entities out;
  std::set<NodeId> seen_n;
  std::set<EdgeId> seen_e;
  for (const auto& row : rows) {
    for (const auto& cell : row) {
      if (const auto* n = std::get_if<NodeId>(&cell)) {
        if (seen_n.insert(*n).second) out.nodes.push_back(*n);
      } else if (const auto* e = std::get_if<EdgeId>(&cell)) {
        if (seen_e.insert(*e).second) out.edges.push_back(*e);
      }
    }
  }
  return out;
}

// One row per entity; feeding this back through tabular_to_entities is
// the identity.
inline std::vector<std::vector<std::variant<std::monostate, NodeId, EdgeId>>> as_rows(const Entities& e) {
  std::vector<std::vector<std::variant<std::monostate, NodeId, EdgeId>>> rows;
  for (NodeId n : e.nodes) rows.push_back({n});
  for (EdgeId x : e.edges) rows.push_back({x});
  return rows;
}

inline GraphDocument document_of(const GraphStore& store, const Entities& e) {
  GraphDocument doc;
  std::set<NodeId> present(e.nodes.begin(), e.nodes.end());
  std::vector<NodeId> nodes = e.nodes;
  // Edges need their endpoints in the document.
  for (EdgeId id : e.edges) {
    const GraphEdge& edge = store.edge(id);
    for (NodeId end : {edge.from, edge.to}) {
      if (present.insert(end).second) nodes.push_back(end);
    }
  }
  for (NodeId id : nodes) {
    const GraphNode& n = store.node(id);
    doc.nodes.push_back({id.value, n.labels, n.props});
  }
  for (EdgeId id : e.edges) {
    const GraphEdge& edge = store.edge(id);
    doc.edges.push_back({id.value, edge.from.value, edge.to.value, edge.type, edge.props});
  }
  return doc;
}

inline GraphDocument document_of(const fad::FadStore& store, const fad::FadModel& m,
                                 Projection projection = Projection::Full) {
  Entities e;
  if (projection == Projection::Full) {
    e.nodes.push_back(m.node);
    for (const auto& ed : store.graph().out_edges(m.node)) e.edges.push_back(ed);
  }
  for (const auto& p : m.products) {
    if (projection == Projection::Full) {
      e.nodes.push_back(p.node);
      for (const auto& c : p.claims) e.nodes.push_back(c.node);
      for (EdgeId ed : store.graph().out_edges(p.node)) {
        if (store.graph().edge(ed).type != fad::schema::kHasGeometry &&
            store.graph().edge(ed).type != fad::schema::kHasClaim) {
          continue;
        }
        e.edges.push_back(ed);
      }
    }
    for (const auto& g : p.geometries) e.nodes.push_back(g.node);
    for (const auto& f : p.fgis) e.edges.push_back(f.edge);
  }
  return document_of(store.graph(), e);
}

inline nlohmann::json to_json(const GraphDocument& doc) {
  using nlohmann::json;
  json nodes = json::array(), edges = json::array();
  for (const auto& n : doc.nodes) {
    nodes.push_back({{"id", n.id}, {"labels", n.labels}, {"props", patgraph::to_json(n.props)}});
  }
  for (const auto& e : doc.edges) {
    edges.push_back({{"id", e.id},
                     {"source", e.source},
                     {"target", e.target},
                     {"type", e.type},
                     {"props", patgraph::to_json(e.props)}});
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline nlohmann::json to_graphjson(const fad::FadStore& store, const std::string& design_id,
                                   Projection projection = Projection::Full) {
  return to_json(document_of(store, store.get_fad(design_id), projection));
}

template <class Row>
nlohmann::json to_graphjson(const GraphStore& store, const std::vector<Row>& rows) {
  return to_json(document_of(store, tabular_to_entities(rows)));
}

inline GraphDocument from_graphjson(const nlohmann::json& j) {
  try {
    GraphDocument doc;
    for (const auto& n : j.at("nodes")) {
      DocNode d;
      d.id = n.at("id").get<std::uint64_t>();
      d.labels = n.at("labels").get<std::vector<std::string>>();
      d.props = props_from_json(n.value("props", nlohmann::json::object()));
      doc.nodes.push_back(std::move(d));
    }
    for (const auto& e : j.at("edges")) {
      DocEdge d;
      d.id = e.at("id").get<std::uint64_t>();
      d.source = e.at("source").get<std::uint64_t>();
      d.target = e.at("target").get<std::uint64_t>();
      d.type = e.at("type").get<std::string>();
      d.props = props_from_json(e.value("props", nlohmann::json::object()));
      doc.edges.push_back(std::move(d));
    }
    return doc;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::FormatError, std::string("malformed graph document: ") + ex.what());
  }
}

inline GraphDocument from_graphjson(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::FormatError, "graph document is not valid JSON");
  return from_graphjson(j);
}

}  // namespace patgraph::viz
