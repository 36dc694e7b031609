#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "patgraph/error.hpp"
#include "patgraph/graph/property.hpp"

namespace patgraph {

struct NodeId {
  std::uint64_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

struct EdgeId {
  std::uint64_t value = 0;
  auto operator<=>(const EdgeId&) const = default;
};

struct NodeIdHash {
  std::size_t operator()(NodeId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};
struct EdgeIdHash {
  std::size_t operator()(EdgeId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};

struct GraphNode {
  NodeId id;
  std::vector<std::string> labels;  // labels.front() is the principal type
  PropertyMap props;

  const std::string& principal_label() const { return labels.front(); }
  bool has_label(std::string_view label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }
  const PropertyValue* prop(std::string_view key) const {
    auto it = props.find(key);
    return it == props.end() ? nullptr : &it->second;
  }
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  EdgeId id;
  std::string type;
  NodeId from;
  NodeId to;
  PropertyMap props;

  const PropertyValue* prop(std::string_view key) const {
    auto it = props.find(key);
    return it == props.end() ? nullptr : &it->second;
  }
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct UniquenessConstraint {
  std::string label;
  std::string property;
  auto operator<=>(const UniquenessConstraint&) const = default;
};

// Schema-free directed labeled property graph.
//
// Not internally synchronised; wrap in `Guarded<>` for shared use. Every
// mutating member either completes or throws before touching any state.
class GraphStore {
 public:
  GraphStore() = default;

  // -- nodes -------------------------------------------------------------

  NodeId create_node(std::vector<std::string> labels, PropertyMap props = {}) {
    validate_labels(labels);
    check_constraints(labels, props, std::nullopt);
    NodeId id{next_node_++};
    insert_node(GraphNode{id, std::move(labels), std::move(props)});
    return id;
  }

  // Returns the node whose principal label is `labels.front()` and whose
  // `key` equals `value`, creating it with `extra` properties otherwise.
  NodeId merge_node(std::vector<std::string> labels, const std::string& key,
                    const PropertyValue& value, PropertyMap extra = {}) {
    validate_labels(labels);
    if (key.empty()) throw Error(ErrorKind::InvalidArgument, "merge key must not be empty");
    if (auto found = find_node(labels.front(), key, value)) return *found;
    extra[key] = value;
    return create_node(std::move(labels), std::move(extra));
  }

  // Cascading removes incident edges first; otherwise a node with edges is
  // refused.
  void delete_node(NodeId id, bool cascade = false) {
    const GraphNode& n = node(id);
    auto& adj = adjacency_.at(id);
    if (!cascade && (!adj.out.empty() || !adj.in.empty())) {
      throw Error(ErrorKind::NodeHasEdges,
                  "node " + std::to_string(id.value) + " has incident edges");
    }
    std::vector<EdgeId> incident = adj.out;
    incident.insert(incident.end(), adj.in.begin(), adj.in.end());
    std::sort(incident.begin(), incident.end());
    incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
    for (EdgeId e : incident) delete_edge(e);
    unindex_node(n);
    adjacency_.erase(id);
    nodes_.erase(id);
  }

  // Replaces the property map of a node, keeping constraints intact.
  void set_node_props(NodeId id, PropertyMap props) {
    const GraphNode& n = node(id);
    check_constraints(n.labels, props, id);
    GraphNode updated = n;
    updated.props = std::move(props);
    unindex_node(n);
    nodes_[id] = std::move(updated);
    index_node(nodes_.at(id));
  }

  void set_node_prop(NodeId id, const std::string& key, PropertyValue value) {
    PropertyMap props = node(id).props;
    props[key] = std::move(value);
    set_node_props(id, std::move(props));
  }

  bool contains(NodeId id) const { return nodes_.count(id) != 0; }

  const GraphNode& node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
      throw Error(ErrorKind::UnknownNode, "unknown node " + std::to_string(id.value));
    }
    return it->second;
  }

  const GraphNode* find(NodeId id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  // Node ids in ascending order.
  std::vector<NodeId> node_ids() const {
    std::vector<NodeId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
  }

  const std::set<NodeId>& nodes_with_label(std::string_view label) const {
    static const std::set<NodeId> empty;
    auto it = label_index_.find(label);
    return it == label_index_.end() ? empty : it->second;
  }

  // Lookup by (label, key=value). Uses the constraint index when one exists
  // and falls back to a label scan; returns the lowest matching id.
  std::optional<NodeId> find_node(std::string_view label, const std::string& key,
                                  const PropertyValue& value) const {
    auto cit = unique_index_.find(UniquenessConstraint{std::string(label), key});
    if (cit != unique_index_.end()) {
      auto hit = cit->second.find(value.index_key());
      if (hit == cit->second.end()) return std::nullopt;
      return hit->second;
    }
    for (NodeId id : nodes_with_label(label)) {
      const PropertyValue* v = nodes_.at(id).prop(key);
      if (v && *v == value) return id;
    }
    return std::nullopt;
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }

  // -- edges -------------------------------------------------------------

  EdgeId create_edge(NodeId from, NodeId to, std::string type, PropertyMap props = {}) {
    if (!contains(from) || !contains(to)) {
      throw Error(ErrorKind::DanglingEndpoint,
                  "edge endpoint " + std::to_string((contains(from) ? to : from).value) +
                      " does not exist");
    }
    if (type.empty()) throw Error(ErrorKind::InvalidArgument, "edge type must not be empty");
    EdgeId id{next_edge_++};
    insert_edge(GraphEdge{id, std::move(type), from, to, std::move(props)});
    return id;
  }

  void delete_edge(EdgeId id) {
    const GraphEdge& e = edge(id);
    erase_from(adjacency_.at(e.from).out, id);
    erase_from(adjacency_.at(e.to).in, id);
    edges_.erase(id);
  }

  void set_edge_props(EdgeId id, PropertyMap props) {
    edge(id);
    edges_.at(id).props = std::move(props);
  }

  bool contains(EdgeId id) const { return edges_.count(id) != 0; }

  const GraphEdge& edge(EdgeId id) const {
    auto it = edges_.find(id);
    if (it == edges_.end()) {
      throw Error(ErrorKind::UnknownEdge, "unknown edge " + std::to_string(id.value));
    }
    return it->second;
  }

  const GraphEdge* find(EdgeId id) const {
    auto it = edges_.find(id);
    return it == edges_.end() ? nullptr : &it->second;
  }

  std::vector<EdgeId> edge_ids() const {
    std::vector<EdgeId> out;
    out.reserve(edges_.size());
    for (const auto& [id, _] : edges_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Adjacency lists are kept in creation order.
  const std::vector<EdgeId>& out_edges(NodeId id) const { return adjacency_.at(checked(id)).out; }
  const std::vector<EdgeId>& in_edges(NodeId id) const { return adjacency_.at(checked(id)).in; }

  // Targets of outgoing edges of `type`, in edge creation order.
  std::vector<NodeId> successors(NodeId id, std::string_view type) const {
    std::vector<NodeId> out;
    for (EdgeId e : out_edges(id)) {
      const GraphEdge& edge = edges_.at(e);
      if (edge.type == type) out.push_back(edge.to);
    }
    return out;
  }

  std::optional<NodeId> predecessor(NodeId id, std::string_view type) const {
    for (EdgeId e : in_edges(id)) {
      const GraphEdge& edge = edges_.at(e);
      if (edge.type == type) return edge.from;
    }
    return std::nullopt;
  }

  std::size_t edge_count() const noexcept { return edges_.size(); }

  // -- constraints -------------------------------------------------------

  void add_constraint(const std::string& label, const std::string& property) {
    UniquenessConstraint c{label, property};
    if (unique_index_.count(c)) return;
    std::unordered_map<std::string, NodeId> index;
    for (NodeId id : nodes_with_label(label)) {
      const PropertyValue* v = nodes_.at(id).prop(property);
      if (!v) continue;
      auto [it, inserted] = index.emplace(v->index_key(), id);
      if (!inserted) {
        throw Error(ErrorKind::PreexistingDuplicates,
                    "existing " + label + " nodes share " + property + "=" + v->display());
      }
    }
    unique_index_.emplace(std::move(c), std::move(index));
  }

  std::vector<UniquenessConstraint> constraints() const {
    std::vector<UniquenessConstraint> out;
    for (const auto& [c, _] : unique_index_) out.push_back(c);
    return out;
  }

  // -- bulk restore (snapshot loading) -----------------------------------

  // Inserts a node with a fixed id. Used by snapshot loading only.
  void restore_node(GraphNode n) {
    validate_labels(n.labels);
    if (contains(n.id)) {
      throw Error(ErrorKind::FormatError, "duplicate node id " + std::to_string(n.id.value));
    }
    check_constraints(n.labels, n.props, std::nullopt);
    next_node_ = std::max(next_node_, n.id.value + 1);
    insert_node(std::move(n));
  }

  void restore_edge(GraphEdge e) {
    if (contains(e.id)) {
      throw Error(ErrorKind::FormatError, "duplicate edge id " + std::to_string(e.id.value));
    }
    if (!contains(e.from) || !contains(e.to)) {
      throw Error(ErrorKind::DanglingEndpoint,
                  "edge " + std::to_string(e.id.value) + " references a missing node");
    }
    next_edge_ = std::max(next_edge_, e.id.value + 1);
    insert_edge(std::move(e));
  }

  std::uint64_t next_node_id() const noexcept { return next_node_; }
  std::uint64_t next_edge_id() const noexcept { return next_edge_; }
  void reserve_ids(std::uint64_t next_node, std::uint64_t next_edge) {
    next_node_ = std::max(next_node_, next_node);
    next_edge_ = std::max(next_edge_, next_edge);
  }

 private:
  struct Adjacency {
    std::vector<EdgeId> out;
    std::vector<EdgeId> in;
  };

  NodeId checked(NodeId id) const {
    if (!contains(id)) {
      throw Error(ErrorKind::UnknownNode, "unknown node " + std::to_string(id.value));
    }
    return id;
  }

  static void validate_labels(const std::vector<std::string>& labels) {
    if (labels.empty()) throw Error(ErrorKind::EmptyLabels, "a node needs at least one label");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].empty()) throw Error(ErrorKind::InvalidArgument, "labels must not be empty");
      for (std::size_t j = 0; j < i; ++j) {
        if (labels[i] == labels[j]) {
          throw Error(ErrorKind::InvalidArgument, "duplicate label " + labels[i]);
        }
      }
    }
  }

  // Throws if storing `props` on a node with `labels` would break a
  // constraint. `self` is ignored when comparing (property updates).
  void check_constraints(const std::vector<std::string>& labels, const PropertyMap& props,
                         std::optional<NodeId> self) const {
    for (const auto& [c, index] : unique_index_) {
      if (std::find(labels.begin(), labels.end(), c.label) == labels.end()) continue;
      auto pit = props.find(c.property);
      if (pit == props.end()) continue;
      auto hit = index.find(pit->second.index_key());
      if (hit != index.end() && (!self || hit->second != *self)) {
        throw Error(ErrorKind::ConstraintViolation,
                    c.label + "." + c.property + "=" + pit->second.display() + " already exists");
      }
    }
  }

  void insert_node(GraphNode n) {
    NodeId id = n.id;
    auto [it, _] = nodes_.emplace(id, std::move(n));
    adjacency_.emplace(id, Adjacency{});
    index_node(it->second);
  }

  void insert_edge(GraphEdge e) {
    EdgeId id = e.id;
    adjacency_.at(e.from).out.push_back(id);
    adjacency_.at(e.to).in.push_back(id);
    edges_.emplace(id, std::move(e));
  }

  void index_node(const GraphNode& n) {
    for (const auto& label : n.labels) label_index_[label].insert(n.id);
    for (auto& [c, index] : unique_index_) {
      if (!n.has_label(c.label)) continue;
      if (const PropertyValue* v = n.prop(c.property)) index.emplace(v->index_key(), n.id);
    }
  }

  void unindex_node(const GraphNode& n) {
    for (const auto& label : n.labels) {
      auto it = label_index_.find(label);
      if (it == label_index_.end()) continue;
      it->second.erase(n.id);
      if (it->second.empty()) label_index_.erase(it);
    }
    for (auto& [c, index] : unique_index_) {
      if (!n.has_label(c.label)) continue;
      if (const PropertyValue* v = n.prop(c.property)) {
        auto hit = index.find(v->index_key());
        if (hit != index.end() && hit->second == n.id) index.erase(hit);
      }
    }
  }

  // Same elements, adjacency order, constraints and id counters.
  friend bool operator==(const GraphStore& a, const GraphStore& b) {
    if (a.next_node_ != b.next_node_ || a.next_edge_ != b.next_edge_) return false;
    if (a.nodes_ != b.nodes_ || a.edges_ != b.edges_) return false;
    if (a.constraints() != b.constraints()) return false;
    for (const auto& [id, adj] : a.adjacency_) {
      auto it = b.adjacency_.find(id);
      if (it == b.adjacency_.end() || it->second.out != adj.out || it->second.in != adj.in) return false;
    }
    return true;
  }

 private:
  static void erase_from(std::vector<EdgeId>& v, EdgeId id) {
    v.erase(std::remove(v.begin(), v.end(), id), v.end());
  }

  std::unordered_map<NodeId, GraphNode, NodeIdHash> nodes_;
  std::unordered_map<EdgeId, GraphEdge, EdgeIdHash> edges_;
  std::unordered_map<NodeId, Adjacency, NodeIdHash> adjacency_;
  std::map<std::string, std::set<NodeId>, std::less<>> label_index_;
  std::map<UniquenessConstraint, std::unordered_map<std::string, NodeId>> unique_index_;
  std::uint64_t next_node_ = 1;
  std::uint64_t next_edge_ = 1;
};

}  // namespace patgraph
