#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "patgraph/error.hpp"
#include "patgraph/graph/graph_store.hpp"
#include "patgraph/graph/pattern.hpp"
#include "patgraph/query/patql.hpp"
#include "nlohmann/json.hpp"

namespace patgraph::query {

// A projected value: a node, a relationship, a property value, or absent.
using Cell = std::variant<std::monostate, NodeId, EdgeId, PropertyValue>;

struct QueryStats {
  std::size_t nodes_created = 0;
  std::size_t edges_created = 0;
  std::size_t constraints_added = 0;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  QueryStats stats;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw Error(ErrorKind::UnknownVariable, "no column '" + name + "'");
  }
};

namespace detail {

struct Pipeline {
  std::vector<std::string> columns;
  std::vector<bool> is_edge;
  std::vector<std::vector<Binding>> rows{std::vector<Binding>{}};

  std::ptrdiff_t find(const std::string& var) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == var) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  }

  std::size_t declare(const std::string& var, bool edge) {
    auto at = find(var);
    if (at >= 0) {
      if (is_edge[static_cast<std::size_t>(at)] != edge) {
        throw Error(ErrorKind::InvalidArgument, "variable '" + var + "' used as both node and relationship");
      }
      return static_cast<std::size_t>(at);
    }
    columns.push_back(var);
    is_edge.push_back(edge);
    for (auto& r : rows) r.emplace_back();
    return columns.size() - 1;
  }
};

inline bool pattern_declares_edge(const std::vector<PathPattern>& paths, const std::string& var) {
  for (const auto& path : paths) {
    for (const auto& seg : path) {
      if (seg.edge && seg.edge->var == var) return true;
    }
  }
  return false;
}

inline void run_match(const GraphStore& store, Pipeline& pipe, const std::vector<MatchClause>& clauses) {
  PatternSpec spec;
  spec.clauses = clauses;
  SeedRows seed{pipe.columns, pipe.is_edge, std::move(pipe.rows)};
  MatchResult r = match_pattern(store, spec, seed);
  std::vector<bool> kinds;
  for (const auto& c : r.columns) {
    auto at = pipe.find(c);
    bool edge = false;
    if (at >= 0) {
      edge = pipe.is_edge[static_cast<std::size_t>(at)];
    } else {
      for (const auto& clause : clauses) edge = edge || pattern_declares_edge(clause.paths, c);
    }
    kinds.push_back(edge);
  }
  pipe.columns = std::move(r.columns);
  pipe.is_edge = std::move(kinds);
  pipe.rows = std::move(r.rows);
}

inline void create_paths(GraphStore& store, Pipeline& pipe, const std::vector<PathPattern>& paths,
                         QueryStats& stats) {
  // Declare first so every row gets slots for the new variables.
  for (const auto& path : paths) {
    for (const auto& seg : path) {
      if (!seg.node.var.empty()) pipe.declare(seg.node.var, false);
      if (seg.edge && !seg.edge->var.empty()) pipe.declare(seg.edge->var, true);
    }
  }
  for (auto& row : pipe.rows) {
    for (const auto& path : paths) {
      std::vector<NodeId> ids;
      for (const auto& seg : path) {
        const NodePattern& np = seg.node;
        std::ptrdiff_t at = np.var.empty() ? -1 : pipe.find(np.var);
        if (at >= 0 && !is_absent(row[static_cast<std::size_t>(at)])) {
          if (!np.labels.empty() || !np.props.empty()) {
            throw Error(ErrorKind::InvalidArgument,
                        "variable '" + np.var + "' is already bound and cannot be redeclared");
          }
          ids.push_back(std::get<NodeId>(row[static_cast<std::size_t>(at)]));
          continue;
        }
        NodeId id = store.create_node(np.labels, np.props);
        ++stats.nodes_created;
        if (at >= 0) row[static_cast<std::size_t>(at)] = id;
        ids.push_back(id);
      }
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const EdgePattern& ep = *path[i].edge;
        if (!ep.type) throw Error(ErrorKind::InvalidArgument, "CREATE needs a relationship type");
        NodeId from = ep.direction == Direction::Outgoing ? ids[i] : ids[i + 1];
        NodeId to = ep.direction == Direction::Outgoing ? ids[i + 1] : ids[i];
        EdgeId e = store.create_edge(from, to, *ep.type, ep.props);
        ++stats.edges_created;
        if (!ep.var.empty()) row[static_cast<std::size_t>(pipe.find(ep.var))] = e;
      }
    }
  }
}

inline void run_merge(GraphStore& store, Pipeline& pipe, const PathPattern& path, QueryStats& stats) {
  Pipeline out;
  out.rows.clear();
  bool shaped = false;
  for (const auto& row : pipe.rows) {
    Pipeline one{pipe.columns, pipe.is_edge, {row}};
    run_match(store, one, {MatchClause{{path}, false, {}}});
    if (one.rows.empty()) {
      one = Pipeline{pipe.columns, pipe.is_edge, {row}};
      create_paths(store, one, {path}, stats);
    }
    if (!shaped) {
      out.columns = one.columns;
      out.is_edge = one.is_edge;
      shaped = true;
    }
    for (auto& r : one.rows) {
      std::vector<Binding> aligned(out.columns.size());
      for (std::size_t i = 0; i < one.columns.size(); ++i) {
        aligned[static_cast<std::size_t>(out.find(one.columns[i]))] = r[i];
      }
      out.rows.push_back(std::move(aligned));
    }
  }
  if (!shaped) {
    // No input rows: keep the column shape, produce nothing.
    out.columns = pipe.columns;
    out.is_edge = pipe.is_edge;
  }
  pipe = std::move(out);
}

inline std::string group_key(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "~";
        else if constexpr (std::is_same_v<T, NodeId>) return "n" + std::to_string(v.value);
        else if constexpr (std::is_same_v<T, EdgeId>) return "e" + std::to_string(v.value);
        else return "v" + v.index_key();
      },
      c);
}

inline ResultTable project(const GraphStore& store, const Pipeline& pipe, const std::vector<ReturnItem>& items) {
  ResultTable out;
  for (const auto& item : items) {
    if (!item.var.empty() && pipe.find(item.var) < 0) {
      throw Error(ErrorKind::UnknownVariable, "unknown variable '" + item.var + "'");
    }
    out.columns.push_back(item.column());
  }
  auto cell_of = [&](const std::vector<Binding>& row, const ReturnItem& item) -> Cell {
    const Binding& b = row[static_cast<std::size_t>(pipe.find(item.var))];
    if (item.kind == ReturnItem::Kind::Variable) {
      if (const auto* n = std::get_if<NodeId>(&b)) return *n;
      if (const auto* e = std::get_if<EdgeId>(&b)) return *e;
      return std::monostate{};
    }
    const PropertyValue* v = nullptr;
    if (const auto* n = std::get_if<NodeId>(&b)) v = store.node(*n).prop(item.key);
    if (const auto* e = std::get_if<EdgeId>(&b)) v = store.edge(*e).prop(item.key);
    if (!v) return std::monostate{};
    return *v;
  };

  bool aggregate = std::any_of(items.begin(), items.end(),
                               [](const ReturnItem& i) { return i.kind == ReturnItem::Kind::Count; });
  if (!aggregate) {
    for (const auto& row : pipe.rows) {
      std::vector<Cell> cells;
      for (const auto& item : items) cells.push_back(cell_of(row, item));
      out.rows.push_back(std::move(cells));
    }
    return out;
  }

  // Non-aggregate items are the grouping key; groups keep first-seen order.
  std::map<std::string, std::size_t> group_index;
  bool has_keys = std::any_of(items.begin(), items.end(),
                              [](const ReturnItem& i) { return i.kind != ReturnItem::Kind::Count; });
  for (const auto& row : pipe.rows) {
    std::string key;
    std::vector<Cell> cells(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].kind == ReturnItem::Kind::Count) continue;
      cells[i] = cell_of(row, items[i]);
      key += group_key(cells[i]) + '\x1f';
    }
    auto [it, fresh] = group_index.emplace(key, out.rows.size());
    if (fresh) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].kind == ReturnItem::Kind::Count) cells[i] = PropertyValue(std::int64_t{0});
      }
      out.rows.push_back(std::move(cells));
    }
    auto& target = out.rows[it->second];
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].kind != ReturnItem::Kind::Count) continue;
      bool counts = items[i].var.empty() ||
                    !is_absent(row[static_cast<std::size_t>(pipe.find(items[i].var))]);
      if (counts) {
        auto& pv = std::get<PropertyValue>(target[i]);
        pv = PropertyValue(pv.as_int() + 1);
      }
    }
  }
  if (out.rows.empty() && !has_keys) {
    out.rows.emplace_back(items.size(), Cell{PropertyValue(std::int64_t{0})});
  }
  return out;
}

template <class Store>
ResultTable run_query(Store& store, const QueryAst& ast) {
  constexpr bool writable = !std::is_const_v<Store>;
  Pipeline pipe;
  QueryStats stats;
  std::vector<MatchClause> pending;
  auto flush = [&] {
    if (pending.empty()) return;
    run_match(store, pipe, pending);
    pending.clear();
  };
  for (const auto& clause : ast.clauses) {
    if (const auto* m = std::get_if<MatchClauseAst>(&clause)) {
      MatchClause mc;
      mc.paths = m->patterns;
      mc.optional = m->optional;
      if (m->where) mc.where.push_back(*m->where);
      pending.push_back(std::move(mc));
      continue;
    }
    flush();
    if constexpr (writable) {
      if (const auto* c = std::get_if<CreateClauseAst>(&clause)) {
        create_paths(store, pipe, c->patterns, stats);
      } else if (const auto* mg = std::get_if<MergeClauseAst>(&clause)) {
        run_merge(store, pipe, mg->pattern, stats);
      } else if (const auto* k = std::get_if<ConstraintClauseAst>(&clause)) {
        store.add_constraint(k->label, k->property);
        ++stats.constraints_added;
      }
    } else {
      throw Error(ErrorKind::ReadOnlyViolation, "query modifies the graph; only read queries are allowed");
    }
  }
  flush();
  ResultTable table = ast.returns.empty() ? ResultTable{} : project(store, pipe, ast.returns);
  table.stats = stats;
  return table;
}

}  // namespace detail

// Read-only execution. Throws ReadOnlyViolation for CREATE / MERGE /
// constraint clauses before touching anything.
inline ResultTable execute_query(const GraphStore& store, const QueryAst& ast) {
  if (!ast.read_only()) {
    throw Error(ErrorKind::ReadOnlyViolation, "query modifies the graph; only read queries are allowed");
  }
  return detail::run_query(store, ast);
}

// Read-write execution. All-or-nothing: mutations run on a copy that
// replaces `store` only when every clause succeeds.
inline ResultTable execute_mutating_query(GraphStore& store, const QueryAst& ast) {
  if (ast.read_only()) return detail::run_query(std::as_const(store), ast);
  GraphStore work = store;
  ResultTable table = detail::run_query(work, ast);
  store = std::move(work);
  return table;
}

inline nlohmann::json cell_to_json(const GraphStore& store, const Cell& c) {
  using nlohmann::json;
  return std::visit(
      [&](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, NodeId>) {
          const GraphNode& n = store.node(v);
          return json{{"id", v.value}, {"labels", n.labels}, {"props", patgraph::to_json(n.props)}};
        } else if constexpr (std::is_same_v<T, EdgeId>) {
          const GraphEdge& e = store.edge(v);
          return json{{"id", v.value},
                      {"type", e.type},
                      {"source", e.from.value},
                      {"target", e.to.value},
                      {"props", patgraph::to_json(e.props)}};
        } else {
          return patgraph::to_json_value(v);
        }
      },
      c);
}

inline nlohmann::json to_json(const GraphStore& store, const ResultTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t i = 0; i < r.size(); ++i) row[t.columns[i]] = cell_to_json(store, r[i]);
    rows.push_back(std::move(row));
  }
  return {{"columns", t.columns},
          {"rows", std::move(rows)},
          {"stats",
           {{"nodes_created", t.stats.nodes_created},
            {"edges_created", t.stats.edges_created},
            {"constraints_added", t.stats.constraints_added}}}};
}

// Text rendering for the CLI: one tab-separated line per row.
inline std::string cell_display(const GraphStore& store, const Cell& c) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "null";
        } else if constexpr (std::is_same_v<T, NodeId>) {
          const GraphNode& n = store.node(v);
          return "(" + n.principal_label() + " #" + std::to_string(v.value) + ")";
        } else if constexpr (std::is_same_v<T, EdgeId>) {
          return "[" + store.edge(v).type + " #" + std::to_string(v.value) + "]";
        } else {
          return v.display();
        }
      },
      c);
}

}  // namespace patgraph::query
