#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "patgraph/fad/fad_store.hpp"
#include "patgraph/graph/graph_store.hpp"
#include "patgraph/graph/pattern.hpp"

namespace testsupport {

using namespace patgraph;
using fad::DesignKind;
using fad::FadStore;

inline std::filesystem::path source_dir() { return PATGRAPH_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "fixtures" / rel; }

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path = std::filesystem::temp_directory_path() / ("patgraph-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& s) const { return path / s; }
};

// latch -[press]-> cover; cover -[separates]-> can body; both steps of f1.
inline NodeId build_corkscrew(FadStore& s, const std::string& id = "corkscrew.sldprt",
                              DesignKind kind = DesignKind::EmergDesign, const std::string& product = "P1",
                              const std::string& prefix = "g") {
  NodeId d = s.upsert_design(kind, id, "Corkscrew");
  NodeId p = s.add_product(d, product, "corkscrew");
  s.add_geometry(p, prefix + "1", "latch", "lever", {"bar", "solid"});
  s.add_geometry(p, prefix + "2", "cover", "lid", {"plate", "solid"});
  s.add_geometry(p, prefix + "3", "can body", "body", {"container", "solid"});
  s.add_fgi(p, prefix + "1", prefix + "2", "press", {"f1"}, "open can");
  s.add_fgi(p, prefix + "2", prefix + "3", "separates", {"f1"}, "open can");
  return d;
}

// ---------------------------------------------------------------------
// Random labeled property graphs.

inline GraphStore random_graph(std::mt19937& rng, std::size_t max_nodes = 10, std::size_t max_edges = 16) {
  static const std::vector<std::string> labels{"A", "B", "C"};
  static const std::vector<std::string> types{"r", "s"};
  static const std::vector<std::string> words{"alpha", "beta", "gamma"};
  GraphStore g;
  std::uniform_int_distribution<std::size_t> nn(1, max_nodes);
  std::size_t n = nn(rng);
  std::vector<NodeId> ids;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> ls{labels[rng() % labels.size()]};
    if (rng() % 4 == 0) {
      std::string extra = labels[rng() % labels.size()];
      if (extra != ls.front()) ls.push_back(extra);
    }
    PropertyMap props;
    if (rng() % 2) props["x"] = static_cast<std::int64_t>(rng() % 3);
    if (rng() % 2) props["w"] = words[rng() % words.size()];
    if (rng() % 4 == 0) props["tags"] = TextList{words[rng() % 3], words[rng() % 3]};
    ids.push_back(g.create_node(ls, props));
  }
  std::size_t m = std::uniform_int_distribution<std::size_t>(0, max_edges)(rng);
  for (std::size_t i = 0; i < m; ++i) {
    PropertyMap props;
    if (rng() % 2) props["x"] = static_cast<std::int64_t>(rng() % 3);
    g.create_edge(ids[rng() % ids.size()], ids[rng() % ids.size()], types[rng() % types.size()], props);
  }
  return g;
}

inline PropertyValue random_literal(std::mt19937& rng) {
  static const std::vector<std::string> words{"alpha", "beta", "gamma"};
  if (rng() % 2) return PropertyValue(static_cast<std::int64_t>(rng() % 3));
  return PropertyValue(words[rng() % words.size()]);
}

inline Predicate random_predicate(std::mt19937& rng, const std::vector<std::string>& vars, int depth = 0) {
  int pick = static_cast<int>(rng() % (depth < 2 ? 8 : 5));
  const std::string& v = vars[rng() % vars.size()];
  const char* key = rng() % 2 ? "x" : "w";
  switch (pick) {
    case 0:
    case 1: return Predicate::equals(PropertyRef{v, key}, random_literal(rng));
    case 2: return Predicate::not_equals(PropertyRef{v, key}, random_literal(rng));
    case 3: {
      static const std::vector<std::string> res{"al.*", ".*a", "b[a-z]+", "gamma"};
      return Predicate::regex(PropertyRef{v, "w"}, PropertyValue(res[rng() % res.size()]));
    }
    case 4: {
      if (rng() % 2) return Predicate::in(random_literal(rng), PropertyRef{v, "tags"});
      return Predicate::in(PropertyRef{v, key}, ListLiteral{random_literal(rng), random_literal(rng)});
    }
    case 5: return Predicate::all({random_predicate(rng, vars, depth + 1), random_predicate(rng, vars, depth + 1)});
    case 6: return Predicate::any({random_predicate(rng, vars, depth + 1), random_predicate(rng, vars, depth + 1)});
    default: return Predicate::negate(random_predicate(rng, vars, depth + 1));
  }
}

// A random pattern over node vars n0..n3: one mandatory clause of one or
// two paths, optionally followed by an optional clause.
inline PatternSpec random_spec(std::mt19937& rng) {
  static const std::vector<std::string> labels{"A", "B", "C"};
  PatternSpec spec;
  std::size_t edge_counter = 0;
  auto random_path = [&](std::size_t max_len, std::vector<std::string>& declared) {
    PathPattern p;
    std::size_t len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i) {
      NodePattern np;
      np.var = "n" + std::to_string(rng() % 4);
      if (rng() % 3 == 0) np.labels = {labels[rng() % labels.size()]};
      if (rng() % 6 == 0) np.props["x"] = static_cast<std::int64_t>(rng() % 3);
      declared.push_back(np.var);
      std::optional<EdgePattern> ep;
      if (i + 1 < len) {
        EdgePattern e;
        e.var = "e" + std::to_string(edge_counter++);
        if (rng() % 2) e.type = rng() % 2 ? "r" : "s";
        e.direction = rng() % 2 ? Direction::Outgoing : Direction::Incoming;
        if (rng() % 8 == 0) e.props["x"] = static_cast<std::int64_t>(rng() % 3);
        ep = e;
      }
      p.push_back({np, ep});
    }
    return p;
  };
  std::vector<std::string> declared;
  MatchClause main;
  main.paths.push_back(random_path(3, declared));
  if (rng() % 3 == 0) main.paths.push_back(random_path(2, declared));
  if (rng() % 2) main.where.push_back(random_predicate(rng, declared));
  spec.clauses.push_back(main);
  if (rng() % 3 == 0) {
    MatchClause opt;
    opt.optional = true;
    std::vector<std::string> vars = declared;
    opt.paths.push_back(random_path(2, vars));
    if (rng() % 2) opt.where.push_back(random_predicate(rng, vars));
    spec.clauses.push_back(opt);
  }
  return spec;
}

// ---------------------------------------------------------------------
// Nested-loop pattern oracle, independent of the library's matcher.

struct OracleEval {
  const GraphStore& g;
  const std::map<std::string, std::variant<std::monostate, NodeId, EdgeId>>& env;

  std::optional<PropertyValue> resolve(const Operand& o) const {
    if (const auto* v = std::get_if<PropertyValue>(&o)) return *v;
    if (const auto* r = std::get_if<PropertyRef>(&o)) {
      auto it = env.find(r->var);
      if (it == env.end()) return std::nullopt;
      const PropertyMap* props = nullptr;
      if (const auto* n = std::get_if<NodeId>(&it->second)) props = &g.node(*n).props;
      if (const auto* e = std::get_if<EdgeId>(&it->second)) props = &g.edge(*e).props;
      if (!props) return std::nullopt;
      auto p = props->find(r->key);
      if (p == props->end()) return std::nullopt;
      return p->second;
    }
    return std::nullopt;
  }

  static bool same(const PropertyValue& a, const PropertyValue& b) {
    if (a.is_number() && b.is_number()) return a.as_double() == b.as_double();
    if (a.is_text() && b.is_text()) return a.text() == b.text();
    if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_list() && b.is_list()) return a.list() == b.list();
    return false;
  }

  // 0 false, 1 true, 2 unknown
  int eval(const Predicate& p) const {
    using Op = Predicate::Op;
    switch (p.op) {
      case Op::And: {
        int r = 1;
        for (const auto& c : p.children) {
          int x = eval(c);
          if (x == 0) return 0;
          if (x == 2) r = 2;
        }
        return r;
      }
      case Op::Or: {
        int r = 0;
        for (const auto& c : p.children) {
          int x = eval(c);
          if (x == 1) return 1;
          if (x == 2) r = 2;
        }
        return r;
      }
      case Op::Not: {
        int x = eval(p.children.front());
        return x == 2 ? 2 : 1 - x;
      }
      default: break;
    }
    if (p.op == Op::In && std::holds_alternative<ListLiteral>(p.rhs)) {
      auto a = resolve(p.lhs);
      if (!a) return 2;
      for (const auto& item : std::get<ListLiteral>(p.rhs)) {
        if (same(*a, item)) return 1;
      }
      return 0;
    }
    auto a = resolve(p.lhs);
    auto b = resolve(p.rhs);
    if (!a || !b) return 2;
    switch (p.op) {
      case Op::Equals: return same(*a, *b) ? 1 : 0;
      case Op::NotEquals: return same(*a, *b) ? 0 : 1;
      case Op::RegexMatch:
        if (!a->is_text() || !b->is_text()) return 0;
        return std::regex_match(a->text(), std::regex(b->text())) ? 1 : 0;
      case Op::In:
        if (b->is_list() && a->is_text()) {
          for (const auto& s : b->list()) {
            if (s == a->text()) return 1;
          }
        }
        return 0;
      default: return 0;
    }
  }
};

using OracleRow = std::map<std::string, std::variant<std::monostate, NodeId, EdgeId>>;

inline bool props_ok(const PropertyMap& want, const PropertyMap& have) {
  for (const auto& [k, v] : want) {
    auto it = have.find(k);
    if (it == have.end() || !OracleEval::same(v, it->second)) return false;
  }
  return true;
}

// Extends `row` with every assignment of the clause's unbound variables:
// node variables range over all nodes, edge variables over all edges.
inline std::vector<OracleRow> oracle_extend(const GraphStore& g, const OracleRow& row,
                                            const std::vector<PathPattern>& paths,
                                            const std::vector<Predicate>& where) {
  std::vector<std::string> node_vars, edge_vars;
  std::size_t anon = 0;
  std::vector<PathPattern> named = paths;
  for (auto& path : named) {
    for (auto& seg : path) {
      if (seg.node.var.empty()) seg.node.var = "#a" + std::to_string(anon++);
      if (!row.count(seg.node.var) &&
          std::find(node_vars.begin(), node_vars.end(), seg.node.var) == node_vars.end()) {
        node_vars.push_back(seg.node.var);
      }
      if (seg.edge) {
        if (seg.edge->var.empty()) seg.edge->var = "#e" + std::to_string(anon++);
        if (!row.count(seg.edge->var) &&
            std::find(edge_vars.begin(), edge_vars.end(), seg.edge->var) == edge_vars.end()) {
          edge_vars.push_back(seg.edge->var);
        }
      }
    }
  }
  std::vector<NodeId> nodes = g.node_ids();
  std::vector<EdgeId> edges = g.edge_ids();
  std::vector<OracleRow> out;
  OracleRow cur = row;

  // Constraints on one node variable across every occurrence.
  auto node_ok = [&](const std::string& var) {
    const GraphNode& node = g.node(std::get<NodeId>(cur.at(var)));
    for (const auto& path : named) {
      for (const auto& seg : path) {
        if (seg.node.var != var) continue;
        for (const auto& l : seg.node.labels) {
          if (std::find(node.labels.begin(), node.labels.end(), l) == node.labels.end()) return false;
        }
        if (!props_ok(seg.node.props, node.props)) return false;
      }
    }
    return true;
  };
  // Constraints on one edge variable; all node variables are bound by now.
  auto edge_ok = [&](const std::string& var) {
    const GraphEdge& edge = g.edge(std::get<EdgeId>(cur.at(var)));
    for (const auto& path : named) {
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (path[i].edge->var != var) continue;
        const auto* a = std::get_if<NodeId>(&cur.at(path[i].node.var));
        const auto* b = std::get_if<NodeId>(&cur.at(path[i + 1].node.var));
        if (!a || !b) return false;
        NodeId from = path[i].edge->direction == Direction::Outgoing ? *a : *b;
        NodeId to = path[i].edge->direction == Direction::Outgoing ? *b : *a;
        if (edge.from != from || edge.to != to) return false;
        if (path[i].edge->type && edge.type != *path[i].edge->type) return false;
        if (!props_ok(path[i].edge->props, edge.props)) return false;
      }
    }
    return true;
  };
  // Pre-bound variables must still satisfy this clause's filters.
  auto bound_ok = [&]() {
    for (const auto& [var, b] : row) {
      if (const auto* n = std::get_if<NodeId>(&b)) {
        (void)n;
        if (!node_ok(var)) return false;
      } else if (std::holds_alternative<std::monostate>(b)) {
        for (const auto& path : named) {
          for (const auto& seg : path) {
            if (seg.node.var == var || (seg.edge && seg.edge->var == var)) return false;
          }
        }
      }
    }
    return true;
  };
  auto check = [&]() {
    for (const auto& [var, b] : row) {
      if (std::holds_alternative<EdgeId>(b) && !edge_ok(var)) return false;
    }
    for (const auto& path : named) {
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!edge_ok(path[i].edge->var)) return false;
      }
    }
    OracleEval ev{g, cur};
    for (const auto& w : where) {
      if (ev.eval(w) != 1) return false;
    }
    return true;
  };
  if (!bound_ok()) return out;

  std::function<void(std::size_t)> edges_loop = [&](std::size_t i) {
    if (i == edge_vars.size()) {
      if (check()) {
        OracleRow r = cur;
        for (auto it = r.begin(); it != r.end();) it = it->first[0] == '#' ? r.erase(it) : std::next(it);
        out.push_back(std::move(r));
      }
      return;
    }
    for (EdgeId e : edges) {
      cur[edge_vars[i]] = e;
      if (edge_ok(edge_vars[i])) edges_loop(i + 1);
    }
    cur.erase(edge_vars[i]);
  };
  std::function<void(std::size_t)> nodes_loop = [&](std::size_t i) {
    if (i == node_vars.size()) {
      edges_loop(0);
      return;
    }
    for (NodeId n : nodes) {
      cur[node_vars[i]] = n;
      if (node_ok(node_vars[i])) nodes_loop(i + 1);
    }
    cur.erase(node_vars[i]);
  };
  nodes_loop(0);
  return out;
}

inline std::vector<std::string> named_vars(const PatternSpec& spec) {
  std::vector<std::string> out;
  for (const auto& c : spec.clauses) {
    for (const auto& p : c.paths) {
      for (const auto& seg : p) {
        if (!seg.node.var.empty() && std::find(out.begin(), out.end(), seg.node.var) == out.end()) {
          out.push_back(seg.node.var);
        }
        if (seg.edge && !seg.edge->var.empty() &&
            std::find(out.begin(), out.end(), seg.edge->var) == out.end()) {
          out.push_back(seg.edge->var);
        }
      }
    }
  }
  return out;
}

// Rows as sorted tuples of binding keys over `columns`.
using RowKey = std::vector<std::string>;

inline std::string binding_key(const std::variant<std::monostate, NodeId, EdgeId>& b) {
  if (const auto* n = std::get_if<NodeId>(&b)) return "n" + std::to_string(n->value);
  if (const auto* e = std::get_if<EdgeId>(&b)) return "e" + std::to_string(e->value);
  return "-";
}

inline std::multiset<RowKey> oracle_match(const GraphStore& g, const PatternSpec& spec,
                                          const std::vector<std::string>& columns) {
  std::vector<OracleRow> rows{OracleRow{}};
  // Consecutive mandatory clauses join into one conjunctive pattern.
  std::size_t i = 0;
  while (i < spec.clauses.size()) {
    std::vector<PathPattern> paths;
    std::vector<Predicate> where;
    bool optional = spec.clauses[i].optional;
    do {
      paths.insert(paths.end(), spec.clauses[i].paths.begin(), spec.clauses[i].paths.end());
      where.insert(where.end(), spec.clauses[i].where.begin(), spec.clauses[i].where.end());
      ++i;
    } while (!optional && i < spec.clauses.size() && !spec.clauses[i].optional);
    std::vector<OracleRow> next;
    for (const auto& r : rows) {
      auto ext = oracle_extend(g, r, paths, where);
      if (ext.empty() && optional) {
        OracleRow absent = r;
        for (const auto& p : paths) {
          for (const auto& seg : p) {
            if (!seg.node.var.empty() && !absent.count(seg.node.var)) absent[seg.node.var] = std::monostate{};
            if (seg.edge && !seg.edge->var.empty() && !absent.count(seg.edge->var)) {
              absent[seg.edge->var] = std::monostate{};
            }
          }
        }
        next.push_back(std::move(absent));
      }
      next.insert(next.end(), ext.begin(), ext.end());
    }
    rows = std::move(next);
  }
  std::multiset<RowKey> out;
  for (const auto& r : rows) {
    RowKey k;
    for (const auto& c : columns) {
      auto it = r.find(c);
      k.push_back(it == r.end() ? "-" : binding_key(it->second));
    }
    out.insert(std::move(k));
  }
  return out;
}

inline std::multiset<RowKey> result_rows(const MatchResult& r) {
  std::multiset<RowKey> out;
  for (const auto& row : r.rows) {
    RowKey k;
    for (const auto& b : row) k.push_back(binding_key(b));
    out.insert(std::move(k));
  }
  return out;
}

// ---------------------------------------------------------------------
// Random FAD corpora (<= 50 nodes).

inline const std::vector<std::string>& type_pool() {
  static const std::vector<std::string> v{"lever", "lid", "body", "gear", "spring", "plate"};
  return v;
}
inline const std::vector<std::string>& action_pool() {
  static const std::vector<std::string> v{"press", "separates", "rotates", "Push", "holds"};
  return v;
}
inline const std::vector<std::string>& name_pool() {
  static const std::vector<std::string> v{"latch", "cover", "handle", "arm", "cap", "shaft"};
  return v;
}

inline fad::Lexicon random_lexicon(std::mt19937& rng) {
  fad::Lexicon lex;
  lex.put({fad::TermCategory::GeometryType, "lever", "general", 1, "bar", {"arm", "Handle"}, false});
  lex.put({fad::TermCategory::GeometryType, "lid", "general", 1, "plate", {"cover"}, false});
  lex.put({fad::TermCategory::Action, "press", "general", 1, "", {"push"}, false});
  if (rng() % 2) lex.put({fad::TermCategory::GeometryType, "cap", "general", 0, "", {"lid"}, false});
  if (rng() % 2) lex.put({fad::TermCategory::FunctionVerb, "open", "general", 0, "", {"f1"}, false});
  return lex;
}

inline FadStore random_fad_store(std::mt19937& rng, std::size_t designs = 0) {
  FadStore s(GraphStore{}, random_lexicon(rng));
  if (designs == 0) designs = 2 + rng() % 4;
  static const std::vector<std::string> titles{"Corkscrew", "lever press", "Lid opener", "gear box"};
  std::size_t product_counter = 0;
  for (std::size_t d = 0; d < designs; ++d) {
    DesignKind kind = rng() % 3 == 0 ? DesignKind::EmergDesign : DesignKind::Patent;
    std::string id = (kind == DesignKind::Patent ? "US" : "D") + std::to_string(100 + d);
    NodeId dn = s.upsert_design(kind, id, titles[rng() % titles.size()]);
    NodeId p = s.add_product(dn, "P" + std::to_string(product_counter++), name_pool()[rng() % name_pool().size()]);
    std::size_t ng = 1 + rng() % 4;
    for (std::size_t i = 0; i < ng; ++i) {
      s.add_geometry(p, "g" + std::to_string(i), name_pool()[rng() % name_pool().size()],
                     type_pool()[rng() % type_pool().size()]);
    }
    std::size_t nf = rng() % 5;
    for (std::size_t i = 0; i < nf; ++i) {
      std::vector<std::string> fids{"f" + std::to_string(1 + rng() % 3)};
      if (rng() % 3 == 0) fids.push_back("f1_b" + std::to_string(1 + rng() % 2));
      std::sort(fids.begin(), fids.end());
      fids.erase(std::unique(fids.begin(), fids.end()), fids.end());
      std::optional<std::string> fname;
      if (rng() % 2) fname = rng() % 2 ? "open can" : "Press";
      s.add_fgi(p, "g" + std::to_string(rng() % ng), "g" + std::to_string(rng() % ng),
                action_pool()[rng() % action_pool().size()], fids, fname);
    }
  }
  return s;
}

}  // namespace testsupport
