#pragma once

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "patgraph/error.hpp"
#include "patgraph/graph/graph_store.hpp"

namespace patgraph {

enum class Direction { Outgoing, Incoming };

struct NodePattern {
  std::string var;  // empty = anonymous
  std::vector<std::string> labels;
  PropertyMap props;
};

struct EdgePattern {
  std::string var;
  std::optional<std::string> type;
  PropertyMap props;
  Direction direction = Direction::Outgoing;
};

// A node filter plus the edge leading to the next segment's node. The last
// segment of a path carries no edge.
struct PathSegment {
  NodePattern node;
  std::optional<EdgePattern> edge;
};

using PathPattern = std::vector<PathSegment>;

struct PropertyRef {
  std::string var;
  std::string key;
};

using ListLiteral = std::vector<PropertyValue>;
using Operand = std::variant<PropertyValue, PropertyRef, ListLiteral>;

struct Predicate {
  enum class Op { Equals, NotEquals, RegexMatch, In, And, Or, Not };

  Op op = Op::Equals;
  Operand lhs;
  Operand rhs;
  std::vector<Predicate> children;  // And / Or / Not

  static Predicate equals(Operand a, Operand b) { return {Op::Equals, std::move(a), std::move(b), {}}; }
  static Predicate not_equals(Operand a, Operand b) { return {Op::NotEquals, std::move(a), std::move(b), {}}; }
  static Predicate regex(Operand a, Operand b) { return {Op::RegexMatch, std::move(a), std::move(b), {}}; }
  static Predicate in(Operand a, Operand b) { return {Op::In, std::move(a), std::move(b), {}}; }
  static Predicate all(std::vector<Predicate> c) { return {Op::And, {}, {}, std::move(c)}; }
  static Predicate any(std::vector<Predicate> c) { return {Op::Or, {}, {}, std::move(c)}; }
  static Predicate negate(Predicate p) { return {Op::Not, {}, {}, {std::move(p)}}; }
};

struct MatchClause {
  std::vector<PathPattern> paths;
  bool optional = false;
  std::vector<Predicate> where;  // conjunction
};

struct PatternSpec {
  std::vector<MatchClause> clauses;
  std::vector<std::string> returns;  // empty = every named variable
};

// A variable binding; monostate marks an unmatched optional variable.
using Binding = std::variant<std::monostate, NodeId, EdgeId>;

struct MatchResult {
  std::vector<std::string> columns;
  std::vector<std::vector<Binding>> rows;
};

inline bool is_absent(const Binding& b) { return std::holds_alternative<std::monostate>(b); }

// Rows already bound by earlier pipeline stages. Seed variables count as
// bound for planning; `is_edge` gives each column's variable kind.
struct SeedRows {
  std::vector<std::string> columns;
  std::vector<bool> is_edge;
  std::vector<std::vector<Binding>> rows;
};

namespace detail {

// Three-valued predicate evaluation: nullopt is "unknown" (absent operand).
class PredicateEvaluator {
 public:
  using Resolver = std::function<const PropertyValue*(const PropertyRef&)>;

  struct Evaluated {
    const PropertyValue* scalar = nullptr;
    const ListLiteral* list = nullptr;
    bool present() const { return scalar || list; }
  };

  explicit PredicateEvaluator(Resolver resolve) : resolve_(std::move(resolve)) {}

  std::optional<bool> operator()(const Predicate& p) const {
    using Op = Predicate::Op;
    switch (p.op) {
      case Op::And: {
        bool unknown = false;
        for (const auto& c : p.children) {
          auto r = (*this)(c);
          if (r && !*r) return false;
          if (!r) unknown = true;
        }
        if (unknown) return std::nullopt;
        return true;
      }
      case Op::Or: {
        bool unknown = false;
        for (const auto& c : p.children) {
          auto r = (*this)(c);
          if (r && *r) return true;
          if (!r) unknown = true;
        }
        if (unknown) return std::nullopt;
        return false;
      }
      case Op::Not: {
        auto r = (*this)(p.children.front());
        if (!r) return std::nullopt;
        return !*r;
      }
      case Op::Equals:
      case Op::NotEquals: {
        auto a = eval(p.lhs);
        auto b = eval(p.rhs);
        if (!a.present() || !b.present()) return std::nullopt;
        bool eq = values_equal(a, b);
        return p.op == Op::Equals ? eq : !eq;
      }
      case Op::RegexMatch: {
        auto a = eval(p.lhs);
        auto b = eval(p.rhs);
        if (!a.scalar || !b.scalar) return std::nullopt;
        if (!a.scalar->is_text() || !b.scalar->is_text()) return false;
        return std::regex_match(a.scalar->text(), compiled(b.scalar->text()));
      }
      case Op::In: {
        auto a = eval(p.lhs);
        auto b = eval(p.rhs);
        if (!a.scalar || !b.present()) return std::nullopt;
        if (b.list) {
          for (const auto& item : *b.list) {
            if (item == *a.scalar) return true;
          }
          return false;
        }
        if (b.scalar->is_list() && a.scalar->is_text()) {
          const auto& items = b.scalar->list();
          return std::find(items.begin(), items.end(), a.scalar->text()) != items.end();
        }
        return false;
      }
    }
    return std::nullopt;
  }

  // Compiles every regex literal up front so malformed patterns surface as
  // BadRegex before any matching happens.
  static void precompile(const Predicate& p) {
    if (p.op == Predicate::Op::RegexMatch) {
      if (const auto* lit = std::get_if<PropertyValue>(&p.rhs); lit && lit->is_text()) {
        compiled(lit->text());
      }
    }
    for (const auto& c : p.children) precompile(c);
  }

  static const std::regex& compiled(const std::string& pattern) {
    thread_local std::unordered_map<std::string, std::regex> cache;
    auto it = cache.find(pattern);
    if (it != cache.end()) return it->second;
    try {
      return cache.emplace(pattern, std::regex(pattern, std::regex::ECMAScript)).first->second;
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::BadRegex, "invalid regular expression '" + pattern + "': " + e.what());
    }
  }

 private:
  Evaluated eval(const Operand& o) const {
    Evaluated out;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, PropertyValue>) {
            out.scalar = &x;
          } else if constexpr (std::is_same_v<T, PropertyRef>) {
            out.scalar = resolve_(x);
          } else {
            out.list = &x;
          }
        },
        o);
    return out;
  }

  static bool values_equal(const Evaluated& a, const Evaluated& b) {
    if (a.scalar && b.scalar) return *a.scalar == *b.scalar;
    const ListLiteral* lit = a.list ? a.list : b.list;
    const PropertyValue* other = a.list ? b.scalar : a.scalar;
    if (a.list && b.list) return *a.list == *b.list;
    if (!other || !other->is_list()) return false;
    const auto& items = other->list();
    if (items.size() != lit->size()) return false;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!((*lit)[i] == PropertyValue(items[i]))) return false;
    }
    return true;
  }

  Resolver resolve_;
};

inline void collect_vars(const Operand& o, std::set<std::string>& out) {
  if (const auto* r = std::get_if<PropertyRef>(&o)) out.insert(r->var);
}

inline void collect_vars(const Predicate& p, std::set<std::string>& out) {
  collect_vars(p.lhs, out);
  collect_vars(p.rhs, out);
  for (const auto& c : p.children) collect_vars(c, out);
}

inline void flatten_conjuncts(const Predicate& p, std::vector<Predicate>& out) {
  if (p.op == Predicate::Op::And) {
    for (const auto& c : p.children) flatten_conjuncts(c, out);
  } else {
    out.push_back(p);
  }
}

inline bool props_match(const PropertyMap& filter, const PropertyMap& actual) {
  for (const auto& [k, v] : filter) {
    auto it = actual.find(k);
    if (it == actual.end() || !(it->second == v)) return false;
  }
  return true;
}

inline bool node_matches(const NodePattern& p, const GraphNode& n) {
  for (const auto& l : p.labels) {
    if (!n.has_label(l)) return false;
  }
  return props_match(p.props, n.props);
}

inline bool edge_matches(const EdgePattern& p, const GraphEdge& e) {
  if (p.type && e.type != *p.type) return false;
  return props_match(p.props, e.props);
}

// Executes a PatternSpec by backtracking over per-clause plans.
class Matcher {
 public:
  Matcher(const GraphStore& store, const PatternSpec& spec, const SeedRows* seed = nullptr)
      : store_(store), seed_(seed) {
    if (seed_) {
      for (std::size_t i = 0; i < seed_->columns.size(); ++i) {
        bool edge = i < seed_->is_edge.size() && seed_->is_edge[i];
        seed_slots_.push_back(declare_var(seed_->columns[i], edge ? VarKind::Edge : VarKind::Node));
      }
    }
    declare(spec);
    build_plans();
  }

  MatchResult run() {
    std::vector<std::vector<Binding>> rows;
    if (seed_) {
      for (const auto& seed_row : seed_->rows) {
        std::vector<Binding> row(slots_.size());
        for (std::size_t i = 0; i < seed_slots_.size() && i < seed_row.size(); ++i) {
          row[seed_slots_[i]] = seed_row[i];
        }
        rows.push_back(std::move(row));
      }
    } else {
      rows.emplace_back(slots_.size());
    }
    for (const auto& plan : plans_) {
      std::vector<std::vector<Binding>> next;
      for (auto& row : rows) {
        std::size_t before = next.size();
        current_ = row;
        execute(plan, 0, next);
        if (next.size() == before && plan.optional) next.push_back(row);
      }
      rows = std::move(next);
      if (rows.empty()) break;
    }
    MatchResult result;
    result.columns = columns_;
    result.rows.reserve(rows.size());
    for (const auto& row : rows) {
      std::vector<Binding> projected;
      projected.reserve(column_slots_.size());
      for (std::size_t slot : column_slots_) projected.push_back(row[slot]);
      result.rows.push_back(std::move(projected));
    }
    return result;
  }

 private:
  enum class VarKind { Node, Edge };

  struct Slot {
    std::string name;
    VarKind kind;
  };

  struct Step {
    enum class Kind { Visit, Expand } kind;
    // Visit: node at `node` pattern (scan when unbound, check when bound).
    // Expand: from bound node slot `from_slot`, through `edge`, to `node`.
    const NodePattern* node = nullptr;
    std::size_t node_slot = 0;
    const EdgePattern* edge = nullptr;
    std::size_t edge_slot = 0;
    std::size_t from_slot = 0;
    bool reverse = false;  // traverse against the pattern's written order
    bool node_bound = false;
    bool edge_bound = false;
    std::vector<Predicate> checks;  // conjuncts ready after this step
  };

  struct Plan {
    bool optional = false;
    std::vector<Predicate> pre_checks;  // conjuncts over already-bound vars
    std::vector<Step> steps;
  };

  struct ClauseGroup {
    bool optional = false;
    std::vector<const PathPattern*> paths;
    std::vector<Predicate> where;
  };

  std::size_t slot_of(const std::string& name) const { return slot_index_.at(name); }

  std::size_t declare_var(const std::string& name, VarKind kind) {
    std::string key = name;
    if (key.empty()) key = "_anon" + std::to_string(anon_++);
    auto it = slot_index_.find(key);
    if (it != slot_index_.end()) {
      if (slots_[it->second].kind != kind) {
        throw Error(ErrorKind::InvalidArgument,
                    "variable '" + key + "' used as both node and relationship");
      }
      return it->second;
    }
    slot_index_.emplace(key, slots_.size());
    slots_.push_back({key, kind});
    if (!name.empty()) named_.push_back(name);
    return slots_.size() - 1;
  }

  void declare(const PatternSpec& spec) {
    if (spec.clauses.empty() ||
        (!seed_ && std::none_of(spec.clauses.begin(), spec.clauses.end(),
                     [](const MatchClause& c) { return !c.optional; }))) {
      throw Error(ErrorKind::InvalidArgument, "pattern needs at least one mandatory clause");
    }
    for (const auto& clause : spec.clauses) {
      if (clause.paths.empty()) throw Error(ErrorKind::InvalidArgument, "empty match clause");
      for (const auto& path : clause.paths) {
        if (path.empty()) throw Error(ErrorKind::InvalidArgument, "empty path pattern");
        for (std::size_t i = 0; i < path.size(); ++i) {
          const auto& seg = path[i];
          node_slots_[&seg.node] = declare_var(seg.node.var, VarKind::Node);
          bool last = i + 1 == path.size();
          if (seg.edge && last) {
            throw Error(ErrorKind::InvalidArgument, "path ends with a dangling relationship");
          }
          if (!seg.edge && !last) {
            throw Error(ErrorKind::InvalidArgument, "path segments must be joined by a relationship");
          }
          if (seg.edge) edge_slots_[&*seg.edge] = declare_var(seg.edge->var, VarKind::Edge);
        }
      }
      for (const auto& pred : clause.where) {
        std::set<std::string> vars;
        collect_vars(pred, vars);
        for (const auto& v : vars) {
          if (!slot_index_.count(v)) {
            throw Error(ErrorKind::UnknownVariable, "unknown variable '" + v + "'");
          }
        }
        PredicateEvaluator::precompile(pred);
      }
      // Consecutive mandatory clauses form one conjunctive pattern.
      if (!clause.optional && !groups_.empty() && !groups_.back().optional) {
        auto& g = groups_.back();
        for (const auto& p : clause.paths) g.paths.push_back(&p);
        g.where.insert(g.where.end(), clause.where.begin(), clause.where.end());
      } else {
        ClauseGroup g;
        g.optional = clause.optional;
        for (const auto& p : clause.paths) g.paths.push_back(&p);
        g.where = clause.where;
        groups_.push_back(std::move(g));
      }
    }
    if (spec.returns.empty()) {
      columns_ = named_;
    } else {
      for (const auto& r : spec.returns) {
        if (!slot_index_.count(r) || r.rfind("_anon", 0) == 0) {
          throw Error(ErrorKind::UnknownVariable, "unknown variable '" + r + "'");
        }
      }
      columns_ = spec.returns;
    }
    for (const auto& c : columns_) column_slots_.push_back(slot_of(c));
  }

  double estimate(const NodePattern& p) const {
    double best = static_cast<double>(store_.node_count());
    for (const auto& l : p.labels) {
      best = std::min(best, static_cast<double>(store_.nodes_with_label(l).size()));
    }
    if (!p.props.empty()) best = best / 4.0;
    return best;
  }

  void build_plans() {
    std::set<std::size_t> bound(seed_slots_.begin(), seed_slots_.end());
    for (const auto& group : groups_) {
      Plan plan;
      plan.optional = group.optional;
      std::set<std::size_t> local = bound;
      std::vector<const PathPattern*> pending = group.paths;

      while (!pending.empty()) {
        // Prefer a path touching an already-bound node; else the cheapest scan.
        std::size_t best_path = 0, best_pos = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t pi = 0; pi < pending.size(); ++pi) {
          const auto& path = *pending[pi];
          for (std::size_t i = 0; i < path.size(); ++i) {
            double cost = local.count(node_slots_.at(&path[i].node)) ? -1.0 : estimate(path[i].node);
            if (cost < best_cost) {
              best_cost = cost;
              best_path = pi;
              best_pos = i;
            }
          }
        }
        const PathPattern& path = *pending[best_path];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_path));

        Step visit;
        visit.kind = Step::Kind::Visit;
        visit.node = &path[best_pos].node;
        visit.node_slot = node_slots_.at(visit.node);
        visit.node_bound = local.count(visit.node_slot) != 0;
        local.insert(visit.node_slot);
        plan.steps.push_back(std::move(visit));

        auto expand = [&](std::size_t from, std::size_t to) {
          Step s;
          s.kind = Step::Kind::Expand;
          s.from_slot = node_slots_.at(&path[from].node);
          s.node = &path[to].node;
          s.node_slot = node_slots_.at(s.node);
          bool forward = to > from;
          s.edge = &*path[forward ? from : to].edge;
          s.edge_slot = edge_slots_.at(s.edge);
          s.reverse = !forward;
          s.node_bound = local.count(s.node_slot) != 0;
          s.edge_bound = local.count(s.edge_slot) != 0;
          local.insert(s.node_slot);
          local.insert(s.edge_slot);
          plan.steps.push_back(std::move(s));
        };
        for (std::size_t i = best_pos; i + 1 < path.size(); ++i) expand(i, i + 1);
        for (std::size_t i = best_pos; i > 0; --i) expand(i, i - 1);
      }

      // Attach each conjunct to the first step after which all its
      // variables are bound.
      std::vector<Predicate> conjuncts;
      for (const auto& w : group.where) flatten_conjuncts(w, conjuncts);
      std::vector<bool> placed(conjuncts.size(), false);
      auto place = [&](const std::set<std::size_t>& have, std::vector<Predicate>& sink) {
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
          if (placed[i]) continue;
          std::set<std::string> vars;
          collect_vars(conjuncts[i], vars);
          bool ready = std::all_of(vars.begin(), vars.end(),
                                   [&](const std::string& v) { return have.count(slot_of(v)) != 0; });
          if (ready) {
            sink.push_back(conjuncts[i]);
            placed[i] = true;
          }
        }
      };
      place(bound, plan.pre_checks);
      std::set<std::size_t> have = bound;
      for (auto& step : plan.steps) {
        have.insert(step.node_slot);
        if (step.kind == Step::Kind::Expand) have.insert(step.edge_slot);
        place(have, step.checks);
      }
      bound = std::move(local);
      plans_.push_back(std::move(plan));
    }
  }

  const PropertyValue* resolve(const PropertyRef& ref) const {
    const Binding& b = current_[slot_of(ref.var)];
    if (const auto* n = std::get_if<NodeId>(&b)) return store_.node(*n).prop(ref.key);
    if (const auto* e = std::get_if<EdgeId>(&b)) return store_.edge(*e).prop(ref.key);
    return nullptr;
  }

  bool checks_pass(const std::vector<Predicate>& checks) const {
    if (checks.empty()) return true;
    PredicateEvaluator eval([this](const PropertyRef& r) { return resolve(r); });
    for (const auto& c : checks) {
      auto r = eval(c);
      if (!r || !*r) return false;
    }
    return true;
  }

  void execute(const Plan& plan, std::size_t index, std::vector<std::vector<Binding>>& out) {
    if (index == 0 && !checks_pass(plan.pre_checks)) return;
    if (index == plan.steps.size()) {
      out.push_back(current_);
      return;
    }
    const Step& step = plan.steps[index];
    if (step.kind == Step::Kind::Visit) {
      if (step.node_bound) {
        const auto* id = std::get_if<NodeId>(&current_[step.node_slot]);
        if (!id || !node_matches(*step.node, store_.node(*id))) return;
        if (checks_pass(step.checks)) execute(plan, index + 1, out);
        return;
      }
      for (NodeId id : candidates(*step.node)) {
        if (!node_matches(*step.node, store_.node(id))) continue;
        current_[step.node_slot] = id;
        if (checks_pass(step.checks)) execute(plan, index + 1, out);
      }
      current_[step.node_slot] = std::monostate{};
      return;
    }

    const auto* from = std::get_if<NodeId>(&current_[step.from_slot]);
    if (!from) return;
    // Edge stored from->to; pattern direction and traversal order combine.
    bool follow_out = (step.edge->direction == Direction::Outgoing) != step.reverse;
    const auto& edges = follow_out ? store_.out_edges(*from) : store_.in_edges(*from);
    for (EdgeId eid : edges) {
      const GraphEdge& e = store_.edge(eid);
      if (!edge_matches(*step.edge, e)) continue;
      if (step.edge_bound) {
        const auto* bound = std::get_if<EdgeId>(&current_[step.edge_slot]);
        if (!bound || *bound != eid) continue;
      }
      NodeId other = follow_out ? e.to : e.from;
      if (step.node_bound) {
        const auto* bound = std::get_if<NodeId>(&current_[step.node_slot]);
        if (!bound || *bound != other) continue;
      } else if (!node_matches(*step.node, store_.node(other))) {
        continue;
      }
      if (!step.edge_bound) current_[step.edge_slot] = eid;
      if (!step.node_bound) current_[step.node_slot] = other;
      if (checks_pass(step.checks)) execute(plan, index + 1, out);
    }
    if (!step.edge_bound) current_[step.edge_slot] = std::monostate{};
    if (!step.node_bound) current_[step.node_slot] = std::monostate{};
  }

  std::vector<NodeId> candidates(const NodePattern& p) const {
    const std::set<NodeId>* smallest = nullptr;
    for (const auto& l : p.labels) {
      const auto& s = store_.nodes_with_label(l);
      if (!smallest || s.size() < smallest->size()) smallest = &s;
    }
    if (smallest) return {smallest->begin(), smallest->end()};
    if (!p.labels.empty()) return {};
    return store_.node_ids();
  }

  const GraphStore& store_;
  const SeedRows* seed_ = nullptr;
  std::vector<std::size_t> seed_slots_;
  std::vector<Slot> slots_;
  std::unordered_map<std::string, std::size_t> slot_index_;
  std::vector<std::string> named_;
  std::unordered_map<const NodePattern*, std::size_t> node_slots_;
  std::unordered_map<const EdgePattern*, std::size_t> edge_slots_;
  std::vector<ClauseGroup> groups_;
  std::vector<Plan> plans_;
  std::vector<std::string> columns_;
  std::vector<std::size_t> column_slots_;
  std::vector<Binding> current_;
  std::size_t anon_ = 0;
};

}  // namespace detail

// Enumerates every binding of the pattern's variables over `store`.
// Optional clauses that find nothing bind their new variables to absent.
inline MatchResult match_pattern(const GraphStore& store, const PatternSpec& spec) {
  detail::Matcher matcher(store, spec);
  return matcher.run();
}

// Extends each seed row with the pattern's bindings. Columns default to the
// seed columns followed by the pattern's new named variables.
inline MatchResult match_pattern(const GraphStore& store, const PatternSpec& spec, const SeedRows& seed) {
  detail::Matcher matcher(store, spec, &seed);
  return matcher.run();
}

}  // namespace patgraph
