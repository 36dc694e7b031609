// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "dot_check.hpp"
#include "listings.hpp"
#include "patgraph/fad/annotation_csv.hpp"
#include "patgraph/graph/snapshot.hpp"
#include "patgraph/query/executor.hpp"
#include "patgraph/query/patql.hpp"
#include "patgraph/query/search.hpp"
#include "patgraph/scoring/scoring.hpp"
#include "patgraph/viz/dot.hpp"
#include "scoring_oracle.hpp"
#include "search_oracle.hpp"
#include "support.hpp"

using namespace patgraph;
namespace L = testsupport::listings;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

NodePattern N(std::string v, std::vector<std::string> l = {}, PropertyMap p = {}) { return {v, l, p}; }
EdgePattern E(std::string v, std::string t) { return {v, t, {}, Direction::Outgoing}; }
PathPattern P(NodePattern a, EdgePattern e, NodePattern b) { return {{a, e}, {b, std::nullopt}}; }

std::multiset<testsupport::RowKey> table_rows(const query::ResultTable& t) {
  std::multiset<testsupport::RowKey> out;
  for (const auto& row : t.rows) {
    testsupport::RowKey k;
    for (const auto& c : row) {
      if (const auto* n = std::get_if<NodeId>(&c)) k.push_back(testsupport::binding_key(*n));
      else if (const auto* e = std::get_if<EdgeId>(&c)) k.push_back(testsupport::binding_key(*e));
      else if (const auto* v = std::get_if<PropertyValue>(&c)) k.push_back("v" + v->display());
      else k.push_back("-");
    }
    out.insert(std::move(k));
  }
  return out;
}

// Id-free description of a binding, for comparing stores rebuilt from CSV.
std::string content_key(const GraphStore& g, const Binding& b) {
  if (const auto* n = std::get_if<NodeId>(&b)) {
    const GraphNode& node = g.node(*n);
    auto labels = node.labels;
    std::sort(labels.begin(), labels.end());
    return nlohmann::json(labels).dump() + to_json(node.props).dump();
  }
  if (const auto* e = std::get_if<EdgeId>(&b)) {
    const GraphEdge& edge = g.edge(*e);
    return edge.type + to_json(edge.props).dump() + "<" + content_key(g, edge.from) + ">";
  }
  return "-";
}

// Every design with its products, geometries and optional outgoing FGIs.
PatternSpec full_model_pattern() {
  PatternSpec spec;
  spec.clauses.push_back({{P(N("d"), E("", "hasProduct"), N("pr"))}, false, {}});
  spec.clauses.push_back({{P(N("pr"), E("", "hasGeometry"), N("g1"))}, true, {}});
  spec.clauses.push_back({{P(N("g1"), E("r", "hasFGI"), N("g2"))}, true, {}});
  spec.clauses.push_back({{P(N("pr"), E("", "hasClaim"), N("c"))}, true, {}});
  spec.returns = {"d", "pr", "g1", "r", "g2", "c"};
  return spec;
}

std::multiset<std::vector<std::string>> content_rows(const GraphStore& g) {
  auto r = match_pattern(g, full_model_pattern());
  std::multiset<std::vector<std::string>> out;
  for (const auto& row : r.rows) {
    std::vector<std::string> k;
    for (const auto& b : row) k.push_back(content_key(g, b));
    out.insert(std::move(k));
  }
  return out;
}

fad::FadStore fixture_store() {
  fad::FadStore s(GraphStore{}, fad::Lexicon::load(testsupport::fixture("lexicon.csv")));
  auto report = fad::import_annotation_csv(s, fad::read_bundle(testsupport::fixture("corkscrew")));
  if (report.errors() != 0) throw std::runtime_error("fixture import reported errors");
  return s;
}

Outcome corkscrew_round_trip() {
  auto t0 = Clock::now();
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  auto m = s.get_fad("corkscrew.sldprt");
  auto fns = m.functions();
  double t = seconds_since(t0);
  bool ok = m.products.size() == 1 && m.geometry_count() == 3 && m.fgi_count() == 2 && fns.size() == 1 &&
            fns.count("f1") && fns.at("f1").size() == 2 && t < 1.0;
  return {ok, "products=" + std::to_string(m.products.size()) + " geometries=" + std::to_string(m.geometry_count()) +
                  " fgis=" + std::to_string(m.fgi_count()) + " functions=" + std::to_string(fns.size()) +
                  " time=" + fmt(t) + "s"};
}

Outcome match_rank_arithmetic() {
  auto formula = [](double g, double f, double fn) { return (g * 10 + f * 20 + fn * 30) / 60; };
  double a = scoring::match_rank({0, 0, 0});
  double b = scoring::match_rank({2, 1, 0});
  double c = scoring::match_rank({2, 1, 1});
  bool ok = std::abs(a - formula(0, 0, 0)) <= 1e-9 && std::abs(b - formula(2, 1, 0)) <= 1e-9 &&
            std::abs(c - formula(2, 1, 1)) <= 1e-9 && std::abs(b - 0.666667) < 1e-6 &&
            std::abs(c - 1.166667) < 1e-6;
  return {ok, fmt(a) + " " + fmt(b) + " " + fmt(c)};
}

Outcome normalization() {
  bool ok = scoring::normalize_scores({0.2, 0.5, 0.8}) == std::vector<double>{0.0, 0.5, 1.0} &&
            scoring::normalize_scores({0.4, 0.4}) == std::vector<double>{1.0, 1.0};
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> v(1 + rng() % 12);
    for (auto& x : v) x = d(rng);
    auto n = scoring::normalize_scores(v);
    for (std::size_t a = 0; a < v.size(); ++a) {
      if (n[a] < 0.0 || n[a] > 1.0) ++bad;
      for (std::size_t b = 0; b < v.size(); ++b) {
        if (v[a] < v[b] && n[a] > n[b]) ++bad;
      }
    }
  }
  return {ok && bad == 0, "random violations=" + std::to_string(bad)};
}

Outcome self_max_and_symmetry() {
  std::mt19937 rng(777);
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    auto s = testsupport::random_fad_store(rng, 2);
    auto ds = s.designs();
    auto a = s.get_fad(ds[0].node);
    auto b = s.get_fad(ds[1].node);
    auto ab = scoring::compute_overlap(a, b).counts;
    if (ab != scoring::compute_overlap(b, a).counts) ++bad;
    if (ab != testsupport::oracle_counts(a, b)) ++bad;
    if (scoring::match_rank(scoring::compute_overlap(a, a).counts) + 1e-12 < scoring::match_rank(ab)) ++bad;
  }
  return {bad == 0, "violations=" + std::to_string(bad)};
}

Outcome search_oracles() {
  auto t0 = Clock::now();
  std::mt19937 rng(424242);
  int bad = 0;
  std::size_t max_nodes = 0;
  for (int c = 0; c < 50; ++c) {
    auto store = testsupport::random_fad_store(rng);
    max_nodes = std::max(max_nodes, store.graph().node_count());
    for (int k = 0; k < 4; ++k) {
      auto kws = testsupport::random_keywords(rng);
      bool expand = rng() % 2;
      if (!testsupport::same_ranking(testsupport::ranking_of(query::fulltext_search(store, kws, expand)),
                                     testsupport::oracle_fulltext(store, kws, expand))) {
        ++bad;
      }
      auto sq = testsupport::random_semantic(rng);
      if (!testsupport::same_ranking(testsupport::ranking_of(query::semantic_search(store, sq)),
                                     testsupport::oracle_semantic(store, sq))) {
        ++bad;
      }
      auto fq = testsupport::random_fgi_query(rng);
      auto got = query::fgi_pattern_search(store, fq);
      auto want = testsupport::oracle_fgi(store, fq);
      std::map<std::string, std::size_t> per(got.per_design.begin(), got.per_design.end());
      if (got.total() != want.first || per != want.second) ++bad;
    }
  }
  double t = seconds_since(t0);
  return {bad == 0 && t < 30.0 && max_nodes <= 50,
          "mismatches=" + std::to_string(bad) + " max_nodes=" + std::to_string(max_nodes) + " time=" + fmt(t) + "s"};
}

Outcome pattern_oracle() {
  std::mt19937 rng(20240611);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    GraphStore g = testsupport::random_graph(rng, 8, 12);
    PatternSpec spec = testsupport::random_spec(rng);
    MatchResult got = match_pattern(g, spec);
    if (testsupport::result_rows(got) != testsupport::oracle_match(g, spec, got.columns)) ++bad;
  }
  return {bad == 0, "discrepancies=" + std::to_string(bad)};
}

Outcome patql_listings() {
  for (const auto* text : {&L::kRetrieval, &L::kConstraints, &L::kCreateGeometry, &L::kCreateFgi,
                           &L::kFunctionStructure, &L::kLevelTwo, &L::kLevelTwoPerDesign}) {
    query::parse_query(*text);
  }
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  const GraphStore& g = s.graph();

  PatternSpec retrieval;
  retrieval.clauses.push_back({{{{N("p", {"emergDesign"}, {{"filename", "corkscrew.sldprt"}}), std::nullopt}}}, false, {}});
  retrieval.clauses.push_back({{P(N("p"), E("", "hasProduct"), N("pr", {"product"}))}, true, {}});
  retrieval.clauses.push_back({{P(N("pr"), E("", "hasClaim"), N("c"))}, true, {}});
  retrieval.clauses.push_back({{P(N("pr"), E("", "hasGeometry"), N("g1"))}, true, {}});
  retrieval.clauses.push_back({{P(N("g1"), E("fr", "hasFGI"), N("g2"))}, true, {}});
  retrieval.returns = {"p", "pr", "c", "g1", "fr", "g2"};
  bool retrieval_ok = table_rows(query::execute_query(g, query::parse_query(L::kRetrieval))) ==
                      testsupport::result_rows(match_pattern(g, retrieval));

  PatternSpec structure;
  structure.clauses.push_back({{P(N("g1"), E("r1", "hasFGI"), N("g2"))}, false,
                               {Predicate::in(PropertyValue("f1"), PropertyRef{"r1", "Function_IDs"})}});
  structure.clauses.push_back({{P(N("p"), E("", "hasProduct"), N("pr"))}, false, {}});
  structure.clauses.push_back({{P(N("pr"), E("", "hasGeometry"), N("g1"))}, false, {}});
  structure.returns = {"p", "pr", "g1", "r1", "g2"};
  bool structure_ok = table_rows(query::execute_query(g, query::parse_query(L::kFunctionStructure))) ==
                      testsupport::result_rows(match_pattern(g, structure));

  PatternSpec level_two;
  level_two.clauses.push_back({{P(N("p"), E("", "hasProduct"), N("pr"))}, false, {}});
  level_two.clauses.push_back({{P(N("pr"), E("", "hasGeometry"), N("g1"))}, false, {}});
  level_two.clauses.push_back(
      {{P(N("g1"), E("r1", "hasFGI"), N("g2"))},
       false,
       {Predicate::regex(PropertyRef{"g1", "PatMine_type"}, PropertyValue(".*lev.*")),
        Predicate::regex(PropertyRef{"g2", "PatMine_type"}, PropertyValue(".*lid.*")),
        Predicate::equals(PropertyRef{"r1", "action"}, PropertyValue("press")),
        Predicate::in(PropertyValue("f1"), PropertyRef{"r1", "Function_IDs"})}});
  level_two.returns = {"p", "pr", "g1", "r1", "g2"};
  auto lt = query::execute_query(g, query::parse_query(L::kLevelTwo));
  auto lt_pattern = match_pattern(g, level_two);
  bool level_two_ok = lt.rows.size() == lt_pattern.rows.size();

  // Creation listings go through the write path on a copy.
  GraphStore w = g;
  query::execute_mutating_query(w, query::parse_query(L::kConstraints));
  query::execute_mutating_query(w, query::parse_query(L::kCreateGeometry));
  query::execute_mutating_query(w, query::parse_query(L::kCreateFgi));
  auto created = fad::FadStore(w).get_fad("corkscrew.sldprt");
  bool create_ok = created.geometry_count() == 4 && created.fgi_count() == 3;

  auto per_design = query::execute_query(g, query::parse_query(L::kLevelTwoPerDesign));
  std::int64_t count = per_design.rows.size() == 1 ? std::get<PropertyValue>(per_design.rows[0][1]).as_int() : -1;
  bool ok = retrieval_ok && structure_ok && level_two_ok && create_ok && count == 2;
  return {ok, std::string("retrieval=") + (retrieval_ok ? "ok" : "bad") + " structure=" + (structure_ok ? "ok" : "bad") +
                  " level2=" + (level_two_ok ? "ok" : "bad") + " create=" + (create_ok ? "ok" : "bad") +
                  " count(r1)=" + std::to_string(count)};
}

Outcome constraint_enforcement() {
  GraphStore g;
  g.add_constraint("patent", "Patent_Number");
  g.create_node({"patent"}, {{"Patent_Number", PropertyValue("US1")}});
  GraphStore before = g;
  bool rejected = false;
  try {
    g.create_node({"patent"}, {{"Patent_Number", PropertyValue("US1")}});
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::ConstraintViolation;
  }
  bool unchanged = g == before;

  // Same through the store facade and through PatQL.
  fad::FadStore s;
  s.upsert_design(fad::DesignKind::Patent, "US9", "t");
  GraphStore q = s.graph();
  GraphStore q_before = q;
  bool patql_rejected = false;
  try {
    query::execute_mutating_query(q, query::parse_query("create (p:patent {Patent_Number: \"US9\"})"));
  } catch (const Error& e) {
    patql_rejected = e.kind() == ErrorKind::ConstraintViolation;
  }
  bool ok = rejected && unchanged && patql_rejected && q == q_before;
  return {ok, std::string("rejected=") + (rejected ? "yes" : "no") + " unchanged=" + (unchanged ? "yes" : "no") +
                  " patql_rejected=" + (patql_rejected ? "yes" : "no")};
}

Outcome persistence_round_trips() {
  auto s = fixture_store();
  testsupport::TempDir dir;
  snapshot_save(s.graph(), dir / "store.snapshot");
  GraphStore loaded = snapshot_load(dir / "store.snapshot");
  auto spec = full_model_pattern();
  bool snapshot_ok = loaded == s.graph() && testsupport::result_rows(match_pattern(loaded, spec)) ==
                                                testsupport::result_rows(match_pattern(s.graph(), spec));

  fad::FadStore rebuilt(GraphStore{}, s.lexicon());
  std::size_t errors = 0;
  for (const auto& d : s.designs()) {
    errors += fad::import_annotation_csv(rebuilt, fad::export_annotation_csv(s, d.node)).errors();
  }
  bool models_ok = true;
  for (const auto& d : s.designs()) {
    models_ok = models_ok && fad::to_json(rebuilt.get_fad(d.unique_id, d.kind)) == fad::to_json(s.get_fad(d.node));
  }
  bool csv_ok = errors == 0 && models_ok && content_rows(rebuilt.graph()) == content_rows(s.graph());
  return {snapshot_ok && csv_ok,
          std::string("snapshot=") + (snapshot_ok ? "ok" : "bad") + " csv=" + (csv_ok ? "ok" : "bad") +
              " rows=" + std::to_string(match_pattern(s.graph(), spec).rows.size())};
}

Outcome dot_validity() {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  auto counts = testsupport::validate_dot(viz::to_dot(s.get_fad("corkscrew.sldprt")));
  if (!counts) return {false, "no DOT processor accepted the output"};
  return {counts->nodes == 3 && counts->edges == 2, "validator=" + counts->validator + " nodes=" +
                                                        std::to_string(counts->nodes) +
                                                        " edges=" + std::to_string(counts->edges)};
}

Outcome scale_smoke() {
  std::mt19937 rng(1000);
  fad::FadStore s;
  for (std::size_t d = 0; d < 1000; ++d) {
    NodeId dn = s.upsert_design(fad::DesignKind::Patent, "US" + std::to_string(2000000 + d), "synthetic");
    NodeId p = s.add_product(dn, "S" + std::to_string(d), "product");
    for (int i = 0; i < 20; ++i) {
      s.add_geometry(p, "g" + std::to_string(i), "part", testsupport::type_pool()[rng() % testsupport::type_pool().size()]);
    }
    for (int i = 0; i < 15; ++i) {
      s.add_fgi(p, "g" + std::to_string(rng() % 20), "g" + std::to_string(rng() % 20),
                testsupport::action_pool()[rng() % testsupport::action_pool().size()],
                {"f" + std::to_string(1 + rng() % 4)});
    }
  }
  auto t0 = Clock::now();
  auto ranking = scoring::score_corpus(s, "US2000000");
  double score_time = seconds_since(t0);
  auto ast = query::parse_query(R"(match (p)-[:hasProduct]->(pr)
match (pr)-[:hasGeometry]->(g1)
match (g1)-[r1:hasFGI]->(g2)
where g1.PatMine_type =~ ".*lev.*" and g2.PatMine_type =~ ".*lid.*" and r1.action = "press"
return p, count(r1) as MatchRank2)");
  auto t1 = Clock::now();
  auto table = query::execute_query(s.graph(), ast);
  double query_time = seconds_since(t1);
  bool ok = ranking.size() == 999 && score_time < 5.0 && query_time < 1.0 && !table.rows.empty();
  return {ok, "score_corpus=" + fmt(score_time) + "s query=" + fmt(query_time) + "s rows=" +
                  std::to_string(table.rows.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"corkscrew round-trip", corkscrew_round_trip},
      {"match rank arithmetic", match_rank_arithmetic},
      {"normalization", normalization},
      {"self-maximality and symmetry", self_max_and_symmetry},
      {"search oracle equivalence", search_oracles},
      {"pattern-match oracle", pattern_oracle},
      {"patql listing fidelity", patql_listings},
      {"constraint enforcement", constraint_enforcement},
      {"persistence and import round-trips", persistence_round_trips},
      {"dot validity", dot_validity},
      {"scale smoke test", scale_smoke},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failures;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
