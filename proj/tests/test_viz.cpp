#include <gtest/gtest.h>

#include <regex>

#include "dot_check.hpp"
#include "patgraph/fad/annotation_csv.hpp"
#include "patgraph/query/executor.hpp"
#include "patgraph/query/patql.hpp"
#include "patgraph/viz/dot.hpp"
#include "patgraph/viz/graphjson.hpp"
#include "support.hpp"

using namespace patgraph;
using namespace patgraph::viz;

namespace {

fad::FadStore fixture_store() {
  fad::FadStore s(GraphStore{}, fad::Lexicon::load(testsupport::fixture("lexicon.csv")));
  fad::import_annotation_csv(s, fad::read_bundle(testsupport::fixture("corkscrew")));
  return s;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Dot, CorkscrewIsValidWithThreeNodesTwoEdges) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  std::string dot = to_dot(s.get_fad("corkscrew.sldprt"));
  EXPECT_NE(dot.find("[label=\"latch\"]"), std::string::npos);
  EXPECT_NE(dot.find("[label=\"can body\"]"), std::string::npos);
  EXPECT_NE(dot.find("[label=\"press (f1)\"]"), std::string::npos);
  auto counts = testsupport::validate_dot(dot);
  ASSERT_TRUE(counts) << dot;
  EXPECT_EQ(counts->nodes, 3u);
  EXPECT_EQ(counts->edges, 2u);
}

TEST(Dot, EmptyDesignIsStillValid) {
  fad::FadStore s;
  s.upsert_design(fad::DesignKind::Patent, "US0", "empty");
  auto counts = testsupport::validate_dot(to_dot(s.get_fad("US0")));
  ASSERT_TRUE(counts);
  EXPECT_EQ(counts->nodes, 0u);
  EXPECT_EQ(counts->edges, 0u);
}

TEST(Dot, QuotingSurvivesHostileNames) {
  fad::FadStore s;
  NodeId d = s.upsert_design(fad::DesignKind::Patent, "US\"1", "q");
  NodeId p = s.add_product(d, "P\\1", "q");
  s.add_geometry(p, "g 1", "a \"quoted\"\nname", "lever");
  s.add_geometry(p, "g{2}", "b;c", "lid");
  s.add_fgi(p, "g 1", "g{2}", "press -> hard", {"f1"});
  auto counts = testsupport::validate_dot(to_dot(s.get_fad(d)));
  ASSERT_TRUE(counts);
  EXPECT_EQ(counts->nodes, 2u);
  EXPECT_EQ(counts->edges, 1u);
}

TEST(Dot, LevelsRelabelNodesOnly) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  auto m = s.get_fad("corkscrew.sldprt");
  std::string by_name = to_dot(m);
  std::string by_type = to_dot(m, AbstractionLevel::parse("patmine-type"));
  EXPECT_NE(by_type.find("[label=\"lever\"]"), std::string::npos);
  EXPECT_EQ(by_type.find("[label=\"latch\"]"), std::string::npos);
  std::regex edge_line(".* -> .*");
  auto edges = [&](const std::string& t) {
    std::vector<std::string> out;
    std::istringstream in(t);
    for (std::string l; std::getline(in, l);) {
      if (std::regex_match(l, edge_line)) out.push_back(l);
    }
    return out;
  };
  EXPECT_EQ(edges(by_name), edges(by_type));
  std::string super1 = to_dot(m, AbstractionLevel::parse("supertype:1"));
  EXPECT_NE(super1.find("[label=\"bar\"]"), std::string::npos);
  std::string super9 = to_dot(m, AbstractionLevel::parse("supertype:9"));
  EXPECT_EQ(count_of(super9, "[label=\"solid\"]"), 3u);
  EXPECT_THROW(AbstractionLevel::parse("supertype:0"), Error);
  EXPECT_THROW(AbstractionLevel::parse("colour"), Error);
}

TEST(Dot, HighlightMarksOverlap) {
  auto s = fixture_store();
  auto report = scoring::compute_overlap(s, "corkscrew.sldprt", "US1000002");
  std::string a = to_dot(s.get_fad("corkscrew.sldprt"), {}, &report, true);
  EXPECT_EQ(count_of(a, "penwidth=3"), 3u);
  std::string b = to_dot(s.get_fad("US1000002"), {}, &report, false);
  EXPECT_EQ(count_of(b, "penwidth=3"), 3u);
  EXPECT_TRUE(testsupport::validate_dot(a));
}

TEST(GraphJson, FullAndGeometryProjections) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  auto full = document_of(s, s.get_fad("corkscrew.sldprt"), Projection::Full);
  EXPECT_EQ(full.nodes.size(), 5u);
  // hasProduct + 3 hasGeometry + 2 hasFGI.
  EXPECT_EQ(full.edges.size(), 6u);
  auto geo = document_of(s, s.get_fad("corkscrew.sldprt"), Projection::GeometryOnly);
  EXPECT_EQ(geo.nodes.size(), 3u);
  EXPECT_EQ(geo.edges.size(), 2u);
}

TEST(GraphJson, RoundTrip) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  auto doc = document_of(s, s.get_fad("corkscrew.sldprt"));
  EXPECT_EQ(from_graphjson(to_json(doc)), doc);
  EXPECT_THROW(from_graphjson(std::string_view("{\"nodes\": 3}")), Error);
  EXPECT_THROW(from_graphjson(std::string_view("not json")), Error);
}

TEST(GraphJson, TabularRowsDeduplicate) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  auto t = query::execute_query(s.graph(), query::parse_query("match (a)-[r:hasFGI]->(b) return a, r, b"));
  ASSERT_EQ(t.rows.size(), 2u);
  auto e = tabular_to_entities(t.rows);
  EXPECT_EQ(e.nodes.size(), 3u);
  EXPECT_EQ(e.edges.size(), 2u);
  EXPECT_TRUE(tabular_to_entities(std::vector<std::vector<query::Cell>>{}).nodes.empty());
}

TEST(GraphJson, RandomRowsEqualSetUnion) {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    using Cell = std::variant<std::monostate, NodeId, EdgeId>;
    std::vector<std::vector<Cell>> rows(rng() % 6);
    std::set<NodeId> ns;
    std::set<EdgeId> es;
    for (auto& r : rows) {
      for (std::size_t k = rng() % 5; k > 0; --k) {
        switch (rng() % 3) {
          case 0: r.push_back(std::monostate{}); break;
          case 1: r.push_back(NodeId{rng() % 6}); ns.insert(NodeId{std::get<NodeId>(r.back())}); break;
          default: r.push_back(EdgeId{rng() % 6}); es.insert(std::get<EdgeId>(r.back())); break;
        }
      }
    }
    auto e = tabular_to_entities(rows);
    EXPECT_EQ(std::set<NodeId>(e.nodes.begin(), e.nodes.end()), ns);
    EXPECT_EQ(e.nodes.size(), ns.size());
    EXPECT_EQ(std::set<EdgeId>(e.edges.begin(), e.edges.end()), es);
    EXPECT_EQ(e.edges.size(), es.size());
    EXPECT_EQ(tabular_to_entities(as_rows(e)), e);
  }
}
