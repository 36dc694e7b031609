#include <gtest/gtest.h>

#include <numeric>

#include "patgraph/fad/annotation_csv.hpp"
#include "patgraph/scoring/scoring.hpp"
#include "scoring_oracle.hpp"
#include "support.hpp"

using namespace patgraph;
using namespace patgraph::scoring;
using fad::DesignKind;

namespace {

fad::FadStore fixture_store() {
  fad::FadStore s(GraphStore{}, fad::Lexicon::load(testsupport::fixture("lexicon.csv")));
  fad::import_annotation_csv(s, fad::read_bundle(testsupport::fixture("corkscrew")));
  return s;
}

}  // namespace

TEST(MatchRank, FormulaValues) {
  EXPECT_NEAR(match_rank({0, 0, 0}), 0.0, 1e-9);
  EXPECT_NEAR(match_rank({2, 1, 0}), 0.666667, 1e-6);
  EXPECT_NEAR(match_rank({2, 1, 0}), 40.0 / 60.0, 1e-9);
  EXPECT_NEAR(match_rank({2, 1, 1}), 70.0 / 60.0, 1e-9);
  EXPECT_NEAR(match_rank({3, 2, 1}, {1, 1, 1, 1}), 6.0, 1e-9);
  EXPECT_THROW(match_rank({1, 1, 1}, {10, 20, 30, 0}), Error);
  EXPECT_THROW(match_rank({1, 1, 1}, {-1, 20, 30, 60}), Error);
}

TEST(Normalize, ExactAndDegenerate) {
  EXPECT_EQ(normalize_scores({0.2, 0.5, 0.8}), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(normalize_scores({0.4, 0.4}), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(normalize_scores({0.0, 0.0}), (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(normalize_scores({}), Error);
}

TEST(Normalize, RandomVectorsKeepBoundsAndExtremes) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> v(1 + rng() % 12);
    for (auto& x : v) x = d(rng);
    auto n = normalize_scores(v);
    auto hi = std::max_element(v.begin(), v.end()) - v.begin();
    auto lo = std::min_element(v.begin(), v.end()) - v.begin();
    for (double x : n) {
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 1.0);
    }
    ASSERT_EQ(n[static_cast<std::size_t>(hi)], 1.0);
    if (v[static_cast<std::size_t>(hi)] != v[static_cast<std::size_t>(lo)]) {
      ASSERT_EQ(n[static_cast<std::size_t>(lo)], 0.0);
    }
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = 0; b < v.size(); ++b) {
        if (v[a] < v[b]) {
          ASSERT_LE(n[a], n[b]);
        }
      }
    }
  }
}

TEST(Overlap, FixturePairs) {
  auto s = fixture_store();
  auto same = compute_overlap(s, "corkscrew.sldprt", "US1000001");
  EXPECT_EQ(same.counts, (OverlapCounts{3, 2, 1}));
  auto partial = compute_overlap(s, "corkscrew.sldprt", "US1000002");
  EXPECT_EQ(partial.counts, (OverlapCounts{2, 1, 0}));
  ASSERT_EQ(partial.fgis.size(), 1u);
  EXPECT_EQ(partial.fgis[0].triple, (FgiTriple{"lever", "press", "lid"}));
  EXPECT_EQ(same.functions.size(), 1u);
  EXPECT_EQ(same.functions[0].steps.size(), 2u);
}

TEST(Overlap, EmptyDesignGivesZero) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  s.upsert_design(DesignKind::Patent, "US0", "empty");
  EXPECT_EQ(compute_overlap(s, "corkscrew.sldprt", "US0").counts, (OverlapCounts{0, 0, 0}));
}

TEST(Overlap, FgisAreDirectionSensitiveAndActionCaseInsensitive) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  NodeId d = s.upsert_design(DesignKind::Patent, "US9", "rev");
  NodeId p = s.add_product(d, "Q1", "rev");
  s.add_geometry(p, "x1", "a", "lever");
  s.add_geometry(p, "x2", "b", "lid");
  s.add_fgi(p, "x2", "x1", "press", {"f1"});
  s.add_fgi(p, "x1", "x2", "PRESS", {"f2"});
  auto r = compute_overlap(s, "corkscrew.sldprt", "US9");
  EXPECT_EQ(r.counts.fgis, 1u);
}

TEST(Overlap, ActionSynonymsOption) {
  auto s = fixture_store();
  NodeId d = s.upsert_design(DesignKind::Patent, "US9", "syn");
  NodeId p = s.add_product(d, "Q1", "syn");
  s.add_geometry(p, "x1", "a", "lever");
  s.add_geometry(p, "x2", "b", "lid");
  s.add_fgi(p, "x1", "x2", "push", {"f1"});
  EXPECT_EQ(compute_overlap(s, "corkscrew.sldprt", "US9").counts.fgis, 0u);
  ScoringOptions opt;
  opt.action_synonyms = true;
  EXPECT_EQ(compute_overlap(s, "corkscrew.sldprt", "US9", opt).counts.fgis, 1u);
}

TEST(ScoreCorpus, FixtureRanking) {
  auto s = fixture_store();
  auto ranking = score_corpus(s, "corkscrew.sldprt");
  ASSERT_EQ(ranking.size(), 2u);
  EXPECT_EQ(ranking[0].design_id, "US1000001");
  EXPECT_NEAR(ranking[0].score.raw, 100.0 / 60.0, 1e-9);
  EXPECT_EQ(ranking[0].score.normalized, 1.0);
  EXPECT_EQ(ranking[1].score.normalized, 0.0);
  auto csv = score_report_csv(ranking);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "patent_id,raw,normalized,geometry_count,fgi_count,function_count");
  EXPECT_NE(csv.find("US1000001,"), std::string::npos);
  EXPECT_THROW(score_corpus(s, "missing"), Error);
}

TEST(ScoreCorpus, SingleZeroOverlapPatentNormalizesToZero) {
  fad::FadStore s;
  testsupport::build_corkscrew(s);
  s.upsert_design(DesignKind::Patent, "US0", "empty");
  auto r = score_corpus(s, "corkscrew.sldprt");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].score.normalized, 0.0);
  fad::FadStore lonely;
  testsupport::build_corkscrew(lonely);
  try {
    score_corpus(lonely, "corkscrew.sldprt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
  }
}

TEST(ScoringOracle, RandomPairsMatchBruteForce) {
  std::mt19937 rng(777);
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    auto s = testsupport::random_fad_store(rng, 2);
    auto ds = s.designs();
    auto a = s.get_fad(ds[0].node);
    auto b = s.get_fad(ds[1].node);
    auto ab = compute_overlap(a, b).counts;
    if (ab != testsupport::oracle_counts(a, b)) ++bad;
    if (ab != compute_overlap(b, a).counts) ++bad;
    double self = match_rank(compute_overlap(a, a).counts);
    if (self + 1e-12 < match_rank(ab)) ++bad;
    auto rep = compute_overlap(a, b);
    if (rep.geometries.size() != rep.counts.geometries || rep.fgis.size() != rep.counts.fgis) ++bad;
  }
  EXPECT_EQ(bad, 0);
}

TEST(ScoringOracle, CorpusRankingEqualsRecomputationAndIsScaleInvariant) {
  std::mt19937 rng(31337);
  for (int i = 0; i < 20; ++i) {
    auto s = testsupport::random_fad_store(rng, 6);
    auto ds = s.designs(DesignKind::Patent);
    if (ds.size() < 2) continue;
    const std::string id = ds[0].unique_id;
    auto ranking = score_corpus(s, id);
    auto me = s.get_fad(id, DesignKind::Patent);
    std::vector<std::pair<std::string, double>> want;
    for (const auto& d : ds) {
      if (d.unique_id == id) continue;
      want.emplace_back(d.unique_id, match_rank(testsupport::oracle_counts(me, s.get_fad(d.node))));
    }
    ASSERT_EQ(ranking.size(), want.size());
    for (const auto& r : ranking) {
      auto it = std::find_if(want.begin(), want.end(), [&](const auto& w) { return w.first == r.design_id; });
      ASSERT_NE(it, want.end());
      EXPECT_NEAR(r.score.raw, it->second, 1e-9);
    }
    ScoringOptions scaled;
    scaled.weights = {35, 70, 105, 60};
    auto ranking2 = score_corpus(s, id, DesignKind::Patent, scaled);
    for (std::size_t k = 0; k < ranking.size(); ++k) EXPECT_EQ(ranking[k].design_id, ranking2[k].design_id);
  }
}

TEST(ScoreCorpus, ParallelPathMatchesSerial) {
  std::mt19937 rng(4);
  auto s = testsupport::random_fad_store(rng, 120);
  auto ds = s.designs(DesignKind::Patent);
  ASSERT_GE(ds.size(), 65u);
  auto ranking = score_corpus(s, ds[0].unique_id);
  auto me = s.get_fad(ds[0].node);
  for (const auto& r : ranking) {
    EXPECT_EQ(r.report.counts, testsupport::oracle_counts(me, s.get_fad(r.design_id, r.kind)));
  }
}
