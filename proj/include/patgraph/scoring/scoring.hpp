#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "nlohmann/json.hpp"
#include "patgraph/error.hpp"
#include "patgraph/fad/csv.hpp"
#include "patgraph/fad/fad_store.hpp"

namespace patgraph::scoring {

using fad::DesignKind;
using fad::FadModel;
using fad::FadStore;

struct OverlapCounts {
  std::size_t geometries = 0;
  std::size_t fgis = 0;
  std::size_t functions = 0;

  friend bool operator==(const OverlapCounts&, const OverlapCounts&) = default;
};

struct ScoringWeights {
  double w_geometry = 10.0;
  double w_fgi = 20.0;
  double w_function = 30.0;
  double divisor = 60.0;

  void validate() const {
    if (!(divisor > 0.0)) throw Error(ErrorKind::InvalidArgument, "divisor must be positive");
    if (w_geometry < 0.0 || w_fgi < 0.0 || w_function < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "weights must be non-negative");
    }
  }
};

struct ScoringOptions {
  ScoringWeights weights;
  // Experimental: compare geometries by their most general abstraction label.
  bool supertype_matching = false;
  // Map actions to their lexicon canonical term before comparing.
  bool action_synonyms = false;
};

struct MatchScore {
  double raw = 0.0;
  double normalized = 0.0;
};

// Witness pairs. `a_*` refers to the first design, `b_*` to the second.
struct GeometryPair {
  std::string type;
  std::string a_product, a_geometry;
  std::string b_product, b_geometry;
  NodeId a_node, b_node;
};

struct FgiTriple {
  std::string source_type;
  std::string action;
  std::string target_type;
  auto operator<=>(const FgiTriple&) const = default;
};

struct FgiPair {
  FgiTriple triple;
  EdgeId a_edge, b_edge;
};

struct FunctionPair {
  std::string a_function, b_function;
  std::vector<FgiTriple> steps;  // the shared signature, sorted
};

struct OverlapReport {
  std::vector<GeometryPair> geometries;
  std::vector<FgiPair> fgis;
  std::vector<FunctionPair> functions;
  OverlapCounts counts;
};

namespace detail {

struct GeometryItem {
  std::string key;
  std::string product;
  std::string geometric_id;
  NodeId node;
};

struct FgiItem {
  FgiTriple triple;
  EdgeId edge;
};

struct Profile {
  std::vector<GeometryItem> geometries;
  std::vector<FgiItem> fgis;
  std::map<std::string, std::vector<FgiTriple>> functions;  // id -> sorted signature
};

inline std::string geometry_key(const fad::GeometryRecord& g, bool supertype) {
  if (supertype && !g.abstraction_labels.empty()) return g.abstraction_labels.back();
  return g.patmine_type;
}

inline Profile profile(const FadModel& m, const fad::Lexicon& lex, const ScoringOptions& opt) {
  Profile p;
  std::map<EdgeId, FgiTriple> triples;
  for (const auto& prod : m.products) {
    for (const auto& g : prod.geometries) {
      p.geometries.push_back({geometry_key(g, opt.supertype_matching), prod.product_id, g.geometric_id, g.node});
    }
    for (const auto& f : prod.fgis) {
      const auto* src = prod.geometry(f.from_id);
      const auto* dst = prod.geometry(f.to_id);
      std::string action = opt.action_synonyms ? lex.canonical(fad::TermCategory::Action, f.action)
                                               : to_lower(f.action);
      FgiTriple t{src ? geometry_key(*src, opt.supertype_matching) : std::string{}, action,
                  dst ? geometry_key(*dst, opt.supertype_matching) : std::string{}};
      p.fgis.push_back({t, f.edge});
      for (const auto& fid : f.function_ids) p.functions[fid].push_back(t);
    }
  }
  for (auto& [_, sig] : p.functions) std::sort(sig.begin(), sig.end());
  return p;
}

// Multiset intersection: group both sides by key (first-seen order kept
// inside a group) and pair index-wise.
template <class Item, class Key, class Emit>
void pair_by_key(const std::vector<Item>& a, const std::vector<Item>& b, Key key, Emit emit) {
  using K = std::decay_t<decltype(key(a.front()))>;
  std::map<K, std::vector<const Item*>> ga, gb;
  for (const auto& x : a) ga[key(x)].push_back(&x);
  for (const auto& x : b) gb[key(x)].push_back(&x);
  for (const auto& [k, xs] : ga) {
    auto it = gb.find(k);
    if (it == gb.end()) continue;
    std::size_t n = std::min(xs.size(), it->second.size());
    for (std::size_t i = 0; i < n; ++i) emit(*xs[i], *it->second[i]);
  }
}

inline OverlapReport overlap(const Profile& a, const Profile& b) {
  OverlapReport r;
  pair_by_key(a.geometries, b.geometries, [](const GeometryItem& g) { return g.key; },
              [&](const GeometryItem& x, const GeometryItem& y) {
                r.geometries.push_back({x.key, x.product, x.geometric_id, y.product, y.geometric_id, x.node, y.node});
              });
  pair_by_key(a.fgis, b.fgis, [](const FgiItem& f) { return f.triple; },
              [&](const FgiItem& x, const FgiItem& y) { r.fgis.push_back({x.triple, x.edge, y.edge}); });

  // Functions: equal signatures are interchangeable, so a maximum one-to-one
  // pairing is the per-signature minimum.
  using Fn = std::pair<std::string, const std::vector<FgiTriple>*>;
  std::vector<Fn> fa, fb;
  for (const auto& [id, sig] : a.functions) fa.emplace_back(id, &sig);
  for (const auto& [id, sig] : b.functions) fb.emplace_back(id, &sig);
  pair_by_key(fa, fb, [](const Fn& f) { return *f.second; },
              [&](const Fn& x, const Fn& y) { r.functions.push_back({x.first, y.first, *x.second}); });

  r.counts = {r.geometries.size(), r.fgis.size(), r.functions.size()};
  return r;
}

}  // namespace detail

inline OverlapReport compute_overlap(const FadModel& a, const FadModel& b, const fad::Lexicon& lexicon = {},
                                     const ScoringOptions& opt = {}) {
  return detail::overlap(detail::profile(a, lexicon, opt), detail::profile(b, lexicon, opt));
}

inline OverlapReport compute_overlap(const FadStore& store, const std::string& design_a, const std::string& design_b,
                                     const ScoringOptions& opt = {}) {
  return compute_overlap(store.get_fad(design_a), store.get_fad(design_b), store.lexicon(), opt);
}

inline double match_rank(const OverlapCounts& c, const ScoringWeights& w = {}) {
  w.validate();
  return (static_cast<double>(c.geometries) * w.w_geometry + static_cast<double>(c.fgis) * w.w_fgi +
          static_cast<double>(c.functions) * w.w_function) /
         w.divisor;
}

// Normalized scores are snapped to a 1e-12 grid so decimal inputs map to
// decimal outputs and re-weighting cannot perturb ties.
inline double snap(double x) { return std::round(x * 1e12) / 1e12; }

inline std::vector<double> normalize_scores(const std::vector<double>& raw) {
  if (raw.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot normalize an empty score list");
  auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  double lo = *lo_it, hi = *hi_it;
  std::vector<double> out;
  out.reserve(raw.size());
  if (hi == lo) {
    out.assign(raw.size(), hi > 0.0 ? 1.0 : 0.0);
    return out;
  }
  for (double x : raw) out.push_back(std::clamp(snap((x - lo) / (hi - lo)), 0.0, 1.0));
  return out;
}

struct RankedScore {
  std::string design_id;
  DesignKind kind = DesignKind::Patent;
  MatchScore score;
  OverlapReport report;
};

// Scores `design_id` against every design of `corpus_kind` except itself.
// Sorted by normalized descending, ties by ascending id.
inline std::vector<RankedScore> score_corpus(const FadStore& store, const std::string& design_id,
                                             DesignKind corpus_kind = DesignKind::Patent,
                                             const ScoringOptions& opt = {}) {
  opt.weights.validate();
  NodeId self = store.design(design_id);
  const FadModel model = store.get_fad(self);
  const detail::Profile mine = detail::profile(model, store.lexicon(), opt);

  std::vector<fad::DesignSummary> corpus;
  for (auto& d : store.designs(corpus_kind)) {
    if (d.node != self) corpus.push_back(std::move(d));
  }
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "no designs to score against");

  std::vector<RankedScore> out(corpus.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const FadModel other = store.get_fad(corpus[i].node);
      out[i].design_id = corpus[i].unique_id;
      out[i].kind = corpus[i].kind;
      out[i].report = detail::overlap(mine, detail::profile(other, store.lexicon(), opt));
      out[i].score.raw = match_rank(out[i].report.counts, opt.weights);
    }
  };
  std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  if (corpus.size() < 64) workers = 1;
  std::vector<std::future<void>> jobs;
  std::size_t chunk = (corpus.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t b = w * chunk, e = std::min(corpus.size(), b + chunk);
    if (b >= e) break;
    jobs.push_back(std::async(std::launch::async, work, b, e));
  }
  for (auto& j : jobs) j.get();

  std::vector<double> raws;
  for (const auto& r : out) raws.push_back(r.score.raw);
  auto norm = normalize_scores(raws);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].score.normalized = norm[i];
  std::sort(out.begin(), out.end(), [](const RankedScore& a, const RankedScore& b) {
    if (a.score.normalized != b.score.normalized) return a.score.normalized > b.score.normalized;
    return a.design_id < b.design_id;
  });
  return out;
}

inline std::string format_number(double v) { return PropertyValue(v).display(); }

inline std::string score_report_csv(const std::vector<RankedScore>& ranking) {
  std::vector<csv::Record> rows{{"patent_id", "raw", "normalized", "geometry_count", "fgi_count", "function_count"}};
  for (const auto& r : ranking) {
    rows.push_back({r.design_id, format_number(r.score.raw), format_number(r.score.normalized),
                    std::to_string(r.report.counts.geometries), std::to_string(r.report.counts.fgis),
                    std::to_string(r.report.counts.functions)});
  }
  return csv::write(rows);
}

inline nlohmann::json to_json(const FgiTriple& t) {
  return {{"source_type", t.source_type}, {"action", t.action}, {"target_type", t.target_type}};
}

inline nlohmann::json to_json(const OverlapReport& r) {
  using nlohmann::json;
  json geoms = json::array(), fgis = json::array(), fns = json::array();
  for (const auto& g : r.geometries) {
    geoms.push_back({{"type", g.type},
                     {"a", {{"product", g.a_product}, {"geometry", g.a_geometry}, {"node", g.a_node.value}}},
                     {"b", {{"product", g.b_product}, {"geometry", g.b_geometry}, {"node", g.b_node.value}}}});
  }
  for (const auto& f : r.fgis) {
    fgis.push_back({{"triple", to_json(f.triple)}, {"a_edge", f.a_edge.value}, {"b_edge", f.b_edge.value}});
  }
  for (const auto& f : r.functions) {
    json steps = json::array();
    for (const auto& s : f.steps) steps.push_back(to_json(s));
    fns.push_back({{"a", f.a_function}, {"b", f.b_function}, {"steps", std::move(steps)}});
  }
  return {{"geometries", std::move(geoms)},
          {"fgis", std::move(fgis)},
          {"functions", std::move(fns)},
          {"counts",
           {{"geometries", r.counts.geometries}, {"fgis", r.counts.fgis}, {"functions", r.counts.functions}}}};
}

inline nlohmann::json to_json(const std::vector<RankedScore>& ranking) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : ranking) {
    out.push_back({{"design_id", r.design_id},
                   {"kind", std::string(fad::to_string(r.kind))},
                   {"raw", r.score.raw},
                   {"normalized", r.score.normalized},
                   {"report", to_json(r.report)}});
  }
  return out;
}

}  // namespace patgraph::scoring
