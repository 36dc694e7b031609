#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "patgraph/error.hpp"
#include "patgraph/fad/fad_store.hpp"
#include "patgraph/graph/pattern.hpp"

namespace patgraph::query {

using fad::DesignKind;
using fad::FadStore;
namespace schema = fad::schema;

// Keyword weights: function > action > everything else; a synonym hit is
// scaled down.
struct KeywordWeights {
  double function = 3.0;
  double action = 2.0;
  double other = 1.0;
  double synonym_factor = 0.5;
};

enum class ElementKind { Design, Product, Claim, Geometry, Fgi, Other };

inline std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Design: return "design";
    case ElementKind::Product: return "product";
    case ElementKind::Claim: return "claim";
    case ElementKind::Geometry: return "geometry";
    case ElementKind::Fgi: return "fgi";
    case ElementKind::Other: return "other";
  }
  return "?";
}

// A node or an edge of the store.
struct ElementRef {
  bool is_edge = false;
  std::uint64_t id = 0;
  auto operator<=>(const ElementRef&) const = default;
};

struct MatchedItem {
  ElementRef element;
  ElementKind kind = ElementKind::Other;
  std::string key;
  std::string keyword;         // the (lowercased) keyword that matched
  std::string source_keyword;  // the query keyword it was expanded from
  bool via_synonym = false;
  double weight = 0.0;
};

struct RankedHit {
  std::string design_id;
  DesignKind kind = DesignKind::Patent;
  double match_rank = 0.0;
  std::vector<MatchedItem> items;
};

struct ExpandedKeyword {
  std::string keyword;  // lowercased
  std::string source;   // lowercased original
  bool via_synonym = false;
};

// Original keywords (deduplicated, lowercased) followed by their one-hop
// lexicon synonyms. A term that is both an original and a synonym counts
// as original.
inline std::vector<ExpandedKeyword> expand_query_synonyms(const fad::Lexicon& lexicon,
                                                          const std::vector<std::string>& keywords,
                                                          bool expand = true) {
  std::vector<ExpandedKeyword> out;
  std::set<std::string> seen;
  for (const auto& k : keywords) {
    std::string low = to_lower(k);
    if (low.empty() || !seen.insert(low).second) continue;
    out.push_back({low, low, false});
  }
  if (!expand) return out;
  std::size_t originals = out.size();
  for (std::size_t i = 0; i < originals; ++i) {
    std::string source = out[i].keyword;
    for (const auto& syn : lexicon.synonyms_of(source)) {
      if (seen.insert(syn).second) out.push_back({syn, source, true});
    }
  }
  return out;
}

inline double keyword_weight(ElementKind kind, std::string_view key, bool via_synonym,
                             const KeywordWeights& w = {}) {
  double base = w.other;
  if (kind == ElementKind::Fgi) {
    if (key == schema::kFunctionName || key == schema::kFunctionIds) base = w.function;
    else if (key == schema::kAction) base = w.action;
  }
  return via_synonym ? base * w.synonym_factor : base;
}

// Assigns each item its weight and returns the sum.
inline double weighted_keyword_rank(std::vector<MatchedItem>& items, const KeywordWeights& w = {}) {
  double total = 0.0;
  for (auto& item : items) {
    item.weight = keyword_weight(item.kind, item.key, item.via_synonym, w);
    total += item.weight;
  }
  return total;
}

inline double weighted_keyword_rank(const std::vector<MatchedItem>& items, const KeywordWeights& w = {}) {
  auto copy = items;
  return weighted_keyword_rank(copy, w);
}

namespace detail {

inline bool value_matches(const PropertyValue& v, const std::string& keyword_lower) {
  if (v.is_list()) {
    for (const auto& item : v.list()) {
      if (iequals(item, keyword_lower)) return true;
    }
    return false;
  }
  if (v.is_text()) return iequals(v.text(), keyword_lower);
  if (v.is_number()) return v.display() == keyword_lower;
  return false;
}

inline ElementKind kind_of_node(const GraphNode& n) {
  const auto& l = n.principal_label();
  if (l == schema::kPatent || l == schema::kEmergDesign) return ElementKind::Design;
  if (l == schema::kProduct) return ElementKind::Product;
  if (l == schema::kClaim) return ElementKind::Claim;
  if (l == schema::kGeometry) return ElementKind::Geometry;
  return ElementKind::Other;
}

// Matches `keywords` against the properties of one element; `keys`
// restricts which properties are considered (empty = all).
inline void match_element(const PropertyMap& props, ElementRef ref, ElementKind kind,
                          const std::vector<ExpandedKeyword>& keywords,
                          const std::vector<std::string>& keys, std::vector<MatchedItem>& out) {
  for (const auto& [key, value] : props) {
    if (!keys.empty() && std::find(keys.begin(), keys.end(), key) == keys.end()) continue;
    for (const auto& kw : keywords) {
      if (value_matches(value, kw.keyword)) {
        out.push_back({ref, kind, key, kw.keyword, kw.source, kw.via_synonym, 0.0});
      }
    }
  }
}

inline void sort_hits(std::vector<RankedHit>& hits) {
  std::sort(hits.begin(), hits.end(), [](const RankedHit& a, const RankedHit& b) {
    if (a.match_rank != b.match_rank) return a.match_rank > b.match_rank;
    return std::tie(a.design_id, a.kind) < std::tie(b.design_id, b.kind);
  });
}

}  // namespace detail

// Full-text search over every design -> product -> geometry -[FGI]->
// geometry path. Each property value (or list item) equal to a keyword,
// ignoring case, is one matched item; items are unique per (element, key,
// keyword) within a design. Designs without matches are omitted.
inline std::vector<RankedHit> fulltext_search(const FadStore& store,
                                              const std::vector<std::string>& keywords,
                                              bool expand_synonyms = false,
                                              const KeywordWeights& weights = {}) {
  const GraphStore& g = store.graph();
  auto expanded = expand_query_synonyms(store.lexicon(), keywords, expand_synonyms);
  std::vector<RankedHit> hits;
  if (expanded.empty()) return hits;

  for (const auto& d : store.designs()) {
    std::set<NodeId> nodes;
    std::set<EdgeId> edges;
    for (NodeId pr : g.successors(d.node, schema::kHasProduct)) {
      for (NodeId g1 : g.successors(pr, schema::kHasGeometry)) {
        for (EdgeId fr : g.out_edges(g1)) {
          const GraphEdge& e = g.edge(fr);
          if (e.type != schema::kHasFgi) continue;
          nodes.insert({d.node, pr, g1, e.to});
          edges.insert(fr);
        }
      }
    }
    std::vector<MatchedItem> items;
    for (NodeId n : nodes) {
      const GraphNode& node = g.node(n);
      detail::match_element(node.props, {false, n.value}, detail::kind_of_node(node), expanded, {}, items);
    }
    for (EdgeId e : edges) {
      detail::match_element(g.edge(e).props, {true, e.value}, ElementKind::Fgi, expanded, {}, items);
    }
    if (items.empty()) continue;
    RankedHit hit{d.unique_id, d.kind, 0.0, std::move(items)};
    hit.match_rank = weighted_keyword_rank(hit.items, weights);
    hits.push_back(std::move(hit));
  }
  detail::sort_hits(hits);
  return hits;
}

enum class SemanticField { Title, Product, Function, Action, Geometry };

inline std::string_view to_string(SemanticField f) {
  switch (f) {
    case SemanticField::Title: return "title";
    case SemanticField::Product: return "product";
    case SemanticField::Function: return "function";
    case SemanticField::Action: return "action";
    case SemanticField::Geometry: return "geometry";
  }
  return "?";
}

inline SemanticField parse_semantic_field(std::string_view s) {
  for (auto f : {SemanticField::Title, SemanticField::Product, SemanticField::Function,
                 SemanticField::Action, SemanticField::Geometry}) {
    if (to_string(f) == s) return f;
  }
  throw Error(ErrorKind::InvalidArgument,
              "unknown search field '" + std::string(s) +
                  "' (expected title, product, function, action or geometry)");
}

struct SemanticQuery {
  std::map<SemanticField, std::string> fields;
  // Free keywords: each must match at least one of the five fields.
  std::vector<std::string> keywords;
  bool expand_synonyms = false;
};

// Semantic search: every supplied field must match inside the design
// (AND). An empty query returns every design.
inline std::vector<RankedHit> semantic_search(const FadStore& store, const SemanticQuery& query,
                                              const KeywordWeights& weights = {}) {
  const GraphStore& g = store.graph();
  const auto& lex = store.lexicon();

  std::vector<std::pair<std::optional<SemanticField>, std::vector<ExpandedKeyword>>> filters;
  for (const auto& [field, value] : query.fields) {
    auto expanded = expand_query_synonyms(lex, {value}, query.expand_synonyms);
    if (!expanded.empty()) filters.emplace_back(field, std::move(expanded));
  }
  for (const auto& k : query.keywords) {
    auto expanded = expand_query_synonyms(lex, {k}, query.expand_synonyms);
    if (!expanded.empty()) filters.emplace_back(std::nullopt, std::move(expanded));
  }

  std::vector<RankedHit> hits;
  for (const auto& d : store.designs()) {
    std::vector<NodeId> products = g.successors(d.node, schema::kHasProduct);
    std::vector<NodeId> geometries;
    std::vector<EdgeId> fgis;
    for (NodeId p : products) {
      for (NodeId geo : g.successors(p, schema::kHasGeometry)) {
        geometries.push_back(geo);
        for (EdgeId e : g.out_edges(geo)) {
          if (g.edge(e).type == schema::kHasFgi) fgis.push_back(e);
        }
      }
    }
    auto match_field = [&](SemanticField f, const std::vector<ExpandedKeyword>& kws,
                           std::vector<MatchedItem>& out) {
      switch (f) {
        case SemanticField::Title:
          detail::match_element(g.node(d.node).props, {false, d.node.value}, ElementKind::Design, kws,
                                {schema::kTitle}, out);
          break;
        case SemanticField::Product:
          for (NodeId p : products) {
            detail::match_element(g.node(p).props, {false, p.value}, ElementKind::Product, kws,
                                  {schema::kName}, out);
          }
          break;
        case SemanticField::Function:
          for (EdgeId e : fgis) {
            detail::match_element(g.edge(e).props, {true, e.value}, ElementKind::Fgi, kws,
                                  {schema::kFunctionName, schema::kFunctionIds}, out);
          }
          break;
        case SemanticField::Action:
          for (EdgeId e : fgis) {
            detail::match_element(g.edge(e).props, {true, e.value}, ElementKind::Fgi, kws,
                                  {schema::kAction}, out);
          }
          break;
        case SemanticField::Geometry:
          for (NodeId geo : geometries) {
            detail::match_element(g.node(geo).props, {false, geo.value}, ElementKind::Geometry, kws,
                                  {schema::kName, schema::kPatMineType}, out);
          }
          break;
      }
    };

    std::vector<MatchedItem> items;
    bool all = true;
    for (const auto& [field, kws] : filters) {
      std::vector<MatchedItem> found;
      if (field) {
        match_field(*field, kws, found);
      } else {
        for (auto f : {SemanticField::Title, SemanticField::Product, SemanticField::Function,
                       SemanticField::Action, SemanticField::Geometry}) {
          match_field(f, kws, found);
        }
      }
      if (found.empty()) {
        all = false;
        break;
      }
      items.insert(items.end(), found.begin(), found.end());
    }
    if (!all) continue;
    // The same (element, key, keyword) may be reached by two filters; a
    // direct hit outranks a synonym hit.
    std::sort(items.begin(), items.end(), [](const MatchedItem& a, const MatchedItem& b) {
      return std::tie(a.element, a.key, a.keyword, a.via_synonym) <
             std::tie(b.element, b.key, b.keyword, b.via_synonym);
    });
    items.erase(std::unique(items.begin(), items.end(),
                            [](const MatchedItem& a, const MatchedItem& b) {
                              return a.element == b.element && a.key == b.key && a.keyword == b.keyword;
                            }),
                items.end());
    RankedHit hit{d.unique_id, d.kind, 0.0, std::move(items)};
    hit.match_rank = weighted_keyword_rank(hit.items, weights);
    hits.push_back(std::move(hit));
  }
  detail::sort_hits(hits);
  return hits;
}

struct FgiPatternQuery {
  std::string source_type;  // regex searched in the source PatMine_type; empty = any
  std::string target_type;
  std::optional<std::string> action;
  std::optional<std::string> function_id;
};

struct FgiHit {
  std::string design_id;
  DesignKind kind = DesignKind::Patent;
  std::string product_id;
  fad::FgiRecord fgi;
  std::string source_type;
  std::string target_type;
};

struct FgiPatternResult {
  std::vector<FgiHit> hits;
  // (design id, matching FGI count), count descending then id ascending.
  std::vector<std::pair<std::string, std::size_t>> per_design;
  std::size_t total() const { return hits.size(); }
};

// Level-two FGI search: source/target PatMine types are unanchored regular
// expressions ("poly" finds "polygon"); action compares case-insensitively;
// the function id must be listed on the FGI.
inline FgiPatternResult fgi_pattern_search(const FadStore& store, const FgiPatternQuery& q) {
  auto compile = [](const std::string& pattern) -> std::optional<std::regex> {
    if (pattern.empty()) return std::nullopt;
    try {
      return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::BadRegex, "invalid regular expression '" + pattern + "': " + e.what());
    }
  };
  auto source_re = compile(q.source_type);
  auto target_re = compile(q.target_type);
  const GraphStore& g = store.graph();

  FgiPatternResult result;
  std::map<std::string, std::size_t> counts;
  for (const auto& d : store.designs()) {
    for (NodeId p : g.successors(d.node, schema::kHasProduct)) {
      std::vector<EdgeId> found;
      for (NodeId g1 : g.successors(p, schema::kHasGeometry)) {
        for (EdgeId eid : g.out_edges(g1)) {
          const GraphEdge& e = g.edge(eid);
          if (e.type != schema::kHasFgi) continue;
          const PropertyValue* st = g.node(e.from).prop(schema::kPatMineType);
          const PropertyValue* tt = g.node(e.to).prop(schema::kPatMineType);
          std::string s = st ? st->display() : std::string{};
          std::string t = tt ? tt->display() : std::string{};
          if (source_re && !std::regex_search(s, *source_re)) continue;
          if (target_re && !std::regex_search(t, *target_re)) continue;
          if (q.action) {
            const PropertyValue* a = e.prop(schema::kAction);
            if (!a || !iequals(a->display(), *q.action)) continue;
          }
          if (q.function_id) {
            const PropertyValue* ids = e.prop(schema::kFunctionIds);
            if (!ids || !ids->is_list()) continue;
            const auto& l = ids->list();
            if (std::find(l.begin(), l.end(), *q.function_id) == l.end()) continue;
          }
          found.push_back(eid);
        }
      }
      std::sort(found.begin(), found.end());
      const std::string product_id = g.node(p).prop(schema::kProductId)->display();
      for (EdgeId eid : found) {
        const GraphEdge& e = g.edge(eid);
        const PropertyValue* st = g.node(e.from).prop(schema::kPatMineType);
        const PropertyValue* tt = g.node(e.to).prop(schema::kPatMineType);
        result.hits.push_back({d.unique_id, d.kind, product_id, store.read_fgi(eid),
                               st ? st->display() : "", tt ? tt->display() : ""});
        ++counts[d.unique_id];
      }
    }
  }
  result.per_design.assign(counts.begin(), counts.end());
  std::stable_sort(result.per_design.begin(), result.per_design.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return result;
}

// -- paging --------------------------------------------------------------

struct Page {
  std::vector<fad::DesignSummary> items;
  std::size_t index = 0;  // 0-based
  std::size_t page_count = 1;
  std::size_t page_size = 0;
  std::size_t total = 0;
};

// First / Previous / Next / Last navigation over `total` items.
class PageCursor {
 public:
  PageCursor(std::size_t total, std::size_t page_size, std::size_t index = 0)
      : total_(total), page_size_(page_size == 0 ? 1 : page_size) {
    index_ = std::min(index, page_count() - 1);
  }

  std::size_t page_count() const {
    return std::max<std::size_t>(1, (total_ + page_size_ - 1) / page_size_);
  }
  std::size_t index() const { return index_; }
  std::size_t offset() const { return index_ * page_size_; }
  std::size_t page_size() const { return page_size_; }

  PageCursor& first() { index_ = 0; return *this; }
  PageCursor& last() { index_ = page_count() - 1; return *this; }
  PageCursor& next() { if (index_ + 1 < page_count()) ++index_; return *this; }
  PageCursor& prev() { if (index_ > 0) --index_; return *this; }

 private:
  std::size_t total_;
  std::size_t page_size_;
  std::size_t index_ = 0;
};

// Designs in unique-id order, one page at a time. Out-of-range page
// indexes clamp to the last page.
inline Page list_designs(const FadStore& store, std::optional<DesignKind> kind, std::size_t page_index,
                         std::size_t page_size) {
  auto all = store.designs(kind);
  PageCursor cursor(all.size(), page_size, page_index);
  Page page;
  page.index = cursor.index();
  page.page_count = cursor.page_count();
  page.page_size = cursor.page_size();
  page.total = all.size();
  std::size_t begin = std::min(cursor.offset(), all.size());
  std::size_t end = std::min(begin + cursor.page_size(), all.size());
  page.items.assign(all.begin() + static_cast<std::ptrdiff_t>(begin),
                    all.begin() + static_cast<std::ptrdiff_t>(end));
  return page;
}

// -- JSON ----------------------------------------------------------------

inline nlohmann::json to_json(const RankedHit& h) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& i : h.items) {
    items.push_back({{"element", (i.element.is_edge ? "e" : "n") + std::to_string(i.element.id)},
                     {"element_kind", std::string(to_string(i.kind))},
                     {"key", i.key},
                     {"keyword", i.keyword},
                     {"source_keyword", i.source_keyword},
                     {"via_synonym", i.via_synonym},
                     {"weight", i.weight}});
  }
  return {{"design_id", h.design_id},
          {"kind", std::string(fad::to_string(h.kind))},
          {"matchRank", h.match_rank},
          {"matched", items}};
}

inline nlohmann::json to_json(const std::vector<RankedHit>& hits) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& h : hits) out.push_back(to_json(h));
  return out;
}

inline nlohmann::json to_json(const FgiPatternResult& r) {
  nlohmann::json hits = nlohmann::json::array();
  for (const auto& h : r.hits) {
    nlohmann::json f = fad::to_json(h.fgi);
    f["design_id"] = h.design_id;
    f["kind"] = std::string(fad::to_string(h.kind));
    f["product_id"] = h.product_id;
    f["source_type"] = h.source_type;
    f["target_type"] = h.target_type;
    hits.push_back(std::move(f));
  }
  nlohmann::json per = nlohmann::json::array();
  for (const auto& [id, n] : r.per_design) per.push_back({{"design_id", id}, {"MatchRank2", n}});
  return {{"hits", hits}, {"per_design", per}, {"total", r.total()}};
}

inline nlohmann::json to_json(const Page& p) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& d : p.items) {
    items.push_back({{"unique_id", d.unique_id}, {"kind", std::string(fad::to_string(d.kind))}, {"title", d.title}});
  }
  return {{"items", items},
          {"page", p.index},
          {"page_count", p.page_count},
          {"page_size", p.page_size},
          {"total", p.total}};
}

}  // namespace patgraph::query
