#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "patgraph/error.hpp"
#include "patgraph/fad/csv.hpp"
#include "patgraph/graph/property.hpp"

namespace patgraph::fad {

enum class TermCategory { GeometryType, Action, FunctionVerb, Flow };

inline std::string_view to_string(TermCategory c) {
  switch (c) {
    case TermCategory::GeometryType: return "geometry-type";
    case TermCategory::Action: return "action";
    case TermCategory::FunctionVerb: return "function-verb";
    case TermCategory::Flow: return "flow";
  }
  return "?";
}

inline TermCategory parse_category(std::string_view s) {
  if (s == "geometry-type") return TermCategory::GeometryType;
  if (s == "action") return TermCategory::Action;
  if (s == "function-verb") return TermCategory::FunctionVerb;
  if (s == "flow") return TermCategory::Flow;
  throw Error(ErrorKind::InvalidArgument, "unknown lexicon category '" + std::string(s) + "'");
}

struct OntologyTerm {
  TermCategory category = TermCategory::GeometryType;
  std::string term;
  std::string domain;
  std::uint64_t usage_count = 0;
  std::string parent;  // is-A supertype; empty when none
  std::vector<std::string> synonyms;
  bool user_defined = false;

  friend bool operator==(const OntologyTerm&, const OntologyTerm&) = default;
};

// Controlled vocabulary with usage counters. Counters only ever grow: each
// selection of an existing term, or definition of a new one, is one vote.
class Lexicon {
 public:
  static constexpr const char* kDefaultDomain = "general";

  // Adds or replaces an entry verbatim (loading, seeding).
  void put(OntologyTerm t) {
    if (t.term.empty()) throw Error(ErrorKind::InvalidArgument, "lexicon term must not be empty");
    auto key = std::make_pair(t.category, t.term);
    terms_[key] = std::move(t);
  }

  // Registers a user-defined term. Returns false if it already exists.
  bool define(TermCategory category, const std::string& term, const std::string& domain,
              const std::string& parent = {}, std::vector<std::string> synonyms = {}) {
    if (term.empty()) throw Error(ErrorKind::InvalidArgument, "lexicon term must not be empty");
    auto key = std::make_pair(category, term);
    if (terms_.count(key)) return false;
    terms_.emplace(key, OntologyTerm{category, term, domain.empty() ? kDefaultDomain : domain, 1,
                                     parent, std::move(synonyms), true});
    return true;
  }

  std::uint64_t record_usage(TermCategory category, const std::string& term,
                             const std::string& domain) {
    if (term.empty()) return 0;
    auto it = resolve(category, term);
    if (it == terms_.end()) {
      define(category, term, domain);
      return 1;
    }
    return ++it->second.usage_count;
  }

  const OntologyTerm* find(TermCategory category, const std::string& term) const {
    auto it = terms_.find(std::make_pair(category, term));
    return it == terms_.end() ? nullptr : &it->second;
  }

  std::vector<OntologyTerm> entries(std::optional<TermCategory> category = std::nullopt) const {
    std::vector<OntologyTerm> out;
    for (const auto& [key, t] : terms_) {
      if (!category || key.first == *category) out.push_back(t);
    }
    return out;
  }

  std::size_t size() const { return terms_.size(); }

  // One-hop synonyms, case-insensitive and symmetric: the synonyms listed
  // on `keyword`'s own entries plus the terms whose lists name `keyword`.
  // The keyword itself is excluded. Results are lowercased and sorted.
  std::vector<std::string> synonyms_of(const std::string& keyword) const {
    std::set<std::string> out;
    std::string k = to_lower(keyword);
    for (const auto& [_, t] : terms_) {
      if (to_lower(t.term) == k) {
        for (const auto& s : t.synonyms) out.insert(to_lower(s));
      } else {
        for (const auto& s : t.synonyms) {
          if (to_lower(s) == k) {
            out.insert(to_lower(t.term));
            break;
          }
        }
      }
    }
    out.erase(k);
    return {out.begin(), out.end()};
  }

  // `type` followed by every transitive is-A subtype (sorted). Supertypes
  // of `type` are never included.
  std::vector<std::string> expand_subtypes(const std::string& type) const {
    std::map<std::string, std::set<std::string>> children;
    for (const auto& [_, t] : terms_) {
      if (!t.parent.empty() && t.parent != t.term) children[t.parent].insert(t.term);
    }
    std::set<std::string> seen{type};
    std::deque<std::string> queue{type};
    while (!queue.empty()) {
      std::string cur = queue.front();
      queue.pop_front();
      auto it = children.find(cur);
      if (it == children.end()) continue;
      for (const auto& c : it->second) {
        if (seen.insert(c).second) queue.push_back(c);
      }
    }
    seen.erase(type);
    std::vector<std::string> out{type};
    out.insert(out.end(), seen.begin(), seen.end());
    return out;
  }

  // Maps a term to the entry that lists it as a synonym (lowercased); a
  // term with its own entry, or no entry at all, maps to itself.
  std::string canonical(TermCategory category, const std::string& term) const {
    std::string k = to_lower(term);
    for (const auto& [key, t] : terms_) {
      if (key.first == category && to_lower(t.term) == k) return k;
    }
    for (const auto& [key, t] : terms_) {
      if (key.first != category) continue;
      for (const auto& s : t.synonyms) {
        if (to_lower(s) == k) return to_lower(t.term);
      }
    }
    return k;
  }

  // -- CSV: category,term,domain,usage_count,parent,synonyms[,user_defined]

  static Lexicon from_csv(std::string_view text) {
    csv::Table table("lexicon.csv", text);
    table.require({"category", "term", "domain", "usage_count", "parent", "synonyms"});
    Lexicon lex;
    for (std::size_t i = 0; i < table.size(); ++i) {
      OntologyTerm t;
      try {
        t.category = parse_category(table.cell(i, "category"));
      } catch (const Error& e) {
        throw CsvError(table.sheet(), table.row_number(i), e.what());
      }
      t.term = table.cell(i, "term");
      if (t.term.empty()) throw CsvError(table.sheet(), table.row_number(i), "empty term");
      t.domain = table.cell(i, "domain");
      if (t.domain.empty()) t.domain = kDefaultDomain;
      const std::string& count = table.cell(i, "usage_count");
      if (count.empty()) {
        t.usage_count = 0;
      } else {
        try {
          std::size_t used = 0;
          t.usage_count = std::stoull(count, &used);
          if (used != count.size() || count.front() == '-') throw std::invalid_argument(count);
        } catch (const std::exception&) {
          throw CsvError(table.sheet(), table.row_number(i), "bad usage_count '" + count + "'");
        }
      }
      t.parent = table.cell(i, "parent");
      t.synonyms = csv::split_list(table.cell(i, "synonyms"));
      if (table.has("user_defined")) {
        const std::string& u = table.cell(i, "user_defined");
        t.user_defined = u == "1" || iequals(u, "true") || iequals(u, "yes");
      }
      if (lex.find(t.category, t.term)) {
        throw CsvError(table.sheet(), table.row_number(i), "duplicate term '" + t.term + "'");
      }
      lex.put(std::move(t));
    }
    return lex;
  }

  std::string to_csv() const {
    std::vector<csv::Record> rows;
    rows.push_back({"category", "term", "domain", "usage_count", "parent", "synonyms", "user_defined"});
    for (const auto& [_, t] : terms_) {
      rows.push_back({std::string(to_string(t.category)), t.term, t.domain,
                      std::to_string(t.usage_count), t.parent, csv::join_list(t.synonyms),
                      t.user_defined ? "1" : "0"});
    }
    return csv::write(rows);
  }

  static Lexicon load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot read lexicon " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write lexicon " + path.string());
    out << to_csv();
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
  }

  friend bool operator==(const Lexicon&, const Lexicon&) = default;

 private:
  using TermMap = std::map<std::pair<TermCategory, std::string>, OntologyTerm>;

  // Exact entry, else a case-insensitive entry, else the entry listing the
  // term as a synonym, so usage never forks a synonym into its own term.
  TermMap::iterator resolve(TermCategory category, const std::string& term) {
    auto it = terms_.find(std::make_pair(category, term));
    if (it != terms_.end()) return it;
    std::string k = to_lower(term);
    for (auto i = terms_.begin(); i != terms_.end(); ++i) {
      if (i->first.first == category && to_lower(i->second.term) == k) return i;
    }
    for (auto i = terms_.begin(); i != terms_.end(); ++i) {
      if (i->first.first != category) continue;
      for (const auto& s : i->second.synonyms) {
        if (to_lower(s) == k) return i;
      }
    }
    return terms_.end();
  }

  TermMap terms_;
};

}  // namespace patgraph::fad
