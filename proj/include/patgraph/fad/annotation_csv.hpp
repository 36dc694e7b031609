#pragma once

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
#include "patgraph/fad/fad_store.hpp"

namespace patgraph::fad {

// Sheet file name -> CSV text.
using SheetBundle = std::map<std::string, std::string>;

namespace sheets {
inline constexpr const char* kDesigns = "designs.csv";
inline constexpr const char* kProducts = "products.csv";
inline constexpr const char* kClaims = "claims.csv";
inline constexpr const char* kGeometries = "geometries.csv";
inline constexpr const char* kFgis = "fgis.csv";
}  // namespace sheets

struct ImportRow {
  enum class Outcome { Created, Merged, Error };
  std::string sheet;
  std::size_t row = 0;  // 1-based, header is row 1
  Outcome outcome = Outcome::Created;
  std::string message;
};

inline std::string_view to_string(ImportRow::Outcome o) {
  switch (o) {
    case ImportRow::Outcome::Created: return "created";
    case ImportRow::Outcome::Merged: return "merged";
    case ImportRow::Outcome::Error: return "error";
  }
  return "?";
}

struct ImportReport {
  std::vector<ImportRow> rows;

  std::size_t count(ImportRow::Outcome o) const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.outcome == o;
    return n;
  }
  std::size_t created() const { return count(ImportRow::Outcome::Created); }
  std::size_t merged() const { return count(ImportRow::Outcome::Merged); }
  std::size_t errors() const { return count(ImportRow::Outcome::Error); }
};

inline nlohmann::json to_json(const ImportReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"sheet", row.sheet},
                    {"row", row.row},
                    {"outcome", std::string(to_string(row.outcome))},
                    {"message", row.message}});
  }
  return {{"created", r.created()}, {"merged", r.merged()}, {"errors", r.errors()}, {"rows", rows}};
}

namespace detail {

inline PropertyMap extras_from(const csv::Table& t, std::size_t i,
                               const std::vector<std::string>& columns) {
  PropertyMap out;
  for (const auto& c : columns) {
    const std::string& v = t.cell(i, c);
    if (!v.empty()) out[c] = v;
  }
  return out;
}

inline std::optional<bool> parse_flag(const std::string& s) {
  if (s.empty() || s == "0" || iequals(s, "false") || iequals(s, "no") || iequals(s, "n")) return false;
  if (s == "1" || iequals(s, "true") || iequals(s, "yes") || iequals(s, "y")) return true;
  return std::nullopt;
}

inline void merge_props(GraphStore& g, NodeId id, const PropertyMap& updates) {
  PropertyMap props = g.node(id).props;
  for (const auto& [k, v] : updates) props[k] = v;
  g.set_node_props(id, std::move(props));
}

}  // namespace detail

// Imports annotation sheets. Structural problems (unparseable CSV, missing
// required columns) throw CsvError before anything is written; per-row
// problems are reported and the row is skipped. Columns beyond the schema
// become extra properties. Existing entities are merged, not duplicated.
inline ImportReport import_annotation_csv(FadStore& store, const SheetBundle& bundle) {
  using Outcome = ImportRow::Outcome;
  auto table = [&](const char* name) -> std::optional<csv::Table> {
    auto it = bundle.find(name);
    if (it == bundle.end()) return std::nullopt;
    return csv::Table(name, it->second);
  };
  auto designs = table(sheets::kDesigns);
  auto products = table(sheets::kProducts);
  auto claims = table(sheets::kClaims);
  auto geometries = table(sheets::kGeometries);
  auto fgis = table(sheets::kFgis);
  if (designs) designs->require({"kind", "unique_id", "title"});
  if (products) products->require({"design_id", "product_id", "name"});
  if (claims) claims->require({"product_id", "claim_id", "independent", "text"});
  if (geometries) geometries->require({"product_id", "geometric_id", "name", "patmine_type", "labels"});
  if (fgis) fgis->require({"product_id", "from_id", "to_id", "action", "function_ids", "function_name"});

  ImportReport report;
  GraphStore& graph = store.graph();
  auto record = [&](const csv::Table& t, std::size_t i, Outcome o, std::string msg = {}) {
    report.rows.push_back({t.sheet(), t.row_number(i), o, std::move(msg)});
  };
  auto guarded = [&](const csv::Table& t, std::size_t i, auto&& body) {
    try {
      record(t, i, body());
    } catch (const Error& e) {
      record(t, i, Outcome::Error, std::string(patgraph::to_string(e.kind())) + ": " + e.what());
    }
  };

  std::map<std::string, DesignKind> bundle_kinds;
  if (designs) {
    auto extra_cols = designs->extra_columns({"kind", "unique_id", "title"});
    for (std::size_t i = 0; i < designs->size(); ++i) {
      guarded(*designs, i, [&] {
        DesignKind kind = parse_design_kind(designs->cell(i, "kind"));
        const std::string& id = designs->cell(i, "unique_id");
        bool existed = store.find_design(id, kind).has_value();
        store.upsert_design(kind, id, designs->cell(i, "title"),
                            detail::extras_from(*designs, i, extra_cols));
        bundle_kinds[id] = kind;
        return existed ? Outcome::Merged : Outcome::Created;
      });
    }
  }
  auto resolve_design = [&](const std::string& id) {
    auto it = bundle_kinds.find(id);
    return store.design(id, it == bundle_kinds.end() ? std::nullopt : std::optional(it->second));
  };

  if (products) {
    auto extra_cols = products->extra_columns({"design_id", "product_id", "name"});
    for (std::size_t i = 0; i < products->size(); ++i) {
      guarded(*products, i, [&] {
        NodeId design = resolve_design(products->cell(i, "design_id"));
        const std::string& pid = products->cell(i, "product_id");
        PropertyMap extras = detail::extras_from(*products, i, extra_cols);
        if (auto existing = store.find_product(pid)) {
          if (store.design_of_product(*existing) != design) {
            throw Error(ErrorKind::DuplicateProductId,
                        "product '" + pid + "' belongs to another design");
          }
          if (!products->cell(i, "name").empty()) extras[schema::kName] = products->cell(i, "name");
          detail::merge_props(graph, *existing, extras);
          return Outcome::Merged;
        }
        store.add_product(design, pid, products->cell(i, "name"), extras);
        return Outcome::Created;
      });
    }
  }

  if (claims) {
    auto extra_cols = claims->extra_columns({"product_id", "claim_id", "independent", "text"});
    for (std::size_t i = 0; i < claims->size(); ++i) {
      guarded(*claims, i, [&] {
        NodeId product = store.product(claims->cell(i, "product_id"));
        auto flag = detail::parse_flag(claims->cell(i, "independent"));
        if (!flag) {
          throw Error(ErrorKind::InvalidClaim, "bad independent flag '" + claims->cell(i, "independent") + "'");
        }
        const std::string& cid = claims->cell(i, "claim_id");
        PropertyMap extras = detail::extras_from(*claims, i, extra_cols);
        for (NodeId c : graph.successors(product, schema::kHasClaim)) {
          const PropertyValue* id = graph.node(c).prop(schema::kClaimId);
          if (!id || id->display() != cid) continue;
          if (claims->cell(i, "text").empty()) throw Error(ErrorKind::InvalidClaim, "claim text must not be empty");
          extras[schema::kText] = claims->cell(i, "text");
          extras[schema::kIndependent] = *flag;
          detail::merge_props(graph, c, extras);
          return Outcome::Merged;
        }
        store.add_claim(product, cid, claims->cell(i, "text"), *flag, extras);
        return Outcome::Created;
      });
    }
  }

  if (geometries) {
    auto extra_cols =
        geometries->extra_columns({"product_id", "geometric_id", "name", "patmine_type", "labels"});
    for (std::size_t i = 0; i < geometries->size(); ++i) {
      guarded(*geometries, i, [&] {
        NodeId product = store.product(geometries->cell(i, "product_id"));
        const std::string& gid = geometries->cell(i, "geometric_id");
        auto labels = csv::split_list(geometries->cell(i, "labels"));
        PropertyMap extras = detail::extras_from(*geometries, i, extra_cols);
        if (auto existing = store.find_geometry(product, gid)) {
          const auto& node = graph.node(*existing);
          if (!std::equal(labels.begin(), labels.end(), node.labels.begin() + 1, node.labels.end())) {
            throw Error(ErrorKind::InvalidArgument,
                        "geometry '" + gid + "' exists with different abstraction labels");
          }
          if (!geometries->cell(i, "name").empty()) extras[schema::kName] = geometries->cell(i, "name");
          if (!geometries->cell(i, "patmine_type").empty()) {
            extras[schema::kPatMineType] = geometries->cell(i, "patmine_type");
          }
          detail::merge_props(graph, *existing, extras);
          return Outcome::Merged;
        }
        store.add_geometry(product, gid, geometries->cell(i, "name"),
                           geometries->cell(i, "patmine_type"), labels, extras);
        return Outcome::Created;
      });
    }
  }

  if (fgis) {
    auto extra_cols = fgis->extra_columns(
        {"product_id", "from_id", "to_id", "action", "function_ids", "function_name"});
    for (std::size_t i = 0; i < fgis->size(); ++i) {
      guarded(*fgis, i, [&] {
        NodeId product = store.product(fgis->cell(i, "product_id"));
        auto ids = csv::split_list(fgis->cell(i, "function_ids"));
        const std::string& from = fgis->cell(i, "from_id");
        const std::string& to = fgis->cell(i, "to_id");
        const std::string& action = fgis->cell(i, "action");
        const std::string& fname = fgis->cell(i, "function_name");
        auto from_node = store.find_geometry(product, from);
        auto to_node = store.find_geometry(product, to);
        if (from_node && to_node) {
          for (EdgeId e : graph.out_edges(*from_node)) {
            const GraphEdge& edge = graph.edge(e);
            if (edge.type != schema::kHasFgi || edge.to != *to_node) continue;
            const PropertyValue* a = edge.prop(schema::kAction);
            const PropertyValue* f = edge.prop(schema::kFunctionIds);
            if (a && a->display() == action && f && f->is_list() && f->list() == ids) {
              PropertyMap props = edge.props;
              for (auto& [k, v] : detail::extras_from(*fgis, i, extra_cols)) props[k] = v;
              if (!fname.empty()) props[schema::kFunctionName] = fname;
              graph.set_edge_props(e, std::move(props));
              return Outcome::Merged;
            }
          }
        }
        store.add_fgi(product, from, to, action, ids,
                      fname.empty() ? std::nullopt : std::optional<std::string>(fname),
                      detail::extras_from(*fgis, i, extra_cols));
        return Outcome::Created;
      });
    }
  }
  return report;
}

namespace detail {

template <typename Records, typename Extras>
std::vector<std::string> extra_keys(const Records& records, Extras&& extras_of) {
  std::set<std::string> keys;
  for (const auto& r : records) {
    for (const auto& [k, _] : extras_of(r)) keys.insert(k);
  }
  return {keys.begin(), keys.end()};
}

inline void append_extras(csv::Record& row, const PropertyMap& extras,
                          const std::vector<std::string>& keys) {
  for (const auto& k : keys) {
    auto it = extras.find(k);
    row.push_back(it == extras.end() ? std::string{} : it->second.display());
  }
}

}  // namespace detail

// Writes one design as the five annotation sheets. Extra properties become
// extra columns (sorted by name); list values are ';'-joined.
inline SheetBundle export_annotation_csv(const FadStore& store, NodeId design) {
  FadModel m = store.get_fad(design);
  SheetBundle out;

  {
    auto keys = detail::extra_keys(std::vector<FadModel>{m}, [](const FadModel& x) { return x.extras; });
    csv::Record header{"kind", "unique_id", "title"};
    header.insert(header.end(), keys.begin(), keys.end());
    csv::Record row{std::string(to_string(m.kind)), m.unique_id, m.title};
    detail::append_extras(row, m.extras, keys);
    out[sheets::kDesigns] = csv::write({header, row});
  }

  std::vector<std::pair<std::string, const ClaimRecord*>> claims;
  std::vector<std::pair<std::string, const GeometryRecord*>> geoms;
  std::vector<std::pair<std::string, const FgiRecord*>> fgis;
  for (const auto& p : m.products) {
    for (const auto& c : p.claims) claims.emplace_back(p.product_id, &c);
    for (const auto& g : p.geometries) geoms.emplace_back(p.product_id, &g);
    for (const auto& f : p.fgis) fgis.emplace_back(p.product_id, &f);
  }

  {
    auto keys = detail::extra_keys(m.products, [](const ProductRecord& p) { return p.extras; });
    std::vector<csv::Record> rows{{"design_id", "product_id", "name"}};
    rows[0].insert(rows[0].end(), keys.begin(), keys.end());
    for (const auto& p : m.products) {
      csv::Record row{m.unique_id, p.product_id, p.name};
      detail::append_extras(row, p.extras, keys);
      rows.push_back(std::move(row));
    }
    out[sheets::kProducts] = csv::write(rows);
  }
  {
    auto keys = detail::extra_keys(claims, [](const auto& c) { return c.second->extras; });
    std::vector<csv::Record> rows{{"product_id", "claim_id", "independent", "text"}};
    rows[0].insert(rows[0].end(), keys.begin(), keys.end());
    for (const auto& [pid, c] : claims) {
      csv::Record row{pid, c->claim_id, c->independent ? "true" : "false", c->text};
      detail::append_extras(row, c->extras, keys);
      rows.push_back(std::move(row));
    }
    out[sheets::kClaims] = csv::write(rows);
  }
  {
    auto keys = detail::extra_keys(geoms, [](const auto& g) { return g.second->extras; });
    std::vector<csv::Record> rows{{"product_id", "geometric_id", "name", "patmine_type", "labels"}};
    rows[0].insert(rows[0].end(), keys.begin(), keys.end());
    for (const auto& [pid, g] : geoms) {
      csv::Record row{pid, g->geometric_id, g->name, g->patmine_type, csv::join_list(g->abstraction_labels)};
      detail::append_extras(row, g->extras, keys);
      rows.push_back(std::move(row));
    }
    out[sheets::kGeometries] = csv::write(rows);
  }
  {
    auto keys = detail::extra_keys(fgis, [](const auto& f) { return f.second->extras; });
    std::vector<csv::Record> rows{{"product_id", "from_id", "to_id", "action", "function_ids", "function_name"}};
    rows[0].insert(rows[0].end(), keys.begin(), keys.end());
    for (const auto& [pid, f] : fgis) {
      csv::Record row{pid, f->from_id, f->to_id, f->action, csv::join_list(f->function_ids),
                      f->function_name.value_or("")};
      detail::append_extras(row, f->extras, keys);
      rows.push_back(std::move(row));
    }
    out[sheets::kFgis] = csv::write(rows);
  }
  return out;
}

// Reads every known sheet present in `dir`.
inline SheetBundle read_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::IoFailure, "not a directory: " + dir.string());
  }
  SheetBundle out;
  for (const char* name : {sheets::kDesigns, sheets::kProducts, sheets::kClaims, sheets::kGeometries,
                           sheets::kFgis}) {
    auto path = dir / name;
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    out[name] = ss.str();
  }
  return out;
}

inline void write_bundle(const std::filesystem::path& dir, const SheetBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, text] : bundle) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + (dir / name).string());
    out << text;
  }
}

}  // namespace patgraph::fad
