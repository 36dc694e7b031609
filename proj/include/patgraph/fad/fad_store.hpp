#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "patgraph/error.hpp"
#include "patgraph/fad/function_id.hpp"
#include "patgraph/fad/lexicon.hpp"
#include "patgraph/graph/graph_store.hpp"

namespace patgraph::fad {

// Labels, relationship types and property keys of the FAD graph model.
namespace schema {
inline constexpr const char* kPatent = "patent";
inline constexpr const char* kEmergDesign = "emergDesign";
inline constexpr const char* kProduct = "product";
inline constexpr const char* kClaim = "claim";
inline constexpr const char* kGeometry = "geometry";

inline constexpr const char* kHasProduct = "hasProduct";
inline constexpr const char* kHasClaim = "hasClaim";
inline constexpr const char* kHasGeometry = "hasGeometry";
inline constexpr const char* kHasFgi = "hasFGI";

inline constexpr const char* kPatentNumber = "Patent_Number";
inline constexpr const char* kFilename = "filename";
inline constexpr const char* kTitle = "title";
inline constexpr const char* kDomain = "domain";
inline constexpr const char* kProductId = "Product_ID";
inline constexpr const char* kName = "name";
inline constexpr const char* kClaimId = "claim_id";
inline constexpr const char* kText = "text";
inline constexpr const char* kIndependent = "independent";
inline constexpr const char* kGeometricId = "Geometric_ID";
inline constexpr const char* kPatMineType = "PatMine_type";
inline constexpr const char* kAction = "action";
inline constexpr const char* kFunctionIds = "Function_IDs";
inline constexpr const char* kFunctionName = "Function_Name";
}  // namespace schema

enum class DesignKind { Patent, EmergDesign };

inline const char* design_label(DesignKind k) {
  return k == DesignKind::Patent ? schema::kPatent : schema::kEmergDesign;
}

inline const char* design_key(DesignKind k) {
  return k == DesignKind::Patent ? schema::kPatentNumber : schema::kFilename;
}

inline std::string_view to_string(DesignKind k) { return design_label(k); }

inline DesignKind parse_design_kind(std::string_view s) {
  if (s == schema::kPatent) return DesignKind::Patent;
  if (s == schema::kEmergDesign) return DesignKind::EmergDesign;
  throw Error(ErrorKind::InvalidArgument,
              "unknown design kind '" + std::string(s) + "' (expected patent or emergDesign)");
}

struct ClaimRecord {
  NodeId node;
  std::string claim_id;
  std::string text;
  bool independent = false;
  PropertyMap extras;
};

struct GeometryRecord {
  NodeId node;
  std::string geometric_id;
  std::string name;
  std::string patmine_type;
  std::vector<std::string> abstraction_labels;  // most specific first
  PropertyMap extras;
};

struct FgiRecord {
  EdgeId edge;
  std::string from_id;  // Geometric_ID of the source geometry
  std::string to_id;
  std::string action;
  std::vector<std::string> function_ids;
  std::optional<std::string> function_name;
  PropertyMap extras;
};

struct ProductRecord {
  NodeId node;
  std::string product_id;
  std::string name;
  PropertyMap extras;
  std::vector<ClaimRecord> claims;
  std::vector<GeometryRecord> geometries;
  std::vector<FgiRecord> fgis;

  const GeometryRecord* geometry(std::string_view geometric_id) const {
    for (const auto& g : geometries) {
      if (g.geometric_id == geometric_id) return &g;
    }
    return nullptr;
  }
};

// One function step: an FGI that lists the function id.
struct FunctionStep {
  std::string product_id;
  FgiRecord fgi;
};

// A design read back in full: design, products with their claims,
// geometries and FGIs. Missing levels are empty.
struct FadModel {
  NodeId node;
  DesignKind kind = DesignKind::Patent;
  std::string unique_id;
  std::string title;
  PropertyMap extras;
  std::vector<ProductRecord> products;

  std::size_t geometry_count() const {
    std::size_t n = 0;
    for (const auto& p : products) n += p.geometries.size();
    return n;
  }
  std::size_t fgi_count() const {
    std::size_t n = 0;
    for (const auto& p : products) n += p.fgis.size();
    return n;
  }

  // Function id -> its steps, in FGI order. Derived from the FGI edges.
  std::map<std::string, std::vector<FunctionStep>> functions() const {
    std::map<std::string, std::vector<FunctionStep>> out;
    for (const auto& p : products) {
      for (const auto& f : p.fgis) {
        for (const auto& id : f.function_ids) out[id].push_back({p.product_id, f});
      }
    }
    return out;
  }
};

// A step of a function located anywhere in the store.
struct FunctionStructureStep {
  std::string design_id;
  DesignKind kind = DesignKind::Patent;
  std::string product_id;
  FgiRecord fgi;
};

struct DesignSummary {
  NodeId node;
  DesignKind kind = DesignKind::Patent;
  std::string unique_id;
  std::string title;
};

// The FAD domain layer: typed operations over a GraphStore plus the
// lexicon. Not synchronised; share through Guarded<FadStore>.
class FadStore {
 public:
  FadStore() { install_constraints(); }

  explicit FadStore(GraphStore graph, Lexicon lexicon = {})
      : graph_(std::move(graph)), lexicon_(std::move(lexicon)) {
    install_constraints();
  }

  const GraphStore& graph() const { return graph_; }
  GraphStore& graph() { return graph_; }
  const Lexicon& lexicon() const { return lexicon_; }
  Lexicon& lexicon() { return lexicon_; }

  // -- level one: designs, products, claims ------------------------------

  NodeId upsert_design(DesignKind kind, const std::string& unique_id, const std::string& title,
                       const PropertyMap& extras = {}) {
    if (unique_id.empty()) throw Error(ErrorKind::InvalidArgument, "design id must not be empty");
    check_extras(extras, {design_key(kind), schema::kTitle});
    if (auto existing = find_design(unique_id, kind)) {
      PropertyMap props = graph_.node(*existing).props;
      if (!title.empty()) props[schema::kTitle] = title;
      for (const auto& [k, v] : extras) props[k] = v;
      graph_.set_node_props(*existing, std::move(props));
      return *existing;
    }
    PropertyMap props = extras;
    props[design_key(kind)] = unique_id;
    if (!title.empty()) props[schema::kTitle] = title;
    return graph_.create_node({design_label(kind)}, std::move(props));
  }

  // Replaces title and extras of an existing design.
  void update_design(NodeId design, const std::string& title, const PropertyMap& extras) {
    DesignKind kind = kind_of(design);
    check_extras(extras, {design_key(kind), schema::kTitle});
    PropertyMap props = extras;
    props[design_key(kind)] = *graph_.node(design).prop(design_key(kind));
    if (!title.empty()) props[schema::kTitle] = title;
    graph_.set_node_props(design, std::move(props));
  }

  // Removes a design with everything below it.
  void delete_design(NodeId design) {
    kind_of(design);
    std::vector<NodeId> doomed;
    for (NodeId p : graph_.successors(design, schema::kHasProduct)) {
      for (NodeId c : graph_.successors(p, schema::kHasClaim)) doomed.push_back(c);
      for (NodeId g : graph_.successors(p, schema::kHasGeometry)) doomed.push_back(g);
      doomed.push_back(p);
    }
    doomed.push_back(design);
    for (NodeId n : doomed) graph_.delete_node(n, /*cascade=*/true);
  }

  std::optional<NodeId> find_design(const std::string& unique_id,
                                    std::optional<DesignKind> kind = std::nullopt) const {
    if (kind) return graph_.find_node(design_label(*kind), design_key(*kind), unique_id);
    auto patent = find_design(unique_id, DesignKind::Patent);
    auto emerging = find_design(unique_id, DesignKind::EmergDesign);
    if (patent && emerging) {
      throw Error(ErrorKind::InvalidArgument,
                  "design id '" + unique_id + "' exists as both patent and emergDesign; give a kind");
    }
    return patent ? patent : emerging;
  }

  NodeId design(const std::string& unique_id, std::optional<DesignKind> kind = std::nullopt) const {
    if (auto id = find_design(unique_id, kind)) return *id;
    throw Error(ErrorKind::UnknownDesign, "unknown design '" + unique_id + "'");
  }

  DesignKind kind_of(NodeId design) const {
    const GraphNode* n = graph_.find(design);
    if (n) {
      if (n->principal_label() == schema::kPatent) return DesignKind::Patent;
      if (n->principal_label() == schema::kEmergDesign) return DesignKind::EmergDesign;
    }
    throw Error(ErrorKind::UnknownDesign, "node " + std::to_string(design.value) + " is not a design");
  }

  std::string unique_id_of(NodeId design) const {
    return graph_.node(design).prop(design_key(kind_of(design)))->text();
  }

  // Designs sorted by unique id, then kind.
  std::vector<DesignSummary> designs(std::optional<DesignKind> kind = std::nullopt) const {
    std::vector<DesignSummary> out;
    for (DesignKind k : {DesignKind::Patent, DesignKind::EmergDesign}) {
      if (kind && *kind != k) continue;
      for (NodeId id : graph_.nodes_with_label(design_label(k))) {
        const GraphNode& n = graph_.node(id);
        if (n.principal_label() != design_label(k)) continue;
        const PropertyValue* title = n.prop(schema::kTitle);
        out.push_back({id, k, n.prop(design_key(k))->display(),
                       title ? title->display() : std::string{}});
      }
    }
    std::sort(out.begin(), out.end(), [](const DesignSummary& a, const DesignSummary& b) {
      return std::tie(a.unique_id, a.kind) < std::tie(b.unique_id, b.kind);
    });
    return out;
  }

  NodeId add_product(NodeId design, const std::string& product_id, const std::string& name,
                     const PropertyMap& extras = {}) {
    if (!graph_.contains(design) || !is_design(design)) {
      throw Error(ErrorKind::UnknownDesign, "unknown design node " + std::to_string(design.value));
    }
    if (product_id.empty()) throw Error(ErrorKind::InvalidArgument, "product id must not be empty");
    check_extras(extras, {schema::kProductId, schema::kName});
    if (find_product(product_id)) {
      throw Error(ErrorKind::DuplicateProductId, "product '" + product_id + "' already exists");
    }
    PropertyMap props = extras;
    props[schema::kProductId] = product_id;
    if (!name.empty()) props[schema::kName] = name;
    NodeId p = graph_.create_node({schema::kProduct}, std::move(props));
    graph_.create_edge(design, p, schema::kHasProduct);
    return p;
  }

  std::optional<NodeId> find_product(const std::string& product_id) const {
    return graph_.find_node(schema::kProduct, schema::kProductId, product_id);
  }

  NodeId product(const std::string& product_id) const {
    if (auto id = find_product(product_id)) return *id;
    throw Error(ErrorKind::UnknownProduct, "unknown product '" + product_id + "'");
  }

  NodeId design_of_product(NodeId product) const {
    require_product(product);
    auto d = graph_.predecessor(product, schema::kHasProduct);
    if (!d) throw Error(ErrorKind::UnknownDesign, "product has no design");
    return *d;
  }

  NodeId add_claim(NodeId product, const std::string& claim_id, const std::string& text,
                   bool independent, const PropertyMap& extras = {}) {
    require_product(product);
    if (claim_id.empty()) throw Error(ErrorKind::InvalidClaim, "claim id must not be empty");
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw Error(ErrorKind::InvalidClaim, "claim text must not be empty");
    }
    check_extras(extras, {schema::kClaimId, schema::kText, schema::kIndependent});
    for (NodeId c : graph_.successors(product, schema::kHasClaim)) {
      const PropertyValue* id = graph_.node(c).prop(schema::kClaimId);
      if (id && id->display() == claim_id) {
        throw Error(ErrorKind::DuplicateClaimId, "claim '" + claim_id + "' already exists");
      }
    }
    PropertyMap props = extras;
    props[schema::kClaimId] = claim_id;
    props[schema::kText] = text;
    props[schema::kIndependent] = independent;
    NodeId c = graph_.create_node({schema::kClaim}, std::move(props));
    graph_.create_edge(product, c, schema::kHasClaim);
    return c;
  }

  // -- level two: geometries and FGIs ------------------------------------

  NodeId add_geometry(NodeId product, const std::string& geometric_id, const std::string& name,
                      const std::string& patmine_type,
                      const std::vector<std::string>& abstraction_labels = {},
                      const PropertyMap& extras = {}) {
    require_product(product);
    if (geometric_id.empty()) throw Error(ErrorKind::InvalidArgument, "geometric id must not be empty");
    check_extras(extras, {schema::kGeometricId, schema::kName, schema::kPatMineType});
    if (find_geometry(product, geometric_id)) {
      throw Error(ErrorKind::DuplicateGeometricId,
                  "geometry '" + geometric_id + "' already exists in this product");
    }
    std::vector<std::string> labels{schema::kGeometry};
    for (const auto& l : abstraction_labels) {
      if (is_reserved_label(l)) throw Error(ErrorKind::InvalidArgument, "reserved label '" + l + "'");
      labels.push_back(l);
    }
    PropertyMap props = extras;
    props[schema::kGeometricId] = geometric_id;
    if (!name.empty()) props[schema::kName] = name;
    if (!patmine_type.empty()) props[schema::kPatMineType] = patmine_type;
    std::string domain = domain_of(design_of_product(product));
    NodeId g = graph_.create_node(std::move(labels), std::move(props));
    graph_.create_edge(product, g, schema::kHasGeometry);
    lexicon_.record_usage(TermCategory::GeometryType, patmine_type, domain);
    return g;
  }

  std::optional<NodeId> find_geometry(NodeId product, const std::string& geometric_id) const {
    for (NodeId g : graph_.successors(product, schema::kHasGeometry)) {
      const PropertyValue* id = graph_.node(g).prop(schema::kGeometricId);
      if (id && id->display() == geometric_id) return g;
    }
    return std::nullopt;
  }

  EdgeId add_fgi(NodeId product, const std::string& from_id, const std::string& to_id,
                 const std::string& action, const std::vector<std::string>& function_ids,
                 const std::optional<std::string>& function_name = std::nullopt,
                 const PropertyMap& extras = {}) {
    require_product(product);
    auto from = find_geometry(product, from_id);
    auto to = find_geometry(product, to_id);
    if (!from || !to) {
      throw Error(ErrorKind::UnknownGeometry,
                  "geometry '" + (from ? to_id : from_id) + "' is not defined in this product");
    }
    if (action.empty()) throw Error(ErrorKind::InvalidArgument, "FGI action must not be empty");
    if (function_ids.empty()) throw Error(ErrorKind::BadFunctionId, "an FGI needs at least one function id");
    for (const auto& f : function_ids) parse_function_id(f);
    check_extras(extras, {schema::kAction, schema::kFunctionIds, schema::kFunctionName});
    PropertyMap props = extras;
    props[schema::kAction] = action;
    props[schema::kFunctionIds] = TextList(function_ids);
    if (function_name && !function_name->empty()) props[schema::kFunctionName] = *function_name;
    std::string domain = domain_of(design_of_product(product));
    EdgeId e = graph_.create_edge(*from, *to, schema::kHasFgi, std::move(props));
    lexicon_.record_usage(TermCategory::Action, action, domain);
    return e;
  }

  // -- reading -------------------------------------------------------------

  FadModel get_fad(NodeId design) const {
    FadModel m;
    m.node = design;
    m.kind = kind_of(design);
    const GraphNode& d = graph_.node(design);
    m.unique_id = d.prop(design_key(m.kind))->display();
    if (const auto* t = d.prop(schema::kTitle)) m.title = t->display();
    m.extras = without(d.props, {design_key(m.kind), schema::kTitle});
    for (NodeId p : graph_.successors(design, schema::kHasProduct)) m.products.push_back(read_product(p));
    return m;
  }

  FadModel get_fad(const std::string& unique_id, std::optional<DesignKind> kind = std::nullopt) const {
    return get_fad(design(unique_id, kind));
  }

  ProductRecord read_product(NodeId p) const {
    const GraphNode& pn = graph_.node(p);
    ProductRecord pr;
    pr.node = p;
    pr.product_id = pn.prop(schema::kProductId)->display();
    if (const auto* n = pn.prop(schema::kName)) pr.name = n->display();
    pr.extras = without(pn.props, {schema::kProductId, schema::kName});
    for (NodeId c : graph_.successors(p, schema::kHasClaim)) {
      const GraphNode& cn = graph_.node(c);
      ClaimRecord cr;
      cr.node = c;
      cr.claim_id = text_of(cn, schema::kClaimId);
      cr.text = text_of(cn, schema::kText);
      const PropertyValue* ind = cn.prop(schema::kIndependent);
      cr.independent = ind && ind->is_bool() && ind->as_bool();
      cr.extras = without(cn.props, {schema::kClaimId, schema::kText, schema::kIndependent});
      pr.claims.push_back(std::move(cr));
    }
    std::vector<EdgeId> fgis;
    for (NodeId g : graph_.successors(p, schema::kHasGeometry)) {
      pr.geometries.push_back(read_geometry(g));
      for (EdgeId e : graph_.out_edges(g)) {
        if (graph_.edge(e).type == schema::kHasFgi) fgis.push_back(e);
      }
    }
    std::sort(fgis.begin(), fgis.end());
    for (EdgeId e : fgis) pr.fgis.push_back(read_fgi(e));
    return pr;
  }

  GeometryRecord read_geometry(NodeId g) const {
    const GraphNode& gn = graph_.node(g);
    GeometryRecord gr;
    gr.node = g;
    gr.geometric_id = text_of(gn, schema::kGeometricId);
    gr.name = text_of(gn, schema::kName);
    gr.patmine_type = text_of(gn, schema::kPatMineType);
    gr.abstraction_labels.assign(gn.labels.begin() + 1, gn.labels.end());
    gr.extras = without(gn.props, {schema::kGeometricId, schema::kName, schema::kPatMineType});
    return gr;
  }

  FgiRecord read_fgi(EdgeId e) const {
    const GraphEdge& edge = graph_.edge(e);
    FgiRecord f;
    f.edge = e;
    f.from_id = text_of(graph_.node(edge.from), schema::kGeometricId);
    f.to_id = text_of(graph_.node(edge.to), schema::kGeometricId);
    if (const auto* a = edge.prop(schema::kAction)) f.action = a->display();
    if (const auto* ids = edge.prop(schema::kFunctionIds)) {
      f.function_ids = ids->is_list() ? ids->list() : TextList{ids->display()};
    }
    if (const auto* n = edge.prop(schema::kFunctionName)) f.function_name = n->display();
    f.extras = without(edge.props, {schema::kAction, schema::kFunctionIds, schema::kFunctionName});
    return f;
  }

  // Every FGI whose Function_IDs list contains `function_id`, ordered by
  // design id and then FGI creation order.
  std::vector<FunctionStructureStep> get_function_structure(const std::string& function_id) const {
    std::vector<FunctionStructureStep> out;
    for (const auto& d : designs()) {
      for (NodeId p : graph_.successors(d.node, schema::kHasProduct)) {
        std::vector<EdgeId> hits;
        for (NodeId g : graph_.successors(p, schema::kHasGeometry)) {
          for (EdgeId e : graph_.out_edges(g)) {
            const GraphEdge& edge = graph_.edge(e);
            if (edge.type != schema::kHasFgi) continue;
            const PropertyValue* ids = edge.prop(schema::kFunctionIds);
            if (!ids || !ids->is_list()) continue;
            const auto& list = ids->list();
            if (std::find(list.begin(), list.end(), function_id) != list.end()) hits.push_back(e);
          }
        }
        std::sort(hits.begin(), hits.end());
        std::string product_id = text_of(graph_.node(p), schema::kProductId);
        for (EdgeId e : hits) out.push_back({d.unique_id, d.kind, product_id, read_fgi(e)});
      }
    }
    return out;
  }

  // -- ontology --------------------------------------------------------------

  std::uint64_t lexicon_record_usage(TermCategory category, const std::string& term,
                                     const std::string& domain) {
    return lexicon_.record_usage(category, term, domain);
  }

  std::vector<std::string> expand_subtypes(const std::string& type) const {
    return lexicon_.expand_subtypes(type);
  }

  // Geometries whose type or any abstraction label is `type` or one of its
  // subtypes. A subtype query never returns its supertypes.
  std::vector<NodeId> geometries_of_type(const std::string& type) const {
    auto types = expand_subtypes(type);
    std::set<std::string> wanted(types.begin(), types.end());
    std::vector<NodeId> out;
    for (NodeId g : graph_.nodes_with_label(schema::kGeometry)) {
      const GraphNode& n = graph_.node(g);
      bool hit = false;
      if (const auto* t = n.prop(schema::kPatMineType); t && wanted.count(t->display())) hit = true;
      for (std::size_t i = 1; !hit && i < n.labels.size(); ++i) hit = wanted.count(n.labels[i]) != 0;
      if (hit) out.push_back(g);
    }
    return out;
  }

  std::string domain_of(NodeId design) const {
    const PropertyValue* d = graph_.node(design).prop(schema::kDomain);
    return d && d->is_text() && !d->text().empty() ? d->text() : Lexicon::kDefaultDomain;
  }

 private:
  void install_constraints() {
    graph_.add_constraint(schema::kPatent, schema::kPatentNumber);
    graph_.add_constraint(schema::kEmergDesign, schema::kFilename);
    graph_.add_constraint(schema::kProduct, schema::kProductId);
  }

  bool is_design(NodeId id) const {
    const auto& l = graph_.node(id).principal_label();
    return l == schema::kPatent || l == schema::kEmergDesign;
  }

  void require_product(NodeId product) const {
    const GraphNode* n = graph_.find(product);
    if (!n || n->principal_label() != schema::kProduct) {
      throw Error(ErrorKind::UnknownProduct, "unknown product node " + std::to_string(product.value));
    }
  }

  static bool is_reserved_label(const std::string& l) {
    return l == schema::kPatent || l == schema::kEmergDesign || l == schema::kProduct ||
           l == schema::kClaim || l == schema::kGeometry;
  }

  static void check_extras(const PropertyMap& extras, std::initializer_list<const char*> reserved) {
    for (const char* r : reserved) {
      if (extras.count(r)) {
        throw Error(ErrorKind::InvalidArgument,
                    std::string("property '") + r + "' is set through its own field");
      }
    }
  }

  static std::string text_of(const GraphNode& n, const char* key) {
    const PropertyValue* v = n.prop(key);
    return v ? v->display() : std::string{};
  }

  static PropertyMap without(const PropertyMap& props, std::initializer_list<const char*> keys) {
    PropertyMap out = props;
    for (const char* k : keys) out.erase(k);
    return out;
  }

  GraphStore graph_;
  Lexicon lexicon_;
};

// -- JSON rendering ----------------------------------------------------------

inline nlohmann::json to_json(const FgiRecord& f) {
  nlohmann::json j{{"from_id", f.from_id},
                   {"to_id", f.to_id},
                   {"action", f.action},
                   {"function_ids", f.function_ids},
                   {"extras", patgraph::to_json(f.extras)}};
  if (f.function_name) j["function_name"] = *f.function_name;
  return j;
}

inline nlohmann::json to_json(const FadModel& m) {
  using nlohmann::json;
  json products = json::array();
  for (const auto& p : m.products) {
    json claims = json::array();
    for (const auto& c : p.claims) {
      claims.push_back({{"claim_id", c.claim_id},
                        {"text", c.text},
                        {"independent", c.independent},
                        {"extras", patgraph::to_json(c.extras)}});
    }
    json geometries = json::array();
    for (const auto& g : p.geometries) {
      geometries.push_back({{"geometric_id", g.geometric_id},
                            {"name", g.name},
                            {"patmine_type", g.patmine_type},
                            {"labels", g.abstraction_labels},
                            {"extras", patgraph::to_json(g.extras)}});
    }
    json fgis = json::array();
    for (const auto& f : p.fgis) fgis.push_back(to_json(f));
    products.push_back({{"product_id", p.product_id},
                        {"name", p.name},
                        {"extras", patgraph::to_json(p.extras)},
                        {"claims", claims},
                        {"geometries", geometries},
                        {"fgis", fgis}});
  }
  json functions = json::object();
  for (const auto& [id, steps] : m.functions()) {
    json s = json::array();
    for (const auto& step : steps) {
      s.push_back({{"product_id", step.product_id},
                   {"from_id", step.fgi.from_id},
                   {"to_id", step.fgi.to_id},
                   {"action", step.fgi.action}});
    }
    functions[id] = s;
  }
  return json{{"kind", std::string(to_string(m.kind))},
              {"unique_id", m.unique_id},
              {"title", m.title},
              {"extras", patgraph::to_json(m.extras)},
              {"products", products},
              {"functions", functions}};
}

inline nlohmann::json to_json(const OntologyTerm& t) {
  return {{"category", std::string(to_string(t.category))},
          {"term", t.term},
          {"domain", t.domain},
          {"usage_count", t.usage_count},
          {"parent", t.parent},
          {"synonyms", t.synonyms},
          {"user_defined", t.user_defined}};
}

}  // namespace patgraph::fad
