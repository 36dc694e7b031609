#pragma once

// HTTP facade. Each endpoint maps onto one library call; reads share the
// store, writes take it exclusively.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <string>
#include <thread>

#include "httplib.h"
#include "nlohmann/json.hpp"
#include "patgraph/error.hpp"
#include "patgraph/fad/annotation_csv.hpp"
#include "patgraph/fad/fad_store.hpp"
#include "patgraph/graph/snapshot.hpp"
#include "patgraph/guarded.hpp"
#include "patgraph/query/executor.hpp"
#include "patgraph/query/patql.hpp"
#include "patgraph/query/search.hpp"
#include "patgraph/scoring/scoring.hpp"
#include "patgraph/service/config.hpp"
#include "patgraph/viz/dot.hpp"
#include "patgraph/viz/graphjson.hpp"

namespace patgraph::service {

using nlohmann::json;

inline int status_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return 422;
    case ErrorKind::ReadOnlyViolation: return 403;
    case ErrorKind::UnknownDesign:
    case ErrorKind::UnknownProduct:
    case ErrorKind::UnknownGeometry:
    case ErrorKind::UnknownNode:
    case ErrorKind::UnknownEdge: return 404;
    case ErrorKind::ConstraintViolation:
    case ErrorKind::PreexistingDuplicates:
    case ErrorKind::DuplicateProductId:
    case ErrorKind::DuplicateGeometricId:
    case ErrorKind::DuplicateClaimId: return 409;
    case ErrorKind::IoFailure: return 500;
    default: return 400;
  }
}

inline json error_body(const Error& e) {
  json body{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    body["line"] = pe->line();
    body["column"] = pe->column();
    body["expected"] = pe->expected();
  }
  return body;
}

inline json to_json(const fad::FunctionStructureStep& s) {
  return {{"design_id", s.design_id},
          {"kind", std::string(fad::to_string(s.kind))},
          {"product_id", s.product_id},
          {"fgi", fad::to_json(s.fgi)}};
}

inline std::optional<fad::DesignKind> kind_param(const httplib::Request& req) {
  if (!req.has_param("kind") || req.get_param_value("kind").empty()) return std::nullopt;
  return fad::parse_design_kind(req.get_param_value("kind"));
}

class Service {
 public:
  explicit Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    GraphStore graph;
    fad::Lexicon lexicon;
    if (!cfg_.snapshot_path.empty() && std::filesystem::exists(cfg_.snapshot_path)) {
      try {
        graph = snapshot_load(cfg_.snapshot_path);
      } catch (const Error& e) {
        throw Error(ErrorKind::SnapshotLoadFailure, std::string("refusing to start: ") + e.what());
      }
    }
    if (!cfg_.lexicon_path.empty() && std::filesystem::exists(cfg_.lexicon_path)) {
      try {
        lexicon = fad::Lexicon::load(cfg_.lexicon_path);
      } catch (const Error& e) {
        throw Error(ErrorKind::SnapshotLoadFailure, std::string("refusing to start: ") + e.what());
      }
    }
    try {
      store_.reset(fad::FadStore(std::move(graph), std::move(lexicon)));
    } catch (const Error& e) {
      throw Error(ErrorKind::SnapshotLoadFailure, std::string("refusing to start: ") + e.what());
    }
    routes();
  }

  ~Service() { stop(); }

  Guarded<fad::FadStore>& store() { return store_; }
  const ServiceConfig& config() const { return cfg_; }
  httplib::Server& server() { return server_; }

  // Binds the listening socket; returns the bound port.
  int bind() {
    int port = cfg_.port == 0 ? server_.bind_to_any_port(cfg_.host) : cfg_.port;
    if (cfg_.port != 0 && !server_.bind_to_port(cfg_.host, cfg_.port)) port = -1;
    if (port <= 0) {
      throw Error(ErrorKind::BindFailure, "cannot listen on " + cfg_.host + ":" + std::to_string(cfg_.port));
    }
    port_ = port;
    return port;
  }

  int port() const { return port_; }

  // Blocks serving requests until stop().
  void serve_forever() {
    if (port_ <= 0) bind();
    server_.listen_after_bind();
  }

  // Serves on a background thread; returns the bound port.
  int start() {
    int port = bind();
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  // Stops accepting requests and persists the store. Idempotent.
  void stop() {
    if (stopped_.exchange(true)) return;
    server_.stop();
    if (thread_.joinable()) thread_.join();
    persist();
  }

  void persist() {
    std::lock_guard lock(persist_mutex_);
    store_.read([&](const fad::FadStore& s) {
      if (!cfg_.snapshot_path.empty()) snapshot_save(s.graph(), cfg_.snapshot_path);
      if (!cfg_.lexicon_path.empty()) s.lexicon().save(cfg_.lexicon_path);
    });
  }

 private:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        res.status = status_for(e.kind());
        res.set_content(error_body(e).dump(), "application/json");
      } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", "InvalidArgument"}, {"message", e.what()}}.dump(), "application/json");
      }
    };
  }

  static json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::InvalidArgument, "request body must be a JSON object");
    return j;
  }

  static void send(httplib::Response& res, const json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  static PropertyMap extras_of(const json& body) {
    return body.contains("extras") ? props_from_json(body.at("extras")) : PropertyMap{};
  }

  // Runs `f` on a copy and publishes it only on success.
  template <class F>
  auto transact(F&& f) {
    return store_.write([&](fad::FadStore& live) {
      fad::FadStore work = live;
      auto result = f(work);
      live = std::move(work);
      return result;
    });
  }

  void routes() {
    auto& s = server_;

    s.Post("/designs", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      auto kind = fad::parse_design_kind(b.value("kind", std::string(fad::schema::kPatent)));
      std::string id = b.at("unique_id").template get<std::string>();
      json out = store_.write([&](fad::FadStore& st) {
        if (st.find_design(id, kind)) {
          throw Error(ErrorKind::ConstraintViolation, "design '" + id + "' already exists");
        }
        st.upsert_design(kind, id, b.value("title", std::string{}), extras_of(b));
        return fad::to_json(st.get_fad(id, kind));
      });
      send(res, out, 201);
    }));

    s.Get("/designs", guarded([this](const auto& req, auto& res) {
      std::size_t page = req.has_param("page") ? std::stoul(req.get_param_value("page")) : 0;
      std::size_t size = req.has_param("page_size") ? std::stoul(req.get_param_value("page_size")) : cfg_.page_size;
      auto kind = kind_param(req);
      send(res, store_.read([&](const fad::FadStore& st) {
        return query::to_json(query::list_designs(st, kind, page, size));
      }));
    }));

    s.Get(R"(/designs/([^/]+)/fad)", guarded([this](const auto& req, auto& res) {
      auto kind = kind_param(req);
      send(res, store_.read([&](const fad::FadStore& st) { return fad::to_json(st.get_fad(req.matches[1], kind)); }));
    }));

    s.Put(R"(/designs/([^/]+))", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      auto kind = kind_param(req);
      send(res, store_.write([&](fad::FadStore& st) {
        NodeId d = st.design(req.matches[1], kind);
        st.update_design(d, b.value("title", std::string{}), extras_of(b));
        return fad::to_json(st.get_fad(d));
      }));
    }));

    s.Delete(R"(/designs/([^/]+))", guarded([this](const auto& req, auto& res) {
      auto kind = kind_param(req);
      store_.write([&](fad::FadStore& st) { st.delete_design(st.design(req.matches[1], kind)); });
      res.status = 204;
    }));

    s.Post(R"(/designs/([^/]+)/products)", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      auto kind = kind_param(req);
      send(res,
           store_.write([&](fad::FadStore& st) {
             NodeId p = st.add_product(st.design(req.matches[1], kind), b.at("product_id").template get<std::string>(),
                                       b.value("name", std::string{}), extras_of(b));
             return product_json(st, p);
           }),
           201);
    }));

    s.Post(R"(/products/([^/]+)/claims)", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      send(res,
           store_.write([&](fad::FadStore& st) {
             NodeId p = st.product(req.matches[1]);
             st.add_claim(p, b.at("claim_id").template get<std::string>(), b.value("text", std::string{}),
                          b.value("independent", false), extras_of(b));
             return product_json(st, p);
           }),
           201);
    }));

    s.Post(R"(/products/([^/]+)/geometries)", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      send(res,
           store_.write([&](fad::FadStore& st) {
             NodeId p = st.product(req.matches[1]);
             st.add_geometry(p, b.at("geometric_id").template get<std::string>(), b.value("name", std::string{}),
                             b.value("patmine_type", std::string{}),
                             b.value("labels", std::vector<std::string>{}), extras_of(b));
             return product_json(st, p);
           }),
           201);
    }));

    s.Post(R"(/products/([^/]+)/fgis)", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      std::optional<std::string> fname;
      if (b.contains("function_name") && !b.at("function_name").is_null()) {
        fname = b.at("function_name").template get<std::string>();
      }
      send(res,
           store_.write([&](fad::FadStore& st) {
             NodeId p = st.product(req.matches[1]);
             st.add_fgi(p, b.at("from_id").template get<std::string>(), b.at("to_id").template get<std::string>(),
                        b.value("action", std::string{}), b.value("function_ids", std::vector<std::string>{}), fname,
                        extras_of(b));
             return product_json(st, p);
           }),
           201);
    }));

    s.Post("/import", guarded([this](const auto& req, auto& res) {
      fad::SheetBundle bundle;
      for (const auto& [field, file] : req.files) {
        std::string name = !file.filename.empty() ? std::filesystem::path(file.filename).filename().string() : field;
        bundle[name] = file.content;
      }
      if (bundle.empty()) throw Error(ErrorKind::InvalidArgument, "no CSV sheets in request");
      auto report = transact([&](fad::FadStore& st) { return fad::import_annotation_csv(st, bundle); });
      send(res, fad::to_json(report));
    }));

    s.Get(R"(/designs/([^/]+)/export)", guarded([this](const auto& req, auto& res) {
      auto kind = kind_param(req);
      send(res, store_.read([&](const fad::FadStore& st) {
        json out = json::object();
        for (const auto& [sheet, text] : fad::export_annotation_csv(st, st.design(req.matches[1], kind))) {
          out[sheet] = text;
        }
        return out;
      }));
    }));

    s.Post("/search", guarded([this](const auto& req, auto& res) { send(res, search(body_of(req))); }));

    s.Get(R"(/functions/([^/]+)/structure)", guarded([this](const auto& req, auto& res) {
      send(res, store_.read([&](const fad::FadStore& st) {
        json out = json::array();
        for (const auto& step : st.get_function_structure(req.matches[1])) out.push_back(to_json(step));
        return out;
      }));
    }));

    s.Post(R"(/designs/([^/]+)/score)", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      scoring::ScoringOptions opt;
      if (b.contains("weights")) {
        const auto& w = b.at("weights");
        opt.weights.w_geometry = w.value("geometry", opt.weights.w_geometry);
        opt.weights.w_fgi = w.value("fgi", opt.weights.w_fgi);
        opt.weights.w_function = w.value("function", opt.weights.w_function);
        opt.weights.divisor = w.value("divisor", opt.weights.divisor);
      }
      opt.supertype_matching = b.value("supertype_matching", false);
      opt.action_synonyms = b.value("action_synonyms", false);
      auto corpus = fad::parse_design_kind(b.value("corpus", std::string(fad::schema::kPatent)));
      std::string id = req.matches[1];
      json out = store_.read([&](const fad::FadStore& st) {
        return scoring::to_json(scoring::score_corpus(st, id, corpus, opt));
      });
      {
        std::lock_guard lock(reports_mutex_);
        reports_[id] = out;
      }
      send(res, out);
    }));

    s.Get(R"(/designs/([^/]+)/score)", guarded([this](const auto& req, auto& res) {
      std::lock_guard lock(reports_mutex_);
      auto it = reports_.find(req.matches[1]);
      if (it == reports_.end()) {
        throw Error(ErrorKind::UnknownDesign, "no score report for '" + std::string(req.matches[1]) + "'");
      }
      send(res, it->second);
    }));

    s.Get(R"(/designs/([^/]+)/viz)", guarded([this](const auto& req, auto& res) {
      std::string format = req.has_param("format") ? req.get_param_value("format") : "dot";
      auto level = viz::AbstractionLevel::parse(req.has_param("level") ? req.get_param_value("level") : "");
      auto kind = kind_param(req);
      std::string id = req.matches[1];
      if (format == "graphjson") {
        bool geometry_only = req.has_param("projection") && req.get_param_value("projection") == "geometry";
        send(res, store_.read([&](const fad::FadStore& st) {
          return viz::to_json(viz::document_of(st, st.get_fad(id, kind),
                                               geometry_only ? viz::Projection::GeometryOnly : viz::Projection::Full));
        }));
        return;
      }
      if (format != "dot" && format != "svg") {
        throw Error(ErrorKind::InvalidArgument, "format must be dot, graphjson or svg");
      }
      std::string dot = store_.read([&](const fad::FadStore& st) {
        fad::FadModel m = st.get_fad(id, kind);
        if (req.has_param("highlight") && !req.get_param_value("highlight").empty()) {
          auto report = scoring::compute_overlap(m, st.get_fad(req.get_param_value("highlight")), st.lexicon());
          return viz::to_dot(m, level, &report, true);
        }
        return viz::to_dot(m, level);
      });
      if (format == "svg") {
        res.set_content(viz::render_dot(cfg_.dot_engine, dot, "svg"), "image/svg+xml");
      } else {
        res.set_content(dot, "text/vnd.graphviz");
      }
    }));

    s.Get("/lexicon", guarded([this](const auto& req, auto& res) {
      std::optional<fad::TermCategory> cat;
      if (req.has_param("category")) cat = fad::parse_category(req.get_param_value("category"));
      send(res, store_.read([&](const fad::FadStore& st) {
        json out = json::array();
        for (const auto& t : st.lexicon().entries(cat)) out.push_back(fad::to_json(t));
        return out;
      }));
    }));

    s.Post("/lexicon", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      auto cat = fad::parse_category(b.at("category").template get<std::string>());
      std::string term = b.at("term").template get<std::string>();
      json out = store_.write([&](fad::FadStore& st) {
        if (!st.lexicon().define(cat, term, b.value("domain", std::string{}), b.value("parent", std::string{}),
                                 b.value("synonyms", std::vector<std::string>{}))) {
          throw Error(ErrorKind::ConstraintViolation, "term '" + term + "' already exists");
        }
        return fad::to_json(*st.lexicon().find(cat, term));
      });
      send(res, out, 201);
    }));

    s.Post("/lexicon/usage", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      auto cat = fad::parse_category(b.at("category").template get<std::string>());
      std::string term = b.at("term").template get<std::string>();
      if (term.empty()) throw Error(ErrorKind::InvalidArgument, "term must not be empty");
      send(res, store_.write([&](fad::FadStore& st) {
        st.lexicon().record_usage(cat, term, b.value("domain", std::string(fad::Lexicon::kDefaultDomain)));
        return fad::to_json(*st.lexicon().find(cat, term));
      }));
    }));

    s.Get(R"(/patents/([^/]+)/document)", guarded([this](const auto& req, auto& res) {
      std::string id = req.matches[1];
      static const std::regex safe("[A-Za-z0-9][A-Za-z0-9._-]*");
      if (!std::regex_match(id, safe)) throw Error(ErrorKind::InvalidArgument, "bad document id");
      auto path = find_document(id);
      if (!path) throw Error(ErrorKind::UnknownDesign, "no document for '" + id + "'");
      std::ifstream in(*path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      res.set_content(ss.str(), content_type(path->extension().string()));
    }));
  }

  static json product_json(const fad::FadStore& st, NodeId p) {
    fad::ProductRecord r = st.read_product(p);
    json geoms = json::array(), fgis = json::array(), claims = json::array();
    for (const auto& g : r.geometries) {
      geoms.push_back({{"geometric_id", g.geometric_id}, {"name", g.name}, {"patmine_type", g.patmine_type},
                       {"labels", g.abstraction_labels}});
    }
    for (const auto& f : r.fgis) fgis.push_back(fad::to_json(f));
    for (const auto& c : r.claims) {
      claims.push_back({{"claim_id", c.claim_id}, {"text", c.text}, {"independent", c.independent}});
    }
    return {{"product_id", r.product_id}, {"name", r.name}, {"claims", claims}, {"geometries", geoms}, {"fgis", fgis}};
  }

  json search(const json& b) {
    std::string mode = b.value("mode", std::string("fulltext"));
    bool expand = b.value("expand_synonyms", false);
    auto keywords = b.value("keywords", std::vector<std::string>{});
    return store_.read([&](const fad::FadStore& st) -> json {
      if (mode == "fulltext") return query::to_json(query::fulltext_search(st, keywords, expand));
      if (mode == "semantic") {
        query::SemanticQuery q;
        q.keywords = keywords;
        q.expand_synonyms = expand;
        if (b.contains("fields")) {
          for (const auto& [k, v] : b.at("fields").items()) {
            q.fields[query::parse_semantic_field(k)] = v.template get<std::string>();
          }
        }
        return query::to_json(query::semantic_search(st, q));
      }
      if (mode == "fgi") {
        query::FgiPatternQuery q;
        q.source_type = b.value("source_type", std::string{});
        q.target_type = b.value("target_type", std::string{});
        if (b.contains("action")) q.action = b.at("action").template get<std::string>();
        if (b.contains("function_id")) q.function_id = b.at("function_id").template get<std::string>();
        return query::to_json(query::fgi_pattern_search(st, q));
      }
      if (mode == "raw") {
        auto ast = query::parse_query(b.at("raw_query").template get<std::string>());
        return query::to_json(st.graph(), query::execute_query(st.graph(), ast));
      }
      throw Error(ErrorKind::InvalidArgument, "mode must be fulltext, semantic, fgi or raw");
    });
  }

  std::optional<std::filesystem::path> find_document(const std::string& id) const {
    if (cfg_.documents_dir.empty()) return std::nullopt;
    std::vector<std::filesystem::path> hits;
    for (const auto& entry : std::filesystem::directory_iterator(cfg_.documents_dir)) {
      if (entry.is_regular_file() && entry.path().stem() == id) hits.push_back(entry.path());
    }
    if (hits.empty()) return std::nullopt;
    std::sort(hits.begin(), hits.end());
    return hits.front();
  }

  static std::string content_type(const std::string& ext) {
    if (ext == ".pdf") return "application/pdf";
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".txt") return "text/plain";
    return "application/octet-stream";
  }

  ServiceConfig cfg_;
  Guarded<fad::FadStore> store_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  std::atomic<bool> stopped_{false};
  std::mutex persist_mutex_;
  std::mutex reports_mutex_;
  std::map<std::string, json> reports_;
};

}  // namespace patgraph::service
