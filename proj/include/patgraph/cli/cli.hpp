#pragma once

// Batch front end. `run` is the whole program minus process plumbing so it
// can be driven in-process. Exit codes: 0 ok, 1 domain error, 2 usage.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "patgraph/fad/annotation_csv.hpp"
#include "patgraph/fad/fad_store.hpp"
#include "patgraph/graph/snapshot.hpp"
#include "patgraph/query/executor.hpp"
#include "patgraph/query/patql.hpp"
#include "patgraph/query/search.hpp"
#include "patgraph/scoring/scoring.hpp"
#include "patgraph/service/service.hpp"
#include "patgraph/viz/dot.hpp"
#include "patgraph/viz/graphjson.hpp"

namespace patgraph::cli {

namespace detail {

inline std::atomic<bool>& stop_requested() {
  static std::atomic<bool> flag{false};
  return flag;
}

inline void on_signal(int) { stop_requested() = true; }

// Left-aligned text table with a header rule.
inline void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << '\n';
  };
  line(rows.front());
  std::size_t total = 0;
  for (std::size_t w : width) total += w + 2;
  out << std::string(total > 2 ? total - 2 : total, '-') << '\n';
  for (std::size_t i = 1; i < rows.size(); ++i) line(rows[i]);
}

inline void emit(std::ostream& out, bool as_csv, const std::vector<std::vector<std::string>>& rows) {
  if (as_csv) {
    out << csv::write(rows);
  } else {
    print_table(out, rows);
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct Paths {
  std::string store = "patgraph.snapshot";
  std::string lexicon;

  std::filesystem::path lexicon_path() const { return lexicon.empty() ? store + ".lexicon.csv" : lexicon; }

  fad::FadStore load() const {
    GraphStore g;
    fad::Lexicon lex;
    if (std::filesystem::exists(store)) g = snapshot_load(store);
    if (std::filesystem::exists(lexicon_path())) lex = fad::Lexicon::load(lexicon_path());
    return fad::FadStore(std::move(g), std::move(lex));
  }

  void save(const fad::FadStore& st) const {
    snapshot_save(st.graph(), store);
    st.lexicon().save(lexicon_path());
  }
};

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"patgraph: FAD knowledge-base engine", "patgraph"};
  app.require_subcommand(1);
  detail::Paths paths;
  bool as_csv = false;
  app.add_option("--store", paths.store, "snapshot file")->envname("PATGRAPH_SNAPSHOT");
  app.add_option("--lexicon", paths.lexicon, "lexicon CSV (default: <store>.lexicon.csv)")->envname("PATGRAPH_LEXICON");
  app.add_flag("--csv", as_csv, "machine-readable CSV output");

  std::string dir, design_id, kind_name;
  auto* import_cmd = app.add_subcommand("import", "import annotation CSV sheets from a directory");
  import_cmd->add_option("dir", dir, "directory holding designs.csv, products.csv, ...")->required();

  std::string export_dir;
  auto* export_cmd = app.add_subcommand("export", "write a design's annotation sheets");
  export_cmd->add_option("id", design_id)->required();
  export_cmd->add_option("dir", export_dir)->required();
  export_cmd->add_option("--kind", kind_name, "patent or emergDesign");

  std::string mode = "fulltext", keywords, source_type, target_type, action, function_id;
  std::vector<std::string> fields;
  bool expand = false;
  auto* search_cmd = app.add_subcommand("search", "fulltext, semantic or FGI-pattern search");
  search_cmd->add_option("--mode", mode)->check(CLI::IsMember({"fulltext", "semantic", "fgi"}));
  search_cmd->add_option("--keywords", keywords, "comma-separated keywords");
  search_cmd->add_flag("--expand-synonyms", expand);
  search_cmd->add_option("--field", fields, "semantic field, e.g. geometry=lever (repeatable)");
  search_cmd->add_option("--source-type", source_type, "fgi mode: regex on the source type");
  search_cmd->add_option("--target-type", target_type, "fgi mode: regex on the target type");
  search_cmd->add_option("--action", action, "fgi mode: action");
  search_cmd->add_option("--function-id", function_id, "fgi mode: function id");

  std::string query_file;
  bool allow_write = false;
  auto* query_cmd = app.add_subcommand("query", "run a PatQL file");
  query_cmd->add_option("file", query_file)->required()->check(CLI::ExistingFile);
  query_cmd->add_flag("--write", allow_write, "allow CREATE / MERGE / constraints and save the result");

  std::string weights, corpus = "patent";
  bool supertype = false, action_synonyms = false;
  auto* score_cmd = app.add_subcommand("score", "score a design against the corpus");
  score_cmd->add_option("id", design_id)->required();
  score_cmd->add_option("--weights", weights, "g,f,fn,div (default 10,20,30,60)");
  score_cmd->add_option("--corpus", corpus)->check(CLI::IsMember({"patent", "emergDesign"}));
  score_cmd->add_flag("--supertype", supertype, "experimental: match geometries by topmost label");
  score_cmd->add_flag("--action-synonyms", action_synonyms, "compare actions through the lexicon");

  std::string format = "dot", level, projection = "full", highlight;
  auto* viz_cmd = app.add_subcommand("viz", "emit DOT or GraphJSON for a design");
  viz_cmd->add_option("id", design_id)->required();
  viz_cmd->add_option("--format", format)->check(CLI::IsMember({"dot", "graphjson"}));
  viz_cmd->add_option("--level", level, "designer-name | patmine-type | supertype:<k>");
  viz_cmd->add_option("--projection", projection)->check(CLI::IsMember({"full", "geometry"}));
  viz_cmd->add_option("--highlight", highlight, "design whose overlap is highlighted");
  viz_cmd->add_option("--kind", kind_name, "patent or emergDesign");

  auto* lexicon_cmd = app.add_subcommand("lexicon", "lexicon maintenance");
  lexicon_cmd->require_subcommand(1);
  auto* stats_cmd = lexicon_cmd->add_subcommand("stats", "term counts and usage per category");

  std::string config_file;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
  serve_cmd->add_option("--config", config_file)->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  std::optional<fad::DesignKind> kind;
  try {
    if (!kind_name.empty()) kind = fad::parse_design_kind(kind_name);

    if (*import_cmd) {
      fad::FadStore st = paths.load();
      auto report = fad::import_annotation_csv(st, fad::read_bundle(dir));
      paths.save(st);
      std::vector<std::vector<std::string>> rows{{"sheet", "row", "outcome", "message"}};
      for (const auto& r : report.rows) {
        if (r.outcome == fad::ImportRow::Outcome::Error || as_csv) {
          rows.push_back({r.sheet, std::to_string(r.row), std::string(fad::to_string(r.outcome)), r.message});
        }
      }
      if (!as_csv) {
        out << "created " << report.created() << ", merged " << report.merged() << ", errors " << report.errors()
            << '\n';
        if (rows.size() > 1) detail::print_table(out, rows);
      } else {
        out << csv::write(rows);
      }
      return report.errors() == 0 ? 0 : 1;
    }

    if (*export_cmd) {
      fad::FadStore st = paths.load();
      fad::write_bundle(export_dir, fad::export_annotation_csv(st, st.design(design_id, kind)));
      out << "wrote " << export_dir << '\n';
      return 0;
    }

    if (*search_cmd) {
      fad::FadStore st = paths.load();
      auto kws = detail::split(keywords, ',');
      if (mode == "fgi") {
        query::FgiPatternQuery q{source_type, target_type, std::nullopt, std::nullopt};
        if (!action.empty()) q.action = action;
        if (!function_id.empty()) q.function_id = function_id;
        auto result = query::fgi_pattern_search(st, q);
        std::vector<std::vector<std::string>> rows{
            {"design_id", "product_id", "source_type", "action", "target_type", "function_ids"}};
        for (const auto& h : result.hits) {
          rows.push_back({h.design_id, h.product_id, h.source_type, h.fgi.action, h.target_type,
                          csv::join_list(h.fgi.function_ids)});
        }
        detail::emit(out, as_csv, rows);
        return 0;
      }
      std::vector<query::RankedHit> hits;
      if (mode == "semantic") {
        query::SemanticQuery q;
        q.keywords = kws;
        q.expand_synonyms = expand;
        for (const auto& f : fields) {
          auto eq = f.find('=');
          if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--field expects name=value");
          q.fields[query::parse_semantic_field(f.substr(0, eq))] = f.substr(eq + 1);
        }
        hits = query::semantic_search(st, q);
      } else {
        hits = query::fulltext_search(st, kws, expand);
      }
      std::vector<std::vector<std::string>> rows{{"design_id", "kind", "match_rank", "matched"}};
      for (const auto& h : hits) {
        rows.push_back({h.design_id, std::string(fad::to_string(h.kind)), PropertyValue(h.match_rank).display(),
                        std::to_string(h.items.size())});
      }
      detail::emit(out, as_csv, rows);
      return 0;
    }

    if (*query_cmd) {
      std::ifstream in(query_file);
      std::ostringstream text;
      text << in.rdbuf();
      auto ast = query::parse_query(text.str());
      fad::FadStore st = paths.load();
      query::ResultTable table;
      if (allow_write && !ast.read_only()) {
        table = query::execute_mutating_query(st.graph(), ast);
        paths.save(st);
      } else {
        table = query::execute_query(st.graph(), ast);
      }
      std::vector<std::vector<std::string>> rows{table.columns};
      for (const auto& r : table.rows) {
        std::vector<std::string> cells;
        for (const auto& c : r) cells.push_back(query::cell_display(st.graph(), c));
        rows.push_back(std::move(cells));
      }
      if (!table.columns.empty()) detail::emit(out, as_csv, rows);
      if (!as_csv && !ast.read_only()) {
        out << "nodes created " << table.stats.nodes_created << ", relationships created "
            << table.stats.edges_created << ", constraints added " << table.stats.constraints_added << '\n';
      }
      return 0;
    }

    if (*score_cmd) {
      scoring::ScoringOptions opt;
      if (!weights.empty()) {
        auto parts = detail::split(weights, ',');
        if (parts.size() != 4) throw CLI::ValidationError("--weights", "expected g,f,fn,div");
        double* slots[] = {&opt.weights.w_geometry, &opt.weights.w_fgi, &opt.weights.w_function, &opt.weights.divisor};
        for (std::size_t i = 0; i < 4; ++i) {
          try {
            std::size_t used = 0;
            *slots[i] = std::stod(parts[i], &used);
            if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
          } catch (const std::exception&) {
            throw CLI::ValidationError("--weights", "not a number: " + parts[i]);
          }
        }
      }
      opt.supertype_matching = supertype;
      opt.action_synonyms = action_synonyms;
      fad::FadStore st = paths.load();
      auto ranking = scoring::score_corpus(st, design_id, fad::parse_design_kind(corpus), opt);
      if (as_csv) {
        out << scoring::score_report_csv(ranking);
      } else {
        std::vector<std::vector<std::string>> rows{
            {"rank", "patent_id", "raw", "normalized", "geometries", "fgis", "functions"}};
        std::size_t rank = 0;
        for (const auto& r : ranking) {
          rows.push_back({std::to_string(++rank), r.design_id, scoring::format_number(r.score.raw),
                          scoring::format_number(r.score.normalized), std::to_string(r.report.counts.geometries),
                          std::to_string(r.report.counts.fgis), std::to_string(r.report.counts.functions)});
        }
        detail::print_table(out, rows);
      }
      return 0;
    }

    if (*viz_cmd) {
      fad::FadStore st = paths.load();
      fad::FadModel m = st.get_fad(design_id, kind);
      if (format == "graphjson") {
        auto p = projection == "geometry" ? viz::Projection::GeometryOnly : viz::Projection::Full;
        out << viz::to_json(viz::document_of(st, m, p)).dump(2) << '\n';
      } else if (!highlight.empty()) {
        auto report = scoring::compute_overlap(m, st.get_fad(highlight), st.lexicon());
        out << viz::to_dot(m, viz::AbstractionLevel::parse(level), &report, true);
      } else {
        out << viz::to_dot(m, viz::AbstractionLevel::parse(level));
      }
      return 0;
    }

    if (*lexicon_cmd && *stats_cmd) {
      fad::FadStore st = paths.load();
      std::vector<std::vector<std::string>> rows{{"category", "terms", "usage", "user_defined"}};
      for (auto c : {fad::TermCategory::GeometryType, fad::TermCategory::Action, fad::TermCategory::FunctionVerb,
                     fad::TermCategory::Flow}) {
        auto entries = st.lexicon().entries(c);
        std::uint64_t usage = 0, user = 0;
        for (const auto& t : entries) {
          usage += t.usage_count;
          user += t.user_defined ? 1 : 0;
        }
        rows.push_back({std::string(fad::to_string(c)), std::to_string(entries.size()), std::to_string(usage),
                        std::to_string(user)});
      }
      detail::emit(out, as_csv, rows);
      return 0;
    }

    if (*serve_cmd) {
      service::ServiceConfig cfg = config_file.empty() ? service::ServiceConfig{} : service::ServiceConfig::load(config_file);
      cfg.apply_env();
      if (cfg.snapshot_path.empty()) cfg.snapshot_path = paths.store;
      if (cfg.lexicon_path.empty()) cfg.lexicon_path = paths.lexicon_path();
      service::Service svc(cfg);
      detail::stop_requested() = false;
      std::signal(SIGINT, detail::on_signal);
      std::signal(SIGTERM, detail::on_signal);
      int port = svc.start();
      out << "listening on " << cfg.host << ":" << port << std::endl;
      while (!detail::stop_requested()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      svc.stop();
      out << "stopped; store saved" << std::endl;
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.render() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace patgraph::cli
