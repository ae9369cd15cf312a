// gridgen: synthetic spatially embedded power-grid networks.
// Subcommands: ingest, fit, generate, report, compare.
// Exit codes: 0 ok, 2 input error, 3 numeric failure, 4 graph-state error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridgen/gridgen.hpp"

namespace {

using nlohmann::json;

// Values from a --config JSON file; command-line flags override them.
json load_config(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
  }
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw gridgen::input_error("cannot open config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw gridgen::input_error("config file '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw gridgen::input_error("config file must hold a JSON object");
  return cfg;
}

template <typename T>
void merge(const CLI::Option* opt, const T& flag_value, const json& cfg, const char* key,
           T& target) {
  if (opt && opt->count() > 0) {
    target = flag_value;
  } else if (cfg.contains(key)) {
    try {
      target = cfg.at(key).get<T>();
    } catch (const std::exception&) {
      throw gridgen::input_error(std::string("config key '") + key + "' has the wrong type");
    }
  }
}

gridgen::AplMode parse_apl(const std::string& text, int n, std::uint64_t seed) {
  gridgen::AplMode mode;
  mode.seed = seed;
  if (text == "exact") return mode;
  if (text == "auto") {
    if (n > 20000) mode.sample_sources = 2000;
    return mode;
  }
  if (text.rfind("sampled", 0) == 0) {
    int k = 2000;
    const std::size_t colon = text.find(':');
    if (colon != std::string::npos)
      k = static_cast<int>(gridgen::detail::parse_int(text.substr(colon + 1), "--apl sample count"));
    if (k < 1) throw gridgen::input_error("--apl sample count must be >= 1");
    mode.sample_sources = k;
    return mode;
  }
  throw gridgen::input_error("--apl expects exact, sampled:<k> or auto");
}

struct IngestFlags {
  std::string lines, region, out, config;
  double snap_tolerance = 0.01;
  bool keep_largest = false;
  CLI::Option *o_lines = nullptr, *o_region = nullptr, *o_snap = nullptr;
};

gridgen::SpatialGraph ingest_graph(const std::string& lines_path, const std::string& region_path,
                                   double snap_tolerance) {
  const auto lines = gridgen::read_lines_csv(lines_path);
  const gridgen::GeoPoint center = gridgen::endpoint_centroid(lines);
  gridgen::SpatialGraph g = gridgen::build_graph(lines, snap_tolerance, center);
  if (!region_path.empty()) g = gridgen::clip_region(g, gridgen::read_region_file(region_path));
  return g;
}

int cmd_ingest(const IngestFlags& f, const json& cfg) {
  IngestFlags r = f;
  merge(f.o_lines, f.lines, cfg, "lines", r.lines);
  merge(f.o_region, f.region, cfg, "region", r.region);
  merge(f.o_snap, f.snap_tolerance, cfg, "snap_tolerance", r.snap_tolerance);
  if (r.lines.empty()) throw gridgen::input_error("--lines is required");
  if (r.out.empty()) throw gridgen::input_error("--out is required");
  gridgen::SpatialGraph g = ingest_graph(r.lines, r.region, r.snap_tolerance);
  if (r.keep_largest) g = gridgen::largest_component(g);
  gridgen::write_graph_csv(g, r.out);
  std::cout << "ingested nodes=" << g.node_count() << " edges=" << g.edge_count()
            << " out=" << r.out << ".{nodes,edges}.csv\n";
  return 0;
}

struct FitFlags {
  std::string lines, region, out, config;
  double snap_tolerance = 0.01;
  int c_min = 1, c_max = 0;  // 0 = auto
  std::uint64_t seed = 1;
  CLI::Option *o_lines = nullptr, *o_region = nullptr, *o_snap = nullptr, *o_cmin = nullptr,
              *o_cmax = nullptr, *o_seed = nullptr;
};

int cmd_fit(const FitFlags& f, const json& cfg) {
  FitFlags r = f;
  merge(f.o_lines, f.lines, cfg, "lines", r.lines);
  merge(f.o_region, f.region, cfg, "region", r.region);
  merge(f.o_snap, f.snap_tolerance, cfg, "snap_tolerance", r.snap_tolerance);
  merge(f.o_cmin, f.c_min, cfg, "c_min", r.c_min);
  merge(f.o_cmax, f.c_max, cfg, "c_max", r.c_max);
  merge(f.o_seed, f.seed, cfg, "seed", r.seed);
  if (r.lines.empty()) throw gridgen::input_error("--lines is required");
  if (r.out.empty()) throw gridgen::input_error("--out is required");

  const gridgen::SpatialGraph g = ingest_graph(r.lines, r.region, r.snap_tolerance);
  const int n = g.node_count();
  if (n < 1) throw gridgen::input_error("no nodes inside the fitting region");
  std::vector<gridgen::PlanarPoint> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = g.nodes[i].pos;

  int c_max = r.c_max;
  if (c_max <= 0) c_max = std::max(1, std::min(80, n / 20));
  c_max = std::min(c_max, n);
  const int c_min = std::min(r.c_min, c_max);

  std::vector<gridgen::CandidateScore> scores;
  gridgen::GmmModel model = gridgen::select_model(pts, c_min, c_max, r.seed, {}, &scores);
  model.projection_center = g.projection_center;

  std::cout << "c\tloglik\tbic\n";
  for (const auto& s : scores)
    std::cout << s.c << '\t' << s.loglik << '\t' << s.bic << '\n';
  std::cout << "selected c=" << model.component_count() << " bic=" << model.bic
            << " n_fit=" << model.n_fit << " seed=" << r.seed << '\n';
  gridgen::write_model_json(model, r.out);
  return 0;
}

struct GenerateFlags {
  std::string model, preset, mode = "auto", out, config;
  double kappa = 0, alpha = 0, beta = 0, gamma = 0, eta = 0;
  int nn = 0, n = 0, m = 0;
  std::uint64_t seed = 1;
  CLI::Option *o_preset = nullptr, *o_mode = nullptr, *o_kappa = nullptr, *o_alpha = nullptr,
              *o_beta = nullptr, *o_gamma = nullptr, *o_eta = nullptr, *o_nn = nullptr,
              *o_n = nullptr, *o_m = nullptr, *o_seed = nullptr;
};

int cmd_generate(const GenerateFlags& f, const json& cfg) {
  std::string model_path = f.model;
  if (model_path.empty() && cfg.contains("model")) model_path = cfg.at("model").get<std::string>();
  if (model_path.empty()) throw gridgen::input_error("--model is required");
  if (f.out.empty()) throw gridgen::input_error("--out is required");

  std::string preset = f.preset;
  if ((!f.o_preset || f.o_preset->count() == 0) && cfg.contains("preset"))
    preset = cfg.at("preset").get<std::string>();

  gridgen::GenParams p;  // defaults
  if (!preset.empty()) p = gridgen::preset_params(preset);
  merge(f.o_kappa, f.kappa, cfg, "kappa", p.kappa);
  merge(f.o_alpha, f.alpha, cfg, "alpha", p.alpha);
  merge(f.o_beta, f.beta, cfg, "beta", p.beta);
  merge(f.o_gamma, f.gamma, cfg, "gamma", p.gamma);
  merge(f.o_eta, f.eta, cfg, "eta", p.eta);
  merge(f.o_nn, f.nn, cfg, "nn", p.nn);
  merge(f.o_n, f.n, cfg, "n", p.n_target);
  merge(f.o_m, f.m, cfg, "m", p.m_target);
  merge(f.o_seed, f.seed, cfg, "seed", p.seed);

  std::string mode = f.mode;
  if ((!f.o_mode || f.o_mode->count() == 0) && cfg.contains("mode"))
    mode = cfg.at("mode").get<std::string>();
  if (preset.empty() || (f.o_mode && f.o_mode->count() > 0) || cfg.contains("mode")) {
    if (mode == "large")
      p.mode = gridgen::NetworkMode::large;
    else if (mode == "small")
      p.mode = gridgen::NetworkMode::small;
    else if (mode == "auto")
      p.mode = gridgen::default_mode(p.n_target);
    else
      throw gridgen::input_error("--mode expects large, small or auto");
  }

  gridgen::validate(p);
  const gridgen::GmmModel model = gridgen::read_model_json(model_path);

  json echo;
  echo["command"] = "generate";
  echo["model"] = model_path;
  echo["out"] = f.out;
  echo["params"] = {{"kappa", p.kappa}, {"alpha", p.alpha},   {"beta", p.beta},
                    {"gamma", p.gamma}, {"eta", p.eta},       {"nn", p.nn},
                    {"n", p.n_target},  {"m", p.m_target},
                    {"mode", p.mode == gridgen::NetworkMode::large ? "large" : "small"},
                    {"seed", p.seed}};
  echo["stage_seeds"] = {{"sample", gridgen::stage_seed(p.seed, 0)},
                         {"order", gridgen::stage_seed(p.seed, 1)},
                         {"reinforce", gridgen::stage_seed(p.seed, 2)}};
  std::cout << echo.dump() << '\n';

  const gridgen::SpatialGraph g = gridgen::gnlg(model, p);
  gridgen::write_graph_csv(g, f.out);
  std::cout << "generated nodes=" << g.node_count() << " edges=" << g.edge_count()
            << " out=" << f.out << ".{nodes,edges}.csv\n";
  return 0;
}

struct ReportFlags {
  std::string graph, reference, apl = "auto", out, config;
  int min_degree = 2, k_kl = 10;
  std::uint64_t seed = 1;
  CLI::Option *o_mindeg = nullptr, *o_kkl = nullptr, *o_apl = nullptr, *o_seed = nullptr;
};

gridgen::ReportOptions make_report_options(const ReportFlags& f, const json& cfg, int n) {
  ReportFlags r = f;
  merge(f.o_mindeg, f.min_degree, cfg, "min_degree", r.min_degree);
  merge(f.o_kkl, f.k_kl, cfg, "k_kl", r.k_kl);
  merge(f.o_apl, f.apl, cfg, "apl", r.apl);
  merge(f.o_seed, f.seed, cfg, "seed", r.seed);
  gridgen::ReportOptions opts;
  opts.min_degree = r.min_degree;
  opts.k_kl = r.k_kl;
  opts.apl = parse_apl(r.apl, n, r.seed);
  return opts;
}

void print_report_summary(const gridgen::MetricsReport& rep) {
  std::cout << "n=" << rep.n << " m=" << rep.m << " L=" << rep.avg_path_length
            << " C=" << rep.clustering;
  if (rep.zeta) std::cout << " zeta=" << *rep.zeta;
  if (rep.d_ks) std::cout << " d_ks=" << *rep.d_ks;
  if (rep.d_kl) std::cout << " d_kl=" << *rep.d_kl;
  std::cout << '\n';
}

int cmd_report(const ReportFlags& f, const json& cfg) {
  if (f.graph.empty()) throw gridgen::input_error("--graph is required");
  if (f.out.empty()) throw gridgen::input_error("--out is required");
  const gridgen::SpatialGraph g = gridgen::read_graph_csv(f.graph);
  std::optional<gridgen::SpatialGraph> ref;
  if (!f.reference.empty()) ref = gridgen::read_graph_csv(f.reference);
  const gridgen::ReportOptions opts = make_report_options(f, cfg, g.node_count());
  const gridgen::MetricsReport rep =
      gridgen::structural_report(g, ref ? &*ref : nullptr, opts);
  gridgen::write_report_json(rep, opts,
                             f.reference.empty() ? std::nullopt
                                                 : std::optional<std::string>(f.reference),
                             f.out);
  print_report_summary(rep);
  return 0;
}

int cmd_compare(const ReportFlags& f, const json& cfg) {
  if (f.graph.empty()) throw gridgen::input_error("--graph is required");
  if (f.reference.empty()) throw gridgen::input_error("--reference is required");
  if (f.out.empty()) throw gridgen::input_error("--out is required");
  const gridgen::SpatialGraph g = gridgen::read_graph_csv(f.graph);
  const gridgen::SpatialGraph ref = gridgen::read_graph_csv(f.reference);
  const gridgen::ReportOptions opts = make_report_options(f, cfg, std::max(g.node_count(), ref.node_count()));
  const gridgen::MetricsReport rep_g = gridgen::structural_report(g, &ref, opts);
  const gridgen::MetricsReport rep_ref = gridgen::structural_report(ref, nullptr, opts);
  json j;
  j["d_ks"] = rep_g.d_ks ? json(*rep_g.d_ks) : json(nullptr);
  j["d_kl"] = rep_g.d_kl ? json(*rep_g.d_kl) : json(nullptr);
  j["candidate"] = gridgen::report_to_json(rep_g, opts, f.reference);
  j["reference"] = gridgen::report_to_json(rep_ref, opts, std::nullopt);
  std::ofstream out(f.out, std::ios::binary);
  if (!out) throw gridgen::input_error("cannot open '" + f.out + "' for writing");
  out << j.dump(2) << '\n';
  print_report_summary(rep_g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic spatially embedded power-grid network generator"};
  app.require_subcommand(1);

  IngestFlags ing;
  GenerateFlags gen;
  FitFlags fit;
  ReportFlags rep, cmp;

  CLI::App* s_ingest = app.add_subcommand("ingest", "build graph CSVs from a lines file");
  ing.o_lines = s_ingest->add_option("--lines", ing.lines, "lines CSV (id,voltage_class,wkt)");
  ing.o_region = s_ingest->add_option("--region", ing.region, "region polygon file");
  ing.o_snap = s_ingest->add_option("--snap-tolerance", ing.snap_tolerance,
                                    "endpoint snap tolerance in km");
  s_ingest->add_flag("--largest-component", ing.keep_largest, "keep only the largest component");
  s_ingest->add_option("--out", ing.out, "output prefix for .nodes.csv/.edges.csv");
  s_ingest->add_option("--config", ing.config, "JSON config file; flags override it");

  CLI::App* s_fit = app.add_subcommand("fit", "fit a mixture model to substation positions");
  fit.o_lines = s_fit->add_option("--lines", fit.lines, "lines CSV (id,voltage_class,wkt)");
  fit.o_region = s_fit->add_option("--region", fit.region, "region polygon file");
  fit.o_snap = s_fit->add_option("--snap-tolerance", fit.snap_tolerance,
                                 "endpoint snap tolerance in km");
  fit.o_cmin = s_fit->add_option("--c-min", fit.c_min, "smallest component count");
  fit.o_cmax = s_fit->add_option("--c-max", fit.c_max, "largest component count (0 = auto)");
  fit.o_seed = s_fit->add_option("--seed", fit.seed, "EM seed");
  s_fit->add_option("--out", fit.out, "output model JSON path");
  s_fit->add_option("--config", fit.config, "JSON config file; flags override it");

  CLI::App* s_gen = app.add_subcommand("generate", "generate a synthetic grid from a model");
  s_gen->add_option("--model", gen.model, "model JSON path");
  gen.o_preset = s_gen->add_option("--preset", gen.preset, "parameter preset: wi, serc or frcc");
  gen.o_kappa = s_gen->add_option("--kappa", gen.kappa, "ordering exponent");
  gen.o_alpha = s_gen->add_option("--alpha", gen.alpha, "source density exponent");
  gen.o_beta = s_gen->add_option("--beta", gen.beta, "target distance penalty");
  gen.o_gamma = s_gen->add_option("--gamma", gen.gamma, "target degree attraction");
  gen.o_eta = s_gen->add_option("--eta", gen.eta, "source degree penalty (small mode)");
  gen.o_nn = s_gen->add_option("--nn", gen.nn, "rho neighbourhood size N");
  gen.o_mode = s_gen->add_option("--mode", gen.mode, "large, small or auto");
  gen.o_n = s_gen->add_option("--n", gen.n, "target node count");
  gen.o_m = s_gen->add_option("--m", gen.m, "target edge count");
  gen.o_seed = s_gen->add_option("--seed", gen.seed, "generation seed");
  s_gen->add_option("--out", gen.out, "output prefix for .nodes.csv/.edges.csv");
  s_gen->add_option("--config", gen.config, "JSON config file; flags override it");

  const auto add_report_flags = [](CLI::App* s, ReportFlags& r, bool reference_required) {
    s->add_option("--graph", r.graph, "graph prefix (reads <prefix>.nodes.csv/.edges.csv)");
    s->add_option("--reference", r.reference,
                  reference_required ? "reference graph prefix" : "optional reference graph prefix");
    r.o_mindeg = s->add_option("--min-degree", r.min_degree, "tail cutoff for zeta");
    r.o_kkl = s->add_option("--k-kl", r.k_kl, "k for the KL estimator");
    r.o_apl = s->add_option("--apl", r.apl, "exact, sampled:<k> or auto");
    r.o_seed = s->add_option("--seed", r.seed, "seed for sampled path length");
    s->add_option("--out", r.out, "output report JSON path");
    s->add_option("--config", r.config, "JSON config file; flags override it");
  };
  CLI::App* s_rep = app.add_subcommand("report", "structural metrics of a graph");
  add_report_flags(s_rep, rep, false);
  CLI::App* s_cmp = app.add_subcommand("compare", "similarity of two graphs");
  add_report_flags(s_cmp, cmp, true);

  try {
    app.parse(argc, argv);
    const json cfg = load_config(argc, argv);
    if (s_ingest->parsed()) return cmd_ingest(ing, cfg);
    if (s_fit->parsed()) return cmd_fit(fit, cfg);
    if (s_gen->parsed()) return cmd_generate(gen, cfg);
    if (s_rep->parsed()) return cmd_report(rep, cfg);
    if (s_cmp->parsed()) return cmd_compare(cmp, cfg);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const gridgen::graph_state_error& e) {
    std::cerr << "error: " << e.what()
              << " (pass --largest-component at ingest time, or use --apl sampled:<k>)\n";
    return 4;
  } catch (const gridgen::numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const gridgen::input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
