#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cmh/baselines.hpp"
#include "cmh/detectors.hpp"
#include "cmh/edge_list.hpp"
#include "cmh/experiment.hpp"
#include "cmh/hider.hpp"
#include "cmh/io.hpp"
#include "cmh/preset.hpp"
#include "cmh/scoring.hpp"

namespace cmh::cli {

enum ExitCode : int { kOk = 0, kMethodFailure = 1, kUsage = 2 };

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("CMH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CMH_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

inline Graph load_graph(const std::string& path, bool verbose, std::ostream& err) {
  auto loaded = load_edge_list_file(path);
  if (loaded.dropped_self_loops || loaded.duplicate_edges || verbose) {
    err << "loaded " << path << ": n=" << loaded.graph.node_count()
        << " m=" << loaded.graph.edge_count() << " dropped_self_loops=" << loaded.dropped_self_loops
        << " duplicate_edges=" << loaded.duplicate_edges << '\n';
  }
  return std::move(loaded.graph);
}

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::vector<double> parse_weights(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid weight '" + item + "'");
    }
  }
  if (out.size() != kPropertyCount) throw ConfigError("expected four comma-separated weights");
  return out;
}

struct Options {
  std::string graph;
  std::uint64_t seed = 0;
  bool verbose = false;

  std::string algo = "greedy";
  double resolution = 1.0;
  std::string out;

  std::string target;
  std::string method = "gradient";
  double tau = 0.5;
  std::optional<std::size_t> beta;
  std::string preset;
  std::string config;
  std::optional<double> lambda, eta;
  std::optional<std::size_t> iterations;
  bool exhaust_budget = false;
  bool strict = false;

  std::string spec;
  std::size_t jobs = 0;

  double damping = 0.85;
  double tol = 1e-10;
  std::string partition;
  std::string weights = "0.25,0.25,0.25,0.25";
};

inline int run_detect(const Options& o, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(o.graph, o.verbose, err);
  DetectorSpec spec{parse_detector_kind(o.algo), o.seed, o.resolution};
  const Partition part = detect(spec, g);
  const auto j = partition_to_json(g, part, spec).dump(2);
  if (o.out.empty()) {
    out << j << '\n';
  } else {
    std::ofstream file(o.out);
    if (!file) throw ConfigError("cannot write '" + o.out + "'");
    file << j << '\n';
  }
  if (o.verbose) {
    err << "communities=" << part.size() << " modularity=" << format_number(modularity(g, part))
        << '\n';
  }
  return kOk;
}

inline int run_hide(const Options& o, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(o.graph, o.verbose, err);
  const NodeId u = g.id_of(o.target);
  DetectorSpec f{parse_detector_kind(o.algo), o.seed, o.resolution};

  HidingConfig cfg;
  bool low_degree = false;
  if (!o.preset.empty() || !o.config.empty()) {
    const Preset p = load_preset(o.config.empty() ? o.preset : o.config);
    cfg = apply_preset(cfg, p);
    low_degree = p.low_degree;
  }
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.eta) cfg.eta = *o.eta;
  if (o.iterations) cfg.max_iterations = *o.iterations;
  cfg.tau = o.tau;
  cfg.beta = o.beta ? *o.beta : budget_for(g, {BudgetMode::mu, 0}, low_degree);
  cfg.seed = o.seed;
  cfg.exhaust_budget = o.exhaust_budget || o.method == "gradient-p";
  cfg.validate();

  HidingOutcome outcome;
  const std::string method = o.method;
  if (method == "gradient" || method == "gradient-p") {
    outcome = hide(g, u, f, cfg);
  } else {
    BaselineSpec b{parse_baseline_kind(method), o.seed};
    const Partition original = detect(f, g);
    if (community_of(original, u).size() < 2) {
      throw TrivialTargetError("target '" + o.target + "' is alone in its community");
    }
    outcome = run_baseline(b, g, u, f, original, cfg.tau, cfg.beta);
  }
  out << outcome_to_json(g, outcome).dump(2) << '\n';
  if (o.verbose) {
    err << "method=" << method << " tau=" << format_number(cfg.tau) << " beta=" << cfg.beta
        << " success=" << (outcome.success ? "yes" : "no") << " used=" << outcome.used_budget
        << " similarity=" << format_number(outcome.similarity) << '\n';
  }
  return (o.strict && !outcome.success) ? kMethodFailure : kOk;
}

inline int run_benchmark(const Options& o, std::ostream& out, std::ostream& err) {
  const auto loaded = load_experiment(o.spec);
  const Graph g = load_graph(loaded.graph_path, o.verbose, err);
  const std::size_t jobs =
      o.jobs > 0 ? o.jobs : std::max<unsigned>(1, std::thread::hardware_concurrency());
  const auto report = run_experiment(g, loaded.spec, jobs);
  std::filesystem::create_directories(o.out);
  {
    std::ofstream file(std::filesystem::path(o.out) / "report.json");
    if (!file) throw ConfigError("cannot write report.json under '" + o.out + "'");
    file << report_to_json(g, report).dump(2) << '\n';
  }
  {
    std::ofstream file(std::filesystem::path(o.out) / "summary.csv");
    if (!file) throw ConfigError("cannot write summary.csv under '" + o.out + "'");
    write_summary_csv(report, file);
  }
  out << "wrote " << report.cells.size() << " cells (" << report.records.size()
      << " hiding runs) to " << o.out << '\n';
  if (o.verbose) write_summary_csv(report, err);
  return kOk;
}

inline int run_analyze_pagerank(const Options& o, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(o.graph, o.verbose, err);
  const auto pr = pagerank(g, o.damping, o.tol);
  out << "node,value\n";
  for (NodeId v = 0; v < g.node_count(); ++v) out << g.label(v) << ',' << format_number(pr[v]) << '\n';
  return kOk;
}

inline int run_analyze_scores(const Options& o, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(o.graph, o.verbose, err);
  const Partition part = partition_from_json(g, read_json_file(o.partition));
  const auto w = parse_weights(o.weights);
  const ScoreWeights a{w[0], w[1], w[2], w[3]};
  const auto s = aggregate_scores(structural_scores(g, part), a);
  out << "node,value\n";
  for (NodeId v = 0; v < g.node_count(); ++v) out << g.label(v) << ',' << format_number(s[v]) << '\n';
  return kOk;
}

/// Exit codes: 0 success, 1 unsuccessful hide under --strict, 2 usage/config error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    o.seed = default_seed();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App app{"Community membership hiding by minimal graph rewiring"};
  app.require_subcommand(1);

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed (default: $CMH_SEED or 0)");
    sub->add_flag("--verbose,-v", o.verbose, "Human-readable summary on stderr");
  };

  auto* detect_cmd = app.add_subcommand("detect", "Detect communities and write partition JSON");
  detect_cmd->add_option("--graph", o.graph, "Edge-list file")->required();
  detect_cmd->add_option("--algo", o.algo, "greedy | louvain | labelprop");
  detect_cmd->add_option("--resolution", o.resolution, "Louvain resolution");
  detect_cmd->add_option("--out", o.out, "Output file (default stdout)");
  add_seed(detect_cmd);

  auto* hide_cmd = app.add_subcommand("hide", "Hide one node from its community");
  hide_cmd->add_option("--graph", o.graph, "Edge-list file")->required();
  hide_cmd->add_option("--target", o.target, "Target node label")->required();
  hide_cmd->add_option("--algo", o.algo, "Detector: greedy | louvain | labelprop");
  hide_cmd->add_option("--method", o.method,
                       "gradient | gradient-p | dice | roam | random | degree | centrality");
  hide_cmd->add_option("--tau", o.tau, "Similarity threshold in [0,1)");
  hide_cmd->add_option("--beta", o.beta, "Edge budget (default: average-degree budget)");
  hide_cmd->add_option("--preset", o.preset, "Built-in preset name");
  hide_cmd->add_option("--config", o.config, "Preset JSON file");
  hide_cmd->add_option("--lambda", o.lambda, "Override distance weight");
  hide_cmd->add_option("--eta", o.eta, "Override learning rate");
  hide_cmd->add_option("--iterations", o.iterations, "Override iteration limit");
  hide_cmd->add_flag("--exhaust-budget", o.exhaust_budget, "Project onto exactly beta changes");
  hide_cmd->add_flag("--strict", o.strict, "Exit 1 when hiding fails");
  add_seed(hide_cmd);

  auto* bench_cmd = app.add_subcommand("benchmark", "Run an experiment sweep");
  bench_cmd->add_option("--spec", o.spec, "Benchmark spec JSON")->required();
  bench_cmd->add_option("--out", o.out, "Output directory")->required();
  bench_cmd->add_option("--jobs", o.jobs, "Worker threads (default: all cores)");
  bench_cmd->add_flag("--verbose,-v", o.verbose, "Print the summary on stderr");

  auto* analyze_cmd = app.add_subcommand("analyze", "Node-level analyses as CSV");
  analyze_cmd->require_subcommand(1);
  auto* pr_cmd = analyze_cmd->add_subcommand("pagerank", "PageRank per node");
  pr_cmd->add_option("--graph", o.graph, "Edge-list file")->required();
  pr_cmd->add_option("--damping", o.damping, "Damping factor");
  pr_cmd->add_option("--tol", o.tol, "L1 convergence tolerance");
  pr_cmd->add_flag("--verbose,-v", o.verbose, "Loader summary on stderr");
  auto* scores_cmd = analyze_cmd->add_subcommand("scores", "Aggregated structural scores");
  scores_cmd->add_option("--graph", o.graph, "Edge-list file")->required();
  scores_cmd->add_option("--partition", o.partition, "Partition JSON")->required();
  scores_cmd->add_option("--weights", o.weights,
                         "a1,a2,a3,a4 for betweenness, degree, intra, inter");
  scores_cmd->add_flag("--verbose,-v", o.verbose, "Loader summary on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kUsage;
  }

  try {
    if (*detect_cmd) return run_detect(o, out, err);
    if (*hide_cmd) return run_hide(o, out, err);
    if (*bench_cmd) return run_benchmark(o, out, err);
    if (*pr_cmd) return run_analyze_pagerank(o, out, err);
    if (*scores_cmd) return run_analyze_scores(o, out, err);
  } catch (const TrivialTargetError& e) {
    err << "error: " << e.what() << '\n';
    return kMethodFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  err << app.help();
  return kUsage;
}

}  // namespace cmh::cli
