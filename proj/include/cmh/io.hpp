#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmh/detectors.hpp"
#include "cmh/error.hpp"
#include "cmh/experiment.hpp"
#include "cmh/graph.hpp"
#include "cmh/outcome.hpp"
#include "cmh/partition.hpp"
#include "cmh/preset.hpp"

namespace cmh {

using json = nlohmann::ordered_json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

inline json partition_to_json(const Graph& g, const Partition& part, const DetectorSpec& spec) {
  json communities = json::array();
  for (const auto& c : part.communities()) {
    json members = json::array();
    for (NodeId v : c) members.push_back(g.label(v));
    communities.push_back(std::move(members));
  }
  return json{{"algo", to_string(spec.kind)}, {"seed", spec.seed}, {"communities", communities}};
}

inline Partition partition_from_json(const Graph& g, const json& j) {
  if (!j.contains("communities") || !j["communities"].is_array()) {
    throw ConfigError("partition JSON needs a 'communities' array");
  }
  std::vector<std::vector<NodeId>> groups;
  for (const auto& c : j["communities"]) {
    std::vector<NodeId> members;
    for (const auto& label : c) {
      members.push_back(g.id_of(label.is_string() ? label.get<std::string>() : label.dump()));
    }
    groups.push_back(std::move(members));
  }
  try {
    return Partition::from_communities(g.node_count(), groups);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("invalid partition: ") + e.what());
  }
}

/// Added and removed labels are relative to the delta owner, which is the
/// target for every method except ROAM.
inline json outcome_to_json(const Graph& g, const HidingOutcome& o) {
  json added = json::array();
  json removed = json::array();
  const NodeId owner = o.delta.owner();
  for (NodeId v : o.delta.toggled()) {
    (g.has_edge(owner, v) ? removed : added).push_back(g.label(v));
  }
  return json{{"success", o.success},
              {"target", g.label(o.target)},
              {"owner", g.label(owner)},
              {"added", added},
              {"removed", removed},
              {"used_budget", o.used_budget},
              {"iterations", o.iterations},
              {"restarts", o.restarts},
              {"wall_ms", o.wall_ms},
              {"similarity", o.similarity}};
}

namespace detail {

inline ScoreWeights weights_from_json(const json& j) {
  if (!j.is_array() || j.size() != kPropertyCount) {
    throw ConfigError("weights must be an array of four numbers");
  }
  ScoreWeights w{};
  for (std::size_t i = 0; i < kPropertyCount; ++i) w[i] = j[i].get<double>();
  return w;
}

}  // namespace detail

/// Built-in name, or a JSON file with eta, lambda, T and weights.
inline Preset load_preset(const std::string& name_or_path) {
  if (auto p = find_builtin_preset(name_or_path)) return *p;
  if (!std::filesystem::exists(name_or_path)) {
    throw ConfigError("unknown preset '" + name_or_path + "'");
  }
  const json j = read_json_file(name_or_path);
  try {
    Preset p;
    p.name = j.value("name", std::filesystem::path(name_or_path).stem().string());
    p.eta = j.at("eta").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.max_iterations = j.at("T").get<std::size_t>();
    p.raw_weights = detail::weights_from_json(j.at("weights"));
    p.weights = renormalise(p.raw_weights);
    p.low_degree = j.value("low_degree", false);
    p.q = j.value("q", 2.0);
    p.gamma = j.value("gamma", 0.9);
    p.t_plus = j.value("t_plus", 0.5);
    p.t_minus = j.value("t_minus", -0.5);
    return p;
  } catch (const json::exception& e) {
    throw ConfigError("invalid preset '" + name_or_path + "': " + e.what());
  }
}

/// Overrides from a "hyperparameters" object onto a config.
inline HidingConfig apply_overrides(HidingConfig cfg, const json& j) {
  try {
    if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("T")) cfg.max_iterations = j["T"].get<std::size_t>();
    if (j.contains("q")) cfg.q = j["q"].get<double>();
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("t_plus")) cfg.t_plus = j["t_plus"].get<double>();
    if (j.contains("t_minus")) cfg.t_minus = j["t_minus"].get<double>();
    if (j.contains("weights")) cfg.weights = renormalise(detail::weights_from_json(j["weights"]));
    if (j.contains("squared_loss")) {
      cfg.loss_form = j["squared_loss"].get<bool>() ? LossForm::squared : LossForm::norm;
    }
    if (j.contains("complement_actions")) {
      cfg.actions = j["complement_actions"].get<bool>() ? ActionForm::complement : ActionForm::scores;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid hyperparameters: ") + e.what());
  }
  return cfg;
}

inline DetectorSpec detector_from_json(const json& j) {
  DetectorSpec d;
  if (j.is_string()) {
    d.kind = parse_detector_kind(j.get<std::string>());
    return d;
  }
  d.kind = parse_detector_kind(j.at("algo").get<std::string>());
  d.seed = j.value("seed", std::uint64_t{0});
  d.resolution = j.value("resolution", 1.0);
  d.max_sweeps = j.value("max_sweeps", std::size_t{100});
  return d;
}

struct LoadedExperiment {
  std::string graph_path;
  ExperimentSpec spec;
};

/// Parses a benchmark spec. Relative graph paths resolve against the spec's directory.
inline LoadedExperiment load_experiment(const std::string& path) {
  const json j = read_json_file(path);
  LoadedExperiment out;
  try {
    std::filesystem::path graph = j.at("graph").get<std::string>();
    if (graph.is_relative()) graph = std::filesystem::path(path).parent_path() / graph;
    out.graph_path = graph.string();

    ExperimentSpec& s = out.spec;
    if (j.contains("optimiser")) s.optimiser = detector_from_json(j["optimiser"]);
    if (j.contains("evaluator") && !j["evaluator"].is_null()) s.evaluator = detector_from_json(j["evaluator"]);
    if (j.contains("methods")) {
      s.methods.clear();
      for (const auto& m : j["methods"]) s.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("taus")) s.taus = j["taus"].get<std::vector<double>>();
    if (j.contains("budgets")) {
      s.budgets.clear();
      for (const auto& b : j["budgets"]) {
        s.budgets.push_back(b.is_number() ? parse_budget(std::to_string(b.get<long long>()))
                                          : parse_budget(b.get<std::string>()));
      }
    }
    if (j.contains("preset")) {
      const Preset p = load_preset(j["preset"].get<std::string>());
      s.hiding = apply_preset(s.hiding, p);
      s.low_degree = p.low_degree;
    }
    if (j.contains("hyperparameters")) s.hiding = apply_overrides(s.hiding, j["hyperparameters"]);
    s.low_degree = j.value("low_degree", s.low_degree);
    if (j.contains("fractions")) s.fractions = j["fractions"].get<std::vector<double>>();
    s.max_targets = j.value("max_targets", s.max_targets);
    s.runs = j.value("runs", s.runs);
    s.seed = j.value("seed", s.seed);
    if (j.contains("nmi")) s.nmi_normalisation = parse_nmi_normalisation(j["nmi"].get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError("invalid benchmark spec '" + path + "': " + e.what());
  }
  out.spec.validate();
  return out;
}

namespace detail {

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline std::string csv_number(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace detail

inline json report_to_json(const Graph& g, const ExperimentReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back(json{{"method", to_string(c.method)},
                         {"tau", c.tau},
                         {"budget", c.budget_label},
                         {"beta", c.beta},
                         {"sr_mean", detail::number_or_null(c.sr.mean)},
                         {"sr_std", detail::number_or_null(c.sr.std)},
                         {"nmi_mean", detail::number_or_null(c.nmi.mean)},
                         {"nmi_std", detail::number_or_null(c.nmi.std)},
                         {"f1_mean", detail::number_or_null(c.f1.mean)},
                         {"f1_std", detail::number_or_null(c.f1.std)},
                         {"used_budget_mean", detail::number_or_null(c.used_budget_mean)},
                         {"used_budget_success_mean", detail::number_or_null(c.used_budget_success_mean)},
                         {"pagerank_mean", detail::number_or_null(c.pagerank_mean)},
                         {"wall_ms_mean", detail::number_or_null(c.wall_ms_mean)},
                         {"targets", c.targets},
                         {"failures", c.failures}});
  }
  json records = json::array();
  for (const auto& rec : r.records) {
    json touched = json::array();
    for (NodeId v : rec.delta.toggled()) touched.push_back(g.label(v));
    json pr = json::array();
    for (double x : rec.touched_pagerank) pr.push_back(x);
    records.push_back(json{{"run", rec.run},
                           {"method", to_string(rec.method)},
                           {"tau", rec.tau},
                           {"budget", rec.budget_label},
                           {"beta", rec.beta},
                           {"target", g.label(rec.target)},
                           {"ok", rec.ok},
                           {"error", rec.error},
                           {"success", rec.success},
                           {"similarity", rec.similarity},
                           {"used_budget", rec.used_budget},
                           {"iterations", rec.iterations},
                           {"restarts", rec.restarts},
                           {"nmi", rec.nmi},
                           {"owner", g.label(rec.delta.owner())},
                           {"toggled", touched},
                           {"touched_pagerank", pr},
                           {"wall_ms", rec.wall_ms}});
  }
  return json{{"cells", cells}, {"records", records}};
}

inline constexpr const char* kSummaryHeader =
    "method,tau,beta,sr_mean,sr_std,nmi_mean,nmi_std,f1_mean,f1_std,used_budget_mean,"
    "pagerank_mean,wall_ms_mean";

inline void write_summary_csv(const ExperimentReport& r, std::ostream& out) {
  using detail::csv_number;
  out << kSummaryHeader << '\n';
  for (const auto& c : r.cells) {
    out << to_string(c.method) << ',' << csv_number(c.tau) << ',' << c.beta << ','
        << csv_number(c.sr.mean) << ',' << csv_number(c.sr.std) << ',' << csv_number(c.nmi.mean)
        << ',' << csv_number(c.nmi.std) << ',' << csv_number(c.f1.mean) << ','
        << csv_number(c.f1.std) << ',' << csv_number(c.used_budget_mean) << ','
        << csv_number(c.pagerank_mean) << ',' << csv_number(c.wall_ms_mean) << '\n';
  }
}

}  // namespace cmh
