#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "cmh/baselines.hpp"
#include "cmh/detectors.hpp"
#include "cmh/error.hpp"
#include "cmh/graph.hpp"
#include "cmh/hider.hpp"
#include "cmh/metrics.hpp"
#include "cmh/outcome.hpp"
#include "cmh/partition.hpp"
#include "cmh/rng.hpp"
#include "cmh/scoring.hpp"

namespace cmh {

enum class Method { gradient, gradient_projected, dice, roam, random, degree, centrality };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::gradient: return "gradient";
    case Method::gradient_projected: return "gradient-p";
    case Method::dice: return "dice";
    case Method::roam: return "roam";
    case Method::random: return "random";
    case Method::degree: return "degree";
    case Method::centrality: return "centrality";
  }
  return "unknown";
}

inline Method parse_method(const std::string& name) {
  if (name == "gradient") return Method::gradient;
  if (name == "gradient-p" || name == "gradient_projected") return Method::gradient_projected;
  if (name == "dice") return Method::dice;
  if (name == "roam") return Method::roam;
  if (name == "random") return Method::random;
  if (name == "degree") return Method::degree;
  if (name == "centrality") return Method::centrality;
  throw ConfigError("unknown method '" + name +
                    "'; available: gradient, gradient-p, dice, roam, random, degree, centrality");
}

enum class BudgetMode { half_mu, mu, two_mu, fixed };

struct Budget {
  BudgetMode mode = BudgetMode::mu;
  std::size_t value = 0;  // only for fixed

  friend bool operator==(const Budget&, const Budget&) = default;
};

inline std::string to_string(const Budget& b) {
  switch (b.mode) {
    case BudgetMode::half_mu: return "half_mu";
    case BudgetMode::mu: return "mu";
    case BudgetMode::two_mu: return "two_mu";
    case BudgetMode::fixed: return std::to_string(b.value);
  }
  return "unknown";
}

inline Budget parse_budget(const std::string& s) {
  if (s == "half_mu" || s == "mu/2") return {BudgetMode::half_mu, 0};
  if (s == "mu") return {BudgetMode::mu, 0};
  if (s == "two_mu" || s == "2mu") return {BudgetMode::two_mu, 0};
  std::size_t pos = 0;
  long long v = -1;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v < 1) throw ConfigError("invalid budget '" + s + "'");
  return {BudgetMode::fixed, static_cast<std::size_t>(v)};
}

/// Average degree m/n, plus one for low-degree graphs.
inline double average_degree_budget(const Graph& g, bool low_degree) {
  return static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count()) +
         (low_degree ? 1.0 : 0.0);
}

/// max(1, floor(mu * factor)) with factor 1/2, 1 or 2.
inline std::size_t budget_for(const Graph& g, const Budget& b, bool low_degree) {
  if (b.mode == BudgetMode::fixed) return b.value;
  const double mu = average_degree_budget(g, low_degree);
  const double factor = b.mode == BudgetMode::half_mu ? 0.5 : b.mode == BudgetMode::mu ? 1.0 : 2.0;
  // Nudge so exact products such as 2 * 1.5 are not lost to rounding.
  const auto beta = static_cast<std::size_t>(std::floor(mu * factor + 1e-9));
  return std::max<std::size_t>(1, beta);
}

struct TargetGroup {
  double fraction = 0.0;
  std::uint32_t community = 0;
  std::vector<NodeId> targets;

  friend bool operator==(const TargetGroup&, const TargetGroup&) = default;
};

/// For each fraction, the community whose size is closest to fraction times
/// the largest size (lower index on ties), with up to max_targets members
/// sampled without replacement. Singleton communities are never chosen.
inline std::vector<TargetGroup> sample_targets(const Partition& part,
                                               const std::vector<double>& fractions,
                                               std::size_t max_targets, std::uint64_t seed) {
  std::size_t largest = 0;
  for (const auto& c : part.communities()) largest = std::max(largest, c.size());
  bool eligible = false;
  for (const auto& c : part.communities()) eligible = eligible || c.size() >= 2;
  if (!eligible) throw Error("no community with at least two members to sample targets from");

  std::vector<TargetGroup> out;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double f = fractions[fi];
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("community fractions must lie in (0,1]");
    const double want = f * static_cast<double>(largest);
    std::uint32_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::uint32_t c = 0; c < part.size(); ++c) {
      if (part.community(c).size() < 2) continue;
      const double gap = std::abs(static_cast<double>(part.community(c).size()) - want);
      if (gap < best_gap) {
        best_gap = gap;
        best = c;
      }
    }
    auto members = part.community(best);
    std::mt19937_64 rng(seed_sequence(seed, {0x534d504cULL, fi}));
    std::shuffle(members.begin(), members.end(), rng);
    members.resize(std::min(members.size(), max_targets));
    std::sort(members.begin(), members.end());
    out.push_back({f, best, std::move(members)});
  }
  return out;
}

struct ExperimentSpec {
  DetectorSpec optimiser;
  std::optional<DetectorSpec> evaluator;  // empty = symmetric
  std::vector<Method> methods = {Method::gradient};
  std::vector<double> taus = {0.5};
  std::vector<Budget> budgets = {{BudgetMode::mu, 0}};
  bool low_degree = false;
  std::vector<double> fractions = {0.3, 0.5, 0.8};
  std::size_t max_targets = 100;
  std::size_t runs = 3;
  std::uint64_t seed = 0;
  HidingConfig hiding;  // tau, beta, seed and exhaust_budget are set per cell
  NmiNormalisation nmi_normalisation = NmiNormalisation::arithmetic;

  void validate() const {
    if (runs < 1) throw ConfigError("runs must be at least 1");
    if (methods.empty()) throw ConfigError("no methods to run");
    if (taus.empty()) throw ConfigError("empty tau grid");
    if (budgets.empty()) throw ConfigError("empty budget grid");
    for (double f : fractions) {
      if (!(f > 0.0 && f <= 1.0)) throw ConfigError("community fractions must lie in (0,1]");
    }
    for (double t : taus) {
      if (!(t >= 0.0 && t < 1.0)) throw ConfigError("tau must lie in [0,1)");
    }
  }
};

/// One (run, method, tau, budget, target) evaluation.
struct CellRecord {
  std::size_t run = 0;
  Method method = Method::gradient;
  double tau = 0.0;
  std::size_t beta = 0;
  std::string budget_label;
  NodeId target = 0;
  bool ok = true;
  std::string error;
  bool success = false;
  double similarity = 1.0;
  std::size_t used_budget = 0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  double nmi = 0.0;
  std::vector<double> touched_pagerank;
  double wall_ms = 0.0;
  EdgeDelta delta;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return {std::nan(""), std::nan("")};
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

struct ReportCell {
  Method method = Method::gradient;
  double tau = 0.0;
  std::string budget_label;
  std::size_t beta = 0;
  MeanStd sr, nmi, f1;
  double used_budget_mean = 0.0;
  double used_budget_success_mean = 0.0;  // NaN when nothing succeeded
  double pagerank_mean = 0.0;             // NaN when nothing was touched
  double wall_ms_mean = 0.0;
  std::size_t targets = 0;
  std::size_t failures = 0;  // cells that raised an error
};

struct ExperimentReport {
  std::vector<ReportCell> cells;
  std::vector<CellRecord> records;
  std::vector<std::vector<TargetGroup>> targets_per_run;
};

namespace detail {

inline std::uint64_t run_seed(std::uint64_t seed, std::size_t run) {
  return seed_sequence(seed, {0x52554eULL, run});
}

struct RunContext {
  DetectorSpec f;
  DetectorSpec g;
  bool symmetric = true;
  HidingBase base;
  Partition evaluator_original;
  std::vector<NodeId> targets;
  std::vector<double> betweenness;
};

}  // namespace detail

/// Full symmetric/asymmetric sweep. Cells are evaluated on `jobs` threads and
/// reduced in cell-key order, so results do not depend on `jobs`.
inline ExperimentReport run_experiment(const Graph& graph, const ExperimentSpec& spec,
                                       std::size_t jobs = 1) {
  spec.validate();
  ExperimentReport report;
  const std::vector<double> pr = pagerank(graph);

  std::vector<detail::RunContext> runs;
  for (std::size_t r = 0; r < spec.runs; ++r) {
    detail::RunContext ctx;
    ctx.f = spec.optimiser;
    ctx.f.seed = detail::run_seed(spec.seed, r) ^ spec.optimiser.seed;
    ctx.symmetric = !spec.evaluator.has_value();
    ctx.g = ctx.symmetric ? ctx.f : *spec.evaluator;
    if (!ctx.symmetric) ctx.g.seed = detail::run_seed(spec.seed, r) ^ spec.evaluator->seed;
    ctx.base = make_hiding_base(graph, ctx.f);
    ctx.evaluator_original = ctx.symmetric ? ctx.base.original : detect(ctx.g, graph);
    ctx.betweenness = ctx.base.scores.raw[0];
    auto groups = sample_targets(ctx.base.original, spec.fractions, spec.max_targets,
                                 detail::run_seed(spec.seed, r));
    std::vector<std::uint32_t> seen;
    for (const auto& grp : groups) {
      if (std::find(seen.begin(), seen.end(), grp.community) != seen.end()) continue;
      seen.push_back(grp.community);
      ctx.targets.insert(ctx.targets.end(), grp.targets.begin(), grp.targets.end());
    }
    report.targets_per_run.push_back(std::move(groups));
    runs.push_back(std::move(ctx));
  }

  struct Key {
    std::size_t run, method, tau, budget;
    NodeId target;
  };
  std::vector<Key> keys;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      for (std::size_t ti = 0; ti < spec.taus.size(); ++ti) {
        for (std::size_t bi = 0; bi < spec.budgets.size(); ++bi) {
          for (NodeId u : runs[r].targets) keys.push_back({r, mi, ti, bi, u});
        }
      }
    }
  }

  report.records.resize(keys.size());
  auto evaluate = [&](std::size_t idx) {
    const Key& k = keys[idx];
    const auto& ctx = runs[k.run];
    CellRecord rec;
    rec.run = k.run;
    rec.method = spec.methods[k.method];
    rec.tau = spec.taus[k.tau];
    rec.beta = budget_for(graph, spec.budgets[k.budget], spec.low_degree);
    rec.budget_label = to_string(spec.budgets[k.budget]);
    rec.target = k.target;
    try {
      HidingOutcome out;
      const std::uint64_t cell_seed = seed_sequence(spec.seed, {0x43454c4cULL, k.run});
      switch (rec.method) {
        case Method::gradient:
        case Method::gradient_projected: {
          HidingConfig cfg = spec.hiding;
          cfg.tau = rec.tau;
          cfg.beta = rec.beta;
          cfg.seed = cell_seed;
          cfg.exhaust_budget = rec.method == Method::gradient_projected;
          out = hide(ctx.base, k.target, cfg);
          break;
        }
        default: {
          BaselineSpec b;
          b.kind = rec.method == Method::dice     ? BaselineKind::dice
                   : rec.method == Method::roam   ? BaselineKind::roam
                   : rec.method == Method::random ? BaselineKind::random
                   : rec.method == Method::degree ? BaselineKind::degree
                                                  : BaselineKind::centrality;
          b.seed = cell_seed;
          out = run_baseline(b, graph, k.target, ctx.f, ctx.base.original, rec.tau, rec.beta,
                             &ctx.betweenness);
        }
      }
      rec.used_budget = out.used_budget;
      rec.iterations = out.iterations;
      rec.restarts = out.restarts;
      rec.wall_ms = out.wall_ms;
      rec.delta = out.delta;
      for (NodeId v : out.delta.toggled()) rec.touched_pagerank.push_back(pr[v]);
      if (ctx.symmetric) {
        rec.success = out.success;
        rec.similarity = out.similarity;
        rec.nmi = nmi(out.final_partition, ctx.base.original, spec.nmi_normalisation);
      } else {
        const auto peers = without(community_of(ctx.evaluator_original, k.target), k.target);
        auto verdict = assess(graph, k.target, ctx.g, peers, out.delta, rec.tau, rec.beta);
        rec.success = verdict.success;
        rec.similarity = verdict.similarity;
        rec.nmi = nmi(verdict.partition, ctx.evaluator_original, spec.nmi_normalisation);
      }
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    report.records[idx] = std::move(rec);
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, keys.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < keys.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < keys.size(); i = next++) evaluate(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Reduce: per cell, per run aggregates, then mean/std across runs.
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    for (std::size_t ti = 0; ti < spec.taus.size(); ++ti) {
      for (std::size_t bi = 0; bi < spec.budgets.size(); ++bi) {
        ReportCell cell;
        cell.method = spec.methods[mi];
        cell.tau = spec.taus[ti];
        cell.budget_label = to_string(spec.budgets[bi]);
        cell.beta = budget_for(graph, spec.budgets[bi], spec.low_degree);
        std::vector<double> srs, nmis, f1s, used, wall;
        std::vector<double> used_success, touched;
        for (std::size_t r = 0; r < runs.size(); ++r) {
          double succ = 0, nmi_sum = 0, used_sum = 0, wall_sum = 0;
          std::size_t count = 0;
          for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto& k = keys[i];
            if (k.run != r || k.method != mi || k.tau != ti || k.budget != bi) continue;
            const auto& rec = report.records[i];
            ++cell.targets;
            if (!rec.ok) {
              ++cell.failures;
              continue;
            }
            ++count;
            succ += rec.success ? 1.0 : 0.0;
            nmi_sum += rec.nmi;
            used_sum += static_cast<double>(rec.used_budget);
            wall_sum += rec.wall_ms;
            if (rec.success) used_success.push_back(static_cast<double>(rec.used_budget));
            touched.insert(touched.end(), rec.touched_pagerank.begin(), rec.touched_pagerank.end());
          }
          if (count == 0) continue;
          const double c = static_cast<double>(count);
          srs.push_back(succ / c);
          nmis.push_back(nmi_sum / c);
          f1s.push_back(f1(succ / c, nmi_sum / c));
          used.push_back(used_sum / c);
          wall.push_back(wall_sum / c);
        }
        cell.sr = mean_std(srs);
        cell.nmi = mean_std(nmis);
        cell.f1 = mean_std(f1s);
        cell.used_budget_mean = mean_std(used).mean;
        cell.used_budget_success_mean = mean_std(used_success).mean;
        cell.pagerank_mean = mean_std(touched).mean;
        cell.wall_ms_mean = mean_std(wall).mean;
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

/// Success rate at threshold tau recomputed from recorded similarities.
inline double success_rate_at(const std::vector<CellRecord>& records, double tau) {
  double hits = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (!r.ok) continue;
    ++count;
    if (r.similarity <= tau && r.used_budget <= r.beta) hits += 1.0;
  }
  return count == 0 ? 0.0 : hits / static_cast<double>(count);
}

}  // namespace cmh
