#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "cmh/detectors.hpp"
#include "cmh/error.hpp"
#include "cmh/graph.hpp"
#include "cmh/outcome.hpp"
#include "cmh/partition.hpp"
#include "cmh/rng.hpp"
#include "cmh/scoring.hpp"
#include "cmh/similarity.hpp"

namespace cmh {

enum class LossForm {
  norm,     // ||.||_q
  squared,  // ||.||_q^q, smooth everywhere
};

enum class ActionForm {
  scores,      // score-weighted promising actions
  complement,  // not A_u
};

struct HidingConfig {
  double tau = 0.5;
  std::size_t beta = 1;
  double lambda = 0.2;
  double eta = 0.079;
  std::size_t max_iterations = 120;
  double q = 2.0;
  double t_plus = 0.5;
  double t_minus = -0.5;
  double gamma = 0.9;
  ScoreWeights weights = renormalise({0.33, 0.20, 0.21, 0.24});
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool exhaust_budget = false;
  LossForm loss_form = LossForm::norm;
  ActionForm actions = ActionForm::scores;

  void validate() const {
    if (!(tau >= 0.0 && tau < 1.0)) throw ConfigError("tau must lie in [0,1)");
    if (beta < 1) throw ConfigError("beta must be at least 1");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    if (max_iterations < 1) throw ConfigError("max iterations must be at least 1");
    if (!(q >= 1.0)) throw ConfigError("q must be at least 1");
    if (!(t_minus < 0.0 && 0.0 < t_plus)) throw ConfigError("thresholds need t- < 0 < t+");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0,1)");
    validate_weights(weights);
  }
};

inline constexpr double kNormGuard = 1e-12;

struct LossValue {
  double value = 0.0;
  std::vector<double> grad;
};

namespace detail {

inline double q_norm(std::span<const double> x, double q) {
  double acc = 0.0;
  if (q == 2.0) {
    for (double v : x) acc += v * v;
    return std::sqrt(acc);
  }
  for (double v : x) acc += std::pow(std::abs(v), q);
  return std::pow(acc, 1.0 / q);
}

/// Adds scale * d||x||_q/dx (or d||x||_q^q/dx in squared form) into out.
inline void add_norm_gradient(std::span<const double> x, double q, LossForm form, double scale,
                              std::span<double> out) {
  auto sgn = [](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); };
  if (form == LossForm::squared) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] += scale * q * sgn(x[i]) * std::pow(std::abs(x[i]), q - 1.0);
    }
    return;
  }
  const double norm = q_norm(x, q);
  const double denom = std::max(std::pow(norm, q - 1.0), kNormGuard);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = q == 2.0 ? std::abs(x[i]) : std::pow(std::abs(x[i]), q - 1.0);
    out[i] += scale * sgn(x[i]) * mag / denom;
  }
}

}  // namespace detail

/// ||c - (A + p)||_q + lambda ||p||_q and its gradient in p; grad[owner] = 0.
inline LossValue loss(std::span<const double> p_hat, const AdjacencyVector& a,
                      std::span<const double> c_tilde, double lambda, double q,
                      LossForm form = LossForm::norm) {
  const std::size_t n = p_hat.size();
  if (a.bits.size() != n || c_tilde.size() != n) throw ContractViolation("loss input length mismatch");
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = c_tilde[i] - (a.bits[i] + p_hat[i]);

  LossValue out;
  auto term = [&](std::span<const double> x) {
    const double nq = detail::q_norm(x, q);
    return form == LossForm::squared ? std::pow(nq, q) : nq;
  };
  out.value = term(residual) + lambda * term(p_hat);
  out.grad.assign(n, 0.0);
  detail::add_norm_gradient(residual, q, form, -1.0, out.grad);
  detail::add_norm_gradient(p_hat, q, form, lambda, out.grad);
  out.grad[a.owner] = 0.0;
  return out;
}

/// +1 at or above t+, -1 at or below t-, else 0.
inline std::vector<std::int8_t> threshold(std::span<const double> p_hat, double t_plus,
                                          double t_minus) {
  if (!(t_minus < t_plus)) throw ContractViolation("threshold requires t- < t+");
  std::vector<std::int8_t> p(p_hat.size(), 0);
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    if (p_hat[i] >= t_plus) {
      p[i] = 1;
    } else if (p_hat[i] <= t_minus) {
      p[i] = -1;
    }
  }
  return p;
}

class AdamState {
 public:
  AdamState(std::size_t n, double beta1, double beta2, double eps)
      : m_(n, 0.0), v_(n, 0.0), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<double> params, std::span<const double> grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
  }

 private:
  std::vector<double> m_, v_;
  double beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

/// (1 - gamma) sum_t gamma^(T - t) g_t over the stored gradients.
inline std::vector<double> momentum_average(const std::vector<std::vector<double>>& history,
                                            double gamma) {
  if (history.empty()) return {};
  std::vector<double> avg(history.front().size(), 0.0);
  // Horner form: avg = gamma * avg + g_t, scaled at the end.
  for (const auto& g : history) {
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = gamma * avg[i] + g[i];
  }
  for (double& x : avg) x *= (1.0 - gamma);
  return avg;
}

/// Picks the `budget` candidates with the largest strength; ties go to the lower id.
inline std::vector<NodeId> top_candidates(std::span<const NodeId> candidates,
                                          std::span<const double> strength, std::size_t budget) {
  std::vector<std::size_t> idx(candidates.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (strength[a] != strength[b]) return strength[a] > strength[b];
    return candidates[a] < candidates[b];
  });
  std::vector<NodeId> out;
  for (std::size_t k = 0; k < std::min(budget, idx.size()); ++k) out.push_back(candidates[idx[k]]);
  std::sort(out.begin(), out.end());
  return out;
}

struct ProjectionResult {
  EdgeDelta delta;
  std::vector<double> p_hat;
  std::size_t steps = 0;
  bool used_fallback = false;
};

/// Spends the remaining budget along -g_bar. Applied toggles are never undone,
/// so the delta only grows until it holds exactly min(beta, n - 1) entries.
inline ProjectionResult project_perturbation(const AdjacencyVector& a, EdgeDelta delta,
                                             std::vector<double> p_hat,
                                             std::span<const double> g_bar,
                                             const HidingConfig& cfg,
                                             std::size_t max_steps = 10000) {
  const std::size_t n = a.bits.size();
  const NodeId u = a.owner;
  const std::size_t target = std::min(cfg.beta, n - 1);
  if (delta.size() > cfg.beta) throw ContractViolation("projection starts over budget");
  ProjectionResult out{std::move(delta), std::move(p_hat), 0, false};
  auto& d = out.delta;
  auto& ph = out.p_hat;

  auto strength = [&](NodeId v) { return std::abs(ph[v]) * std::abs(g_bar[v]); };
  auto apply = [&](const std::vector<NodeId>& chosen) {
    for (NodeId v : chosen) d.toggle(v);
  };
  // A coordinate still able to turn into a modification by moving along -g_bar.
  auto reachable = [&](NodeId v) {
    if (v == u || d.contains(v)) return false;
    return a.bits[v] ? g_bar[v] > 0.0 : g_bar[v] < 0.0;
  };

  while (d.size() < target) {
    const std::size_t remaining = target - d.size();
    bool any_reachable = false;
    for (NodeId v = 0; v < n; ++v) any_reachable = any_reachable || reachable(v);
    if (!any_reachable || out.steps >= max_steps) {
      std::vector<NodeId> pool;
      std::vector<double> s;
      for (NodeId v = 0; v < n; ++v) {
        if (v == u || d.contains(v)) continue;
        pool.push_back(v);
        // Gradient support first, |p_hat| alone breaks ties and covers g_bar = 0.
        s.push_back(strength(v) + 1e-9 * std::abs(ph[v]));
      }
      apply(top_candidates(pool, s, remaining));
      out.used_fallback = true;
      break;
    }

    ++out.steps;
    for (std::size_t i = 0; i < n; ++i) ph[i] -= cfg.eta * g_bar[i];
    ph[u] = 0.0;
    const auto p = threshold(ph, cfg.t_plus, cfg.t_minus);
    const auto next = clamp_add(a, p);
    std::vector<NodeId> proposals;
    std::vector<double> s;
    for (NodeId v = 0; v < n; ++v) {
      if (v == u || d.contains(v) || next.bits[v] == a.bits[v]) continue;
      proposals.push_back(v);
      s.push_back(strength(v));
    }
    if (proposals.empty()) continue;
    apply(proposals.size() <= remaining ? proposals : top_candidates(proposals, s, remaining));
  }
  return out;
}

/// Per-iteration snapshot handed to an optional observer (tests, tracing).
struct IterationRecord {
  std::size_t iteration = 0;
  std::span<const double> p_hat;  // before any resample, so p = threshold(p_hat)
  std::span<const std::int8_t> p;
  const AdjacencyVector* a_prime = nullptr;
  const EdgeDelta* delta = nullptr;  // after any rollback
  bool restarted = false;
  double similarity = 1.0;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Quantities that depend only on (graph, detector): f(G) and the structural
/// scores. Computed once and shared across targets.
struct HidingBase {
  const Graph* graph = nullptr;
  DetectorSpec detector;
  Partition original;
  StructuralScores scores;
};

inline HidingBase make_hiding_base(const Graph& g, const DetectorSpec& f) {
  HidingBase base{&g, f, detect(f, g), {}};
  base.scores = structural_scores(g, base.original);
  return base;
}

/// Gradient-based membership hiding for target u. With cfg.exhaust_budget the
/// final perturbation is projected onto exactly beta edge changes.
inline HidingOutcome hide(const HidingBase& base, NodeId u, const HidingConfig& cfg,
                          const IterationObserver& observer = {}) {
  cfg.validate();
  const Graph& g = *base.graph;
  const std::size_t n = g.node_count();
  if (u >= n) throw ContractViolation("target out of range");
  const auto start = std::chrono::steady_clock::now();

  const auto& community = community_of(base.original, u);
  if (community.size() < 2) {
    throw TrivialTargetError("target '" + g.label(u) + "' is alone in its community");
  }
  const auto peers = without(community, u);
  const AdjacencyVector a = adjacency_vector(g, u);
  const PromisingActions c =
      cfg.actions == ActionForm::scores
          ? promising_actions(u, community, aggregate_scores(base.scores, cfg.weights))
          : complement_actions(a);

  std::mt19937_64 rng(seed_sequence(cfg.seed, {0x48494445ULL, u}));
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  std::vector<double> p_hat(n);
  auto resample = [&] {
    for (auto& x : p_hat) {
      do {
        x = init(rng);
      } while (x <= -0.5);  // open interval
    }
    p_hat[u] = 0.0;
  };
  resample();

  AdamState adam(n, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  std::vector<std::vector<double>> history;
  history.reserve(cfg.max_iterations);

  EdgeDelta delta(u);
  Partition current = base.original;
  double sim = 1.0;  // sim(C_i \ u, C_i \ u)
  HidingOutcome best{false, u, delta, 0, 0, 0, 0.0, current, sim};
  std::size_t restarts = 0;
  std::size_t t = 1;

  while (sim > cfg.tau && t <= cfg.max_iterations) {
    auto lv = loss(p_hat, a, c.values, cfg.lambda, cfg.q, cfg.loss_form);
    adam.step(p_hat, lv.grad, cfg.eta);
    for (auto& x : p_hat) x = std::tanh(x);
    p_hat[u] = 0.0;
    history.push_back(std::move(lv.grad));

    const auto p = threshold(p_hat, cfg.t_plus, cfg.t_minus);
    AdjacencyVector a_prime = clamp_add(a, p);
    EdgeDelta next = EdgeDelta::between(a, a_prime);
    bool restarted = false;
    std::vector<double> overrun;  // the p_hat that produced a_prime, kept for the observer
    if (next.distance(delta) > 0) {
      delta = std::move(next);
      if (delta.size() <= cfg.beta) {
        if (delta.empty()) {
          current = base.original;
          sim = 1.0;
        } else {
          current = detect(base.detector, apply_delta(g, delta));
          sim = similarity(peers, without(community_of(current, u), u));
        }
      }
    }
    if (delta.size() > cfg.beta) {
      // Over budget: drop the counterfactual entirely and start afresh.
      if (observer) overrun = p_hat;
      resample();
      delta = EdgeDelta(u);
      current = base.original;
      sim = 1.0;
      ++restarts;
      restarted = true;
    } else if (sim < best.similarity) {
      best.delta = delta;
      best.final_partition = current;
      best.similarity = sim;
      best.iterations = t;
    }
    if (observer) {
      observer(IterationRecord{t, restarted ? overrun : p_hat, p, &a_prime, &delta, restarted, sim});
    }
    ++t;
  }

  HidingOutcome out;
  if (sim <= cfg.tau) {
    out = HidingOutcome{true, u, delta, delta.size(), t - 1, restarts, 0.0, current, sim};
  } else {
    out = best;
    out.success = false;
  }
  out.iterations = t - 1;
  out.restarts = restarts;

  if (cfg.exhaust_budget) {
    const auto g_bar = momentum_average(history, cfg.gamma);
    auto projected = project_perturbation(a, delta, p_hat, g_bar, cfg);
    auto verdict = assess(g, u, base.detector, peers, projected.delta, cfg.tau, cfg.beta);
    out.delta = std::move(projected.delta);
    out.final_partition = std::move(verdict.partition);
    out.similarity = verdict.similarity;
    out.success = verdict.success;
  }
  out.used_budget = out.delta.size();
  assert(out.used_budget <= cfg.beta);
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline HidingOutcome hide(const Graph& g, NodeId u, const DetectorSpec& f, const HidingConfig& cfg,
                          const IterationObserver& observer = {}) {
  return hide(make_hiding_base(g, f), u, cfg, observer);
}

}  // namespace cmh
