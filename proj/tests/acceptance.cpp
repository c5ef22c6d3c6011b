// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// non-zero when any selected criterion fails. `--criterion N` runs just one.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"

using namespace cmh;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Graph load(const std::string& name) { return load_edge_list_file(oracle::fixture(name)).graph; }

Preset desk() { return *find_builtin_preset("kar-desk"); }

ExperimentSpec protocol(const Preset& p, std::vector<Method> methods, std::vector<double> taus) {
  ExperimentSpec s;
  s.optimiser = DetectorSpec{DetectorKind::greedy};
  s.methods = std::move(methods);
  s.taus = std::move(taus);
  s.budgets = {{BudgetMode::mu, 0}};
  s.hiding = apply_preset(s.hiding, p);
  s.low_degree = p.low_degree;
  s.runs = 3;
  s.seed = 0;
  return s;
}

const ReportCell& cell(const ExperimentReport& r, Method m, double tau) {
  for (const auto& c : r.cells) {
    if (c.method == m && c.tau == tau) return c;
  }
  throw std::runtime_error("missing report cell");
}

// 1 ------------------------------------------------------------------------

Verdict metric_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::vector<Graph> graphs;
  for (std::size_t n = 2; n <= 5; ++n) {
    const std::size_t pairs = n * (n - 1) / 2;
    for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask) graphs.push_back(oracle::graph_from_mask(n, mask));
  }
  for (std::size_t n = 6; n <= 8; ++n) {
    for (int i = 0; i < 150; ++i) {
      std::uniform_real_distribution<double> density(0.1, 0.9);
      graphs.push_back(oracle::random_graph(n, density(rng), rng));
    }
  }

  double worst = 0.0;
  std::size_t checks = 0;
  auto track = [&](double got, double want) {
    worst = std::max(worst, std::abs(got - want));
    ++checks;
  };
  for (const auto& g : graphs) {
    const std::size_t n = g.node_count();
    const auto a = oracle::dense(g);
    const auto bc = betweenness(g);
    const auto bc_want = oracle::betweenness(a);
    for (std::size_t v = 0; v < n; ++v) track(bc[v], bc_want[v]);

    const auto pr = pagerank(g, 0.85, 1e-15);
    const auto pr_want = oracle::pagerank(a, 0.85);
    for (std::size_t v = 0; v < n; ++v) track(pr[v], pr_want[v]);

    for (int k = 0; k < 3; ++k) {
      const auto x = oracle::random_labels(n, static_cast<std::uint32_t>(1 + k), rng);
      const auto y = oracle::random_labels(n, static_cast<std::uint32_t>(2 + k), rng);
      if (g.edge_count() > 0) track(modularity(g, Partition(x)), oracle::modularity(a, x));
      track(nmi(Partition(x), Partition(y)), oracle::nmi(x, y));

      std::vector<NodeId> s1, s2;
      for (NodeId v = 0; v < n; ++v) {
        if (x[v] == 0) s1.push_back(v);
        if (y[v] == 0) s2.push_back(v);
      }
      track(similarity(s1, s2), oracle::dice(s1, s2));
    }
  }
  for (int i = 0; i < 1000; ++i) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double sr = unit(rng), nm = unit(rng);
    track(f1(sr, nm), 2.0 / (1.0 / sr + 1.0 / nm));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 10.0,
          std::to_string(graphs.size()) + " graphs, " + std::to_string(checks) +
              " comparisons, max abs error " + fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

// 2 ------------------------------------------------------------------------

Verdict gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.95, 0.95), unit(0.0, 1.0), lam(0.0, 2.0);
  std::bernoulli_distribution coin(0.2);
  const std::size_t n = 50;
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const NodeId owner = static_cast<NodeId>(trial % n);
    AdjacencyVector a{owner, std::vector<std::uint8_t>(n)};
    std::vector<double> p(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a.bits[i] = coin(rng);
      p[i] = u(rng);
      c[i] = unit(rng);
    }
    a.bits[owner] = 0;
    p[owner] = 0.0;
    c[owner] = 0.5;
    const double lambda = lam(rng);
    const auto lv = loss(p, a, c, lambda, 2.0);
    double err2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == owner) continue;
      auto hi = p, lo = p;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (loss(hi, a, c, lambda, 2.0).value - loss(lo, a, c, lambda, 2.0).value) / (2 * h);
      err2 += (fd - lv.grad[i]) * (fd - lv.grad[i]);
      ref2 += fd * fd;
    }
    worst = std::max(worst, std::sqrt(err2 / ref2));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-5 && secs < 5.0,
          "100 instances n=50, max relative error " + fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

// 3 ------------------------------------------------------------------------

Verdict loop_invariants() {
  const auto t0 = Clock::now();
  const std::vector<std::string> names{"kar.txt", "barbell.txt", "two_cliques.txt"};
  std::vector<Graph> graphs;
  for (const auto& nm : names) graphs.push_back(load(nm));
  std::map<std::pair<std::size_t, int>, HidingBase> bases;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(0.02, 0.8), eta(0.02, 0.3);
  const std::vector<double> taus{0.3, 0.5, 0.8};
  const std::vector<DetectorKind> kinds{DetectorKind::greedy, DetectorKind::louvain,
                                        DetectorKind::label_propagation};

  std::size_t runs = 0, iterations = 0, invariant_failures = 0, budget_failures = 0;
  std::size_t exhaust_runs = 0, exhaust_failures = 0, restarts = 0;
  while (runs < 1000) {
    const std::size_t gi = rng() % graphs.size();
    const int kind = static_cast<int>(rng() % kinds.size());
    const Graph& g = graphs[gi];
    auto it = bases.find({gi, kind});
    if (it == bases.end()) {
      it = bases.emplace(std::make_pair(gi, kind),
                         make_hiding_base(g, DetectorSpec{kinds[kind], 11})).first;
    }
    const auto& base = it->second;
    const NodeId u = static_cast<NodeId>(rng() % g.node_count());
    if (community_of(base.original, u).size() < 2) continue;

    HidingConfig cfg;
    cfg.tau = taus[rng() % taus.size()];
    cfg.beta = 1 + rng() % std::min<std::size_t>(6, g.node_count() - 1);
    cfg.lambda = lam(rng);
    cfg.eta = eta(rng);
    cfg.max_iterations = 20 + rng() % 60;
    cfg.seed = rng();
    cfg.exhaust_budget = rng() % 3 == 0;

    const auto a = adjacency_vector(g, u);
    bool ok = true;
    const auto out = hide(base, u, cfg, [&](const IterationRecord& r) {
      ++iterations;
      const auto p = threshold(r.p_hat, cfg.t_plus, cfg.t_minus);
      const auto expected = clamp_add(a, p);
      ok = ok && std::equal(p.begin(), p.end(), r.p.begin(), r.p.end()) && *r.a_prime == expected &&
           r.p_hat[u] == 0.0;
      // The live delta is b_u unless this iteration rolled back.
      ok = ok && (r.restarted ? r.delta->empty() : *r.delta == EdgeDelta::between(a, expected));
      ok = ok && r.delta->size() <= cfg.beta;
    });
    ++runs;
    restarts += out.restarts;
    invariant_failures += !ok;
    budget_failures += out.used_budget > cfg.beta || out.used_budget != out.delta.size();
    if (out.success && out.similarity > cfg.tau) ++budget_failures;
    if (cfg.exhaust_budget) {
      ++exhaust_runs;
      exhaust_failures += out.used_budget != cfg.beta;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = invariant_failures == 0 && budget_failures == 0 && exhaust_failures == 0 && secs < 60.0;
  return {pass, std::to_string(runs) + " runs, " + std::to_string(iterations) + " iterations, " +
                    std::to_string(restarts) + " restarts; invariant violations " +
                    std::to_string(invariant_failures) + ", budget violations " +
                    std::to_string(budget_failures) + ", exhaust runs " + std::to_string(exhaust_runs) +
                    " with " + std::to_string(exhaust_failures) + " not spending beta; " +
                    fmt("%.1f", secs) + " s"};
}

// 4 ------------------------------------------------------------------------

Verdict partial_budget(const Preset& p) {
  const auto t0 = Clock::now();
  const Graph g = load("kar.txt");
  const auto r = run_experiment(g, protocol(p, {Method::gradient}, {0.5}), 1);
  const auto& c = cell(r, Method::gradient, 0.5);
  const double used = c.used_budget_mean;
  const double secs = seconds_since(t0);
  return {used >= 1.6 && used <= 3.0 && c.beta == 3 && secs < 120.0,
          "preset " + p.name + ", beta " + std::to_string(c.beta) + ", mean used budget " +
              fmt("%.3f", used) + " (successful only " + fmt("%.3f", c.used_budget_success_mean) +
              "), SR " + fmt("%.3f", c.sr.mean) + ", " + std::to_string(c.targets) + " hiding runs, " +
              fmt("%.1f", secs) + " s"};
}

// 5 ------------------------------------------------------------------------

Verdict ordering() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const std::string name : {"kar.txt", "two_cliques.txt"}) {
    const Graph g = load(name);
    const auto r = run_experiment(
        g, protocol(desk(), {Method::gradient, Method::random, Method::degree}, {0.5}), 1);
    const double grad = cell(r, Method::gradient, 0.5).f1.mean;
    const double rnd = cell(r, Method::random, 0.5).f1.mean;
    const double deg = cell(r, Method::degree, 0.5).f1.mean;
    pass = pass && grad - rnd >= 0.0 && grad - deg >= 0.0;
    detail += name + " beta " + std::to_string(cell(r, Method::gradient, 0.5).beta) + ": F1 gradient " +
              fmt("%.3f", grad) + ", random " + fmt("%.3f", rnd) + ", degree " + fmt("%.3f", deg) +
              " (gradient SR " + fmt("%.3f", cell(r, Method::gradient, 0.5).sr.mean) + "); ";
  }
  const double secs = seconds_since(t0);
  return {pass && secs < 300.0, detail + fmt("%.1f", secs) + " s"};
}

// 6 ------------------------------------------------------------------------

Verdict tau_monotone() {
  const Graph g = load("kar.txt");
  const std::vector<double> taus{0.3, 0.5, 0.8};
  const auto r = run_experiment(g, protocol(desk(), {Method::gradient}, taus), 1);
  bool pass = true;
  std::string detail = "per-cell SR";
  double prev = -1.0;
  for (double tau : taus) {
    const double sr = cell(r, Method::gradient, tau).sr.mean;
    pass = pass && sr >= prev;
    prev = sr;
    detail += " " + fmt("%.2f", tau) + "->" + fmt("%.4f", sr);
  }
  // Re-evaluate each stored set of outcomes at every threshold.
  for (double stored : taus) {
    std::vector<CellRecord> recs;
    for (const auto& rec : r.records) {
      if (rec.tau == stored) recs.push_back(rec);
    }
    double last = -1.0;
    detail += "; stored at " + fmt("%.1f", stored) + ":";
    for (double tau : taus) {
      const double sr = success_rate_at(recs, tau);
      pass = pass && sr >= last;
      last = sr;
      detail += " " + fmt("%.4f", sr);
    }
  }
  return {pass, detail};
}

// 7 ------------------------------------------------------------------------

Verdict pagerank_trend() {
  const Graph g = load("kar.txt");
  const auto r = run_experiment(g, protocol(desk(), {Method::gradient, Method::centrality}, {0.5}), 1);
  const double grad = cell(r, Method::gradient, 0.5).pagerank_mean;
  const double cent = cell(r, Method::centrality, 0.5).pagerank_mean;
  const double rel = std::abs(grad - 4.5e-2) / 4.5e-2;
  return {grad < cent && rel <= 0.5,
          "mean PageRank gradient " + fmt("%.4f", grad) + " vs centrality " + fmt("%.4f", cent) +
              ", gradient off 4.5e-2 by " + fmt("%.1f", 100 * rel) + "%"};
}

// 8 ------------------------------------------------------------------------

Verdict exhaustive_feasibility() {
  const auto t0 = Clock::now();
  const Graph g = load("two_cliques.txt");
  const DetectorSpec f{DetectorKind::greedy};
  const auto base = make_hiding_base(g, f);
  const std::vector<double> taus{0.0, 0.1, 0.3, 0.5, 0.8};
  const std::size_t max_beta = 4;

  std::size_t cases = 0, infeasible = 0, false_success = 0, bad_reeval = 0, successes = 0;
  bool example_ok = true;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto original_peers = without(community_of(base.original, u), u);
    // best[b] = lowest similarity reachable with at most b toggles.
    std::vector<double> best(max_beta + 1, 1.0);
    std::vector<NodeId> pool;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (v != u) pool.push_back(v);
    }
    oracle::for_each_subset(pool, max_beta, [&](const std::vector<NodeId>& s) {
      const Graph h = apply_delta(g, EdgeDelta(u, s)).materialize();
      const Partition p = detect(f, h);
      const double sim = oracle::dice(original_peers, without(community_of(p, u), u));
      for (std::size_t b = s.size(); b <= max_beta; ++b) best[b] = std::min(best[b], sim);
    });

    for (double tau : taus) {
      for (std::size_t beta = 1; beta <= max_beta; ++beta) {
        const bool feasible = best[beta] <= tau;
        for (bool exhaust : {false, true}) {
          HidingConfig cfg = apply_preset(HidingConfig{}, desk());
          cfg.tau = tau;
          cfg.beta = beta;
          cfg.seed = 100 + u;
          cfg.exhaust_budget = exhaust;
          const auto out = hide(base, u, cfg);
          ++cases;
          infeasible += !feasible;
          if (out.success) {
            ++successes;
            if (!feasible) ++false_success;
            const Partition p = detect(f, apply_delta(g, out.delta).materialize());
            const double sim = oracle::dice(original_peers, without(community_of(p, u), u));
            if (!(sim <= tau && out.delta.size() <= beta)) ++bad_reeval;
          }
          if (u == g.id_of("0") && tau == 0.3 && beta == 4 && !exhaust) example_ok = out.success;
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {false_success == 0 && bad_reeval == 0 && secs < 120.0,
          std::to_string(cases) + " (target, tau, beta, mode) cases, " + std::to_string(infeasible) +
              " exhaustively infeasible, " + std::to_string(successes) + " successes, " +
              std::to_string(false_success) + " successes where infeasible, " +
              std::to_string(bad_reeval) + " failed re-evaluation; node 0 at tau 0.3 beta 4 " +
              (example_ok ? "hidden" : "not hidden") + "; " + fmt("%.1f", secs) + " s"};
}

// 9 ------------------------------------------------------------------------

std::string strip_column(const std::string& csv, const std::string& column) {
  std::istringstream in(csv);
  std::string line, out;
  std::getline(in, line);
  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string cellv; std::getline(hs, cellv, ',');) header.push_back(cellv);
  const auto drop = std::find(header.begin(), header.end(), column) - header.begin();
  auto emit = [&](const std::string& row) {
    std::stringstream rs(row);
    std::size_t i = 0;
    bool first = true;
    for (std::string cellv; std::getline(rs, cellv, ','); ++i) {
      if (static_cast<std::ptrdiff_t>(i) == drop) continue;
      out += (first ? "" : ",") + cellv;
      first = false;
    }
    out += '\n';
  };
  emit(line);
  while (std::getline(in, line)) emit(line);
  return out;
}

Verdict determinism() {
  const auto dir = fs::temp_directory_path() / "cmh_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto spec = dir / "spec.json";
  std::ofstream(spec) << json{{"graph", oracle::fixture("kar.txt")},
                              {"methods", json::array({"gradient", "gradient-p", "dice", "roam",
                                                       "random", "degree", "centrality"})},
                              {"taus", json::array({0.3, 0.5})},
                              {"budgets", json::array({"half_mu", "mu"})},
                              {"preset", "kar-desk"},
                              {"max_targets", 6},
                              {"runs", 3},
                              {"seed", 2024}}
                             .dump(2);
  std::vector<std::string> csvs;
  for (const char* jobs : {"1", "2"}) {
    const auto out = (dir / (std::string("jobs") + jobs)).string();
    const std::vector<std::string> args{"cmh", "benchmark", "--spec", spec.string(), "--out", out,
                                        "--jobs", jobs};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream sout, serr;
    if (cli::run_cli(static_cast<int>(argv.size()), argv.data(), sout, serr) != 0) {
      return {false, "benchmark failed: " + serr.str()};
    }
    std::ifstream in(fs::path(out) / "summary.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    csvs.push_back(strip_column(ss.str(), "wall_ms_mean"));
  }
  std::size_t rows = 0;
  for (char ch : csvs[0]) rows += ch == '\n';
  const bool same = csvs[0] == csvs[1] && rows > 1;
  fs::remove_all(dir);
  return {same, std::to_string(rows - 1) + " summary rows, jobs 1 vs 2 " +
                    (same ? "identical" : "differ") + " excluding wall_ms_mean"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--criterion") only = std::stoi(argv[i + 1]);
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"metric oracles", metric_oracles},
      {"gradient check", gradient_check},
      {"loop invariants", loop_invariants},
      {"partial budget use on kar", [] { return partial_budget(*find_builtin_preset("kar")); }},
      {"F1 ordering vs random and degree", ordering},
      {"tau monotonicity", tau_monotone},
      {"PageRank of modified counterparts", pagerank_trend},
      {"exhaustive feasibility oracle", exhaustive_feasibility},
      {"benchmark determinism across jobs", determinism},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << v.detail << std::endl;
    if (i + 1 == 4) {
      // Same protocol with the desk-tuned row, for comparison only.
      const auto info = partial_budget(desk());
      std::cout << "INFO criterion 4 with kar-desk: " << info.detail
                << (info.pass ? " (within range)" : " (out of range)") << std::endl;
    }
  }
  return all ? 0 : 1;
}
