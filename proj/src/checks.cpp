#include "spindecay/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "spindecay/errors.hpp"
#include "spindecay/estimator.hpp"
#include "spindecay/fptas.hpp"
#include "spindecay/oracle.hpp"
#include "spindecay/sawtree.hpp"
#include "spindecay/thresholds.hpp"

namespace spindecay {
namespace {

using Edges = std::vector<std::pair<Vertex, Vertex>>;

std::string Fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CriterionResult Named(int id, const char* name) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  return r;
}

CriterionResult Finish(CriterionResult r, const Stopwatch& watch) {
  r.seconds = watch.seconds();
  return r;
}

Graph Relabel(Rng& rng, int n, const Edges& edges) {
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Edges out;
  out.reserve(edges.size());
  for (auto [u, v] : edges) out.emplace_back(perm[u], perm[v]);
  return Graph::FromEdges(n, out);
}

}  // namespace

Graph PathGraph(int n) {
  Edges e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::FromEdges(n, e);
}

Graph CycleGraph(int n) {
  Edges e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::FromEdges(n, e);
}

Graph CompleteGraph(int n) {
  Edges e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return Graph::FromEdges(n, e);
}

Graph StarGraph(int leaves) {
  Edges e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::FromEdges(leaves + 1, e);
}

Graph CompleteBinaryTree(int depth) {
  const int n = (1 << (depth + 1)) - 1;
  Edges e;
  for (int i = 1; i < n; ++i) e.emplace_back((i - 1) / 2, i);
  return Graph::FromEdges(n, e);
}

Graph RandomConnectedGraph(Rng& rng, int n, int max_degree, int extra_edges) {
  if (n < 1 || (n > 2 && max_degree < 2)) throw InvalidInput("cannot build such a graph");
  std::vector<int> degree(n, 0);
  Edges edges;
  std::set<std::pair<Vertex, Vertex>> present;
  for (int v = 1; v < n; ++v) {
    int u;
    do {
      u = UniformInt(rng, 0, v - 1);
    } while (degree[u] >= max_degree);
    edges.emplace_back(u, v);
    present.insert({u, v});
    ++degree[u];
    ++degree[v];
  }
  for (int i = 0; i < extra_edges; ++i) {
    int u = UniformInt(rng, 0, n - 1);
    int v = UniformInt(rng, 0, n - 1);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (degree[u] >= max_degree || degree[v] >= max_degree) continue;
    if (!present.insert({u, v}).second) continue;
    edges.emplace_back(u, v);
    ++degree[u];
    ++degree[v];
  }
  return Relabel(rng, n, edges);
}

Graph RandomTree(Rng& rng, int n, int max_degree, bool preferential) {
  std::vector<int> degree(n, 0);
  Edges edges;
  for (int v = 1; v < n; ++v) {
    int u;
    do {
      if (preferential) {
        std::vector<double> weights(v);
        for (int w = 0; w < v; ++w) weights[w] = degree[w] < max_degree ? degree[w] + 1.0 : 0.0;
        u = std::discrete_distribution<int>(weights.begin(), weights.end())(rng);
      } else {
        u = UniformInt(rng, 0, v - 1);
      }
    } while (degree[u] >= max_degree);
    edges.emplace_back(u, v);
    ++degree[u];
    ++degree[v];
  }
  return Graph::FromEdges(n, edges);
}

PinSet RandomPins(Rng& rng, const Graph& graph, int count) {
  std::vector<Vertex> order(graph.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  PinSet pins;
  for (int i = 0; i < count && i < graph.vertex_count(); ++i) {
    pins.pin(order[i], UniformInt(rng, 0, 1) == 0 ? Color::kBlue : Color::kGreen);
  }
  return pins;
}

std::uint64_t WorkBound(int n, int M, int L) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t bound = static_cast<std::uint64_t>(n);
  for (int i = 0; i < L; ++i) {
    if (bound > kMax / static_cast<std::uint64_t>(M)) return kMax;
    bound *= static_cast<std::uint64_t>(M);
  }
  return bound;
}

CriterionResult CheckThresholdNumbers(const AcceptanceOptions&) {
  Stopwatch watch;
  CriterionResult r = Named(1, "threshold numbers");
  const IntegerThreshold integer = BigGammaIntegerBeta0();
  const double expected_integer = 10.0 * std::pow(11.0, -11.0 / 12.0);
  const double err_integer = std::abs(integer.Gamma - expected_integer);
  const UniquenessThreshold cont = BigGamma(0.0);
  const double err_cont = std::abs(cont.Gamma - 1.1101715);
  const double elapsed = watch.seconds();
  r.pass = err_integer <= 1e-9 && integer.d == 11 && err_cont <= 1e-6 && elapsed < 5.0;
  r.detail = Fmt("Gamma*(0)=%.12f at d=%d (err %.1e, tol 1e-9); Gamma(0)=%.10f (err %.1e, tol 1e-6)",
                 integer.Gamma, integer.d, err_integer, cont.Gamma, err_cont);
  return Finish(r, watch);
}

CriterionResult CheckCriticalCoincidence(const AcceptanceOptions&) {
  Stopwatch watch;
  CriterionResult r = Named(2, "critical coincidence alpha(D, X) = 1");
  double worst = 0.0;
  std::string parts;
  for (double beta : {0.0, 0.1, 0.3, 0.5}) {
    const UniquenessThreshold t = BigGamma(beta);
    const double a = AlphaSym(beta, t.Gamma, t.D, t.D, t.X);
    worst = std::max(worst, std::abs(a - 1.0));
    parts += Fmt("b=%.1f:%.2e ", beta, std::abs(a - 1.0));
  }
  const IntegerThreshold integer = BigGammaIntegerBeta0();
  const double a_int = AlphaSym(0.0, integer.Gamma, integer.d, integer.d, integer.Gamma / 10.0);
  const double err_int = std::abs(a_int - 1.0);
  const double elapsed = watch.seconds();
  r.pass = worst <= 1e-6 && err_int <= 1e-6 && elapsed < 10.0;
  r.detail = Fmt("max |alpha-1| = %.2e over beta (%s); integer form d=11: %.2e (tol 1e-6)",
                 worst, parts.c_str(), err_int);
  return Finish(r, watch);
}

CriterionResult CheckFixedPointIdentitySuite(const AcceptanceOptions&) {
  Stopwatch watch;
  CriterionResult r = Named(3, "fixed-point identities");
  double worst = 0.0;
  int betas = 0;
  bool all = true;
  for (int i = 0; i <= 9; ++i) {
    const double beta = i / 10.0;
    const IdentityReport report = CheckFixedPointIdentities(beta, 1e-6);
    ++betas;
    all = all && report.all_hold();
    for (const auto& c : report.checks) worst = std::max(worst, c.residual);
  }
  r.pass = all;
  r.detail = Fmt("%d values of beta, worst residual %.2e (tol 1e-6)", betas, worst);
  return Finish(r, watch);
}

CriterionResult CheckWeitzEquivalence(const AcceptanceOptions& options) {
  Stopwatch watch;
  CriterionResult r = Named(4, "self-avoiding-walk tree equivalence");
  Rng rng(options.seed ^ 0x4);
  const SpinParams param_sets[] = {{0.0, 2.0}, {0.3, 1.5}, {0.5, 0.7}, {1.5, 0.4}, {2.0, 3.0}};
  const int graphs = options.quick ? 15 : 60;
  double worst = 0.0;
  long long comparisons = 0;
  int scenarios = 0;
  for (int g = 0; g < graphs; ++g) {
    const int n = UniformInt(rng, 2, 8);
    const Graph graph = RandomConnectedGraph(rng, n, n - 1, UniformInt(rng, 0, 2 * n));
    const SpinParams params = param_sets[g % std::size(param_sets)];
    // The unpinned case plus two pinned scenarios per graph.
    std::vector<PinSet> cases = {PinSet{}};
    for (int s = 0; s < 2; ++s) cases.push_back(RandomPins(rng, graph, UniformInt(rng, 1, std::max(1, n / 2))));
    for (const PinSet& pins : cases) {
      if (static_cast<int>(pins.size()) >= n) continue;
      const ExactResult exact = ExactPartition(graph, params, pins);
      if (exact.logZ == -std::numeric_limits<double>::infinity()) continue;
      ++scenarios;
      for (Vertex v = 0; v < n; ++v) {
        if (pins.contains(v)) continue;
        const double tree = ExactTreeR(graph, SawRoot(graph, v, pins), pins, params).value();
        const double oracle = exact.ratio(v).value();
        worst = std::max(worst, std::abs(tree - oracle));
        ++comparisons;
      }
    }
  }
  const double elapsed = watch.seconds();
  r.pass = worst <= 1e-9 && elapsed < 60.0 && graphs >= 50;
  if (options.quick) r.pass = worst <= 1e-9;
  r.detail = Fmt("%d graphs, %d pin scenarios, %lld vertices; max |R_tree - R_oracle| = %.2e (tol 1e-9)",
                 graphs, scenarios, comparisons, worst);
  return Finish(r, watch);
}

CriterionResult CheckSandwichNesting(const AcceptanceOptions& options) {
  Stopwatch watch;
  CriterionResult r = Named(5, "sandwich and nesting");
  Rng rng(options.seed ^ 0x5);
  const SpinParams param_sets[] = {{0.0, 2.0}, {0.3, 2.0}, {0.1, 1.2}, {0.6, 0.9}};
  const int Ms[] = {2, 3, 18};
  const int graphs = options.quick ? 25 : 110;
  constexpr double kTol = 1e-9;
  long long sandwich_fail = 0;
  long long nesting_fail = 0;
  long long exact_fail = 0;
  long long exact_cases = 0;
  long long checks = 0;
  for (int g = 0; g < graphs; ++g) {
    const int n = UniformInt(rng, 3, 14);
    const Graph graph = RandomConnectedGraph(rng, n, 4, UniformInt(rng, 0, n));
    const SpinParams params = param_sets[g % std::size(param_sets)];
    const int M = Ms[UniformInt(rng, 0, 2)];
    const PinSet pins = RandomPins(rng, graph, UniformInt(rng, 0, 2));
    const ExactResult exact = ExactPartition(graph, params, pins);
    if (exact.logZ == -std::numeric_limits<double>::infinity()) continue;
    std::vector<Vertex> free;
    for (Vertex v = 0; v < n; ++v) {
      if (!pins.contains(v)) free.push_back(v);
    }
    std::shuffle(free.begin(), free.end(), rng);
    free.resize(std::min<std::size_t>(free.size(), 3));
    for (Vertex v : free) {
      const double R = exact.ratio(v).value();
      const WalkNode root = SawRoot(graph, v, pins);
      ExtRatio prev_lo = ExtRatio::Zero();
      ExtRatio prev_hi = ExtRatio::Infinite();
      for (int L = 0; L <= 8; ++L) {
        const BoundInterval b = BoundPair(graph, root, pins, L, 0, M, params);
        const double lo = b.lo.value();
        const double hi = b.hi.value();
        ++checks;
        if (lo > R * (1 + kTol) + kTol || hi < R * (1 - kTol) - kTol) ++sandwich_fail;
        if (b.lo.value() < prev_lo.value() * (1 - kTol) ||
            b.hi.value() > prev_hi.value() * (1 + kTol)) {
          ++nesting_fail;
        }
        if (b.exact()) {
          ++exact_cases;
          if (!(b.lo == b.hi) || std::abs(lo - R) > kTol * std::max(1.0, R)) ++exact_fail;
        }
        prev_lo = b.lo;
        prev_hi = b.hi;
      }
    }
  }
  r.pass = sandwich_fail == 0 && nesting_fail == 0 && exact_fail == 0 && exact_cases > 0;
  r.detail = Fmt("%d graphs, %lld (vertex, L) pairs: %lld sandwich, %lld nesting, %lld/%lld exact-coincidence failures",
                 graphs, checks, sandwich_fail, nesting_fail, exact_fail, exact_cases);
  return Finish(r, watch);
}

CriterionResult CheckDecayBound(const AcceptanceOptions& options) {
  Stopwatch watch;
  CriterionResult r = Named(6, "decay bound 2 M alpha^(L-1)");
  const SpinParams params{0.0, 2.0};
  const ThresholdProfile profile = MakeProfile(0.0, 2.0);
  const double log_alpha = std::log(profile.sup.alpha);
  Rng rng(options.seed ^ 0x6);

  long long bound_fail = 0;
  long long levels = 0;
  int slope_fail = 0;
  int slopes = 0;
  double worst_slope = -std::numeric_limits<double>::infinity();
  auto run = [&](const Graph& graph, Vertex v, int L_max) {
    DecayOptions opts;
    opts.L_min = 0;
    opts.L_max = L_max;
    const DecayTrace trace = DecayProfile(graph, v, {}, params, profile, opts);
    for (const auto& level : trace.levels) {
      ++levels;
      if (level.delta > level.bound * (1 + 1e-12)) ++bound_fail;
    }
    if (trace.slope) {
      ++slopes;
      worst_slope = std::max(worst_slope, *trace.slope);
      if (*trace.slope > log_alpha + 0.05) ++slope_fail;
    }
  };

  const int depth = options.quick ? 10 : 12;
  run(CompleteBinaryTree(depth), 0, depth + 2);
  const int graphs = options.quick ? 8 : 30;
  for (int g = 0; g < graphs; ++g) {
    const int n = UniformInt(rng, 6, 14);
    const Graph graph = RandomConnectedGraph(rng, n, 5, UniformInt(rng, 0, n));
    run(graph, UniformInt(rng, 0, n - 1), 10);
  }
  r.pass = bound_fail == 0 && slope_fail == 0 && slopes > 0;
  r.detail = Fmt("binary tree depth %d + %d graphs: %lld/%lld levels above bound; %d/%d slopes above ln(alpha)+0.05 = %.4f (worst %.4f); M=%d alpha=%.4f",
                 depth, graphs, bound_fail, levels, slope_fail, slopes, log_alpha + 0.05,
                 worst_slope, profile.M, profile.sup.alpha);
  return Finish(r, watch);
}

CriterionResult CheckEndToEnd(const AcceptanceOptions& options) {
  Stopwatch watch;
  CriterionResult r = Named(7, "end-to-end partition function");
  Rng rng(options.seed ^ 0x7);
  const int graphs = options.quick ? 12 : 100;
  constexpr double kEps = 0.05;
  double worst = 0.0;
  int failures = 0;
  int L_used = 0;
  int M_used = 0;
  for (int g = 0; g < graphs; ++g) {
    const int n = options.quick ? UniformInt(rng, 6, 12) : UniformInt(rng, 10, 18);
    EstimateRequest req;
    req.graph = RandomConnectedGraph(rng, n, 6, UniformInt(rng, 0, n));
    req.params = {0.0, 2.0};
    req.epsilon = kEps;
    const PartitionEstimate est = EstimatePartition(req);
    const ExactResult exact = ExactPartition(req.graph, req.params);
    const double rel = std::abs(std::expm1(est.logZ - exact.logZ));
    worst = std::max(worst, rel);
    if (!(rel <= kEps)) ++failures;
    L_used = std::max(L_used, est.budget.L);
    M_used = est.budget.M;
  }
  const double elapsed = watch.seconds();
  r.pass = failures == 0 && elapsed <= 600.0;
  r.detail = Fmt("%d graphs (n <= 18, max degree <= 6): %d above eps=0.05, worst relative error %.2e; L=%d M=%d",
                 graphs, failures, worst, L_used, M_used);
  return Finish(r, watch);
}

CriterionResult CheckPerNodeDecay(const AcceptanceOptions& options) {
  Stopwatch watch;
  CriterionResult r = Named(8, "per-node potential inequalities");
  Rng rng(options.seed ^ 0x8);
  const int trees = options.quick ? 8 : 24;
  const double gammas[] = {2.0, 1.5, 3.0};
  std::uint64_t checked = 0, basis_fail = 0, steps = 0, step_fail = 0;
  double worst_basis = 0.0, worst_step = 0.0;
  for (int t = 0; t < trees; ++t) {
    const double gamma = gammas[t % std::size(gammas)];
    const SpinParams params{0.0, gamma};
    const ThresholdProfile profile = MakeProfile(0.0, gamma);
    const int n = UniformInt(rng, 30, 300);
    // Preferential trees grow hubs beyond M, which exercises the
    // multi-level depth charge.
    const Graph tree = RandomTree(rng, n, t % 2 == 0 ? 60 : 6, t % 2 == 0);
    PinSet pins = RandomPins(rng, tree, n / 15);
    pins.unpin(0);
    DecayOptions opts;
    opts.L_min = 0;
    opts.L_max = 8;
    const DecayTrace trace = DecayProfile(tree, 0, pins, params, profile, opts);
    for (const auto& level : trace.levels) {
      checked += level.nodes_checked;
      basis_fail += level.basis_violations;
      steps += level.step_checks;
      step_fail += level.step_violations;
      worst_basis = std::max(worst_basis, level.worst_basis_ratio);
      worst_step = std::max(worst_step, level.worst_step_ratio);
    }
  }
  r.pass = basis_fail == 0 && step_fail == 0 && steps > 0;
  r.detail = Fmt("%d trees: basis %llu/%llu violated (worst ratio %.3f), step %llu/%llu violated (worst ratio %.3f)",
                 trees, static_cast<unsigned long long>(basis_fail),
                 static_cast<unsigned long long>(checked), worst_basis,
                 static_cast<unsigned long long>(step_fail), static_cast<unsigned long long>(steps),
                 worst_step);
  return Finish(r, watch);
}

CriterionResult CheckWorkBound(const AcceptanceOptions& options) {
  Stopwatch watch;
  CriterionResult r = Named(9, "work bound n M^L");
  Rng rng(options.seed ^ 0x9);
  const SpinParams params{0.0, 2.0};
  const int Ms[] = {2, 3, 5, 18};
  long long instances = 0;
  long long failures = 0;
  double worst = 0.0;
  auto record = [&](std::uint64_t visited, int n, int M, int L) {
    ++instances;
    const std::uint64_t bound = WorkBound(n, M, L);
    worst = std::max(worst, static_cast<double>(visited) / static_cast<double>(bound));
    if (visited > bound) ++failures;
  };
  const int graphs = options.quick ? 20 : 80;
  for (int g = 0; g < graphs; ++g) {
    const int n = UniformInt(rng, 2, 14);
    const Graph graph = RandomConnectedGraph(rng, n, 6, UniformInt(rng, 0, 2 * n));
    const int M = Ms[g % std::size(Ms)];
    const PinSet pins = RandomPins(rng, graph, UniformInt(rng, 0, 2));
    for (Vertex v = 0; v < n; ++v) {
      if (pins.contains(v)) continue;
      const WalkNode root = SawRoot(graph, v, pins);
      for (int L = 0; L <= 6; ++L) {
        record(BoundPair(graph, root, pins, L, 0, M, params).nodes_visited, n, M, L);
      }
    }
  }
  const Graph tree = CompleteBinaryTree(options.quick ? 9 : 12);
  for (int M : {2, 18}) {
    for (int L = 0; L <= 10; ++L) {
      record(BoundPair(tree, SawRoot(tree, 0, {}), {}, L, 0, M, params).nodes_visited,
             tree.vertex_count(), M, L);
    }
  }
  for (int g = 0; g < (options.quick ? 3 : 10); ++g) {
    EstimateRequest req;
    req.graph = RandomConnectedGraph(rng, UniformInt(rng, 6, 14), 6, 8);
    req.params = params;
    const PartitionEstimate est = EstimatePartition(req);
    for (const auto& step : est.steps) {
      record(step.nodes_visited, req.graph.vertex_count(), est.budget.M, est.budget.L);
    }
  }
  r.pass = failures == 0;
  r.detail = Fmt("%lld instances, %lld above n M^L; largest visited / bound = %.3g", instances,
                 failures, worst);
  return Finish(r, watch);
}

std::vector<CriterionResult> RunAcceptance(const AcceptanceOptions& options) {
  return {CheckThresholdNumbers(options), CheckCriticalCoincidence(options),
          CheckFixedPointIdentitySuite(options), CheckWeitzEquivalence(options),
          CheckSandwichNesting(options), CheckDecayBound(options),
          CheckEndToEnd(options), CheckPerNodeDecay(options),
          CheckWorkBound(options)};
}

std::string FormatResult(const CriterionResult& result) {
  return Fmt("[%s] %d %s: %s (%.2f s)", result.pass ? "PASS" : "FAIL", result.id,
             result.name.c_str(), result.detail.c_str(), result.seconds);
}

}  // namespace spindecay
