#include "spindecay/fptas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "spindecay/errors.hpp"

namespace spindecay {

int ChooseBudget(int n, double epsilon, double alpha, int M, double slack) {
  if (n < 1) throw InvalidInput("budget needs n >= 1");
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  if (M < 2) throw InvalidInput("M must be >= 2");
  if (!(slack > 0.0)) throw InvalidInput("budget slack must be positive");
  const double levels = std::log(slack * M * n / epsilon) / std::log(1.0 / alpha);
  return static_cast<int>(std::ceil(levels)) + 1;
}

namespace {

std::string Num(double x) {
  std::string s = std::to_string(x);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

ExtRatio Invert(ExtRatio r) { return ExtRatio::FromLog(-r.log_value()); }

}  // namespace

ResolvedBudget ResolveBudget(const EstimateRequest& req, int n) {
  req.params.validate();
  if (!(req.epsilon > 0.0 && req.epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in (0, 1)");
  }
  if (req.L && *req.L < 0) throw InvalidInput("--L must be >= 0");
  if (req.M && *req.M < 2) throw InvalidInput("--M must be >= 2");
  if (req.alpha && !(*req.alpha > 0.0 && *req.alpha < 1.0)) {
    throw InvalidInput("--alpha must lie in (0, 1)");
  }

  ResolvedBudget out;
  out.regime = ClassifyRegime(req.params);
  if (out.regime.regime == Regime::kDegenerate) {
    throw DegenerateError("degenerate parameters (beta = gamma = 0 or beta * gamma = 1)");
  }
  const bool guaranteed = out.regime.regime == Regime::kGuaranteed ||
                          out.regime.regime == Regime::kGuaranteedAfterSwap;
  out.working = req.params;
  if (out.regime.swap_applied) out.working = SwapColors(req.params, {}).first;

  if (guaranteed) {
    out.profile = MakeProfile(out.working.beta, out.working.gamma);
    out.alpha = req.alpha.value_or(out.profile->sup.alpha);
    out.M = req.M.value_or(out.profile->M);
    out.certified = !req.L && !req.M && !req.alpha;
  } else {
    const double b = req.params.beta;
    const double g = req.params.gamma;
    if (!req.force) {
      std::string msg = "parameters beta=" + Num(b) + " gamma=" + Num(g) +
                        " are outside the guaranteed regime";
      if (std::isfinite(out.regime.threshold_used)) {
        msg += ": gamma <= Gamma(" + Num(std::min(b, g)) + ") = " +
               Num(out.regime.threshold_used);
      } else if (b * g > 1.0) {
        msg += " (beta * gamma > 1)";
      }
      throw RegimeError(msg + "; use --force with --M and --alpha or --L to run uncertified");
    }
    if (!(b * g < 1.0)) {
      throw RegimeError("forced runs need beta * gamma < 1 for the bounds to sandwich");
    }
    if (!req.M || (!req.alpha && !req.L)) {
      throw RegimeError("forced runs outside the guaranteed regime need --M and --alpha or --L");
    }
    if (b > g) {
      out.working = SwapColors(req.params, {}).first;
      out.regime.swap_applied = true;
    }
    out.M = *req.M;
    out.alpha = req.alpha.value_or(0.0);
    out.forced = true;
    out.certified = false;
  }
  out.L = req.L ? *req.L : ChooseBudget(n, req.epsilon, out.alpha, out.M, req.slack);
  return out;
}

PartitionEstimate EstimatePartition(const EstimateRequest& req) {
  const Graph& graph = req.graph;
  const int n = graph.vertex_count();
  PartitionEstimate out;
  out.budget = ResolveBudget(req, std::max(n, 1));
  const ResolvedBudget& budget = out.budget;
  const SpinParams params = budget.working;
  out.steps.resize(n);

  // Step i conditions on vertices 0..i-1 being green. Vertices in other
  // components do not reach v's walk tree, so those pins are harmless.
  auto run_step = [&](Vertex v) {
    PinSet pins;
    for (Vertex u = 0; u < v; ++u) pins.pin(u, Color::kGreen);
    const WalkNode root = SawRoot(graph, v, pins);
    const BoundInterval b = BoundPair(graph, root, pins, budget.L, 0, budget.M, params);
    TelescopeStep& step = out.steps[v];
    step.vertex = v;
    step.p_lo = b.lo.probability();
    step.p_hi = b.hi.probability();
    // 1 - midpoint, from the complements so that p near 1 keeps precision.
    const double q = 0.5 * (b.lo.complement_probability() + b.hi.complement_probability());
    step.log_one_minus_p = std::log(q);
    step.nodes_visited = b.nodes_visited;
    step.exact = b.exact();
  };

  const int threads = std::clamp(req.threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (Vertex v = 0; v < n; ++v) run_step(v);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int v = next++; v < n; v = next++) {
          try {
            run_step(v);
          } catch (...) {
            errors[v] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Reduce per component in fixed order so that a disjoint union sums the
  // component results exactly.
  const double log_gamma = std::log(params.gamma);
  double logZ = 0.0;
  for (const auto& component : graph.components()) {
    int edges = 0;
    double sum = 0.0;
    for (Vertex v : component) {
      edges += graph.degree(v);
      sum += out.steps[v].log_one_minus_p;
    }
    edges /= 2;
    logZ += (edges > 0 ? edges * log_gamma : 0.0) - sum;
  }
  for (const auto& step : out.steps) {
    out.nodes_visited += step.nodes_visited;
    out.max_step_nodes = std::max(out.max_step_nodes, step.nodes_visited);
  }
  out.logZ = logZ;
  const double z = std::exp(logZ);
  if (std::isfinite(z) && z > 0.0) out.Z = z;
  return out;
}

MarginalBounds Marginal(const EstimateRequest& req, Vertex v, const PinSet& pins) {
  const ResolvedBudget budget = ResolveBudget(req, std::max(req.graph.vertex_count(), 1));
  pins.validate_for(req.graph);
  const PinSet working_pins = budget.regime.swap_applied ? SwapColors(req.params, pins).second : pins;
  MarginalBounds b =
      ComputeMarginalBounds(req.graph, v, working_pins, {budget.L, budget.M}, budget.working);
  if (!budget.regime.swap_applied) return b;
  // Back to the caller's colors: R -> 1/R, p -> 1 - p.
  MarginalBounds out;
  out.ratio = b.ratio;
  out.ratio.lo = Invert(b.ratio.hi);
  out.ratio.hi = Invert(b.ratio.lo);
  out.p_lo = b.ratio.hi.complement_probability();
  out.p_hi = b.ratio.lo.complement_probability();
  return out;
}

}  // namespace spindecay
