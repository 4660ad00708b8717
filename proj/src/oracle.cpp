#include "spindecay/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "spindecay/errors.hpp"

namespace spindecay {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// ln sum_k count[k] * beta^{k / stride} * gamma^{k % stride}.
double LogWeightedSum(const std::vector<std::uint64_t>& counts, int stride,
                      double log_beta, double log_gamma) {
  std::vector<double> terms;
  terms.reserve(counts.size());
  double max_term = kNegInf;
  for (std::size_t key = 0; key < counts.size(); ++key) {
    if (counts[key] == 0) continue;
    const int n00 = static_cast<int>(key) / stride;
    const int n11 = static_cast<int>(key) % stride;
    double term = std::log(static_cast<double>(counts[key]));
    if (n00 > 0) term += n00 * log_beta;
    if (n11 > 0) term += n11 * log_gamma;
    if (term == kNegInf) continue;
    terms.push_back(term);
    max_term = std::max(max_term, term);
  }
  if (terms.empty()) return kNegInf;
  CompensatedSum sum;
  for (double t : terms) sum.add(std::exp(t - max_term));
  return max_term + std::log(sum.value());
}

}  // namespace

ExtRatio ExactResult::ratio(Vertex v) const {
  const double b = log_blue_weight[v];
  const double g = log_green_weight[v];
  if (b == kNegInf && g == kNegInf) {
    throw InvalidQuery("marginal undefined: every configuration has weight 0");
  }
  if (g == kNegInf) return ExtRatio::Infinite();
  if (b == kNegInf) return ExtRatio::Zero();
  return ExtRatio::FromLog(b - g);
}

ExactResult ExactPartition(const Graph& graph, const SpinParams& params, const PinSet& pins) {
  params.validate();
  pins.validate_for(graph);
  const int n = graph.vertex_count();
  const int m = graph.edge_count();

  std::vector<Vertex> free;
  std::vector<std::uint8_t> state(n, static_cast<std::uint8_t>(Color::kGreen));
  for (Vertex v = 0; v < n; ++v) {
    if (pins.contains(v)) {
      state[v] = static_cast<std::uint8_t>(pins.at(v));
    } else {
      free.push_back(v);
    }
  }
  const int k = static_cast<int>(free.size());
  if (k > kMaxEnumerationVertices) {
    throw SizeError("exact enumeration limited to " + std::to_string(kMaxEnumerationVertices) +
                    " free vertices (got " + std::to_string(k) + ")");
  }

  // Weight of a configuration is beta^{#blue-blue edges} gamma^{#green-green
  // edges}; configurations are histogrammed by that pair of counts.
  const int stride = m + 1;
  auto key_of = [stride](int n00, int n11) { return static_cast<std::size_t>(n00) * stride + n11; };
  std::vector<std::uint64_t> total(static_cast<std::size_t>(stride) * stride, 0);
  std::vector<std::vector<std::uint64_t>> blue(n);
  for (Vertex v : free) blue[v].assign(total.size(), 0);

  int n00 = 0;
  int n11 = 0;
  for (auto [u, w] : graph.edges()) {
    if (state[u] == state[w]) (state[u] == 0 ? n00 : n11)++;
  }

  std::uint32_t blue_mask = 0;  // bit i: free[i] is blue
  const std::uint64_t configs = std::uint64_t{1} << k;
  for (std::uint64_t step = 0; step < configs; ++step) {
    if (step > 0) {
      const int bit = std::countr_zero(step);
      const Vertex f = free[bit];
      for (Vertex u : graph.neighbors(f)) {
        if (state[u] == state[f]) (state[f] == 0 ? n00 : n11)--;
      }
      state[f] ^= 1u;
      blue_mask ^= std::uint32_t{1} << bit;
      for (Vertex u : graph.neighbors(f)) {
        if (state[u] == state[f]) (state[f] == 0 ? n00 : n11)++;
      }
    }
    const std::size_t key = key_of(n00, n11);
    ++total[key];
    for (std::uint32_t mask = blue_mask; mask != 0; mask &= mask - 1) {
      ++blue[free[std::countr_zero(mask)]][key];
    }
  }

  const double log_beta = params.beta > 0.0 ? std::log(params.beta) : kNegInf;
  const double log_gamma = params.gamma > 0.0 ? std::log(params.gamma) : kNegInf;

  ExactResult out;
  out.logZ = LogWeightedSum(total, stride, log_beta, log_gamma);
  out.Z = std::exp(out.logZ);
  out.marginals.assign(n, 0.0);
  out.log_blue_weight.assign(n, kNegInf);
  out.log_green_weight.assign(n, kNegInf);
  std::vector<std::uint64_t> green(total.size());
  for (Vertex v = 0; v < n; ++v) {
    if (pins.contains(v)) {
      const bool is_blue = pins.at(v) == Color::kBlue;
      out.marginals[v] = is_blue ? 1.0 : 0.0;
      (is_blue ? out.log_blue_weight[v] : out.log_green_weight[v]) = out.logZ;
      continue;
    }
    for (std::size_t i = 0; i < total.size(); ++i) green[i] = total[i] - blue[v][i];
    out.log_blue_weight[v] = LogWeightedSum(blue[v], stride, log_beta, log_gamma);
    out.log_green_weight[v] = LogWeightedSum(green, stride, log_beta, log_gamma);
    out.marginals[v] = out.logZ == kNegInf ? std::numeric_limits<double>::quiet_NaN()
                                           : std::exp(out.log_blue_weight[v] - out.logZ);
  }
  return out;
}

namespace {

struct TreeEvaluator {
  const SpinParams& params;
  SawWalker& walker;
  std::uint64_t budget;
  std::uint64_t expanded = 0;

  double factor(double r) const {
    if (std::isinf(r)) return params.beta;
    return (params.beta * r + 1.0) / (r + params.gamma);
  }

  double evaluate() {
    if (++expanded > budget) throw SizeError("SAW tree exceeds the node budget");
    std::vector<Vertex> free;
    int fixed_blue = 0;
    int fixed_green = 0;
    walker.classify(free, fixed_blue, fixed_green);
    double r = 1.0;
    for (int i = 0; i < fixed_blue; ++i) r *= params.beta;
    for (int i = 0; i < fixed_green; ++i) r /= params.gamma;
    for (Vertex u : free) {
      walker.push(u);
      const double child = evaluate();
      walker.pop();
      r *= factor(child);
    }
    return r;
  }
};

}  // namespace

ExtRatio ExactTreeR(const Graph& graph, const WalkNode& root, const PinSet& pins,
                    const SpinParams& params, std::uint64_t node_budget) {
  params.validate();
  if (!(params.gamma > 0.0)) throw InvalidInput("the tree recursion needs gamma > 0");
  if (root.status == NodeStatus::kPinnedBlue) return ExtRatio::Infinite();
  if (root.status == NodeStatus::kPinnedGreen) return ExtRatio::Zero();
  const auto dense = pins.dense(graph.vertex_count());
  SawWalker walker(graph, dense);
  walker.reset(root.path.front());
  for (std::size_t i = 1; i < root.path.size(); ++i) walker.push(root.path[i]);
  // Recursion depth is bounded by the walk length, at most n.
  TreeEvaluator eval{params, walker, node_budget};
  return ExtRatio::FromValue(eval.evaluate());
}

std::vector<int> BfsDistances(const Graph& graph, Vertex source) {
  std::vector<int> dist(graph.vertex_count(), -1);
  std::deque<Vertex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : graph.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

SsmResult SsmProbe(const Graph& graph, const SpinParams& params, Vertex v,
                   const PinSet& sigma, const PinSet& tau,
                   const std::vector<Vertex>& disagreement) {
  constexpr int kMaxSsmVertices = 20;
  if (graph.vertex_count() > kMaxSsmVertices) {
    throw SizeError("ssm probe limited to " + std::to_string(kMaxSsmVertices) + " vertices");
  }
  if (v < 0 || v >= graph.vertex_count()) throw InvalidQuery("probe vertex not in graph");
  if (sigma.size() != tau.size()) {
    throw ContractViolation("sigma and tau must pin the same vertex set");
  }
  for (const auto& [u, c] : sigma) {
    if (!tau.contains(u)) throw ContractViolation("sigma and tau must pin the same vertex set");
    const bool declared =
        std::find(disagreement.begin(), disagreement.end(), u) != disagreement.end();
    if (tau.at(u) != c && !declared) {
      throw ContractViolation("sigma and tau differ at vertex " + std::to_string(u) +
                              " outside the declared disagreement set");
    }
  }
  for (Vertex u : disagreement) {
    if (!sigma.contains(u)) throw ContractViolation("disagreement set must lie in the pinned set");
  }
  if (sigma.contains(v)) throw InvalidQuery("probe vertex is pinned");

  const ExactResult a = ExactPartition(graph, params, sigma);
  const ExactResult b = ExactPartition(graph, params, tau);
  SsmResult out;
  out.difference = std::abs(a.marginals[v] - b.marginals[v]);
  const auto dist = BfsDistances(graph, v);
  for (Vertex u : disagreement) {
    if (dist[u] >= 0 && (out.distance < 0 || dist[u] < out.distance)) out.distance = dist[u];
  }
  return out;
}

double FitSlope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

namespace {

double GapOf(ExtRatio lo, ExtRatio hi) {
  if (hi.is_infinite()) return std::numeric_limits<double>::infinity();
  return hi.value() - lo.value();
}

class PotentialChecker : public NodeObserver {
 public:
  PotentialChecker(const SpinParams& params, const ThresholdProfile& profile, double tol,
                   DecayLevel& level, std::vector<NodeRecord>* records)
      : params_(params), profile_(profile), tol_(tol), level_(level), records_(records) {}

  void OnNode(const NodeVisit& visit) override {
    const double eps = Epsilon(visit.lo, visit.hi);
    if (records_ != nullptr) {
      records_->push_back({visit.depth, visit.total_children(), visit.lo.value(),
                           GapOf(visit.lo, visit.hi), eps});
    }
    if (!visit.children_in_ball()) return;

    const double alpha = profile_.sup.alpha;
    const int M = profile_.M;
    const int j = CeilLog(static_cast<long long>(visit.total_children()) + 1, M);
    ++level_.nodes_checked;

    const double basis = M * std::pow(alpha, j - 1);
    level_.worst_basis_ratio = std::max(level_.worst_basis_ratio, eps / basis);
    if (eps > basis * (1.0 + tol_)) ++level_.basis_violations;

    if (visit.free_children > 0) {
      double child_max = 0.0;
      for (const auto& [lo, hi] : visit.children) child_max = std::max(child_max, Epsilon(lo, hi));
      const double step = std::pow(alpha, j) * child_max;
      ++level_.step_checks;
      // Gaps near the double-precision floor of the node values cannot be
      // compared meaningfully.
      constexpr double kAbsoluteFloor = 1e-12;
      if (step > 0.0) level_.worst_step_ratio = std::max(level_.worst_step_ratio, eps / step);
      if (eps > step * (1.0 + tol_) + kAbsoluteFloor) ++level_.step_violations;
    }
  }

 private:
  double Epsilon(ExtRatio lo, ExtRatio hi) const {
    return PotentialGap(lo.value(), hi.value(), params_.beta, profile_.threshold.D);
  }

  const SpinParams& params_;
  const ThresholdProfile& profile_;
  double tol_;
  DecayLevel& level_;
  std::vector<NodeRecord>* records_;
};

}  // namespace

DecayTrace DecayProfile(const Graph& graph, Vertex v, const PinSet& pins,
                        const SpinParams& params, const ThresholdProfile& profile,
                        const DecayOptions& options) {
  const double beta = params.beta;
  const double gamma = params.gamma;
  if (!(beta < 1.0) || !(beta * gamma < 1.0) || !(gamma > profile.threshold.Gamma)) {
    throw RegimeError("decay profile needs 0 <= beta < 1, beta*gamma < 1 and gamma > Gamma(beta)");
  }
  if (profile.beta != beta || profile.gamma != gamma) {
    throw InvalidInput("threshold profile was computed for different parameters");
  }
  if (options.L_min < 0 || options.L_max < options.L_min) {
    throw InvalidInput("decay range needs 0 <= L_min <= L_max");
  }
  pins.validate_for(graph);
  const WalkNode root = SawRoot(graph, v, pins);

  DecayTrace trace;
  trace.alpha = profile.sup.alpha;
  trace.M = profile.M;
  trace.D = profile.threshold.D;

  std::vector<double> xs;
  std::vector<double> ys;
  for (int L = options.L_min; L <= options.L_max; ++L) {
    DecayLevel level;
    level.L = L;
    std::vector<NodeRecord>* records =
        options.record_nodes && L == options.L_max ? &trace.nodes : nullptr;
    PotentialChecker checker(params, profile, options.relative_tolerance, level, records);
    const BoundInterval b = BoundPair(graph, root, pins, L, 0, profile.M, params, &checker);
    level.lo = b.lo;
    level.hi = b.hi;
    level.delta = GapOf(b.lo, b.hi);
    level.bound = 2.0 * profile.M * std::pow(profile.sup.alpha, L - 1);
    level.nodes_visited = b.nodes_visited;
    if (level.delta > 1e-12 && std::isfinite(level.delta)) {
      xs.push_back(L);
      ys.push_back(std::log(level.delta));
    }
    trace.levels.push_back(level);
  }
  trace.points_fitted = static_cast<int>(xs.size());
  if (xs.size() >= 2) trace.slope = FitSlope(xs, ys);
  return trace;
}

}  // namespace spindecay
