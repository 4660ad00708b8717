#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spindecay/estimator.hpp"
#include "spindecay/ext_ratio.hpp"
#include "spindecay/graph.hpp"
#include "spindecay/sawtree.hpp"
#include "spindecay/thresholds.hpp"

namespace spindecay {

// Ground truth by enumeration of all configurations of the free vertices.
struct ExactResult {
  double logZ = 0.0;  // -inf when every configuration has weight 0
  double Z = 0.0;     // exp(logZ); inf if not representable
  // Probability that each vertex is blue (pinned vertices: 0 or 1).
  std::vector<double> marginals;
  // ln of the blue / green restricted sums for each vertex.
  std::vector<double> log_blue_weight;
  std::vector<double> log_green_weight;

  // R = W_blue / W_green for vertex v, with explicit zero and infinity.
  ExtRatio ratio(Vertex v) const;
};

inline constexpr int kMaxEnumerationVertices = 26;

// Sum over all 2^(free vertices) configurations in Gray-code order. Throws
// SizeError beyond kMaxEnumerationVertices free vertices.
ExactResult ExactPartition(const Graph& graph, const SpinParams& params,
                           const PinSet& pins = {});

// Untruncated recursion over the full SAW tree from `root`. Throws SizeError
// once more than `node_budget` free nodes have been expanded.
ExtRatio ExactTreeR(const Graph& graph, const WalkNode& root, const PinSet& pins,
                    const SpinParams& params, std::uint64_t node_budget = 50'000'000);

// Strong-spatial-mixing probe: |p_v^sigma - p_v^tau| for two boundary
// conditions on the same pinned set that disagree only on `disagreement`.
struct SsmResult {
  double difference = 0.0;
  // Graph distance from v to the disagreement set (-1 if unreachable or the
  // set is empty).
  int distance = -1;
};
SsmResult SsmProbe(const Graph& graph, const SpinParams& params, Vertex v,
                   const PinSet& sigma, const PinSet& tau,
                   const std::vector<Vertex>& disagreement);

std::vector<int> BfsDistances(const Graph& graph, Vertex source);

struct DecayLevel {
  int L = 0;
  ExtRatio lo;
  ExtRatio hi;
  double delta = 0.0;          // hi - lo
  double bound = 0.0;          // 2 M alpha^(L-1)
  std::uint64_t nodes_visited = 0;
  // Per-node potential checks over the nodes of B_M(L).
  std::uint64_t nodes_checked = 0;
  std::uint64_t basis_violations = 0;
  std::uint64_t step_checks = 0;
  std::uint64_t step_violations = 0;
  double worst_basis_ratio = 0.0;  // max eps_v / (M alpha^(j-1))
  double worst_step_ratio = 0.0;   // max eps_v / (alpha^j max eps_child)
};

struct NodeRecord {
  int depth = 0;
  int children = 0;  // d0 + d1 + d
  double R = 0.0;    // lower bound at the node
  double delta = 0.0;
  double epsilon = 0.0;  // phi(R + delta) - phi(R)
};

struct DecayTrace {
  std::vector<DecayLevel> levels;
  // Least-squares slope of ln(delta) against L over levels with delta > 1e-12;
  // nullopt when fewer than two such levels exist.
  std::optional<double> slope;
  int points_fitted = 0;
  // Per-node records at the largest L of the range (when requested).
  std::vector<NodeRecord> nodes;
  double alpha = 0.0;
  int M = 2;
  double D = 0.0;
};

struct DecayOptions {
  int L_min = 0;
  int L_max = 10;
  bool record_nodes = false;
  double relative_tolerance = 1e-9;
};

// Runs the truncated estimator at each L and measures the decay of the root
// gap against 2 M alpha^(L-1), together with the per-node potential
// inequalities. Throws RegimeError outside the guaranteed regime.
DecayTrace DecayProfile(const Graph& graph, Vertex v, const PinSet& pins,
                        const SpinParams& params, const ThresholdProfile& profile,
                        const DecayOptions& options);

// Least-squares slope of ys against xs.
double FitSlope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace spindecay
