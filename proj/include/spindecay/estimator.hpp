#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "spindecay/ext_ratio.hpp"
#include "spindecay/graph.hpp"
#include "spindecay/sawtree.hpp"

namespace spindecay {

// Truncation of the SAW tree to the M-based closed ball B*_M(L): a node with
// d children charges ceil(log_M(d + 1)) levels of budget to each child.
struct DepthBudget {
  int L = 0;
  int M = 2;

  void validate() const;  // throws InvalidInput unless L >= 0 and M >= 2
};

// Lower and upper bounds for R at one tree node.
struct BoundInterval {
  ExtRatio lo;
  ExtRatio hi;
  // Free nodes whose children were examined; all of them lie in B*_M(L).
  std::uint64_t nodes_visited = 0;
  // Free nodes replaced by the trivial bounds [0, inf] at the frontier.
  std::uint64_t frontier_cutoffs = 0;

  // The whole SAW tree fit in the ball, so lo == hi is the exact ratio.
  bool exact() const { return frontier_cutoffs == 0; }
};

// (beta r + 1) / (r + gamma), with r = 0 giving 1/gamma and r = inf giving
// beta. Requires gamma > 0.
ExtRatio EdgeFactor(ExtRatio r, const SpinParams& params);

// One finished free node, reported in post-order by BoundPair.
struct NodeVisit {
  int depth = 0;       // walk length from the root
  int L = 0;           // budget this node was evaluated with
  int child_L = 0;     // budget handed to its children (< 0: trivial bounds)
  int fixed_blue = 0;  // d1
  int fixed_green = 0; // d0
  int free_children = 0;
  ExtRatio lo;
  ExtRatio hi;
  // (lo, hi) of each free child, in child order.
  std::span<const std::pair<ExtRatio, ExtRatio>> children;

  int total_children() const { return fixed_blue + fixed_green + free_children; }
  bool children_in_ball() const { return child_L >= 0; }
};

class NodeObserver {
 public:
  virtual ~NodeObserver() = default;
  virtual void OnNode(const NodeVisit& visit) = 0;
};

// Evaluates both sides of the truncated recursion in a single traversal:
// lo(v) = prod f(hi(child)), hi(v) = prod f(lo(child)). Equivalent to running
// the lower- and upper-bound recursions separately. Iterative; the native
// call stack does not grow with tree depth.
BoundInterval BoundPair(const Graph& graph, const WalkNode& node, const PinSet& pins,
                        int L, int d_parent, int M, const SpinParams& params,
                        NodeObserver* observer = nullptr);

// One side of the truncated recursion: the lower bound when `lower` is set.
// Pinned nodes return inf (blue) or 0 (green); L < 0 returns the trivial bound.
ExtRatio BoundR(const Graph& graph, const WalkNode& node, const PinSet& pins, int L,
                int d_parent, bool lower, const DepthBudget& budget,
                const SpinParams& params);

struct MarginalBounds {
  double p_lo = 0.0;
  double p_hi = 1.0;
  BoundInterval ratio;
};

// Certified bracket for the probability that v is blue given the pins.
// Throws InvalidQuery if v is pinned.
MarginalBounds ComputeMarginalBounds(const Graph& graph, Vertex v, const PinSet& pins,
                                     const DepthBudget& budget, const SpinParams& params);

}  // namespace spindecay
