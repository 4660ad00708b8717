#include "spindecay/estimator.hpp"

#include <cmath>
#include <vector>

#include "spindecay/errors.hpp"
#include "spindecay/thresholds.hpp"

namespace spindecay {

void DepthBudget::validate() const {
  if (L < 0) throw InvalidInput("depth budget L must be >= 0");
  if (M < 2) throw InvalidInput("branching base M must be >= 2");
}

ExtRatio EdgeFactor(ExtRatio r, const SpinParams& params) {
  const double beta = params.beta;
  const double gamma = params.gamma;
  if (r.is_zero()) return ExtRatio::FromLog(-std::log(gamma));
  if (r.is_infinite()) return beta == 0.0 ? ExtRatio::Zero() : ExtRatio::FromLog(std::log(beta));
  const double lr = r.log_value();
  if (lr > 0.0) {
    // (beta + 1/r) / (1 + gamma/r)
    const double inv = std::exp(-lr);
    return ExtRatio::FromLog(std::log(beta + inv) - std::log1p(gamma * inv));
  }
  const double rv = std::exp(lr);
  return ExtRatio::FromLog(std::log1p(beta * rv) - std::log(rv + gamma));
}

namespace {

// Product of edge factors in log domain with an explicit zero.
struct Product {
  double log = 0.0;
  bool zero = false;

  void multiply(ExtRatio factor) {
    if (factor.is_zero()) {
      zero = true;
    } else {
      log += factor.log_value();
    }
  }
  ExtRatio value() const { return zero ? ExtRatio::Zero() : ExtRatio::FromLog(log); }
};

struct Frame {
  int L;
  int child_L;
  int total_children;
  int fixed_blue;
  int fixed_green;
  std::size_t free_begin;
  std::size_t free_end;
  std::size_t next;
  std::size_t records_begin;
  Product lo;
  Product hi;
};

}  // namespace

BoundInterval BoundPair(const Graph& graph, const WalkNode& node, const PinSet& pins,
                        int L, int d_parent, int M, const SpinParams& params,
                        NodeObserver* observer) {
  if (M < 2) throw InvalidInput("branching base M must be >= 2");
  if (!(params.gamma > 0.0)) throw InvalidInput("the tree recursion needs gamma > 0");

  BoundInterval out;
  if (node.status == NodeStatus::kPinnedBlue) {
    out.lo = out.hi = ExtRatio::Infinite();
    return out;
  }
  if (node.status == NodeStatus::kPinnedGreen) {
    out.lo = out.hi = ExtRatio::Zero();
    return out;
  }
  if (L < 0) {
    out.lo = ExtRatio::Zero();
    out.hi = ExtRatio::Infinite();
    out.frontier_cutoffs = 1;
    return out;
  }

  const auto dense = pins.dense(graph.vertex_count());
  SawWalker walker(graph, dense);
  walker.reset(node.path.front());
  for (std::size_t i = 1; i < node.path.size(); ++i) walker.push(node.path[i]);
  const int base_depth = static_cast<int>(node.path.size()) - 1;

  const ExtRatio blue_factor = EdgeFactor(ExtRatio::Infinite(), params);
  const ExtRatio green_factor = EdgeFactor(ExtRatio::Zero(), params);

  std::vector<Vertex> free_buffer;
  std::vector<Frame> stack;
  std::vector<std::pair<ExtRatio, ExtRatio>> records;

  auto open = [&](int node_L, int parent_children) {
    Frame f{};
    f.L = node_L;
    f.child_L = node_L - CeilLog(static_cast<long long>(parent_children) + 1, M);
    f.free_begin = free_buffer.size();
    walker.classify(free_buffer, f.fixed_blue, f.fixed_green);
    f.free_end = free_buffer.size();
    f.next = f.free_begin;
    f.total_children =
        f.fixed_blue + f.fixed_green + static_cast<int>(f.free_end - f.free_begin);
    f.records_begin = records.size();
    for (int i = 0; i < f.fixed_blue; ++i) {
      f.lo.multiply(blue_factor);
      f.hi.multiply(blue_factor);
    }
    for (int i = 0; i < f.fixed_green; ++i) {
      f.lo.multiply(green_factor);
      f.hi.multiply(green_factor);
    }
    ++out.nodes_visited;
    stack.push_back(f);
  };

  open(L, d_parent);
  ExtRatio result_lo;
  ExtRatio result_hi;
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next < top.free_end) {
      const Vertex child = free_buffer[top.next++];
      if (top.child_L < 0) {
        // Outside the ball: R in [0, inf].
        ++out.frontier_cutoffs;
        top.lo.multiply(blue_factor);
        top.hi.multiply(green_factor);
        if (observer) records.emplace_back(ExtRatio::Zero(), ExtRatio::Infinite());
        continue;
      }
      walker.push(child);
      const int child_L = top.child_L;
      const int children = top.total_children;
      open(child_L, children);  // invalidates `top`
      continue;
    }

    const ExtRatio lo = top.lo.value();
    const ExtRatio hi = top.hi.value();
    if (observer) {
      NodeVisit visit;
      visit.depth = static_cast<int>(walker.path().size()) - 1 - base_depth;
      visit.L = top.L;
      visit.child_L = top.child_L;
      visit.fixed_blue = top.fixed_blue;
      visit.fixed_green = top.fixed_green;
      visit.free_children = static_cast<int>(top.free_end - top.free_begin);
      visit.lo = lo;
      visit.hi = hi;
      visit.children = std::span<const std::pair<ExtRatio, ExtRatio>>(
          records.data() + top.records_begin, records.size() - top.records_begin);
      observer->OnNode(visit);
      records.resize(top.records_begin);
    }
    free_buffer.resize(top.free_begin);
    stack.pop_back();
    if (stack.empty()) {
      result_lo = lo;
      result_hi = hi;
      break;
    }
    walker.pop();
    Frame& parent = stack.back();
    // The recursion is decreasing in each child ratio.
    parent.lo.multiply(EdgeFactor(hi, params));
    parent.hi.multiply(EdgeFactor(lo, params));
    if (observer) records.emplace_back(lo, hi);
  }
  out.lo = result_lo;
  out.hi = result_hi;
  return out;
}

ExtRatio BoundR(const Graph& graph, const WalkNode& node, const PinSet& pins, int L,
                int d_parent, bool lower, const DepthBudget& budget,
                const SpinParams& params) {
  const BoundInterval b = BoundPair(graph, node, pins, L, d_parent, budget.M, params);
  return lower ? b.lo : b.hi;
}

MarginalBounds ComputeMarginalBounds(const Graph& graph, Vertex v, const PinSet& pins,
                                     const DepthBudget& budget, const SpinParams& params) {
  budget.validate();
  pins.validate_for(graph);
  const WalkNode root = SawRoot(graph, v, pins);
  MarginalBounds out;
  out.ratio = BoundPair(graph, root, pins, budget.L, 0, budget.M, params);
  out.p_lo = out.ratio.lo.probability();
  out.p_hi = out.ratio.hi.probability();
  return out;
}

}  // namespace spindecay
