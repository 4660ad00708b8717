#include <doctest.h>

#include <cmath>
#include <limits>

#include "spindecay/checks.hpp"
#include "spindecay/errors.hpp"
#include "spindecay/estimator.hpp"
#include "spindecay/oracle.hpp"
#include "spindecay/sawtree.hpp"
#include "spindecay/thresholds.hpp"

using namespace spindecay;

namespace {

struct RangeObserver : NodeObserver {
  int outside = 0;
  int checked = 0;
  void OnNode(const NodeVisit& visit) override {
    bool inner = visit.children_in_ball();
    if (!inner) return;
    ++checked;
    for (auto r : {visit.lo, visit.hi}) {
      if (!(r.is_finite() && r.value() <= 1.0 + 1e-15)) ++outside;
    }
  }
};

// The one-sided recursion written out literally, in linear arithmetic.
double NaiveBound(const Graph& g, const WalkNode& node, const PinSet& pins, int L, int d_parent,
                  bool lb, int M, const SpinParams& p) {
  const double inf = std::numeric_limits<double>::infinity();
  if (L < 0) return lb ? 0.0 : inf;
  const int next_L = L - CeilLog(d_parent + 1, M);
  const ChildSet c = Expand(node, g, pins);
  double r = 1.0;
  for (int i = 0; i < c.fixed_blue; ++i) r *= p.beta;
  for (int i = 0; i < c.fixed_green; ++i) r /= p.gamma;
  for (const auto& child : c.free_children) {
    const double x = NaiveBound(g, child, pins, next_L, c.total(), !lb, M, p);
    r *= std::isinf(x) ? p.beta : (p.beta * x + 1.0) / (x + p.gamma);
  }
  return r;
}

}  // namespace

TEST_CASE("edge factor") {
  const SpinParams p{0.0, 2.0};
  CHECK(EdgeFactor(ExtRatio::Zero(), p).value() == doctest::Approx(0.5));
  CHECK(EdgeFactor(ExtRatio::Infinite(), p).is_zero());
  CHECK(EdgeFactor(ExtRatio::One(), p).value() == doctest::Approx(1.0 / 3.0));
  CHECK(EdgeFactor(ExtRatio::Infinite(), {0.3, 2.0}).value() == doctest::Approx(0.3));
  // Large and tiny ratios stay accurate.
  CHECK(EdgeFactor(ExtRatio::FromLog(800.0), {0.3, 2.0}).value() == doctest::Approx(0.3));
  CHECK(EdgeFactor(ExtRatio::FromLog(-800.0), {0.3, 2.0}).value() == doctest::Approx(0.5));
  const double r = 0.7;
  CHECK(EdgeFactor(ExtRatio::FromValue(r), {0.4, 1.6}).value() ==
        doctest::Approx((0.4 * r + 1.0) / (r + 1.6)).epsilon(1e-14));
}

TEST_CASE("base cases") {
  const Graph p3 = PathGraph(3);
  const SpinParams params{0.0, 2.0};
  const DepthBudget budget{4, 2};
  WalkNode blue{{0}, NodeStatus::kPinnedBlue};
  WalkNode green{{0}, NodeStatus::kPinnedGreen};
  for (bool lb : {true, false}) {
    CHECK(BoundR(p3, blue, {}, 4, 0, lb, budget, params).is_infinite());
    CHECK(BoundR(p3, green, {}, 4, 0, lb, budget, params).is_zero());
  }
  const Graph single = ParseGraph("v 0");
  CHECK(BoundR(single, SawRoot(single, 0, {}), {}, 0, 0, true, budget, params) == ExtRatio::One());
  CHECK(BoundR(single, SawRoot(single, 0, {}), {}, 7, 0, false, budget, params) == ExtRatio::One());
  CHECK(BoundR(p3, SawRoot(p3, 1, {}), {}, -1, 0, true, budget, params).is_zero());
  CHECK(BoundR(p3, SawRoot(p3, 1, {}), {}, -1, 0, false, budget, params).is_infinite());
}

TEST_CASE("path center: both bounds give 1/9") {
  const Graph p3 = PathGraph(3);
  const SpinParams params{0.0, 2.0};
  const DepthBudget budget{4, 2};
  const WalkNode root = SawRoot(p3, 1, {});
  for (bool lb : {true, false}) {
    CHECK(BoundR(p3, root, {}, 4, 0, lb, budget, params).value() ==
          doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  }
  const MarginalBounds m = ComputeMarginalBounds(p3, 1, {}, budget, params);
  CHECK(m.p_lo == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m.p_hi == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m.ratio.exact());
}

TEST_CASE("isolated vertex gives one half") {
  const Graph g = ParseGraph("v 3\n0 1");
  for (SpinParams params : {SpinParams{0.0, 2.0}, SpinParams{0.7, 0.2}}) {
    const MarginalBounds m = ComputeMarginalBounds(g, g.find_label(3), {}, {0, 2}, params);
    CHECK(m.p_lo == 0.5);
    CHECK(m.p_hi == 0.5);
  }
}

TEST_CASE("high-degree root at L = 0 gives valid but wide bounds") {
  // Root with 10 children, each with one further leaf. At L = 0 the children
  // are evaluated and every grandchild is replaced by the trivial bound.
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (int i = 1; i <= 10; ++i) {
    edges.emplace_back(0, i);
    edges.emplace_back(i, 10 + i);
  }
  const Graph spider = Graph::FromEdges(21, edges);
  const SpinParams params{0.3, 2.0};
  const MarginalBounds m = ComputeMarginalBounds(spider, 0, {}, {0, 2}, params);
  CHECK(m.ratio.frontier_cutoffs == 10);
  CHECK_FALSE(m.ratio.exact());
  const double p = ExactPartition(spider, params).marginals[0];
  CHECK(m.p_lo <= p);
  CHECK(p <= m.p_hi);
  CHECK(m.p_lo < m.p_hi);
  // Children lie in [beta, 1/gamma] = [0.3, 0.5].
  CHECK(m.ratio.lo.value() == doctest::Approx(std::pow(1.15 / 2.5, 10)).epsilon(1e-12));
  CHECK(m.ratio.hi.value() == doctest::Approx(std::pow(1.09 / 2.3, 10)).epsilon(1e-12));
}

TEST_CASE("budget validation") {
  CHECK_THROWS_AS(ComputeMarginalBounds(PathGraph(3), 0, {}, {-1, 2}, {0.0, 2.0}), InvalidInput);
  CHECK_THROWS_AS(ComputeMarginalBounds(PathGraph(3), 0, {}, {3, 1}, {0.0, 2.0}), InvalidInput);
  CHECK_THROWS_AS(ComputeMarginalBounds(PathGraph(3), 0, PinSet{{0, Color::kBlue}}, {3, 2}, {0.0, 2.0}),
                  InvalidQuery);
  CHECK_THROWS_AS(ComputeMarginalBounds(PathGraph(3), 0, {}, {3, 2}, {0.5, 0.0}), InvalidInput);
}

TEST_CASE("fixed children count toward the depth charge") {
  // Vertex 0 has one free child (1, with leaf 4 below it) and two pinned
  // neighbors: three children, so with M = 2 vertex 4 sits at M-based depth
  // ceil(log_2 4) = 2. Counting free children only would put it at depth 1.
  const Graph g = ParseGraph("0 1\n0 2\n0 3\n1 4");
  const PinSet pins{{2, Color::kGreen}, {3, Color::kGreen}};
  const SpinParams params{0.0, 2.0};
  const WalkNode root = SawRoot(g, 0, pins);
  CHECK_FALSE(BoundPair(g, root, pins, 1, 0, 2, params).exact());
  const BoundInterval b = BoundPair(g, root, pins, 2, 0, 2, params);
  CHECK(b.exact());
  CHECK(b.lo.value() == doctest::Approx(3.0 / 28.0).epsilon(1e-14));
}

TEST_CASE("sandwich, nesting and exactness against the oracle") {
  Rng rng(31);
  const SpinParams sets[] = {{0.0, 2.0}, {0.2, 1.5}, {0.6, 0.6}, {0.0, 1.05}};
  for (int i = 0; i < 60; ++i) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const Graph g = RandomConnectedGraph(rng, n, 4, n);
    const SpinParams params = sets[i % 4];
    const int M = 2 + static_cast<int>(rng() % 4);
    const PinSet pins = RandomPins(rng, g, static_cast<int>(rng() % 3));
    const ExactResult exact = ExactPartition(g, params, pins);
    if (std::isinf(exact.logZ)) continue;
    for (Vertex v = 0; v < n; ++v) {
      if (pins.contains(v)) continue;
      const double R = exact.ratio(v).value();
      const WalkNode root = SawRoot(g, v, pins);
      ExtRatio lo_prev = ExtRatio::Zero(), hi_prev = ExtRatio::Infinite();
      for (int L = 0; L <= 8; ++L) {
        const BoundInterval b = BoundPair(g, root, pins, L, 0, M, params);
        CHECK(b.lo <= b.hi);
        CHECK(b.lo.value() <= R * (1 + 1e-10) + 1e-15);
        CHECK(b.hi.value() >= R * (1 - 1e-10) - 1e-15);
        CHECK(b.lo.value() >= lo_prev.value() * (1 - 1e-12));
        CHECK(b.hi.value() <= hi_prev.value() * (1 + 1e-12));
        if (b.exact()) {
          CHECK(b.lo == b.hi);
          CHECK(std::abs(b.lo.value() - R) <= 1e-12 * std::max(1.0, R));
        }
        lo_prev = b.lo;
        hi_prev = b.hi;
      }
    }
  }
}

TEST_CASE("single traversal matches the alternating one-sided recursion") {
  Rng rng(33);
  const SpinParams sets[] = {{0.1, 1.8}, {0.0, 2.0}, {0.5, 0.9}};
  for (int i = 0; i < 30; ++i) {
    const Graph g = RandomConnectedGraph(rng, 9, 4, 8);
    const SpinParams params = sets[i % 3];
    const PinSet pins = RandomPins(rng, g, static_cast<int>(rng() % 3));
    Vertex v = 0;
    while (pins.contains(v)) ++v;
    const WalkNode root = SawRoot(g, v, pins);
    const int M = 2 + i % 3;
    for (int L = 0; L <= 6; ++L) {
      const BoundInterval b = BoundPair(g, root, pins, L, 0, M, params);
      for (bool lb : {true, false}) {
        const double naive = NaiveBound(g, root, pins, L, 0, lb, M, params);
        const double fast = (lb ? b.lo : b.hi).value();
        if (std::isinf(naive)) {
          CHECK(std::isinf(fast));
        } else {
          CHECK(fast == doctest::Approx(naive).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("decay and work bounds in the guaranteed regime") {
  const ThresholdProfile profile = MakeProfile(0.0, 2.0);
  const SpinParams params{0.0, 2.0};
  Rng rng(35);
  for (int i = 0; i < 15; ++i) {
    const int n = 4 + static_cast<int>(rng() % 10);
    const Graph g = RandomConnectedGraph(rng, n, 5, n);
    const WalkNode root = SawRoot(g, 0, {});
    for (int L = 0; L <= 7; ++L) {
      for (int M : {2, profile.M}) {
        const BoundInterval b = BoundPair(g, root, {}, L, 0, M, params);
        CHECK(b.nodes_visited <= WorkBound(n, M, L));
      }
      const BoundInterval b = BoundPair(g, root, {}, L, 0, profile.M, params);
      CHECK(b.hi.value() - b.lo.value() <= 2.0 * profile.M * std::pow(profile.sup.alpha, L - 1));
    }
  }
}

TEST_CASE("node values stay in (0, 1] inside the ball") {
  Rng rng(37);
  for (int i = 0; i < 15; ++i) {
    const Graph g = RandomConnectedGraph(rng, 11, 5, 10);
    RangeObserver obs;
    BoundPair(g, SawRoot(g, 0, {}), {}, 6, 0, 3, {0.2, 1.7}, &obs);
    CHECK(obs.checked > 0);
    CHECK(obs.outside == 0);
  }
}

TEST_CASE("deep walks do not exhaust the call stack") {
  const int n = 200000;
  const Graph path = PathGraph(n);
  const BoundInterval b = BoundPair(path, SawRoot(path, 0, {}), {}, n + 5, 0, 2, {0.0, 2.0});
  CHECK(b.exact());
  CHECK(b.nodes_visited == static_cast<std::uint64_t>(n));
  CHECK(b.lo.is_finite());
}

TEST_CASE("long products stay representable") {
  const Graph star = StarGraph(5000);
  const BoundInterval b = BoundPair(star, SawRoot(star, 0, {}), {}, 3, 0, 5000, {0.0, 2.0});
  REQUIRE(b.exact());
  CHECK(b.lo.is_finite());
  CHECK(b.lo.log_value() == doctest::Approx(-5000.0 * std::log(3.0)).epsilon(1e-12));
  CHECK(b.lo.probability() == 0.0);
  CHECK(b.lo.complement_probability() == 1.0);
}
