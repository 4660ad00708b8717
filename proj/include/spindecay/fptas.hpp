#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spindecay/estimator.hpp"
#include "spindecay/graph.hpp"
#include "spindecay/thresholds.hpp"

namespace spindecay {

inline constexpr double kDefaultBudgetSlack = 8.0;

// L = ceil(ln(slack M n / eps) / ln(1/alpha)) + 1. With the default slack of
// 8 each step's absolute error stays below eps / (4n), which keeps the
// telescoped product within a factor 1 +- eps because every factor 1 - p
// exceeds 1/2.
int ChooseBudget(int n, double epsilon, double alpha, int M,
                 double slack = kDefaultBudgetSlack);

struct EstimateRequest {
  Graph graph;
  SpinParams params;
  double epsilon = 0.05;
  // Any override voids the accuracy contract.
  std::optional<int> L;
  std::optional<int> M;
  std::optional<double> alpha;
  // Permit runs outside the guaranteed regime (requires beta * gamma < 1 and
  // explicit M plus alpha or L).
  bool force = false;
  int threads = 1;
  double slack = kDefaultBudgetSlack;
};

// Parameters after regime classification and budget selection. The working
// parameters have the colors swapped when that moves the run into the
// guaranteed regime, so that gamma >= beta.
struct ResolvedBudget {
  SpinParams working;
  RegimeReport regime;
  std::optional<ThresholdProfile> profile;  // present in the guaranteed regime
  double alpha = 0.0;                       // 0 when L was given directly
  int L = 0;
  int M = 2;
  bool certified = false;
  bool forced = false;
};

// Throws DegenerateError for degenerate parameters and RegimeError when the
// run is neither guaranteed nor properly forced.
ResolvedBudget ResolveBudget(const EstimateRequest& req, int n);

// One telescoping factor: v with every earlier vertex of the run pinned green
// (in working colors).
struct TelescopeStep {
  Vertex vertex = 0;
  double p_lo = 0.0;
  double p_hi = 1.0;
  double log_one_minus_p = 0.0;  // ln(1 - midpoint)
  std::uint64_t nodes_visited = 0;
  bool exact = false;
};

struct PartitionEstimate {
  double logZ = 0.0;
  std::optional<double> Z;  // empty when exp(logZ) is not representable
  std::vector<TelescopeStep> steps;
  ResolvedBudget budget;
  std::uint64_t nodes_visited = 0;
  // Largest per-step count, to compare against n M^L.
  std::uint64_t max_step_nodes = 0;
};

PartitionEstimate EstimatePartition(const EstimateRequest& req);

// Certified bracket for P(v blue | pins) in the caller's colors, using the
// same budget as EstimatePartition.
MarginalBounds Marginal(const EstimateRequest& req, Vertex v, const PinSet& pins);

}  // namespace spindecay
