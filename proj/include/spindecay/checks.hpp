#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spindecay/graph.hpp"

namespace spindecay {

using Rng = std::mt19937_64;

Graph PathGraph(int n);
Graph CycleGraph(int n);
Graph CompleteGraph(int n);
Graph StarGraph(int leaves);  // center 0
// 2^(depth+1) - 1 vertices; vertex 0 is the root, children of i are 2i+1, 2i+2.
Graph CompleteBinaryTree(int depth);

// Random spanning tree with degrees capped at max_degree, plus up to
// extra_edges further random edges under the same cap. Vertex ids are
// shuffled so that they carry no structural information.
Graph RandomConnectedGraph(Rng& rng, int n, int max_degree, int extra_edges);

// Random tree; with `preferential` set, attachment probability grows with the
// current degree, which produces hubs.
Graph RandomTree(Rng& rng, int n, int max_degree, bool preferential);

// `count` distinct random vertices pinned to random colors.
PinSet RandomPins(Rng& rng, const Graph& graph, int count);

// n M^L, saturating at the largest representable uint64.
std::uint64_t WorkBound(int n, int M, int L);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20241017;
  // Smaller instance counts; the full suite is what the tests run.
  bool quick = false;
};

CriterionResult CheckThresholdNumbers(const AcceptanceOptions& options);       // 1
CriterionResult CheckCriticalCoincidence(const AcceptanceOptions& options);    // 2
CriterionResult CheckFixedPointIdentitySuite(const AcceptanceOptions& options);// 3
CriterionResult CheckWeitzEquivalence(const AcceptanceOptions& options);       // 4
CriterionResult CheckSandwichNesting(const AcceptanceOptions& options);        // 5
CriterionResult CheckDecayBound(const AcceptanceOptions& options);             // 6
CriterionResult CheckEndToEnd(const AcceptanceOptions& options);               // 7
CriterionResult CheckPerNodeDecay(const AcceptanceOptions& options);           // 8
CriterionResult CheckWorkBound(const AcceptanceOptions& options);              // 9

std::vector<CriterionResult> RunAcceptance(const AcceptanceOptions& options);

// "[PASS] 1 name: detail (1.23 s)"
std::string FormatResult(const CriterionResult& result);

}  // namespace spindecay
