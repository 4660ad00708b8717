#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spindecay {

using Vertex = int;

// Simple undirected graph over vertices 0..n-1. Neighbor lists are sorted
// ascending; that order is the vertex order used for cycle-closing leaves in
// the self-avoiding-walk tree. Each vertex remembers the numeric id it had in
// the input file.
class Graph {
 public:
  Graph() = default;

  // Builds a graph on n vertices; throws InvalidInput on self-loops,
  // duplicate edges or out-of-range endpoints.
  static Graph FromEdges(int n, std::span<const std::pair<Vertex, Vertex>> edges);
  static Graph FromEdges(int n, std::span<const std::pair<Vertex, Vertex>> edges,
                         std::vector<std::int64_t> labels);

  int vertex_count() const { return static_cast<int>(adjacency_.size()); }
  int edge_count() const { return edge_count_; }
  int degree(Vertex v) const { return static_cast<int>(adjacency_[v].size()); }
  int max_degree() const;

  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }
  bool has_edge(Vertex u, Vertex v) const;

  // Edges as (u, v) with u < v, sorted lexicographically.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  std::int64_t label(Vertex v) const { return labels_[v]; }
  const std::vector<std::int64_t>& labels() const { return labels_; }
  // Internal index for an input id, or -1.
  Vertex find_label(std::int64_t label) const;

  // Connected components, each listed in ascending vertex order; components
  // are ordered by their smallest vertex.
  std::vector<std::vector<Vertex>> components() const;

  // Subgraph induced by `vertices` (which must be ascending); vertex i of the
  // result is vertices[i] and keeps its input label.
  Graph induced(std::span<const Vertex> vertices) const;

  // Disjoint union; the vertices of `other` follow this graph's vertices.
  Graph disjoint_union(const Graph& other) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::int64_t> labels_;
  int edge_count_ = 0;
};

// Reads the edge-list format: one "u v" pair per line, '#' comments, and
// "v <id>" lines declaring isolated vertices. Ids are compacted to 0..n-1 in
// ascending numeric order. Throws ParseError naming the offending line.
Graph ParseGraph(std::string_view text);
Graph LoadGraph(const std::string& path);

// Inverse of ParseGraph on canonical graphs (original labels are emitted).
std::string SerializeGraph(const Graph& graph);

// Interaction matrix [[beta, 1], [1, gamma]].
struct SpinParams {
  double beta = 0.0;
  double gamma = 1.0;

  void validate() const;  // throws InvalidInput on negative entries
  friend bool operator==(const SpinParams&, const SpinParams&) = default;
};

// Blue is spin 0 (self-interaction beta), green is spin 1 (gamma).
enum class Color : std::uint8_t { kBlue = 0, kGreen = 1 };

inline Color Flip(Color c) {
  return c == Color::kBlue ? Color::kGreen : Color::kBlue;
}
const char* ColorName(Color c);
Color ParseColor(std::string_view name);

// Partial configuration on a set of pinned vertices.
class PinSet {
 public:
  static constexpr std::int8_t kFree = -1;

  PinSet() = default;
  PinSet(std::initializer_list<std::pair<const Vertex, Color>> pins)
      : pins_(pins) {}

  void pin(Vertex v, Color c) { pins_[v] = c; }
  void unpin(Vertex v) { pins_.erase(v); }
  bool contains(Vertex v) const { return pins_.count(v) != 0; }
  Color at(Vertex v) const { return pins_.at(v); }
  bool empty() const { return pins_.empty(); }
  std::size_t size() const { return pins_.size(); }

  auto begin() const { return pins_.begin(); }
  auto end() const { return pins_.end(); }

  // Throws InvalidQuery if a pinned vertex is not a vertex of the graph.
  void validate_for(const Graph& graph) const;

  // Dense per-vertex lookup: kFree or the Color value.
  std::vector<std::int8_t> dense(int n) const;

  friend bool operator==(const PinSet&, const PinSet&) = default;

 private:
  std::map<Vertex, Color> pins_;
};

enum class Regime {
  kGuaranteed,
  kGuaranteedAfterSwap,
  kUnguaranteed,
  kDegenerate,
};

const char* RegimeName(Regime regime);

struct RegimeReport {
  Regime regime = Regime::kUnguaranteed;
  bool swap_applied = false;
  // Uniqueness threshold the decision was made against (Gamma of the smaller
  // parameter); NaN when no threshold applies.
  double threshold_used = 0.0;
};

// Margin above Gamma(beta) required before a point is called guaranteed; it
// absorbs the root-finding tolerance of the threshold computation.
inline constexpr double kRegimeMargin = 1e-9;

RegimeReport ClassifyRegime(const SpinParams& params);

// Exchanges the roles of blue and green. Z is invariant; marginals p -> 1-p.
std::pair<SpinParams, PinSet> SwapColors(const SpinParams& params,
                                         const PinSet& pins);

}  // namespace spindecay
