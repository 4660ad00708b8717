#pragma once

#include <cstdint>
#include <vector>

#include "spindecay/graph.hpp"

namespace spindecay {

// Lazily expanded self-avoiding-walk tree T_SAW(G, v). A tree node is a walk
// from the root; only the walk currently being explored is ever held.

enum class NodeStatus : std::uint8_t { kFree, kPinnedBlue, kPinnedGreen };

struct WalkNode {
  std::vector<Vertex> path;  // path.front() is the root, path.back() the tip
  NodeStatus status = NodeStatus::kFree;

  Vertex tip() const { return path.back(); }
  friend bool operator==(const WalkNode&, const WalkNode&) = default;
};

struct ChildSet {
  std::vector<WalkNode> free_children;  // ascending by tip vertex
  int fixed_blue = 0;                   // d1
  int fixed_green = 0;                  // d0

  int total() const {
    return fixed_blue + fixed_green + static_cast<int>(free_children.size());
  }
  friend bool operator==(const ChildSet&, const ChildSet&) = default;
};

// Throws InvalidQuery if v is pinned or not a vertex of the graph.
WalkNode SawRoot(const Graph& graph, Vertex v, const PinSet& pins);

// Children of a free node. A neighbor in the pin set is fixed to its pinned
// color (pins take precedence over cycle closing); a neighbor already on the
// walk closes a cycle u -> w1 -> ... -> tip -> u and is fixed blue when
// w1 > tip, green otherwise; every other neighbor extends the walk.
ChildSet Expand(const WalkNode& node, const Graph& graph, const PinSet& pins);

// Incremental walker used by the recursions: keeps the current walk and an
// on-path bitmap so that cycle detection is O(1) per neighbor.
class SawWalker {
 public:
  SawWalker(const Graph& graph, const std::vector<std::int8_t>& dense_pins);

  void reset(Vertex root);
  void push(Vertex v);
  void pop();

  const std::vector<Vertex>& path() const { return path_; }
  Vertex tip() const { return path_.back(); }

  // Classifies the current tip's children; free children are appended to
  // `free_out` in ascending order.
  void classify(std::vector<Vertex>& free_out, int& fixed_blue, int& fixed_green) const;

 private:
  const Graph& graph_;
  const std::vector<std::int8_t>& pins_;
  std::vector<Vertex> path_;
  // Position of each vertex on the current walk, or -1.
  std::vector<int> position_;
};

}  // namespace spindecay
