#include "spindecay/sawtree.hpp"

#include <string>

#include "spindecay/errors.hpp"

namespace spindecay {

WalkNode SawRoot(const Graph& graph, Vertex v, const PinSet& pins) {
  if (v < 0 || v >= graph.vertex_count()) {
    throw InvalidQuery("vertex " + std::to_string(v) + " is not in the graph");
  }
  if (pins.contains(v)) {
    throw InvalidQuery("vertex " + std::to_string(v) + " is pinned");
  }
  return WalkNode{{v}, NodeStatus::kFree};
}

ChildSet Expand(const WalkNode& node, const Graph& graph, const PinSet& pins) {
  if (node.status != NodeStatus::kFree) throw InvalidQuery("cannot expand a pinned node");
  const auto dense = pins.dense(graph.vertex_count());
  SawWalker walker(graph, dense);
  walker.reset(node.path.front());
  for (std::size_t i = 1; i < node.path.size(); ++i) walker.push(node.path[i]);

  std::vector<Vertex> free;
  ChildSet out;
  walker.classify(free, out.fixed_blue, out.fixed_green);
  out.free_children.reserve(free.size());
  for (Vertex u : free) {
    WalkNode child{node.path, NodeStatus::kFree};
    child.path.push_back(u);
    out.free_children.push_back(std::move(child));
  }
  return out;
}

SawWalker::SawWalker(const Graph& graph, const std::vector<std::int8_t>& dense_pins)
    : graph_(graph), pins_(dense_pins), position_(graph.vertex_count(), -1) {}

void SawWalker::reset(Vertex root) {
  for (Vertex v : path_) position_[v] = -1;
  path_.clear();
  push(root);
}

void SawWalker::push(Vertex v) {
  position_[v] = static_cast<int>(path_.size());
  path_.push_back(v);
}

void SawWalker::pop() {
  position_[path_.back()] = -1;
  path_.pop_back();
}

void SawWalker::classify(std::vector<Vertex>& free_out, int& fixed_blue,
                         int& fixed_green) const {
  fixed_blue = 0;
  fixed_green = 0;
  const Vertex tip = path_.back();
  const Vertex parent = path_.size() >= 2 ? path_[path_.size() - 2] : -1;
  for (Vertex u : graph_.neighbors(tip)) {
    if (u == parent) continue;
    const std::int8_t pin = pins_[u];
    if (pin != PinSet::kFree) {
      (pin == static_cast<std::int8_t>(Color::kBlue) ? fixed_blue : fixed_green)++;
      continue;
    }
    const int pos = position_[u];
    if (pos >= 0) {
      // Closes the cycle u -> path[pos + 1] -> ... -> tip -> u.
      const Vertex successor = path_[pos + 1];
      (successor > tip ? fixed_blue : fixed_green)++;
      continue;
    }
    free_out.push_back(u);
  }
}

}  // namespace spindecay
