#include "spindecay/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "spindecay/errors.hpp"
#include "spindecay/thresholds.hpp"

namespace spindecay {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
      return "parse-error";
    case ErrorKind::kInvalidInput:
      return "invalid-input";
    case ErrorKind::kInvalidQuery:
      return "invalid-query";
    case ErrorKind::kRegime:
      return "regime-error";
    case ErrorKind::kDegenerate:
      return "degenerate-error";
    case ErrorKind::kNumericFailure:
      return "numeric-failure";
    case ErrorKind::kSize:
      return "size-error";
    case ErrorKind::kContractViolation:
      return "contract-violation";
  }
  return "error";
}

Graph Graph::FromEdges(int n, std::span<const std::pair<Vertex, Vertex>> edges) {
  std::vector<std::int64_t> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  return FromEdges(n, edges, std::move(labels));
}

Graph Graph::FromEdges(int n, std::span<const std::pair<Vertex, Vertex>> edges,
                       std::vector<std::int64_t> labels) {
  if (n < 0) throw InvalidInput("negative vertex count");
  if (static_cast<int>(labels.size()) != n) {
    throw InvalidInput("label count does not match vertex count");
  }
  Graph g;
  g.adjacency_.assign(n, {});
  g.labels_ = std::move(labels);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InvalidInput("edge endpoint out of range");
    }
    if (u == v) throw InvalidInput("self-loop at vertex " + std::to_string(u));
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (int v = 0; v < n; ++v) {
    auto& adj = g.adjacency_[v];
    std::sort(adj.begin(), adj.end());
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end()) {
      throw InvalidInput("duplicate edge at vertex " + std::to_string(v));
    }
  }
  g.edge_count_ = static_cast<int>(edges.size());
  return g;
}

int Graph::max_degree() const {
  int best = 0;
  for (const auto& adj : adjacency_) best = std::max(best, static_cast<int>(adj.size()));
  return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto& adj = adjacency_[u];
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count_);
  for (Vertex u = 0; u < vertex_count(); ++u) {
    for (Vertex v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Vertex Graph::find_label(std::int64_t label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it != labels_.end() && *it == label) return static_cast<Vertex>(it - labels_.begin());
  // Labels are ascending for parsed graphs, but not necessarily for ones
  // assembled by hand.
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<Vertex>(i);
  }
  return -1;
}

std::vector<std::vector<Vertex>> Graph::components() const {
  const int n = vertex_count();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      out[id].push_back(u);
      for (Vertex w : adjacency_[u]) {
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

Graph Graph::induced(std::span<const Vertex> vertices) const {
  std::vector<int> index(vertex_count(), -1);
  std::vector<std::int64_t> labels;
  labels.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    index[vertices[i]] = static_cast<int>(i);
    labels.push_back(labels_[vertices[i]]);
  }
  std::vector<std::pair<Vertex, Vertex>> sub;
  for (Vertex u : vertices) {
    for (Vertex w : adjacency_[u]) {
      if (u < w && index[w] >= 0) sub.emplace_back(index[u], index[w]);
    }
  }
  return FromEdges(static_cast<int>(vertices.size()), sub, std::move(labels));
}

Graph Graph::disjoint_union(const Graph& other) const {
  const int n = vertex_count();
  auto all = edges();
  for (auto [u, v] : other.edges()) all.emplace_back(u + n, v + n);
  std::vector<std::int64_t> labels = labels_;
  const std::int64_t offset =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  for (auto l : other.labels_) labels.push_back(l + offset);
  return FromEdges(n + other.vertex_count(), all, std::move(labels));
}

namespace {

bool ParseId(std::string_view token, std::int64_t& out) {
  if (token.empty() || token.front() == '-' || token.front() == '+') return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

Graph ParseGraph(std::string_view text) {
  std::set<std::int64_t> ids;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tokens = Tokenize(line);
    if (tokens.empty() || tokens.front().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (tokens.size() != 2) throw ParseError(line_no, "expected two fields");
    std::int64_t a = 0;
    std::int64_t b = 0;
    if (tokens[0] == "v") {
      if (!ParseId(tokens[1], a)) throw ParseError(line_no, "malformed vertex id");
      ids.insert(a);
    } else {
      if (!ParseId(tokens[0], a) || !ParseId(tokens[1], b)) {
        throw ParseError(line_no, "malformed edge");
      }
      if (a == b) throw ParseError(line_no, "self-loop at vertex " + std::to_string(a));
      auto key = std::minmax(a, b);
      if (!seen.insert(key).second) {
        throw ParseError(line_no, "duplicate edge " + std::to_string(a) + " " +
                                      std::to_string(b));
      }
      ids.insert(a);
      ids.insert(b);
      raw_edges.emplace_back(a, b);
    }
    if (end == text.size()) break;
  }

  std::vector<std::int64_t> labels(ids.begin(), ids.end());
  auto index_of = [&](std::int64_t id) {
    return static_cast<Vertex>(std::lower_bound(labels.begin(), labels.end(), id) -
                               labels.begin());
  };
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(raw_edges.size());
  for (auto [a, b] : raw_edges) edges.emplace_back(index_of(a), index_of(b));
  const int n = static_cast<int>(labels.size());
  return Graph::FromEdges(n, edges, std::move(labels));
}

Graph LoadGraph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseGraph(buf.str());
}

std::string SerializeGraph(const Graph& graph) {
  std::ostringstream out;
  for (Vertex v = 0; v < graph.vertex_count(); ++v) {
    if (graph.degree(v) == 0) out << "v " << graph.label(v) << '\n';
  }
  for (auto [u, v] : graph.edges()) out << graph.label(u) << ' ' << graph.label(v) << '\n';
  return out.str();
}

void SpinParams::validate() const {
  if (!(beta >= 0.0) || !(gamma >= 0.0) || std::isinf(beta) || std::isinf(gamma)) {
    throw InvalidInput("beta and gamma must be finite and nonnegative");
  }
}

const char* ColorName(Color c) { return c == Color::kBlue ? "blue" : "green"; }

Color ParseColor(std::string_view name) {
  if (name == "blue" || name == "0") return Color::kBlue;
  if (name == "green" || name == "1") return Color::kGreen;
  throw InvalidInput("unknown color '" + std::string(name) + "'");
}

void PinSet::validate_for(const Graph& graph) const {
  for (const auto& [v, c] : pins_) {
    if (v < 0 || v >= graph.vertex_count()) {
      throw InvalidQuery("pinned vertex " + std::to_string(v) + " is not in the graph");
    }
  }
}

std::vector<std::int8_t> PinSet::dense(int n) const {
  std::vector<std::int8_t> out(n, kFree);
  for (const auto& [v, c] : pins_) {
    if (v >= 0 && v < n) out[v] = static_cast<std::int8_t>(c);
  }
  return out;
}

const char* RegimeName(Regime regime) {
  switch (regime) {
    case Regime::kGuaranteed:
      return "guaranteed";
    case Regime::kGuaranteedAfterSwap:
      return "guaranteed-after-swap";
    case Regime::kUnguaranteed:
      return "unguaranteed";
    case Regime::kDegenerate:
      return "degenerate";
  }
  return "unknown";
}

namespace {

// 0 <= small < 1, small * large < 1 and large above Gamma(small).
bool AboveThreshold(double small, double large, double& threshold) {
  if (!(small < 1.0) || !(small * large < 1.0) || !(large > 1.0)) return false;
  threshold = BigGamma(small).Gamma;
  return large >= threshold + kRegimeMargin;
}

}  // namespace

RegimeReport ClassifyRegime(const SpinParams& params) {
  params.validate();
  const double b = params.beta;
  const double g = params.gamma;
  RegimeReport report;
  report.threshold_used = std::numeric_limits<double>::quiet_NaN();

  if ((b == 0.0 && g == 0.0) || std::abs(b * g - 1.0) <= 1e-12) {
    report.regime = Regime::kDegenerate;
    return report;
  }
  double threshold = 0.0;
  if (AboveThreshold(b, g, threshold)) {
    report.regime = Regime::kGuaranteed;
    report.threshold_used = threshold;
    return report;
  }
  if (AboveThreshold(g, b, threshold)) {
    report.regime = Regime::kGuaranteedAfterSwap;
    report.swap_applied = true;
    report.threshold_used = threshold;
    return report;
  }
  report.regime = Regime::kUnguaranteed;
  // Report the threshold of the parameter that would have to sit below 1.
  const double small = std::min(b, g);
  if (small < 1.0) report.threshold_used = BigGamma(small).Gamma;
  return report;
}

std::pair<SpinParams, PinSet> SwapColors(const SpinParams& params, const PinSet& pins) {
  PinSet flipped;
  for (const auto& [v, c] : pins) flipped.pin(v, Flip(c));
  return {SpinParams{params.gamma, params.beta}, flipped};
}

}  // namespace spindecay
