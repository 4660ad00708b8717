#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "spindecay/checks.hpp"
#include "spindecay/errors.hpp"
#include "spindecay/fptas.hpp"
#include "spindecay/graph.hpp"
#include "spindecay/oracle.hpp"
#include "spindecay/thresholds.hpp"

namespace spindecay::cli {
namespace {

using Json = nlohmann::ordered_json;

struct Config {
  std::string graph_path;
  double beta = 0.0;
  double gamma = 1.0;
  double eps = 0.05;
  int L = 0;
  int M = 2;
  double alpha = 0.0;
  double slack = kDefaultBudgetSlack;
  bool force = false;
  bool json = false;
  bool timing = false;
  bool quick = false;
  bool nodes = false;
  int threads = 1;
  std::uint64_t seed = AcceptanceOptions{}.seed;
  std::int64_t vertex = 0;
  std::vector<std::string> pins;
  int L_min = 0;
  int L_max = 10;

  // Set when the corresponding flag was given.
  bool has_gamma = false;
  bool has_L = false;
  bool has_M = false;
  bool has_alpha = false;
  bool has_vertex = false;
};

// Non-finite values have no JSON literal and are written as null.
Json Num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string Text(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Vertex ResolveVertex(const Graph& graph, std::int64_t label) {
  const Vertex v = graph.find_label(label);
  if (v < 0) throw InvalidQuery("vertex " + std::to_string(label) + " is not in the graph");
  return v;
}

PinSet ResolvePins(const Graph& graph, const std::vector<std::string>& specs) {
  PinSet pins;
  for (const std::string& spec : specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw InvalidInput("pin '" + spec + "' is not of the form ID:blue|green");
    }
    std::int64_t label = 0;
    try {
      std::size_t used = 0;
      label = std::stoll(spec.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument(spec);
    } catch (const std::logic_error&) {
      throw InvalidInput("pin '" + spec + "' has a malformed vertex id");
    }
    pins.pin(ResolveVertex(graph, label), ParseColor(spec.substr(colon + 1)));
  }
  return pins;
}

Json RegimeJson(const RegimeReport& r) {
  Json j;
  j["name"] = RegimeName(r.regime);
  j["swap_applied"] = r.swap_applied;
  j["threshold"] = Num(r.threshold_used);
  return j;
}

EstimateRequest MakeRequest(const Config& c, Graph graph) {
  EstimateRequest req;
  req.graph = std::move(graph);
  req.params = {c.beta, c.gamma};
  req.epsilon = c.eps;
  if (c.has_L) req.L = c.L;
  if (c.has_M) req.M = c.M;
  if (c.has_alpha) req.alpha = c.alpha;
  req.force = c.force;
  req.threads = c.threads;
  req.slack = c.slack;
  return req;
}

Json BudgetJson(const ResolvedBudget& b) {
  Json j;
  j["regime"] = RegimeJson(b.regime);
  j["certified"] = b.certified;
  j["forced"] = b.forced;
  j["L"] = b.L;
  j["M"] = b.M;
  j["alpha"] = b.alpha > 0.0 ? Num(b.alpha) : Json(nullptr);
  return j;
}

void PrintBudget(std::ostream& out, const ResolvedBudget& b) {
  out << "regime: " << RegimeName(b.regime.regime)
      << (b.regime.swap_applied ? " (colors swapped)" : "") << '\n';
  out << "certified: " << (b.certified ? "yes" : "no") << '\n';
  out << "L: " << b.L << "  M: " << b.M << "  alpha: " << (b.alpha > 0.0 ? Text(b.alpha) : "-")
      << '\n';
}

int CmdPartition(const Config& c, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const EstimateRequest req = MakeRequest(c, LoadGraph(c.graph_path));
  const PartitionEstimate est = EstimatePartition(req);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const Graph& g = req.graph;

  if (c.json) {
    Json j;
    j["command"] = "partition";
    j["n"] = g.vertex_count();
    j["edges"] = g.edge_count();
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["epsilon"] = c.eps;
    j.update(BudgetJson(est.budget));
    j["logZ"] = Num(est.logZ);
    j["Z"] = est.Z ? Json(*est.Z) : Json(nullptr);
    j["nodes_visited"] = est.nodes_visited;
    Json steps = Json::array();
    for (const auto& s : est.steps) {
      steps.push_back({{"vertex", g.label(s.vertex)},
                       {"p_lo", s.p_lo},
                       {"p_hi", s.p_hi},
                       {"nodes_visited", s.nodes_visited},
                       {"exact", s.exact}});
    }
    j["steps"] = std::move(steps);
    if (c.timing) j["wall_seconds"] = wall;
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "graph: " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
  PrintBudget(out, est.budget);
  out << "logZ: " << Text(est.logZ) << '\n';
  out << "Z: " << (est.Z ? Text(*est.Z) : "not representable") << '\n';
  out << "nodes visited: " << est.nodes_visited << '\n';
  out << "wall time: " << Text(wall) << " s\n";
  out << "step vertex p_lo p_hi"
      << (est.budget.regime.swap_applied ? " (swapped colors)" : "") << '\n';
  for (std::size_t i = 0; i < est.steps.size(); ++i) {
    const auto& s = est.steps[i];
    out << i << ' ' << g.label(s.vertex) << ' ' << Text(s.p_lo) << ' ' << Text(s.p_hi) << '\n';
  }
  return kOk;
}

int CmdMarginal(const Config& c, std::ostream& out) {
  if (!c.has_vertex) throw InvalidInput("marginal needs --vertex");
  const EstimateRequest req = MakeRequest(c, LoadGraph(c.graph_path));
  const Vertex v = ResolveVertex(req.graph, c.vertex);
  const PinSet pins = ResolvePins(req.graph, c.pins);
  const ResolvedBudget budget = ResolveBudget(req, std::max(req.graph.vertex_count(), 1));
  const MarginalBounds m = Marginal(req, v, pins);
  if (c.json) {
    Json j;
    j["command"] = "marginal";
    j["vertex"] = c.vertex;
    j.update(BudgetJson(budget));
    j["p_lo"] = m.p_lo;
    j["p_hi"] = m.p_hi;
    j["R_lo"] = Num(m.ratio.lo.value());
    j["R_hi"] = Num(m.ratio.hi.value());
    j["nodes_visited"] = m.ratio.nodes_visited;
    j["exact"] = m.ratio.exact();
    out << j.dump(2) << '\n';
    return kOk;
  }
  PrintBudget(out, budget);
  out << "p_blue in [" << Text(m.p_lo) << ", " << Text(m.p_hi) << "]\n";
  out << "R in [" << Text(m.ratio.lo.value()) << ", " << Text(m.ratio.hi.value()) << "]\n";
  out << "nodes visited: " << m.ratio.nodes_visited << (m.ratio.exact() ? " (exact)" : "")
      << '\n';
  return kOk;
}

int CmdThreshold(const Config& c, std::ostream& out) {
  if (!(c.beta >= 0.0 && c.beta < 1.0)) {
    throw InvalidInput("threshold needs 0 <= beta < 1");
  }
  const IdentityReport identities = CheckFixedPointIdentities(c.beta);
  const UniquenessThreshold& t = identities.threshold;
  if (t.hit_boundary) throw NumericFailure("threshold optimizer did not converge in range");
  std::optional<IntegerThreshold> integer;
  if (c.beta == 0.0) integer = BigGammaIntegerBeta0();
  std::optional<ThresholdProfile> profile;
  if (c.has_gamma) {
    if (!(c.gamma > t.Gamma + kRegimeMargin) || !(c.beta * c.gamma < 1.0)) {
      throw RegimeError("gamma=" + Text(c.gamma) + " is not in (Gamma(" + Text(c.beta) +
                        ") = " + Text(t.Gamma) + ", 1/beta); no decay rate exists");
    }
    profile = MakeProfile(c.beta, c.gamma);
  }

  if (c.json) {
    Json j;
    j["command"] = "threshold";
    j["beta"] = c.beta;
    j["Gamma"] = t.Gamma;
    j["D"] = t.D;
    j["X"] = t.X;
    j["stationarity"] = t.stationarity;
    if (integer) {
      j["Gamma_int"] = integer->Gamma;
      j["d_int"] = integer->d;
    }
    Json checks = Json::array();
    for (const auto& ch : identities.checks) {
      checks.push_back({{"name", ch.name}, {"residual", ch.residual}, {"holds", ch.holds}});
    }
    j["identities"] = std::move(checks);
    if (profile) {
      j["gamma"] = c.gamma;
      j["alpha"] = profile->sup.alpha;
      j["alpha_d"] = profile->sup.d_at;
      j["alpha_x"] = profile->sup.x_at;
      j["M"] = profile->M;
    }
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "beta: " << Text(c.beta) << '\n';
  out << "Gamma: " << Text(t.Gamma) << "  D: " << Text(t.D) << "  X: " << Text(t.X) << '\n';
  if (integer) out << "Gamma_int: " << Text(integer->Gamma) << " at d=" << integer->d << '\n';
  for (const auto& ch : identities.checks) {
    out << "identity " << ch.name << ": residual " << Text(ch.residual)
        << (ch.holds ? " ok" : " FAILED") << '\n';
  }
  if (profile) {
    out << "gamma: " << Text(c.gamma) << "  alpha: " << Text(profile->sup.alpha)
        << " (d=" << Text(profile->sup.d_at) << ", x=" << Text(profile->sup.x_at)
        << ")  M: " << profile->M << '\n';
  }
  return kOk;
}

int CmdOracle(const Config& c, std::ostream& out) {
  const Graph g = LoadGraph(c.graph_path);
  const PinSet pins = ResolvePins(g, c.pins);
  const SpinParams params{c.beta, c.gamma};
  const ExactResult r = ExactPartition(g, params, pins);
  if (c.json) {
    Json j;
    j["command"] = "oracle";
    j["n"] = g.vertex_count();
    j["edges"] = g.edge_count();
    j["logZ"] = Num(r.logZ);
    j["Z"] = Num(r.Z);
    Json marg = Json::array();
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      marg.push_back({{"vertex", g.label(v)}, {"p", Num(r.marginals[v])}});
    }
    j["marginals"] = std::move(marg);
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "logZ: " << Text(r.logZ) << '\n';
  out << "Z: " << Text(r.Z) << '\n';
  out << "vertex p_blue\n";
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    out << g.label(v) << ' ' << Text(r.marginals[v]) << '\n';
  }
  return kOk;
}

int CmdDecay(const Config& c, std::ostream& out) {
  const Graph g = LoadGraph(c.graph_path);
  if (g.vertex_count() == 0) throw InvalidInput("empty graph");
  const Vertex v = c.has_vertex ? ResolveVertex(g, c.vertex) : 0;
  PinSet pins = ResolvePins(g, c.pins);
  SpinParams params{c.beta, c.gamma};
  const RegimeReport regime = ClassifyRegime(params);
  if (regime.regime == Regime::kDegenerate) throw DegenerateError("degenerate parameters");
  if (regime.regime == Regime::kUnguaranteed) {
    throw RegimeError("decay profiles need the guaranteed regime (gamma > Gamma(beta))");
  }
  if (regime.swap_applied) std::tie(params, pins) = SwapColors(params, pins);
  const ThresholdProfile profile = MakeProfile(params.beta, params.gamma);
  DecayOptions opts;
  opts.L_min = c.L_min;
  opts.L_max = c.L_max;
  opts.record_nodes = c.nodes;
  const DecayTrace trace = DecayProfile(g, v, pins, params, profile, opts);

  if (c.json) {
    Json j;
    j["command"] = "decay";
    j["vertex"] = g.label(v);
    j["regime"] = RegimeJson(regime);
    j["alpha"] = trace.alpha;
    j["log_alpha"] = std::log(trace.alpha);
    j["M"] = trace.M;
    j["D"] = trace.D;
    j["slope"] = trace.slope ? Json(*trace.slope) : Json(nullptr);
    j["points_fitted"] = trace.points_fitted;
    Json levels = Json::array();
    for (const auto& l : trace.levels) {
      levels.push_back({{"L", l.L},
                        {"lo", Num(l.lo.value())},
                        {"hi", Num(l.hi.value())},
                        {"delta", Num(l.delta)},
                        {"bound", Num(l.bound)},
                        {"nodes_visited", l.nodes_visited},
                        {"nodes_checked", l.nodes_checked},
                        {"basis_violations", l.basis_violations},
                        {"step_checks", l.step_checks},
                        {"step_violations", l.step_violations}});
    }
    j["levels"] = std::move(levels);
    if (c.nodes) {
      Json nodes = Json::array();
      for (const auto& n : trace.nodes) {
        nodes.push_back({{"depth", n.depth},
                         {"children", n.children},
                         {"R", Num(n.R)},
                         {"delta", Num(n.delta)},
                         {"epsilon", Num(n.epsilon)}});
      }
      j["nodes"] = std::move(nodes);
    }
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "alpha: " << Text(trace.alpha) << "  ln alpha: " << Text(std::log(trace.alpha))
      << "  M: " << trace.M << "  D: " << Text(trace.D) << '\n';
  out << "slope: " << (trace.slope ? Text(*trace.slope) : "-") << " over "
      << trace.points_fitted << " levels\n";
  out << "L delta bound nodes basis_violations step_violations\n";
  for (const auto& l : trace.levels) {
    out << l.L << ' ' << Text(l.delta) << ' ' << Text(l.bound) << ' ' << l.nodes_visited << ' '
        << l.basis_violations << ' ' << l.step_violations << '\n';
  }
  return kOk;
}

int CmdCheck(const Config& c, std::ostream& out) {
  AcceptanceOptions options;
  options.seed = c.seed;
  options.quick = c.quick;
  Json results = Json::array();
  int failed = 0;
  for (const CriterionResult& r : RunAcceptance(options)) {
    if (!r.pass) ++failed;
    if (c.json) {
      results.push_back(
          {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    } else {
      out << FormatResult(r) << '\n';
    }
  }
  if (c.json) {
    Json j;
    j["command"] = "check";
    j["quick"] = c.quick;
    j["seed"] = c.seed;
    j["criteria"] = std::move(results);
    j["failed"] = failed;
    out << j.dump(2) << '\n';
  } else {
    out << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
        << '\n';
  }
  return failed == 0 ? kOk : kFailure;
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kRegime:
    case ErrorKind::kDegenerate:
      return kRegimeError;
    case ErrorKind::kNumericFailure:
      return kNumericError;
    default:
      return kInputError;
  }
}

int DefaultThreads() {
  if (const char* env = std::getenv("SPIN_DECAY_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  c.threads = DefaultThreads();

  CLI::App app{"Approximate and exact partition functions of two-state spin systems"};
  app.require_subcommand(1);

  auto add_graph = [&](CLI::App* sub) {
    sub->add_option("--graph", c.graph_path, "Edge-list file")->required();
  };
  auto add_params = [&](CLI::App* sub, bool gamma_required) {
    sub->add_option("--beta", c.beta, "Blue-blue interaction")->required();
    auto* g = sub->add_option("--gamma", c.gamma, "Green-green interaction");
    if (gamma_required) g->required();
  };
  auto add_pins = [&](CLI::App* sub) {
    sub->add_option("--pin", c.pins, "Pinned vertex, ID:blue or ID:green (repeatable)");
  };
  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--eps", c.eps, "Target relative error in (0, 1)");
    sub->add_option("--L", c.L, "Depth budget override");
    sub->add_option("--M", c.M, "Branching base override");
    sub->add_option("--alpha", c.alpha, "Decay rate override");
    sub->add_option("--slack", c.slack, "Constant in the depth budget formula");
    sub->add_flag("--force", c.force, "Run outside the guaranteed regime (uncertified)");
    sub->add_option("--threads", c.threads, "Worker threads (default $SPIN_DECAY_THREADS or 1)");
  };
  auto add_vertex = [&](CLI::App* sub) {
    sub->add_option("--vertex", c.vertex, "Vertex id as written in the graph file");
  };

  auto* partition = app.add_subcommand("partition", "Estimate the partition function");
  add_graph(partition);
  add_params(partition, true);
  add_budget(partition);
  partition->add_flag("--timing", c.timing, "Include wall time in JSON output");

  auto* marginal = app.add_subcommand("marginal", "Certified bracket for one marginal");
  add_graph(marginal);
  add_params(marginal, true);
  add_budget(marginal);
  add_vertex(marginal);
  add_pins(marginal);

  auto* threshold = app.add_subcommand("threshold", "Uniqueness threshold numerics");
  add_params(threshold, false);

  auto* oracle = app.add_subcommand("oracle", "Exact partition function by enumeration");
  add_graph(oracle);
  add_params(oracle, true);
  add_pins(oracle);

  auto* decay = app.add_subcommand("decay", "Measure the decay of the bound gap in L");
  add_graph(decay);
  add_params(decay, true);
  add_vertex(decay);
  add_pins(decay);
  decay->add_option("--Lmin", c.L_min, "Smallest depth budget");
  decay->add_option("--Lmax", c.L_max, "Largest depth budget");
  decay->add_flag("--nodes", c.nodes, "Include per-node records at the largest L");

  auto* check = app.add_subcommand("check", "Run the acceptance suite");
  check->add_flag("--quick", c.quick, "Smaller instance counts");
  check->add_option("--seed", c.seed, "Seed for the random instances");

  for (auto* sub : {partition, marginal, threshold, oracle, decay, check}) {
    sub->add_flag("--json", c.json, "Machine-readable output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  CLI::App* active = app.get_subcommands().front();
  auto given = [active](const char* name) {
    const CLI::Option* opt = active->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  c.has_gamma = given("--gamma");
  c.has_vertex = given("--vertex");
  c.has_L = given("--L");
  c.has_M = given("--M");
  c.has_alpha = given("--alpha");

  try {
    if (active == partition) return CmdPartition(c, out);
    if (active == marginal) return CmdMarginal(c, out);
    if (active == threshold) return CmdThreshold(c, out);
    if (active == oracle) return CmdOracle(c, out);
    if (active == decay) return CmdDecay(c, out);
    return CmdCheck(c, out);
  } catch (const Error& e) {
    err << "error (" << ErrorKindName(e.kind()) << "): " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  }
}

}  // namespace spindecay::cli
