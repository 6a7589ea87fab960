#include "moran/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "moran/error.hpp"
#include "moran/estimator.hpp"
#include "moran/exact_oracle.hpp"
#include "moran/graph.hpp"
#include "moran/report.hpp"

namespace moran::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct GraphOptions {
  std::string file;
  std::string family;
  NodeId n = 0;
  std::uint32_t delta = 0;
};

struct Common {
  GraphOptions graph;
  double r = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_graph_flags(CLI::App& cmd, GraphOptions& g, bool with_n = true) {
  auto* file = cmd.add_option("--graph", g.file, "edge-list file (\"n m\" header, then \"u v\" lines)");
  auto* family = cmd.add_option("--family", g.family, "complete, star, line, cycle or lower_bound");
  file->excludes(family);
  if (with_n) cmd.add_option("--n", g.n, "node count for --family");
  cmd.add_option("--delta", g.delta, "max degree parameter for lower_bound");
}

Graph load_graph(const GraphOptions& g) {
  if (!g.file.empty()) return read_edge_list_file(g.file);
  if (g.family.empty()) throw Error(ErrorCode::InvalidArgument, "one of --graph or --family is required");
  return gen_family(parse_family(g.family), FamilyParams{g.n, g.delta});
}

unsigned resolve_threads(const std::optional<unsigned>& flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("MORAN_THREADS")) {
    try {
      const unsigned long v = std::stoul(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, std::string("MORAN_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json base_report(const std::string& command, const std::vector<std::string>& args, const Graph& graph, double r) {
  return {{"command", command}, {"argv", args}, {"graph", report::graph_summary(graph)}, {"r", r}};
}

// closed forms for the neutral case
double neutral_answer(Problem problem, NodeId n) {
  const double inv = 1.0 / static_cast<double>(n);
  return problem == Problem::FixationT1 ? inv : 1.0 - inv;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

std::vector<NodeId> parse_range(const std::string& text) {
  std::vector<NodeId> out;
  auto number = [&](const std::string& s) -> NodeId {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-' || v > 0xffffffffUL) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + s + "' in --n-range");
    }
    return static_cast<NodeId>(v);
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorCode::InvalidArgument, "--n-range must be A:B or A:B:S");
    const NodeId a = number(parts[0]);
    const NodeId b = number(parts[1]);
    const NodeId step = parts.size() == 3 ? number(parts[2]) : 1;
    if (step == 0 || a > b) throw Error(ErrorCode::InvalidArgument, "empty --n-range '" + text + "'");
    for (std::uint64_t v = a; v <= b; v += step) out.push_back(static_cast<NodeId>(v));
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(number(part));
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty --n-range");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct EstimateArgs {
  Common c;
  std::string problem = "fixation-t1";
  double epsilon = 0.25;
  std::optional<std::uint64_t> z, u;
  std::string init;
  std::string type = "t1";
};

int cmd_estimate(const EstimateArgs& a, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  const auto start = Clock::now();
  const Graph graph = load_graph(a.c.graph);
  const FitnessParams fitness{a.c.r};
  fitness.validate();

  EstimatorParams params;
  params.epsilon = a.epsilon;
  params.z = a.z;
  params.u = a.u;
  const bool generalized = a.problem == "generalized";
  if (generalized) {
    if (a.init.empty()) throw Error(ErrorCode::InvalidArgument, "--problem generalized needs --init MASK");
    params.problem = Generalized{Configuration::from_hex(graph.size(), a.init), parse_type(a.type)};
  } else {
    if (!a.init.empty()) throw Error(ErrorCode::InvalidArgument, "--init is only used with --problem generalized");
    Problem p{};
    if (a.problem == "fixation-t1") p = Problem::FixationT1;
    else if (a.problem == "extinction-t1") p = Problem::ExtinctionT1;
    else if (a.problem == "extinction-t2") p = Problem::ExtinctionT2;
    else throw Error(ErrorCode::InvalidArgument, "unknown problem '" + a.problem + "'");
    params.problem = p;
  }
  params.validate();

  EstimateResult result;
  if (fitness.r == 1.0 && !generalized) {
    result.value = neutral_answer(std::get<Problem>(params.problem), graph.size());
    result.shortcut = true;
    result.seed = *a.c.seed;
  } else {
    result = estimate(graph, fitness, params, RunOptions{*a.c.seed, resolve_threads(a.c.threads)});
  }

  json rep = base_report("estimate", args, graph, fitness.r);
  rep["params"] = {{"epsilon", params.epsilon},
                   {"z", result.z_used},
                   {"u", result.u_used},
                   {"seed", *a.c.seed},
                   {"problem", a.problem}};
  if (generalized) {
    rep["params"]["init"] = std::get<Generalized>(params.problem).config.to_hex();
    rep["params"]["type"] = a.type;
  }
  rep["result"] = report::estimate_result(result, a.problem);
  rep["steps_total"] = result.steps_total;
  rep["wall_time_ms"] = elapsed_ms(start);
  out << rep.dump() << '\n';

  if (result.took_too_long) {
    err << "estimate " << a.problem << ": took too long (u = " << result.u_used << ")\n";
    return kTookTooLong;
  }
  err << "estimate " << a.problem << " = " << fmt(*result.value);
  if (result.shortcut) err << " (closed form)";
  else err << " (" << result.successes << "/" << result.z_used << " replicates, u = " << result.u_used << ")";
  err << '\n';
  return kOk;
}

struct ExactArgs {
  Common c;
  bool steps = false;
  std::string init;
};

int cmd_exact(const ExactArgs& a, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const Graph graph = load_graph(a.c.graph);
  const FitnessParams fitness{a.c.r};
  fitness.validate();
  const ChainSolution sol = solve_chain(graph, fitness, a.steps);
  const NodeId n = graph.size();

  json result{{"kind", "exact"}, {"residual", sol.residual}};
  json problems = json::object();
  for (Problem p : {Problem::FixationT1, Problem::ExtinctionT1, Problem::ExtinctionT2}) {
    problems[problem_name(p)] = averaged_problem(sol, p);
  }
  result["problems"] = problems;
  result["first_step_extinction"] = first_step_extinction_prob(graph, fitness);
  if (graph.family() == "complete" && fitness.r != 1.0) {
    result["complete_closed_form"] = complete_graph_closed_form(n, fitness.r);
  }
  json starts = json::array();
  for (const auto& [mask, weight] : single_start_masks(n, Type::t1)) {
    (void)weight;
    json row{{"init", Configuration::from_mask(n, mask).to_hex()}, {"fixation_t1", sol.fixation(mask)}};
    if (a.steps) row["expected_steps"] = sol.steps(mask);
    starts.push_back(row);
  }
  result["single_t1"] = starts;
  if (!a.init.empty()) {
    const auto mask = Configuration::from_hex(n, a.init).mask();
    json row{{"init", Configuration::from_mask(n, mask).to_hex()}, {"fixation_t1", sol.fixation(mask)}};
    if (a.steps) row["expected_steps"] = sol.steps(mask);
    result["init"] = row;
  }

  json rep = base_report("exact", args, graph, fitness.r);
  rep["params"] = {{"steps", a.steps}};
  rep["result"] = result;
  rep["steps_total"] = 0;
  rep["wall_time_ms"] = elapsed_ms(start);
  out << rep.dump() << '\n';

  err << "exact on n = " << n << ": fixation-t1 " << fmt(problems["fixation-t1"].get<double>())
      << ", extinction-t1 " << fmt(problems["extinction-t1"].get<double>()) << ", extinction-t2 "
      << fmt(problems["extinction-t2"].get<double>()) << '\n';
  return kOk;
}

struct SimulateArgs {
  Common c;
  std::uint64_t trials = 0;
  std::string init = "uniform-t1";
};

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  const auto start = Clock::now();
  const Graph graph = load_graph(a.c.graph);
  const FitnessParams fitness{a.c.r};
  fitness.validate();
  if (a.trials == 0) throw Error(ErrorCode::InvalidArgument, "--trials must be at least 1");

  InitialDistribution dist;
  if (a.init == "uniform-t1") dist = UniformSingle{Type::t1};
  else if (a.init == "uniform-t2") dist = UniformSingle{Type::t2};
  else dist = Explicit{Configuration::from_hex(graph.size(), a.init)};
  validate_distribution(dist, graph.size());

  // the tail table only makes sense where the concentration bound exists
  std::vector<int> xs;
  std::vector<double> thresholds;
  if (fitness.r > 1.0) {
    xs = {1, 2, 3, 4, 6, 8};
    thresholds = concentration_thresholds(graph.size(), graph.max_degree(), fitness.r, xs);
  }
  const FixationTimeStats stats = fixation_time_stats(graph, fitness, dist, a.trials,
                                                      RunOptions{*a.c.seed, resolve_threads(a.c.threads)}, thresholds);
  std::uint64_t total = 0;
  for (auto s : stats.samples) total += s;

  json rep = base_report("simulate", args, graph, fitness.r);
  rep["params"] = {{"seed", *a.c.seed}, {"trials", a.trials}, {"init", a.init}};
  rep["result"] = report::stats_result(stats, xs);
  rep["steps_total"] = total;
  rep["wall_time_ms"] = elapsed_ms(start);
  out << rep.dump() << '\n';

  err << "simulate: mean " << fmt(stats.mean) << " effective steps over " << a.trials << " trials, t1 fixed in "
      << stats.fixed_t1 << '\n';
  return kOk;
}

struct BenchArgs {
  Common c;
  std::string n_range;
  std::uint64_t trials = 0;
  bool json_out = false;
};

int cmd_bench(const BenchArgs& a, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  if (a.c.graph.family.empty()) throw Error(ErrorCode::InvalidArgument, "bench needs --family");
  const Family family = parse_family(a.c.graph.family);
  const std::vector<NodeId> ns = parse_range(a.n_range);
  const FitnessParams fitness{a.c.r};
  fitness.validate();
  if (a.trials == 0) throw Error(ErrorCode::InvalidArgument, "--trials must be at least 1");

  // build every graph first so a bad n fails before any simulation runs
  std::vector<Graph> graphs;
  for (NodeId n : ns) graphs.push_back(gen_family(family, FamilyParams{n, a.c.graph.delta}));

  std::vector<report::BenchRow> rows;
  std::uint64_t steps_total = 0;
  for (const Graph& graph : graphs) {
    const NodeId n = graph.size();
    const std::uint64_t n_seed = derive_seed(*a.c.seed, n);
    double all_steps = 0, all_ms = 0, eff_steps = 0, eff_ms = 0;
    for (std::uint64_t i = 0; i < a.trials; ++i) {
      const std::uint64_t trial_seed = derive_seed(n_seed, i);
      Rng init_rng(derive_seed(trial_seed, 0));
      const Configuration start_cfg = draw_initial(UniformSingle{Type::t1}, n, init_rng);

      Rng rng_all(derive_seed(trial_seed, 1));
      auto t0 = Clock::now();
      const AllStepsRun ra = run_all_steps(graph, start_cfg, fitness, rng_all);
      all_ms += elapsed_ms(t0);
      all_steps += static_cast<double>(ra.steps);

      Rng rng_eff(derive_seed(trial_seed, 2));
      t0 = Clock::now();
      const EffectiveRun re = run_effective(graph, start_cfg, fitness, rng_eff);
      eff_ms += elapsed_ms(t0);
      eff_steps += static_cast<double>(re.steps);
      steps_total += ra.steps + re.steps;
    }
    const double t = static_cast<double>(a.trials);
    rows.push_back({n, "all_steps", all_steps / t, all_ms / t});
    rows.push_back({n, "effective", eff_steps / t, eff_ms / t});
    err << "bench n = " << n << ": all_steps " << fmt(all_steps / t) << ", effective " << fmt(eff_steps / t)
        << " (ratio " << fmt(eff_steps > 0 ? all_steps / eff_steps : 0.0) << ")\n";
  }

  if (!a.json_out) {
    out << report::bench_csv(rows);
    return kOk;
  }
  json table = json::array();
  for (const auto& row : rows) {
    table.push_back({{"n", row.n}, {"backend", row.backend}, {"mean_steps", row.mean_steps}, {"mean_ms", row.mean_ms}});
  }
  json rep = base_report("bench", args, graphs.back(), fitness.r);
  rep["graph"]["family"] = family_name(family);
  rep["params"] = {{"seed", *a.c.seed}, {"trials", a.trials}, {"n_range", ns}};
  rep["result"] = {{"kind", "bench"}, {"rows", table}};
  rep["steps_total"] = steps_total;
  rep["wall_time_ms"] = elapsed_ms(start);
  out << rep.dump() << '\n';
  return kOk;
}

void add_common(CLI::App& cmd, Common& c, bool seed_required) {
  cmd.add_option("--r", c.r, "fitness of t1 relative to t2")->required();
  auto* seed = cmd.add_option("--seed", c.seed, "master seed");
  if (seed_required) seed->required();
  cmd.add_option("--threads", c.threads, "worker threads (default: MORAN_THREADS or 1)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moran process simulation and fixation-probability estimation"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "approximate a fixation or extinction probability");
  add_graph_flags(*estimate_cmd, est.c.graph);
  add_common(*estimate_cmd, est.c, true);
  estimate_cmd->add_option("--problem", est.problem)
      ->check(CLI::IsMember({"fixation-t1", "extinction-t1", "extinction-t2", "generalized"}));
  estimate_cmd->add_option("--epsilon", est.epsilon, "relative (or additive, for generalized) error");
  estimate_cmd->add_option("--z", est.z, "override the replicate count");
  estimate_cmd->add_option("--u", est.u, "override the per-replicate step budget");
  estimate_cmd->add_option("--init", est.init, "hex start mask, bit v set = node v is t1");
  estimate_cmd->add_option("--type", est.type)->check(CLI::IsMember({"t1", "t2"}));

  ExactArgs ex;
  auto* exact_cmd = app.add_subcommand("exact", "solve the effective-step chain exactly (n <= 14)");
  add_graph_flags(*exact_cmd, ex.c.graph);
  add_common(*exact_cmd, ex.c, false);
  exact_cmd->add_flag("--steps", ex.steps, "also compute expected effective steps");
  exact_cmd->add_option("--init", ex.init, "report this hex start mask too");

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "fixation-time statistics");
  add_graph_flags(*simulate_cmd, sim.c.graph);
  add_common(*simulate_cmd, sim.c, true);
  simulate_cmd->add_option("--trials", sim.trials)->required();
  simulate_cmd->add_option("--init", sim.init, "uniform-t1, uniform-t2 or a hex mask");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "all-steps against effective-steps simulation");
  add_graph_flags(*bench_cmd, bench.c.graph, false);
  add_common(*bench_cmd, bench.c, true);
  bench_cmd->add_option("--n-range", bench.n_range, "A:B[:S] or a comma list")->required();
  bench_cmd->add_option("--trials", bench.trials)->required();
  bench_cmd->add_flag("--json", bench.json_out, "emit a JSON report instead of CSV");

  std::vector<std::string> argv_store{"moran"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (estimate_cmd->parsed()) return cmd_estimate(est, args, out, err);
    if (exact_cmd->parsed()) return cmd_exact(ex, args, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(sim, args, out, err);
    return cmd_bench(bench, args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace moran::cli
