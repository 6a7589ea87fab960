#include "moran/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "moran/dynamics.hpp"
#include "moran/effective_sampler.hpp"
#include "moran/error.hpp"

namespace moran {

namespace {

void require_supercritical(const FitnessParams& fitness) {
  fitness.validate();
  if (!(fitness.r > 1.0)) {
    throw Error(ErrorCode::InvalidFitness,
                "the approximation algorithms need r > 1 (for r = 1 the answers are 1/n and 1 - 1/n)");
  }
}

/// ceil() that ignores rounding noise just above an integer.
std::uint64_t ceil_count(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(x));
}

std::uint64_t resolve_u(const Graph& graph, const FitnessParams& fitness, const EstimatorParams& params,
                        std::uint64_t z) {
  if (params.u) return *params.u;
  return u_budget(z, fitness.r, graph.size(), graph.max_degree(), params.epsilon);
}

constexpr std::uint64_t kChunk = 256;

struct ChunkResult {
  std::uint64_t successes = 0;
  std::uint64_t steps = 0;
  bool failed = false;
};

}  // namespace

void EstimatorParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must lie in (0, 1/2), got " + std::to_string(epsilon));
  }
  if (z && *z == 0) throw Error(ErrorCode::InvalidArgument, "z must be at least 1");
}

std::vector<std::uint64_t> EstimateResult::per_replicate_seeds() const {
  std::vector<std::uint64_t> out(z_used);
  for (std::uint64_t i = 0; i < z_used; ++i) out[i] = derive_seed(seed, i);
  return out;
}

std::uint64_t u_budget(std::uint64_t z, double r, NodeId n, std::uint32_t max_degree, double epsilon) {
  if (!(r > 1.0)) throw Error(ErrorCode::InvalidFitness, "u_budget needs r > 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidEpsilon, "u_budget needs 0 < eps < 1");
  if (z == 0) throw Error(ErrorCode::InvalidArgument, "u_budget needs z >= 1");
  const double m = std::max(std::log2(static_cast<double>(z)), std::log2(1.0 / epsilon));
  const double nn = n;
  const double delta = max_degree;
  double u = 0.0;
  if (r >= 2.0 * delta) {
    u = 30.0 * nn * m;
  } else if (r >= 1.0 + 1.0 / (nn * delta)) {
    u = 30.0 * nn * delta / std::min(r - 1.0, 1.0) * m;
  } else {
    u = 20.0 * nn * nn * delta * delta * m;
  }
  return ceil_count(u);
}

EstimateResult meta_simulation(const Graph& graph, const FitnessParams& fitness, Type target, std::uint64_t z,
                               std::uint64_t u, const InitialDistribution& dist, const RunOptions& options) {
  fitness.validate();
  validate_distribution(dist, graph.size());
  EstimateResult result;
  result.z_used = z;
  result.u_used = u;
  result.seed = options.seed;

  const std::uint64_t chunks = (z + kChunk - 1) / kChunk;
  std::vector<ChunkResult> chunk_results(chunks);
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> first_failed_chunk{UINT64_MAX};

  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next_chunk.fetch_add(1);
      if (c >= chunks || c > first_failed_chunk.load()) return;
      ChunkResult& out = chunk_results[c];
      const std::uint64_t end = std::min(z, (c + 1) * kChunk);
      for (std::uint64_t i = c * kChunk; i < end; ++i) {
        Rng rng(derive_seed(options.seed, i));
        const auto run = run_effective(graph, draw_initial(dist, graph.size(), rng), fitness, rng, u);
        out.steps += run.steps;
        if (!run.fixated) {
          out.failed = true;
          std::uint64_t seen = first_failed_chunk.load();
          while (c < seen && !first_failed_chunk.compare_exchange_weak(seen, c)) {
          }
          break;
        }
        out.successes += run.winner == target;
      }
    }
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(std::max<std::uint64_t>(chunks, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::uint64_t c = 0; c < chunks; ++c) {
    result.steps_total += chunk_results[c].steps;
    result.successes += chunk_results[c].successes;
    if (chunk_results[c].failed) {
      result.took_too_long = true;
      break;
    }
  }
  if (!result.took_too_long) result.value = static_cast<double>(result.successes) / static_cast<double>(z);
  return result;
}

EstimateResult algo1_fixation_t1(const Graph& graph, const FitnessParams& fitness, const EstimatorParams& params,
                                 const RunOptions& options) {
  require_supercritical(fitness);
  params.validate();
  const std::uint64_t z = params.z.value_or(ceil_count(48.0 * graph.size() / (params.epsilon * params.epsilon)));
  return meta_simulation(graph, fitness, Type::t1, z, resolve_u(graph, fitness, params, z),
                         UniformSingle{Type::t1}, options);
}

EstimateResult algo2_extinction_t1(const Graph& graph, const FitnessParams& fitness,
                                   const EstimatorParams& params, const RunOptions& options) {
  require_supercritical(fitness);
  params.validate();
  const std::uint64_t z = params.z.value_or(ceil_count(24.0 / (params.epsilon * params.epsilon)));
  return meta_simulation(graph, fitness, Type::t1, z, resolve_u(graph, fitness, params, z),
                         UniformSingle{Type::t2}, options);
}

EstimateResult algo3_generalized(const Graph& graph, const FitnessParams& fitness, const EstimatorParams& params,
                                 const RunOptions& options) {
  require_supercritical(fitness);
  params.validate();
  const auto* gen = std::get_if<Generalized>(&params.problem);
  if (!gen) throw Error(ErrorCode::InvalidArgument, "algo3 needs a generalized problem with a start configuration");
  const std::uint64_t z = params.z.value_or(ceil_count(6.0 / (params.epsilon * params.epsilon)));
  return meta_simulation(graph, fitness, gen->type, z, resolve_u(graph, fitness, params, z), Explicit{gen->config},
                         options);
}

EstimateResult algo4_extinction_t2(const Graph& graph, const FitnessParams& fitness,
                                   const EstimatorParams& params, const RunOptions& options) {
  require_supercritical(fitness);
  params.validate();
  const double delta = graph.max_degree();
  const double threshold = std::max(delta * delta, static_cast<double>(graph.size())) / params.epsilon;
  if (fitness.r >= threshold) {
    EstimateResult result;
    result.value = 1.0 / fitness.r;
    result.shortcut = true;
    result.seed = options.seed;
    return result;
  }
  const double spread = graph.size() + fitness.r;
  const std::uint64_t z =
      params.z.value_or(ceil_count(24.0 * spread * spread / (params.epsilon * params.epsilon)));
  return meta_simulation(graph, fitness, Type::t2, z, resolve_u(graph, fitness, params, z),
                         UniformSingle{Type::t1}, options);
}

EstimateResult estimate(const Graph& graph, const FitnessParams& fitness, const EstimatorParams& params,
                        const RunOptions& options) {
  if (std::holds_alternative<Generalized>(params.problem)) return algo3_generalized(graph, fitness, params, options);
  switch (std::get<Problem>(params.problem)) {
    case Problem::FixationT1: return algo1_fixation_t1(graph, fitness, params, options);
    case Problem::ExtinctionT1: return algo2_extinction_t1(graph, fitness, params, options);
    case Problem::ExtinctionT2: return algo4_extinction_t2(graph, fitness, params, options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown problem");
}

double FixationTimeStats::quantile(double q) const {
  if (samples.empty()) return 0.0;
  std::vector<std::uint64_t> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return static_cast<double>(sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1]);
}

FixationTimeStats fixation_time_stats(const Graph& graph, const FitnessParams& fitness,
                                      const InitialDistribution& dist, std::uint64_t trials,
                                      const RunOptions& options, std::vector<double> thresholds) {
  fitness.validate();
  validate_distribution(dist, graph.size());
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  FixationTimeStats stats;
  stats.samples.assign(trials, 0);
  std::vector<char> t1_won(trials, 0);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
      Rng rng(derive_seed(options.seed, i));
      const auto run = run_effective(graph, draw_initial(dist, graph.size(), rng), fitness, rng);
      stats.samples[i] = run.steps;
      t1_won[i] = run.winner == Type::t1;
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(std::min<std::uint64_t>(trials, 1024))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  double sum = 0.0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    sum += static_cast<double>(stats.samples[i]);
    stats.fixed_t1 += t1_won[i];
  }
  stats.mean = sum / static_cast<double>(trials);
  std::sort(thresholds.begin(), thresholds.end());
  for (double t : thresholds) {
    const auto over = std::count_if(stats.samples.begin(), stats.samples.end(),
                                    [t](std::uint64_t s) { return static_cast<double>(s) > t; });
    stats.tail_counts.emplace_back(t, static_cast<std::uint64_t>(over));
  }
  return stats;
}

std::vector<double> concentration_thresholds(NodeId n, std::uint32_t max_degree, double r,
                                             const std::vector<int>& xs) {
  if (!(r > 1.0)) throw Error(ErrorCode::InvalidFitness, "concentration thresholds need r > 1");
  std::vector<double> out;
  for (int x : xs) out.push_back(6.0 * x * n * max_degree / std::min(r - 1.0, 1.0));
  return out;
}

EffectiveRun run_effective(const Graph& graph, const Configuration& start, const FitnessParams& fitness, Rng& rng,
                           std::uint64_t budget) {
  EffectiveSampler sampler(graph, start, fitness);
  EffectiveRun run;
  while (!sampler.fixated()) {
    if (run.steps >= budget) return run;
    ++run.steps;
    sampler.step(rng);
  }
  run.fixated = true;
  run.winner = sampler.config().count_t1() > 0 ? Type::t1 : Type::t2;
  return run;
}

AllStepsRun run_all_steps(const Graph& graph, const Configuration& start, const FitnessParams& fitness, Rng& rng) {
  Configuration config = start;
  AllStepsRun run;
  while (fixation_state(config) == FixationState::Active) {
    ++run.steps;
    run.effective_steps += naive_step(graph, config, fitness, rng).effective;
  }
  run.winner = config.count_t1() > 0 ? Type::t1 : Type::t2;
  return run;
}

}  // namespace moran
