#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "moran/configuration.hpp"
#include "moran/exact_oracle.hpp"
#include "moran/graph.hpp"
#include "moran/rng.hpp"

namespace moran {

/// Fixation probability of `type` from the explicit start `config`.
struct Generalized {
  Configuration config;
  Type type = Type::t1;
};

using ProblemSpec = std::variant<Problem, Generalized>;

struct EstimatorParams {
  double epsilon = 0.25;
  std::optional<std::uint64_t> z;  // replicate count override
  std::optional<std::uint64_t> u;  // step budget override
  ProblemSpec problem = Problem::FixationT1;

  /// Throws InvalidEpsilon unless 0 < epsilon < 1/2, InvalidArgument for
  /// zero overrides.
  void validate() const;
};

struct EstimateResult {
  std::optional<double> value;  // y / z, absent when took_too_long
  std::uint64_t z_used = 0;
  std::uint64_t u_used = 0;
  std::uint64_t successes = 0;    // y
  std::uint64_t steps_total = 0;  // effective steps over all executed replicates
  bool took_too_long = false;
  bool shortcut = false;  // answered in closed form without simulating
  std::uint64_t seed = 0;

  /// Replicate i runs on derive_seed(seed, i).
  std::vector<std::uint64_t> per_replicate_seeds() const;
};

struct RunOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Effective-step budget per replicate. With M = max(log2 z, log2 1/eps):
///   30 n M                        if r >= 2 Delta
///   30 n Delta M / min(r - 1, 1)  if 1 + 1/(n Delta) <= r < 2 Delta
///   20 n^2 Delta^2 M              otherwise,
/// rounded up. Throws InvalidFitness for r <= 1 and InvalidEpsilon unless
/// 0 < eps < 1.
std::uint64_t u_budget(std::uint64_t z, double r, NodeId n, std::uint32_t max_degree, double epsilon);

/// Runs z independent replicates, each from a configuration drawn from
/// `dist`, stepping until fixation. If any replicate needs more than u
/// effective steps the call reports took_too_long; otherwise the value is the
/// fraction of replicates in which `target` fixated.
///
/// The outcome depends only on (graph, fitness, target, z, u, dist, seed):
/// replicate i draws from its own stream and replicates after the first
/// over-budget one are never counted, whatever the thread count.
EstimateResult meta_simulation(const Graph& graph, const FitnessParams& fitness, Type target, std::uint64_t z,
                               std::uint64_t u, const InitialDistribution& dist, const RunOptions& options);

/// Fixation probability of a single random t1 node; z = ceil(48 n / eps^2).
EstimateResult algo1_fixation_t1(const Graph& graph, const FitnessParams& fitness, const EstimatorParams& params,
                                 const RunOptions& options);

/// Probability that t1 fixates from a single random t2 node; z = ceil(24 / eps^2).
EstimateResult algo2_extinction_t1(const Graph& graph, const FitnessParams& fitness,
                                   const EstimatorParams& params, const RunOptions& options);

/// Additive approximation for an explicit start; z = ceil(6 / eps^2).
/// params.problem must hold a Generalized.
EstimateResult algo3_generalized(const Graph& graph, const FitnessParams& fitness, const EstimatorParams& params,
                                 const RunOptions& options);

/// Probability that t2 fixates from a single random t1 node. Returns 1/r
/// directly when r >= max(Delta^2, n)/eps, else simulates with
/// z = ceil(24 (n + r)^2 / eps^2).
EstimateResult algo4_extinction_t2(const Graph& graph, const FitnessParams& fitness,
                                   const EstimatorParams& params, const RunOptions& options);

/// Dispatches on params.problem.
EstimateResult estimate(const Graph& graph, const FitnessParams& fitness, const EstimatorParams& params,
                        const RunOptions& options);

struct FixationTimeStats {
  std::vector<std::uint64_t> samples;  // effective steps per trial
  double mean = 0.0;
  std::uint64_t fixed_t1 = 0;
  std::vector<std::pair<double, std::uint64_t>> tail_counts;  // (threshold, #samples > threshold)

  double quantile(double q) const;
};

/// Runs `trials` unbudgeted replicates to fixation and collects effective
/// step counts. Trial i uses derive_seed(seed, i).
FixationTimeStats fixation_time_stats(const Graph& graph, const FitnessParams& fitness,
                                      const InitialDistribution& dist, std::uint64_t trials,
                                      const RunOptions& options, std::vector<double> thresholds = {});

/// 6 x n Delta / min(r - 1, 1) for each x: the step counts after which the
/// probability of not having fixated is at most 2^-x. Requires r > 1.
std::vector<double> concentration_thresholds(NodeId n, std::uint32_t max_degree, double r,
                                             const std::vector<int>& xs);

struct EffectiveRun {
  std::uint64_t steps = 0;
  bool fixated = false;
  Type winner = Type::t1;
};

/// Effective-step simulation with the sampler, stopping after `budget`
/// steps if not fixated.
EffectiveRun run_effective(const Graph& graph, const Configuration& start, const FitnessParams& fitness, Rng& rng,
                           std::uint64_t budget = UINT64_MAX);

struct AllStepsRun {
  std::uint64_t steps = 0;            // every reproduction event
  std::uint64_t effective_steps = 0;  // events that changed a type
  Type winner = Type::t1;
};

/// Classical simulation by repeated naive_step until fixation.
AllStepsRun run_all_steps(const Graph& graph, const Configuration& start, const FitnessParams& fitness, Rng& rng);

}  // namespace moran
