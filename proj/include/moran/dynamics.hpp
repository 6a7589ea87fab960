#pragma once

#include <vector>

#include "moran/configuration.hpp"
#include "moran/graph.hpp"
#include "moran/rng.hpp"

namespace moran {

enum class FixationState { FixatedT1, FixatedT2, Active };

FixationState fixation_state(const Configuration& config);

/// Result of one reproduction event. The configuration passed to the step
/// function is updated in place to f[replaced -> f(reproducer)].
struct StepOutcome {
  NodeId reproducer = 0;
  NodeId replaced = 0;
  bool effective = false;
};

/// One ordered pair (v, u): v reproduces onto neighbor u.
struct PairProbability {
  NodeId reproducer;
  NodeId replaced;
  double probability;
};

/// Modified-step distribution over the bichromatic ordered edges, sorted by
/// (reproducer, replaced).
struct StepDistribution {
  std::vector<PairProbability> entries;
  double active_weight = 0.0;  // W'(f)
};

/// Classical step: v with probability w(f(v)) / W(f), u uniform over adj(v).
/// Throws AlreadyFixated on a fixated configuration.
StepOutcome naive_step(const Graph& graph, Configuration& config, const FitnessParams& fitness, Rng& rng);

/// Modified step by O(m) enumeration of the bichromatic edges. Always
/// effective. Throws AlreadyFixated on a fixated configuration.
StepOutcome effective_step_reference(const Graph& graph, Configuration& config, const FitnessParams& fitness,
                                     Rng& rng);

/// Exact distribution of the classical step over all ordered edges,
/// including the ineffective ones. Sorted by (reproducer, replaced).
std::vector<PairProbability> naive_pair_distribution(const Graph& graph, const Configuration& config,
                                                     const FitnessParams& fitness);

/// Exact modified-step distribution, computed node-wise from
/// p(v) = w(f(v)) |Gamma_v(f)| / deg v and a uniform choice in Gamma_v(f).
StepDistribution step_distribution(const Graph& graph, const Configuration& config, const FitnessParams& fitness);

/// W'(f) = sum_v w(f(v)) |Gamma_v(f)| / deg v.
double active_weight(const Graph& graph, const Configuration& config, const FitnessParams& fitness);

/// Number of neighbors of v with a different type.
std::uint32_t bichromatic_degree(const Graph& graph, const Configuration& config, NodeId v);

/// psi(f): sum of 1/deg v over the t1 nodes.
double potential_psi(const Graph& graph, const Configuration& config);

/// Exact E[psi(f') - psi(f)] over one modified step.
double expected_potential_change(const Graph& graph, const Configuration& config, const FitnessParams& fitness);

/// Exact probability that the next effective step adds a t1 node.
double increment_probability(const Graph& graph, const Configuration& config, const FitnessParams& fitness);

}  // namespace moran
