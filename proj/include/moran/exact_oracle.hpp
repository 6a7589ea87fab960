#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "moran/configuration.hpp"
#include "moran/graph.hpp"

namespace moran {

/// Largest node count solve_chain accepts (2^n states).
inline constexpr NodeId kMaxChainNodes = 14;
/// Up to this node count the chain is solved by dense elimination.
inline constexpr NodeId kMaxDenseNodes = 10;

/// Exact absorption quantities of the effective-step chain, indexed by
/// configuration mask (bit v set means node v is t1).
struct ChainSolution {
  NodeId n = 0;
  std::vector<double> fixation_prob;                // P(t1 fixates)
  std::optional<std::vector<double>> expected_steps;  // effective steps to fixation
  double residual = 0.0;                            // max equation residual

  double fixation(std::uint64_t mask) const { return fixation_prob.at(mask); }
  double steps(std::uint64_t mask) const { return expected_steps.value().at(mask); }
};

/// Solves h(f) = sum_f' P(f -> f') h(f') with h(all t1) = 1, h(all t2) = 0
/// over the effective-step chain, and optionally g(f) = 1 + sum P g(f').
/// Throws TooLarge for n > kMaxChainNodes.
ChainSolution solve_chain(const Graph& graph, const FitnessParams& fitness, bool want_steps = false);

/// Fixation probabilities of the classical chain, self-loops included, built
/// from the all-steps transition probabilities and solved densely. Used to
/// cross-check solve_chain. Throws TooLarge for n > kMaxDenseNodes.
std::vector<double> solve_all_steps_chain(const Graph& graph, const FitnessParams& fitness);

/// (1 - 1/r) / (1 - 1/r^n). Throws NeutralRate for r = 1.
double complete_graph_closed_form(NodeId n, double r);

/// Absorption probability at 0 for the walk on {0..n} that steps down with
/// probability p, started from state 2: (q^(n-2) - 1) / (q^n - 1), q = (1-p)/p.
/// Throws UnbiasedWalk for p = 1/2 and InvalidArgument outside 0 < p < 1.
double gamblers_ruin_absorption(double p, NodeId n);

/// Probability that a single uniformly placed t1 node is replaced in the
/// first effective step: 1 - (r/n) sum_v 1/(r + Q(v)), Q(v) = sum_{u~v} 1/deg u.
double first_step_extinction_prob(const Graph& graph, const FitnessParams& fitness);

enum class Problem { FixationT1, ExtinctionT1, ExtinctionT2 };

const char* problem_name(Problem p);

/// Averages the chain solution over the n single-node starts of a problem:
/// FixationT1 -> single t1, P(t1 fixates); ExtinctionT1 -> single t2,
/// P(t1 fixates); ExtinctionT2 -> single t1, P(t2 fixates).
double averaged_problem(const Graph& graph, const FitnessParams& fitness, Problem problem);
double averaged_problem(const ChainSolution& solution, Problem problem);

/// Distribution of the outcome after at most `horizon` effective steps from
/// an initial distribution over masks.
struct HorizonOutcome {
  double fixed_t1 = 0.0;  // t1 fixated within the horizon
  double fixed_t2 = 0.0;  // t2 fixated within the horizon
  double active() const { return 1.0 - fixed_t1 - fixed_t2; }
};

HorizonOutcome horizon_fixation(const Graph& graph, const FitnessParams& fitness,
                                const std::vector<std::pair<std::uint64_t, double>>& initial,
                                std::uint64_t horizon);

/// Uniform distribution over the single-node starts with one `t` node.
std::vector<std::pair<std::uint64_t, double>> single_start_masks(NodeId n, Type t);

}  // namespace moran
