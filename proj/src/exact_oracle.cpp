#include "moran/exact_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "moran/dynamics.hpp"
#include "moran/error.hpp"

namespace moran {

namespace {

struct Transition {
  std::uint64_t to;
  double prob;
};

/// Sparse effective-step transitions for every mask; fixated masks get none.
std::vector<std::vector<Transition>> effective_transitions(const Graph& graph, const FitnessParams& fitness) {
  const NodeId n = graph.size();
  const std::uint64_t states = std::uint64_t{1} << n;
  const std::uint64_t full = states - 1;
  std::vector<std::vector<Transition>> out(states);
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    const auto config = Configuration::from_mask(n, mask);
    for (const auto& e : step_distribution(graph, config, fitness).entries) {
      const std::uint64_t bit = std::uint64_t{1} << e.replaced;
      const std::uint64_t to = config[e.reproducer] == Type::t1 ? (mask | bit) : (mask & ~bit);
      out[mask].push_back({to, e.probability});
    }
  }
  return out;
}

/// Solves A X = B in place for a dense row-major A (size x size) and
/// `rhs_count` right-hand sides stored column-interleaved in B.
void dense_solve(std::vector<double>& a, std::vector<double>& b, std::size_t size, std::size_t rhs_count) {
  for (std::size_t col = 0; col < size; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < size; ++row) {
      if (std::abs(a[row * size + col]) > std::abs(a[pivot * size + col])) pivot = row;
    }
    if (pivot != col) {
      for (std::size_t k = 0; k < size; ++k) std::swap(a[col * size + k], a[pivot * size + k]);
      for (std::size_t k = 0; k < rhs_count; ++k) std::swap(b[col * rhs_count + k], b[pivot * rhs_count + k]);
    }
    const double diag = a[col * size + col];
    for (std::size_t row = col + 1; row < size; ++row) {
      const double factor = a[row * size + col] / diag;
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < size; ++k) a[row * size + k] -= factor * a[col * size + k];
      for (std::size_t k = 0; k < rhs_count; ++k) b[row * rhs_count + k] -= factor * b[col * rhs_count + k];
    }
  }
  for (std::size_t col = size; col-- > 0;) {
    for (std::size_t k = 0; k < rhs_count; ++k) {
      double acc = b[col * rhs_count + k];
      for (std::size_t j = col + 1; j < size; ++j) acc -= a[col * size + j] * b[j * rhs_count + k];
      b[col * rhs_count + k] = acc / a[col * size + col];
    }
  }
}

/// Dense solve of (I - P) x = rhs over the transient masks 1..2^n-2.
/// Transitions into the absorbing masks contribute to the fixation rhs.
void solve_dense(const std::vector<std::vector<Transition>>& transitions, std::uint64_t full,
                 std::vector<double>& fixation, std::vector<double>* steps) {
  const std::size_t size = static_cast<std::size_t>(full - 1);
  const std::size_t rhs_count = steps ? 2 : 1;
  std::vector<double> a(size * size, 0.0);
  std::vector<double> b(size * rhs_count, 0.0);
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    const std::size_t row = static_cast<std::size_t>(mask - 1);
    a[row * size + row] += 1.0;
    if (steps) b[row * rhs_count + 1] = 1.0;
    for (const auto& t : transitions[mask]) {
      if (t.to == full) {
        b[row * rhs_count] += t.prob;
      } else if (t.to != 0) {
        a[row * size + static_cast<std::size_t>(t.to - 1)] -= t.prob;
      }
    }
  }
  dense_solve(a, b, size, rhs_count);
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    const std::size_t row = static_cast<std::size_t>(mask - 1);
    fixation[mask] = b[row * rhs_count];
    if (steps) (*steps)[mask] = b[row * rhs_count + 1];
  }
}

/// Gauss-Seidel sweeps of x(f) = c(f) + sum P x(f') until the largest update
/// falls below tol. The effective chain has no self-loops.
void gauss_seidel(const std::vector<std::vector<Transition>>& transitions, std::uint64_t full,
                  std::vector<double>& x, double constant, double tol) {
  constexpr int kMaxSweeps = 5'000'000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double largest = 0.0;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      double acc = constant;
      for (const auto& t : transitions[mask]) acc += t.prob * x[t.to];
      largest = std::max(largest, std::abs(acc - x[mask]) / std::max(1.0, std::abs(acc)));
      x[mask] = acc;
    }
    if (largest < tol) return;
  }
}

double max_residual(const std::vector<std::vector<Transition>>& transitions, std::uint64_t full,
                    const std::vector<double>& x, double constant) {
  double worst = 0.0;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    double acc = constant;
    for (const auto& t : transitions[mask]) acc += t.prob * x[t.to];
    worst = std::max(worst, std::abs(acc - x[mask]) / std::max(1.0, std::abs(x[mask])));
  }
  return worst;
}

}  // namespace

ChainSolution solve_chain(const Graph& graph, const FitnessParams& fitness, bool want_steps) {
  fitness.validate();
  const NodeId n = graph.size();
  if (n > kMaxChainNodes) {
    throw Error(ErrorCode::TooLarge, "exact solve limited to " + std::to_string(kMaxChainNodes) +
                                         " nodes, graph has " + std::to_string(n));
  }
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  const auto transitions = effective_transitions(graph, fitness);

  ChainSolution sol;
  sol.n = n;
  sol.fixation_prob.assign(full + 1, 0.0);
  sol.fixation_prob[full] = 1.0;
  std::vector<double> steps;
  if (want_steps) steps.assign(full + 1, 0.0);

  if (n <= kMaxDenseNodes) {
    solve_dense(transitions, full, sol.fixation_prob, want_steps ? &steps : nullptr);
  } else {
    gauss_seidel(transitions, full, sol.fixation_prob, 0.0, 1e-15);
    if (want_steps) gauss_seidel(transitions, full, steps, 1.0, 1e-15);
  }
  sol.residual = max_residual(transitions, full, sol.fixation_prob, 0.0);
  if (want_steps) {
    sol.residual = std::max(sol.residual, max_residual(transitions, full, steps, 1.0));
    sol.expected_steps = std::move(steps);
  }
  return sol;
}

std::vector<double> solve_all_steps_chain(const Graph& graph, const FitnessParams& fitness) {
  fitness.validate();
  const NodeId n = graph.size();
  if (n > kMaxDenseNodes) {
    throw Error(ErrorCode::TooLarge, "all-steps chain limited to " + std::to_string(kMaxDenseNodes) + " nodes");
  }
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<std::vector<Transition>> transitions(full + 1);
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    const auto config = Configuration::from_mask(n, mask);
    double stay = 0.0;
    for (const auto& e : naive_pair_distribution(graph, config, fitness)) {
      if (config[e.reproducer] == config[e.replaced]) {
        stay += e.probability;
        continue;
      }
      const std::uint64_t bit = std::uint64_t{1} << e.replaced;
      const std::uint64_t to = config[e.reproducer] == Type::t1 ? (mask | bit) : (mask & ~bit);
      transitions[mask].push_back({to, e.probability});
    }
    transitions[mask].push_back({mask, stay});
  }
  std::vector<double> fixation(full + 1, 0.0);
  fixation[full] = 1.0;
  solve_dense(transitions, full, fixation, nullptr);
  return fixation;
}

double complete_graph_closed_form(NodeId n, double r) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidFitness, "r must be positive");
  if (r == 1.0) throw Error(ErrorCode::NeutralRate, "closed form undefined at r = 1 (answer is 1/n)");
  return (1.0 - 1.0 / r) / (1.0 - std::pow(r, -static_cast<double>(n)));
}

double gamblers_ruin_absorption(double p, NodeId n) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1)");
  if (p == 0.5) throw Error(ErrorCode::UnbiasedWalk, "p = 1/2 has no biased closed form");
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be at least 2");
  const double q = (1.0 - p) / p;
  const double nn = static_cast<double>(n);
  if (q > 1.0) {
    // Divide through by q^n to stay finite for long walks.
    const double tail = std::pow(q, -nn);
    return (std::pow(q, -2.0) - tail) / (1.0 - tail);
  }
  return (std::pow(q, nn - 2.0) - 1.0) / (std::pow(q, nn) - 1.0);
}

double first_step_extinction_prob(const Graph& graph, const FitnessParams& fitness) {
  fitness.validate();
  const double r = fitness.r;
  double survive = 0.0;
  for (NodeId v = 0; v < graph.size(); ++v) {
    double q = 0.0;
    for (NodeId u : graph.neighbors(v)) q += 1.0 / graph.degree(u);
    survive += 1.0 / (r + q);
  }
  return 1.0 - r / graph.size() * survive;
}

const char* problem_name(Problem p) {
  switch (p) {
    case Problem::FixationT1: return "fixation-t1";
    case Problem::ExtinctionT1: return "extinction-t1";
    case Problem::ExtinctionT2: return "extinction-t2";
  }
  return "unknown";
}

double averaged_problem(const ChainSolution& solution, Problem problem) {
  const NodeId n = solution.n;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  double sum = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const std::uint64_t bit = std::uint64_t{1} << v;
    switch (problem) {
      case Problem::FixationT1: sum += solution.fixation(bit); break;
      case Problem::ExtinctionT1: sum += solution.fixation(full & ~bit); break;
      case Problem::ExtinctionT2: sum += 1.0 - solution.fixation(bit); break;
    }
  }
  return sum / n;
}

double averaged_problem(const Graph& graph, const FitnessParams& fitness, Problem problem) {
  return averaged_problem(solve_chain(graph, fitness, false), problem);
}

HorizonOutcome horizon_fixation(const Graph& graph, const FitnessParams& fitness,
                                const std::vector<std::pair<std::uint64_t, double>>& initial,
                                std::uint64_t horizon) {
  fitness.validate();
  const NodeId n = graph.size();
  if (n > kMaxChainNodes) throw Error(ErrorCode::TooLarge, "horizon solve limited to 14 nodes");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  const auto transitions = effective_transitions(graph, fitness);
  std::vector<double> dist(full + 1, 0.0);
  for (auto [mask, p] : initial) dist.at(mask) += p;
  for (std::uint64_t step = 0; step < horizon; ++step) {
    std::vector<double> next(full + 1, 0.0);
    next[0] = dist[0];
    next[full] = dist[full];
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      if (dist[mask] == 0.0) continue;
      for (const auto& t : transitions[mask]) next[t.to] += dist[mask] * t.prob;
    }
    dist.swap(next);
  }
  return {dist[full], dist[0]};
}

std::vector<std::pair<std::uint64_t, double>> single_start_masks(NodeId n, Type t) {
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<std::pair<std::uint64_t, double>> out;
  for (NodeId v = 0; v < n; ++v) {
    const std::uint64_t bit = std::uint64_t{1} << v;
    out.emplace_back(t == Type::t1 ? bit : (full & ~bit), 1.0 / n);
  }
  return out;
}

}  // namespace moran
