#include "moran/dynamics.hpp"

#include "moran/error.hpp"

namespace moran {

namespace {

void require_active(const Configuration& config) {
  if (fixation_state(config) != FixationState::Active) {
    throw Error(ErrorCode::AlreadyFixated, "configuration is fixated for " +
                                               to_string(config.count_t1() == 0 ? Type::t2 : Type::t1));
  }
}

}  // namespace

FixationState fixation_state(const Configuration& config) {
  if (config.count_t2() == 0) return FixationState::FixatedT1;
  if (config.count_t1() == 0) return FixationState::FixatedT2;
  return FixationState::Active;
}

std::uint32_t bichromatic_degree(const Graph& graph, const Configuration& config, NodeId v) {
  std::uint32_t count = 0;
  for (NodeId u : graph.neighbors(v)) count += config[u] != config[v];
  return count;
}

double active_weight(const Graph& graph, const Configuration& config, const FitnessParams& fitness) {
  double total = 0.0;
  for (NodeId v = 0; v < graph.size(); ++v) {
    total += fitness.weight(config[v]) * bichromatic_degree(graph, config, v) / graph.degree(v);
  }
  return total;
}

StepOutcome naive_step(const Graph& graph, Configuration& config, const FitnessParams& fitness, Rng& rng) {
  require_active(config);
  const double target = rng.uniform() * config.total_weight(fitness);
  NodeId v = 0;
  double acc = 0.0;
  for (; v + 1 < graph.size(); ++v) {
    acc += fitness.weight(config[v]);
    if (target < acc) break;
  }
  const auto nbrs = graph.neighbors(v);
  const NodeId u = nbrs[rng.below(nbrs.size())];
  const bool effective = config[u] != config[v];
  config.set(u, config[v]);
  return {v, u, effective};
}

StepOutcome effective_step_reference(const Graph& graph, Configuration& config, const FitnessParams& fitness,
                                     Rng& rng) {
  require_active(config);
  std::vector<double> p(graph.size());
  double total = 0.0;
  for (NodeId v = 0; v < graph.size(); ++v) {
    p[v] = fitness.weight(config[v]) * bichromatic_degree(graph, config, v) / graph.degree(v);
    total += p[v];
  }
  const double target = rng.uniform() * total;
  NodeId v = 0;
  double acc = 0.0;
  NodeId last_positive = 0;
  for (; v < graph.size(); ++v) {
    if (p[v] <= 0.0) continue;
    last_positive = v;
    acc += p[v];
    if (target < acc) break;
  }
  if (v == graph.size()) v = last_positive;

  std::vector<NodeId> gamma;
  for (NodeId u : graph.neighbors(v)) {
    if (config[u] != config[v]) gamma.push_back(u);
  }
  const NodeId u = gamma[rng.below(gamma.size())];
  config.set(u, config[v]);
  return {v, u, true};
}

std::vector<PairProbability> naive_pair_distribution(const Graph& graph, const Configuration& config,
                                                     const FitnessParams& fitness) {
  std::vector<PairProbability> out;
  out.reserve(graph.arc_count());
  const double total = config.total_weight(fitness);
  for (NodeId v = 0; v < graph.size(); ++v) {
    const double pick = fitness.weight(config[v]) / total;
    for (NodeId u : graph.neighbors(v)) out.push_back({v, u, pick / graph.degree(v)});
  }
  return out;
}

StepDistribution step_distribution(const Graph& graph, const Configuration& config, const FitnessParams& fitness) {
  require_active(config);
  StepDistribution dist;
  std::vector<double> p(graph.size());
  std::vector<std::uint32_t> gamma(graph.size());
  for (NodeId v = 0; v < graph.size(); ++v) {
    gamma[v] = bichromatic_degree(graph, config, v);
    p[v] = fitness.weight(config[v]) * gamma[v] / graph.degree(v);
    dist.active_weight += p[v];
  }
  for (NodeId v = 0; v < graph.size(); ++v) {
    if (gamma[v] == 0) continue;
    const double pick = p[v] / dist.active_weight;
    for (NodeId u : graph.neighbors(v)) {
      if (config[u] != config[v]) dist.entries.push_back({v, u, pick / gamma[v]});
    }
  }
  return dist;
}

double potential_psi(const Graph& graph, const Configuration& config) {
  double psi = 0.0;
  for (NodeId v = 0; v < graph.size(); ++v) {
    if (config[v] == Type::t1) psi += 1.0 / graph.degree(v);
  }
  return psi;
}

double expected_potential_change(const Graph& graph, const Configuration& config, const FitnessParams& fitness) {
  double change = 0.0;
  for (const auto& e : step_distribution(graph, config, fitness).entries) {
    const double delta = 1.0 / graph.degree(e.replaced);
    change += config[e.reproducer] == Type::t1 ? e.probability * delta : -e.probability * delta;
  }
  return change;
}

double increment_probability(const Graph& graph, const Configuration& config, const FitnessParams& fitness) {
  double up = 0.0;
  for (const auto& e : step_distribution(graph, config, fitness).entries) {
    if (config[e.reproducer] == Type::t1) up += e.probability;
  }
  return up;
}

}  // namespace moran
