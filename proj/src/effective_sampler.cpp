#include "moran/effective_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "moran/error.hpp"

namespace moran {

EffectiveSampler::EffectiveSampler(const Graph& graph, Configuration config, FitnessParams fitness)
    : graph_(&graph), config_(std::move(config)), fitness_(fitness) {
  fitness_.validate();
  if (config_.size() != graph.size()) {
    throw Error(ErrorCode::InvalidArgument, "configuration size does not match graph");
  }
  const auto degrees = graph.distinct_degrees();
  degree_count_ = degrees.size();
  degree_index_.assign(graph.max_degree() + 1, 0);
  for (std::uint32_t i = 0; i < degrees.size(); ++i) degree_index_[degrees[i]] = i;
  list_degree_ = degrees;

  lists_.resize(2 * degree_count_);
  copy_weight_.resize(2 * degree_count_);
  for (Type t : {Type::t1, Type::t2}) {
    for (std::uint32_t d : degrees) copy_weight_[list_index(t, d)] = fitness_.weight(t) / d;
  }

  gamma_arena_.assign(kArenaHeaderWords * graph.size() + graph.arc_count(), 0);
  for (NodeId v = 0; v < graph.size(); ++v) detail::ArenaStorage::init(gamma_arena_.data() + gamma_base(v));
  slots_.assign(graph.arc_count(), {IndexedList::kNoSlot, IndexedList::kNoSlot});
  for (std::size_t arc = 0; arc < graph.arc_count(); ++arc) {
    if (config_[graph.arc_source(arc)] != config_[graph.arc_target(arc)]) add_copy(arc);
  }
  if (fixated()) total_weight_ = 0.0;
}

void EffectiveSampler::add_copy(std::size_t arc) {
  const NodeId v = graph_->arc_source(arc);
  const std::size_t list = list_index(config_[v], graph_->degree(v));
  const auto value = static_cast<IndexedList::Value>(arc);
  slots_[arc].list = lists_[list].insert(value);
  slots_[arc].gamma = gamma_list(v).insert(value);
  total_weight_ += copy_weight_[list];
}

void EffectiveSampler::remove_copy(std::size_t arc) {
  const NodeId v = graph_->arc_source(arc);
  const std::size_t list = list_index(config_[v], graph_->degree(v));
  lists_[list].erase(slots_[arc].list, [this](IndexedList::Value a, IndexedList::Slot s) { slots_[a].list = s; });
  gamma_list(v).erase(slots_[arc].gamma, [this](IndexedList::Value a, IndexedList::Slot s) { slots_[a].gamma = s; });
  slots_[arc].list = IndexedList::kNoSlot;
  slots_[arc].gamma = IndexedList::kNoSlot;
  total_weight_ -= copy_weight_[list];
}

std::pair<NodeId, NodeId> EffectiveSampler::sample(Rng& rng) const {
  if (fixated()) throw Error(ErrorCode::Fixated, "no effective step exists in a fixated configuration");
  const double target = rng.uniform() * total_weight_;
  double acc = 0.0;
  std::size_t chosen = lists_.size();
  for (std::size_t i = 0; i < lists_.size(); ++i) {
    if (lists_[i].empty()) continue;
    chosen = i;
    acc += copy_weight_[i] * lists_[i].size();
    if (target < acc) break;
  }
  // If accumulated drift leaves target beyond the last list, the last
  // non-empty list takes the remainder.
  const NodeId v = graph_->arc_source(lists_[chosen].sample(rng));
  const NodeId u = graph_->arc_target(gamma_list(v).sample(rng));
  return {v, u};
}

void EffectiveSampler::apply_flip(NodeId u, Type new_type) {
  const Type old_type = config_[u];
  if (old_type == new_type) {
    throw Error(ErrorCode::NoOpFlip, "node " + std::to_string(u) + " already has type " + to_string(new_type));
  }
  const Graph& g = *graph_;

  // Drop every copy of u from (old_type, deg u) and rebuild Gamma_u below.
  const std::size_t old_list = list_index(old_type, g.degree(u));
  auto gamma_u = gamma_list(u);
  gamma_u.for_each([&](IndexedList::Value arc, IndexedList::Slot) {
    lists_[old_list].erase(slots_[arc].list,
                           [this](IndexedList::Value a, IndexedList::Slot s) { slots_[a].list = s; });
    slots_[arc].list = IndexedList::kNoSlot;
    slots_[arc].gamma = IndexedList::kNoSlot;
  });
  total_weight_ -= copy_weight_[old_list] * gamma_u.size();
  gamma_u.clear();

  config_.set(u, new_type);
  for (std::size_t arc = g.arc_begin(u); arc < g.arc_end(u); ++arc) {
    const NodeId w = g.arc_target(arc);
    const std::size_t back = g.arc_reverse(arc);
    if (config_[w] != new_type) {
      add_copy(arc);   // u gains w in Gamma_u
      add_copy(back);  // w gains u in Gamma_w
    } else {
      remove_copy(back);
    }
  }

  ++flips_;
  if (fixated()) {
    total_weight_ = 0.0;
  } else if (flips_ % kResyncInterval == 0) {
    total_weight_ = recomputed_total_weight();
  }
}

std::vector<EffectiveSampler::ListSummary> EffectiveSampler::lists() const {
  std::vector<ListSummary> out;
  for (Type t : {Type::t1, Type::t2}) {
    for (std::uint32_t d : list_degree_) {
      const auto i = list_index(t, d);
      out.push_back({t, d, lists_[i].size(), lists_[i].capacity(), copy_weight_[i] * lists_[i].size()});
    }
  }
  return out;
}

std::vector<NodeId> EffectiveSampler::gamma(NodeId v) const {
  std::vector<NodeId> out;
  gamma_list(v).for_each([&](IndexedList::Value arc, IndexedList::Slot) { out.push_back(graph_->arc_target(arc)); });
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t EffectiveSampler::copies(NodeId v) const {
  const auto& list = lists_[list_index(config_[v], graph_->degree(v))];
  std::uint32_t count = 0;
  list.for_each([&](IndexedList::Value arc, IndexedList::Slot) { count += graph_->arc_source(arc) == v; });
  return count;
}

std::vector<PairProbability> EffectiveSampler::exact_distribution() const {
  std::vector<PairProbability> out;
  if (fixated()) return out;
  // List selection: P(list i) = weight_i / total_weight_, with the last
  // non-empty list absorbing any drift remainder, exactly as in sample().
  std::vector<double> node_prob(graph_->size(), 0.0);
  double assigned = 0.0;
  std::size_t last = lists_.size();
  for (std::size_t i = 0; i < lists_.size(); ++i) {
    if (!lists_[i].empty()) last = i;
  }
  for (std::size_t i = 0; i < lists_.size(); ++i) {
    const auto& list = lists_[i];
    if (list.empty()) continue;
    double p_list = copy_weight_[i] * list.size() / total_weight_;
    if (i == last) p_list = std::max(0.0, 1.0 - assigned);
    assigned += p_list;
    const double per_copy = p_list / list.size();
    list.for_each([&](IndexedList::Value arc, IndexedList::Slot) { node_prob[graph_->arc_source(arc)] += per_copy; });
  }
  for (NodeId v = 0; v < graph_->size(); ++v) {
    if (node_prob[v] == 0.0) continue;
    const double per_target = node_prob[v] / gamma_list(v).size();
    for (NodeId u : gamma(v)) out.push_back({v, u, per_target});
  }
  return out;
}

double EffectiveSampler::recomputed_total_weight() const {
  double total = 0.0;
  for (std::size_t i = 0; i < lists_.size(); ++i) total += copy_weight_[i] * lists_[i].size();
  return total;
}

std::uint64_t EffectiveSampler::list_work() const {
  std::uint64_t work = 0;
  for (const auto& l : lists_) work += l.work();
  work += gamma_work_;
  return work;
}

std::optional<std::string> EffectiveSampler::verify() const {
  const Graph& g = *graph_;
  std::ostringstream why;
  auto check_list = [&](const auto& list, const char* what, std::size_t index) -> bool {
    std::uint32_t live = 0;
    list.for_each([&](IndexedList::Value, IndexedList::Slot) { ++live; });
    if (live != list.size()) {
      why << what << ' ' << index << ": size " << list.size() << " but " << live << " live slots";
      return false;
    }
    if (list.size() > 0 && 2ULL * list.size() < list.capacity()) {
      why << what << ' ' << index << ": occupancy below one half";
      return false;
    }
    if (list.free_chain_length() != list.capacity() - list.size()) {
      why << what << ' ' << index << ": free chain does not cover the null slots";
      return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < lists_.size(); ++i) {
    if (!check_list(lists_[i], "list", i)) return why.str();
  }
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!check_list(gamma_list(v), "gamma", v)) return why.str();
  }

  std::uint64_t bichromatic_arcs = 0;
  for (std::size_t arc = 0; arc < g.arc_count(); ++arc) {
    const NodeId v = g.arc_source(arc);
    const bool bichromatic = config_[v] != config_[g.arc_target(arc)];
    bichromatic_arcs += bichromatic;
    const auto& list = lists_[list_index(config_[v], g.degree(v))];
    if (!bichromatic) {
      if (slots_[arc].list != IndexedList::kNoSlot || slots_[arc].gamma != IndexedList::kNoSlot) {
        why << "arc " << arc << " is monochromatic but still indexed";
        return why.str();
      }
      continue;
    }
    if (!list.live(slots_[arc].list) || list.at(slots_[arc].list) != arc) {
      why << "arc " << arc << " missing from list (" << to_string(config_[v]) << ", " << g.degree(v) << ")";
      return why.str();
    }
    const auto gamma_v = gamma_list(v);
    if (!gamma_v.live(slots_[arc].gamma) || gamma_v.at(slots_[arc].gamma) != arc) {
      why << "arc " << arc << " missing from gamma(" << v << ")";
      return why.str();
    }
  }
  std::uint64_t list_total = 0;
  for (const auto& l : lists_) list_total += l.size();
  std::uint64_t gamma_total = 0;
  for (NodeId v = 0; v < g.size(); ++v) gamma_total += gamma_list(v).size();
  if (list_total != bichromatic_arcs || gamma_total != bichromatic_arcs) {
    why << "copy count " << list_total << " / gamma total " << gamma_total << " but " << bichromatic_arcs
        << " bichromatic arcs";
    return why.str();
  }
  const double exact = recomputed_total_weight();
  if (std::abs(total_weight_ - exact) > 1e-9 * std::max(1.0, exact)) {
    why << "total weight " << total_weight_ << " drifted from " << exact;
    return why.str();
  }
  if ((total_weight_ == 0.0) != fixated()) {
    why << "total weight " << total_weight_ << " inconsistent with fixation state";
    return why.str();
  }
  return std::nullopt;
}

std::optional<std::string> structural_difference(const EffectiveSampler& a, const EffectiveSampler& b,
                                                 double rel_tol) {
  std::ostringstream why;
  if (&a.graph() != &b.graph() && a.graph().edges() != b.graph().edges()) return "different graphs";
  if (!(a.config() == b.config())) return "different configurations";
  const auto la = a.lists();
  const auto lb = b.lists();
  if (la.size() != lb.size()) return "different list layouts";
  auto close = [rel_tol](double x, double y) { return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)}); };
  for (std::size_t i = 0; i < la.size(); ++i) {
    if (la[i].type != lb[i].type || la[i].degree != lb[i].degree) return "different list keys";
    if (la[i].live != lb[i].live) {
      why << "list (" << to_string(la[i].type) << ", " << la[i].degree << ") live " << la[i].live << " vs "
          << lb[i].live;
      return why.str();
    }
    if (!close(la[i].weight, lb[i].weight)) {
      why << "list (" << to_string(la[i].type) << ", " << la[i].degree << ") weight " << la[i].weight << " vs "
          << lb[i].weight;
      return why.str();
    }
  }
  if (!close(a.total_weight(), b.total_weight())) {
    why << "total weight " << a.total_weight() << " vs " << b.total_weight();
    return why.str();
  }
  for (NodeId v = 0; v < a.graph().size(); ++v) {
    if (a.gamma(v) != b.gamma(v)) {
      why << "gamma(" << v << ") differs";
      return why.str();
    }
  }
  return std::nullopt;
}

}  // namespace moran
