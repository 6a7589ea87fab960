#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moran/configuration.hpp"
#include "moran/dynamics.hpp"
#include "moran/graph.hpp"
#include "moran/indexed_list.hpp"
#include "moran/rng.hpp"

namespace moran {

/// Weighted structure for sampling effective steps in expected O(Delta) time.
///
/// There is one IndexedList per (type, degree) pair present in the graph. A
/// node v of type t and degree d has |Gamma_v(f)| copies in list (t, d), one
/// per arc v->w with f(w) != f(v); the arc id is the stored payload. Every
/// copy in list (t, d) has weight w(t)/d, so a list's weight is
/// (w(t)/d) * size and a uniform live slot is weight-proportional over nodes.
/// Each node also keeps Gamma_v(f) as an IndexedList of the same arcs.
///
/// The graph must outlive the sampler.
class EffectiveSampler {
 public:
  /// O(m) construction.
  EffectiveSampler(const Graph& graph, Configuration config, FitnessParams fitness);

  const Graph& graph() const noexcept { return *graph_; }
  const Configuration& config() const noexcept { return config_; }
  const FitnessParams& fitness() const noexcept { return fitness_; }

  /// W'(f), maintained incrementally. Exactly 0 once fixated.
  double total_weight() const noexcept { return total_weight_; }
  bool fixated() const noexcept { return config_.count_t1() == 0 || config_.count_t2() == 0; }

  /// Draws (reproducer, replaced) from the modified-step distribution.
  /// Throws Fixated when no effective step exists.
  std::pair<NodeId, NodeId> sample(Rng& rng) const;

  /// Sets f(u) = new_type and patches lists, gammas and weights in O(deg u +
  /// sum of neighbor work). Throws NoOpFlip if u already has new_type.
  void apply_flip(NodeId u, Type new_type);

  /// sample() followed by apply_flip().
  StepOutcome step(Rng& rng) {
    const auto [v, u] = sample(rng);
    apply_flip(u, config_[v]);
    return {v, u, true};
  }

  struct ListSummary {
    Type type;
    std::uint32_t degree;
    std::uint32_t live;
    std::uint32_t capacity;
    double weight;
  };

  /// One entry per (type, degree) list, in scan order.
  std::vector<ListSummary> lists() const;

  /// Sorted members of Gamma_v(f).
  std::vector<NodeId> gamma(NodeId v) const;

  /// Number of copies of v currently stored in the type/degree lists.
  std::uint32_t copies(NodeId v) const;

  /// The exact distribution sample() draws from, read off the list weights
  /// and slot contents. Sorted by (reproducer, replaced).
  std::vector<PairProbability> exact_distribution() const;

  /// Sum of list weights computed from scratch.
  double recomputed_total_weight() const;

  /// Checks all internal bookkeeping. Returns a description of the first
  /// violation found, if any.
  std::optional<std::string> verify() const;

  std::uint64_t flips() const noexcept { return flips_; }
  std::uint64_t list_work() const;

  /// Flips between exact recomputations of total_weight().
  static constexpr std::uint64_t kResyncInterval = std::uint64_t{1} << 16;

 private:
  std::size_t list_index(Type t, std::uint32_t degree) const noexcept {
    return static_cast<std::size_t>(t) * degree_count_ + degree_index_[degree];
  }
  void add_copy(std::size_t arc);
  void remove_copy(std::size_t arc);

  const Graph* graph_;
  Configuration config_;
  FitnessParams fitness_;

  std::size_t degree_count_ = 0;
  std::vector<std::uint32_t> degree_index_;  // degree -> position among distinct degrees
  std::vector<std::uint32_t> list_degree_;   // position -> degree
  std::vector<IndexedList> lists_;
  std::vector<double> copy_weight_;

  // Gamma_v as an IndexedList over gamma_arena_: node v owns a header and
  // deg v slots at gamma_base(v), so a node's set sits in one place.
  std::size_t gamma_base(NodeId v) const noexcept { return kArenaHeaderWords * v + graph_->arc_begin(v); }
  ArenaIndexedList gamma_list(NodeId v) const noexcept {
    return ArenaIndexedList(const_cast<std::uint32_t*>(gamma_arena_.data()) + gamma_base(v), graph_->degree(v),
                            const_cast<std::uint64_t*>(&gamma_work_));
  }
  std::vector<std::uint32_t> gamma_arena_;
  std::uint64_t gamma_work_ = 0;
  struct ArcSlots {
    IndexedList::Slot list;   // in lists_[(f(source), deg source)]
    IndexedList::Slot gamma;  // in gamma(source)
  };
  std::vector<ArcSlots> slots_;  // per arc, both read on every update

  double total_weight_ = 0.0;
  std::uint64_t flips_ = 0;
};

/// Compares two samplers over the same graph: configurations, per-list live
/// counts, per-list weights and total weight (relative tolerance), and gamma
/// sets. Returns the first difference found.
std::optional<std::string> structural_difference(const EffectiveSampler& a, const EffectiveSampler& b,
                                                 double rel_tol = 1e-9);

}  // namespace moran
