#include <cmath>
#include <map>

#include "doctest.h"
#include "moran/dynamics.hpp"
#include "moran/error.hpp"
#include "support/graphs.hpp"

using namespace moran;
using testing::PairMap;

namespace {

const Graph& k2() {
  static const Graph g = gen_family(Family::Complete, {2});
  return g;
}

const Graph& path3() {
  static const Graph g = gen_family(Family::Line, {3});
  return g;
}

/// Pearson chi-square statistic of observed counts against probabilities.
double chi_square(const std::map<std::pair<NodeId, NodeId>, int>& counts, const PairMap& expected, int draws) {
  double chi2 = 0.0;
  for (const auto& [k, p] : expected) {
    const auto it = counts.find(k);
    const double observed = it == counts.end() ? 0.0 : it->second;
    chi2 += (observed - p * draws) * (observed - p * draws) / (p * draws);
  }
  return chi2;
}

}  // namespace

TEST_CASE("fixation_state") {
  CHECK(fixation_state(Configuration(4, Type::t1)) == FixationState::FixatedT1);
  CHECK(fixation_state(Configuration(4, Type::t2)) == FixationState::FixatedT2);
  CHECK(fixation_state(Configuration::from_mask(4, 0b0110)) == FixationState::Active);
}

TEST_CASE("steps refuse fixated configurations") {
  Rng rng(1);
  Configuration all_t1(2, Type::t1);
  for (auto fn : {naive_step, effective_step_reference}) {
    try {
      fn(k2(), all_t1, {2.0}, rng);
      FAIL("expected AlreadyFixated");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AlreadyFixated);
    }
  }
  CHECK_THROWS_AS(step_distribution(k2(), all_t1, {2.0}), Error);
}

TEST_CASE("naive step on K2 with r = 2") {
  const auto f = Configuration::from_mask(2, 0b01);
  const auto dist = testing::to_map(naive_pair_distribution(k2(), f, {2.0}));
  CHECK(dist.at({0, 1}) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(dist.at({1, 0}) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  Rng rng(5);
  int node0 = 0;
  constexpr int kDraws = 60000;
  for (int i = 0; i < kDraws; ++i) {
    Configuration c = f;
    const auto out = naive_step(k2(), c, {2.0}, rng);
    CHECK(out.effective);
    node0 += out.reproducer == 0;
    CHECK(c[out.replaced] == f[out.reproducer]);
  }
  const double sigma = std::sqrt((2.0 / 9) / kDraws);
  CHECK(std::abs(node0 / static_cast<double>(kDraws) - 2.0 / 3) < 4 * sigma);
}

TEST_CASE("naive step on path a-b-c is ineffective with probability 3/8") {
  const auto f = Configuration::from_mask(3, 0b001);
  double ineffective = 0.0;
  for (const auto& e : naive_pair_distribution(path3(), f, {2.0})) {
    if (f[e.reproducer] == f[e.replaced]) ineffective += e.probability;
  }
  CHECK(ineffective == doctest::Approx(3.0 / 8).epsilon(1e-12));
}

TEST_CASE("modified step on path a-b-c") {
  const auto f = Configuration::from_mask(3, 0b001);
  const auto dist = step_distribution(path3(), f, {2.0});
  CHECK(dist.active_weight == doctest::Approx(2.5).epsilon(1e-12));
  REQUIRE(dist.entries.size() == 2);
  const auto m = testing::to_map(dist.entries);
  CHECK(m.at({0, 1}) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(m.at({1, 0}) == doctest::Approx(0.2).epsilon(1e-12));

  Rng rng(17);
  std::map<std::pair<NodeId, NodeId>, int> counts;
  constexpr int kDraws = 50000;
  for (int i = 0; i < kDraws; ++i) {
    Configuration c = f;
    const auto out = effective_step_reference(path3(), c, {2.0}, rng);
    CHECK(out.effective);
    ++counts[{out.reproducer, out.replaced}];
  }
  CHECK(counts.size() == 2);
  CHECK(chi_square(counts, m, kDraws) < 10.83);  // 1 dof, p = 0.001
}

TEST_CASE("modified step on K2 and the 3-star") {
  const auto f = Configuration::from_mask(2, 0b01);
  CHECK(increment_probability(k2(), f, {3.0}) == doctest::Approx(0.75).epsilon(1e-12));

  const auto neutral = testing::to_map(step_distribution(k2(), f, {1.0}).entries);
  CHECK(neutral.at({0, 1}) == doctest::Approx(0.5));
  CHECK(neutral.at({1, 0}) == doctest::Approx(0.5));

  const Graph star = gen_family(Family::Star, {3});
  const auto hub = Configuration::from_mask(3, 0b001);
  const auto dist = step_distribution(star, hub, {2.0});
  CHECK(dist.active_weight == doctest::Approx(4.0));
  for (const auto& e : dist.entries) CHECK(e.probability == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(dist.entries.size() == 4);
}

TEST_CASE("nodes with empty Gamma are never selected") {
  // Path 0-1-2-3 with types t1 t1 t2 t2: nodes 0 and 3 have no foreign neighbor.
  const Graph g = gen_family(Family::Line, {4});
  const auto f = Configuration::from_mask(4, 0b0011);
  for (const auto& e : step_distribution(g, f, {2.0}).entries) {
    CHECK(e.reproducer != 0);
    CHECK(e.reproducer != 3);
  }
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    Configuration c = f;
    const auto out = effective_step_reference(g, c, {2.0}, rng);
    CHECK((out.reproducer == 1 || out.reproducer == 2));
  }
}

TEST_CASE("potential psi") {
  const Graph k4 = gen_family(Family::Complete, {4});
  CHECK(potential_psi(k4, Configuration(4, Type::t2)) == 0.0);
  CHECK(potential_psi(k4, Configuration(4, Type::t1)) == doctest::Approx(4.0 / 3));
  const Graph star = gen_family(Family::Star, {5});
  CHECK(potential_psi(star, Configuration::single(5, 0, Type::t1)) == doctest::Approx(0.25));
}

TEST_CASE("expected potential change examples") {
  const auto f = Configuration::from_mask(2, 0b01);
  CHECK(expected_potential_change(k2(), f, {2.0}) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(expected_potential_change(path3(), Configuration::from_mask(3, 0b001), {2.0}) ==
        doctest::Approx(0.2).epsilon(1e-12));
  const Graph cycle = gen_family(Family::Cycle, {6});
  for (std::uint64_t m : testing::active_masks(6)) {
    CHECK(std::abs(expected_potential_change(cycle, Configuration::from_mask(6, m), {1.0})) < 1e-12);
  }
}

TEST_CASE("increment probability examples") {
  CHECK(increment_probability(k2(), Configuration::from_mask(2, 0b01), {2.0}) ==
        doctest::Approx(2.0 / 3).epsilon(1e-12));
  const Graph cycle = gen_family(Family::Cycle, {5});
  const Graph k5 = gen_family(Family::Complete, {5});
  for (NodeId v = 0; v < 5; ++v) {
    CHECK(increment_probability(cycle, Configuration::single(5, v, Type::t1), {1.0}) == doctest::Approx(0.5));
    CHECK(increment_probability(k5, Configuration::single(5, v, Type::t1), {1.0}) == doctest::Approx(0.5));
  }
}

TEST_CASE("exhaustive properties over connected graphs with n <= 6") {
  const auto graphs = testing::all_connected_graphs_up_to(6);
  REQUIRE(graphs.size() == 1 + 4 + 38 + 728 + 26704);

  double worst_conditioned = 0.0;
  double worst_sum = 0.0;
  double worst_effective = 0.0;
  double worst_drift_margin = INFINITY;
  double worst_increment_margin = INFINITY;
  std::size_t support_mismatches = 0;

  for (const auto& g : graphs) {
    const double delta = g.max_degree();
    for (std::uint64_t mask : testing::active_masks(g.size())) {
      const auto f = Configuration::from_mask(g.size(), mask);

      for (double r : {1.0, 1.5, 2.0, 10.0}) {
        const FitnessParams fit{r};
        const auto dist = step_distribution(g, f, fit);
        const auto modified = testing::to_map(dist.entries);
        worst_conditioned = std::max(worst_conditioned, testing::max_difference(testing::conditioned_naive(g, f, fit), modified));

        double sum = 0.0;
        for (const auto& e : dist.entries) sum += e.probability;
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));

        std::size_t bichromatic = 0;
        for (std::size_t arc = 0; arc < g.arc_count(); ++arc) {
          const bool differ = f[g.arc_source(arc)] != f[g.arc_target(arc)];
          bichromatic += differ;
          if (differ && !modified.count({g.arc_source(arc), g.arc_target(arc)})) ++support_mismatches;
        }
        if (bichromatic != modified.size()) ++support_mismatches;

        double effective = 0.0;
        for (const auto& e : naive_pair_distribution(g, f, fit)) {
          if (f[e.reproducer] != f[e.replaced]) effective += e.probability;
        }
        worst_effective =
            std::max(worst_effective, std::abs(effective - active_weight(g, f, fit) / f.total_weight(fit)));
      }

      for (double r : {1.1, 2.0, 5.0}) {
        const double bound = (r - 1) / (delta * (r + 1));
        worst_drift_margin = std::min(worst_drift_margin, expected_potential_change(g, f, {r}) - bound);
      }
      for (double x : {1.0, 2.0, 4.0}) {
        const double bound = x / (x + 1);
        worst_increment_margin =
            std::min(worst_increment_margin, increment_probability(g, f, {x * delta}) - bound);
      }
    }
  }
  CHECK(worst_conditioned < 1e-12);
  CHECK(worst_sum < 1e-12);
  CHECK(worst_effective < 1e-12);
  CHECK(support_mismatches == 0);
  CHECK(worst_drift_margin >= -1e-12);
  CHECK(worst_increment_margin >= -1e-12);
}

TEST_CASE("increment probability at r = 2 Delta is at least 2/3 on larger graphs") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testing::random_connected_graph(30, 6, 20, rng);
    Configuration f(30, Type::t2);
    for (NodeId v = 0; v < 30; ++v) f.set(v, rng.below(2) ? Type::t1 : Type::t2);
    if (fixation_state(f) != FixationState::Active) continue;
    CHECK(increment_probability(g, f, {2.0 * g.max_degree()}) >= 2.0 / 3 - 1e-12);
  }
}
