#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "moran/estimator.hpp"
#include "moran/graph.hpp"

namespace moran::report {

nlohmann::json graph_summary(const Graph& graph);

/// Wilson score interval for a binomial proportion at ~95% coverage.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials);

nlohmann::json estimate_result(const EstimateResult& result, const std::string& problem);

nlohmann::json stats_result(const FixationTimeStats& stats, const std::vector<int>& xs);

struct BenchRow {
  NodeId n = 0;
  std::string backend;
  double mean_steps = 0.0;
  double mean_ms = 0.0;
};

/// "n,backend,mean_steps,mean_ms" header plus one line per row.
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace moran::report
