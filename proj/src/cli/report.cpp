#include "moran/report.hpp"

#include <cmath>
#include <charconv>
#include <sstream>

namespace moran::report {

using nlohmann::json;

json graph_summary(const Graph& graph) {
  return {{"n", graph.size()},
          {"m", graph.edge_count()},
          {"max_degree", graph.max_degree()},
          {"family", graph.family()}};
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

json estimate_result(const EstimateResult& result, const std::string& problem) {
  json out{{"kind", "estimate"},
           {"problem", problem},
           {"value", result.value ? json(*result.value) : json(nullptr)},
           {"took_too_long", result.took_too_long},
           {"shortcut", result.shortcut},
           {"successes", result.successes},
           {"z_used", result.z_used},
           {"u_used", result.u_used}};
  if (result.value && !result.shortcut) {
    const auto [lo, hi] = wilson_interval(result.successes, result.z_used);
    out["ci95"] = {lo, hi};
  }
  return out;
}

json stats_result(const FixationTimeStats& stats, const std::vector<int>& xs) {
  json tail = json::array();
  for (std::size_t i = 0; i < stats.tail_counts.size(); ++i) {
    const auto [threshold, count] = stats.tail_counts[i];
    json row{{"threshold", threshold},
             {"exceed", count},
             {"fraction", static_cast<double>(count) / static_cast<double>(stats.samples.size())}};
    if (i < xs.size()) {
      row["x"] = xs[i];
      row["bound"] = std::ldexp(1.0, -xs[i]);
    }
    tail.push_back(row);
  }
  return {{"kind", "simulate"},
          {"trials", stats.samples.size()},
          {"mean", stats.mean},
          {"fixed_t1", stats.fixed_t1},
          {"quantiles",
           {{"p50", stats.quantile(0.5)},
            {"p90", stats.quantile(0.9)},
            {"p99", stats.quantile(0.99)},
            {"max", stats.quantile(1.0)}}},
          {"tail", tail}};
}

namespace {

// shortest text that reads back to the same double
std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "n,backend,mean_steps,mean_ms\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.backend << ',' << shortest(row.mean_steps) << ',' << shortest(row.mean_ms) << '\n';
  }
  return out.str();
}

}  // namespace moran::report
