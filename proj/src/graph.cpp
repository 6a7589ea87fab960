#include "moran/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "moran/error.hpp"

namespace moran {

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges, std::string family) {
  if (n < 2) throw Error(ErrorCode::EmptyGraph, "graph needs at least 2 nodes, got " + std::to_string(n));

  std::vector<Edge> normalized;
  normalized.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw Error(ErrorCode::NodeIdOutOfRange,
                  "edge (" + std::to_string(u) + ", " + std::to_string(v) + ") with n = " + std::to_string(n));
    }
    if (u == v) throw Error(ErrorCode::SelfLoop, "self-loop at node " + std::to_string(u));
    normalized.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(normalized.begin(), normalized.end());
  if (auto dup = std::adjacent_find(normalized.begin(), normalized.end()); dup != normalized.end()) {
    throw Error(ErrorCode::DuplicateEdge,
                "edge (" + std::to_string(dup->first) + ", " + std::to_string(dup->second) + ") repeated");
  }

  Graph g;
  g.family_ = std::move(family);
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (auto [u, v] : normalized) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());

  const std::size_t arcs = normalized.size() * 2;
  g.targets_.resize(arcs);
  g.arcs_.resize(arcs);
  std::vector<std::uint32_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Visiting the sorted pairs fills every adjacency list in increasing order:
  // for node w, partners u < w arrive (as .second) before partners v > w.
  for (auto [u, v] : normalized) {
    g.targets_[fill[u]] = v;
    g.arcs_[fill[u]++] = {u, v, 0};
    g.targets_[fill[v]] = u;
    g.arcs_[fill[v]++] = {v, u, 0};
  }
  for (NodeId v = 0; v < n; ++v) g.max_degree_ = std::max(g.max_degree_, g.degree(v));

  for (auto& arc : g.arcs_) {
    const auto nbrs = g.neighbors(arc.target);
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), arc.source);
    arc.reverse = g.offsets_[arc.target] + static_cast<std::uint32_t>(it - nbrs.begin());
  }

  // Connectivity by BFS from node 0.
  std::vector<char> seen(n, 0);
  std::vector<NodeId> queue{0};
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (NodeId w : g.neighbors(queue[head])) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  if (queue.size() != n) {
    const auto missing = static_cast<NodeId>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
    throw Error(ErrorCode::DisconnectedGraph, "node " + std::to_string(missing) + " unreachable from node 0");
  }
  return g;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t arc = 0; arc < arc_count(); ++arc) {
    if (arcs_[arc].source < arcs_[arc].target) out.emplace_back(arcs_[arc].source, arcs_[arc].target);
  }
  return out;
}

std::vector<std::uint32_t> Graph::distinct_degrees() const {
  std::vector<std::uint32_t> degs;
  for (NodeId v = 0; v < size(); ++v) degs.push_back(degree(v));
  std::sort(degs.begin(), degs.end());
  degs.erase(std::unique(degs.begin(), degs.end()), degs.end());
  return degs;
}

Graph validate_graph(std::span<const Edge> edges, NodeId n) { return Graph::from_edges(n, edges); }

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool next_data_line(std::istream& in, std::istringstream& fields, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fields.clear();
    fields.str(line);
    return true;
  }
  return false;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::size_t line_no = 0;
  std::istringstream fields;
  if (!next_data_line(in, fields, line_no)) throw Error(ErrorCode::ParseError, "missing 'n m' header");
  long long n = -1;
  long long m = -1;
  std::string extra;
  if (!(fields >> n >> m) || (fields >> extra) || n < 0 || m < 0) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'n m'");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_data_line(in, fields, line_no)) {
      throw Error(ErrorCode::ParseError,
                  "expected " + std::to_string(m) + " edges, found " + std::to_string(i));
    }
    long long u = -1;
    long long v = -1;
    if (!(fields >> u >> v) || (fields >> extra) || u < 0 || v < 0) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'u v'");
    }
    if (u >= n || v >= n) {
      throw Error(ErrorCode::NodeIdOutOfRange, "line " + std::to_string(line_no) + ": node id >= n");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  if (next_data_line(in, fields, line_no)) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": trailing data after " +
                                           std::to_string(m) + " edges");
  }
  return Graph::from_edges(static_cast<NodeId>(n), edges, "file");
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << graph.size() << ' ' << graph.edge_count() << '\n';
  for (auto [u, v] : graph.edges()) out << u << ' ' << v << '\n';
}

Family parse_family(const std::string& name) {
  if (name == "complete") return Family::Complete;
  if (name == "star") return Family::Star;
  if (name == "line") return Family::Line;
  if (name == "cycle") return Family::Cycle;
  if (name == "lower_bound" || name == "lower-bound") return Family::LowerBound;
  throw Error(ErrorCode::InvalidFamilyParams, "unknown family '" + name + "'");
}

std::string family_name(Family family) {
  switch (family) {
    case Family::Complete: return "complete";
    case Family::Star: return "star";
    case Family::Line: return "line";
    case Family::Cycle: return "cycle";
    case Family::LowerBound: return "lower_bound";
  }
  return "unknown";
}

LowerBoundLayout lower_bound_layout(std::uint32_t delta, NodeId n) {
  if (delta <= 2 || static_cast<std::uint64_t>(n) <= 4ULL * delta) {
    throw Error(ErrorCode::InvalidFamilyParams,
                "lower_bound needs delta > 2 and n > 4*delta (delta = " + std::to_string(delta) +
                    ", n = " + std::to_string(n) + ")");
  }
  LowerBoundLayout layout;
  layout.centers = n / (2 * delta - 2);
  layout.star_nodes = (layout.centers - 1) * (delta - 1) + 1;
  if (layout.star_nodes >= n) {
    throw Error(ErrorCode::InvalidFamilyParams, "lower_bound leaves no line nodes");
  }
  layout.line_nodes = n - layout.star_nodes;
  return layout;
}

Graph gen_family(Family family, const FamilyParams& params) {
  const NodeId n = params.n;
  if (family != Family::LowerBound && n < 2) {
    throw Error(ErrorCode::InvalidFamilyParams, family_name(family) + " needs n >= 2");
  }
  if (family == Family::Cycle && n < 3) {
    throw Error(ErrorCode::InvalidFamilyParams, "cycle needs n >= 3");
  }
  std::vector<Edge> edges;
  switch (family) {
    case Family::Complete:
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
      break;
    case Family::Star:
      for (NodeId v = 1; v < n; ++v) edges.emplace_back(0, v);
      break;
    case Family::Line:
      for (NodeId v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
      break;
    case Family::Cycle:
      for (NodeId v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
      edges.emplace_back(n - 1, 0);
      break;
    case Family::LowerBound: {
      const std::uint32_t delta = params.delta;
      const auto layout = lower_bound_layout(delta, n);
      const NodeId x = layout.centers;
      // With only two centers the cycle collapses to the single edge c_1 c_2.
      for (NodeId i = 0; i + 1 < x; ++i) edges.emplace_back(i, i + 1);
      if (x >= 3) edges.emplace_back(x - 1, 0);
      NodeId next = x;
      for (NodeId c = 1; c < x; ++c) {
        for (std::uint32_t leaf = 0; leaf < delta - 2; ++leaf) edges.emplace_back(c, next++);
      }
      const NodeId line_start = next;
      edges.emplace_back(0, line_start);
      for (NodeId v = line_start + 1; v < n; ++v) edges.emplace_back(v - 1, v);
      break;
    }
  }
  return Graph::from_edges(n, edges, family_name(family));
}

}  // namespace moran
