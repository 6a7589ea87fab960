#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace moran {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable simple connected undirected graph in compressed adjacency form.
///
/// Every undirected edge {u, v} appears as two arcs, u->v and v->u. Arcs of a
/// node are contiguous and sorted by target, and each arc knows the index of
/// its reverse arc, so per-edge state can be kept in flat arrays of length 2m.
class Graph {
 public:
  /// Validates the edge list and builds the graph. Throws moran::Error with
  /// EmptyGraph, NodeIdOutOfRange, SelfLoop, DuplicateEdge or
  /// DisconnectedGraph.
  static Graph from_edges(NodeId n, std::span<const Edge> edges, std::string family = "custom");

  NodeId size() const noexcept { return static_cast<NodeId>(offsets_.size() - 1); }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }
  std::uint32_t max_degree() const noexcept { return max_degree_; }
  std::uint32_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {targets_.data() + offsets_[v], degree(v)};
  }

  std::size_t arc_count() const noexcept { return targets_.size(); }
  std::size_t arc_begin(NodeId v) const noexcept { return offsets_[v]; }
  std::size_t arc_end(NodeId v) const noexcept { return offsets_[v + 1]; }
  NodeId arc_source(std::size_t arc) const noexcept { return arcs_[arc].source; }
  NodeId arc_target(std::size_t arc) const noexcept { return arcs_[arc].target; }
  std::size_t arc_reverse(std::size_t arc) const noexcept { return arcs_[arc].reverse; }

  /// Each undirected edge once, with first < second, in sorted order.
  std::vector<Edge> edges() const;

  /// Sorted distinct degrees present in the graph.
  std::vector<std::uint32_t> distinct_degrees() const;

  const std::string& family() const noexcept { return family_; }

 private:
  Graph() = default;

  std::vector<std::uint32_t> offsets_;
  std::vector<NodeId> targets_;  // neighbors(v) views into this
  struct Arc {
    NodeId source;
    NodeId target;
    std::uint32_t reverse;
  };
  std::vector<Arc> arcs_;  // same order as targets_, kept together for locality
  std::uint32_t max_degree_ = 0;
  std::string family_;
};

/// Same as Graph::from_edges.
Graph validate_graph(std::span<const Edge> edges, NodeId n);

/// Reads the edge-list text format: a header "n m", then m lines "u v" with
/// 0-based ids. Anything after '#' on a line is ignored.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& graph);

enum class Family { Complete, Star, Line, Cycle, LowerBound };

struct FamilyParams {
  NodeId n = 0;
  std::uint32_t delta = 0;  // only used by LowerBound
};

Family parse_family(const std::string& name);
std::string family_name(Family family);

/// Builds a member of a graph family. Throws InvalidFamilyParams when the
/// parameters are outside the family's domain.
///
/// LowerBound(delta, n) is the stars-on-a-cycle graph joined to a line:
/// x = floor(n / (2 delta - 2)) centers c_1..c_x on a cycle, delta - 2 leaves on
/// each of c_2..c_x, and a line of n - s nodes hanging off c_1, where
/// s = (x - 1)(delta - 1) + 1. Node ids: centers first, then leaves grouped by
/// center, then the line in order.
Graph gen_family(Family family, const FamilyParams& params);

struct LowerBoundLayout {
  std::uint32_t centers = 0;     // x
  std::uint32_t star_nodes = 0;  // s
  std::uint32_t line_nodes = 0;  // n - s
};

LowerBoundLayout lower_bound_layout(std::uint32_t delta, NodeId n);

}  // namespace moran
