#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autofill {

/// Identifier of a field / graph vertex. Non-empty; ordered lexicographically,
/// and that order is the tie-break used by every deterministic choice in the
/// library.
class VertexId {
public:
  VertexId() = delete;
  explicit VertexId(std::string id);
  VertexId(const char *id) : VertexId(std::string(id)) {}

  const std::string &str() const noexcept { return id_; }

  friend bool operator==(const VertexId &, const VertexId &) = default;
  friend std::strong_ordering operator<=>(const VertexId &a, const VertexId &b) {
    return a.id_ <=> b.id_;
  }

private:
  std::string id_;
};

using VertexSet = std::set<VertexId>;
using Edge = std::pair<VertexId, VertexId>;

class GraphError : public std::runtime_error {
public:
  enum class Kind { SelfLoop, UnknownVertex, EmptyVertexSet, DuplicateVertex, TooLarge };

  GraphError(Kind kind, std::string vertex, const std::string &message)
      : std::runtime_error(message), kind_(kind), vertex_(std::move(vertex)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string &vertex() const noexcept { return vertex_; }

private:
  Kind kind_;
  std::string vertex_;
};

/// Dense vertex index into a DepGraph's sorted vertex list.
using VertexIndex = std::size_t;

/// Finite directed graph without self-loops. Immutable once built; vertex
/// order is the VertexId order and every index-based accessor uses it.
class DepGraph {
public:
  /// Validates and normalizes. Duplicate edges collapse silently.
  static DepGraph build(std::vector<VertexId> vertices, const std::vector<Edge> &edges);

  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<VertexId> &vertices() const noexcept { return vertices_; }
  const VertexId &vertex(VertexIndex i) const { return vertices_.at(i); }

  /// Throws GraphError(UnknownVertex) for ids not in the graph.
  VertexIndex index_of(const VertexId &v) const;
  bool contains(const VertexId &v) const { return index_.contains(v); }

  const std::vector<VertexIndex> &successors(VertexIndex i) const { return out_.at(i); }
  const std::vector<VertexIndex> &predecessors(VertexIndex i) const { return in_.at(i); }
  bool has_edge(VertexIndex from, VertexIndex to) const;

  /// Sorted edge list (by source, then target).
  std::vector<Edge> edges() const;
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// Copy with every edge whose head is in `heads` removed.
  DepGraph without_edges_into(const VertexSet &heads) const;

  /// Converts a VertexSet to a membership vector; throws on unknown ids.
  std::vector<bool> membership(const VertexSet &s) const;
  VertexSet to_set(const std::vector<bool> &membership) const;

  friend bool operator==(const DepGraph &a, const DepGraph &b) {
    return a.vertices_ == b.vertices_ && a.out_ == b.out_;
  }

private:
  DepGraph() = default;

  std::vector<VertexId> vertices_;
  std::map<VertexId, VertexIndex> index_;
  std::vector<std::vector<VertexIndex>> out_;
  std::vector<std::vector<VertexIndex>> in_;
  std::size_t edge_count_ = 0;
};

inline DepGraph build_graph(std::vector<VertexId> vertices, const std::vector<Edge> &edges) {
  return DepGraph::build(std::move(vertices), edges);
}

/// n x n matrix of non-negative counts; row/column order is the graph's
/// vertex order.
struct AdjMatrix {
  std::size_t n = 0;
  std::vector<std::vector<long long>> entries;

  long long at(std::size_t i, std::size_t j) const { return entries[i][j]; }
  friend bool operator==(const AdjMatrix &, const AdjMatrix &) = default;
};

/// An elementary cycle. Identity is the member set; the witness is one cyclic
/// vertex sequence realizing it (last -> first closes the cycle).
struct Cycle {
  VertexSet members;
  std::vector<VertexId> witness;

  friend bool operator==(const Cycle &a, const Cycle &b) { return a.members == b.members; }
};

/// SCC partition plus the quotient DAG. Components are sorted by their least
/// member; quotient edges index into `components`.
struct Condensation {
  std::vector<VertexSet> components;
  std::set<std::pair<std::size_t, std::size_t>> quotient_edges;
  std::map<VertexId, std::size_t> component_of;

  /// Components without an incoming quotient edge, in component order.
  std::vector<std::size_t> source_components() const;
  /// Quotient graph as a DepGraph over synthetic ids "C0", "C1", ...
  DepGraph quotient_graph() const;
};

VertexSet in_set(const DepGraph &g, const VertexId &v);
VertexSet sources(const DepGraph &g);
AdjMatrix adjacency_matrix(const DepGraph &g);

/// True iff a directed path of length >= 1 leads from x to y.
bool has_path(const DepGraph &g, const VertexId &x, const VertexId &y);
/// Vertices reachable from `from` by a path of length >= 1.
std::vector<bool> reachable_from(const DepGraph &g, VertexIndex from);

bool is_dag(const DepGraph &g);

/// Every elementary circuit, deduplicated by member set and sorted by size,
/// then by sorted member list.
std::vector<Cycle> minimal_cycles(const DepGraph &g);

/// Tarjan's algorithm. Each component sorted; components sorted by least member.
std::vector<VertexSet> scc(const DepGraph &g);
Condensation condense(const DepGraph &g);

} // namespace autofill
