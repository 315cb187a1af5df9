#include "autofill/graph.hpp"

#include <algorithm>
#include <cassert>
#include <deque>

namespace autofill {

VertexId::VertexId(std::string id) : id_(std::move(id)) {
  if (id_.empty()) {
    throw std::invalid_argument("vertex id must be non-empty");
  }
}

DepGraph DepGraph::build(std::vector<VertexId> vertices, const std::vector<Edge> &edges) {
  if (vertices.empty()) {
    throw GraphError(GraphError::Kind::EmptyVertexSet, "", "graph needs at least one vertex");
  }
  std::sort(vertices.begin(), vertices.end());
  if (auto dup = std::adjacent_find(vertices.begin(), vertices.end()); dup != vertices.end()) {
    throw GraphError(GraphError::Kind::DuplicateVertex, dup->str(),
                     "duplicate vertex '" + dup->str() + "'");
  }

  DepGraph g;
  g.vertices_ = std::move(vertices);
  for (VertexIndex i = 0; i < g.vertices_.size(); ++i) {
    g.index_.emplace(g.vertices_[i], i);
  }
  g.out_.resize(g.vertices_.size());
  g.in_.resize(g.vertices_.size());

  for (const auto &[from, to] : edges) {
    if (from == to) {
      throw GraphError(GraphError::Kind::SelfLoop, from.str(),
                       "self-loop on '" + from.str() + "'");
    }
    const VertexIndex a = g.index_of(from);
    const VertexIndex b = g.index_of(to);
    g.out_[a].push_back(b);
    g.in_[b].push_back(a);
  }
  for (auto *lists : {&g.out_, &g.in_}) {
    for (auto &l : *lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  }
  for (const auto &l : g.out_) {
    g.edge_count_ += l.size();
  }
  return g;
}

VertexIndex DepGraph::index_of(const VertexId &v) const {
  auto it = index_.find(v);
  if (it == index_.end()) {
    throw GraphError(GraphError::Kind::UnknownVertex, v.str(), "unknown vertex '" + v.str() + "'");
  }
  return it->second;
}

bool DepGraph::has_edge(VertexIndex from, VertexIndex to) const {
  const auto &succ = out_.at(from);
  return std::binary_search(succ.begin(), succ.end(), to);
}

std::vector<Edge> DepGraph::edges() const {
  std::vector<Edge> result;
  result.reserve(edge_count_);
  for (VertexIndex i = 0; i < out_.size(); ++i) {
    for (VertexIndex j : out_[i]) {
      result.emplace_back(vertices_[i], vertices_[j]);
    }
  }
  return result;
}

DepGraph DepGraph::without_edges_into(const VertexSet &heads) const {
  const auto drop = membership(heads);
  DepGraph g = *this;
  g.edge_count_ = 0;
  for (VertexIndex i = 0; i < g.out_.size(); ++i) {
    std::erase_if(g.out_[i], [&](VertexIndex j) { return drop[j]; });
    g.edge_count_ += g.out_[i].size();
    if (drop[i]) {
      g.in_[i].clear();
    }
  }
  return g;
}

std::vector<bool> DepGraph::membership(const VertexSet &s) const {
  std::vector<bool> in(size(), false);
  for (const auto &v : s) {
    in[index_of(v)] = true;
  }
  return in;
}

VertexSet DepGraph::to_set(const std::vector<bool> &membership) const {
  VertexSet s;
  for (VertexIndex i = 0; i < membership.size(); ++i) {
    if (membership[i]) {
      s.insert(vertices_[i]);
    }
  }
  return s;
}

std::vector<std::size_t> Condensation::source_components() const {
  std::vector<bool> has_incoming(components.size(), false);
  for (const auto &[from, to] : quotient_edges) {
    has_incoming[to] = true;
  }
  std::vector<std::size_t> result;
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (!has_incoming[c]) {
      result.push_back(c);
    }
  }
  return result;
}

DepGraph Condensation::quotient_graph() const {
  // Zero-padded so the lexicographic vertex order matches component order.
  const std::size_t width = std::to_string(components.size()).size();
  auto name = [&](std::size_t c) {
    std::string digits = std::to_string(c);
    return VertexId("C" + std::string(width - digits.size(), '0') + digits);
  };
  std::vector<VertexId> vs;
  for (std::size_t c = 0; c < components.size(); ++c) {
    vs.push_back(name(c));
  }
  std::vector<Edge> es;
  for (const auto &[from, to] : quotient_edges) {
    es.emplace_back(name(from), name(to));
  }
  return DepGraph::build(std::move(vs), es);
}

VertexSet in_set(const DepGraph &g, const VertexId &v) {
  VertexSet result;
  for (VertexIndex w : g.predecessors(g.index_of(v))) {
    result.insert(g.vertex(w));
  }
  return result;
}

VertexSet sources(const DepGraph &g) {
  // Zero columns of the adjacency matrix.
  VertexSet result;
  for (VertexIndex i = 0; i < g.size(); ++i) {
    if (g.predecessors(i).empty()) {
      result.insert(g.vertex(i));
    }
  }
  return result;
}

AdjMatrix adjacency_matrix(const DepGraph &g) {
  AdjMatrix m;
  m.n = g.size();
  m.entries.assign(m.n, std::vector<long long>(m.n, 0));
  for (VertexIndex i = 0; i < g.size(); ++i) {
    for (VertexIndex j : g.successors(i)) {
      m.entries[i][j] = 1;
    }
  }
  return m;
}

std::vector<bool> reachable_from(const DepGraph &g, VertexIndex from) {
  std::vector<bool> seen(g.size(), false);
  std::deque<VertexIndex> queue;
  for (VertexIndex s : g.successors(from)) {
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const VertexIndex v = queue.front();
    queue.pop_front();
    for (VertexIndex s : g.successors(v)) {
      if (!seen[s]) {
        seen[s] = true;
        queue.push_back(s);
      }
    }
  }
  return seen;
}

bool has_path(const DepGraph &g, const VertexId &x, const VertexId &y) {
  const VertexIndex to = g.index_of(y);
  return reachable_from(g, g.index_of(x))[to];
}

bool is_dag(const DepGraph &g) {
  // Kahn's algorithm: acyclic iff every vertex gets removed.
  std::vector<std::size_t> indegree(g.size());
  std::vector<VertexIndex> ready;
  for (VertexIndex i = 0; i < g.size(); ++i) {
    indegree[i] = g.predecessors(i).size();
    if (indegree[i] == 0) {
      ready.push_back(i);
    }
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const VertexIndex v = ready.back();
    ready.pop_back();
    ++removed;
    for (VertexIndex s : g.successors(v)) {
      if (--indegree[s] == 0) {
        ready.push_back(s);
      }
    }
  }
  return removed == g.size();
}

namespace {

// Recursive Tarjan over an index subset (`allowed`), so Johnson's search can
// reuse it on induced subgraphs.
class TarjanRun {
public:
  TarjanRun(const DepGraph &g, const std::vector<bool> &allowed)
      : g_(g), allowed_(allowed), number_(g.size(), -1), low_(g.size(), -1),
        on_stack_(g.size(), false) {}

  std::vector<std::vector<VertexIndex>> run() {
    for (VertexIndex v = 0; v < g_.size(); ++v) {
      if (allowed_[v] && number_[v] == -1) {
        visit(v);
      }
    }
    return std::move(components_);
  }

private:
  void visit(VertexIndex v) {
    number_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (VertexIndex w : g_.successors(v)) {
      if (!allowed_[w]) {
        continue;
      }
      if (number_[w] == -1) {
        visit(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], number_[w]);
      }
    }
    if (low_[v] == number_[v]) {
      std::vector<VertexIndex> component;
      VertexIndex w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = false;
        component.push_back(w);
      } while (w != v);
      std::sort(component.begin(), component.end());
      components_.push_back(std::move(component));
    }
  }

  const DepGraph &g_;
  const std::vector<bool> &allowed_;
  std::vector<int> number_;
  std::vector<int> low_;
  std::vector<bool> on_stack_;
  std::vector<VertexIndex> stack_;
  std::vector<std::vector<VertexIndex>> components_;
  int counter_ = 0;
};

std::vector<std::vector<VertexIndex>> tarjan(const DepGraph &g, const std::vector<bool> &allowed) {
  auto comps = TarjanRun(g, allowed).run();
  std::sort(comps.begin(), comps.end(),
            [](const auto &a, const auto &b) { return a.front() < b.front(); });
  return comps;
}

// Johnson's elementary-circuit enumeration. For each start vertex s (in
// index order), circuits through s are searched in the SCC containing s of
// the subgraph induced by vertices >= s.
class CircuitSearch {
public:
  explicit CircuitSearch(const DepGraph &g)
      : g_(g), blocked_(g.size(), false), block_map_(g.size()) {}

  std::vector<std::vector<VertexIndex>> run() {
    const std::size_t n = g_.size();
    for (VertexIndex s = 0; s < n; ++s) {
      std::vector<bool> allowed(n, false);
      for (VertexIndex v = s; v < n; ++v) {
        allowed[v] = true;
      }
      component_.assign(n, false);
      for (const auto &comp : tarjan(g_, allowed)) {
        if (comp.front() == s) {
          for (VertexIndex v : comp) {
            component_[v] = true;
          }
        }
      }
      if (!component_[s]) {
        continue;
      }
      for (VertexIndex v = 0; v < n; ++v) {
        if (component_[v]) {
          blocked_[v] = false;
          block_map_[v].clear();
        }
      }
      start_ = s;
      circuit(s);
    }
    return std::move(circuits_);
  }

private:
  bool circuit(VertexIndex v) {
    bool found = false;
    path_.push_back(v);
    blocked_[v] = true;
    for (VertexIndex w : g_.successors(v)) {
      if (!component_[w]) {
        continue;
      }
      if (w == start_) {
        circuits_.push_back(path_);
        found = true;
      } else if (!blocked_[w] && circuit(w)) {
        found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (VertexIndex w : g_.successors(v)) {
        if (component_[w]) {
          block_map_[w].insert(v);
        }
      }
    }
    path_.pop_back();
    return found;
  }

  void unblock(VertexIndex u) {
    blocked_[u] = false;
    auto pending = std::move(block_map_[u]);
    block_map_[u].clear();
    for (VertexIndex w : pending) {
      if (blocked_[w]) {
        unblock(w);
      }
    }
  }

  const DepGraph &g_;
  std::vector<bool> blocked_;
  std::vector<std::set<VertexIndex>> block_map_;
  std::vector<bool> component_;
  std::vector<VertexIndex> path_;
  std::vector<std::vector<VertexIndex>> circuits_;
  VertexIndex start_ = 0;
};

} // namespace

std::vector<Cycle> minimal_cycles(const DepGraph &g) {
  std::map<std::vector<VertexIndex>, std::vector<VertexIndex>> by_members;
  for (auto &witness : CircuitSearch(g).run()) {
    std::vector<VertexIndex> key = witness;
    std::sort(key.begin(), key.end());
    by_members.emplace(std::move(key), std::move(witness));
  }

  std::vector<std::pair<std::vector<VertexIndex>, std::vector<VertexIndex>>> ordered(
      by_members.begin(), by_members.end());
  // Index order equals VertexId order, so sorting index keys is the
  // lexicographic member order.
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto &a, const auto &b) {
    return a.first.size() < b.first.size();
  });

  std::vector<Cycle> result;
  result.reserve(ordered.size());
  for (const auto &[members, witness] : ordered) {
    Cycle c;
    for (VertexIndex v : members) {
      c.members.insert(g.vertex(v));
    }
    for (VertexIndex v : witness) {
      c.witness.push_back(g.vertex(v));
    }
    assert(c.members.size() >= 2);
    result.push_back(std::move(c));
  }
  return result;
}

std::vector<VertexSet> scc(const DepGraph &g) {
  std::vector<VertexSet> result;
  for (const auto &comp : tarjan(g, std::vector<bool>(g.size(), true))) {
    VertexSet s;
    for (VertexIndex v : comp) {
      s.insert(g.vertex(v));
    }
    result.push_back(std::move(s));
  }
  return result;
}

Condensation condense(const DepGraph &g) {
  Condensation c;
  c.components = scc(g);
  for (std::size_t i = 0; i < c.components.size(); ++i) {
    for (const auto &v : c.components[i]) {
      c.component_of.emplace(v, i);
    }
  }
  for (const auto &[from, to] : g.edges()) {
    const std::size_t a = c.component_of.at(from);
    const std::size_t b = c.component_of.at(to);
    if (a != b) {
      c.quotient_edges.emplace(a, b);
    }
  }
  assert(is_dag(c.quotient_graph()));
  return c;
}

} // namespace autofill
