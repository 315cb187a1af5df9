#include "autofill/filling.hpp"

#include "autofill/subset_kernels.hpp"

#include <algorithm>

namespace autofill {

std::string_view to_string(Mode m) {
  return m == Mode::Complete ? "complete" : "partial";
}

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "complete") {
    return Mode::Complete;
  }
  if (s == "partial") {
    return Mode::Partial;
  }
  return std::nullopt;
}

namespace {

void require_subset(const DepGraph &g, const VertexSet &s) {
  for (const auto &v : s) {
    g.index_of(v);
  }
}

bool intersects(const VertexSet &a, const VertexSet &b) {
  return std::any_of(a.begin(), a.end(), [&](const VertexId &v) { return b.contains(v); });
}

bool includes(const VertexSet &super, const VertexSet &sub) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

VertexSet determined(const DepGraph &g, const VertexSet &known, Mode mode) {
  require_subset(g, known);
  VertexSet result;
  for (VertexIndex v = 0; v < g.size(); ++v) {
    const auto &in = g.predecessors(v);
    if (in.empty()) {
      continue;
    }
    auto is_known = [&](VertexIndex w) { return known.contains(g.vertex(w)); };
    const bool hit = mode == Mode::Complete ? std::all_of(in.begin(), in.end(), is_known)
                                            : std::any_of(in.begin(), in.end(), is_known);
    if (hit) {
      result.insert(g.vertex(v));
    }
  }
  return result;
}

// Vertex hitting the most cycles in `open`; lowest id on ties.
VertexId most_hitting(const std::vector<const Cycle *> &open) {
  std::map<VertexId, std::size_t> hits;
  for (const Cycle *c : open) {
    for (const auto &v : c->members) {
      ++hits[v];
    }
  }
  auto best = hits.begin();
  for (auto it = hits.begin(); it != hits.end(); ++it) {
    if (it->second > best->second) {
      best = it;
    }
  }
  return best->first;
}

void cover_cycles(const std::vector<Cycle> &cycles, VertexSet &chosen, VertexSet *added) {
  for (;;) {
    std::vector<const Cycle *> open;
    for (const auto &c : cycles) {
      if (!intersects(c.members, chosen)) {
        open.push_back(&c);
      }
    }
    if (open.empty()) {
      return;
    }
    VertexId pick = most_hitting(open);
    chosen.insert(pick);
    if (added) {
      added->insert(pick);
    }
  }
}

} // namespace

VertexSet dtm(const DepGraph &g, const VertexSet &known) {
  return determined(g, known, Mode::Complete);
}

VertexSet pdtm(const DepGraph &g, const VertexSet &known) {
  return determined(g, known, Mode::Partial);
}

ClosureTrace closure(const DepGraph &g, const VertexSet &provided, Mode mode) {
  require_subset(g, provided);
  ClosureTrace trace;
  trace.stages.push_back(provided);
  for (;;) {
    VertexSet next = trace.stages.back();
    next.merge(determined(g, trace.stages.back(), mode));
    if (next.size() == trace.stages.back().size()) {
      break;
    }
    trace.stages.push_back(std::move(next));
  }
  trace.filled = trace.fixed_point().size() == g.size();
  return trace;
}

bool is_filling(const DepGraph &g, const VertexSet &provided, Mode mode) {
  return closure(g, provided, mode).filled;
}

bool is_filling_by_cycles(const DepGraph &g, const VertexSet &provided) {
  require_subset(g, provided);
  if (!includes(provided, sources(g))) {
    return false;
  }
  const auto cycles = minimal_cycles(g);
  return std::all_of(cycles.begin(), cycles.end(),
                     [&](const Cycle &c) { return intersects(c.members, provided); });
}

bool is_filling_by_dag(const DepGraph &g, const VertexSet &provided) {
  const DepGraph pruned = g.without_edges_into(provided);
  return is_dag(pruned) && includes(provided, sources(pruned));
}

bool is_p_filling_by_scc(const DepGraph &g, const VertexSet &provided) {
  require_subset(g, provided);
  const Condensation c = condense(g);
  for (std::size_t comp : c.source_components()) {
    if (!intersects(c.components[comp], provided)) {
      return false;
    }
  }
  return true;
}

bool is_p_filling_by_path(const DepGraph &g, const VertexSet &provided) {
  const auto in = g.membership(provided);
  if (!includes(provided, sources(g))) {
    return false;
  }
  std::vector<bool> reached(g.size(), false);
  for (VertexIndex j = 0; j < g.size(); ++j) {
    if (!in[j]) {
      continue;
    }
    const auto from_j = reachable_from(g, j);
    for (VertexIndex x = 0; x < g.size(); ++x) {
      if (from_j[x]) {
        reached[x] = true;
      }
    }
  }
  for (VertexIndex x = 0; x < g.size(); ++x) {
    if (!in[x] && !reached[x]) {
      return false;
    }
  }
  return true;
}

VertexSet greedy_min_filling(const DepGraph &g) {
  VertexSet chosen = sources(g);
  cover_cycles(minimal_cycles(g), chosen, nullptr);
  return chosen;
}

std::vector<VertexSet> exact_min_fillings(const DepGraph &g, Mode mode) {
  if (g.size() > kExactSearchLimit) {
    throw GraphError(GraphError::Kind::TooLarge, "",
                     "exact search is limited to " + std::to_string(kExactSearchLimit) +
                         " vertices, graph has " + std::to_string(g.size()));
  }
  const auto table = kernels::filling_table_parallel(g, mode);
  std::vector<VertexSet> result;
  for (kernels::Mask m : kernels::minimal_masks_parallel(table, g.size())) {
    VertexSet s;
    for (VertexIndex v = 0; v < g.size(); ++v) {
      if (m & (kernels::Mask{1} << v)) {
        s.insert(g.vertex(v));
      }
    }
    result.push_back(std::move(s));
  }
  std::sort(result.begin(), result.end(), [](const VertexSet &a, const VertexSet &b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return result;
}

VertexSet min_p_filling(const DepGraph &g) {
  const Condensation c = condense(g);
  VertexSet result;
  for (std::size_t comp : c.source_components()) {
    result.insert(*c.components[comp].begin());
  }
  return result;
}

VertexSet suggest_additional(const DepGraph &g, const VertexSet &provided, Mode mode) {
  require_subset(g, provided);
  VertexSet added;
  if (mode == Mode::Partial) {
    const Condensation c = condense(g);
    for (std::size_t comp : c.source_components()) {
      if (!intersects(c.components[comp], provided)) {
        added.insert(*c.components[comp].begin());
      }
    }
    return added;
  }
  VertexSet chosen = provided;
  for (const auto &s : sources(g)) {
    if (chosen.insert(s).second) {
      added.insert(s);
    }
  }
  cover_cycles(minimal_cycles(g), chosen, &added);
  return added;
}

AnalysisReport analyze(const DepGraph &g, bool with_exact) {
  AnalysisReport r;
  r.sources = sources(g);
  r.minimal_cycles = minimal_cycles(g);
  r.condensation = condense(g);
  for (std::size_t comp : r.condensation.source_components()) {
    r.source_components.push_back(r.condensation.components[comp]);
  }
  r.greedy_min_filling = r.sources;
  cover_cycles(r.minimal_cycles, r.greedy_min_filling, nullptr);
  if (with_exact && g.size() <= kExactSearchLimit) {
    r.exact_min_fillings = exact_min_fillings(g, Mode::Complete);
  }
  r.min_p_filling_cardinality = r.source_components.size();
  return r;
}

} // namespace autofill
