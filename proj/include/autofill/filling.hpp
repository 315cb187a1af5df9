#pragma once

#include "autofill/graph.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace autofill {

/// complete: a vertex is determined once all of In(v) is known.
/// partial: any single member of In(v) suffices.
enum class Mode { Complete, Partial };

std::string_view to_string(Mode m);
/// Accepts "complete" / "partial"; std::nullopt otherwise.
std::optional<Mode> parse_mode(std::string_view s);

/// Stages I_0 c I_1 c ... c I_N of a determination closure. The last stage is
/// the fixed point; a repeated stage is never recorded.
struct ClosureTrace {
  std::vector<VertexSet> stages;
  bool filled = false;

  const VertexSet &fixed_point() const { return stages.back(); }
};

/// Vertices v with In(v) non-empty and In(v) a subset of `known`.
VertexSet dtm(const DepGraph &g, const VertexSet &known);
/// Vertices v with In(v) meeting `known`.
VertexSet pdtm(const DepGraph &g, const VertexSet &known);

ClosureTrace closure(const DepGraph &g, const VertexSet &provided, Mode mode);
bool is_filling(const DepGraph &g, const VertexSet &provided, Mode mode);

/// Complete-mode filling via sources and cycle hitting.
bool is_filling_by_cycles(const DepGraph &g, const VertexSet &provided);
/// Complete-mode filling via the pruned graph (edges into `provided` removed).
bool is_filling_by_dag(const DepGraph &g, const VertexSet &provided);
/// Partial-mode filling via source components of the condensation.
bool is_p_filling_by_scc(const DepGraph &g, const VertexSet &provided);
/// Partial-mode filling via sources plus reachability from `provided`.
bool is_p_filling_by_path(const DepGraph &g, const VertexSet &provided);

/// Greedy cycle cover seeded with the sources. Repeats until every minimal
/// cycle is hit; picks the vertex hitting the most uncovered cycles, lowest
/// id on ties.
VertexSet greedy_min_filling(const DepGraph &g);

/// Largest graph for which exact_min_fillings will run.
inline constexpr std::size_t kExactSearchLimit = 12;

/// All inclusion-minimal filling sets, ordered by cardinality and then by
/// sorted member list. Throws GraphError(TooLarge) above kExactSearchLimit.
std::vector<VertexSet> exact_min_fillings(const DepGraph &g, Mode mode);

/// Lowest-id vertex of every source component.
VertexSet min_p_filling(const DepGraph &g);

/// Heuristic extra inputs S (disjoint from `provided`) so that provided + S
/// fills. Empty iff `provided` already fills. Not guaranteed minimum.
VertexSet suggest_additional(const DepGraph &g, const VertexSet &provided, Mode mode);

struct AnalysisReport {
  VertexSet sources;
  std::vector<Cycle> minimal_cycles;
  Condensation condensation;
  std::vector<VertexSet> source_components;
  VertexSet greedy_min_filling;
  std::optional<std::vector<VertexSet>> exact_min_fillings;
  std::size_t min_p_filling_cardinality = 0;
};

/// `with_exact` requests exact_min_fillings (complete mode); it is skipped
/// silently for graphs above kExactSearchLimit.
AnalysisReport analyze(const DepGraph &g, bool with_exact);

} // namespace autofill
