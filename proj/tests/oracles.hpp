#pragma once

// Brute-force references used only by tests. Nothing here calls the library
// algorithm it is compared against; graphs are read through DepGraph's raw
// accessors only.

#include "autofill/filling.hpp"
#include "autofill/graph.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace autofill::oracle {

using Matrix = std::vector<std::vector<long long>>;

Matrix multiply(const Matrix &a, const Matrix &b);

/// Edge (i, j) as 0/1 entries, read from DepGraph::has_edge.
Matrix base_matrix(const DepGraph &g);

/// Path x -> y of length >= 1 iff some (M^k)[x][y] > 0, k in 1..n-1. Paths
/// from x back to x need length up to n, so k = n is included for the
/// diagonal (a cycle through x has at most n vertices).
bool path_by_powers(const DepGraph &g, VertexIndex x, VertexIndex y);

/// Sum of traces of M^1..M^n; zero iff acyclic.
long long trace_sum(const DepGraph &g);

/// Partition by mutual reachability through path_by_powers, with every
/// vertex related to itself.
std::vector<VertexSet> scc_by_reachability(const DepGraph &g);

/// Every simple cycle's member set (deduplicated) found by trying every
/// cyclic ordering of every vertex subset of size >= 2.
std::vector<VertexSet> simple_cycle_sets(const DepGraph &g);

/// Determination closure computed directly from the definitions on bitmasks.
std::uint32_t closure_bits(const DepGraph &g, std::uint32_t provided, Mode mode);
bool fills(const DepGraph &g, std::uint32_t provided, Mode mode);

/// Inclusion-minimal filling sets, minimality checked against every proper
/// subset (no monotonicity shortcut).
std::vector<VertexSet> minimal_fillings(const DepGraph &g, Mode mode);

VertexSet to_set(const DepGraph &g, std::uint32_t mask);
std::uint32_t to_mask(const DepGraph &g, const VertexSet &s);

/// Random self-loopless graph on vertices "v0".."v{n-1}" with edge
/// probability `density`.
DepGraph random_graph(std::mt19937 &rng, std::size_t n, double density);

/// The fixed corpus of sweep graphs: `count` graphs with 2 <= n <= max_n and
/// densities spread over (0, 1).
std::vector<DepGraph> sweep_graphs(std::size_t count, std::size_t max_n, std::uint32_t seed);

/// The weight-calculator formulas in exact integer arithmetic.
/// f: age estimated from height; g: height estimated from age and sex.
long long age_from_height(long long height);
long long height_from_age(long long age, long long sex);

// Graphs from the worked examples.
DepGraph weight_graph();   // Sex->Height, Age->Height, Height->Age
DepGraph pregnant_graph(); // four-field variant with Pregnant
DepGraph path3_graph();    // 1<->2, 2<->3
DepGraph k3_graph();       // all six edges on {0,1,2}
DepGraph edgeless_graph(); // {a, b}

} // namespace autofill::oracle
