#pragma once

// Bitmask kernels that evaluate the filling verdict of every subset of a
// small graph. The serial versions are the reference the OpenMP versions are
// tested against.

#include "autofill/filling.hpp"
#include "autofill/graph.hpp"

#include <cstdint>
#include <vector>

namespace autofill::kernels {

using Mask = std::uint32_t;

/// Largest vertex count the mask kernels accept.
inline constexpr std::size_t kMaxMaskVertices = 24;

/// In(v) as bitmasks, indexed by vertex.
std::vector<Mask> incoming_masks(const DepGraph &g);

Mask closure_mask(const std::vector<Mask> &incoming, Mask provided, Mode mode);

/// table[mask] == 1 iff the subset `mask` fills the graph.
std::vector<std::uint8_t> filling_table_serial(const DepGraph &g, Mode mode);
std::vector<std::uint8_t> filling_table_parallel(const DepGraph &g, Mode mode);

/// Masks of inclusion-minimal filling subsets. Relies on filling being
/// upward closed, so only single-vertex removals need checking.
std::vector<Mask> minimal_masks_serial(const std::vector<std::uint8_t> &table, std::size_t n);
std::vector<Mask> minimal_masks_parallel(const std::vector<std::uint8_t> &table, std::size_t n);

} // namespace autofill::kernels
