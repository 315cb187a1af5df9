#include "autofill/subset_kernels.hpp"

#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace autofill::kernels {

namespace {

void check_size(std::size_t n) {
  if (n > kMaxMaskVertices) {
    throw GraphError(GraphError::Kind::TooLarge, "",
                     "subset kernels support at most " + std::to_string(kMaxMaskVertices) +
                         " vertices");
  }
}

} // namespace

std::vector<Mask> incoming_masks(const DepGraph &g) {
  check_size(g.size());
  std::vector<Mask> in(g.size(), 0);
  for (VertexIndex v = 0; v < g.size(); ++v) {
    for (VertexIndex w : g.predecessors(v)) {
      in[v] |= Mask{1} << w;
    }
  }
  return in;
}

Mask closure_mask(const std::vector<Mask> &incoming, Mask provided, Mode mode) {
  Mask known = provided;
  for (;;) {
    Mask next = known;
    for (std::size_t v = 0; v < incoming.size(); ++v) {
      const Mask in = incoming[v];
      if (in == 0) {
        continue;
      }
      const bool determined =
          mode == Mode::Complete ? (in & ~known) == 0 : (in & known) != 0;
      if (determined) {
        next |= Mask{1} << v;
      }
    }
    if (next == known) {
      return known;
    }
    known = next;
  }
}

std::vector<std::uint8_t> filling_table_serial(const DepGraph &g, Mode mode) {
  const auto incoming = incoming_masks(g);
  const std::size_t n = g.size();
  const Mask full = (Mask{1} << n) - 1;
  std::vector<std::uint8_t> table(std::size_t{1} << n, 0);
  for (std::size_t m = 0; m < table.size(); ++m) {
    table[m] = closure_mask(incoming, static_cast<Mask>(m), mode) == full;
  }
  return table;
}

std::vector<std::uint8_t> filling_table_parallel(const DepGraph &g, Mode mode) {
  const auto incoming = incoming_masks(g);
  const std::size_t n = g.size();
  const Mask full = (Mask{1} << n) - 1;
  const auto count = static_cast<long long>(std::size_t{1} << n);
  std::vector<std::uint8_t> table(static_cast<std::size_t>(count), 0);
#pragma omp parallel for schedule(static)
  for (long long m = 0; m < count; ++m) {
    table[static_cast<std::size_t>(m)] =
        closure_mask(incoming, static_cast<Mask>(m), mode) == full;
  }
  return table;
}

namespace {

bool is_minimal(const std::vector<std::uint8_t> &table, Mask m) {
  if (!table[m]) {
    return false;
  }
  for (Mask rest = m; rest != 0; rest &= rest - 1) {
    const Mask bit = rest & (~rest + 1);
    if (table[m & ~bit]) {
      return false;
    }
  }
  return true;
}

} // namespace

std::vector<Mask> minimal_masks_serial(const std::vector<std::uint8_t> &table, std::size_t n) {
  check_size(n);
  if (table.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("filling table size does not match vertex count");
  }
  std::vector<Mask> result;
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (is_minimal(table, static_cast<Mask>(m))) {
      result.push_back(static_cast<Mask>(m));
    }
  }
  return result;
}

std::vector<Mask> minimal_masks_parallel(const std::vector<std::uint8_t> &table, std::size_t n) {
  check_size(n);
  if (table.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("filling table size does not match vertex count");
  }
  const auto count = static_cast<long long>(table.size());
  std::vector<std::uint8_t> flags(table.size(), 0);
#pragma omp parallel for schedule(static)
  for (long long m = 0; m < count; ++m) {
    flags[static_cast<std::size_t>(m)] = is_minimal(table, static_cast<Mask>(m));
  }
  std::vector<Mask> result;
  for (std::size_t m = 0; m < flags.size(); ++m) {
    if (flags[m]) {
      result.push_back(static_cast<Mask>(m));
    }
  }
  return result;
}

} // namespace autofill::kernels
