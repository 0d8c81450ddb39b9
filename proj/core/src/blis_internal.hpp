#pragma once

#include <cstddef>
#include <vector>

#include "ampsched/blis.hpp"

namespace ampsched::detail {

inline std::size_t round_up(std::size_t x, std::size_t m) { return (x + m - 1) / m * m; }

void pack_a_block(ConstMatrixView a, std::size_t p0, std::size_t kb, std::size_t i0,
                  std::size_t mb, double* dst);
void pack_b_into(ConstMatrixView b, std::size_t p0, std::size_t kb, std::size_t j0,
                 std::size_t nb, double* dst);

/// Loop 3 over rows [rows.begin, rows.end) in steps of mc against an already
/// packed B panel covering columns [j0, j0 + nb) and depth [p0, p0 + kb).
/// With `upper` set, only C(i, j) with i <= j is updated.
void loop3(ConstMatrixView a, const double* packed_b, RowRange rows, std::size_t mc,
           std::size_t p0, std::size_t kb, std::size_t j0, std::size_t nb, MatrixView c,
           bool upper);

/// Per-thread scratch buffer, grown on demand.
double* scratch_a(std::size_t count);

}  // namespace ampsched::detail
