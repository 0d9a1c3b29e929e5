#pragma once

// Small exact linear algebra over the integers: row-style Hermite normal form
// with transform, left kernels, and helpers for rank-2 lattices given by row
// generators.  Matrices are tiny (at most 4x4 here), so everything is plain
// vector-of-rows with no attempt at asymptotic cleverness.

#include <vector>

#include "rmlab/quadfield.hpp"

namespace rmlab {

using IMat = std::vector<std::vector<Int>>;

// Floor division / modulo for cpp_int (operator/ truncates toward zero).
Int fdiv(const Int& a, const Int& b);
Int fmod_int(const Int& a, const Int& b);

// U * M = H with U unimodular, H in row Hermite normal form: pivots positive,
// entries above each pivot reduced into [0, pivot), zero rows at the bottom.
struct HnfResult {
  IMat H;
  IMat U;
};
HnfResult hnf_with_transform(IMat M);

// Canonical basis of the row span: HNF rows with zero rows dropped.  Equal
// lattices give byte-equal results.
IMat row_span_hnf(const IMat& M);

// Rows spanning { x : x * M = 0 } over Z.
IMat left_kernel(const IMat& M);

Int det2(const IMat& M);

// Intersection of the row spans of A and B (each k x n, full-rank rows not
// required).  Returns the HNF basis of the intersection lattice.
IMat row_span_intersection(const IMat& A, const IMat& B);

}  // namespace rmlab
