#include "rmlab/linalg.hpp"

#include <algorithm>

#include "rmlab/check.hpp"

namespace rmlab {

Int fdiv(const Int& a, const Int& b) {
  LOGIC_CHECK(b != 0, "fdiv by zero");
  Int q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

Int fmod_int(const Int& a, const Int& b) { return a - fdiv(a, b) * b; }

namespace {

void axpy_row(std::vector<Int>& dst, const Int& c, const std::vector<Int>& src) {
  for (size_t j = 0; j < dst.size(); ++j) dst[j] += c * src[j];
}

}  // namespace

HnfResult hnf_with_transform(IMat M) {
  const size_t m = M.size();
  const size_t n = m ? M[0].size() : 0;
  IMat U(m, std::vector<Int>(m, 0));
  for (size_t i = 0; i < m; ++i) U[i][i] = 1;

  size_t r = 0;
  for (size_t col = 0; col < n && r < m; ++col) {
    // Gcd-eliminate everything below row r in this column.
    for (;;) {
      size_t piv = m;
      for (size_t i = r; i < m; ++i)
        if (M[i][col] != 0 && (piv == m || abs(M[i][col]) < abs(M[piv][col]))) piv = i;
      if (piv == m) break;
      std::swap(M[piv], M[r]);
      std::swap(U[piv], U[r]);
      bool clean = true;
      for (size_t i = r + 1; i < m; ++i) {
        if (M[i][col] == 0) continue;
        Int q = fdiv(M[i][col], M[r][col]);
        axpy_row(M[i], -q, M[r]);
        axpy_row(U[i], -q, U[r]);
        if (M[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (M[r][col] == 0) continue;
    if (M[r][col] < 0) {
      for (auto& v : M[r]) v = -v;
      for (auto& v : U[r]) v = -v;
    }
    for (size_t i = 0; i < r; ++i) {
      Int q = fdiv(M[i][col], M[r][col]);
      if (q != 0) {
        axpy_row(M[i], -q, M[r]);
        axpy_row(U[i], -q, U[r]);
      }
    }
    ++r;
  }
  return {std::move(M), std::move(U)};
}

IMat row_span_hnf(const IMat& M) {
  auto hr = hnf_with_transform(M);
  IMat out;
  for (auto& row : hr.H) {
    bool zero = std::all_of(row.begin(), row.end(), [](const Int& v) { return v == 0; });
    if (!zero) out.push_back(std::move(row));
  }
  return out;
}

IMat left_kernel(const IMat& M) {
  auto hr = hnf_with_transform(M);
  IMat out;
  for (size_t i = 0; i < hr.H.size(); ++i) {
    bool zero = std::all_of(hr.H[i].begin(), hr.H[i].end(), [](const Int& v) { return v == 0; });
    if (zero) out.push_back(std::move(hr.U[i]));
  }
  return out;
}

Int det2(const IMat& M) {
  LOGIC_CHECK(M.size() == 2 && M[0].size() == 2, "det2 expects a 2x2 matrix");
  return M[0][0] * M[1][1] - M[0][1] * M[1][0];
}

IMat row_span_intersection(const IMat& A, const IMat& B) {
  LOGIC_CHECK(!A.empty() && !B.empty() && A[0].size() == B[0].size(),
              "row_span_intersection: incompatible shapes");
  const size_t ka = A.size(), kb = B.size(), n = A[0].size();
  IMat stacked(ka + kb, std::vector<Int>(n));
  for (size_t i = 0; i < ka; ++i) stacked[i] = A[i];
  for (size_t i = 0; i < kb; ++i)
    for (size_t j = 0; j < n; ++j) stacked[ka + i][j] = -B[i][j];
  IMat ker = left_kernel(stacked);  // x*A = y*B for (x, y) in kernel rows
  IMat gens;
  for (const auto& xy : ker) {
    std::vector<Int> v(n, 0);
    for (size_t i = 0; i < ka; ++i)
      for (size_t j = 0; j < n; ++j) v[j] += xy[i] * A[i][j];
    gens.push_back(std::move(v));
  }
  if (gens.empty()) gens.emplace_back(n, Int(0));
  return row_span_hnf(gens);
}

}  // namespace rmlab
