#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "rmlab/numerics.hpp"
#include "rmlab/qexp.hpp"

using namespace rmlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

// (q^2; q^2)_k = prod_{j=1..k} (1 - q^{2j}), truncated.
QPoly qpoch2(int k, int qdeg) {
  QPoly r = qpoly_monomial(0, qdeg);
  for (int j = 1; j <= k; ++j)
    r = r * (qpoly_monomial(0, qdeg) - qpoly_monomial(2 * j, qdeg));
  return r;
}

NCPoly random_poly(std::mt19937& rng, int ndeg, int qdeg, int terms) {
  std::uniform_int_distribution<int> pow_a(0, ndeg), pow_k(0, qdeg);
  std::uniform_int_distribution<long> coeff(-3, 3);
  NCPoly r = nc_zero(ndeg, qdeg);
  for (int i = 0; i < terms; ++i) {
    int a = pow_a(rng);
    std::uniform_int_distribution<int> pow_b(0, ndeg - a);
    r = nc_add(r, nc_monomial(a, pow_b(rng), pow_k(rng), ndeg, qdeg, coeff(rng)));
  }
  return r;
}

// Dilogarithm as -int_0^x log(1-u)/u du, an independent route with no series.
double dilog_quad(double x) {
  auto f = [](double u) -> Cplx {
    if (std::abs(u) < 1e-15) return 1.0;
    return -std::log1p(-u) / u;
  };
  return integrate(f, 0.0, x, 1e-13).real();
}

}  // namespace

TEST_CASE("monomials reorder across the plane relation") {
  const int nd = 4, qd = 12;
  const NCPoly u = nc_monomial(1, 0, 0, nd, qd);
  const NCPoly v = nc_monomial(0, 1, 0, nd, qd);

  const NCPoly uv = nc_mul(u, v);
  CHECK(uv.coeffs.size() == 1);
  CHECK(nc_coeff(uv, 1, 1) == qpoly_monomial(2, qd));

  const NCPoly vu = nc_mul(v, u);
  CHECK(nc_coeff(vu, 1, 1) == qpoly_monomial(0, qd));

  const NCPoly s = nc_add(u, v);
  const NCPoly sq = nc_mul(s, s);
  CHECK(nc_coeff(sq, 2, 0) == qpoly_monomial(0, qd));
  CHECK(nc_coeff(sq, 0, 2) == qpoly_monomial(0, qd));
  CHECK(nc_coeff(sq, 1, 1) == qpoly_monomial(0, qd) + qpoly_monomial(2, qd));
}

TEST_CASE("products associate on random elements") {
  std::mt19937 rng(20260822);
  for (int trial = 0; trial < 40; ++trial) {
    const NCPoly x = random_poly(rng, 4, 14, 5);
    const NCPoly y = random_poly(rng, 4, 14, 5);
    const NCPoly z = random_poly(rng, 4, 14, 5);
    const NCPoly lhs = nc_mul(nc_mul(x, y), z);
    const NCPoly rhs = nc_mul(x, nc_mul(y, z));
    CHECK(nc_is_zero(nc_sub(lhs, rhs)));
  }
}

TEST_CASE("series inverse multiplies back to one") {
  std::mt19937 rng(77);
  std::uniform_int_distribution<long> coeff(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    QPoly a(16);
    a.c[0] = (trial % 2 == 0) ? 1 : -1;
    for (int k = 1; k <= 16; ++k) a.c[k] = coeff(rng);
    CHECK(a * qpoly_unit_inverse(a) == qpoly_monomial(0, 16));
  }
  QPoly bad(4);
  bad.c[0] = 2;
  CHECK_THROWS_AS(qpoly_unit_inverse(bad), std::domain_error);
}

TEST_CASE("scalar q-exponential matches its classical coefficients") {
  const int nd = 6, qd = 40;
  const NCPoly e = eq_series(nc_monomial(1, 0, 0, nd, qd));

  // Linear coefficient: the geometric expansion of q/(1 - q^2).
  QPoly lin(qd);
  for (int k = 1; k <= qd; k += 2) lin.c[k] = 1;
  CHECK(nc_coeff(e, 1, 0) == lin);
  CHECK(nc_coeff(e, 1, 0) ==
        qpoly_shift(qpoly_unit_inverse(qpoch2(1, qd)), 1));

  // Quadratic coefficient: q^4 / ((1-q^2)(1-q^4)) counts partitions into
  // parts 2 and 4 on top of the leading q^4.
  QPoly quad(qd);
  const int counts[] = {1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8, 9, 9, 10};
  for (int m = 0; 4 + 2 * m <= qd; ++m) quad.c[4 + 2 * m] = counts[m];
  CHECK(nc_coeff(e, 2, 0) == quad);

  // Every u^k coefficient against q^{k^2} / (q^2; q^2)_k.
  for (int k = 1; k <= 6; ++k)
    CHECK(nc_coeff(e, k, 0) ==
          qpoly_shift(qpoly_unit_inverse(qpoch2(k, qd)), k * k));

  // Degenerate truncations and the constant-term guard.
  const NCPoly e0 = eq_series(nc_monomial(1, 0, 0, 0, qd));
  CHECK(nc_is_zero(nc_sub(e0, nc_one(0, qd))));
  CHECK_THROWS_AS(eq_series(nc_one(3, 8)), std::domain_error);
}

TEST_CASE("addition identity closes in truncation") {
  for (int nd : {0, 1, 2, 6}) {
    for (int qd : {20, 40}) {
      QSeriesParams p;
      p.ndeg = nd;
      p.qdeg = qd;
      CHECK(nc_is_zero(addition_check(p)));
    }
  }
}

TEST_CASE("pentagon closes with the shifted middle argument") {
  for (int nd = 0; nd <= 6; ++nd) {
    for (int qd : {1, 9, 21, 40}) {
      QSeriesParams p;
      p.ndeg = nd;
      p.qdeg = qd;
      CHECK(nc_is_zero(pentagon_check(p)));
    }
  }
  // Degree 1 never sees the middle factor, whatever the scaling.
  for (int mu : {0, 1, 2, 3}) {
    QSeriesParams p;
    p.ndeg = 1;
    p.qdeg = 24;
    p.mu_qpow = mu;
    CHECK(nc_is_zero(pentagon_check(p)));
  }
}

TEST_CASE("pentagon obstruction for the unscaled middle argument") {
  const int qd = 30;
  QSeriesParams p;
  p.ndeg = 2;
  p.qdeg = qd;
  p.mu_qpow = 0;
  const NCPoly r = pentagon_check(p);
  CHECK_FALSE(nc_is_zero(r));
  CHECK(r.coeffs.size() == 1);

  // The defect sits at vu and expands -q/(1+q): alternating signs from q on.
  QPoly expected(qd);
  for (int k = 1; k <= qd; ++k) expected.c[k] = (k % 2 == 1) ? -1 : 1;
  CHECK(nc_coeff(r, 1, 1) == expected);
  CHECK(nc_coeff(r, 1, 1) ==
        qpoly_shift(qpoly_unit_inverse(qpoly_monomial(0, qd) + qpoly_monomial(1, qd)), 1) *
            qpoly_monomial(0, qd, -1));

  // Cross-check without any division: (1 + q) times the defect is exactly -q.
  CHECK((qpoly_monomial(0, qd) + qpoly_monomial(1, qd)) * nc_coeff(r, 1, 1) ==
        qpoly_monomial(1, qd, -1));
}

TEST_CASE("dilogarithm agrees with its integral form") {
  for (double x : {0.9, 0.7, 0.5, 0.2, -0.3, -0.5, -1.0, -3.0})
    CHECK(std::abs(dilog(x) - dilog_quad(x)) < 1e-10);
}

TEST_CASE("dilogarithm closed values") {
  const double z2 = kPi * kPi / 6.0;
  const double l2 = std::log(2.0);
  CHECK(std::abs(zeta2_em() - z2) < 1e-14);
  CHECK(std::abs(dilog(1.0) - z2) < 1e-12);
  CHECK(std::abs(dilog(0.5) - (z2 / 2.0 - l2 * l2 / 2.0)) < 1e-14);
  CHECK(std::abs(dilog(-1.0) + z2 / 2.0) < 1e-14);
  CHECK(rogers_L(0.0) == 0.0);
  CHECK(std::abs(rogers_L(0.5) - z2 / 2.0) < 1e-14);
  CHECK(std::abs(rogers_L(1.0) - z2) < 1e-14);
  CHECK_THROWS_AS(dilog(1.5), std::domain_error);
  CHECK_THROWS_AS(rogers_L(-0.1), std::domain_error);
}

TEST_CASE("five-term defect vanishes on a grid") {
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double y : {0.1, 0.3, 0.5, 0.7, 0.9})
      CHECK(rogers_numeric(x, y) < 1e-12);
  CHECK_THROWS_AS(rogers_numeric(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(rogers_numeric(0.5, 1.0), std::domain_error);
}

TEST_CASE("product logarithm approaches the dilogarithm tail linearly") {
  const double r1 = dilog_asymptotic(1.0, 0.02);
  const double r2 = dilog_asymptotic(1.0, 0.01);
  CHECK(r1 > 5.20e-3);
  CHECK(r1 < 5.28e-3);
  CHECK(r2 > 2.59e-3);
  CHECK(r2 < 2.65e-3);
  CHECK(r2 / r1 > 0.45);
  CHECK(r2 / r1 < 0.55);

  const double s1 = dilog_asymptotic(0.5, 0.02);
  const double s2 = dilog_asymptotic(0.5, 0.01);
  CHECK(s1 < 1e-2);
  CHECK(s2 / s1 > 0.4);
  CHECK(s2 / s1 < 0.6);

  CHECK_THROWS_AS(dilog_asymptotic(-1.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(dilog_asymptotic(1.0, 0.0), std::domain_error);
}
