#pragma once

// Exact truncated series arithmetic over the quantum plane uv = q^2 vu, built
// around the q-exponential prod_{n>=0}(1 + q^{2n+1} t): the addition and
// pentagon identities are checked symbolically inside the truncation, with
// both middle-argument conventions for the pentagon.  The classical limits
// live here too -- the Rogers dilogarithm with its five-term defect, and the
// small-y asymptotic defect of log e_q against the dilogarithm.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rmlab/quadfield.hpp"

namespace rmlab {

// Polynomial in q with integer coefficients, truncated at a fixed degree;
// c[k] multiplies q^k and everything beyond qdeg falls off silently.
struct QPoly {
  std::vector<Int> c;

  QPoly() : c(1) {}
  explicit QPoly(int qdeg);
  int qdeg() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const;
  Int sup() const;  // largest |coefficient|
  std::string to_string() const;
};

// a q^k, the zero polynomial when k exceeds qdeg.
QPoly qpoly_monomial(int k, int qdeg, const Int& a = 1);

QPoly operator+(const QPoly& x, const QPoly& y);
QPoly operator-(const QPoly& x, const QPoly& y);
QPoly operator*(const QPoly& x, const QPoly& y);
bool operator==(const QPoly& x, const QPoly& y);

// Multiply by q^k inside the truncation.
QPoly qpoly_shift(const QPoly& x, int k);

// Reciprocal of a series with constant term +1 or -1; the recurrence stays
// integral, so no rational arithmetic is needed.
QPoly qpoly_unit_inverse(const QPoly& x);

// Element of the truncated quantum plane.  Coefficients are indexed by
// (a, b) with a + b <= ndeg and multiply the normal-ordered monomial
// v^b u^a; reordering one u past one v costs a factor q^2.
struct NCPoly {
  int ndeg = 0;
  int qdeg = 1;
  std::map<std::pair<int, int>, QPoly> coeffs;
};

NCPoly nc_zero(int ndeg, int qdeg);
NCPoly nc_one(int ndeg, int qdeg);
// a q^k v^b u^a; zero when the monomial falls outside the truncation.
NCPoly nc_monomial(int a, int b, int k, int ndeg, int qdeg, const Int& coeff = 1);

NCPoly nc_add(const NCPoly& x, const NCPoly& y);
NCPoly nc_sub(const NCPoly& x, const NCPoly& y);
// Normal-ordered product: v^b u^a . v^{b'} u^{a'} = q^{2ab'} v^{b+b'} u^{a+a'}.
NCPoly nc_mul(const NCPoly& x, const NCPoly& y);

bool nc_is_zero(const NCPoly& x);
Int nc_sup(const NCPoly& x);
// Coefficient of v^b u^a (the zero polynomial when absent).
QPoly nc_coeff(const NCPoly& x, int a, int b);
// The coefficient polynomial of largest sup; zero polynomial for zero input.
QPoly nc_worst_coeff(const NCPoly& x);

// Truncation orders plus the pentagon middle scaling mu = q^mu_qpow.
struct QSeriesParams {
  int ndeg = 0;
  int qdeg = 1;
  int mu_qpow = 1;  // mu = q; mu_qpow = 0 is the literal unscaled middle
};

// Finite product prod_{2n+1 <= qdeg}(1 + q^{2n+1} t) for t with zero constant
// term.  Its coefficients agree with the full infinite product inside the
// truncation; for a scalar variable this is the classical series with
// c_1 = q/(1 - q^2) expanded to degree qdeg.
NCPoly eq_series(const NCPoly& t);

// Residual of e_q(u) e_q(v) - e_q(u + v); identically zero in truncation.
NCPoly addition_check(const QSeriesParams& p);

// Residual of e_q(v) e_q(u) - e_q(u) e_q(mu v u) e_q(v) with mu = q^mu_qpow.
// Zero for mu = q; otherwise the degree-2 obstruction sits at the vu monomial
// with coefficient c_1 (q - mu).
NCPoly pentagon_check(const QSeriesParams& p);

// Dilogarithm sum_{k>=1} x^k / k^2 for x <= 1: direct series on [-1/2, 1/2],
// reflection through 1 - x above, the Landen map x/(x - 1) below; the x = 1
// value sums its tail by Euler-Maclaurin.
double dilog(double x);

// zeta(2) as the k^{-2} series with the tail accelerated by Euler-Maclaurin.
double zeta2_em();

// Rogers form L(x) = Li_2(x) + (1/2) log(x) log(1 - x) on [0, 1].
double rogers_L(double x);

// Five-term defect
// |L(x) + L(y) - L(xy) - L(x(1-y)/(1-xy)) - L(y(1-x)/(1-xy))|, x, y in (0,1).
double rogers_numeric(double x, double y);

// Defect |log prod_{n>=0}(1 + q^{2n+1} t) + Li_2(-t)/(4 pi y)| at
// q = e^{-2 pi y}; O(y) as y -> 0 for fixed t > 0.
double dilog_asymptotic(double t, double y);

}  // namespace rmlab
