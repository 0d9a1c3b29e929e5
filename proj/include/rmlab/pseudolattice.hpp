#pragma once

// Rank-2 lattices in a real quadratic field, their continued-fraction
// invariants, trace duals, endomorphism orders, and the geodesic picture.
//
// A pseudolattice is stored by an ordered basis (l1, l2); the slope
// theta = l1/l2 is a quadratic irrational.  Continued fractions run on the
// exact integer state (P, Q, D) with theta_k = (P_k + sqrt(D))/Q_k and
// Q_k | D - P_k^2, so periods and complete quotients are exact.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "rmlab/quadfield.hpp"

namespace rmlab {

struct Mat2 {
  Int a{0}, b{0}, c{0}, d{0};  // [[a, b], [c, d]]
  bool operator==(const Mat2&) const = default;
};

Mat2 operator*(const Mat2& x, const Mat2& y);
Mat2 operator-(const Mat2& x);
Int det(const Mat2& g);
Mat2 inverse_unimodular(const Mat2& g);  // requires det = +-1
QuadElem moebius(const Mat2& g, const QuadElem& x);
std::string to_string(const Mat2& g);

struct ContinuedFraction {
  std::vector<Int> preperiod;              // digits before the cycle (never empty)
  std::vector<Int> period;                 // repeating digits
  std::vector<QuadElem> complete_quotients;  // theta_0 .. theta_{preperiod+period-1}
  size_t cycle_start = 0;                  // index of the first periodic quotient
};

// Digit a_0 is always reported in the preperiod, so phi gives [1; period (1)].
ContinuedFraction continued_fraction(const QuadElem& theta);
std::string to_string(const ContinuedFraction& cf);

struct Pseudolattice {
  QuadElem l1, l2;
  Pseudolattice(QuadElem l1_, QuadElem l2_);
  long d() const { return l1.d; }
  QuadElem theta() const { return l1 / l2; }
  // |l1 l2' - l1' l2| as an element (always a rational multiple of sqrt(d)).
  QuadElem delta() const;
  Pseudolattice dual() const;  // pairing (x, y) -> tr(x y'), matching the lifts
  std::pair<Rat, Rat> coords(const QuadElem& x) const;
  bool contains(const QuadElem& x) const;
  Pseudolattice scaled(const QuadElem& a) const;
};

struct OrderInfo {
  Order order;
  Int conductor;
};
// Multiplier ring { x : x L included in L }; invariant under scaling of L.
OrderInfo endomorphism_ring(const Pseudolattice& L);

// Smallest totally positive unit > 1 of the multiplier ring (it fixes L).
QuadElem stabilizing_unit(const Pseudolattice& L);

// Witness g in GL_2(Z) with t1 = g.t2 and c*t2 + d > 0, if the slopes are
// equivalent; found by intersecting the exact complete-quotient sets.
std::optional<Mat2> gl2z_equivalent(const QuadElem& t1, const QuadElem& t2);

// Hyperbolic element fixing theta, conjugated out of the period product; its
// eigenvalue c*theta + d is the cycle's quotient product, > 1.
Mat2 cf_stabilizer(const QuadElem& theta);

// Geodesic joining theta' to theta in the upper half plane, unit speed in t.
std::complex<double> geodesic_point(const QuadElem& theta, double t);

// l e^{t/2} + i l' e^{-t/2}; carries L to a genuine lattice in C.
std::complex<double> lattice_lift(const QuadElem& l, double t);

}  // namespace rmlab
