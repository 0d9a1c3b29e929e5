#pragma once

// Partial zeta functions of shifted integral ideals in a real quadratic
// field and the Stark numbers e^{zeta'(0)}.  The supporting exact ideal
// arithmetic (gcd ideal, quotient, coprimality, the unit subgroup fixing the
// shifted coset) lives here too.  Two independent evaluation routes --
// truncated Dirichlet sum and the theta-integral representation with its
// lower half folded onto the dual lattice -- cross-check each other; an
// exploratory integer-relation probe rounds the module off.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "rmlab/linalg.hpp"
#include "rmlab/numerics.hpp"
#include "rmlab/pseudolattice.hpp"
#include "rmlab/rmtheta.hpp"

namespace rmlab {

// Ideal bases are row HNF matrices in the integral basis (1, omega) of O_K.
struct StarkInput {
  long d = 0;
  Pseudolattice L;   // integral ideal of O_K
  QuadElem l0;       // shift, in O_K, nonzero
  IMat b_ideal;      // gcd ideal L + l0 O_K
  IMat a0_ideal;     // (l0) divided by the gcd ideal
  IMat f_ideal;      // L divided by the gcd ideal
  Int b_norm;        // [O_K : b], positive
};

// Validates that L is an ideal of the maximal order and l0 a nonzero integer
// of K, then computes the derived ideals exactly.
StarkInput make_stark_input(const Pseudolattice& L, const QuadElem& l0);

struct ConditionsReport {
  bool coprime_b_f = false;     // b + f = O_K
  bool coprime_a0_f = false;    // a0 + f = O_K
  bool units_positive = false;  // every unit = 1 mod f has positive conjugate
  bool pass = false;
  std::optional<QuadElem> witness;  // violating unit when units_positive fails
  QuadElem u_generator;  // totally positive generator of the reduction group
  long unit_order = 0;   // order of the fundamental unit in (O_K/f)*
  long index = 1;        // [units = 1 mod f : <u_generator>], 1 or 2
};
ConditionsReport stark_conditions_check(const StarkInput& in);

struct ZetaValue {
  Cplx s;
  Cplx value;
  std::string method;  // "direct" or "mellin"
  Int truncation;      // direct: norm cutoff; mellin: theta series norm cutoff
  long terms = 0;      // orbit representatives summed
  double tol = 0.0;    // mellin target tolerance
};

// Truncated Dirichlet sum sgn(l0') N(b)^s sum sgn(x')/|N(x)|^s over unit
// orbits of norm at most Nbound; the oracle route.  Requires Re s > 1.
ZetaValue zeta_direct(const StarkInput& in, Cplx s, const Int& Nbound);

// Entire route: sgn(l0') N(b)^s (2 pi)^s / Gamma(s) times the theta integral,
// split at y0 >= 1/2 with the lower piece folded through the functional
// equation onto the dual side, where it decays again.
ZetaValue zeta_mellin(const StarkInput& in, Cplx s, double tol, double y0 = 1.0);

struct StarkResult {
  double zeta_prime_at_0 = 0.0;
  double S0 = 0.0;  // e^{zeta'(0)}
};
StarkResult stark_number(const StarkInput& in, double tol);

struct ProbeResult {
  std::vector<Int> coeffs;  // constant term first, leading coefficient 1
  double residual = 0.0;
};

// First monic integer polynomial (degree ascending, then coefficient blocks
// in odometer order) with |P(x)| < tol; exploratory only, a report of NONE
// carries no arithmetic meaning beyond the searched box.
std::optional<ProbeResult> algebraicity_probe(double x, int max_deg, long max_height, double tol,
                                              long long op_cap = 200000000);

}  // namespace rmlab
