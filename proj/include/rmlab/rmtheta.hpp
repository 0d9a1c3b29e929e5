#pragma once

// Theta functions attached to a pseudolattice: the unit-averaged sums over
// norm cosets, the classical lattice thetas they unfold to under the geodesic
// lifts, the averaging identity connecting the two, and both functional
// equations.  Real-quadratic data stays exact up to the final exponentials.

#include <complex>
#include <utility>
#include <vector>

#include "rmlab/numerics.hpp"
#include "rmlab/pseudolattice.hpp"

namespace rmlab {

// Sum data for the coset theta: base point l0, character twist m0, weight eta,
// and the totally positive unit generating the averaging group U.
// Construction checks, exactly:
//   (a) (eps - 1) l0 in L (so U fixes the coset),
//   (b) tr((eps - 1) l m0) in Z on the basis, tr((eps - 1) l0 m0) in 2Z.
struct ThetaSpec {
  Pseudolattice L;
  QuadElem l0, m0;
  Cplx eta;
  QuadElem eps;
  ThetaSpec(Pseudolattice L_, QuadElem l0_, QuadElem m0_, Cplx eta_, QuadElem eps_);
};

// Complex-plane side: lattice with basis (w1, w2), characteristics lambda0,
// mu0, weight eta.  The pairing throughout is (x.y) = x0 y1 + x1 y0.
struct LatticeThetaSpec {
  Cplx w1, w2;
  Cplx lambda0{0.0}, mu0{0.0};
  Cplx eta{1.0};
  LatticeThetaSpec(Cplx w1_, Cplx w2_, Cplx lambda0_, Cplx mu0_, Cplx eta_);
};

double pairing(Cplx x, Cplx y);  // x0 y1 + x1 y0

// Smallest eps = (totally positive fundamental unit)^k passing the ThetaSpec
// checks for (L, l0, m0); exact search over k.
QuadElem unit_group_for(const Pseudolattice& L, const QuadElem& l0, const QuadElem& m0,
                        long kmax = 10000);

struct CosetRep {
  QuadElem x;   // l0 + m l1 + n l2
  long m, n;
  Rat abs_norm;
};

// One representative per U-orbit: 0 < |N(x)| <= Nbound and
// 0 <= log|x/x'| < 2 log eps, every comparison exact.
std::vector<CosetRep> coset_reps(const Pseudolattice& L, const QuadElem& l0, const QuadElem& eps,
                                 const Rat& Nbound);

// Sum over coset_reps of (eta0 sgn(x') + eta1 sgn(x)) e^{2 pi i v |N(x)|}
// e^{-2 pi i tr(l m0)} e^{-pi i tr(l0 m0)}, truncation driven by tol.
Cplx theta_rm(const ThetaSpec& spec, Cplx v, double tol);

// Sum over the plane lattice of ((lambda0+lambda).eta) e^{pi i v |lambda0+lambda|^2}
// e^{-2 pi i (lambda.mu0) - pi i (lambda0.mu0)}, radius driven by tol,
// deterministic order (increasing radius, ties by (m, n)).
Cplx theta_lattice(const LatticeThetaSpec& spec, Cplx v, double tol);

// Euclidean covolume |Im(conj(w1) w2)|.
double covolume(const LatticeThetaSpec& spec);

// Dual lattice under the pairing, with [mu0; -lambda0] and i conj(eta).
LatticeThetaSpec dual_lattice_spec(const LatticeThetaSpec& spec);

// The lift of (L, l0, m0) at geodesic time t: basis lattice_lift(l_i, t),
// characteristics lifted the same way.
LatticeThetaSpec lift_spec(const ThetaSpec& spec, double t);

// Dual sum data: (L^?, m0, -l0, i conj(eta), same eps); revalidated on build.
ThetaSpec dual_spec(const ThetaSpec& spec);

// sqrt(-iv) * integral over one unit period of the lifted lattice theta.
Cplx hecke_average(const ThetaSpec& spec, Cplx v, double quad_tol);

// Fourier pair for the weighted Gaussian: closed form vs 2-D quadrature of
// the transform with kernel e^{-2 pi i (x.y)}.
std::pair<Cplx, Cplx> gaussian_ft_check(Cplx v, Cplx eta, Cplx y, double quad_tol);

// |theta(v) - (i/(Delta v^2)) theta_dual(-1/v)| for the plane lattice.
double fe_lattice_residual(const LatticeThetaSpec& spec, Cplx v, double tol);

// |Theta(v) - (1/(Delta(L) v)) Theta_dual(-1/v)| for the coset theta.
double fe_rm_residual(const ThetaSpec& spec, Cplx v, double tol);

}  // namespace rmlab
