#pragma once

// Quantum tori as noncommutative Fourier data.  A lattice D = B Z^{2N} in
// R^{2N} carries the symplectic form A and the Heisenberg cocycle
// psi(x, y) = e^{pi i A(x, y)}; its twisted group algebra acts on Schwartz
// functions through the Schrodinger picture, Gaussian vectors f_T give the
// Rieffel scalar products closed Gaussian coefficients (quantum thetas), and
// the fractional-linear GL_2(Z) calculus with cocycle c*theta + d organises
// the induced bimodules.

#include <array>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rmlab/numerics.hpp"
#include "rmlab/pseudolattice.hpp"
#include "rmlab/quadfield.hpp"

namespace rmlab {

using IVec = std::vector<int>;         // integer lattice coordinates
using CoeffMap = std::map<IVec, Cplx>;  // noncommutative Fourier coefficients

// ---------------------------------------------------------------------------
// Fractional-linear calculus over GL_2(Z)

struct MoritaMatrix {
  Mat2 g;           // sign-normalized: the cocycle below is positive
  QuadElem source;  // theta
  QuadElem target;  // g.theta = (a theta + b) / (c theta + d)
  QuadElem j;       // cocycle c theta + d, exact and > 0
};

// Exact action; replaces g by -g when c theta + d < 0 and throws only when
// c theta + d = 0 (rational fixed slope).  Requires det g = +-1.
MoritaMatrix morita_act(const Mat2& g, const QuadElem& theta);

// outer after inner; the sources must chain exactly.  The returned cocycle
// satisfies j(gh, theta) = j(g, h.theta) j(h, theta) as exact field elements.
MoritaMatrix morita_compose(const MoritaMatrix& outer, const MoritaMatrix& inner);

// ---------------------------------------------------------------------------
// Embedded lattices and the symplectic pairing

// A(x, y) = x1^t y2 - x2^t y1 for x = (x1, x2) in R^N x R^N.
double symplectic_form(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct EmbeddedLattice {
  int N{0};
  Eigen::MatrixXd B;  // columns generate the lattice; nonsingular

  EmbeddedLattice(int N_, Eigen::MatrixXd B_);

  Eigen::VectorXd embed(const IVec& g) const;
  double pairing(const IVec& g, const IVec& h) const;  // A(Bg, Bh)
  // Structure constant of the twisted algebra, e(g)e(h) = alpha(g, h) e(g+h):
  // the Heisenberg cocycle pulled back along the embedding.
  Cplx alpha(const IVec& g, const IVec& h) const;  // e^{pi i A(Bg, Bh)}
  // Commutator bicharacter e(g)e(h)e(g)^{-1}e(h)^{-1} = alpha(g,h)/alpha(h,g).
  Cplx commutator(const IVec& g, const IVec& h) const;  // e^{2 pi i A(Bg, Bh)}
  double covolume() const;  // |det B|
  bool contains(const Eigen::VectorXd& v, double tol = 1e-9) const;
};

// D^! = { x : A(Bg, x) in Z for all g } via basis J^{-1} B^{-t}; the two
// covolumes multiply to 1.
EmbeddedLattice dual_lattice(const EmbeddedLattice& D);

// ---------------------------------------------------------------------------
// Siegel points and Gaussian module vectors

struct SiegelPoint {
  Eigen::MatrixXcd T;  // symmetric, Im T positive definite (pivoted LDL^t)

  explicit SiegelPoint(Eigen::MatrixXcd T_);
  int N() const { return static_cast<int>(T.rows()); }
  Eigen::MatrixXd Y() const { return T.imag(); }
  // h_bar = T h1 + h2 for h = (h1, h2) in R^{2N}.
  Eigen::VectorXcd period(const Eigen::VectorXd& h) const;
};

// scale * U_{(1, w)} f_T where f_T(x) = e^{pi i x^t T x} and
// (U_{(1, y)} f)(x) = e^{2 pi i x^t y2 + pi i y1^t y2} f(x + y1).
struct GaussianVector {
  SiegelPoint T;
  Eigen::VectorXd w;  // (w1, w2) in R^{2N}
  Cplx scale{1.0, 0.0};
};

GaussianVector gaussian_ground(const SiegelPoint& T);
// U_{(1, y)} f; the scale picks up the cocycle psi(y, f.w).
GaussianVector heisenberg_translate(const Eigen::VectorXd& y, const GaussianVector& f);
Cplx gaussian_eval(const GaussianVector& f, const Eigen::VectorXd& x);
// L^2 scalar product, antilinear in the second slot; closed Gaussian form.
Cplx gaussian_inner(const GaussianVector& f, const GaussianVector& g);

// ---------------------------------------------------------------------------
// Quantum theta series

struct QuantumThetaSeries {
  EmbeddedLattice lattice;  // D itself, or its dual
  SiegelPoint T;
  int R{0};            // coefficients kept for max-norm |h| <= R
  int alpha_sign{+1};  // +1: algebra (D, alpha); -1: dual algebra with conj
  CoeffMap coeffs;
};

// Coefficient c_h = (2^N det Im T)^{-1/2} e^{-(pi/2) h_bar^t (Im T)^{-1}
// conj(h_bar)} at the embedded point B h; real positive with a uniform
// Gaussian lower bound on the decay (checked).
QuantumThetaSeries qtheta_coeffs(const EmbeddedLattice& D, const SiegelPoint& T, int R);
// Same coefficients over the dual points, living in the conjugate algebra.
QuantumThetaSeries qtheta_coeffs_dual(const EmbeddedLattice& D, const SiegelPoint& T, int R);

// Both routes to <f_T, e(h) f_T>_{L^2}: the closed Gaussian form and direct
// quadrature of the defining integral (N <= 2).
struct InnerPair {
  Cplx closed;
  Cplx quadrature;
};
InnerPair heisenberg_inner(const EmbeddedLattice& D, const SiegelPoint& T, const IVec& h);

// Max over |h| <= R/2 of the per-coefficient functional-equation defect
// |c_g^mult e^{X_g(h-g)} alpha(g, h-g) c_{h-g} - c_h| where the multiplier
// c_g^mult = e^{-(pi/2) g_bar^t (Im T)^{-1} conj(g_bar)} and X_g carries the
// opposite imaginary part -+ pi i A, so the defect is float roundoff only.
double qtheta_fe_residual(const QuantumThetaSeries& series, const IVec& g);

// ---------------------------------------------------------------------------
// Coefficient algebra

// (F * G)_h = sum_k F_k G_{h-k} alpha(k, h-k)^{alpha_sign}, truncated to
// |h| <= R; dropped reports the l1 mass of the discarded outside terms.
struct ConvResult {
  CoeffMap coeffs;
  double dropped{0};
};
ConvResult twisted_convolve(const CoeffMap& F, const CoeffMap& G, const EmbeddedLattice& L,
                            int alpha_sign, int R);
CoeffMap star_adjoint(const CoeffMap& F);  // e(h)* = e(-h): conjugate and flip
double coeff_sup(const CoeffMap& F);       // max |F_h|
double coeff_l1(const CoeffMap& F);

// ---------------------------------------------------------------------------
// Rieffel scalar products and the module identity

struct RieffelPair {
  QuantumThetaSeries series_A;  // _D<phi, psi>, coefficients <phi, e(h) psi>
  QuantumThetaSeries series_B;  // <phi, psi>_{D^!}, coefficients <e(h) psi, phi>
};
RieffelPair rieffel_products(const GaussianVector& phi, const GaussianVector& psi,
                             const EmbeddedLattice& D, int R);

// Evaluates both sides of the associativity identity _A<l, m> n = l <m, n>_B
// at the point x, with the A-side bracket normalized by the covolume |K/D|.
// The dual algebra acts on the right by the adjoint translate U_{-B^! h}; the
// two sides then agree by Poisson summation over the pair D, D^!.
std::pair<Cplx, Cplx> module_identity_eval(const GaussianVector& l, const GaussianVector& m,
                                           const GaussianVector& n, const EmbeddedLattice& D,
                                           int R, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// The induced idempotent

struct BocaReport {
  CoeffMap p;                 // coefficients on D
  double idem_residual{0};    // sup |(p * p - p)_h|
  double selfadj_residual{0};
  double trace{0};            // p_0
  double theta_min_eig{0};    // smallest eigenvalue of the truncated regular
                              // representation of Theta_{D^!} (heuristic)
  int newton_iters{0};
  double newton_residual{0};  // sup |(Theta * X * X - 1)_h| at exit
  double dropped_mass{0};     // largest convolution truncation loss seen
};

// Theta_{D^!}^{-1/2} by Newton-Schulz X <- X (3 - Theta X^2) / 2 from the
// scaled identity, truncated at R; m = f_T Theta^{-1/2}, p = |K/D| _D<m, m>.
// p and its idempotency defect are resolved on the doubled box, where products
// of R-supported data close; the defect then measures the quality of the
// truncated inverse square root and shrinks as R grows.
BocaReport boca_projection(const EmbeddedLattice& D, const SiegelPoint& T, int R,
                           double newton_tol);

// ---------------------------------------------------------------------------
// Bimodule actions over a rational cusp

struct BimoduleReport {
  double right_relation_residual{0};  // (fU)V vs e^{2 pi i theta} (fV)U
  double left_relation_residual{0};   // U'(V'f) vs the measured phase
  Cplx right_phase{0};                // measured at the largest sample
  Cplx left_phase{0};
  double commutation_residual{0};     // the four mixed left/right pairs
};

// Evaluates the four unbounded-operator actions on a seeded family of
// Gaussians over (x, mu) in [-X, X] x Z_{|c|}.  Phases are measured from the
// samples, never assumed; the mixed relations commute exactly when det g = 1
// (for det g = -1 they pick up e^{-4 pi i / c}, trivial iff |c| <= 2).
BimoduleReport bimodule_action_residual(const MoritaMatrix& g, double X, int points);

// ---------------------------------------------------------------------------
// Classical theta cross-check

// theta(z, tau) = sum_n e^{pi i n^2 tau + 2 pi i n z}, |n| <= M.
Cplx theta_classical(Cplx z, Cplx tau, int M = 12);

// Pairs U_{(1, x)} f_T with the integer comb, divides by theta(x_bar, T) and
// strips e^{pi i x1 x_bar}; returns the max deviation of that ratio from its
// value at the first grid point (the constant itself is not assumed).
double mumford_ratio_deviation(const SiegelPoint& T,
                               const std::vector<std::array<double, 2>>& grid, int M = 12);

}  // namespace rmlab
