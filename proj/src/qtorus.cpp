#include "rmlab/qtorus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>

#include "rmlab/check.hpp"

namespace rmlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Cplx kI{0.0, 1.0};

Cplx cis(double t) { return {std::cos(t), std::sin(t)}; }

IVec ivec_add(const IVec& a, const IVec& b) {
  IVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

IVec ivec_sub(const IVec& a, const IVec& b) {
  IVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

IVec ivec_neg(const IVec& a) {
  IVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

int ivec_sup(const IVec& a) {
  int m = 0;
  for (int v : a) m = std::max(m, std::abs(v));
  return m;
}

// {-R..R}^dim in lexicographic order, so every reduction is deterministic.
std::vector<IVec> box_points(int dim, int R) {
  std::vector<IVec> out;
  IVec cur(dim, -R);
  for (;;) {
    out.push_back(cur);
    int i = dim - 1;
    while (i >= 0 && cur[i] == R) cur[i--] = -R;
    if (i < 0) return out;
    ++cur[i];
  }
}

Eigen::VectorXd to_vec(const IVec& g) {
  Eigen::VectorXd v(g.size());
  for (size_t i = 0; i < g.size(); ++i) v[i] = g[i];
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fractional-linear calculus

MoritaMatrix morita_act(const Mat2& g, const QuadElem& theta) {
  DOMAIN_CHECK(abs(det(g)) == 1, "matrix is not in GL_2(Z)");
  const Rat zero{0};
  QuadElem j = QuadElem(Rat(g.c), zero, theta.d) * theta + QuadElem(Rat(g.d), zero, theta.d);
  DOMAIN_CHECK(j.sign() != 0, "cocycle vanishes at theta");
  Mat2 gn = g;
  if (j.sign() < 0) {
    gn = -g;
    j = -j;
  }
  return MoritaMatrix{gn, theta, moebius(gn, theta), j};
}

MoritaMatrix morita_compose(const MoritaMatrix& outer, const MoritaMatrix& inner) {
  DOMAIN_CHECK(outer.source == inner.target, "factors do not chain");
  MoritaMatrix out = morita_act(outer.g * inner.g, inner.source);
  // j(gh, theta) = j(g, h.theta) j(h, theta), exactly.
  LOGIC_CHECK(out.j == outer.j * inner.j, "cocycle identity failed");
  LOGIC_CHECK(out.target == outer.target, "composed action mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// Embedded lattices

double symplectic_form(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const long n = x.size() / 2;
  LOGIC_CHECK(x.size() == y.size() && x.size() == 2 * n, "vectors must live in R^{2N}");
  return x.head(n).dot(y.tail(n)) - x.tail(n).dot(y.head(n));
}

EmbeddedLattice::EmbeddedLattice(int N_, Eigen::MatrixXd B_) : N(N_), B(std::move(B_)) {
  DOMAIN_CHECK(N >= 1, "dimension must be positive");
  DOMAIN_CHECK(B.rows() == 2 * N && B.cols() == 2 * N, "basis must be 2N x 2N");
  DOMAIN_CHECK(std::abs(B.determinant()) > 1e-12, "basis is singular");
}

// Eigen products below go through lazyProduct/cwiseProduct members rather
// than the infix operators: overload resolution against the exact-arithmetic
// operators in this namespace would otherwise force a conversion probe that
// boost's rational backend cannot survive on Eigen expression types.
Eigen::VectorXd EmbeddedLattice::embed(const IVec& g) const {
  DOMAIN_CHECK(static_cast<int>(g.size()) == 2 * N, "coordinate size mismatch");
  return B.lazyProduct(to_vec(g));
}

double EmbeddedLattice::pairing(const IVec& g, const IVec& h) const {
  return symplectic_form(embed(g), embed(h));
}

Cplx EmbeddedLattice::alpha(const IVec& g, const IVec& h) const {
  return cis(kPi * pairing(g, h));
}

Cplx EmbeddedLattice::commutator(const IVec& g, const IVec& h) const {
  return cis(2 * kPi * pairing(g, h));
}

double EmbeddedLattice::covolume() const { return std::abs(B.determinant()); }

bool EmbeddedLattice::contains(const Eigen::VectorXd& v, double tol) const {
  Eigen::VectorXd c = B.fullPivLu().solve(v);
  for (long i = 0; i < c.size(); ++i)
    if (std::abs(c[i] - std::round(c[i])) > tol) return false;
  return true;
}

EmbeddedLattice dual_lattice(const EmbeddedLattice& D) {
  const int n = D.N;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd pair_matrix = D.B.transpose().lazyProduct(J);
  DOMAIN_CHECK(std::abs(pair_matrix.determinant()) > 1e-12, "degenerate pairing");
  EmbeddedLattice dual(n, pair_matrix.inverse());
  LOGIC_CHECK(std::abs(D.covolume() * dual.covolume() - 1.0) < 1e-9,
              "covolumes do not multiply to 1");
  return dual;
}

// ---------------------------------------------------------------------------
// Siegel points and Gaussians

SiegelPoint::SiegelPoint(Eigen::MatrixXcd T_) : T(std::move(T_)) {
  DOMAIN_CHECK(T.rows() == T.cols() && T.rows() >= 1, "T must be square");
  DOMAIN_CHECK((T - T.transpose()).norm() <= 1e-12 * (1 + T.norm()), "T must be symmetric");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(T.imag());
  bool posdef = ldlt.info() == Eigen::Success && ldlt.isPositive();
  if (posdef)
    for (long i = 0; i < T.rows(); ++i)
      if (ldlt.vectorD()[i] <= 0) posdef = false;
  DOMAIN_CHECK(posdef, "Im T must be positive definite");
}

Eigen::VectorXcd SiegelPoint::period(const Eigen::VectorXd& h) const {
  const int n = N();
  DOMAIN_CHECK(h.size() == 2 * n, "point size mismatch");
  Eigen::VectorXcd h1 = h.head(n).cast<Cplx>();
  return T.lazyProduct(h1) + h.tail(n).cast<Cplx>();
}

GaussianVector gaussian_ground(const SiegelPoint& T) {
  return GaussianVector{T, Eigen::VectorXd::Zero(2 * T.N()), Cplx{1.0, 0.0}};
}

GaussianVector heisenberg_translate(const Eigen::VectorXd& y, const GaussianVector& f) {
  GaussianVector out = f;
  out.scale *= cis(kPi * symplectic_form(y, f.w));
  out.w += y;
  return out;
}

Cplx gaussian_eval(const GaussianVector& f, const Eigen::VectorXd& x) {
  const int n = f.T.N();
  DOMAIN_CHECK(x.size() == n, "evaluation point size mismatch");
  Eigen::VectorXd w1 = f.w.head(n), w2 = f.w.tail(n);
  Eigen::VectorXcd s = (x + w1).cast<Cplx>();
  Cplx quad = s.cwiseProduct(f.T.T.lazyProduct(s)).sum();  // s^t T s, no conjugation
  return f.scale * std::exp(kI * kPi * (2.0 * x.dot(w2) + w1.dot(w2) + quad));
}

Cplx gaussian_inner(const GaussianVector& f, const GaussianVector& g) {
  const int n = f.T.N();
  LOGIC_CHECK((f.T.T - g.T.T).norm() <= 1e-12 * (1 + f.T.T.norm()),
              "scalar product needs a common Siegel point");
  const Eigen::MatrixXcd& T = f.T.T;
  Eigen::MatrixXd Y = f.T.Y();
  Eigen::VectorXd w1 = f.w.head(n), w2 = f.w.tail(n);
  Eigen::VectorXd z1 = g.w.head(n), z2 = g.w.tail(n);
  // int (U_w f_T) conj(U_z f_T) = (2^N det Y)^{-1/2} e^{-(pi/2) b^t Y^{-1} b
  // + pi i c}: the square completed in the plane-wave factor e^{2 pi i x^t b}.
  Eigen::VectorXcd w1c = w1.cast<Cplx>(), z1c = z1.cast<Cplx>();
  Eigen::VectorXcd b = T.lazyProduct(w1c) - T.conjugate().lazyProduct(z1c) + (w2 - z2).cast<Cplx>();
  Cplx c = w1c.cwiseProduct(T.lazyProduct(w1c)).sum() -
           z1c.cwiseProduct(T.conjugate().lazyProduct(z1c)).sum() +
           Cplx{w1.dot(w2) - z1.dot(z2), 0.0};
  Eigen::MatrixXcd Yi = Y.inverse().cast<Cplx>();
  Cplx quad = b.cwiseProduct(Yi.lazyProduct(b)).sum();  // plain bilinear, no conjugation
  double dety = Y.determinant();
  Cplx G = std::pow(std::ldexp(dety, n), -0.5) * std::exp(-kPi / 2.0 * quad + kI * kPi * c);
  return f.scale * std::conj(g.scale) * G;
}

// ---------------------------------------------------------------------------
// Quantum theta series

namespace {

// Q(h) = h_bar^t Y^{-1} conj(h_bar) at the embedded point; real and positive
// definite in h.
double gaussian_exponent(const SiegelPoint& T, const Eigen::VectorXd& u) {
  Eigen::VectorXcd hb = T.period(u);
  Eigen::MatrixXcd Yi = T.Y().inverse().cast<Cplx>();
  Cplx q = hb.cwiseProduct(Yi.lazyProduct(hb.conjugate().eval())).sum();
  LOGIC_CHECK(std::abs(q.imag()) <= 1e-10 * (1 + std::abs(q.real())),
              "theta exponent must be real");
  return q.real();
}

// Smallest eigenvalue of the pulled-back form h -> Q(Bh): the uniform decay
// rate of the coefficients.
double decay_rate(const EmbeddedLattice& L, const SiegelPoint& T) {
  const int dim = 2 * L.N;
  Eigen::MatrixXd M(dim, dim);
  std::vector<Eigen::VectorXcd> cols(dim);
  for (int i = 0; i < dim; ++i) {
    IVec e(dim, 0);
    e[i] = 1;
    cols[i] = T.period(L.embed(e));
  }
  Eigen::MatrixXcd Yi = T.Y().inverse().cast<Cplx>();
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXcd sol = Yi.lazyProduct(cols[i].conjugate().eval());
    for (int j = 0; j < dim; ++j) {
      Cplx q = cols[j].cwiseProduct(sol).sum();
      M(j, i) = q.real();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff();
}

QuantumThetaSeries build_qtheta(const EmbeddedLattice& L, const SiegelPoint& T, int R,
                                int alpha_sign) {
  DOMAIN_CHECK(R >= 0, "truncation radius must be nonnegative");
  DOMAIN_CHECK(L.N == T.N(), "lattice and Siegel point dimensions differ");
  QuantumThetaSeries s{L, T, R, alpha_sign, {}};
  const double c0 = std::pow(std::ldexp(T.Y().determinant(), T.N()), -0.5);
  const double rate = decay_rate(L, T);
  LOGIC_CHECK(rate > 0, "embedded Gaussian form must be positive definite");
  for (const IVec& h : box_points(2 * L.N, R)) {
    double q = gaussian_exponent(T, L.embed(h));
    double e = -kPi / 2.0 * q;
    double c = c0 * std::exp(e);
    // Positive except where the exponent is past double range entirely.
    LOGIC_CHECK(c > 0 || e < -700.0, "theta coefficient must be positive");
    // Log-linear Gaussian decay with the uniform rate, checked on exponents.
    double n2 = 0;
    for (int v : h) n2 += double(v) * v;
    LOGIC_CHECK(-e >= kPi / 2.0 * rate * n2 - 1e-9,
                "coefficient decays slower than the Gaussian bound");
    s.coeffs[h] = Cplx{c, 0.0};
  }
  return s;
}

}  // namespace

QuantumThetaSeries qtheta_coeffs(const EmbeddedLattice& D, const SiegelPoint& T, int R) {
  return build_qtheta(D, T, R, +1);
}

QuantumThetaSeries qtheta_coeffs_dual(const EmbeddedLattice& D, const SiegelPoint& T, int R) {
  return build_qtheta(dual_lattice(D), T, R, -1);
}

InnerPair heisenberg_inner(const EmbeddedLattice& D, const SiegelPoint& T, const IVec& h) {
  const int n = T.N();
  DOMAIN_CHECK(n <= 2, "quadrature oracle covers N <= 2 only");
  GaussianVector f0 = gaussian_ground(T);
  Eigen::VectorXd u = D.embed(h);
  GaussianVector fh = heisenberg_translate(u, f0);
  Cplx closed = gaussian_inner(f0, fh);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.Y());
  const double lam = es.eigenvalues().minCoeff();
  const double L = u.head(n).cwiseAbs().maxCoeff() + 4.0 / std::sqrt(lam);
  const double freq = u.tail(n).cwiseAbs().maxCoeff() +
                      T.T.cwiseAbs().maxCoeff() * u.head(n).cwiseAbs().maxCoeff();
  const int panels = static_cast<int>(std::ceil(2 * L * (1 + freq / 4))) + 4;
  Cplx quad;
  if (n == 1) {
    auto f = [&](double x) {
      Eigen::VectorXd p(1);
      p << x;
      return gaussian_eval(f0, p) * std::conj(gaussian_eval(fh, p));
    };
    quad = integrate_gl(f, -L, L, panels);
  } else {
    auto inner = [&](double x0) {
      auto f = [&](double x1) {
        Eigen::VectorXd p(2);
        p << x0, x1;
        return gaussian_eval(f0, p) * std::conj(gaussian_eval(fh, p));
      };
      return integrate_gl(f, -L, L, panels);
    };
    quad = integrate_gl(inner, -L, L, panels);
  }
  return InnerPair{closed, quad};
}

double qtheta_fe_residual(const QuantumThetaSeries& series, const IVec& g) {
  const int half = series.R / 2;
  DOMAIN_CHECK(ivec_sup(g) <= half, "multiplier index must sit within R/2");
  const SiegelPoint& T = series.T;
  Eigen::VectorXd ug = series.lattice.embed(g);
  Eigen::VectorXcd gbar = T.period(ug);
  Eigen::MatrixXcd Yi = T.Y().inverse().cast<Cplx>();
  const Cplx mult = std::exp(Cplx{-kPi / 2.0 * gaussian_exponent(T, ug), 0.0});
  double worst = 0;
  for (const IVec& h : box_points(2 * series.lattice.N, half)) {
    IVec a = ivec_sub(h, g);
    Eigen::VectorXd ua = series.lattice.embed(a);
    Eigen::VectorXcd abar_star = T.period(ua).conjugate();
    Cplx cross = gbar.cwiseProduct(Yi.lazyProduct(abar_star)).sum();  // g_bar^t Y^{-1} a_bar*
    double form = symplectic_form(ug, ua);
    // X_g has -alpha_sign * pi i A; the algebra factor restores it.
    Cplx X = Cplx{-kPi * cross.real(), -series.alpha_sign * kPi * form};
    Cplx structure = cis(series.alpha_sign * kPi * form);
    Cplx lhs = mult * std::exp(X) * structure * series.coeffs.at(a);
    worst = std::max(worst, std::abs(lhs - series.coeffs.at(h)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Coefficient algebra

ConvResult twisted_convolve(const CoeffMap& F, const CoeffMap& G, const EmbeddedLattice& L,
                            int alpha_sign, int R) {
  ConvResult out;
  for (const auto& [k, fk] : F)
    for (const auto& [j, gj] : G) {
      Cplx term = fk * gj * cis(alpha_sign * kPi * L.pairing(k, j));
      IVec h = ivec_add(k, j);
      if (ivec_sup(h) <= R)
        out.coeffs[h] += term;
      else
        out.dropped += std::abs(term);
    }
  return out;
}

CoeffMap star_adjoint(const CoeffMap& F) {
  CoeffMap out;
  for (const auto& [h, v] : F) out[ivec_neg(h)] = std::conj(v);
  return out;
}

double coeff_sup(const CoeffMap& F) {
  double m = 0;
  for (const auto& [h, v] : F) m = std::max(m, std::abs(v));
  return m;
}

double coeff_l1(const CoeffMap& F) {
  double m = 0;
  for (const auto& [h, v] : F) m += std::abs(v);
  return m;
}

namespace {

CoeffMap coeff_sub(const CoeffMap& A, const CoeffMap& B) {
  CoeffMap out = A;
  for (const auto& [h, v] : B) out[h] -= v;
  return out;
}

CoeffMap coeff_scale(const CoeffMap& A, Cplx s) {
  CoeffMap out = A;
  for (auto& [h, v] : out) v *= s;
  return out;
}

// Drops entries below eps relative to the largest; keeps convolution supports
// matched to the genuinely contributing coefficients.
CoeffMap coeff_prune(const CoeffMap& A, double eps) {
  double floor = eps * std::max(1.0, coeff_sup(A));
  CoeffMap out;
  for (const auto& [h, v] : A)
    if (std::abs(v) >= floor) out[h] = v;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rieffel products

RieffelPair rieffel_products(const GaussianVector& phi, const GaussianVector& psi,
                             const EmbeddedLattice& D, int R) {
  EmbeddedLattice Dd = dual_lattice(D);
  QuantumThetaSeries A{D, phi.T, R, +1, {}};
  QuantumThetaSeries Bs{Dd, phi.T, R, -1, {}};
  for (const IVec& h : box_points(2 * D.N, R)) {
    A.coeffs[h] = gaussian_inner(phi, heisenberg_translate(D.embed(h), psi));
    Bs.coeffs[h] = gaussian_inner(heisenberg_translate(Dd.embed(h), psi), phi);
  }
  return RieffelPair{std::move(A), std::move(Bs)};
}

std::pair<Cplx, Cplx> module_identity_eval(const GaussianVector& l, const GaussianVector& m,
                                           const GaussianVector& n, const EmbeddedLattice& D,
                                           int R, const Eigen::VectorXd& x) {
  EmbeddedLattice Dd = dual_lattice(D);
  const double covol = D.covolume();
  Cplx lhs = 0, rhs = 0;
  for (const IVec& h : box_points(2 * D.N, R)) {
    Eigen::VectorXd u = D.embed(h);
    Cplx a = gaussian_inner(l, heisenberg_translate(u, m));
    lhs += covol * a * gaussian_eval(heisenberg_translate(u, n), x);
    Eigen::VectorXd v = Dd.embed(h);
    Cplx b = gaussian_inner(heisenberg_translate(v, n), m);
    rhs += b * gaussian_eval(heisenberg_translate(-v, l), x);
  }
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// The induced idempotent

BocaReport boca_projection(const EmbeddedLattice& D, const SiegelPoint& T, int R,
                           double newton_tol) {
  EmbeddedLattice Dd = dual_lattice(D);
  CoeffMap theta = coeff_prune(qtheta_coeffs_dual(D, T, R).coeffs, 1e-22);
  BocaReport rep;

  // Positivity certificate: smallest eigenvalue of the left-regular action of
  // Theta on the truncated coefficient space (heuristic, finite window).
  std::vector<IVec> box = box_points(2 * D.N, R);
  std::map<IVec, int> index;
  for (size_t i = 0; i < box.size(); ++i) index[box[i]] = static_cast<int>(i);
  Eigen::MatrixXcd reg = Eigen::MatrixXcd::Zero(box.size(), box.size());
  for (size_t col = 0; col < box.size(); ++col)
    for (const auto& [k, v] : theta) {
      IVec h = ivec_add(k, box[col]);
      auto it = index.find(h);
      if (it != index.end()) reg(it->second, col) = v * cis(-kPi * Dd.pairing(k, box[col]));
    }
  LOGIC_CHECK((reg - reg.adjoint()).norm() <= 1e-9 * (1 + reg.norm()),
              "regular representation must be hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reg);
  rep.theta_min_eig = es.eigenvalues().minCoeff();
  if (rep.theta_min_eig <= 0)
    throw std::runtime_error("truncated theta operator is not positive");

  // Newton-Schulz toward Theta^{-1/2} in the dual twisted algebra.
  CoeffMap one{{IVec(2 * D.N, 0), Cplx{1.0, 0.0}}};
  CoeffMap X = coeff_scale(one, Cplx{1.0 / coeff_l1(theta), 0.0});
  double prev = std::numeric_limits<double>::infinity();
  for (;;) {
    ConvResult X2 = twisted_convolve(X, X, Dd, -1, R);
    ConvResult TX2 = twisted_convolve(theta, X2.coeffs, Dd, -1, R);
    rep.dropped_mass = std::max({rep.dropped_mass, X2.dropped, TX2.dropped});
    rep.newton_residual = coeff_sup(coeff_sub(TX2.coeffs, one));
    if (rep.newton_residual < newton_tol) break;
    if (rep.newton_residual > prev * 1.2 && rep.newton_residual > 1)
      throw std::runtime_error("inverse square root iteration diverged");
    if (++rep.newton_iters > 80)
      throw std::runtime_error("inverse square root iteration stalled");
    prev = rep.newton_residual;
    CoeffMap E = coeff_sub(coeff_scale(one, Cplx{3.0, 0.0}), TX2.coeffs);
    ConvResult next = twisted_convolve(X, E, Dd, -1, R);
    rep.dropped_mass = std::max(rep.dropped_mass, next.dropped);
    X = coeff_prune(coeff_scale(next.coeffs, Cplx{0.5, 0.0}), 1e-22);
  }

  // m = f_T Theta^{-1/2} as a finite Gaussian combination; the right action of
  // the dual algebra is the adjoint translate f e(h) = U_{-B^! h} f, which is
  // what composes with the conjugate structure constants.
  GaussianVector f0 = gaussian_ground(T);
  std::vector<GaussianVector> parts;
  const double floor = 1e-16 * coeff_sup(X);
  for (const auto& [h, v] : X) {
    if (std::abs(v) < floor) continue;
    GaussianVector part = heisenberg_translate(-Dd.embed(h), f0);
    part.scale *= v;
    parts.push_back(part);
  }

  // |<f, U_delta f>| = c0 exp(-(pi/2) Q(delta)) for a positive quadratic form Q
  // on phase space; assemble Q from inner products on basis vectors so pair
  // sums below can skip far-apart translates.
  const int dim = 2 * D.N;
  const double c00 = std::abs(gaussian_inner(f0, f0));
  auto decay_q = [&](const Eigen::VectorXd& delta) {
    GaussianVector t = heisenberg_translate(delta, f0);
    return -2.0 / kPi * std::log(std::abs(gaussian_inner(f0, t)) / c00);
  };
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Unit(dim, i);
    Q(i, i) = decay_q(ei);
    for (int k = 0; k < i; ++k) {
      Eigen::VectorXd ek = Eigen::VectorXd::Unit(dim, k);
      Q(i, k) = Q(k, i) = 0.5 * (decay_q(ei + ek) - Q(i, i) - Q(k, k));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qes(Q);
  const double lam = qes.eigenvalues().minCoeff();
  LOGIC_CHECK(lam > 0, "overlap decay form must be positive definite");
  const double cut2 = 2.0 / (kPi * lam) * 60.0;

  // p = |K/D| _D<m, m>: p_g = |K/D| <m, U_{Bg} m>.  The inverse square root is
  // truncated at R; products of R-supported data close on the doubled box, so
  // p and its idempotency defect are resolved there.
  const int Rp = 2 * R;
  const double covol = D.covolume();
  for (const IVec& g : box_points(dim, Rp)) {
    Eigen::VectorXd u = D.embed(g);
    Cplx acc = 0;
    for (const GaussianVector& right : parts) {
      GaussianVector shifted = heisenberg_translate(u, right);
      for (const GaussianVector& left : parts) {
        if ((left.w - shifted.w).squaredNorm() > cut2) continue;
        acc += gaussian_inner(left, shifted);
      }
    }
    rep.p[g] = covol * acc;
  }

  ConvResult pp = twisted_convolve(rep.p, rep.p, D, +1, Rp);
  rep.dropped_mass = std::max(rep.dropped_mass, pp.dropped);
  rep.idem_residual = coeff_sup(coeff_sub(pp.coeffs, rep.p));
  rep.selfadj_residual = coeff_sup(coeff_sub(star_adjoint(rep.p), rep.p));
  Cplx p0 = rep.p.at(IVec(2 * D.N, 0));
  LOGIC_CHECK(std::abs(p0.imag()) <= 1e-10 * (1 + std::abs(p0.real())),
              "trace of the idempotent must be real");
  rep.trace = p0.real();
  return rep;
}

// ---------------------------------------------------------------------------
// Bimodule actions

BimoduleReport bimodule_action_residual(const MoritaMatrix& g, double X, int points) {
  const long a = g.g.a.convert_to<long>();
  const long c = g.g.c.convert_to<long>();
  const long d = g.g.d.convert_to<long>();
  DOMAIN_CHECK(c != 0, "the action needs a genuine cusp (c != 0)");
  DOMAIN_CHECK(points >= 2, "need at least two sample points");
  const long cm = std::labs(c);
  const double theta = g.source.to_double();
  const double j = g.j.to_double();  // c theta + d > 0

  // One Gaussian per residue class, fixed seeds so reports are reproducible.
  std::vector<Cplx> amp(cm);
  std::vector<double> x0(cm), width(cm), tone(cm);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (long r = 0; r < cm; ++r) {
    amp[r] = Cplx{1.0 + 0.5 * uni(rng), uni(rng)};
    x0[r] = uni(rng);
    width[r] = 1.0 + 0.4 * uni(rng);
    tone[r] = uni(rng);
  }
  using Fn = std::function<Cplx(double, long)>;
  Fn f = [=](double x, long mu) {
    long r = ((mu % cm) + cm) % cm;
    double t = (x - x0[r]) / width[r];
    return amp[r] * std::exp(-t * t) * cis(2 * kPi * tone[r] * x);
  };

  auto right_u = [&](Fn F) {
    return Fn([=](double x, long mu) { return F(x - j / c, mu - 1); });
  };
  auto right_v = [&](Fn F) {
    return Fn([=](double x, long mu) { return cis(2 * kPi * (x - double(mu) * d / c)) * F(x, mu); });
  };
  auto left_u = [&](Fn F) {
    return Fn([=](double x, long mu) { return F(x - 1.0 / c, mu - a); });
  };
  auto left_v = [&](Fn F) {
    return Fn([=](double x, long mu) { return cis(2 * kPi * (x / j - double(mu) / c)) * F(x, mu); });
  };

  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = -X + 2 * X * i / (points - 1);

  auto sup_diff = [&](const Fn& A, const Fn& B, Cplx phase) {
    double m = 0;
    for (double x : xs)
      for (long mu = 0; mu < cm; ++mu) m = std::max(m, std::abs(A(x, mu) - phase * B(x, mu)));
    return m;
  };
  auto measure_phase = [&](const Fn& A, const Fn& B) {
    double best = 0;
    Cplx phase{0, 0};
    for (double x : xs)
      for (long mu = 0; mu < cm; ++mu) {
        Cplx den = B(x, mu);
        if (std::abs(den) > best) {
          best = std::abs(den);
          phase = A(x, mu) / den;
        }
      }
    return phase;
  };

  BimoduleReport rep;
  Fn uv = right_v(right_u(f)), vu = right_u(right_v(f));
  rep.right_phase = measure_phase(uv, vu);
  rep.right_relation_residual = sup_diff(uv, vu, cis(2 * kPi * theta));
  Fn lu = left_u(left_v(f)), lv = left_v(left_u(f));
  rep.left_phase = measure_phase(lu, lv);
  rep.left_relation_residual = sup_diff(lu, lv, rep.left_phase);
  rep.commutation_residual = std::max(
      {sup_diff(left_u(right_u(f)), right_u(left_u(f)), Cplx{1, 0}),
       sup_diff(left_u(right_v(f)), right_v(left_u(f)), Cplx{1, 0}),
       sup_diff(left_v(right_u(f)), right_u(left_v(f)), Cplx{1, 0}),
       sup_diff(left_v(right_v(f)), right_v(left_v(f)), Cplx{1, 0})});
  return rep;
}

// ---------------------------------------------------------------------------
// Classical theta cross-check

Cplx theta_classical(Cplx z, Cplx tau, int M) {
  Cplx acc = 0;
  for (int n = -M; n <= M; ++n) acc += std::exp(kI * kPi * (double(n) * n * tau + 2.0 * n * z));
  return acc;
}

double mumford_ratio_deviation(const SiegelPoint& T,
                               const std::vector<std::array<double, 2>>& grid, int M) {
  DOMAIN_CHECK(T.N() == 1, "the comb pairing is one-dimensional");
  DOMAIN_CHECK(!grid.empty(), "need at least one grid point");
  const Cplx tau = T.T(0, 0);
  GaussianVector f0 = gaussian_ground(T);
  std::vector<Cplx> ratios;
  for (const auto& [x1, x2] : grid) {
    Eigen::VectorXd y(2);
    y << x1, x2;
    GaussianVector fx = heisenberg_translate(y, f0);
    Cplx comb = 0;
    Eigen::VectorXd p(1);
    for (int n = -M; n <= M; ++n) {
      p << double(n);
      comb += gaussian_eval(fx, p);
    }
    Cplx xb = tau * x1 + x2;
    ratios.push_back(comb / theta_classical(xb, tau, M) * std::exp(-kI * kPi * x1 * xb));
  }
  double dev = 0;
  for (const Cplx& r : ratios) dev = std::max(dev, std::abs(r - ratios.front()));
  return dev;
}

}  // namespace rmlab
