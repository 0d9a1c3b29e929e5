#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "rmlab/qtorus.hpp"

using namespace rmlab;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Cplx cis(double t) { return Cplx{std::cos(t), std::sin(t)}; }

const double kTheta = std::sqrt(2.0) - 1.0;

// N=1 workhorse: D = theta Z x Z embedded by B = diag(theta, 1), T = i.
struct Worked {
  Eigen::MatrixXd B = [] {
    Eigen::MatrixXd m(2, 2);
    m << std::sqrt(2.0) - 1.0, 0.0, 0.0, 1.0;
    return m;
  }();
  EmbeddedLattice D{1, B};
  SiegelPoint T = [] {
    Eigen::MatrixXcd t(1, 1);
    t(0, 0) = Cplx{0.0, 1.0};
    return SiegelPoint(t);
  }();
};

// N=2 diagonal fixture: standard lattice Z^4, T = diag(i, 2i).
struct Worked2 {
  EmbeddedLattice D{2, Eigen::MatrixXd::Identity(4, 4)};
  SiegelPoint T = [] {
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2, 2);
    t(0, 0) = Cplx{0.0, 1.0};
    t(1, 1) = Cplx{0.0, 2.0};
    return SiegelPoint(t);
  }();
};

double coeff_gap(const CoeffMap& a, const CoeffMap& b) {
  double m = 0;
  for (const auto& [h, v] : a) {
    auto it = b.find(h);
    m = std::max(m, std::abs(v - (it == b.end() ? Cplx{0, 0} : it->second)));
  }
  for (const auto& [h, v] : b)
    if (!a.count(h)) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Moebius rescaling data

TEST_CASE("moebius rescaling of sqrt 2 by the shift and the flip") {
  QuadElem theta(0, 1, 2);

  MoritaMatrix shift = morita_act(Mat2{1, 1, 0, 1}, theta);
  CHECK(shift.target == QuadElem(1, 1, 2));  // 1 + sqrt 2
  CHECK(shift.j == QuadElem(1, 0, 2));

  MoritaMatrix flip = morita_act(Mat2{0, 1, 1, 0}, theta);
  CHECK(flip.target == QuadElem(0, Rat(1, 2), 2));  // 1/sqrt 2
  CHECK(flip.j == QuadElem(0, 1, 2));
}

TEST_CASE("rescaling normalizes the sign of the denominator") {
  // c theta + d < 0 for the raw matrix; the stored representative flips it.
  MoritaMatrix m = morita_act(Mat2{0, 1, 1, -1}, QuadElem(-1, 1, 2));
  CHECK(m.g.c == -1);
  CHECK(m.j.sign() > 0);
  CHECK(m.j == QuadElem(2, -1, 2));  // 2 - sqrt 2
}

TEST_CASE("rescaling denominators compose multiplicatively") {
  std::mt19937 rng(4243);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_int_distribution<int> len(1, 6);
  const Mat2 S{0, -1, 1, 0}, Tt{1, 1, 0, 1}, Ti{1, -1, 0, 1};
  auto word = [&] {
    Mat2 g{1, 0, 0, 1};
    int n = len(rng);
    for (int i = 0; i < n; ++i) {
      int c = pick(rng);
      g = g * (c == 0 ? S : c == 1 ? Tt : Ti);
    }
    return g;
  };
  QuadElem theta(0, 1, 2);
  for (int trial = 0; trial < 100; ++trial) {
    MoritaMatrix inner = morita_act(word(), theta);
    MoritaMatrix outer = morita_act(word(), inner.target);
    MoritaMatrix both = morita_compose(outer, inner);  // checks the chain rule
    CHECK(both.target == outer.target);
    CHECK(both.j == outer.j * inner.j);
    CHECK(both.source == theta);
  }
}

TEST_CASE("rescaling rejects degenerate input") {
  CHECK_THROWS_AS(morita_act(Mat2{2, 0, 0, 1}, QuadElem(0, 1, 2)), std::domain_error);
  // rational fixed point of the denominator: c theta + d = 0
  CHECK_THROWS_AS(morita_act(Mat2{1, 0, 1, 1}, QuadElem(-1, 0, 2)), std::domain_error);
}

// ---------------------------------------------------------------------------
// Embedded lattices and duality

TEST_CASE("structure constants pair the embedding through the symplectic form") {
  Worked w;
  IVec g{2, -1}, h{1, 3};
  double A = symplectic_form(w.D.embed(g), w.D.embed(h));
  CHECK(std::abs(w.D.alpha(g, h) - cis(kPi * A)) < 1e-15);
  CHECK(std::abs(w.D.commutator(g, h) - cis(2 * kPi * A)) < 1e-15);
  // commutator = alpha ratio; alpha is antisymmetric as a phase
  CHECK(std::abs(w.D.commutator(g, h) - w.D.alpha(g, h) / w.D.alpha(h, g)) < 1e-15);
  CHECK(std::abs(w.D.alpha(g, h) * w.D.alpha(h, g) - 1.0) < 1e-15);
}

TEST_CASE("dual of theta Z x Z is Z x (1/theta) Z") {
  Worked w;
  EmbeddedLattice dual = dual_lattice(w.D);
  Eigen::Vector2d e1{1.0, 0.0}, e2{0.0, 1.0 / kTheta};
  CHECK(dual.contains(e1));
  CHECK(dual.contains(e2));
  CHECK_FALSE(dual.contains(Eigen::Vector2d{0.5, 0.0}));
  CHECK(dual.covolume() == doctest::Approx(1.0 / kTheta).epsilon(1e-12));
  CHECK(w.D.covolume() * dual.covolume() == doctest::Approx(1.0).epsilon(1e-12));

  // duality through the commutator: integral symplectic pairing
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      double A = symplectic_form(w.D.embed({a, b}), dual.embed({1, -1}));
      CHECK(std::abs(A - std::round(A)) < 1e-9);
    }
}

TEST_CASE("duality is involutive and fixes the self-dual lattice") {
  Worked w;
  EmbeddedLattice once = dual_lattice(w.D);
  EmbeddedLattice twice = dual_lattice(once);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      CHECK(twice.contains(w.D.embed({a, b})));
      CHECK(w.D.contains(twice.embed({a, b})));
    }
  EmbeddedLattice z2(1, Eigen::MatrixXd::Identity(2, 2));
  EmbeddedLattice z2d = dual_lattice(z2);
  CHECK(z2d.contains(Eigen::Vector2d{1.0, 0.0}));
  CHECK(z2d.contains(Eigen::Vector2d{0.0, 1.0}));
  CHECK(z2d.covolume() == doctest::Approx(1.0));
}

TEST_CASE("embedded lattice and period matrix validate their input") {
  CHECK_THROWS_AS(EmbeddedLattice(1, Eigen::MatrixXd::Zero(2, 2)), std::domain_error);
  CHECK_THROWS_AS(EmbeddedLattice(2, Eigen::MatrixXd::Identity(2, 2)), std::domain_error);

  Eigen::MatrixXcd bad(2, 2);
  bad << Cplx{0, 1}, Cplx{0.1, 0}, Cplx{0.2, 0}, Cplx{0, 2};
  CHECK_THROWS_AS(SiegelPoint{bad}, std::domain_error);
  Eigen::MatrixXcd neg(1, 1);
  neg(0, 0) = Cplx{0, -1};
  CHECK_THROWS_AS(SiegelPoint{neg}, std::domain_error);
}

// ---------------------------------------------------------------------------
// Quantum theta coefficients

TEST_CASE("ground coefficients are Gaussian values of the embedded periods") {
  Worked w;
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 6);
  CHECK(std::abs(s.coeffs.at({0, 0}) - 1.0 / std::sqrt(2.0)) < 1e-15);
  double c10 = std::exp(-kPi / 2 * kTheta * kTheta) / std::sqrt(2.0);
  CHECK(std::abs(s.coeffs.at({1, 0}) - c10) < 1e-15);
  CHECK(std::abs(s.coeffs.at({1, 0}) - 0.540057516798375) < 1e-14);
  double c01 = std::exp(-kPi / 2) / std::sqrt(2.0);
  CHECK(std::abs(s.coeffs.at({0, 1}) - c01) < 1e-15);
  // every coefficient is real positive: Gaussian at a real point
  for (const auto& [h, v] : s.coeffs) {
    CHECK(v.real() > 0);
    CHECK(std::abs(v.imag()) < 1e-18);
  }
}

TEST_CASE("dual-side coefficients swap the decay axes") {
  Worked w;
  QuantumThetaSeries s = qtheta_coeffs_dual(w.D, w.T, 4);
  CHECK(s.alpha_sign == -1);
  CHECK(std::abs(s.coeffs.at({0, 0}) - 1.0 / std::sqrt(2.0)) < 1e-15);
  double c10 = std::exp(-kPi / 2 / (kTheta * kTheta)) / std::sqrt(2.0);
  double c01 = std::exp(-kPi / 2) / std::sqrt(2.0);
  CHECK(std::abs(s.coeffs.at({1, 0}) - c10) < 1e-15);
  CHECK(std::abs(s.coeffs.at({0, 1}) - c01) < 1e-15);
}

TEST_CASE("two-variable ground coefficient is the determinant normalization") {
  Worked2 w;
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 3);
  CHECK(std::abs(s.coeffs.at({0, 0, 0, 0}) - 1.0 / std::sqrt(8.0)) < 1e-15);
}

TEST_CASE("coefficients agree with direct inner-product quadrature") {
  Worked w;
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 4);
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      if (a * a + b * b > 9) continue;
      InnerPair ip = heisenberg_inner(w.D, w.T, {a, b});
      CHECK(std::abs(ip.closed - ip.quadrature) < 1e-8);
      CHECK(std::abs(ip.closed - s.coeffs.at({a, b})) < 1e-12);
    }
  InnerPair tight = heisenberg_inner(w.D, w.T, {1, 0});
  CHECK(std::abs(tight.closed - tight.quadrature) < 1e-12);
}

TEST_CASE("two-variable coefficients agree with nested quadrature") {
  Worked2 w;
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 3);
  for (const IVec& h : std::vector<IVec>{
           {0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0},
           {0, 0, 0, 1}, {1, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1},
           {1, 0, 0, 1}, {1, 1, 1, 1}}) {
    InnerPair ip = heisenberg_inner(w.D, w.T, h);
    CHECK(std::abs(ip.closed - ip.quadrature) < 1e-8);
    CHECK(std::abs(ip.closed - s.coeffs.at(h)) < 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Functional equation of the coefficients

TEST_CASE("coefficient functional equation holds per lattice shift") {
  Worked w;
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 8);
  CHECK(qtheta_fe_residual(s, {0, 0}) == 0.0);
  CHECK(qtheta_fe_residual(s, {1, 0}) < 1e-12);
  CHECK(qtheta_fe_residual(s, {2, -1}) < 1e-12);

  QuantumThetaSeries d = qtheta_coeffs_dual(w.D, w.T, 8);
  CHECK(qtheta_fe_residual(d, {0, 1}) < 1e-12);
  CHECK(qtheta_fe_residual(d, {1, 2}) < 1e-12);
}

TEST_CASE("two-variable functional equation holds") {
  Worked2 w;
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 5);
  CHECK(qtheta_fe_residual(s, {1, 0, 0, 1}) < 1e-12);
  CHECK(qtheta_fe_residual(s, {0, 1, 1, 0}) < 1e-12);
}

// ---------------------------------------------------------------------------
// Twisted convolution algebra

TEST_CASE("convolution identity and star involution") {
  Worked w;
  CoeffMap delta{{IVec{0, 0}, Cplx{1, 0}}};
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 4);
  ConvResult r = twisted_convolve(delta, s.coeffs, w.D, +1, 4);
  CHECK(coeff_gap(r.coeffs, s.coeffs) < 1e-16);
  CHECK(r.dropped == 0.0);
  CHECK(coeff_gap(star_adjoint(star_adjoint(s.coeffs)), s.coeffs) < 1e-16);
}

TEST_CASE("convolution is associative when nothing is truncated") {
  Worked w;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto rnd = [&] {
    CoeffMap m;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) m[{a, b}] = Cplx{uni(rng), uni(rng)};
    return m;
  };
  CoeffMap F = rnd(), G = rnd(), H = rnd();
  for (int sign : {+1, -1}) {
    ConvResult FG = twisted_convolve(F, G, w.D, sign, 12);
    ConvResult GH = twisted_convolve(G, H, w.D, sign, 12);
    ConvResult left = twisted_convolve(FG.coeffs, H, w.D, sign, 12);
    ConvResult right = twisted_convolve(F, GH.coeffs, w.D, sign, 12);
    CHECK(FG.dropped == 0.0);
    CHECK(left.dropped == 0.0);
    CHECK(coeff_gap(left.coeffs, right.coeffs) < 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Module products

TEST_CASE("left module product of the ground vector reproduces the coefficients") {
  Worked w;
  GaussianVector f0 = gaussian_ground(w.T);
  RieffelPair pair = rieffel_products(f0, f0, w.D, 6);
  QuantumThetaSeries s = qtheta_coeffs(w.D, w.T, 6);
  CHECK(coeff_gap(pair.series_A.coeffs, s.coeffs) < 1e-15);
}

TEST_CASE("swapping the module product arguments conjugates the coefficients") {
  Worked w;
  GaussianVector f0 = gaussian_ground(w.T);
  GaussianVector g = heisenberg_translate(Eigen::Vector2d{0.37, -0.21}, f0);
  RieffelPair fg = rieffel_products(f0, g, w.D, 6);
  RieffelPair gf = rieffel_products(g, f0, w.D, 6);
  CHECK(coeff_gap(star_adjoint(fg.series_A.coeffs), gf.series_A.coeffs) < 1e-13);
  CHECK(coeff_gap(star_adjoint(fg.series_B.coeffs), gf.series_B.coeffs) < 1e-13);
}

TEST_CASE("left and right module products associate pointwise") {
  Worked w;
  GaussianVector l = gaussian_ground(w.T);
  GaussianVector m = heisenberg_translate(Eigen::Vector2d{0.3, 0.1}, l);
  GaussianVector n = heisenberg_translate(Eigen::Vector2d{-0.2, 0.4}, l);
  for (double x : {-1.0, -0.4, 0.0, 0.7, 1.3}) {
    auto [lhs, rhs] = module_identity_eval(l, m, n, w.D, 6, Eigen::VectorXd::Constant(1, x));
    CHECK(std::abs(lhs - rhs) < 1e-6);
  }
}

// ---------------------------------------------------------------------------
// The smooth idempotent

TEST_CASE("inverse square root pipeline produces the trace-theta idempotent") {
  Worked w;
  BocaReport r6 = boca_projection(w.D, w.T, 6, 1e-13);
  BocaReport r10 = boca_projection(w.D, w.T, 10, 1e-13);

  CHECK(r10.idem_residual < 1e-6);
  CHECK(r6.idem_residual < 1e-3);
  CHECK(r10.idem_residual < r6.idem_residual);  // refinement helps, monotonically

  CHECK(r10.selfadj_residual < 1e-10);
  CHECK(r6.selfadj_residual < 1e-10);

  CHECK(std::abs(r10.trace - kTheta) < 2e-3);
  CHECK(std::abs(r10.trace - kTheta) < 1e-12);  // in fact exact to roundoff
  CHECK(std::abs(r6.trace - kTheta) < 1e-12);

  CHECK(r10.theta_min_eig > 0.4);
  CHECK(r10.theta_min_eig < 0.45);
  CHECK(r10.newton_iters >= 5);
  CHECK(r10.newton_iters <= 20);
  CHECK(r10.newton_residual < 1e-13);
}

// ---------------------------------------------------------------------------
// Cusp bimodule actions

TEST_CASE("generator relations of the cusp actions hold with measured phases") {
  QuadElem theta(-1, 1, 2);  // sqrt 2 - 1

  auto closed_left_phase = [](const MoritaMatrix& m) {
    double a = m.g.a.convert_to<double>();
    double c = m.g.c.convert_to<double>();
    return cis(2 * kPi * (a / c - 1.0 / (c * m.j.to_double())));
  };

  // orientation-reversing representative
  MoritaMatrix flip = morita_act(Mat2{0, 1, 1, -1}, theta);
  BimoduleReport rf = bimodule_action_residual(flip, 5.0, 64);
  CHECK(rf.right_relation_residual < 1e-12);
  CHECK(rf.left_relation_residual < 1e-12);
  CHECK(rf.commutation_residual < 1e-12);
  CHECK(std::abs(rf.right_phase - cis(2 * kPi * theta.to_double())) < 1e-14);
  CHECK(std::abs(rf.left_phase - closed_left_phase(flip)) < 1e-13);

  for (Mat2 g : {Mat2{2, 1, 1, 1}, Mat2{3, 1, 2, 1}}) {
    MoritaMatrix m = morita_act(g, theta);
    BimoduleReport r = bimodule_action_residual(m, 5.0, 64);
    CHECK(r.right_relation_residual < 1e-12);
    CHECK(r.left_relation_residual < 1e-12);
    CHECK(r.commutation_residual < 1e-12);
    CHECK(std::abs(r.right_phase - cis(2 * kPi * theta.to_double())) < 1e-14);
    CHECK(std::abs(r.left_phase - closed_left_phase(m)) < 1e-13);
    // unimodular orientation-preserving case: the left phase is the image point
    CHECK(std::abs(r.left_phase - cis(2 * kPi * m.target.to_double())) < 1e-13);
  }
}

TEST_CASE("cusp actions refuse a parabolic without a cusp") {
  MoritaMatrix m = morita_act(Mat2{1, 1, 0, 1}, QuadElem(-1, 1, 2));
  CHECK_THROWS_AS(bimodule_action_residual(m, 5.0, 64), std::domain_error);
}

// ---------------------------------------------------------------------------
// Classical limit

TEST_CASE("pairing against the integer comb is a classical theta up to a constant") {
  std::vector<std::array<double, 2>> grid{
      {0.0, 0.0}, {0.3, 0.2}, {-0.7, 0.55}, {1.1, -0.4}, {0.25, 0.8}};
  Eigen::MatrixXcd t1(1, 1);
  t1(0, 0) = Cplx{0.0, 1.0};
  CHECK(mumford_ratio_deviation(SiegelPoint(t1), grid, 12) < 1e-9);
  Eigen::MatrixXcd t2(1, 1);
  t2(0, 0) = Cplx{1.0, 1.0};
  CHECK(mumford_ratio_deviation(SiegelPoint(t2), grid, 12) < 1e-9);
}

TEST_CASE("classical theta sums match a hand-rolled series") {
  Cplx tau{0.0, 1.0};
  Cplx direct = 0;
  for (int n = -12; n <= 12; ++n)
    direct += std::exp(kPi * Cplx{0, 1} * (double)(n * n) * tau +
                       2.0 * kPi * Cplx{0, 1} * (double)n * Cplx{0.3, 0.0});
  CHECK(std::abs(theta_classical(Cplx{0.3, 0.0}, tau, 12) - direct) < 1e-15);
}
