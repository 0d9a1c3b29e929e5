#include "rmlab/acceptance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "rmlab/numerics.hpp"
#include "rmlab/pseudolattice.hpp"
#include "rmlab/qexp.hpp"
#include "rmlab/qtorus.hpp"
#include "rmlab/quadfield.hpp"
#include "rmlab/rmtheta.hpp"
#include "rmlab/starkzeta.hpp"

namespace rmlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Cplx kI{0.0, 1.0};

Cplx cis(double t) { return Cplx{std::cos(t), std::sin(t)}; }

QuadElem qe(long a, long b, long d) { return QuadElem(a, b, d); }

QuadElem rand_theta(std::mt19937& rng, long d) {
  std::uniform_int_distribution<long> num(-12, 12), den(1, 4), bnum(1, 9);
  long bs = (rng() & 1) ? 1 : -1;
  return QuadElem(Rat(num(rng), den(rng)), Rat(bs * bnum(rng), den(rng)), d);
}

// Tracks a criterion while it runs: exact failures flip the flag, numeric
// residuals accumulate into worst.
struct Gate {
  Criterion c;
  Gate(int id, std::string name, double bound) {
    c.id = id;
    c.name = std::move(name);
    c.bound = bound;
    c.pass = true;
  }
  void exact(bool ok, const char* what) {
    if (!ok) {
      c.pass = false;
      if (c.detail.empty()) c.detail = what;
    }
  }
  void residual(double r, const char* what) {
    if (!(r <= c.bound)) {
      c.pass = false;
      if (c.detail.empty()) c.detail = what;
    }
    c.worst = std::max(c.worst, r);
  }
  // For sub-checks with their own tolerance, tighter or looser than bound.
  void residual_at(double r, double tol, const char* what) {
    if (!(r <= tol)) {
      c.pass = false;
      if (c.detail.empty()) c.detail = what;
    }
    c.worst = std::max(c.worst, r);
  }
};

const long kFields[] = {2, 3, 5, 6, 7, 13};

// --------------------------------------------------------------- criterion 1

Criterion crit_field_arithmetic(std::mt19937& rng) {
  Gate g(1, "exact field arithmetic and fundamental units", 0.0);
  std::uniform_int_distribution<long> num(-30, 30), den(1, 8);
  for (int trial = 0; trial < 60; ++trial) {
    long d = kFields[trial % 6];
    QuadElem x(Rat(num(rng), den(rng)), Rat(num(rng), den(rng)), d);
    QuadElem y(Rat(num(rng), den(rng)), Rat(num(rng), den(rng)), d);
    g.exact((x * y).norm() == x.norm() * y.norm(), "norm not multiplicative");
    g.exact((x * y).conj() == x.conj() * y.conj(), "conjugation not a ring map");
    g.exact(x.conj().conj() == x, "conjugation not involutive");
    g.exact((x + y).trace() == x.trace() + y.trace(), "trace not additive");
    if (!x.is_zero())
      g.exact(x * x.inverse() == qe(1, 0, d), "inverse does not cancel");
  }
  // Classical Pell data, exact equality including the norm sign.
  struct Pell {
    long d;
    QuadElem u;
    int nrm;
  };
  const Pell table[] = {
      {2, qe(1, 1, 2), -1},
      {3, qe(2, 1, 3), +1},
      {5, QuadElem(Rat(1, 2), Rat(1, 2), 5), -1},
      {6, qe(5, 2, 6), +1},
      {7, qe(8, 3, 7), +1},
      {13, QuadElem(Rat(3, 2), Rat(1, 2), 13), -1},
  };
  for (const Pell& p : table) {
    FundamentalUnit fu = fundamental_unit(p.d);
    g.exact(fu.unit == p.u, "fundamental unit off the classical value");
    g.exact(fu.norm == p.nrm, "unit norm sign wrong");
    QuadElem tp = (p.nrm == 1) ? p.u : p.u * p.u;
    g.exact(fu.totally_positive == tp, "totally positive unit wrong");
  }
  return g.c;
}

// --------------------------------------------------------------- criterion 2

std::vector<std::array<long, 4>> gl2z_box(long box) {
  std::vector<std::array<long, 4>> out;
  for (long a = -box; a <= box; ++a)
    for (long b = -box; b <= box; ++b)
      for (long c = -box; c <= box; ++c)
        for (long d = -box; d <= box; ++d) {
          long dt = a * d - b * c;
          if (dt == 1 || dt == -1) out.push_back({a, b, c, d});
        }
  return out;
}

bool moebius_equal_exact(const std::array<long, 4>& g, const QuadElem& t2, const QuadElem& t1) {
  QuadElem den = Rat(g[2]) * t2 + QuadElem(Rat(g[3]), 0, t2.d);
  if (den.is_zero()) return false;
  return (Rat(g[0]) * t2 + QuadElem(Rat(g[1]), 0, t2.d)) / den == t1;
}

bool oracle_equivalent(const std::vector<std::array<long, 4>>& box, const QuadElem& t1,
                       const QuadElem& t2) {
  double x1 = t1.to_double(), x2 = t2.to_double();
  for (const auto& g : box) {
    double den = g[2] * x2 + g[3];
    if (std::abs(den) < 1e-12) continue;
    if (std::abs((g[0] * x2 + g[1]) / den - x1) > 1e-7) continue;
    if (moebius_equal_exact(g, t2, t1)) return true;
  }
  return false;
}

Criterion crit_pseudolattice(std::mt19937& rng) {
  Gate g(2, "dual lattices, conductors, slope equivalence", 0.0);

  int done = 0;
  while (done < 20) {
    long d = kFields[done % 6];
    QuadElem l1 = rand_theta(rng, d), l2 = rand_theta(rng, d);
    if (l1.is_zero() || l2.is_zero() || (l1 / l2).b == 0) continue;
    Pseudolattice L(l1, l2);
    g.exact(L.delta() * L.dual().delta() == qe(1, 0, d), "delta product not 1");
    ++done;
  }

  g.exact(endomorphism_ring(Pseudolattice(QuadElem(Rat(1, 2), Rat(1, 2), 5), qe(1, 0, 5)))
                  .conductor == 1,
          "maximal-order module got conductor != 1");
  g.exact(endomorphism_ring(Pseudolattice(qe(0, 1, 5), qe(1, 0, 5))).conductor == 2,
          "Z[sqrt5] conductor != 2");
  g.exact(endomorphism_ring(Pseudolattice(qe(0, 3, 2), qe(1, 0, 2))).conductor == 3,
          "Z[3 sqrt2] conductor != 3");

  const auto box = gl2z_box(20);
  std::vector<std::array<long, 4>> small;
  for (const auto& m : box)
    if (std::max({std::abs(m[0]), std::abs(m[1]), std::abs(m[2]), std::abs(m[3])}) <= 3)
      small.push_back(m);
  const long ds[] = {2, 3, 5, 13};
  int trials = 0;
  while (trials < 50) {
    long d = ds[trials % 4];
    QuadElem t2 = rand_theta(rng, d);
    QuadElem t1;
    if (trials % 2 == 0) {
      const auto& h = small[rng() % small.size()];
      QuadElem den = Rat(h[2]) * t2 + QuadElem(Rat(h[3]), 0, d);
      if (den.is_zero()) continue;
      t1 = (Rat(h[0]) * t2 + QuadElem(Rat(h[1]), 0, d)) / den;
      if (t1.b == 0) continue;
    } else {
      t1 = rand_theta(rng, d);
    }
    ++trials;
    bool oracle = oracle_equivalent(box, t1, t2);
    auto witness = gl2z_equivalent(t1, t2);
    if (oracle) g.exact(witness.has_value(), "oracle found a matrix the method missed");
    if (!witness) g.exact(!oracle, "method missed an equivalence");
    if (witness) {
      g.exact(moebius(*witness, t2) == t1, "witness does not map the slopes");
      Int m = std::max({abs(witness->a), abs(witness->b), abs(witness->c), abs(witness->d)});
      if (m <= 20) g.exact(oracle, "witness inside the box escaped the oracle");
    }
  }
  return g.c;
}

// --------------------------------------------------------------- criterion 3

Criterion crit_geodesic(std::mt19937& rng) {
  Gate g(3, "geodesic circle and period stabilizers", 1e-12);
  for (int i = 0; i < 12; ++i) {
    QuadElem t = rand_theta(rng, kFields[i % 6]);
    double th = t.to_double(), thc = t.conj().to_double();
    double center = 0.5 * (th + thc), radius = 0.5 * std::abs(th - thc);
    for (double time : {-2.0, -0.8, 0.0, 0.7, 1.6, 3.0}) {
      std::complex<double> p = geodesic_point(t, time);
      g.residual(std::abs(std::abs(p - center) - radius), "geodesic leaves its circle");
    }
    Mat2 st = cf_stabilizer(t);
    g.exact(moebius(st, t) == t, "stabilizer moves theta");
    QuadElem lam = Rat(st.c) * t + QuadElem(Rat(st.d), 0, t.d);
    g.exact(lam.norm() == Rat(det(st)), "stabilizer eigenvalue is not a unit");
    g.exact(cmp(lam, qe(1, 0, t.d)) > 0, "stabilizer eigenvalue not expanding");
  }
  return g.c;
}

// --------------------------------------------------------------- criterion 4

Criterion crit_gaussian_ft() {
  Gate g(4, "Gaussian transform closed form vs quadrature", 1e-8);
  struct Triple {
    Cplx v, eta, y;
  };
  const Triple triples[] = {
      {{0.0, 1.0}, {1.0, 0.0}, {0.3, 0.7}},   {{0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}},
      {{0.0, 2.0}, {1.0, 0.0}, {0.5, -0.2}},  {{0.3, 1.1}, {1.0, 0.0}, {0.4, 0.1}},
      {{0.0, 0.8}, {0.7, 0.3}, {-0.6, 0.25}}, {{-0.2, 1.4}, {0.0, 1.0}, {0.2, 0.9}},
  };
  for (const auto& t : triples) {
    auto [closed, quad] = gaussian_ft_check(t.v, t.eta, t.y, 1e-10);
    g.residual(std::abs(closed - quad), "transform mismatch");
  }
  return g.c;
}

// ----------------------------------------------------- shared theta fixtures

LatticeThetaSpec lifted_ok5(double t) {
  QuadElem one = qe(1, 0, 5), phi = QuadElem(Rat(1, 2), Rat(1, 2), 5);
  QuadElem l0 = QuadElem(Rat(1, 2), 0, 5), m0 = QuadElem(Rat(1, 3), 0, 5);
  return LatticeThetaSpec(lattice_lift(one, t), lattice_lift(phi, t), lattice_lift(l0, t),
                          lattice_lift(m0, t), Cplx{1.0, 0.0});
}

ThetaSpec worked_theta() {
  Pseudolattice L(qe(5, 0, 3), qe(0, 5, 3));
  return ThetaSpec(L, qe(1, 0, 3), qe(0, 0, 3), Cplx{1.0, 0.0}, qe(26, 15, 3));
}

// --------------------------------------------------------------- criterion 5

Criterion crit_lattice_fe() {
  Gate g(5, "plane theta functional equation", 1e-9);
  for (double t : {0.0, 1.0})
    for (Cplx v : {Cplx{0.0, 1.0}, Cplx{0.2, 0.7}})
      g.residual(fe_lattice_residual(lifted_ok5(t), v, 1e-11), "plane FE defect");
  return g.c;
}

// --------------------------------------------------------------- criterion 6

Criterion crit_hecke_average() {
  Gate g(6, "unit average of the lifted thetas", 1e-6);
  ThetaSpec spec = worked_theta();
  for (Cplx v : {Cplx{0.0, 0.8}, Cplx{0.0, 1.0}, Cplx{0.0, 1.3}})
    g.residual(std::abs(hecke_average(spec, v, 1e-8) - theta_rm(spec, v, 1e-9)),
               "average drifts from the direct sum");
  return g.c;
}

// --------------------------------------------------------------- criterion 7

Criterion crit_rm_fe() {
  Gate g(7, "coset theta functional equation", 1e-8);
  ThetaSpec spec = worked_theta();
  for (Cplx v : {Cplx{0.0, 1.0}, Cplx{0.0, 2.0}})
    g.residual(fe_rm_residual(spec, v, 1e-9), "coset FE defect");
  return g.c;
}

// --------------------------------------------------------------- criterion 8

StarkInput worked_stark() {
  Pseudolattice L(qe(5, 0, 3), qe(0, 5, 3));
  return make_stark_input(L, qe(1, 0, 3));
}

Criterion crit_zeta_routes() {
  Gate g(8, "zeta route equivalence and invariances", 1e-8);
  StarkInput in = worked_stark();
  for (double s : {1.5, 2.0, 3.0}) {
    ZetaValue direct = zeta_direct(in, {s, 0.0}, Int(1000000));
    ZetaValue mellin = zeta_mellin(in, {s, 0.0}, 1e-9);
    g.residual(std::abs(direct.value - mellin.value), "routes disagree");
  }
  Cplx a = zeta_mellin(in, {2.0, 0.0}, 1e-12, 1.0).value;
  Cplx b = zeta_mellin(in, {2.0, 0.0}, 1e-12, 0.7).value;
  g.residual_at(std::abs(a - b), 1e-10, "split point leaks into the value");

  QuadElem sc(4, 1, 3);
  StarkInput scaled = make_stark_input(Pseudolattice(sc * in.L.l1, sc * in.L.l2), sc);
  Cplx c = zeta_mellin(scaled, {2.0, 0.0}, 1e-12).value;
  g.residual_at(std::abs(a - c), 1e-10, "scaling moves the value");
  return g.c;
}

// --------------------------------------------------------------- criterion 9

Criterion crit_stark_number() {
  Gate g(9, "Stark number and its derivative", 1e-6);
  StarkInput in = worked_stark();

  ZetaValue z0 = zeta_mellin(in, {0.0, 0.0}, 1e-10);
  g.exact(z0.value == Cplx{0.0, 0.0}, "value at 0 not structurally zero");

  StarkResult st = stark_number(in, 1e-10);
  g.exact(std::isfinite(st.zeta_prime_at_0), "derivative integral diverged");
  g.exact(st.S0 == std::exp(st.zeta_prime_at_0), "exponential link broken");

  double fd = richardson_derivative(
      [&](double s) { return zeta_mellin(in, {s, 0.0}, 1e-10).value.real(); }, 0.0, 1e-4);
  g.residual(std::abs(fd - st.zeta_prime_at_0), "derivative off its difference quotient");

  StarkResult again = stark_number(in, 1e-10);
  g.exact(st.zeta_prime_at_0 == again.zeta_prime_at_0 && st.S0 == again.S0,
          "repeated run changed bytes");
  return g.c;
}

// ----------------------------------------------------- shared torus fixtures

EmbeddedLattice worked_lattice() {
  Eigen::MatrixXd B(2, 2);
  B << std::sqrt(2.0) - 1.0, 0.0, 0.0, 1.0;
  return EmbeddedLattice(1, B);
}

SiegelPoint worked_siegel() {
  Eigen::MatrixXcd t(1, 1);
  t(0, 0) = Cplx{0.0, 1.0};
  return SiegelPoint(t);
}

// -------------------------------------------------------------- criterion 10

Criterion crit_qtheta_oracle() {
  Gate g(10, "quantum theta coefficients vs integral oracle", 1e-8);
  EmbeddedLattice D1 = worked_lattice();
  SiegelPoint T1 = worked_siegel();
  for (int h1 = -3; h1 <= 3; ++h1)
    for (int h2 = -3; h2 <= 3; ++h2) {
      if (h1 * h1 + h2 * h2 > 9) continue;
      InnerPair p = heisenberg_inner(D1, T1, {h1, h2});
      g.residual(std::abs(p.closed - p.quadrature), "closed form leaves the integral");
    }

  EmbeddedLattice D2(2, Eigen::MatrixXd::Identity(4, 4));
  Eigen::MatrixXcd t2 = Eigen::MatrixXcd::Zero(2, 2);
  t2(0, 0) = Cplx{0.0, 1.0};
  t2(1, 1) = Cplx{0.0, 2.0};
  SiegelPoint T2(t2);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) {
          if (a * a + b * b + c * c + d * d > 4) continue;
          InnerPair p = heisenberg_inner(D2, T2, {a, b, c, d});
          g.residual(std::abs(p.closed - p.quadrature), "two-variable mismatch");
        }
  return g.c;
}

// -------------------------------------------------------------- criterion 11

Criterion crit_qtheta_fe() {
  Gate g(11, "quantum theta coefficient functional equation", 1e-12);
  QuantumThetaSeries s = qtheta_coeffs(worked_lattice(), worked_siegel(), 8);
  for (IVec shift : {IVec{1, 0}, IVec{0, 1}, IVec{1, 1}, IVec{2, -1}, IVec{0, 2}})
    g.residual(qtheta_fe_residual(s, shift), "coefficient FE defect");
  QuantumThetaSeries dual = qtheta_coeffs_dual(worked_lattice(), worked_siegel(), 8);
  for (IVec shift : {IVec{0, 1}, IVec{1, 2}})
    g.residual(qtheta_fe_residual(dual, shift), "dual coefficient FE defect");
  return g.c;
}

// -------------------------------------------------------------- criterion 12

Criterion crit_module_identity() {
  Gate g(12, "module scalar products associate", 1e-6);
  EmbeddedLattice D = worked_lattice();
  GaussianVector l = gaussian_ground(worked_siegel());
  GaussianVector m = heisenberg_translate(Eigen::Vector2d{0.3, 0.1}, l);
  GaussianVector n = heisenberg_translate(Eigen::Vector2d{-0.2, 0.4}, l);
  for (double x : {-1.0, -0.4, 0.0, 0.7, 1.3}) {
    auto [lhs, rhs] = module_identity_eval(l, m, n, D, 6, Eigen::VectorXd::Constant(1, x));
    g.residual(std::abs(lhs - rhs), "two-sided products differ");
  }
  return g.c;
}

// -------------------------------------------------------------- criterion 13

Criterion crit_idempotent() {
  Gate g(13, "induced idempotent closes under the product", 1e-6);
  EmbeddedLattice D = worked_lattice();
  BocaReport r = boca_projection(D, worked_siegel(), 10, 1e-13);
  g.residual(r.idem_residual, "idempotency defect too large");
  g.residual_at(r.selfadj_residual, 1e-10, "self-adjointness defect");
  g.residual_at(std::abs(r.trace - (std::sqrt(2.0) - 1.0)), 2e-3, "trace off the covolume");
  return g.c;
}

// -------------------------------------------------------------- criterion 14

Criterion crit_bimodule(std::mt19937& rng) {
  Gate g(14, "cusp bimodule relations and the rescaling cocycle", 1e-12);
  QuadElem theta(-1, 1, 2);
  for (Mat2 m : {Mat2{2, 1, 1, 1}, Mat2{3, 1, 2, 1}}) {
    MoritaMatrix mm = morita_act(m, theta);
    BimoduleReport r = bimodule_action_residual(mm, 5.0, 64);
    g.residual(r.right_relation_residual, "right relation defect");
    g.residual(r.left_relation_residual, "left relation defect");
    g.residual(r.commutation_residual, "left/right commutation defect");
    g.residual_at(std::abs(r.right_phase - cis(2 * kPi * theta.to_double())), 1e-14,
                  "right phase off e^{2 pi i theta}");
  }

  const Mat2 gens[] = {Mat2{0, -1, 1, 0}, Mat2{1, 1, 0, 1}, Mat2{1, -1, 0, 1}};
  int done = 0;
  while (done < 100) {
    QuadElem t = rand_theta(rng, kFields[done % 6]);
    auto word = [&] {
      Mat2 w{1, 0, 0, 1};
      int len = 1 + int(rng() % 5);
      for (int i = 0; i < len; ++i) w = w * gens[rng() % 3];
      return w;
    };
    Mat2 h = word(), k = word();
    QuadElem dh = Rat(h.c) * t + QuadElem(Rat(h.d), 0, t.d);
    if (dh.is_zero()) continue;
    MoritaMatrix inner = morita_act(h, t);
    QuadElem dk = Rat(k.c) * inner.target + QuadElem(Rat(k.d), 0, t.d);
    if (dk.is_zero()) continue;
    MoritaMatrix outer = morita_act(k, inner.target);
    MoritaMatrix both = morita_compose(outer, inner);
    g.exact(both.j == outer.j * inner.j, "cocycle not multiplicative");
    g.exact(both.source == t && both.target == outer.target, "composition chain broken");
    ++done;
  }
  return g.c;
}

// -------------------------------------------------------------- criterion 15

Criterion crit_qseries() {
  Gate g(15, "q-series identities and classical limits", 1e-12);

  QSeriesParams p;
  p.ndeg = 6;
  p.qdeg = 40;
  g.exact(nc_is_zero(addition_check(p)), "addition residual nonzero");
  g.exact(nc_is_zero(pentagon_check(p)), "pentagon residual nonzero at mu = q");

  QSeriesParams lit;
  lit.ndeg = 2;
  lit.qdeg = 30;
  lit.mu_qpow = 0;
  NCPoly r = pentagon_check(lit);
  g.exact(!nc_is_zero(r), "literal middle argument unexpectedly closed");
  QPoly defect = nc_coeff(r, 1, 1);
  QPoly expected(lit.qdeg);
  for (int k = 1; k <= lit.qdeg; ++k) expected.c[k] = (k % 2 == 1) ? -1 : 1;
  g.exact(defect == expected, "degree-2 obstruction off -q/(1+q)");
  g.exact(r.coeffs.size() == 1, "obstruction not confined to vu");

  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double y : {0.1, 0.3, 0.5, 0.7, 0.9})
      g.residual(rogers_numeric(x, y), "five-term defect");

  double r1 = dilog_asymptotic(1.0, 0.02);
  double r2 = dilog_asymptotic(1.0, 0.01);
  g.residual_at(std::abs(r2 / r1 - 0.5), 0.1, "halving ratio outside 20%");
  return g.c;
}

}  // namespace

std::vector<Criterion> run_acceptance(unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<Criterion> out;
  out.push_back(crit_field_arithmetic(rng));
  out.push_back(crit_pseudolattice(rng));
  out.push_back(crit_geodesic(rng));
  out.push_back(crit_gaussian_ft());
  out.push_back(crit_lattice_fe());
  out.push_back(crit_hecke_average());
  out.push_back(crit_rm_fe());
  out.push_back(crit_zeta_routes());
  out.push_back(crit_stark_number());
  out.push_back(crit_qtheta_oracle());
  out.push_back(crit_qtheta_fe());
  out.push_back(crit_module_identity());
  out.push_back(crit_idempotent());
  out.push_back(crit_bimodule(rng));
  out.push_back(crit_qseries());
  return out;
}

std::string format_criterion(const Criterion& c) {
  char buf[256];
  if (c.bound > 0)
    std::snprintf(buf, sizeof buf, "[%2d] %s  %-48s worst %.3e  bound %.0e%s%s", c.id,
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.bound,
                  c.detail.empty() ? "" : "  -- ", c.detail.c_str());
  else
    std::snprintf(buf, sizeof buf, "[%2d] %s  %-48s exact%s%s", c.id, c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.detail.empty() ? "" : "  -- ", c.detail.c_str());
  return std::string(buf);
}

}  // namespace rmlab
