#include "rmlab/rmtheta.hpp"

#include <algorithm>
#include <cmath>

#include "rmlab/check.hpp"
#include "rmlab/linalg.hpp"

namespace rmlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const Cplx kI{0.0, 1.0};

double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

// r mod m as a double, computed exactly first (m = 1 or 2).
double rat_mod(const Rat& r, long m) {
  Rat red = r - m * Rat(fdiv(boost::multiprecision::numerator(r),
                             boost::multiprecision::denominator(r) * m));
  return rat_to_double(red);
}

bool trace_in_z(const QuadElem& x) {
  Rat t = x.trace();
  return boost::multiprecision::denominator(t) == 1;
}

bool trace_in_2z(const QuadElem& x) {
  Rat t = x.trace();
  return boost::multiprecision::denominator(t) == 1 &&
         boost::multiprecision::numerator(t) % 2 == 0;
}

// The character pairing is the plane pairing of geodesic lifts pulled back to
// the field: <x, m0> = x m0' + x' m0, i.e. tr(x conj(m0)) -- not tr(x m0).
QuadElem paired(const QuadElem& x, const QuadElem& m0) { return x * m0.conj(); }

bool averaging_unit_ok(const Pseudolattice& L, const QuadElem& l0, const QuadElem& m0,
                       const QuadElem& eps) {
  QuadElem shift = eps - QuadElem(1, 0, eps.d);
  QuadElem inv = eps.inverse();
  if (!(L.contains(eps * L.l1) && L.contains(eps * L.l2) && L.contains(inv * L.l1) &&
        L.contains(inv * L.l2)))
    return false;
  if (!L.contains(shift * l0)) return false;
  if (!(trace_in_z(paired(shift * L.l1, m0)) && trace_in_z(paired(shift * L.l2, m0))))
    return false;
  return trace_in_2z(paired(shift * l0, m0));
}

}  // namespace

double pairing(Cplx x, Cplx y) { return x.real() * y.imag() + x.imag() * y.real(); }

ThetaSpec::ThetaSpec(Pseudolattice L_, QuadElem l0_, QuadElem m0_, Cplx eta_, QuadElem eps_)
    : L(std::move(L_)), l0(std::move(l0_)), m0(std::move(m0_)), eta(eta_), eps(std::move(eps_)) {
  DOMAIN_CHECK(l0.d == L.d() && m0.d == L.d() && eps.d == L.d(),
               "sum data lives in different fields");
  DOMAIN_CHECK(eps.sign() > 0 && eps.conj().sign() > 0 && eps.norm() == 1 &&
                   cmp(eps, QuadElem(1, 0, eps.d)) > 0,
               "averaging unit must be totally positive and > 1");
  DOMAIN_CHECK(averaging_unit_ok(L, l0, m0, eps),
               "unit fails the coset/character compatibility conditions");
}

LatticeThetaSpec::LatticeThetaSpec(Cplx w1_, Cplx w2_, Cplx lambda0_, Cplx mu0_, Cplx eta_)
    : w1(w1_), w2(w2_), lambda0(lambda0_), mu0(mu0_), eta(eta_) {
  DOMAIN_CHECK(std::abs(std::imag(w1 / w2)) > 1e-14, "plane basis is degenerate");
}

QuadElem unit_group_for(const Pseudolattice& L, const QuadElem& l0, const QuadElem& m0,
                        long kmax) {
  QuadElem base = fundamental_unit(L.d()).totally_positive;
  QuadElem pow = base;
  for (long k = 1; k <= kmax; ++k) {
    if (averaging_unit_ok(L, l0, m0, pow)) return pow;
    pow = pow * base;
  }
  throw std::runtime_error("no averaging unit within the search bound");
}

std::vector<CosetRep> coset_reps(const Pseudolattice& L, const QuadElem& l0, const QuadElem& eps,
                                 const Rat& Nbound) {
  DOMAIN_CHECK(eps.sign() > 0 && eps.conj().sign() > 0 &&
                   cmp(eps, QuadElem(1, 0, eps.d)) > 0,
               "domain unit must be totally positive and > 1");
  DOMAIN_CHECK(Nbound > 0, "norm bound must be positive");
  const long d = L.d();
  const QuadElem eps4 = eps.pow(4);
  // |N(x)| <= B and 1 <= |x/x'| < eps^2 pin x to |x| < eps sqrt(B), |x'| <= sqrt(B).
  const double B = rat_to_double(Nbound);
  const double X = eps.to_double() * std::sqrt(B) * 1.001 + std::abs(l0.to_double()) + 1;
  const double Xc = std::sqrt(B) * 1.001 + std::abs(l0.conj().to_double()) + 1;
  const double a1 = L.l1.to_double(), a1c = L.l1.conj().to_double();
  const double a2 = L.l2.to_double(), a2c = L.l2.conj().to_double();
  const double det = std::abs(a1 * a2c - a1c * a2);
  const long mbox = static_cast<long>((X * std::abs(a2c) + Xc * std::abs(a2)) / det) + 2;
  const long nbox = static_cast<long>((X * std::abs(a1c) + Xc * std::abs(a1)) / det) + 2;

  // Cheap double pre-rejection of the norm bound and |x| >= |x'| with margins
  // far above the float error; survivors (a thin hyperbolic wedge) get the
  // full exact treatment, so the result set is exact either way.
  const double l0d = l0.to_double(), l0cd = l0.conj().to_double();
  std::vector<CosetRep> reps;
  for (long m = -mbox; m <= mbox; ++m)
    for (long n = -nbox; n <= nbox; ++n) {
      double xd = l0d + m * a1 + n * a2, xcd = l0cd + m * a1c + n * a2c;
      double sx = std::abs(l0d) + std::abs(m * a1) + std::abs(n * a2) + 1;
      double sxc = std::abs(l0cd) + std::abs(m * a1c) + std::abs(n * a2c) + 1;
      if (std::abs(xd * xcd) > B + 1e-6 + 1e-12 * sx * sxc) continue;
      if (xd * xd - xcd * xcd < -1e-6 - 1e-12 * (sx * sx + sxc * sxc)) continue;
      QuadElem x = l0 + Rat(m) * L.l1 + Rat(n) * L.l2;
      if (x.is_zero()) continue;
      Rat nm = x.norm();
      if (nm < 0) nm = -nm;
      if (nm > Nbound) continue;
      QuadElem x2(x.a * x.a + d * x.b * x.b, 2 * x.a * x.b, d);          // x^2
      QuadElem xc2(x.a * x.a + d * x.b * x.b, -2 * x.a * x.b, d);        // x'^2
      if ((x2 - xc2).sign() < 0) continue;                                // |x| >= |x'|
      if ((x2 - eps4 * xc2).sign() >= 0) continue;                        // |x/x'| < eps^2
      reps.push_back({std::move(x), m, n, std::move(nm)});
    }
  std::sort(reps.begin(), reps.end(), [](const CosetRep& p, const CosetRep& q) {
    if (p.abs_norm != q.abs_norm) return p.abs_norm < q.abs_norm;
    if (p.m != q.m) return p.m < q.m;
    return p.n < q.n;
  });
  return reps;
}

Cplx theta_rm(const ThetaSpec& spec, Cplx v, double tol) {
  DOMAIN_CHECK(v.imag() > 0, "modular argument must be in the upper half plane");
  DOMAIN_CHECK(tol > 0, "tolerance must be positive");
  const double t = v.imag();
  const double weight = std::abs(spec.eta.real()) + std::abs(spec.eta.imag());
  if (weight == 0) return {0.0, 0.0};
  // Tail: reps per unit norm shell stay below ~4 eps/Delta + 1, so
  // sum_{N>B} shell * e^{-2 pi t N} < K e^{-2 pi t B}/(1 - e^{-2 pi t}).
  const double delta = spec.L.delta().to_double();
  const double K = 8 * weight * (spec.eps.to_double() / delta + 1);
  double B = std::log(K / (tol * (1 - std::exp(-2 * kPi * t)))) / (2 * kPi * t);
  B = std::max(B, 8.0);
  Rat Nbound(static_cast<long long>(std::ceil(B)));

  const double eta0 = spec.eta.real(), eta1 = spec.eta.imag();
  const Cplx half_phase = std::exp(-kPi * kI * rat_mod(paired(spec.l0, spec.m0).trace(), 2));
  Cplx sum{0.0, 0.0};
  for (const CosetRep& rep : coset_reps(spec.L, spec.l0, spec.eps, Nbound)) {
    double coef = eta0 * rep.x.conj().sign() + eta1 * rep.x.sign();
    if (coef == 0) continue;
    QuadElem l = rep.x - spec.l0;
    Cplx char_phase = std::exp(-2.0 * kPi * kI * rat_mod(paired(l, spec.m0).trace(), 1));
    Cplx gauss = std::exp(2.0 * kPi * kI * v * rat_to_double(rep.abs_norm));
    sum += coef * gauss * char_phase * half_phase;
  }
  return sum;
}

Cplx theta_lattice(const LatticeThetaSpec& spec, Cplx v, double tol) {
  DOMAIN_CHECK(v.imag() > 0, "modular argument must be in the upper half plane");
  DOMAIN_CHECK(tol > 0, "tolerance must be positive");
  const double t = v.imag();
  const double cv = covolume(spec);
  const double weight = std::abs(spec.eta) + 1;
  // Shell of radius r holds ~2 pi r/cv points with term size <= r*weight*e^{-pi t r^2}.
  const double C = 64 * weight * (1 + 1 / cv) / tol;
  const double R = std::sqrt(std::max(1.0, std::log(C)) / (kPi * t)) + 1;

  const double det = std::imag(std::conj(spec.w1) * spec.w2);
  const double shift = std::abs(spec.lambda0);
  const long mbox = static_cast<long>(std::abs(spec.w2) * (R + shift) / std::abs(det)) + 2;
  const long nbox = static_cast<long>(std::abs(spec.w1) * (R + shift) / std::abs(det)) + 2;

  struct Pt {
    double r;
    long m, n;
  };
  std::vector<Pt> pts;
  for (long m = -mbox; m <= mbox; ++m)
    for (long n = -nbox; n <= nbox; ++n) {
      Cplx x = spec.lambda0 + double(m) * spec.w1 + double(n) * spec.w2;
      double r = std::abs(x);
      if (r <= R) pts.push_back({r, m, n});
    }
  std::sort(pts.begin(), pts.end(), [](const Pt& p, const Pt& q) {
    if (p.r != q.r) return p.r < q.r;
    if (p.m != q.m) return p.m < q.m;
    return p.n < q.n;
  });

  const Cplx char_base = std::exp(-kPi * kI * pairing(spec.lambda0, spec.mu0));
  Cplx sum{0.0, 0.0};
  for (const Pt& p : pts) {
    Cplx lam = double(p.m) * spec.w1 + double(p.n) * spec.w2;
    Cplx x = spec.lambda0 + lam;
    double coef = pairing(x, spec.eta);
    Cplx term = coef * std::exp(kPi * kI * v * (p.r * p.r)) *
                std::exp(-2.0 * kPi * kI * pairing(lam, spec.mu0)) * char_base;
    sum += term;
  }
  return sum;
}

double covolume(const LatticeThetaSpec& spec) {
  return std::abs(std::imag(std::conj(spec.w1) * spec.w2));
}

LatticeThetaSpec dual_lattice_spec(const LatticeThetaSpec& spec) {
  // Solve (w_i . y_j) = delta_ij: rows [Im w_i, Re w_i] act on (Re y, Im y).
  double a = spec.w1.imag(), b = spec.w1.real();
  double c = spec.w2.imag(), d = spec.w2.real();
  double det = a * d - b * c;
  LOGIC_CHECK(std::abs(det) > 1e-14, "pairing matrix is singular");
  Cplx y1{d / det, -c / det};
  Cplx y2{-b / det, a / det};
  return LatticeThetaSpec(y1, y2, spec.mu0, -spec.lambda0, kI * std::conj(spec.eta));
}

LatticeThetaSpec lift_spec(const ThetaSpec& spec, double t) {
  return LatticeThetaSpec(lattice_lift(spec.L.l1, t), lattice_lift(spec.L.l2, t),
                          lattice_lift(spec.l0, t), lattice_lift(spec.m0, t), spec.eta);
}

ThetaSpec dual_spec(const ThetaSpec& spec) {
  return ThetaSpec(spec.L.dual(), spec.m0, -spec.l0, kI * std::conj(spec.eta), spec.eps);
}

Cplx hecke_average(const ThetaSpec& spec, Cplx v, double quad_tol) {
  DOMAIN_CHECK(v.imag() > 0, "modular argument must be in the upper half plane");
  const double T = std::log(spec.eps.to_double());
  const double inner = quad_tol / (4 * T);
  auto f = [&](double t) { return theta_lattice(lift_spec(spec, t), v, inner); };
  return std::sqrt(-kI * v) * integrate(f, -T, T, quad_tol);
}

std::pair<Cplx, Cplx> gaussian_ft_check(Cplx v, Cplx eta, Cplx y, double quad_tol) {
  DOMAIN_CHECK(v.imag() > 0, "modular argument must be in the upper half plane");
  Cplx closed = (kI / (v * v)) * pairing(y, kI * std::conj(eta)) *
                std::exp(-(kPi * kI / v) * std::norm(y));
  const double X = 6.0 / std::sqrt(v.imag()) + 2.0;
  auto f = [&](double x0, double x1) {
    Cplx x{x0, x1};
    return pairing(x, eta) * std::exp(kPi * kI * v * std::norm(x)) *
           std::exp(-2.0 * kPi * kI * pairing(x, y));
  };
  Cplx quad = integrate2d(f, -X, X, -X, X, quad_tol);
  return {closed, quad};
}

double fe_lattice_residual(const LatticeThetaSpec& spec, Cplx v, double tol) {
  Cplx lhs = theta_lattice(spec, v, tol);
  Cplx rhs = (kI / (covolume(spec) * v * v)) * theta_lattice(dual_lattice_spec(spec), -1.0 / v, tol);
  return std::abs(lhs - rhs);
}

double fe_rm_residual(const ThetaSpec& spec, Cplx v, double tol) {
  Cplx lhs = theta_rm(spec, v, tol);
  Cplx rhs = theta_rm(dual_spec(spec), -1.0 / v, tol) / (spec.L.delta().to_double() * v);
  return std::abs(lhs - rhs);
}

}  // namespace rmlab
