#include "rmlab/pseudolattice.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "rmlab/check.hpp"
#include "rmlab/linalg.hpp"

namespace rmlab {

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat2 operator-(const Mat2& x) { return {-x.a, -x.b, -x.c, -x.d}; }

Int det(const Mat2& g) { return g.a * g.d - g.b * g.c; }

Mat2 inverse_unimodular(const Mat2& g) {
  Int dg = det(g);
  DOMAIN_CHECK(dg == 1 || dg == -1, "matrix is not in GL_2(Z)");
  return {dg * g.d, -dg * g.b, -dg * g.c, dg * g.a};
}

QuadElem moebius(const Mat2& g, const QuadElem& x) {
  QuadElem num = Rat(g.a) * x + QuadElem(Rat(g.b), 0, x.d);
  QuadElem den = Rat(g.c) * x + QuadElem(Rat(g.d), 0, x.d);
  return num / den;
}

std::string to_string(const Mat2& g) {
  std::ostringstream os;
  os << "[[" << g.a << ", " << g.b << "], [" << g.c << ", " << g.d << "]]";
  return os.str();
}

namespace {

Rat make_frac(Int n, Int d) {  // cpp_rational insists on a positive denominator
  if (d < 0) {
    n = -n;
    d = -d;
  }
  return Rat(n, d);
}

}  // namespace

ContinuedFraction continued_fraction(const QuadElem& theta) {
  DOMAIN_CHECK(theta.b != 0, "continued fraction state machine needs a quadratic irrational");
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  Int C = denominator(theta.a), Cb = denominator(theta.b);
  C = C / boost::multiprecision::gcd(C, Cb) * Cb;
  Int A = numerator(theta.a) * (C / denominator(theta.a));
  Int B = numerator(theta.b) * (C / denominator(theta.b));
  // theta = (A + B sqrt(d))/C; fold the sign of B into (P, Q).
  Int P = B > 0 ? A : -A;
  Int Q = B > 0 ? C : -C;
  Int root = abs(B);             // sqrt(D) = root * sqrt(d)
  Int D = root * root * theta.d;
  if ((D - P * P) % Q != 0) {    // rescale so Q | D - P^2
    Int q = abs(Q);
    P *= q;
    D *= q * q;
    root *= q;
    Q *= q;
  }
  Int s = boost::multiprecision::sqrt(D);
  LOGIC_CHECK(s * s != D, "discriminant is a perfect square");

  ContinuedFraction cf;
  std::map<std::pair<Int, Int>, size_t> seen;  // state before digit k, for k >= 1
  std::vector<Int> digits;
  for (;;) {
    size_t k = digits.size();
    if (k >= 1) {
      auto [it, fresh] = seen.emplace(std::make_pair(P, Q), k);
      if (!fresh) {
        size_t j = it->second;
        cf.preperiod.assign(digits.begin(), digits.begin() + j);
        cf.period.assign(digits.begin() + j, digits.end());
        cf.cycle_start = j;
        cf.complete_quotients.resize(k);
        return cf;
      }
    }
    cf.complete_quotients.push_back(QuadElem(make_frac(P, Q), make_frac(root, Q), theta.d));
    Int ps = P + s;
    Int a;
    if (Q > 0)
      a = fdiv(ps, Q);
    else
      a = -fdiv(ps, Int(-Q)) - 1;
    digits.push_back(a);
    Int Pn = a * Q - P;
    LOGIC_CHECK((D - Pn * Pn) % Q == 0, "continued fraction state left its invariant");
    Int Qn = (D - Pn * Pn) / Q;
    P = Pn;
    Q = Qn;
    LOGIC_CHECK(digits.size() < 100000, "continued fraction failed to cycle");
  }
}

std::string to_string(const ContinuedFraction& cf) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < cf.preperiod.size(); ++i) os << (i ? ", " : "") << cf.preperiod[i];
  os << "; period (";
  for (size_t i = 0; i < cf.period.size(); ++i) os << (i ? ", " : "") << cf.period[i];
  os << ")]";
  return os.str();
}

Pseudolattice::Pseudolattice(QuadElem l1_, QuadElem l2_) : l1(std::move(l1_)), l2(std::move(l2_)) {
  DOMAIN_CHECK(l1.d == l2.d, "basis vectors live in different fields");
  DOMAIN_CHECK(!l2.is_zero() && !l1.is_zero(), "degenerate basis");
  DOMAIN_CHECK((l1 / l2).b != 0, "slope is rational: not a pseudolattice");
}

QuadElem Pseudolattice::delta() const {
  QuadElem z = l1 * l2.conj();  // z - z' = 2 b sqrt(d)
  Rat coef = 2 * z.b;
  if (coef < 0) coef = -coef;
  return QuadElem(0, coef, d());
}

Pseudolattice Pseudolattice::dual() const {
  // Pairing (x, y) -> tr(x y') = xy' + x'y, the one the lifts to C carry to
  // x0*y1 + x1*y0.  Row i of T pairs l_i against (1, sqrt(d)); the dual basis
  // is read off the columns of T^{-1}.
  Rat t11 = 2 * l1.a, t12 = -2 * l1.b * d();
  Rat t21 = 2 * l2.a, t22 = -2 * l2.b * d();
  Rat dt = t11 * t22 - t12 * t21;
  LOGIC_CHECK(dt != 0, "trace pairing degenerated");
  QuadElem m1(t22 / dt, -t21 / dt, d());
  QuadElem m2(-t12 / dt, t11 / dt, d());
  LOGIC_CHECK((l1 * m1.conj()).trace() == 1 && (l2 * m1.conj()).trace() == 0 &&
                  (l1 * m2.conj()).trace() == 0 && (l2 * m2.conj()).trace() == 1,
              "dual basis fails its pairing identities");
  return Pseudolattice(m1, m2);
}

std::pair<Rat, Rat> Pseudolattice::coords(const QuadElem& x) const {
  DOMAIN_CHECK(x.d == d(), "coordinates across different fields");
  Rat dt = l1.a * l2.b - l2.a * l1.b;
  LOGIC_CHECK(dt != 0, "basis became dependent");
  Rat c1 = (x.a * l2.b - l2.a * x.b) / dt;
  Rat c2 = (l1.a * x.b - x.a * l1.b) / dt;
  return {c1, c2};
}

bool Pseudolattice::contains(const QuadElem& x) const {
  auto [c1, c2] = coords(x);
  return boost::multiprecision::denominator(c1) == 1 &&
         boost::multiprecision::denominator(c2) == 1;
}

Pseudolattice Pseudolattice::scaled(const QuadElem& a) const {
  DOMAIN_CHECK(!a.is_zero(), "scaling by zero");
  return Pseudolattice(a * l1, a * l2);
}

OrderInfo endomorphism_ring(const Pseudolattice& L) {
  // In the column basis B = [l1 l2] (coordinates over (1, sqrt(d))), x = m + n*omega
  // multiplies L into itself iff m*I + n*G is integral, G = B^{-1} W B with W the
  // multiplication-by-omega matrix.  So the ring is Z + Z*f*omega with f the lcm
  // of the denominators of G.
  long d = L.d();
  auto [one, omega] = integer_basis(d);
  (void)one;
  Rat b11 = L.l1.a, b12 = L.l2.a, b21 = L.l1.b, b22 = L.l2.b;
  Rat w11 = omega.a, w12 = omega.b * d, w21 = omega.b, w22 = omega.a;
  Rat dt = b11 * b22 - b12 * b21;
  // G = B^{-1} W B
  Rat i11 = b22 / dt, i12 = -b12 / dt, i21 = -b21 / dt, i22 = b11 / dt;
  Rat p11 = i11 * w11 + i12 * w21, p12 = i11 * w12 + i12 * w22;
  Rat p21 = i21 * w11 + i22 * w21, p22 = i21 * w12 + i22 * w22;
  Rat g11 = p11 * b11 + p12 * b21, g12 = p11 * b12 + p12 * b22;
  Rat g21 = p21 * b11 + p22 * b21, g22 = p21 * b12 + p22 * b22;
  Int f = 1;
  for (const Rat& g : {g11, g12, g21, g22}) {
    Int den = boost::multiprecision::denominator(g);
    f = f / boost::multiprecision::gcd(f, den) * den;
  }
  OrderInfo info{order_of_conductor(d, f), f};
  QuadElem fo = info.order.omega_f;
  LOGIC_CHECK(L.contains(fo * L.l1) && L.contains(fo * L.l2),
              "conductor candidate does not multiply the lattice into itself");
  return info;
}

QuadElem stabilizing_unit(const Pseudolattice& L) {
  OrderInfo info = endomorphism_ring(L);
  FundamentalUnit fu = fundamental_unit(L.d());
  QuadElem u = fu.unit;
  QuadElem pow = u;
  int k = 1;
  while (!info.order.contains(pow)) {
    pow = pow * u;
    ++k;
    LOGIC_CHECK(k < 10000, "unit power never entered the order");
  }
  if (pow.norm() == -1) pow = pow * pow;
  LOGIC_CHECK(pow.sign() > 0 && pow.conj().sign() > 0, "unit is not totally positive");
  LOGIC_CHECK(L.contains(pow * L.l1) && L.contains(pow * L.l2) &&
                  L.contains(pow.inverse() * L.l1) && L.contains(pow.inverse() * L.l2),
              "unit does not stabilize the lattice");
  return pow;
}

namespace {

// theta = M_k(theta_k) along the expansion: M_0 = I, M_{k+1} = M_k [[a_k,1],[1,0]].
std::vector<Mat2> convergent_matrices(const ContinuedFraction& cf) {
  std::vector<Mat2> out;
  Mat2 m{1, 0, 0, 1};
  out.push_back(m);
  std::vector<Int> digits = cf.preperiod;
  digits.insert(digits.end(), cf.period.begin(), cf.period.end());
  for (const Int& a : digits) {
    m = m * Mat2{a, 1, 1, 0};
    out.push_back(m);
  }
  return out;
}

}  // namespace

std::optional<Mat2> gl2z_equivalent(const QuadElem& t1, const QuadElem& t2) {
  DOMAIN_CHECK(t1.d == t2.d, "slopes live in different fields");
  ContinuedFraction c1 = continued_fraction(t1), c2 = continued_fraction(t2);
  std::vector<Mat2> m1 = convergent_matrices(c1), m2 = convergent_matrices(c2);
  for (size_t i = 0; i < c1.complete_quotients.size(); ++i)
    for (size_t j = 0; j < c2.complete_quotients.size(); ++j) {
      if (!(c1.complete_quotients[i] == c2.complete_quotients[j])) continue;
      Mat2 g = m1[i] * inverse_unimodular(m2[j]);
      if ((Rat(g.c) * t2 + QuadElem(Rat(g.d), 0, t2.d)).sign() < 0) g = -g;
      LOGIC_CHECK(moebius(g, t2) == t1, "equivalence witness fails to act");
      return g;
    }
  return std::nullopt;
}

Mat2 cf_stabilizer(const QuadElem& theta) {
  ContinuedFraction cf = continued_fraction(theta);
  std::vector<Mat2> ms = convergent_matrices(cf);
  Mat2 pre = ms[cf.cycle_start];
  Mat2 pr{1, 0, 0, 1};
  for (const Int& a : cf.period) pr = pr * Mat2{a, 1, 1, 0};
  Mat2 g = pre * pr * inverse_unimodular(pre);
  LOGIC_CHECK(moebius(g, theta) == theta, "period product does not fix theta");
  QuadElem lambda = Rat(g.c) * theta + QuadElem(Rat(g.d), 0, theta.d);
  LOGIC_CHECK(cmp(lambda, QuadElem(1, 0, theta.d)) > 0, "stabilizer eigenvalue is not > 1");
  return g;
}

std::complex<double> geodesic_point(const QuadElem& theta, double t) {
  double th = theta.to_double(), thc = theta.conj().to_double();
  double ep = std::exp(t), em = std::exp(-t);
  return {(th * ep + thc * em) / (ep + em), std::abs(th - thc) / (ep + em)};
}

std::complex<double> lattice_lift(const QuadElem& l, double t) {
  return {l.to_double() * std::exp(t / 2), l.conj().to_double() * std::exp(-t / 2)};
}

}  // namespace rmlab
