#include "rmlab/quadfield.hpp"

#include <cmath>
#include <sstream>

#include "rmlab/check.hpp"

namespace rmlab {

namespace {

void check_same_field(const QuadElem& x, const QuadElem& y) {
  DOMAIN_CHECK(x.d == y.d, "mixed-d arithmetic: elements live in different fields");
}

long double embed(const QuadElem& x) {
  return x.a.convert_to<long double>() +
         x.b.convert_to<long double>() * sqrtl(static_cast<long double>(x.d));
}

int rat_sign(const Rat& r) {
  if (r == 0) return 0;
  return r > 0 ? 1 : -1;
}

bool is_perfect_square(const Int& n, Int& root) {
  if (n < 0) return false;
  root = boost::multiprecision::sqrt(n);
  return root * root == n;
}

}  // namespace

bool is_squarefree(long d) {
  if (d < 1) return false;
  for (long p = 2; p * p <= d; ++p)
    if (d % (p * p) == 0) return false;
  return true;
}

QuadElem::QuadElem(Rat a_, Rat b_, long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {
  DOMAIN_CHECK(d > 1 && is_squarefree(d), "d must be squarefree and > 1");
}

int QuadElem::sign() const {
  DOMAIN_CHECK(d > 1, "sign of an uninitialized element");
  if (b == 0) return rat_sign(a);
  if (a == 0) return rat_sign(b);
  int sa = rat_sign(a), sb = rat_sign(b);
  if (sa == sb) return sa;
  // a and b*sqrt(d) compete: compare a^2 against d b^2 (rationalized).
  Rat lhs = a * a, rhs = d * b * b;
  LOGIC_CHECK(lhs != rhs, "sqrt(d) rational: d was not squarefree after all");
  return lhs > rhs ? sa : sb;
}

QuadElem QuadElem::inverse() const {
  DOMAIN_CHECK(!is_zero(), "division by zero");
  Rat n = norm();
  return QuadElem(a / n, -b / n, d);
}

QuadElem QuadElem::pow(long k) const {
  if (k < 0) return inverse().pow(-k);
  QuadElem r(1, 0, d), base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

double QuadElem::to_double() const { return static_cast<double>(embed(*this)); }

QuadElem operator+(const QuadElem& x, const QuadElem& y) {
  check_same_field(x, y);
  return QuadElem(x.a + y.a, x.b + y.b, x.d);
}

QuadElem operator-(const QuadElem& x, const QuadElem& y) {
  check_same_field(x, y);
  return QuadElem(x.a - y.a, x.b - y.b, x.d);
}

QuadElem operator-(const QuadElem& x) { return QuadElem(-x.a, -x.b, x.d); }

QuadElem operator*(const QuadElem& x, const QuadElem& y) {
  check_same_field(x, y);
  return QuadElem(x.a * y.a + x.d * x.b * y.b, x.a * y.b + x.b * y.a, x.d);
}

QuadElem operator/(const QuadElem& x, const QuadElem& y) { return x * y.inverse(); }

QuadElem operator*(const Rat& r, const QuadElem& x) { return QuadElem(r * x.a, r * x.b, x.d); }

int cmp(const QuadElem& x, const QuadElem& y) { return (x - y).sign(); }

Int exact_floor(const QuadElem& x) {
  Int n(static_cast<long long>(floorl(embed(x))));
  auto below = [&](const Int& m) {  // is m <= x?
    return QuadElem(x.a - Rat(m), x.b, x.d).sign() >= 0;
  };
  while (!below(n)) --n;
  while (below(n + 1)) ++n;
  return n;
}

std::pair<QuadElem, QuadElem> integer_basis(long d) {
  DOMAIN_CHECK(d > 1 && is_squarefree(d), "d must be squarefree and > 1");
  QuadElem one(1, 0, d);
  if (d % 4 == 1) return {one, QuadElem(Rat(1, 2), Rat(1, 2), d)};
  return {one, QuadElem(0, 1, d)};
}

FundamentalUnit fundamental_unit(long d, long b_cap) {
  DOMAIN_CHECK(d > 1 && is_squarefree(d), "d must be squarefree and > 1");
  const bool half_forms = (d % 4 == 1);
  for (long b = 1; b <= b_cap; ++b) {
    std::vector<QuadElem> found;
    Int db2 = Int(d) * b * b, a;
    for (int s : {-1, +1})
      if (is_perfect_square(db2 + s, a)) found.emplace_back(Rat(a), Rat(b), d);
    if (half_forms)
      for (int s : {-4, +4})
        if (is_perfect_square(db2 + s, a) && (a - b) % 2 == 0)
          found.emplace_back(Rat(a, 2), Rat(b, 2), d);
    if (found.empty()) continue;
    QuadElem best = found[0];
    for (const auto& u : found)
      if (cmp(u, best) < 0) best = u;
    Rat n = best.norm();
    LOGIC_CHECK(n == 1 || n == -1, "Pell candidate is not a unit");
    FundamentalUnit fu;
    fu.unit = best;
    fu.norm = (n == 1) ? 1 : -1;
    fu.totally_positive = (fu.norm == 1) ? best : best * best;
    return fu;
  }
  throw std::runtime_error("Pell search bound exceeded");
}

bool Order::contains(const QuadElem& x) const {
  DOMAIN_CHECK(x.d == d, "membership test across different fields");
  Rat n;  // coefficient of f*omega
  if (d % 4 == 1)
    n = x.b / omega_f.b;
  else
    n = x.b / Rat(f);
  if (boost::multiprecision::denominator(n) != 1) return false;
  Rat m = x.a - n * omega_f.a;
  return boost::multiprecision::denominator(m) == 1;
}

Order order_of_conductor(long d, const Int& f) {
  DOMAIN_CHECK(f >= 1, "conductor must be >= 1");
  auto [one, omega] = integer_basis(d);
  (void)one;
  Order r;
  r.d = d;
  r.f = f;
  r.omega_f = Rat(f) * omega;
  return r;
}

Rat parse_rat(const std::string& text) {
  try {
    return Rat(text);
  } catch (const std::exception&) {
    throw std::domain_error("bad rational literal: " + text);
  }
}

std::string to_string(const Rat& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1)
    os << "/" << boost::multiprecision::denominator(r);
  return os.str();
}

QuadElem parse_quad(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> tok;
  std::string t;
  while (is >> t) tok.push_back(t);
  DOMAIN_CHECK(tok.size() == 3 || tok.size() == 4, "element syntax is \"a b d [/q]\"");
  Rat a = parse_rat(tok[0]), b = parse_rat(tok[1]);
  long d = 0;
  try {
    d = std::stol(tok[2]);
  } catch (const std::exception&) {
    throw std::domain_error("bad d in element literal: " + tok[2]);
  }
  if (tok.size() == 4) {
    DOMAIN_CHECK(tok[3].size() > 1 && tok[3][0] == '/', "trailing token must be /q");
    Rat q = parse_rat(tok[3].substr(1));
    DOMAIN_CHECK(q != 0, "zero denominator in element literal");
    a /= q;
    b /= q;
  }
  return QuadElem(a, b, d);
}

std::string to_string(const QuadElem& x) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  Int da = denominator(x.a), db = denominator(x.b);
  Int q = da / boost::multiprecision::gcd(da, db) * db;
  std::ostringstream os;
  os << numerator(x.a) * (q / da) << " " << numerator(x.b) * (q / db) << " " << x.d;
  if (q != 1) os << " /" << q;
  return os.str();
}

std::string pretty(const QuadElem& x) {
  std::ostringstream os;
  if (x.b == 0) return to_string(x.a);
  if (x.a != 0) os << to_string(x.a) << (x.b > 0 ? " + " : " - ");
  else if (x.b < 0) os << "-";
  Rat babs = x.b > 0 ? x.b : Rat(-x.b);
  if (babs != 1) os << to_string(babs) << "*";
  os << "sqrt(" << x.d << ")";
  return os.str();
}

}  // namespace rmlab
