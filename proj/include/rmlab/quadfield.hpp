#pragma once

// Exact arithmetic in real quadratic fields K = Q(sqrt(d)), d squarefree > 1.
// Elements are a + b*sqrt(d) with exact rational a, b; the positive root is
// meant throughout. Conjugation x -> x' flips the sign of b; norm and trace
// are N(x) = x x' and tr(x) = x + x'.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

namespace rmlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

bool is_squarefree(long d);

struct QuadElem {
  Rat a{0};
  Rat b{0};
  long d{0};

  QuadElem() = default;
  QuadElem(Rat a_, Rat b_, long d_);

  bool is_zero() const { return a == 0 && b == 0; }
  bool is_rational() const { return b == 0; }

  QuadElem conj() const { return QuadElem(a, -b, d); }
  Rat norm() const { return a * a - d * b * b; }
  Rat trace() const { return 2 * a; }

  // Exact sign of the real number a + b*sqrt(d): -1, 0 or +1.
  int sign() const;

  QuadElem inverse() const;
  QuadElem pow(long k) const;

  double to_double() const;

  bool operator==(const QuadElem& o) const { return d == o.d && a == o.a && b == o.b; }
};

QuadElem operator+(const QuadElem& x, const QuadElem& y);
QuadElem operator-(const QuadElem& x, const QuadElem& y);
QuadElem operator-(const QuadElem& x);
QuadElem operator*(const QuadElem& x, const QuadElem& y);
QuadElem operator/(const QuadElem& x, const QuadElem& y);
QuadElem operator*(const Rat& r, const QuadElem& x);

// sign(x - y), exact.
int cmp(const QuadElem& x, const QuadElem& y);

// Largest integer n with n <= x.
Int exact_floor(const QuadElem& x);

// (1, omega) with Z + Z*omega = O_K: omega = (1+sqrt(d))/2 if d = 1 mod 4,
// else sqrt(d).
std::pair<QuadElem, QuadElem> integer_basis(long d);

struct FundamentalUnit {
  QuadElem unit;              // smallest unit > 1 of O_K
  int norm;                   // +1 or -1
  QuadElem totally_positive;  // unit if norm = +1, unit^2 otherwise
};

// Pell brute force over b = 1, 2, ...: tests d b^2 -+ 1 and, for d = 1 mod 4,
// the half-integer forms d b^2 -+ 4 with a = b mod 2. The first b admitting a
// solution carries the fundamental unit (the smallest candidate there).
FundamentalUnit fundamental_unit(long d, long b_cap = 20000000L);

// R_f = Z + f*O_K with basis (1, f*omega).
struct Order {
  long d{0};
  Int f{1};
  QuadElem omega_f;  // f * omega

  bool contains(const QuadElem& x) const;
};

Order order_of_conductor(long d, const Int& f);

// Text forms. Element syntax "a b d" with rational a, b written p/q; an
// optional trailing "/q" divides the whole element, so "1 1 5 /2" is
// (1+sqrt(5))/2. to_string emits the same syntax canonically.
QuadElem parse_quad(const std::string& text);
std::string to_string(const QuadElem& x);
std::string pretty(const QuadElem& x);

Rat parse_rat(const std::string& text);
std::string to_string(const Rat& r);

}  // namespace rmlab
