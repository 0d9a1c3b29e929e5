#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>
#include <random>

#include "rmlab/quadfield.hpp"

using namespace rmlab;

namespace {

// Independent Pell oracle: dumb grid scan over (a, b), no square-root search.
// Returns the smallest unit > 1 of the maximal order, trying both integer and
// (for d = 1 mod 4) half-integer coordinates.
std::optional<QuadElem> grid_min_unit(long d, long box) {
  std::optional<QuadElem> best;
  auto consider = [&](const QuadElem& u) {
    Rat n = u.norm();
    if (n != 1 && n != -1) return;
    if (cmp(u, QuadElem(1, 0, d)) <= 0) return;
    if (!best || cmp(u, *best) < 0) best = u;
  };
  for (long a = 0; a <= box; ++a)
    for (long b = 1; b <= box; ++b) {
      consider(QuadElem(a, b, d));
      if (d % 4 == 1 && (a - b) % 2 == 0) consider(QuadElem(Rat(a, 2), Rat(b, 2), d));
    }
  return best;
}

QuadElem qe(long a, long b, long d) { return QuadElem(a, b, d); }

Rat rand_rat(std::mt19937& rng) {
  std::uniform_int_distribution<long> num(-40, 40), den(1, 12);
  return Rat(num(rng), den(rng));
}

}  // namespace

TEST_CASE("fundamental units match the grid oracle and the classical table") {
  struct Row {
    long d;
    QuadElem unit;
    int norm;
  };
  const Row table[] = {
      {2, qe(1, 1, 2), -1},
      {3, qe(2, 1, 3), 1},
      {5, QuadElem(Rat(1, 2), Rat(1, 2), 5), -1},
      {6, qe(5, 2, 6), 1},
      {7, qe(8, 3, 7), 1},
      {13, QuadElem(Rat(3, 2), Rat(1, 2), 13), -1},
  };
  for (const auto& row : table) {
    CAPTURE(row.d);
    FundamentalUnit fu = fundamental_unit(row.d);
    CHECK(fu.unit == row.unit);
    CHECK(fu.norm == row.norm);
    auto oracle = grid_min_unit(row.d, 50);
    REQUIRE(oracle.has_value());
    CHECK(fu.unit == *oracle);
    // Totally positive generator: both embeddings positive, equals unit or unit^2.
    CHECK(fu.totally_positive.sign() > 0);
    CHECK(fu.totally_positive.conj().sign() > 0);
    if (row.norm == 1)
      CHECK(fu.totally_positive == fu.unit);
    else
      CHECK(fu.totally_positive == fu.unit * fu.unit);
  }
}

TEST_CASE("norm, trace, conjugation algebra on random elements") {
  std::mt19937 rng(20260822);
  for (int iter = 0; iter < 200; ++iter) {
    long d = (iter % 2) ? 5 : 6;
    QuadElem x(rand_rat(rng), rand_rat(rng), d);
    QuadElem y(rand_rat(rng), rand_rat(rng), d);
    CHECK((x * y).norm() == x.norm() * y.norm());
    CHECK((x + y).trace() == x.trace() + y.trace());
    CHECK(x.conj().conj() == x);
    CHECK((x * y).conj() == x.conj() * y.conj());
    CHECK(x.norm() == (x * x.conj()).a);
    CHECK((x * x.conj()).b == 0);
    if (!x.is_zero()) {
      CHECK(x * x.inverse() == QuadElem(1, 0, d));
      CHECK(x.pow(3) == x * x * x);
      CHECK(x.pow(-2) == (x * x).inverse());
    }
  }
}

TEST_CASE("exact sign agrees with the real embedding") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> coef(-1000000, 1000000);
  const long ds[] = {2, 3, 5, 13};
  for (int iter = 0; iter < 10000; ++iter) {
    long d = ds[iter % 4];
    QuadElem x(coef(rng), coef(rng), d);
    double v = x.to_double();
    int expect = (v > 0) - (v < 0);
    if (x.is_zero()) expect = 0;
    CHECK(x.sign() == expect);
  }
  // Pell-adjacent near-cancellation: a/b is a convergent of sqrt(2).
  CHECK(qe(665857, -470832, 2).sign() == 1);   // norm +1, value ~ 7.5e-7
  CHECK(qe(-665857, 470832, 2).sign() == -1);
  CHECK(qe(470832, -332929, 2).sign() == -1);  // norm -1 reversed
}

TEST_CASE("exact_floor: golden powers against Lucas numbers") {
  QuadElem phi(Rat(1, 2), Rat(1, 2), 5);
  Int l0 = 2, l1 = 1;  // Lucas: phi^k + phi'^k
  QuadElem p = phi;
  for (int k = 1; k <= 40; ++k) {
    Int lucas = (k == 1) ? l1 : l0 + l1;
    if (k > 1) {
      l0 = l1;
      l1 = lucas;
    }
    // phi'^k lies in (-1,0) for odd k, (0,1) for even k.
    Int expect = (k % 2 == 0) ? lucas - 1 : lucas;
    CHECK(exact_floor(p) == expect);
    p = p * phi;
  }
  CHECK(exact_floor(qe(0, 1, 2)) == 1);
  CHECK(exact_floor(qe(0, -1, 2)) == -2);
  CHECK(exact_floor(QuadElem(Rat(7, 2), 0, 3)) == 3);
  CHECK(exact_floor(QuadElem(Rat(-7, 2), 0, 3)) == -4);
}

TEST_CASE("integral basis and orders") {
  auto [one5, om5] = integer_basis(5);
  CHECK(one5 == qe(1, 0, 5));
  CHECK(om5 == QuadElem(Rat(1, 2), Rat(1, 2), 5));
  auto [one2, om2] = integer_basis(2);
  CHECK(om2 == qe(0, 1, 2));
  (void)one2;

  Order ok5 = order_of_conductor(5, 1);
  for (long a = -10; a <= 10; ++a)
    for (long b = -10; b <= 10; ++b) {
      bool integral = ((a - b) % 2 == 0);
      CHECK(ok5.contains(QuadElem(Rat(a, 2), Rat(b, 2), 5)) == integral);
    }

  Order z_sqrt5 = order_of_conductor(5, 2);  // Z + Z sqrt(5)
  CHECK(z_sqrt5.contains(qe(0, 1, 5)));
  CHECK(z_sqrt5.contains(qe(4, 3, 5)));
  CHECK_FALSE(z_sqrt5.contains(QuadElem(Rat(1, 2), Rat(1, 2), 5)));

  Order z_3sqrt2 = order_of_conductor(2, 3);  // Z + Z 3 sqrt(2)
  CHECK(z_3sqrt2.contains(qe(1, 3, 2)));
  CHECK(z_3sqrt2.contains(qe(5, -6, 2)));
  CHECK_FALSE(z_3sqrt2.contains(qe(0, 1, 2)));
  CHECK_FALSE(z_3sqrt2.contains(QuadElem(0, Rat(3, 2), 2)));
}

TEST_CASE("text round trips") {
  QuadElem phi = parse_quad("1 1 5 /2");
  CHECK(phi == QuadElem(Rat(1, 2), Rat(1, 2), 5));
  CHECK(to_string(phi) == "1 1 5 /2");
  CHECK(parse_quad(to_string(qe(-3, 7, 2))) == qe(-3, 7, 2));
  CHECK(parse_quad("2/3 -1/6 13") == QuadElem(Rat(2, 3), Rat(-1, 6), 13));
  CHECK(to_string(QuadElem(Rat(2, 3), Rat(-1, 6), 13)) == "4 -1 13 /6");
  CHECK(to_string(Rat(-5, 10)) == "-1/2");
  CHECK(pretty(phi) == "1/2 + 1/2*sqrt(5)");
  CHECK(pretty(qe(2, -1, 3)) == "2 - sqrt(3)");
  CHECK(pretty(qe(0, 1, 2)) == "sqrt(2)");
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(QuadElem(1, 1, 4), std::domain_error);
  CHECK_THROWS_AS(QuadElem(1, 1, 12), std::domain_error);
  CHECK_THROWS_AS(QuadElem(1, 1, 1), std::domain_error);
  CHECK_THROWS_AS(qe(1, 1, 2) + qe(1, 1, 3), std::domain_error);
  CHECK_THROWS_AS(qe(0, 0, 2).inverse(), std::domain_error);
  CHECK_THROWS_AS(parse_quad("1 2"), std::domain_error);
  CHECK_THROWS_AS(parse_quad("x y 5"), std::domain_error);
  CHECK_THROWS_AS(parse_quad("1 1 5 q2"), std::domain_error);
}
