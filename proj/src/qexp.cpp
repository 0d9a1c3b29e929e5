#include "rmlab/qexp.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "rmlab/check.hpp"

namespace rmlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

QPoly::QPoly(int qdeg) {
  DOMAIN_CHECK(qdeg >= 0, "q-truncation degree must be nonnegative");
  c.assign(static_cast<size_t>(qdeg) + 1, Int(0));
}

bool QPoly::is_zero() const {
  for (const Int& x : c)
    if (x != 0) return false;
  return true;
}

Int QPoly::sup() const {
  Int m = 0;
  for (const Int& x : c)
    if (abs(x) > m) m = abs(x);
  return m;
}

std::string QPoly::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k <= qdeg(); ++k) {
    if (c[k] == 0) continue;
    Int a = c[k];
    if (first) {
      if (a < 0) os << "-";
    } else {
      os << (a < 0 ? " - " : " + ");
    }
    a = abs(a);
    if (a != 1 || k == 0) os << a.str();
    if (k > 0) {
      if (a != 1) os << "*";
      os << "q";
      if (k > 1) os << "^" << k;
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

QPoly qpoly_monomial(int k, int qdeg, const Int& a) {
  DOMAIN_CHECK(k >= 0, "monomial degree must be nonnegative");
  QPoly r(qdeg);
  if (k <= qdeg) r.c[k] = a;
  return r;
}

QPoly operator+(const QPoly& x, const QPoly& y) {
  LOGIC_CHECK(x.qdeg() == y.qdeg(), "mixed q-truncations");
  QPoly r(x.qdeg());
  for (int k = 0; k <= x.qdeg(); ++k) r.c[k] = x.c[k] + y.c[k];
  return r;
}

QPoly operator-(const QPoly& x, const QPoly& y) {
  LOGIC_CHECK(x.qdeg() == y.qdeg(), "mixed q-truncations");
  QPoly r(x.qdeg());
  for (int k = 0; k <= x.qdeg(); ++k) r.c[k] = x.c[k] - y.c[k];
  return r;
}

QPoly operator*(const QPoly& x, const QPoly& y) {
  LOGIC_CHECK(x.qdeg() == y.qdeg(), "mixed q-truncations");
  QPoly r(x.qdeg());
  for (int i = 0; i <= x.qdeg(); ++i) {
    if (x.c[i] == 0) continue;
    for (int j = 0; i + j <= x.qdeg(); ++j) {
      if (y.c[j] == 0) continue;
      r.c[i + j] += x.c[i] * y.c[j];
    }
  }
  return r;
}

bool operator==(const QPoly& x, const QPoly& y) {
  return x.qdeg() == y.qdeg() && x.c == y.c;
}

QPoly qpoly_shift(const QPoly& x, int k) {
  DOMAIN_CHECK(k >= 0, "shift must be nonnegative");
  QPoly r(x.qdeg());
  for (int i = 0; i + k <= x.qdeg(); ++i) r.c[i + k] = x.c[i];
  return r;
}

QPoly qpoly_unit_inverse(const QPoly& x) {
  DOMAIN_CHECK(x.c[0] == 1 || x.c[0] == -1, "constant term must be a unit");
  const Int u = x.c[0];
  QPoly r(x.qdeg());
  r.c[0] = u;
  for (int n = 1; n <= x.qdeg(); ++n) {
    Int s = 0;
    for (int k = 1; k <= n; ++k) s += x.c[k] * r.c[n - k];
    r.c[n] = -u * s;
  }
  return r;
}

namespace {

void nc_prune(NCPoly& x) {
  for (auto it = x.coeffs.begin(); it != x.coeffs.end();) {
    if (it->second.is_zero())
      it = x.coeffs.erase(it);
    else
      ++it;
  }
}

NCPoly nc_qshift(const NCPoly& x, int k) {
  NCPoly r = nc_zero(x.ndeg, x.qdeg);
  for (const auto& [key, p] : x.coeffs) {
    QPoly s = qpoly_shift(p, k);
    if (!s.is_zero()) r.coeffs.emplace(key, std::move(s));
  }
  return r;
}

}  // namespace

NCPoly nc_zero(int ndeg, int qdeg) {
  DOMAIN_CHECK(ndeg >= 0, "total-degree cutoff must be nonnegative");
  DOMAIN_CHECK(qdeg >= 1, "q-degree cutoff must be positive");
  NCPoly r;
  r.ndeg = ndeg;
  r.qdeg = qdeg;
  return r;
}

NCPoly nc_one(int ndeg, int qdeg) { return nc_monomial(0, 0, 0, ndeg, qdeg); }

NCPoly nc_monomial(int a, int b, int k, int ndeg, int qdeg, const Int& coeff) {
  DOMAIN_CHECK(a >= 0 && b >= 0, "variable powers must be nonnegative");
  NCPoly r = nc_zero(ndeg, qdeg);
  if (a + b > ndeg || k > qdeg || coeff == 0) return r;
  r.coeffs.emplace(std::make_pair(a, b), qpoly_monomial(k, qdeg, coeff));
  return r;
}

NCPoly nc_add(const NCPoly& x, const NCPoly& y) {
  LOGIC_CHECK(x.ndeg == y.ndeg && x.qdeg == y.qdeg, "mixed truncations");
  NCPoly r = x;
  for (const auto& [key, p] : y.coeffs) {
    auto it = r.coeffs.find(key);
    if (it == r.coeffs.end())
      r.coeffs.emplace(key, p);
    else
      it->second = it->second + p;
  }
  nc_prune(r);
  return r;
}

NCPoly nc_sub(const NCPoly& x, const NCPoly& y) {
  LOGIC_CHECK(x.ndeg == y.ndeg && x.qdeg == y.qdeg, "mixed truncations");
  NCPoly r = x;
  for (const auto& [key, p] : y.coeffs) {
    auto it = r.coeffs.find(key);
    if (it == r.coeffs.end())
      r.coeffs.emplace(key, QPoly(y.qdeg) - p);
    else
      it->second = it->second - p;
  }
  nc_prune(r);
  return r;
}

NCPoly nc_mul(const NCPoly& x, const NCPoly& y) {
  LOGIC_CHECK(x.ndeg == y.ndeg && x.qdeg == y.qdeg, "mixed truncations");
  NCPoly r = nc_zero(x.ndeg, x.qdeg);
  for (const auto& [kx, px] : x.coeffs) {
    for (const auto& [ky, py] : y.coeffs) {
      const int a = kx.first + ky.first;
      const int b = kx.second + ky.second;
      if (a + b > x.ndeg) continue;
      const int shift = 2 * kx.first * ky.second;
      if (shift > x.qdeg) continue;
      QPoly term = qpoly_shift(px * py, shift);
      if (term.is_zero()) continue;
      auto it = r.coeffs.find(std::make_pair(a, b));
      if (it == r.coeffs.end())
        r.coeffs.emplace(std::make_pair(a, b), std::move(term));
      else
        it->second = it->second + term;
    }
  }
  nc_prune(r);
  return r;
}

bool nc_is_zero(const NCPoly& x) {
  for (const auto& [key, p] : x.coeffs)
    if (!p.is_zero()) return false;
  return true;
}

Int nc_sup(const NCPoly& x) {
  Int m = 0;
  for (const auto& [key, p] : x.coeffs) {
    Int s = p.sup();
    if (s > m) m = s;
  }
  return m;
}

QPoly nc_coeff(const NCPoly& x, int a, int b) {
  auto it = x.coeffs.find(std::make_pair(a, b));
  if (it == x.coeffs.end()) return QPoly(x.qdeg);
  return it->second;
}

QPoly nc_worst_coeff(const NCPoly& x) {
  QPoly best(x.qdeg);
  Int m = 0;
  for (const auto& [key, p] : x.coeffs) {
    Int s = p.sup();
    if (s > m) {
      m = s;
      best = p;
    }
  }
  return best;
}

NCPoly eq_series(const NCPoly& t) {
  DOMAIN_CHECK(nc_coeff(t, 0, 0).is_zero(), "argument must have zero constant term");
  NCPoly acc = nc_one(t.ndeg, t.qdeg);
  // Factors are polynomials in the single element t, so they commute and the
  // accumulation order is immaterial.
  for (int e = 1; e <= t.qdeg; e += 2)
    acc = nc_mul(acc, nc_add(nc_one(t.ndeg, t.qdeg), nc_qshift(t, e)));
  return acc;
}

NCPoly addition_check(const QSeriesParams& p) {
  const NCPoly u = nc_monomial(1, 0, 0, p.ndeg, p.qdeg);
  const NCPoly v = nc_monomial(0, 1, 0, p.ndeg, p.qdeg);
  return nc_sub(nc_mul(eq_series(u), eq_series(v)), eq_series(nc_add(u, v)));
}

NCPoly pentagon_check(const QSeriesParams& p) {
  DOMAIN_CHECK(p.mu_qpow >= 0, "middle scaling must be a monomial in q");
  const NCPoly u = nc_monomial(1, 0, 0, p.ndeg, p.qdeg);
  const NCPoly v = nc_monomial(0, 1, 0, p.ndeg, p.qdeg);
  const NCPoly mid = nc_monomial(1, 1, p.mu_qpow, p.ndeg, p.qdeg);
  const NCPoly lhs = nc_mul(eq_series(v), eq_series(u));
  const NCPoly rhs = nc_mul(nc_mul(eq_series(u), eq_series(mid)), eq_series(v));
  return nc_sub(lhs, rhs);
}

double zeta2_em() {
  // Tail from K on replaced by 1/K + 1/2K^2 + 1/6K^3 - 1/30K^5 + 1/42K^7,
  // leaving an error of order K^{-9}.
  const double K = 40.0;
  double s = 0.0;
  for (int k = 39; k >= 1; --k) s += 1.0 / (static_cast<double>(k) * k);
  const double K2 = K * K;
  return s + 1.0 / K + 1.0 / (2.0 * K2) + 1.0 / (6.0 * K2 * K) -
         1.0 / (30.0 * K2 * K2 * K) + 1.0 / (42.0 * K2 * K2 * K2 * K);
}

namespace {

double dilog_series(double x) {
  // |x| <= 1/2: terms shrink geometrically, so ~60 of them reach 1e-18.
  double s = 0.0;
  double p = x;
  for (int k = 1; k <= 64; ++k) {
    const double term = p / (static_cast<double>(k) * k);
    s += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(s))) break;
    p *= x;
  }
  return s;
}

}  // namespace

double dilog(double x) {
  DOMAIN_CHECK(x <= 1.0, "dilogarithm evaluated past its branch point");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return zeta2_em();
  if (x < -0.5)  // Landen: x/(x-1) lands in (0, 1), shrinking the argument
    return -dilog(x / (x - 1.0)) - 0.5 * std::log1p(-x) * std::log1p(-x);
  if (x > 0.5)  // reflection through 1 - x
    return zeta2_em() - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
  return dilog_series(x);
}

double rogers_L(double x) {
  DOMAIN_CHECK(x >= 0.0 && x <= 1.0, "Rogers form needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return zeta2_em();
  return dilog(x) + 0.5 * std::log(x) * std::log1p(-x);
}

double rogers_numeric(double x, double y) {
  DOMAIN_CHECK(x > 0.0 && x < 1.0, "x must lie in (0, 1)");
  DOMAIN_CHECK(y > 0.0 && y < 1.0, "y must lie in (0, 1)");
  const double denom = 1.0 - x * y;
  return std::abs(rogers_L(x) + rogers_L(y) - rogers_L(x * y) -
                  rogers_L(x * (1.0 - y) / denom) - rogers_L(y * (1.0 - x) / denom));
}

double dilog_asymptotic(double t, double y) {
  DOMAIN_CHECK(t > 0.0, "t must be positive");
  DOMAIN_CHECK(y > 0.0, "y must be positive");
  const double q = std::exp(-2.0 * kPi * y);
  double s = 0.0;
  double qpow = q;        // q^{2n+1}
  const double q2 = q * q;
  for (int n = 0; n < 2000000; ++n) {
    const double term = std::log1p(t * qpow);
    s += term;
    if (term < 1e-18 * (1.0 + s)) break;
    qpow *= q2;
  }
  return std::abs(s + dilog(-t) / (4.0 * kPi * y));
}

}  // namespace rmlab
