#include "rmlab/numerics.hpp"

#include <array>
#include <cmath>

#include "rmlab/check.hpp"

namespace rmlab {

namespace {

Cplx simpson_step(const std::function<Cplx(double)>& f, double a, double b, Cplx fa, Cplx fm,
                  Cplx fb, Cplx whole, double tol, int depth) {
  double m = (a + b) / 2;
  double lm = (a + m) / 2, rm = (m + b) / 2;
  Cplx flm = f(lm), frm = f(rm);
  Cplx left = (m - a) / 6 * (fa + 4.0 * flm + fm);
  Cplx right = (b - m) / 6 * (fm + 4.0 * frm + fb);
  Cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

Cplx integrate(const std::function<Cplx(double)>& f, double a, double b, double tol,
               int max_depth) {
  DOMAIN_CHECK(tol > 0, "integration tolerance must be positive");
  if (a == b) return {0.0, 0.0};
  // Fixed pre-split so a peak between the first probe points cannot fool the
  // refinement test into an early exit.
  constexpr int kPanels = 16;
  Cplx total{0.0, 0.0};
  double h = (b - a) / kPanels;
  for (int k = 0; k < kPanels; ++k) {
    double pa = a + k * h, pb = a + (k + 1) * h;
    double m = (pa + pb) / 2;
    Cplx fa = f(pa), fm = f(m), fb = f(pb);
    Cplx whole = (pb - pa) / 6 * (fa + 4.0 * fm + fb);
    total += simpson_step(f, pa, pb, fa, fm, fb, whole, tol / kPanels, max_depth);
  }
  return total;
}

Cplx integrate2d(const std::function<Cplx(double, double)>& f, double ax, double bx, double ay,
                 double by, double tol) {
  auto outer = [&](double x) { return integrate([&](double y) { return f(x, y); }, ay, by, tol / 8); };
  return integrate(outer, ax, bx, tol);
}

namespace {

struct GlNode {
  double x, w;
};

// Positive-half nodes and weights of 32-point Gauss-Legendre, from Newton on
// the Legendre recurrence; converges to machine precision from the cosine
// guesses.
const std::array<GlNode, 16>& gl32_nodes() {
  static const std::array<GlNode, 16> table = [] {
    constexpr int n = 32;
    constexpr double pi = 3.14159265358979323846;
    std::array<GlNode, 16> t{};
    for (int i = 0; i < 16; ++i) {
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = 0;
        for (int k = 1; k <= n; ++k) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2 * k - 1) * x * p1 - (k - 1) * p2) / k;
        }
        dp = n * (x * p0 - p1) / (x * x - 1);
        double dx = p0 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      t[i] = {x, 2 / ((1 - x * x) * dp * dp)};
    }
    return t;
  }();
  return table;
}

}  // namespace

Cplx integrate_gl(const std::function<Cplx(double)>& f, double a, double b, int panels) {
  DOMAIN_CHECK(panels >= 1, "panel count must be positive");
  const auto& nodes = gl32_nodes();
  // Extended-precision accumulation keeps the panel-doubling comparison in the
  // callers from tripping over summation roundoff.
  std::complex<long double> total{0.0L, 0.0L};
  const double h = (b - a) / panels;
  for (int p = panels; p-- > 0;) {  // tail panels first: smallest pieces enter early
    const double mid = a + (p + 0.5) * h, half = h / 2;
    std::complex<long double> acc{0.0L, 0.0L};
    for (const GlNode& nd : nodes) {
      Cplx v = f(mid + half * nd.x) + f(mid - half * nd.x);
      acc += std::complex<long double>(nd.w) * std::complex<long double>(v);
    }
    total += std::complex<long double>(half) * acc;
  }
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

double richardson_derivative(const std::function<double(double)>& f, double x, double h) {
  DOMAIN_CHECK(h > 0, "finite-difference step must be positive");
  auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2 * step); };
  double d1 = central(h), d2 = central(h / 2);
  return (4 * d2 - d1) / 3;
}

namespace {

// Lanczos g = 7, valid for Re s >= 1/2.
Cplx lanczos(Cplx s) {
  static const double kCoef[] = {0.99999999999980993,     676.5203681218851,
                                 -1259.1392167224028,     771.32342877765313,
                                 -176.61502916214059,     12.507343278686905,
                                 -0.13857109526572012,    9.9843695780195716e-6,
                                 1.5056327351493116e-7};
  Cplx x = kCoef[0];
  for (int i = 1; i <= 8; ++i) x += kCoef[i] / (s - 1.0 + double(i));
  Cplx t = s + 6.5;
  return std::sqrt(2 * 3.14159265358979323846) * std::pow(t, s - 0.5) * std::exp(-t) * x;
}

}  // namespace

Cplx cgamma(Cplx s) {
  constexpr double kPi = 3.14159265358979323846;
  if (s.real() < 0.5) return kPi / (std::sin(kPi * s) * lanczos(1.0 - s));
  return lanczos(s);
}

Cplx rgamma(Cplx s) {
  constexpr double kPi = 3.14159265358979323846;
  // Entire, with zeros exactly at 0, -1, -2, ...; sin(pi s) only lands there
  // up to rounding, so the poles are pinned first.
  if (s.imag() == 0 && s.real() <= 0 && s.real() == std::floor(s.real())) return {0.0, 0.0};
  if (s.real() < 0.5) return std::sin(kPi * s) * lanczos(1.0 - s) / kPi;
  return 1.0 / lanczos(s);
}

}  // namespace rmlab
