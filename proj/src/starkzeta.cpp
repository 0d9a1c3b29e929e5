#include "rmlab/starkzeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "rmlab/check.hpp"

namespace rmlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Cplx kI{0.0, 1.0};

// Exact coordinates of x in the integral basis (1, omega).
std::pair<Rat, Rat> ob_coords(const QuadElem& x, const QuadElem& omega) {
  Rat v = x.b / omega.b;
  Rat u = x.a - v * omega.a;
  return {u, v};
}

std::optional<std::pair<Int, Int>> int_coords(const QuadElem& x, const QuadElem& omega) {
  auto [u, v] = ob_coords(x, omega);
  if (denominator(u) != 1 || denominator(v) != 1) return std::nullopt;
  return std::make_pair(numerator(u), numerator(v));
}

QuadElem from_coords(const Int& u, const Int& v, const QuadElem& omega, long d) {
  return QuadElem(Rat(u) + Rat(v) * omega.a, Rat(v) * omega.b, d);
}

// H is a full-rank 2x2 row HNF [[p, q], [0, r]].
bool lattice_contains(const IMat& H, const Int& u, const Int& v) {
  LOGIC_CHECK(H.size() == 2 && H[1][0] == 0, "ideal basis must be a full-rank HNF");
  if (u % H[0][0] != 0) return false;
  Int alpha = u / H[0][0];
  return (v - alpha * H[0][1]) % H[1][1] == 0;
}

IMat ideal_from_elems(const std::vector<QuadElem>& gens, const QuadElem& omega) {
  IMat rows;
  for (const QuadElem& g : gens) {
    auto c = int_coords(g, omega);
    LOGIC_CHECK(c.has_value(), "ideal generators must be integers of the field");
    rows.push_back({c->first, c->second});
  }
  return row_span_hnf(rows);
}

IMat principal_ideal(const QuadElem& x, const QuadElem& omega) {
  return ideal_from_elems({x, x * omega}, omega);
}

IMat ideal_sum(const IMat& A, const IMat& B) {
  IMat rows = A;
  rows.insert(rows.end(), B.begin(), B.end());
  return row_span_hnf(rows);
}

IMat ideal_mul(const IMat& A, const IMat& B, const QuadElem& omega, long d) {
  std::vector<QuadElem> prods;
  for (const auto& ra : A)
    for (const auto& rb : B)
      prods.push_back(from_coords(ra[0], ra[1], omega, d) * from_coords(rb[0], rb[1], omega, d));
  return ideal_from_elems(prods, omega);
}

// { x : x B <= A } for ideals A <= B, via the intersection of the scaled
// lattices (1/b_i) A over the basis elements b_i of B.
IMat ideal_quotient(const IMat& A, const IMat& B, const QuadElem& omega, long d) {
  std::vector<std::array<Rat, 4>> frac_rows;  // coordinates of a_j / b_i
  Int den = 1;
  for (const auto& rb : B) {
    QuadElem b = from_coords(rb[0], rb[1], omega, d);
    std::array<Rat, 4> row;
    int k = 0;
    for (const auto& ra : A) {
      QuadElem q = from_coords(ra[0], ra[1], omega, d) / b;
      auto [u, v] = ob_coords(q, omega);
      row[k++] = u;
      row[k++] = v;
      den = lcm(den, lcm(denominator(u), denominator(v)));
    }
    frac_rows.push_back(row);
  }
  auto scale = [&](const Rat& r) { return numerator(r) * (den / denominator(r)); };
  IMat R0{{scale(frac_rows[0][0]), scale(frac_rows[0][1])},
          {scale(frac_rows[0][2]), scale(frac_rows[0][3])}};
  IMat R1{{scale(frac_rows[1][0]), scale(frac_rows[1][1])},
          {scale(frac_rows[1][2]), scale(frac_rows[1][3])}};
  IMat inter = row_span_intersection(R0, R1);
  for (auto& row : inter)
    for (auto& e : row) {
      LOGIC_CHECK(e % den == 0, "ideal quotient must be integral here");
      e /= den;
    }
  return row_span_hnf(inter);
}

Int ideal_norm(const IMat& H) { return H[0][0] * H[1][1]; }

bool is_whole_ring(const IMat& H) {
  return H.size() == 2 && H[0][0] == 1 && H[0][1] == 0 && H[1][0] == 0 && H[1][1] == 1;
}

// r reduced mod m into [0, m), exactly, then rounded once.
double frac_mod(const Rat& r, int m) {
  Int num = numerator(r), den = denominator(r);
  Int red = fmod_int(num, m * den);
  return Rat(red, den).convert_to<double>();
}

// Truncated theta series sum_k c_k e^{-2 pi y n_k} with exact bucketing of the
// representatives by |N(x)|; n ascending, evaluation smallest-term-first.
struct ExpSeries {
  std::vector<double> freq;
  std::vector<Cplx> coef;
  double weight = 0.0;  // sum |c_k|
  long terms = 0;       // representatives folded in

  Cplx eval(double y) const {
    std::complex<long double> acc{0.0L, 0.0L};
    for (size_t i = freq.size(); i-- > 0;) {
      Cplx t = coef[i] * std::exp(-2 * kPi * y * freq[i]);
      acc += std::complex<long double>(t);
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
};

// Norm cutoff making the series tail at height t smaller than tol; same shell
// estimate as the direct theta evaluation.
double tail_cutoff(const ThetaSpec& sp, double t, double tol) {
  double delta = sp.L.delta().to_double();
  double K = 16 * (sp.eps.to_double() / delta + 1);
  double B = std::log(K / (tol * (1 - std::exp(-2 * kPi * t)))) / (2 * kPi * t);
  return std::max(B, 8.0);
}

ExpSeries build_series(const ThetaSpec& sp, double B) {
  const double eta0 = sp.eta.real(), eta1 = sp.eta.imag();
  // Character pairing <x, m0> = tr(x conj(m0)), matching the plane lifts.
  const Cplx half_phase = std::exp(-kPi * kI * frac_mod((sp.l0 * sp.m0.conj()).trace(), 2));
  std::map<Rat, Cplx> buckets;
  Rat bound(Int(static_cast<long long>(std::ceil(B))));
  long used = 0;
  for (const CosetRep& rep : coset_reps(sp.L, sp.l0, sp.eps, bound)) {
    double c = eta0 * rep.x.conj().sign() + eta1 * rep.x.sign();
    if (c == 0) continue;
    QuadElem l = rep.x - sp.l0;
    Cplx phase = std::exp(-2.0 * kPi * kI * frac_mod((l * sp.m0.conj()).trace(), 1));
    buckets[rep.abs_norm] += c * phase * half_phase;
    ++used;
  }
  ExpSeries out;
  out.terms = used;
  for (const auto& [n, c] : buckets) {
    out.freq.push_back(n.convert_to<double>());
    out.coef.push_back(c);
    out.weight += std::abs(c);
  }
  return out;
}

struct ThetaIntegral {
  Cplx value;
  Int cutoff;
  long terms;
};

// I(s) = int_{y0}^inf y^{s-1} Theta(iy) dy
//        + (1/(i Delta)) int_{1/y0}^inf u^{-s} Theta_dual(iu) du,
// the second piece being the 0..y0 part folded through the functional
// equation; both integrands decay exponentially.
ThetaIntegral theta_integral(const StarkInput& in, const ConditionsReport& rep, Cplx s,
                             double tol, double y0) {
  DOMAIN_CHECK(y0 >= 0.5 && y0 <= 4.0, "split point out of range");
  QuadElem zero(Rat(0), Rat(0), in.d);
  ThetaSpec base(in.L, in.l0, zero, Cplx{1.0, 0.0}, rep.u_generator);
  ThetaSpec dual = dual_spec(base);
  const double umin = 1.0 / y0;
  // If every coset norm sits above the cutoff (the minimum scales with N(b)),
  // widen until the series is populated; the shell tail bound stays valid.
  auto series_for = [&](const ThetaSpec& sp, double t, double& B) {
    B = tail_cutoff(sp, t, tol / 16);
    ExpSeries se = build_series(sp, B);
    for (int i = 0; i < 12 && se.freq.empty(); ++i) {
      B *= 2;
      se = build_series(sp, B);
    }
    return se;
  };
  double Bdir = 0, Bdual = 0;
  ExpSeries dir = series_for(base, y0, Bdir);
  ExpSeries dus = series_for(dual, umin, Bdual);
  LOGIC_CHECK(!dir.freq.empty() && !dus.freq.empty(), "theta series came out empty");

  const double qtol = tol / 4;
  const double rs = s.real();
  // Endpoint slack pays for the power factor only where it grows.
  const double ymax = y0 + (std::log((dir.weight + 1) / qtol) + 8 * (1 + std::max(0.0, rs - 1))) /
                               (2 * kPi * dir.freq.front());
  const double umax = umin + (std::log((dus.weight + 1) / qtol) + 8 * (1 + std::max(0.0, -rs))) /
                                 (2 * kPi * dus.freq.front());

  // Spans graded for the two features of y^c e^{-2 pi n y}: geometric steps
  // while the power factor curves (width proportional to y), then linear
  // steps of half the slowest decay length.  Gauss-Legendre per span falls
  // off much faster than the doubling comparison, which certifies the result.
  auto quad = [&](const std::function<Cplx(double)>& f, double a, double b, double decay) {
    std::vector<double> edges{a};
    const double grow = 1 + 1 / (1 + std::abs(s));
    double x = a;
    while (x < std::min(b, 8 * decay)) {
      x = std::min({x * grow, 8 * decay, b});
      edges.push_back(x);
    }
    while (x < b) {
      x = std::min(x + decay / 2, b);
      edges.push_back(x);
    }
    auto run = [&](int mult) {
      std::complex<long double> tot{0.0L, 0.0L};
      for (size_t i = edges.size() - 1; i-- > 0;)
        tot += std::complex<long double>(integrate_gl(f, edges[i], edges[i + 1], mult));
      return Cplx{static_cast<double>(tot.real()), static_cast<double>(tot.imag())};
    };
    Cplx v1 = run(1), v2 = run(2);
    double ok = std::max(4 * qtol, 2e-13 * (1 + std::abs(v2)));  // roundoff floor
    if (std::abs(v1 - v2) <= ok) return v2;
    Cplx v4 = run(4);
    if (std::abs(v2 - v4) <= ok) return v4;
    throw std::runtime_error("zeta quadrature did not converge");
  };
  Cplx direct_part = quad([&](double y) { return std::exp((s - 1.0) * std::log(y)) * dir.eval(y); },
                          y0, ymax, 1 / (2 * kPi * dir.freq.front()));
  Cplx dual_part = quad([&](double u) { return std::exp(-s * std::log(u)) * dus.eval(u); }, umin,
                        umax, 1 / (2 * kPi * dus.freq.front()));

  const double delta = in.L.delta().to_double();
  ThetaIntegral out;
  out.value = direct_part + dual_part / (kI * delta);
  out.cutoff = Int(static_cast<long long>(std::ceil(std::max(Bdir, Bdual))));
  out.terms = dir.terms + dus.terms;
  return out;
}

}  // namespace

StarkInput make_stark_input(const Pseudolattice& L, const QuadElem& l0) {
  const long d = L.d();
  DOMAIN_CHECK(l0.d == d, "shift must live in the same field as the lattice");
  DOMAIN_CHECK(!l0.is_zero(), "shift must be nonzero");
  auto [one, omega] = integer_basis(d);
  (void)one;
  auto c1 = int_coords(L.l1, omega), c2 = int_coords(L.l2, omega), c0 = int_coords(l0, omega);
  DOMAIN_CHECK(c1.has_value() && c2.has_value(), "lattice must lie inside the maximal order");
  DOMAIN_CHECK(c0.has_value(), "shift must be an integer of the field");

  IMat Lmat = row_span_hnf({{c1->first, c1->second}, {c2->first, c2->second}});
  LOGIC_CHECK(Lmat.size() == 2, "lattice basis degenerated");
  for (const QuadElem* e : {&L.l1, &L.l2}) {
    auto cw = int_coords(*e * omega, omega);
    DOMAIN_CHECK(cw.has_value() && lattice_contains(Lmat, cw->first, cw->second),
                 "lattice must be an ideal of the maximal order");
  }

  IMat princ = principal_ideal(l0, omega);
  IMat b = ideal_sum(Lmat, princ);
  IMat f = ideal_quotient(Lmat, b, omega, d);
  IMat a0 = ideal_quotient(princ, b, omega, d);
  LOGIC_CHECK(ideal_mul(b, f, omega, d) == Lmat, "gcd times quotient must rebuild the ideal");
  LOGIC_CHECK(ideal_mul(b, a0, omega, d) == princ, "gcd times quotient must rebuild the shift");
  return StarkInput{d, L, l0, b, a0, f, ideal_norm(b)};
}

ConditionsReport stark_conditions_check(const StarkInput& in) {
  ConditionsReport rep;
  auto [one, omega] = integer_basis(in.d);
  (void)one;
  rep.coprime_b_f = is_whole_ring(ideal_sum(in.b_ideal, in.f_ideal));
  rep.coprime_a0_f = is_whole_ring(ideal_sum(in.a0_ideal, in.f_ideal));

  const QuadElem eps0 = fundamental_unit(in.d).unit;
  Int nf = ideal_norm(in.f_ideal);
  DOMAIN_CHECK(nf <= 2000000, "conductor norm too large for the unit search");
  const long cap = nf.convert_to<long>() * 2 + 4;

  long k1 = 0, j0 = 0;
  QuadElem p(Rat(1), Rat(0), in.d);
  for (long k = 1; k <= cap; ++k) {
    p = p * eps0;
    auto c = int_coords(p, omega);
    LOGIC_CHECK(c.has_value(), "unit powers must stay integral");
    if (lattice_contains(in.f_ideal, c->first - 1, c->second)) {
      k1 = k;
      break;
    }
    if (j0 == 0 && lattice_contains(in.f_ideal, c->first + 1, c->second)) j0 = k;
  }
  LOGIC_CHECK(k1 > 0, "unit order did not appear within the group-order cap");
  rep.unit_order = k1;
  rep.u_generator = eps0.pow(k1);

  const bool minus_one = lattice_contains(in.f_ideal, Int(2), Int(0));
  if (minus_one) {
    rep.units_positive = false;
    rep.witness = QuadElem(Rat(-1), Rat(0), in.d);
  } else if (rep.u_generator.conj().sign() < 0) {
    rep.units_positive = false;
    rep.witness = rep.u_generator;
  } else if (j0 > 0) {
    QuadElem h = -eps0.pow(j0);
    if (h.conj().sign() < 0) {
      rep.units_positive = false;
      rep.witness = h;
    } else {
      rep.units_positive = true;
      rep.index = 2;  // the group is generated by h, whose square is u_generator
    }
  } else {
    rep.units_positive = true;
  }
  rep.pass = rep.coprime_b_f && rep.coprime_a0_f && rep.units_positive;
  return rep;
}

ZetaValue zeta_direct(const StarkInput& in, Cplx s, const Int& Nbound) {
  DOMAIN_CHECK(s.real() > 1, "the Dirichlet sum converges only for Re s > 1");
  DOMAIN_CHECK(Nbound >= 1, "norm cutoff must be positive");
  ConditionsReport rep = stark_conditions_check(in);
  DOMAIN_CHECK(rep.pass, "zeta is well-defined only under the coprimality and unit conditions");

  auto reps = coset_reps(in.L, in.l0, rep.u_generator, Rat(Nbound));
  Cplx sum{0.0, 0.0};  // smallest norms last
  for (auto it = reps.rbegin(); it != reps.rend(); ++it)
    sum += double(it->x.conj().sign()) *
           std::exp(-s * std::log(it->abs_norm.convert_to<double>()));
  Cplx pref = double(in.l0.conj().sign()) *
              std::exp(s * std::log(in.b_norm.convert_to<double>())) / double(rep.index);
  ZetaValue out;
  out.s = s;
  out.value = pref * sum;
  out.method = "direct";
  out.truncation = Nbound;
  out.terms = static_cast<long>(reps.size());
  return out;
}

ZetaValue zeta_mellin(const StarkInput& in, Cplx s, double tol, double y0) {
  DOMAIN_CHECK(tol > 0, "tolerance must be positive");
  ConditionsReport rep = stark_conditions_check(in);
  DOMAIN_CHECK(rep.pass, "zeta is well-defined only under the coprimality and unit conditions");

  Cplx pref = double(in.l0.conj().sign()) *
              std::exp(s * std::log(2 * kPi * in.b_norm.convert_to<double>())) * rgamma(s) /
              double(rep.index);
  double scale = std::max(1.0, std::abs(pref));
  ThetaIntegral I = theta_integral(in, rep, s, tol / (4 * scale), y0);
  ZetaValue out;
  out.s = s;
  out.value = pref * I.value;
  out.method = "mellin";
  out.truncation = I.cutoff;
  out.terms = I.terms;
  out.tol = tol;
  return out;
}

StarkResult stark_number(const StarkInput& in, double tol) {
  DOMAIN_CHECK(tol > 0, "tolerance must be positive");
  ConditionsReport rep = stark_conditions_check(in);
  DOMAIN_CHECK(rep.pass, "Stark numbers need the coprimality and unit conditions");
  // The prefactor (2 pi N(b))^s / Gamma(s) has a simple zero of derivative 1
  // at s = 0, so zeta'(0) reduces to the bare integral there.
  ThetaIntegral I = theta_integral(in, rep, Cplx{0.0, 0.0}, tol / 4, 1.0);
  LOGIC_CHECK(std::abs(I.value.imag()) < 1e-6, "theta integral should be real at s = 0");
  double zp = double(in.l0.conj().sign()) * I.value.real() / double(rep.index);
  return StarkResult{zp, std::exp(zp)};
}

std::optional<ProbeResult> algebraicity_probe(double x, int max_deg, long max_height, double tol,
                                              long long op_cap) {
  DOMAIN_CHECK(std::isfinite(x), "probe needs a finite sample");
  DOMAIN_CHECK(max_deg >= 1 && max_height >= 0, "degenerate search box");
  DOMAIN_CHECK(tol > 0, "tolerance must be positive");

  std::vector<double> xp(static_cast<size_t>(max_deg) + 1, 1.0);
  for (int k = 1; k <= max_deg; ++k) xp[k] = xp[k - 1] * x;

  long long ops = 0;
  for (int deg = 1; deg <= max_deg; ++deg) {
    // Odometer over (c_1, ..., c_{deg-1}); the constant term is solved for
    // directly, which prunes the innermost loop to at most a few candidates.
    std::vector<long> c(static_cast<size_t>(deg), -max_height);
    while (true) {
      ops += deg;
      DOMAIN_CHECK(ops <= op_cap, "probe operation cap exceeded");
      double base = xp[deg];
      for (int i = 1; i < deg; ++i) base += double(c[i]) * xp[i];
      double lo = std::ceil(-base - tol), hi = std::floor(-base + tol);
      for (double c0 = std::max(lo, double(-max_height));
           c0 <= std::min(hi, double(max_height)); ++c0) {
        ++ops;
        double val = base + c0;
        if (std::abs(val) < tol) {
          ProbeResult res;
          res.coeffs.push_back(Int(static_cast<long long>(c0)));
          for (int i = 1; i < deg; ++i) res.coeffs.push_back(Int(c[i]));
          res.coeffs.push_back(Int(1));
          res.residual = std::abs(val);
          return res;
        }
      }
      int pos = 1;
      while (pos < deg && c[pos] == max_height) {
        c[pos] = -max_height;
        ++pos;
      }
      if (pos >= deg) break;
      ++c[pos];
    }
  }
  return std::nullopt;
}

}  // namespace rmlab
