#include "nli/closed_form.hpp"
#include "nli/gnrf_oracle.hpp"
#include "nli/specfun.hpp"
#include "reference_values.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace nli;
using namespace nli::oracle;

namespace {

constexpr double kPi = std::numbers::pi;

FiberSpan smf(double db_per_km = 0.2) {
  return FiberSpan({100.0, loss_coeff_from_db_per_km(db_per_km), 21.0, 1.3});
}

QuadratureSettings tol(double rel) {
  QuadratureSettings s;
  s.rel_tol = rel;
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("efficiency at a zero frequency equals L_eff^2 for both models") {
  const FiberSpan s = smf();
  const double leff = derive_effective_lengths(s).l_eff_km;
  for (auto m : {EfficiencyModel::Exact, EfficiencyModel::Lorentzian}) {
    CHECK(fwm_efficiency(0.0, 0.013, s, m) == doctest::Approx(leff * leff).epsilon(1e-14));
    CHECK(fwm_efficiency(-0.02, 0.0, s, m) == doctest::Approx(leff * leff).epsilon(1e-14));
  }
}

TEST_CASE("exact vs Lorentzian gap at a 20 dB span") {
  const FiberSpan s = smf();
  const double e = fwm_efficiency(0.05, 0.05, s, EfficiencyModel::Exact);
  const double l = fwm_efficiency(0.05, 0.05, s, EfficiencyModel::Lorentzian);
  const double bound = 4.0 * 0.01 / 0.9801;
  CHECK(e >= l);
  CHECK((e - l) / l <= bound * (1.0 + 1e-12));
}

TEST_CASE("Lorentzian half height") {
  const FiberSpan s = smf();
  const double leff = derive_effective_lengths(s).l_eff_km;
  const double a2 = s.loss_coeff_per_km();  // power loss coefficient
  // 16 pi^4 b2^2 f1^2 f2^2 / a2^2 = 1 with f1 = f2
  const double f = std::sqrt(a2 / (4.0 * kPi * kPi * s.beta2_ps2_per_km()));
  CHECK(fwm_efficiency(f, f, s, EfficiencyModel::Lorentzian) ==
        doctest::Approx(leff * leff / 2.0).epsilon(1e-13));
}

TEST_CASE("single-span square oracle equals the incoherent closed form") {
  const SignalSpec sig(0.7, 0.032);
  const auto r = g_nli_2d(sig, smf(), 1, DomainShape::Square, EfficiencyModel::Lorentzian, tol(1e-9));
  CHECK(rel(r.value, closed_form::g_inc_closed(sig, smf(), 1)) <= 1e-9);
  CHECK(r.error <= 1e-9 * r.value);
  CHECK(r.evals > 0);
}

TEST_CASE("square domain overestimates the lozenge by at most 4/3") {
  for (double b2 : {0.1, 2.0, 21.0}) {
    const FiberSpan s({100.0, loss_coeff_from_db_per_km(0.2), b2, 1.3});
    for (int n : {1, 4}) {
      const SignalSpec sig(1.0, 0.032);
      const double sq = g_nli_2d(sig, s, n, DomainShape::Square, EfficiencyModel::Exact, tol(1e-8)).value;
      const double lz = g_nli_2d(sig, s, n, DomainShape::Lozenge, EfficiencyModel::Exact, tol(1e-8)).value;
      CHECK(sq > lz);
      CHECK(sq / lz <= 4.0 / 3.0);
    }
  }
}

TEST_CASE("q1 quadrature: single span reduces to the arctan form") {
  for (double h : {1.0, 40.0, -400.0}) {
    const double b = 0.25, q = 0.016;
    const auto r = q1_quadrature(b, q, h, 1, tol(1e-12));
    const double closed = 2.0 * b / std::abs(h) * std::atan(std::abs(h) * q / b);
    CHECK(rel(r.value, closed) <= 1e-12);
  }
}

TEST_CASE("q1 quadrature is even in h and matches reference values") {
  CHECK(q1_quadrature(0.1, 0.016, 40.0, 5).value == q1_quadrature(0.1, 0.016, -40.0, 5).value);
  for (const auto& c : testref::kQ1) {
    CHECK(rel(q1_quadrature(c.b, c.q, c.h, c.n, tol(1e-11)).value, c.value) <= 1e-10);
  }
}

TEST_CASE("coherence oracles vanish for one span") {
  const SignalSpec sig(1.0, 0.032);
  CHECK(g_cc_quadrature(sig, smf(), 1).value == 0.0);
  CHECK(g_cc_sinc_quadrature(sig, smf(), 1).value == 0.0);
}

TEST_CASE("square oracle decomposes into incoherent and coherence integrals") {
  const SignalSpec sig(1.0, 0.032);
  for (int n : {2, 5}) {
    const auto total = g_nli_2d(sig, smf(), n, DomainShape::Square, EfficiencyModel::Lorentzian, tol(1e-9));
    const double inc = closed_form::g_inc_closed(sig, smf(), n);
    const auto cc = g_cc_quadrature(sig, smf(), n, tol(1e-10));
    CHECK(rel(inc + cc.value, total.value) <= 1e-6);
  }
}

TEST_CASE("sinc replacement gap shrinks with span loss") {
  const SignalSpec sig(1.0, 0.032);
  double prev = 1e300;
  for (double db : {0.15, 0.2, 0.25}) {
    const FiberSpan s = smf(db);
    const double exact = g_cc_quadrature(sig, s, 4, tol(1e-10)).value;
    const double sinc = g_cc_sinc_quadrature(sig, s, 4, tol(1e-10)).value;
    const double gap = std::abs(sinc - exact) / exact;
    MESSAGE("span loss " << db * 100 << " dB: sinc gap " << gap);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("per-term sinc integral equals the sine-integral closed form") {
  const SignalSpec sig(1.0, 0.032);
  const FiberSpan s = smf();
  for (int n : {1, 2, 7}) {
    const double x = n * kPi * kPi * s.beta2_ps2_per_km() * s.length_km() * 0.032 * 0.032;
    const double expected = specfun::sin_int(x) / (n * kPi * kPi * s.beta2_ps2_per_km() * s.length_km());
    CHECK(std::abs(sinc_term_quadrature(sig, s, n, tol(1e-12)).value - expected) <= 1e-9 * expected);
  }
}

TEST_CASE("NLI scales as G0^3 and gamma^2") {
  const FiberSpan s1 = smf();
  const FiberSpan s2({100.0, s1.loss_coeff_per_km(), 21.0, 2.6});
  const auto base = g_nli_2d(SignalSpec(1.0, 0.032), s1, 3, DomainShape::Lozenge, EfficiencyModel::Exact);
  const auto g0 = g_nli_2d(SignalSpec(2.0, 0.032), s1, 3, DomainShape::Lozenge, EfficiencyModel::Exact);
  const auto gm = g_nli_2d(SignalSpec(1.0, 0.032), s2, 3, DomainShape::Lozenge, EfficiencyModel::Exact);
  CHECK(rel(g0.value, 8.0 * base.value) <= 1e-14);
  CHECK(rel(gm.value, 4.0 * base.value) <= 1e-14);
}

TEST_CASE("budget exhaustion reports a scaled best estimate") {
  QuadratureSettings s;
  s.rel_tol = 1e-13;
  s.max_evals = 2000;
  const SignalSpec sig(1.0, 0.1);
  const double reference =
      g_nli_2d(sig, smf(), 4, DomainShape::Square, EfficiencyModel::Exact, tol(1e-6)).value;
  try {
    g_nli_2d(sig, smf(), 4, DomainShape::Square, EfficiencyModel::Exact, s);
    FAIL("expected a budget error");
  } catch (const QuadratureBudgetError& e) {
    // right order of magnitude: the partial sum is in W/THz, not raw units
    CHECK(e.best().value > 0.1 * reference);
    CHECK(e.best().value < 10.0 * reference);
  }
}

TEST_CASE("span limit and validation") {
  const SignalSpec sig(1.0, 0.032);
  CHECK_THROWS_AS(g_nli_2d(sig, smf(), kMaxOracleSpans + 1, DomainShape::Square,
                           EfficiencyModel::Exact),
                  ValidationError);
  CHECK_THROWS_AS(g_nli_2d(sig, smf(), 0, DomainShape::Square, EfficiencyModel::Exact),
                  ValidationError);
  CHECK_THROWS_AS(q1_quadrature(0.0, 0.016, 1.0, 2), ValidationError);
}
