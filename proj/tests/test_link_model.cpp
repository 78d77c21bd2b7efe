#include "nli/closed_form.hpp"
#include "nli/link_model.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace nli;

namespace {

FiberSpan span_with(double length, double loss, double beta2 = 21.0, double gamma = 1.3) {
  return FiberSpan({length, loss, beta2, gamma});
}

std::string field_of(const FiberSpan::Params& p) {
  try {
    FiberSpan s(p);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("span validation names the offending field") {
  const FiberSpan::Params ok{100.0, 0.046, 21.0, 1.3};
  auto with = [&](auto mutate) {
    FiberSpan::Params p = ok;
    mutate(p);
    return field_of(p);
  };
  CHECK(with([](auto&) {}) == "");
  CHECK(with([](auto& p) { p.length_km = 0.0; }) == "length_km");
  CHECK(with([](auto& p) { p.length_km = -5.0; }) == "length_km");
  CHECK(with([](auto& p) { p.loss_coeff_per_km = 0.0; }) == "loss_coeff_per_km");
  CHECK(with([](auto& p) { p.beta2_ps2_per_km = 0.0; }) == "beta2_ps2_per_km");
  CHECK(with([](auto& p) { p.beta2_ps2_per_km = -21.0; }) == "beta2_ps2_per_km");
  CHECK(with([](auto& p) { p.gamma_per_w_km = -0.1; }) == "gamma_per_w_km");
  CHECK(with([](auto& p) { p.gamma_per_w_km = 0.0; }) == "");
  CHECK(with([](auto& p) { p.length_km = std::numeric_limits<double>::quiet_NaN(); }) ==
        "length_km");
  CHECK(with([](auto& p) { p.loss_coeff_per_km = std::numeric_limits<double>::infinity(); }) ==
        "loss_coeff_per_km");
  // finite parameters whose product overflows the dB value
  CHECK(with([](auto& p) {
          p.length_km = 1e300;
          p.loss_coeff_per_km = 1e300;
        }) != "");
}

TEST_CASE("effective length matches direct quadrature") {
  const FiberSpan s = span_with(100.0, 0.046);
  const DerivedSpan d = derive_effective_lengths(s);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double direct = ts.integrate([](double z) { return std::exp(-0.046 * z); }, 0.0, 100.0);
  CHECK(d.l_eff_km == doctest::Approx(direct).epsilon(1e-14));
  CHECK(d.l_eff_km == doctest::Approx((1.0 - std::exp(-4.6)) / 0.046).epsilon(1e-15));
  CHECK(d.l_inf_km == doctest::Approx(1.0 / 0.046).epsilon(1e-15));
}

TEST_CASE("effective length bounds and long-span limit") {
  for (double len : {0.001, 1.0, 50.0, 100.0, 1000.0}) {
    const DerivedSpan d = derive_effective_lengths(span_with(len, 0.2));
    CHECK(d.l_eff_km > 0.0);
    CHECK(d.l_eff_km <= d.l_inf_km);
    // strict until exp(-loss * length) drops below half an ulp
    if (0.2 * len < 36.0) CHECK(d.l_eff_km < d.l_inf_km);
  }
  const DerivedSpan far = derive_effective_lengths(span_with(500.0, 0.2));
  CHECK(far.l_inf_km == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(far.l_eff_km == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("effective length is strictly increasing in span length") {
  double prev = 0.0;
  for (double len = 0.5; len < 400.0; len *= 1.3) {
    const double l = derive_effective_lengths(span_with(len, 0.046)).l_eff_km;
    CHECK(l > prev);
    prev = l;
  }
}

TEST_CASE("span loss in dB") {
  CHECK(span_loss_db(span_with(1.0, std::log(10.0))) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(span_loss_db(span_with(1.0, 1e-4)) == doctest::Approx(4.342944819e-4).epsilon(1e-9));
  CHECK(span_loss_db(span_with(100.0, 0.046)) == doctest::Approx(19.9775).epsilon(1e-5));
}

TEST_CASE("dB/km conversion treats the input as field-level dB of power") {
  const double k = loss_coeff_from_db_per_km(0.2);
  CHECK(k == doctest::Approx(0.2 / (10.0 * std::log10(std::numbers::e))).epsilon(1e-15));
  CHECK(span_loss_db(span_with(100.0, k)) == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("low span loss is flagged on results") {
  const SignalSpec sig(1.0, 0.032);
  const auto low = closed_form::g_nli_total(sig, span_with(1.0, 1e-4), 2,
                                            closed_form::CcMethod::SinInt);
  CHECK(low.has_warning(Warning::LowSpanLoss));
  const auto normal = closed_form::g_nli_total(sig, span_with(100.0, 0.046), 2,
                                               closed_form::CcMethod::SinInt);
  CHECK_FALSE(normal.has_warning(Warning::LowSpanLoss));
}

TEST_CASE("transcendental arguments are dimensionless in canonical units") {
  // Same phase evaluated in SI units (s^2/m, Hz, m).
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ub(0.1, 30.0), uf(-0.2, 0.2), ul(1.0, 200.0);
  for (int i = 0; i < 100; ++i) {
    const double b2 = ub(rng), f1 = uf(rng), f2 = uf(rng), ls = ul(rng);
    const double canonical = 2.0 * std::numbers::pi * std::numbers::pi * b2 * f1 * f2 * ls;
    const double si = 2.0 * std::numbers::pi * std::numbers::pi * (b2 * 1e-24 / 1e3) *
                      (f1 * 1e12) * (f2 * 1e12) * (ls * 1e3);
    CHECK(canonical == doctest::Approx(si).epsilon(1e-12));
  }
}

TEST_CASE("signal validation") {
  CHECK_THROWS_AS(SignalSpec(0.0, 0.032), ValidationError);
  CHECK_THROWS_AS(SignalSpec(1.0, -0.032), ValidationError);
  CHECK_NOTHROW(SignalSpec(1.0, 0.032));
}

TEST_CASE("homogeneous link round trip") {
  const FiberSpan s = span_with(80.0, 0.05);
  const LinkConfig link = LinkConfig::homogeneous(s, 7);
  REQUIRE(link.n_spans() == 7);
  CHECK(link.is_homogeneous());
  for (const FiberSpan& x : link.spans()) CHECK(x == s);
  CHECK_THROWS_AS(LinkConfig::homogeneous(s, 0), ValidationError);
}

TEST_CASE("heterogeneous link keeps order") {
  const LinkConfig link = LinkConfig::heterogeneous(
      {span_with(100.0, 0.046), span_with(80.0, 0.05, 4.0), span_with(120.0, 0.04)});
  REQUIRE(link.n_spans() == 3);
  CHECK_FALSE(link.is_homogeneous());
  CHECK(link.spans()[1].beta2_ps2_per_km() == 4.0);
  CHECK_THROWS_AS(LinkConfig::heterogeneous({}), ValidationError);
}

TEST_CASE("method and warning tags") {
  for (Method m : {Method::OracleLozengeExact, Method::OracleSquare, Method::ExactSeries,
                   Method::SinInt, Method::SiApp, Method::Plateau, Method::LowerBound,
                   Method::Heterogeneous}) {
    CHECK(method_from_string(to_string(m)) == m);
  }
  CHECK(to_string(Method::OracleLozengeExact) == "oracle-lozenge-exact");
  CHECK(to_string(Method::LowerBound) == "lower-bound");
  CHECK_THROWS_AS(method_from_string("eq41"), ValidationError);
  CHECK(to_string(Warning::LowSpanLoss) == "LOW_SPAN_LOSS");
  CHECK(to_string(Warning::PlateauInvalid) == "PLATEAU_INVALID");
  CHECK(to_string(Warning::RolloffHigh) == "ROLLOFF_HIGH");
}

TEST_CASE("estimate totals and warning dedup") {
  NliEstimate e;
  e.g_inc_w_per_thz = 2.0;
  e.g_cc_w_per_thz = 0.5;
  CHECK(e.total_w_per_thz() == 2.5);
  add_warning(e.warnings, Warning::RolloffHigh);
  add_warning(e.warnings, Warning::RolloffHigh);
  CHECK(e.warnings.size() == 1);
  CHECK(e.has_warning(Warning::RolloffHigh));
}
