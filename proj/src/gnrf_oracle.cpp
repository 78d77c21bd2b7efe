#include "nli/gnrf_oracle.hpp"

#include "mesh.hpp"
#include "nli/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nli::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

void require_spans(int n_spans, int lower) {
  if (n_spans < lower) throw ValidationError("n_spans", "must be >= " + std::to_string(lower));
}

// Both efficiency models share the denominator loss^2 + (2 phi / Ls)^2 with
// phi = 2 pi^2 b2 Ls f1 f2.
struct EfficiencyKernel {
  double loss;
  double length;
  double decay;  // exp(-loss * length)
  EfficiencyModel model;

  double operator()(double phi) const {
    const double one_minus = -std::expm1(-loss * length);
    double numerator = one_minus * one_minus;
    if (model == EfficiencyModel::Exact) {
      const double s = std::sin(phi);
      numerator += 4.0 * decay * s * s;
    }
    const double r = 2.0 * phi / length;
    return numerator / (loss * loss + r * r);
  }
};

EfficiencyKernel make_kernel(const FiberSpan& span, EfficiencyModel model) {
  return EfficiencyKernel{span.loss_coeff_per_km(), span.length_km(),
                          std::exp(-span.loss_coeff_per_km() * span.length_km()), model};
}

QuadratureSettings tighter(const QuadratureSettings& s) {
  QuadratureSettings inner = s;
  inner.rel_tol = s.rel_tol * 0.1;
  return inner;
}

}  // namespace

double fwm_efficiency(double f1_thz, double f2_thz, const FiberSpan& span,
                      EfficiencyModel model) {
  const double phi = 2.0 * kPi2 * span.beta2_ps2_per_km() * span.length_km() * f1_thz * f2_thz;
  return make_kernel(span, model)(phi);
}

QuadratureResult g_nli_2d(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                          DomainShape shape, EfficiencyModel model,
                          const QuadratureSettings& settings) {
  require_spans(n_spans, 1);
  if (n_spans > kMaxOracleSpans) {
    throw ValidationError("n_spans", "2-D oracle supports at most " +
                                         std::to_string(kMaxOracleSpans) + " spans");
  }
  settings.validate();

  const double half_band = 0.5 * signal.bandwidth_thz();
  const double kappa = 2.0 * kPi2 * span.beta2_ps2_per_km() * span.length_km();
  const EfficiencyKernel efficiency = make_kernel(span, model);
  const QuadratureSettings inner_settings = tighter(settings);
  quad::EvalBudget budget{0, settings.max_evals};
  double max_inner_error = 0.0;
  bool inner_exhausted = false;

  // Integrand depends on f1 f2 only; the Fejer kernel peaks at
  // kappa f1 f2 = k pi, which the inner mesh places on breakpoints.
  auto inner = [&](double f2, double upper) {
    if (!(upper > 0.0)) return QuadratureResult{};
    auto integrand = [&](double f1) {
      const double phi = kappa * f1 * f2;
      return efficiency(phi) * specfun::fejer_kernel(n_spans, phi);
    };
    const auto mesh = detail::phase_mesh(upper, kappa * f2);
    try {
      return quad::integrate(integrand, mesh, inner_settings, budget);
    } catch (const QuadratureBudgetError& e) {
      // Shared budget: keep the partial value and let the outer level fail.
      inner_exhausted = true;
      return e.best();
    }
  };

  auto outer_integrand = [&](double f2) {
    QuadratureResult r = inner(f2, half_band);
    if (shape == DomainShape::Lozenge) {
      const QuadratureResult cut = inner(f2, half_band - f2);
      r.value += cut.value;
      r.error += cut.error;
    }
    max_inner_error = std::max(max_inner_error, r.error);
    return r.value;
  };

  // Quarter (square) or half (lozenge) of the domain; both integrands are
  // even in (f1, f2) -> (-f1, -f2) and in f1 alone at fixed f2.
  const double multiplicity = shape == DomainShape::Square ? 4.0 : 2.0;
  const double prefactor = 16.0 / 27.0 * std::pow(span.gamma_per_w_km(), 2) *
                           std::pow(signal.g0_w_per_thz(), 3) * multiplicity;
  const auto outer_mesh = detail::phase_mesh(half_band, kappa * half_band * n_spans);

  auto scale = [&](QuadratureResult r) {
    r.value *= prefactor;
    r.error = prefactor * (r.error + half_band * max_inner_error);
    r.evals = budget.used;
    return r;
  };
  QuadratureResult r;
  try {
    r = scale(quad::integrate(outer_integrand, outer_mesh, settings, budget));
  } catch (const QuadratureBudgetError& e) {
    throw QuadratureBudgetError(e.what(), scale(e.best()));
  }
  if (inner_exhausted) {
    throw QuadratureBudgetError("quadrature: max_evals exhausted in inner integral", r);
  }
  return r;
}

QuadratureResult q1_quadrature(double b, double q, double h, int n_spans,
                               const QuadratureSettings& settings) {
  require_spans(n_spans, 1);
  if (!(b > 0.0) || !std::isfinite(b)) throw ValidationError("b", "must be finite and > 0");
  if (!(q > 0.0) || !std::isfinite(q)) throw ValidationError("q", "must be finite and > 0");
  if (!std::isfinite(h)) throw ValidationError("h", "must be finite");
  settings.validate();
  const double ah = std::abs(h);
  auto integrand = [&](double f) {
    const double hf = ah * f;
    return b * b / (b * b + hf * hf) * specfun::fejer_kernel(n_spans, hf);
  };
  QuadratureResult r = quad::integrate(integrand, detail::phase_mesh(q, ah), settings);
  r.value *= 2.0;
  r.error *= 2.0;
  return r;
}

QuadratureResult g_cc_quadrature(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                                 const QuadratureSettings& settings) {
  require_spans(n_spans, 1);
  settings.validate();
  if (n_spans == 1) return QuadratureResult{};

  const DerivedSpan d = derive_effective_lengths(span);
  const double bw = signal.bandwidth_thz();
  const double beta2 = span.beta2_ps2_per_km();
  const double ls = span.length_km();
  const double y1 = ls / d.l_inf_km;                   // n Ls / L_inf for n = 1
  const double x_rate = 2.0 * kPi2 * beta2 * ls * bw;  // x_n = n * x_rate * |f|
  const double singular_band = 1e-6 * bw;

  auto integrand = [&](double f) {
    double sum = 0.0;
    for (int n = 1; n < n_spans; ++n) {
      const double y = n * y1;
      const double x = n * x_rate * f;
      const double term =
          f < singular_band
              ? bw * specfun::kernel_bracket(y, x)  // removable 0/0 at f = 0
              : specfun::coherence_bracket(y, x) / (4.0 * kPi2 * f * beta2 * d.l_inf_km);
      sum += (n_spans - n) * term;
    }
    return sum;
  };
  const auto mesh = detail::phase_mesh(0.5 * bw, x_rate * (n_spans - 1));
  const double prefactor = 16.0 / 27.0 * std::pow(span.gamma_per_w_km(), 2) *
                           std::pow(signal.g0_w_per_thz(), 3) * d.l_eff_km * d.l_eff_km * 2.0 *
                           2.0;  // 2 sum(...) and the even extension to [-B/2, 0]
  try {
    QuadratureResult r = quad::integrate(integrand, mesh, settings);
    r.value *= prefactor;
    r.error *= prefactor;
    return r;
  } catch (const QuadratureBudgetError& e) {
    QuadratureResult best = e.best();
    best.value *= prefactor;
    best.error *= prefactor;
    throw QuadratureBudgetError(e.what(), best);
  }
}

namespace {

// sin(c f) / (d f) with its limit c/d at f = 0.
double sinc_ratio(double c, double d, double f) {
  const double cf = c * f;
  if (std::abs(cf) < 1e-4) return c / d * (1.0 - cf * cf / 6.0);
  return std::sin(cf) / (d * f);
}

}  // namespace

QuadratureResult sinc_term_quadrature(const SignalSpec& signal, const FiberSpan& span, int n,
                                      const QuadratureSettings& settings) {
  require_spans(n, 1);
  settings.validate();
  const double bw = signal.bandwidth_thz();
  const double d = 2.0 * n * kPi2 * span.beta2_ps2_per_km() * span.length_km();
  const double c = d * bw;
  auto integrand = [&](double f) { return sinc_ratio(c, d, f); };
  QuadratureResult r = quad::integrate(integrand, detail::phase_mesh(0.5 * bw, c), settings);
  r.value *= 2.0;
  r.error *= 2.0;
  return r;
}

QuadratureResult g_cc_sinc_quadrature(const SignalSpec& signal, const FiberSpan& span,
                                      int n_spans, const QuadratureSettings& settings) {
  require_spans(n_spans, 1);
  settings.validate();
  if (n_spans == 1) return QuadratureResult{};
  const DerivedSpan dspan = derive_effective_lengths(span);
  const double bw = signal.bandwidth_thz();
  const double d1 = 2.0 * kPi2 * span.beta2_ps2_per_km() * span.length_km();
  auto integrand = [&](double f) {
    double sum = 0.0;
    for (int n = 1; n < n_spans; ++n) {
      sum += (n_spans - n) * sinc_ratio(n * d1 * bw, n * d1, f);
    }
    return sum;
  };
  const auto mesh = detail::phase_mesh(0.5 * bw, d1 * bw * (n_spans - 1));
  const double prefactor = 16.0 / 27.0 * std::pow(span.gamma_per_w_km(), 2) *
                           std::pow(signal.g0_w_per_thz(), 3) * dspan.l_eff_km *
                           dspan.l_eff_km * 2.0 * 2.0;
  try {
    QuadratureResult r = quad::integrate(integrand, mesh, settings);
    r.value *= prefactor;
    r.error *= prefactor;
    return r;
  } catch (const QuadratureBudgetError& e) {
    QuadratureResult best = e.best();
    best.value *= prefactor;
    best.error *= prefactor;
    throw QuadratureBudgetError(e.what(), best);
  }
}

}  // namespace nli::oracle
