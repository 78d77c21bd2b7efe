#include "nli/closed_form.hpp"

#include "mesh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nli::closed_form {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
constexpr double kHalfPi = kPi / 2.0;

void require_spans(int n_spans) {
  if (n_spans < 1) throw ValidationError("n_spans", "must be >= 1");
}

// (8/27) gamma^2 G0^3 L_eff^2 / (pi^2 b2): the prefactor every closed form shares.
double common_prefactor(const SignalSpec& signal, const FiberSpan& span) {
  const DerivedSpan d = derive_effective_lengths(span);
  return 8.0 / 27.0 * std::pow(span.gamma_per_w_km(), 2) * std::pow(signal.g0_w_per_thz(), 3) *
         d.l_eff_km * d.l_eff_km / (kPi2 * span.beta2_ps2_per_km());
}

// N [(1 - N)/N + H(N-1)], the harmonic form of sum_{n<N} (N/n - 1). Every
// plateaued path goes through this one expression so they agree bit for bit.
double harmonic_weight(int n_total) {
  const double n = static_cast<double>(n_total);
  return n * ((1.0 - n) / n + specfun::harnum(n_total - 1));
}

// One span's share of the summation-free correction, harmonic bracket on the
// link's total span count.
double per_span_correction(const FiberSpan& span, const SignalSpec& signal, int n_total,
                           SiMode mode) {
  const double x = dispersion_argument(span, signal);
  const double si = mode == SiMode::SiApp ? specfun::si_app(x) : specfun::sin_int(x);
  const double bracket =
      (1.0 - static_cast<double>(n_total)) / n_total + specfun::harnum(n_total - 1);
  return common_prefactor(signal, span) * (4.0 / span.length_km()) * si * bracket;
}

}  // namespace

Q1Params::Q1Params(double b, double q, double h, int n_spans)
    : b_(b), q_(q), h_(h), n_spans_(n_spans) {
  if (!(b > 0.0) || !std::isfinite(b)) throw ValidationError("b", "must be finite and > 0");
  if (!(q > 0.0) || !std::isfinite(q)) throw ValidationError("q", "must be finite and > 0");
  if (!std::isfinite(h)) throw ValidationError("h", "must be finite");
  require_spans(n_spans);
}

Q1Params Q1Params::from_physical(const FiberSpan& span, const SignalSpec& signal, double f2_thz,
                                 int n_spans) {
  const DerivedSpan d = derive_effective_lengths(span);
  return Q1Params(span.length_km() / (2.0 * d.l_inf_km), 0.5 * signal.bandwidth_thz(),
                  2.0 * kPi2 * f2_thz * span.beta2_ps2_per_km() * span.length_km(), n_spans);
}

double cos_lorentzian_integral(const Q1Params& p, int n) {
  if (n < 1 || n >= p.n_spans()) {
    throw std::domain_error("cos_lorentzian_integral: need 1 <= n < n_spans");
  }
  // (b/|h|) * bracket(2nb, 2n|h|q) = 2q * kernel(2nb, 2n|h|q)
  const double y = 2.0 * n * p.b();
  const double x = 2.0 * n * std::abs(p.h()) * p.q();
  return 2.0 * p.q() * specfun::kernel_bracket(y, x);
}

double cos_lorentzian_integral_ei(const Q1Params& p, int n) {
  if (n < 1) throw std::domain_error("cos_lorentzian_integral_ei: n must be >= 1");
  const double ah = std::abs(p.h());
  if (ah == 0.0) throw std::domain_error("cos_lorentzian_integral_ei: h must be nonzero");
  const double y = 2.0 * n * p.b();
  const double x = 2.0 * n * ah * p.q();
  const double grow = std::exp(y);
  const double decay = std::exp(-y);
  const double bracket = -grow * specfun::ei_complex({-y, x}).imag() -
                         decay * specfun::ei_complex({y, -x}).imag() + kPi * grow;
  return p.b() / ah * bracket;
}

double cos_lorentzian_integral_cisi(const Q1Params& p, int n) {
  if (n < 1) throw std::domain_error("cos_lorentzian_integral_cisi: n must be >= 1");
  const double h = p.h();
  if (h == 0.0) throw std::domain_error("cos_lorentzian_integral_cisi: h must be nonzero");
  const double b = p.b();
  const double two_n = 2.0 * n;
  const specfun::complex j{0.0, 1.0};
  const specfun::complex ci_plus = specfun::cos_int_complex({two_n * h * p.q(), two_n * b});
  const specfun::complex ci_minus = specfun::cos_int_complex({two_n * h * p.q(), -two_n * b});
  const specfun::complex si_a = specfun::sin_int_complex({-two_n * h * p.q(), two_n * b});
  const specfun::complex si_b = specfun::sin_int_complex({two_n * h * p.q(), two_n * b});
  const specfun::complex braces = std::cosh(two_n * b) * (j * ci_plus - j * ci_minus + kPi) +
                                  std::sinh(two_n * b) * (si_a - si_b);
  return (b / h * braces).real();
}

double q1_closed(const Q1Params& p) {
  const double u = std::abs(p.h()) * p.q() / p.b();
  // (2 b N / |h|) atan(|h| q / b) written as 2 q N atan(u)/u
  const double atan_ratio = u < 1e-8 ? 1.0 - u * u / 3.0 : std::atan(u) / u;
  double coherent = 0.0;
  for (int n = 1; n < p.n_spans(); ++n) {
    coherent += (p.n_spans() - n) * cos_lorentzian_integral(p, n);
  }
  return 2.0 * p.q() * p.n_spans() * atan_ratio + 2.0 * coherent;
}

double dispersion_argument(const FiberSpan& span, const SignalSpec& signal) {
  return kPi2 * span.beta2_ps2_per_km() * span.length_km() * std::pow(signal.bandwidth_thz(), 2);
}

double coherence_weight_sum(int n_spans) {
  require_spans(n_spans);
  double sum = 0.0;
  for (int n = 1; n < n_spans; ++n) sum += static_cast<double>(n_spans) / n - 1.0;
  return sum;
}

double g_inc_closed(const SignalSpec& signal, const FiberSpan& span, int n_spans) {
  require_spans(n_spans);
  const DerivedSpan d = derive_effective_lengths(span);
  const double x = kPi2 * span.beta2_ps2_per_km() * d.l_inf_km * std::pow(signal.bandwidth_thz(), 2);
  return n_spans * (8.0 / 27.0) * std::pow(span.gamma_per_w_km(), 2) *
         std::pow(signal.g0_w_per_thz(), 3) * d.l_eff_km * d.l_eff_km *
         specfun::li2_imag_combo(x) / (kPi2 * span.beta2_ps2_per_km() * d.l_inf_km);
}

double g_inc_approx(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                    specfun::Li2Approx variant) {
  require_spans(n_spans);
  const DerivedSpan d = derive_effective_lengths(span);
  const double x = kPi2 * span.beta2_ps2_per_km() * d.l_inf_km * std::pow(signal.bandwidth_thz(), 2);
  return n_spans * (8.0 / 27.0) * std::pow(span.gamma_per_w_km(), 2) *
         std::pow(signal.g0_w_per_thz(), 3) * d.l_eff_km * d.l_eff_km *
         specfun::li2_combo_approx(x, variant) / (kPi2 * span.beta2_ps2_per_km() * d.l_inf_km);
}

double g_cc_sinint(const SignalSpec& signal, const FiberSpan& span, int n_spans) {
  require_spans(n_spans);
  const double x = dispersion_argument(span, signal);
  double sum = 0.0;
  for (int n = 1; n < n_spans; ++n) {
    sum += (static_cast<double>(n_spans) / n - 1.0) * specfun::sin_int(n * x);
  }
  return common_prefactor(signal, span) * (4.0 / span.length_km()) * sum;
}

double g_cc_siapp(const SignalSpec& signal, const FiberSpan& span, int n_spans) {
  require_spans(n_spans);
  const double x = dispersion_argument(span, signal);
  const double scale = common_prefactor(signal, span) * (4.0 / span.length_km());
  if (x >= kHalfPi) return scale * kHalfPi * harmonic_weight(n_spans);
  double linear = 0.0;
  double plateau_weight = 0.0;
  for (int n = 1; n < n_spans; ++n) {
    const double weight = static_cast<double>(n_spans) / n - 1.0;
    const double arg = n * x;
    if (arg < kHalfPi) {
      linear += weight * specfun::si_app(arg);
    } else {
      plateau_weight += weight;
    }
  }
  return scale * (linear + kHalfPi * plateau_weight);
}

double g_cc_plateau(const SignalSpec& signal, const FiberSpan& span, int n_spans) {
  require_spans(n_spans);
  const double scale = common_prefactor(signal, span) * (4.0 / span.length_km());
  return scale * kHalfPi * harmonic_weight(n_spans);
}

double g_cc_lower_bound(const SignalSpec& signal, const FiberSpan& span, int n_spans) {
  require_spans(n_spans);
  const double x = dispersion_argument(span, signal);
  const double scale = common_prefactor(signal, span) * (4.0 / span.length_km());
  return scale * specfun::si_app(x) * harmonic_weight(n_spans);
}

double g_cc_heterogeneous(const LinkConfig& link, const SignalSpec& signal, SiMode mode) {
  const int n_total = link.n_spans();
  double sum = 0.0;
  for (const FiberSpan& span : link.spans()) {
    sum += per_span_correction(span, signal, n_total, mode);
  }
  return sum;
}

QuadratureResult g_cc_exact_series(const SignalSpec& signal, const FiberSpan& span,
                                   int n_spans, const QuadratureSettings& settings) {
  require_spans(n_spans);
  settings.validate();
  if (n_spans == 1) return QuadratureResult{};
  const DerivedSpan d = derive_effective_lengths(span);
  auto integrand = [&](double f2) {
    const Q1Params p = Q1Params::from_physical(span, signal, f2, n_spans);
    double sum = 0.0;
    for (int n = 1; n < n_spans; ++n) sum += (n_spans - n) * cos_lorentzian_integral(p, n);
    return 2.0 * sum;
  };
  const double x_rate =
      2.0 * kPi2 * span.beta2_ps2_per_km() * span.length_km() * signal.bandwidth_thz();
  const auto mesh = detail::phase_mesh(0.5 * signal.bandwidth_thz(), x_rate * (n_spans - 1));
  const double prefactor = 16.0 / 27.0 * std::pow(span.gamma_per_w_km(), 2) *
                           std::pow(signal.g0_w_per_thz(), 3) * d.l_eff_km * d.l_eff_km * 2.0;
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

NliEstimate g_nli_total(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                        CcMethod method, const QuadratureSettings& settings) {
  require_spans(n_spans);
  NliEstimate est;
  est.method = to_method(method);
  est.g_inc_w_per_thz = g_inc_closed(signal, span, n_spans);
  switch (method) {
    case CcMethod::ExactSeries: {
      const QuadratureResult r = g_cc_exact_series(signal, span, n_spans, settings);
      est.g_cc_w_per_thz = r.value;
      est.quad_error = r.error;
      break;
    }
    case CcMethod::SinInt: est.g_cc_w_per_thz = g_cc_sinint(signal, span, n_spans); break;
    case CcMethod::SiApp: est.g_cc_w_per_thz = g_cc_siapp(signal, span, n_spans); break;
    case CcMethod::Plateau:
      est.g_cc_w_per_thz = g_cc_plateau(signal, span, n_spans);
      if (dispersion_argument(span, signal) < kHalfPi) {
        add_warning(est.warnings, Warning::PlateauInvalid);
      }
      break;
    case CcMethod::LowerBound: est.g_cc_w_per_thz = g_cc_lower_bound(signal, span, n_spans); break;
  }
  if (span_loss_db(span) < kLowSpanLossThresholdDb) {
    add_warning(est.warnings, Warning::LowSpanLoss);
  }
  return est;
}

Method to_method(CcMethod m) noexcept {
  switch (m) {
    case CcMethod::ExactSeries: return Method::ExactSeries;
    case CcMethod::SinInt: return Method::SinInt;
    case CcMethod::SiApp: return Method::SiApp;
    case CcMethod::Plateau: return Method::Plateau;
    case CcMethod::LowerBound: return Method::LowerBound;
  }
  return Method::SinInt;
}

}  // namespace nli::closed_form
