#pragma once

#include "nli/link_model.hpp"
#include "nli/quadrature.hpp"
#include "nli/specfun.hpp"

// Analytic NLI results for a rectangular spectrum at f = 0: the exact inner
// (f1) integral, the incoherent dilogarithm term, and the ladder of
// coherence-correction approximations down to the summation-free lower bound.

namespace nli::closed_form {

/// Normalised inner-integral parameters:
///   b = Ls / (2 L_inf), q = B / 2 [THz], h = 2 pi^2 f2 b2 Ls [1/THz].
class Q1Params {
 public:
  Q1Params(double b, double q, double h, int n_spans);

  /// Builds the parameters of the inner integral at outer frequency f2.
  static Q1Params from_physical(const FiberSpan& span, const SignalSpec& signal, double f2_thz,
                                int n_spans);

  double b() const noexcept { return b_; }
  double q() const noexcept { return q_; }
  double h() const noexcept { return h_; }
  int n_spans() const noexcept { return n_spans_; }

 private:
  double b_;
  double q_;
  double h_;
  int n_spans_;
};

enum class CcMethod { ExactSeries, SinInt, SiApp, Plateau, LowerBound };

enum class SiMode { SiApp, SinInt };

/// int_{-q}^{q} b^2 cos(2 n h f) / (b^2 + h^2 f^2) df for 1 <= n < N_s.
/// Production route: scaled exponential integrals, no e^{2nb} is formed.
double cos_lorentzian_integral(const Q1Params& p, int n);

/// Same integral from the literal Ei expression
///   (b/|h|)[-e^{2nb} Im Ei(-2n[b - j|h|q]) - e^{-2nb} Im Ei(2n[b - j|h|q]) + pi e^{2nb}].
/// Loses about e^{2nb} in relative accuracy; meant for cross-checks.
double cos_lorentzian_integral_ei(const Q1Params& p, int n);

/// Same integral from the cosine/sine-integral expression, valid for either
/// sign of h (h != 0). Cross-check route, ill-conditioned for large 2nb.
double cos_lorentzian_integral_cisi(const Q1Params& p, int n);

/// Exact inner integral of the Lorentzian x Fejer-kernel integrand.
double q1_closed(const Q1Params& p);

/// pi^2 b2 Ls B^2, the argument of the sine-integral terms.
double dispersion_argument(const FiberSpan& span, const SignalSpec& signal);

/// sum_{n=1}^{N-1} (N/n - 1), accumulated term by term.
double coherence_weight_sum(int n_spans);

double g_inc_closed(const SignalSpec& signal, const FiberSpan& span, int n_spans);
double g_inc_approx(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                    specfun::Li2Approx variant);

double g_cc_sinint(const SignalSpec& signal, const FiberSpan& span, int n_spans);
double g_cc_siapp(const SignalSpec& signal, const FiberSpan& span, int n_spans);
double g_cc_plateau(const SignalSpec& signal, const FiberSpan& span, int n_spans);
double g_cc_lower_bound(const SignalSpec& signal, const FiberSpan& span, int n_spans);

/// Per-span coherence correction summed over a possibly heterogeneous link.
/// The harmonic bracket uses the link's total span count.
double g_cc_heterogeneous(const LinkConfig& link, const SignalSpec& signal, SiMode mode);

/// Coherence correction with the f1 integral done analytically and the f2
/// integral numerically. The most accurate method short of the 2-D oracle.
QuadratureResult g_cc_exact_series(const SignalSpec& signal, const FiberSpan& span,
                                   int n_spans, const QuadratureSettings& settings = {});

/// Incoherent term plus the selected coherence correction. Attaches
/// LowSpanLoss for spans under 10 dB and PlateauInvalid when the plateau form
/// is used below its validity threshold.
NliEstimate g_nli_total(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                        CcMethod method, const QuadratureSettings& settings = {});

Method to_method(CcMethod m) noexcept;

}  // namespace nli::closed_form
