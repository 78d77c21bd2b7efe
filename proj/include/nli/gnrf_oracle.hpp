#pragma once

#include "nli/link_model.hpp"
#include "nli/quadrature.hpp"

// Numerical ground truth for the NLI PSD at f = 0 of a rectangular spectrum.
// Every routine returns the integral together with its achieved error
// estimate and the number of integrand evaluations.

namespace nli::oracle {

enum class DomainShape {
  Lozenge,  // |f1|, |f2|, |f1 + f2| <= B/2
  Square,   // |f1|, |f2| <= B/2
};

enum class EfficiencyModel {
  Exact,       // full single-span FWM efficiency
  Lorentzian,  // large-loss form L_eff^2 / (1 + 16 pi^4 (2a)^-2 b2^2 f1^2 f2^2)
};

/// The 2-D oracle refuses links longer than this; cost grows like N_s^2.
inline constexpr int kMaxOracleSpans = 20;

/// FWM efficiency of one span [km^2] at (f1, f2) with f = 0.
double fwm_efficiency(double f1_thz, double f2_thz, const FiberSpan& span,
                      EfficiencyModel model);

/// (16/27) gamma^2 G0^3 times the double integral of efficiency x Fejer kernel
/// over the chosen domain [W/THz].
QuadratureResult g_nli_2d(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                          DomainShape shape, EfficiencyModel model,
                          const QuadratureSettings& settings = {});

/// int_{-q}^{q} b^2/(b^2 + h^2 f^2) * sin^2(h N f)/sin^2(h f) df.
QuadratureResult q1_quadrature(double b, double q, double h, int n_spans,
                               const QuadratureSettings& settings = {});

/// Coherence correction from the Ei-bracket integrand, integrated over f2.
/// Exactly zero for a single span.
QuadratureResult g_cc_quadrature(const SignalSpec& signal, const FiberSpan& span, int n_spans,
                                 const QuadratureSettings& settings = {});

/// Coherence correction with the bracket replaced by its large-loss sinc
/// limit, integrated numerically.
QuadratureResult g_cc_sinc_quadrature(const SignalSpec& signal, const FiberSpan& span,
                                      int n_spans, const QuadratureSettings& settings = {});

/// One term of the sinc form:
///   int_{-B/2}^{B/2} sin(2 n pi^2 b2 Ls B f) / (2 n pi^2 b2 Ls f) df   [THz/...]
QuadratureResult sinc_term_quadrature(const SignalSpec& signal, const FiberSpan& span, int n,
                                      const QuadratureSettings& settings = {});

}  // namespace nli::oracle
