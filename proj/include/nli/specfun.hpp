#pragma once

#include <complex>
#include <numbers>

// Special-function kernels used by the closed forms and the oracles.
//
// Branch conventions:
//   E1(z)  principal branch, cut along the negative real axis. On the cut the
//          side is chosen by the sign of the imaginary zero (+0 -> upper).
//   Ei(z)  cut along the negative real axis as well; Ei(z) = -E1(-z) + i*pi*sgn(Im z)
//          off the real axis, real-valued on both halves of the real axis
//          (principal value on the positive half). Ei(conj z) == conj(Ei(z))
//          holds bit-exactly because the upper half-plane is evaluated and the
//          lower half-plane is reflected.

namespace nli::specfun {

using complex = std::complex<double>;

inline constexpr double kEulerGamma = std::numbers::egamma_v<double>;

/// sin^2(N x) / sin^2(x), with the value N^2 at x = k*pi.
double fejer_kernel(int n_spans, double x);

/// N + 2 sum_{n=1}^{N-1} (N - n) cos(2 n x). Exact everywhere, O(N).
double fejer_series(int n_spans, double x);

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
double sin_int(double x);

/// Piecewise-linear sine-integral surrogate: x below pi/2, pi/2 above.
/// Throws std::domain_error for negative x.
double si_app(double x);

/// Exponential integral E1(z). Throws std::domain_error at z = 0 or for
/// non-finite input. Overflows to infinity for Re z < -709.
complex expint_e1(complex z);

/// exp(z) * E1(z); finite for every nonzero finite z.
complex expint_e1_scaled(complex z);

/// Exponential integral Ei(z); see the branch notes above.
complex ei_complex(complex z);

/// Complex sine integral (entire).
complex sin_int_complex(complex z);

/// Complex cosine integral, principal branch with cut on the negative real
/// axis (Ci(-z) = Ci(z) + i*pi for Im z > 0).
complex cos_int_complex(complex z);

/// Raw bracket
///   -e^y Im Ei(-y + j|x|) - e^{-y} Im Ei(y - j|x|) + pi e^y
/// evaluated in scaled form so that no e^y is ever formed. y > 0.
double coherence_bracket(double y, double x);

/// (y / 2|x|) * coherence_bracket(y, x). Tends to sin(x)/x as y grows and
/// equals 1 at x = 0. Even in x. Throws std::domain_error unless y > 0.
///
/// Identity used for the small-|x| series and by the tests:
///   kernel_bracket(y, x) = (y^2 / x) int_0^x cos(s) / (y^2 + s^2) ds.
double kernel_bracket(double y, double x);

/// j [Li2(-j x) - Li2(j x)] = 2 Im Li2(j x) for x >= 0.
double li2_imag_combo(double x);

enum class Li2Approx { Asinh, Log };

/// pi asinh(x/2) or pi ln(1 + x).
double li2_combo_approx(double x, Li2Approx variant);

/// Exact harmonic number sum_{k=1}^{m} 1/k (0 for m = 0).
double harnum(long long m);

/// ln(m) + Euler's constant; m >= 1.
double harnum_log_approx(long long m);

}  // namespace nli::specfun
