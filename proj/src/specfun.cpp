#include "nli/specfun.hpp"

#include <boost/math/special_functions/bernoulli.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nli::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Crossover radii for E1. Inside kSeriesRadius the Taylor series is used
// everywhere; in the left half-plane it is also used while |z| + Re z stays
// below kSeriesLeftExcess (loss of at most e^6 in relative accuracy), which
// covers the slowly convergent neighbourhood of the cut. Beyond
// kAsymptoticRadius the asymptotic series reaches full double precision.
constexpr double kSeriesRadius = 2.0;
constexpr double kSeriesLeftExcess = 6.0;
constexpr double kAsymptoticRadius = 40.0;
constexpr int kMaxContinuedFractionTerms = 20000;

void require_finite(complex z, const char* who) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::domain_error(std::string(who) + ": argument must be finite");
  }
}

// E1(z) from its convergent power series, unscaled.
complex e1_series(complex z) {
  complex sum{0.0, 0.0};
  complex term{1.0, 0.0};
  for (int k = 1; k < 500; ++k) {
    term *= -z / static_cast<double>(k);
    const complex contrib = term / static_cast<double>(k);
    sum += contrib;
    if (std::abs(contrib) <= kEps * std::abs(sum) && k > std::abs(z)) break;
  }
  return -kEulerGamma - std::log(z) - sum;
}

// e^z E1(z) by modified Lentz on 1/(z+1- 1/(z+3- 4/(z+5- ...))).
complex e1_scaled_cf(complex z) {
  constexpr double tiny = 1e-300;
  complex b = z + 1.0;
  complex c = 1.0 / tiny;
  complex d = 1.0 / b;
  complex h = d;
  for (int i = 1; i <= kMaxContinuedFractionTerms; ++i) {
    const double an = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const complex del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw std::runtime_error("expint_e1: continued fraction failed to converge");
}

// e^z E1(z) ~ sum_k (-1)^k k! / z^{k+1}, truncated at the smallest term.
complex e1_scaled_asymptotic(complex z) {
  complex term = 1.0 / z;
  complex sum = term;
  for (int k = 1; k < 200; ++k) {
    const complex next = term * (-static_cast<double>(k) / z);
    if (std::abs(next) >= std::abs(term)) break;
    sum += next;
    term = next;
    if (std::abs(term) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

bool use_series(complex z) {
  const double r = std::abs(z);
  if (r <= kSeriesRadius) return true;
  return z.real() < 0.0 && r + z.real() <= kSeriesLeftExcess;
}

// Upper half-plane (Im z >= +0) only.
complex e1_scaled_upper(complex z) {
  if (std::abs(z) >= kAsymptoticRadius) return e1_scaled_asymptotic(z);
  if (use_series(z)) return std::exp(z) * e1_series(z);
  return e1_scaled_cf(z);
}

complex e1_upper(complex z) {
  if (std::abs(z) < kAsymptoticRadius && use_series(z)) return e1_series(z);
  return std::exp(-z) * e1_scaled_upper(z);
}

bool lower_half(complex z) { return std::signbit(z.imag()); }

complex e1_checked(complex z, const char* who) {
  require_finite(z, who);
  if (z == complex{0.0, 0.0}) {
    throw std::domain_error(std::string(who) + ": singular at z = 0");
  }
  if (lower_half(z)) return std::conj(e1_upper(std::conj(z)));
  return e1_upper(z);
}

// sum (-1)^k z^{2k+1} / ((2k+1)(2k+1)!)
complex si_series(complex z) {
  const complex z2 = z * z;
  complex term = z;
  complex sum = z;
  for (int k = 1; k < 200; ++k) {
    term *= -z2 / static_cast<double>((2 * k) * (2 * k + 1));
    const complex contrib = term / static_cast<double>(2 * k + 1);
    sum += contrib;
    if (std::abs(contrib) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

// sum_{k>=1} (-1)^k z^{2k} / (2k (2k)!)
complex cin_series(complex z) {
  const complex z2 = z * z;
  complex term{1.0, 0.0};
  complex sum{0.0, 0.0};
  for (int k = 1; k < 200; ++k) {
    term *= -z2 / static_cast<double>((2 * k - 1) * (2 * k));
    const complex contrib = term / static_cast<double>(2 * k);
    sum += contrib;
    if (std::abs(contrib) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

// Li2(z) for |z| <= 1 through the Bernoulli expansion in u = -ln(1 - z).
complex li2_unit_disk(complex z) {
  const complex u = -std::log(1.0 - z);
  const complex u2 = u * u;
  complex sum = u - 0.25 * u2;
  complex power = u;  // u^{2m+1} / (2m+1)!
  for (int m = 1; m < 60; ++m) {
    power *= u2 / static_cast<double>((2 * m) * (2 * m + 1));
    const complex contrib = boost::math::bernoulli_b2n<double>(m) * power;
    sum += contrib;
    if (std::abs(contrib) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

double kernel_small_x(double y, double ax) {
  // (y^2/x) int_0^x cos(s)/(y^2+s^2) ds
  //   = sum_k (-1)^k x^{2k} / (2k+1) * sum_{i<=k} y^{-2(k-i)} / (2i)!
  const double inv_y2 = 1.0 / (y * y);
  const double x2 = ax * ax;
  double inner = 1.0;      // S_k
  double inv_fact = 1.0;   // 1/(2k)!
  double xpow = 1.0;       // (-x^2)^k
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    inv_fact /= static_cast<double>((2 * k - 1) * (2 * k));
    inner = inner * inv_y2 + inv_fact;
    xpow *= -x2;
    const double contrib = xpow * inner / static_cast<double>(2 * k + 1);
    sum += contrib;
    if (std::abs(contrib) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double fejer_series(int n_spans, double x) {
  if (n_spans < 1) throw std::domain_error("fejer_series: n_spans must be >= 1");
  double sum = 0.0;
  for (int n = n_spans - 1; n >= 1; --n) {
    sum += static_cast<double>(n_spans - n) * std::cos(2.0 * n * x);
  }
  return static_cast<double>(n_spans) + 2.0 * sum;
}

double fejer_kernel(int n_spans, double x) {
  if (n_spans < 1) throw std::domain_error("fejer_kernel: n_spans must be >= 1");
  if (n_spans == 1) return 1.0;
  // Period pi: reduce to the nearest peak.
  const double k = std::nearbyint(x / kPi);
  const double d = x - k * kPi;
  if (std::abs(d) < 1e-6) return fejer_series(n_spans, d);
  const double ratio = std::sin(n_spans * d) / std::sin(d);
  return ratio * ratio;
}

double sin_int(double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) throw std::domain_error("sin_int: NaN argument");
    return std::copysign(kHalfPi, x);
  }
  const double ax = std::abs(x);
  double value;
  if (ax <= 4.0) {
    value = si_series(complex{ax, 0.0}).real();
  } else {
    value = kHalfPi + e1_upper(complex{0.0, ax}).imag();
  }
  return std::copysign(value, x);
}

double si_app(double x) {
  if (!(x >= 0.0)) throw std::domain_error("si_app: argument must be >= 0");
  return x < kHalfPi ? x : kHalfPi;
}

complex expint_e1(complex z) { return e1_checked(z, "expint_e1"); }

complex expint_e1_scaled(complex z) {
  require_finite(z, "expint_e1_scaled");
  if (z == complex{0.0, 0.0}) throw std::domain_error("expint_e1_scaled: singular at z = 0");
  if (lower_half(z)) return std::conj(e1_scaled_upper(std::conj(z)));
  return e1_scaled_upper(z);
}

complex ei_complex(complex z) {
  require_finite(z, "ei_complex");
  if (z == complex{0.0, 0.0}) throw std::domain_error("ei_complex: singular at z = 0");
  if (z.imag() == 0.0) {
    // Positive axis: principal value, the i*pi from the E1 cut drops out.
    // Negative axis: -E1(|x|), real.
    return complex{-e1_upper(complex{-z.real(), 0.0}).real(), 0.0};
  }
  if (z.imag() < 0.0) return std::conj(ei_complex(std::conj(z)));
  // -z lies in the lower half-plane.
  const complex e1_minus_z = std::conj(e1_upper(std::conj(-z)));
  return -e1_minus_z + complex{0.0, kPi};
}

complex sin_int_complex(complex z) {
  require_finite(z, "sin_int_complex");
  if (std::abs(z) <= 4.0 || z.real() == 0.0) return si_series(z);
  if (z.real() < 0.0) return -sin_int_complex(-z);
  const complex jz{-z.imag(), z.real()};
  return kHalfPi + (e1_checked(jz, "sin_int_complex") - e1_checked(-jz, "sin_int_complex")) /
                       complex{0.0, 2.0};
}

complex cos_int_complex(complex z) {
  require_finite(z, "cos_int_complex");
  if (z == complex{0.0, 0.0}) throw std::domain_error("cos_int_complex: singular at z = 0");
  if (std::abs(z) <= 4.0 || z.real() == 0.0) {
    return kEulerGamma + std::log(z) + cin_series(z);
  }
  if (z.real() < 0.0) {
    // Ci(z) - Ci(-z) = ln z - ln(-z) since gamma + ln z - Ci(z) is even.
    return cos_int_complex(-z) + (std::log(z) - std::log(-z));
  }
  const complex jz{-z.imag(), z.real()};
  return -0.5 * (e1_checked(jz, "cos_int_complex") + e1_checked(-jz, "cos_int_complex"));
}

double coherence_bracket(double y, double x) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw std::domain_error("coherence_bracket: y must be finite and > 0");
  }
  if (!std::isfinite(x)) throw std::domain_error("coherence_bracket: x must be finite");
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  // With the Ei cut on the negative real axis the two pi*e^y contributions
  // cancel analytically, leaving
  //   Im[e^{jx} g(y - jx)] + Im[e^{-jx} g(-y + jx)] + pi e^{-y},   g = e^w E1(w).
  const complex rot{std::cos(ax), std::sin(ax)};
  const complex g_right = expint_e1_scaled(complex{y, -ax});
  const complex g_left = expint_e1_scaled(complex{-y, ax});
  return (rot * g_right).imag() + (std::conj(rot) * g_left).imag() + kPi * std::exp(-y);
}

double kernel_bracket(double y, double x) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw std::domain_error("kernel_bracket: y must be finite and > 0");
  }
  if (!std::isfinite(x)) throw std::domain_error("kernel_bracket: x must be finite");
  const double ax = std::abs(x);
  if (ax < 0.05 * std::min(1.0, y)) return kernel_small_x(y, ax);
  return y / (2.0 * ax) * coherence_bracket(y, ax);
}

double li2_imag_combo(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::domain_error("li2_imag_combo: x must be finite and >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x <= 1.0) return 2.0 * li2_unit_disk(complex{0.0, x}).imag();
  // Inverse tangent integral reflection: Ti2(x) = Ti2(1/x) + (pi/2) ln x.
  return 2.0 * li2_unit_disk(complex{0.0, 1.0 / x}).imag() + kPi * std::log(x);
}

double li2_combo_approx(double x, Li2Approx variant) {
  if (!(x >= 0.0)) throw std::domain_error("li2_combo_approx: x must be >= 0");
  switch (variant) {
    case Li2Approx::Asinh: return kPi * std::asinh(0.5 * x);
    case Li2Approx::Log: return kPi * std::log1p(x);
  }
  return 0.0;
}

double harnum(long long m) {
  if (m < 0) throw std::domain_error("harnum: m must be >= 0");
  double sum = 0.0;
  for (long long k = m; k >= 1; --k) sum += 1.0 / static_cast<double>(k);
  return sum;
}

double harnum_log_approx(long long m) {
  if (m < 1) throw std::domain_error("harnum_log_approx: m must be >= 1");
  return std::log(static_cast<double>(m)) + kEulerGamma;
}

}  // namespace nli::specfun
