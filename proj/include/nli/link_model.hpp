#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nli {

/// Thrown when a physical parameter violates its domain. `field()` names the
/// offending input so callers can report it verbatim.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// One fiber span in canonical units (km, 1/km, ps^2/km, 1/(W km)).
///
/// `loss_coeff_per_km` is the *power* loss coefficient: launch power decays as
/// exp(-loss_coeff_per_km * length_km). `beta2_ps2_per_km` is the magnitude of
/// the group-velocity dispersion and must be strictly positive.
class FiberSpan {
 public:
  struct Params {
    double length_km = 0.0;
    double loss_coeff_per_km = 0.0;
    double beta2_ps2_per_km = 0.0;
    double gamma_per_w_km = 0.0;
  };

  explicit FiberSpan(const Params& p);

  double length_km() const noexcept { return p_.length_km; }
  double loss_coeff_per_km() const noexcept { return p_.loss_coeff_per_km; }
  double beta2_ps2_per_km() const noexcept { return p_.beta2_ps2_per_km; }
  double gamma_per_w_km() const noexcept { return p_.gamma_per_w_km; }
  const Params& params() const noexcept { return p_; }

  friend bool operator==(const FiberSpan& a, const FiberSpan& b) noexcept {
    return a.p_.length_km == b.p_.length_km &&
           a.p_.loss_coeff_per_km == b.p_.loss_coeff_per_km &&
           a.p_.beta2_ps2_per_km == b.p_.beta2_ps2_per_km &&
           a.p_.gamma_per_w_km == b.p_.gamma_per_w_km;
  }

 private:
  Params p_;
};

struct DerivedSpan {
  double l_eff_km;  // (1 - exp(-loss * length)) / loss
  double l_inf_km;  // 1 / loss
};

DerivedSpan derive_effective_lengths(const FiberSpan& span);

/// 10 log10(exp(loss * length)).
double span_loss_db(const FiberSpan& span);

/// Spans weaker than this are outside the large-loss regime the Lorentzian
/// efficiency relies on; results get a LowSpanLoss warning.
inline constexpr double kLowSpanLossThresholdDb = 10.0;

/// Conversion used at the configuration boundary only.
double loss_coeff_from_db_per_km(double alpha_db_per_km);

/// Rectangular spectrum of flat level g0 over [-B/2, B/2].
class SignalSpec {
 public:
  SignalSpec(double g0_w_per_thz, double bandwidth_thz);

  double g0_w_per_thz() const noexcept { return g0_; }
  double bandwidth_thz() const noexcept { return bandwidth_; }

 private:
  double g0_;
  double bandwidth_;
};

class LinkConfig {
 public:
  static LinkConfig homogeneous(const FiberSpan& span, int n_spans);
  static LinkConfig heterogeneous(std::vector<FiberSpan> spans);

  const std::vector<FiberSpan>& spans() const noexcept { return spans_; }
  int n_spans() const noexcept { return static_cast<int>(spans_.size()); }
  bool is_homogeneous() const noexcept;

 private:
  explicit LinkConfig(std::vector<FiberSpan> spans) : spans_(std::move(spans)) {}
  std::vector<FiberSpan> spans_;
};

enum class Method {
  OracleLozengeExact,
  OracleSquare,
  ExactSeries,
  SinInt,
  SiApp,
  Plateau,
  LowerBound,
  Heterogeneous,
};

std::string_view to_string(Method m) noexcept;
/// Parses the kebab-case tag; throws ValidationError on unknown tags.
Method method_from_string(std::string_view tag);

enum class Warning {
  LowSpanLoss,
  PlateauInvalid,
  RolloffHigh,
  QuadBudgetExhausted,
};

std::string_view to_string(Warning w) noexcept;

/// NLI PSD at the center frequency, split into the incoherent part and the
/// coherence correction.
struct NliEstimate {
  double g_inc_w_per_thz = 0.0;
  double g_cc_w_per_thz = 0.0;
  Method method = Method::SinInt;
  std::vector<Warning> warnings;
  double quad_error = 0.0;  // absolute error estimate, 0 for closed forms

  double total_w_per_thz() const noexcept { return g_inc_w_per_thz + g_cc_w_per_thz; }
  bool has_warning(Warning w) const noexcept;
};

/// Adds `w` unless already present.
void add_warning(std::vector<Warning>& warnings, Warning w);

}  // namespace nli
