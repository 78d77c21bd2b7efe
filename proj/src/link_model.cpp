#include "nli/link_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace nli {

namespace {

constexpr double kTenLog10E = 4.342944819032518;  // 10 log10(e)

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw ValidationError(field, "must be finite");
  }
}

void require_positive(double v, const char* field) {
  require_finite(v, field);
  if (!(v > 0.0)) {
    throw ValidationError(field, "must be > 0");
  }
}

constexpr std::array<std::pair<Method, std::string_view>, 8> kMethodTags{{
    {Method::OracleLozengeExact, "oracle-lozenge-exact"},
    {Method::OracleSquare, "oracle-square"},
    {Method::ExactSeries, "exact-series"},
    {Method::SinInt, "sinint"},
    {Method::SiApp, "siapp"},
    {Method::Plateau, "plateau"},
    {Method::LowerBound, "lower-bound"},
    {Method::Heterogeneous, "heterogeneous"},
}};

}  // namespace

ValidationError::ValidationError(std::string field, const std::string& what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

FiberSpan::FiberSpan(const Params& p) : p_(p) {
  require_positive(p.length_km, "length_km");
  require_positive(p.loss_coeff_per_km, "loss_coeff_per_km");
  require_finite(p.beta2_ps2_per_km, "beta2_ps2_per_km");
  if (!(p.beta2_ps2_per_km > 0.0)) {
    throw ValidationError("beta2_ps2_per_km", "must be > 0 (zero dispersion is not supported)");
  }
  require_finite(p.gamma_per_w_km, "gamma_per_w_km");
  if (p.gamma_per_w_km < 0.0) {
    throw ValidationError("gamma_per_w_km", "must be >= 0");
  }
  if (!std::isfinite(kTenLog10E * p.loss_coeff_per_km * p.length_km)) {
    throw ValidationError("loss_coeff_per_km", "span loss in dB overflows");
  }
}

DerivedSpan derive_effective_lengths(const FiberSpan& span) {
  const double loss = span.loss_coeff_per_km();
  const double x = loss * span.length_km();
  return DerivedSpan{-std::expm1(-x) / loss, 1.0 / loss};
}

double span_loss_db(const FiberSpan& span) {
  return kTenLog10E * span.loss_coeff_per_km() * span.length_km();
}

double loss_coeff_from_db_per_km(double alpha_db_per_km) {
  require_positive(alpha_db_per_km, "loss_db_per_km");
  return alpha_db_per_km / kTenLog10E;
}

SignalSpec::SignalSpec(double g0_w_per_thz, double bandwidth_thz)
    : g0_(g0_w_per_thz), bandwidth_(bandwidth_thz) {
  require_positive(g0_w_per_thz, "g0_w_per_thz");
  require_positive(bandwidth_thz, "bandwidth_thz");
}

LinkConfig LinkConfig::homogeneous(const FiberSpan& span, int n_spans) {
  if (n_spans < 1) {
    throw ValidationError("n_spans", "must be >= 1");
  }
  return LinkConfig(std::vector<FiberSpan>(static_cast<std::size_t>(n_spans), span));
}

LinkConfig LinkConfig::heterogeneous(std::vector<FiberSpan> spans) {
  if (spans.empty()) {
    throw ValidationError("spans", "link must contain at least one span");
  }
  return LinkConfig(std::move(spans));
}

bool LinkConfig::is_homogeneous() const noexcept {
  return std::all_of(spans_.begin(), spans_.end(),
                     [&](const FiberSpan& s) { return s == spans_.front(); });
}

std::string_view to_string(Method m) noexcept {
  for (const auto& [method, tag] : kMethodTags) {
    if (method == m) return tag;
  }
  return "unknown";
}

Method method_from_string(std::string_view tag) {
  for (const auto& [method, name] : kMethodTags) {
    if (name == tag) return method;
  }
  throw ValidationError("method", "unknown method tag '" + std::string(tag) + "'");
}

std::string_view to_string(Warning w) noexcept {
  switch (w) {
    case Warning::LowSpanLoss: return "LOW_SPAN_LOSS";
    case Warning::PlateauInvalid: return "PLATEAU_INVALID";
    case Warning::RolloffHigh: return "ROLLOFF_HIGH";
    case Warning::QuadBudgetExhausted: return "QUAD_BUDGET_EXHAUSTED";
  }
  return "UNKNOWN";
}

bool NliEstimate::has_warning(Warning w) const noexcept {
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

void add_warning(std::vector<Warning>& warnings, Warning w) {
  if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) {
    warnings.push_back(w);
  }
}

}  // namespace nli
