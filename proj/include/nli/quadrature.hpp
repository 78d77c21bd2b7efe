#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nli {

/// Tolerances and budgets shared by every integral oracle.
///
/// An integral is accepted when its estimated absolute error is below
/// max(abs_tol, rel_tol * |I|, 50 eps * int |f|); the last term is the
/// round-off floor for integrands with heavy cancellation.
struct QuadratureSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  std::size_t max_evals = 50'000'000;
  int max_depth = 60;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;      // absolute error estimate
  std::size_t evals = 0;   // integrand evaluations used
};

/// Raised when the tolerance could not be met within max_evals/max_depth.
/// Carries the best estimate reached so far.
class QuadratureBudgetError : public std::runtime_error {
 public:
  QuadratureBudgetError(const std::string& what, QuadratureResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadratureResult& best() const noexcept { return best_; }

 private:
  QuadratureResult best_;
};

namespace quad {

/// Evaluation counter shared by nested integrations.
struct EvalBudget {
  std::size_t used = 0;
  std::size_t limit = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod over the panels of `mesh`
/// (strictly increasing, at least two points). Panels with the largest error
/// are bisected first; the traversal order is fixed, so results are
/// bit-reproducible.
QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> mesh,
                           const QuadratureSettings& settings,
                           EvalBudget& budget);

/// Convenience overload with its own budget of settings.max_evals.
QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> mesh,
                           const QuadratureSettings& settings);

/// Uniform mesh of `cells` panels on [a, b].
std::vector<double> uniform_mesh(double a, double b, std::size_t cells);

}  // namespace quad
}  // namespace nli
