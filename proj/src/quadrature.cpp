#include "nli/quadrature.hpp"

#include "nli/link_model.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace nli {

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
    throw ValidationError("quadrature.rel_tol", "must be finite and > 0");
  }
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
    throw ValidationError("quadrature.abs_tol", "must be finite and > 0");
  }
  if (max_evals < 1000) {
    throw ValidationError("quadrature.max_evals", "must be >= 1000");
  }
  if (max_depth < 1) {
    throw ValidationError("quadrature.max_depth", "must be >= 1");
  }
}

namespace quad {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;
constexpr std::size_t kEvalsPerPanel = 21;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double l1;
  int depth;
  std::size_t serial;  // tie-breaker for a deterministic queue order
};

struct WorseFirst {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.serial > rhs.serial;
  }
};

// 21-point Kronrod rule with the embedded 10-point Gauss rule. Boost's
// one-shot integrate() reports the error on [-1, 1] without rescaling, so the
// rule is applied here from its node tables.
Panel evaluate(const std::function<double(double)>& f, double a, double b, int depth,
               std::size_t serial, EvalBudget& budget) {
  const auto& nodes = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = f(mid);
  double kronrod = f0 * wk[0];
  double gauss = 0.0;
  double l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double fp = f(mid + half * nodes[i]);
    const double fm = f(mid - half * nodes[i]);
    kronrod += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 1) gauss += (fp + fm) * wg[i / 2];
  }
  budget.used += kEvalsPerPanel;
  const double value = half * kronrod;
  const double error = half * std::max(std::abs(kronrod - gauss),
                                       2.0 * std::numeric_limits<double>::epsilon() *
                                           std::abs(kronrod));
  return Panel{a, b, value, error, half * l1, depth, serial};
}

QuadratureResult summarize(std::vector<Panel> panels, std::size_t evals) {
  std::sort(panels.begin(), panels.end(),
            [](const Panel& l, const Panel& r) { return l.a < r.a; });
  QuadratureResult r;
  for (const Panel& p : panels) {
    r.value += p.value;
    r.error += p.error;
  }
  r.evals = evals;
  return r;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> mesh,
                           const QuadratureSettings& settings,
                           EvalBudget& budget) {
  if (mesh.size() < 2) throw std::invalid_argument("quad::integrate: mesh needs two points");
  const std::size_t start_evals = budget.used;

  std::priority_queue<Panel, std::vector<Panel>, WorseFirst> queue;
  std::vector<Panel> frozen;  // at max depth, no longer split
  std::size_t serial = 0;
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    if (!(mesh[i + 1] > mesh[i])) {
      throw std::invalid_argument("quad::integrate: mesh must be strictly increasing");
    }
    Panel p = evaluate(f, mesh[i], mesh[i + 1], 0, serial++, budget);
    value += p.value;
    error += p.error;
    l1 += p.l1;
    queue.push(p);
  }

  auto collect = [&]() {
    std::vector<Panel> all = frozen;
    auto copy = queue;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    return summarize(std::move(all), budget.used - start_evals);
  };

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  while (true) {
    const double target =
        std::max({settings.abs_tol, settings.rel_tol * std::abs(value), 50.0 * kEps * l1});
    if (error <= target) break;

    while (!queue.empty() && queue.top().depth >= settings.max_depth) {
      frozen.push_back(queue.top());
      queue.pop();
    }
    if (queue.empty()) {
      throw QuadratureBudgetError("quadrature: max_depth reached before tolerance", collect());
    }
    if (budget.used + 2 * kEvalsPerPanel > budget.limit) {
      throw QuadratureBudgetError("quadrature: max_evals exhausted before tolerance", collect());
    }

    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate(f, worst.a, mid, worst.depth + 1, serial++, budget);
    Panel right = evaluate(f, mid, worst.b, worst.depth + 1, serial++, budget);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    queue.push(left);
    queue.push(right);
  }
  return collect();
}

QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> mesh,
                           const QuadratureSettings& settings) {
  EvalBudget budget{0, settings.max_evals};
  return integrate(f, mesh, settings, budget);
}

std::vector<double> uniform_mesh(double a, double b, std::size_t cells) {
  cells = std::max<std::size_t>(cells, 1);
  std::vector<double> mesh(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    mesh[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
  }
  mesh.back() = b;
  return mesh;
}

}  // namespace quad
}  // namespace nli
