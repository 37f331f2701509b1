#include "corex/optimize.hpp"

#include <cmath>
#include <limits>

namespace corex {

namespace {

RealVector central_gradient(const Objective& f, const RealVector& x, Real dx_scale) {
  RealVector g(x.size());
  RealVector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const Real h = dx_scale * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + h;
    const Real fp = f(probe);
    probe[i] = x[i] - h;
    const Real fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

DescentResult minimize_descent(const Objective& f, const RealVector& start,
                               const DescentOptions& options) {
  RealVector x = start;
  Real fx = f(x);
  Real step = options.initial_step;
  Real dx = options.gradient_dx;
  int stalls = 0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    RealVector g = central_gradient(f, x, dx);
    const Real gnorm = g.norm();
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;
    g /= gnorm;

    Real s = step;
    Real ft = std::numeric_limits<Real>::infinity();
    RealVector xt;
    bool moved = false;
    for (int h = 0; h < options.max_halvings; ++h) {
      xt = x - s * g;
      ft = f(xt);
      if (std::isfinite(ft) && ft < fx) {
        moved = true;
        break;
      }
      s *= options.step_shrink;
    }
    if (!moved) {
      if (dx > options.polish_dx) {
        dx = options.polish_dx;
        continue;
      }
      break;
    }
    const Real gain = fx - ft;
    x = xt;
    fx = ft;
    step = std::min(s * options.step_growth, 64.0);
    if (gain < options.improvement_tol) {
      ++stalls;
      if (stalls >= 2) {
        if (dx > options.polish_dx) {
          dx = options.polish_dx;
          stalls = 0;
        } else {
          break;
        }
      }
    } else {
      stalls = 0;
    }
  }
  return DescentResult{x, fx, iter};
}

DescentResult minimize_multistart(const Objective& f, const std::vector<RealVector>& starts,
                                  const DescentOptions& options) {
  if (starts.empty()) throw DomainError("minimize_multistart: no starts");
  DescentResult best;
  bool have = false;
  for (const RealVector& start : starts) {
    DescentResult r = minimize_descent(f, start, options);
    if (!have || r.value < best.value) {
      best = r;
      have = true;
    }
  }
  return best;
}

}  // namespace corex
