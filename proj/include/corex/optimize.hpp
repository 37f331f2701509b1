#pragma once

#include <functional>
#include <vector>

#include "corex/common.hpp"

namespace corex {

// Gradient descent on a smooth objective with central-difference gradients and
// a backtracking (step halving) line search. The difference scale shrinks once
// progress stalls, which squeezes out the last digits near the optimum.
struct DescentOptions {
  int max_iterations = 500;
  Real initial_step = 0.25;
  Real step_growth = 1.5;
  Real step_shrink = 0.5;
  int max_halvings = 36;
  Real improvement_tol = 1e-10;  // stop when a full iteration gains less
  Real gradient_dx = 1e-6;
  Real polish_dx = 5e-8;
};

struct DescentResult {
  RealVector point;
  Real value = 0.0;
  int iterations = 0;
};

using Objective = std::function<Real(const RealVector&)>;

DescentResult minimize_descent(const Objective& f, const RealVector& start,
                               const DescentOptions& options = DescentOptions{});

// Runs the descent from every start and keeps the best value; ties keep the
// earliest start, so results are deterministic for a fixed start list.
DescentResult minimize_multistart(const Objective& f, const std::vector<RealVector>& starts,
                                  const DescentOptions& options = DescentOptions{});

}  // namespace corex
