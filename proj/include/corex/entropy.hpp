#pragma once

#include "corex/optimize.hpp"
#include "corex/states.hpp"

namespace corex {

// Validated Renyi order. Finite and positive; each entropy checks its own
// admissible window on top. Orders within the limit-switch window of 1 are
// evaluated with the order-1 formulas.
class AlphaOrder {
 public:
  explicit AlphaOrder(Real value);
  Real value() const { return value_; }
  bool near_one(Real window = tol::kAlphaLimitSwitch) const;

 private:
  Real value_;
};

// All entropies are in bits (base-2 logarithms). Quantities that diverge
// return +infinity rather than throwing.

Real shannon_entropy(const RealVector& p);
Real binary_entropy(Real p);
Real von_neumann(const DensityMatrix& rho);
Real renyi_entropy(const DensityMatrix& rho, AlphaOrder alpha);

// S(rho||sigma) = tr rho (log2 rho - log2 sigma); +inf when the support of rho
// leaks out of the support of sigma.
Real relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// S_alpha(rho||sigma) = log2 tr(rho^alpha sigma^(1-alpha)) / (alpha - 1),
// alpha in (0,1) or (1,2].
Real renyi_rel_petz(const DensityMatrix& rho, const DensityMatrix& sigma, AlphaOrder alpha);

// S_alpha(rho||sigma) = log2 tr((sigma^p rho sigma^p)^alpha) / (alpha - 1)
// with p = (1-alpha)/(2 alpha), alpha in [1/2, inf).
Real renyi_rel_sandwiched(const DensityMatrix& rho, const DensityMatrix& sigma, AlphaOrder alpha);

// Conditional entropies of the first register given the second. Dense joints
// must carry exactly two subsystem dims {dim_sys, dim_env}.
Real cond_entropy(const DensityMatrix& joint);
Real cond_entropy(const CQState& cq);

// Down variant: -S_alpha_sandwiched(joint || I (x) env_marginal).
Real renyi_cond_down_sand(const DensityMatrix& joint, AlphaOrder alpha);
Real renyi_cond_down_sand(const CQState& cq, AlphaOrder alpha);

// Up variants: -min over conditioning states sigma of the divergence to
// I (x) sigma. The minimum is found by multistart projected gradient descent
// over a Cholesky-factor parametrization of sigma (seeds: maximally mixed,
// the env marginal, three pseudorandom factors, plus a closed-form candidate
// where one exists).
struct CondOptResult {
  Real value = 0.0;  // the conditional entropy
  Matrix sigma;      // the optimizing conditioning state
};

CondOptResult renyi_cond_up_sand_opt(const DensityMatrix& joint, AlphaOrder alpha,
                                     const DescentOptions& options = DescentOptions{});
CondOptResult renyi_cond_up_sand_opt(const CQState& cq, AlphaOrder alpha,
                                     const DescentOptions& options = DescentOptions{});
CondOptResult renyi_cond_up_petz_opt(const DensityMatrix& joint, AlphaOrder alpha,
                                     const DescentOptions& options = DescentOptions{});

Real renyi_cond_up_sand(const DensityMatrix& joint, AlphaOrder alpha);
Real renyi_cond_up_sand(const CQState& cq, AlphaOrder alpha);
Real renyi_cond_up_petz(const DensityMatrix& joint, AlphaOrder alpha);

}  // namespace corex
