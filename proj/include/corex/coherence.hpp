#pragma once

#include "corex/entropy.hpp"

namespace corex {

// Qubit state as a Bloch vector, |r| <= 1 (validated with a small slack).
struct QubitBloch {
  Real x = 0.0;
  Real y = 0.0;
  Real z = 0.0;
};

struct QubitMeasures {
  Real c_r = 0.0;
  Real c_f = 0.0;
};

struct PureDecomposition {
  std::vector<Real> probabilities;
  std::vector<Vector> states;
};

struct ConvexRoofResult {
  Real value = 0.0;
  bool exact = false;  // true when value is a closed form, not an optimizer bound
  PureDecomposition decomposition;
};

DensityMatrix density_from_bloch(const QubitBloch& b);
QubitBloch bloch_from_density(const DensityMatrix& rho);

// Distance to the diagonal states under the Umegaki relative entropy, in its
// closed form: entropy of the diagonal minus entropy of the state.
Real c_r(const DensityMatrix& rho);

// Minimum over diagonal states of the order-alpha divergence, found by
// multistart descent over a softmax parametrization of the diagonal. Petz
// orders in (0,1) or (1,2]; sandwiched orders in [1/2, inf).
Real c_r_alpha_petz(const DensityMatrix& rho, AlphaOrder alpha,
                    const DescentOptions& options = DescentOptions{});
Real c_r_alpha_sand(const DensityMatrix& rho, AlphaOrder alpha,
                    const DescentOptions& options = DescentOptions{});

// Convex roof of c_r over pure-state decompositions. Exact for qubits, pure
// states and incoherent states; otherwise a certified upper bound from an
// isometry-parametrized ensemble search (ensemble size = rank^2, `restarts`
// pseudorandom starts plus the eigendecomposition start).
ConvexRoofResult c_f(const DensityMatrix& rho, int restarts = 20);

// Closed qubit forms for both measures.
QubitMeasures qubit_measures(const QubitBloch& b);

// True when the unconstrained and convex-roof rates agree: the state is pure,
// or it splits into blocks of basis states whose restrictions are pure.
bool rates_coincide(const DensityMatrix& rho, Real tolerance = tol::kPureTop);

}  // namespace corex
