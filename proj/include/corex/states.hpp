#pragma once

#include <cstdint>
#include <vector>

#include "corex/linalg.hpp"

namespace corex {

// Validated density matrix with optional subsystem structure. Construction
// symmetrizes, checks positivity down to the eigenvalue floor, clips tiny
// negative eigenvalues and renormalizes the spectrum to unit trace.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m, std::vector<Index> dims = {});

  static DensityMatrix from_pure(const Vector& amplitudes, std::vector<Index> dims = {});

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  const std::vector<Index>& dims() const { return dims_; }
  const SpectralDecomposition& spectrum() const { return eig_; }

  // Same state with replacement subsystem structure (product must match dim).
  DensityMatrix with_dims(std::vector<Index> dims) const;

  // Diagonal in the computational basis, as a real vector.
  RealVector diagonal() const;

 private:
  Matrix m_;
  std::vector<Index> dims_;
  SpectralDecomposition eig_;
};

// Bipartite pure state on system (slow axis, dimension dim_system) and
// environment (fast axis, dimension dim_env). amplitudes has length
// dim_system * dim_env and unit norm.
class PureJointState {
 public:
  PureJointState(Vector amplitudes, Index dim_system, Index dim_env);

  const Vector& amplitudes() const { return amps_; }
  Index dim_system() const { return dim_system_; }
  Index dim_env() const { return dim_env_; }

  Complex amplitude(Index system, Index env) const { return amps_[system * dim_env_ + env]; }
  Matrix density() const { return amps_ * amps_.adjoint(); }
  DensityMatrix system_marginal() const;
  DensityMatrix env_marginal() const;

 private:
  Vector amps_;
  Index dim_system_;
  Index dim_env_;
};

// One classical branch of a classical-quantum state.
struct CQAtom {
  std::uint64_t label = 0;
  Real probability = 0.0;
  Matrix env;  // normalized conditional environment state
};

// Classical-quantum state: sum_a P(a) |a><a| (x) rho_env|a over a label
// alphabet of size label_space. Atoms are kept sorted by label; labels with no
// atom carry probability zero.
class CQState {
 public:
  CQState(std::vector<CQAtom> atoms, std::uint64_t label_space, Index env_dim);

  const std::vector<CQAtom>& atoms() const { return atoms_; }
  std::uint64_t label_space() const { return label_space_; }
  Index env_dim() const { return env_dim_; }

  Matrix env_marginal() const;  // sum_a P(a) rho_env|a
  // Dense joint matrix of size label_space * env_dim. Checked against caps.
  Matrix assemble(const Caps& caps = Caps{}) const;
  // Joint as a DensityMatrix with dims {label_space, env_dim}.
  DensityMatrix assemble_density(const Caps& caps = Caps{}) const;

  // Same atoms in a larger label alphabet (labels unchanged).
  CQState embedded(std::uint64_t label_space) const;

 private:
  std::vector<CQAtom> atoms_;
  std::uint64_t label_space_;
  Index env_dim_;
};

// Completely positive trace preserving map given by Kraus operators.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> ops, Real tp_tol = tol::kHermitian);

  const std::vector<Matrix>& ops() const { return ops_; }
  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  Matrix apply(const Matrix& rho) const;

 private:
  std::vector<Matrix> ops_;
  Index dim_in_;
  Index dim_out_;
};

// Canonical purification: environment spanned by the eigenvectors of rho with
// eigenvalue above rank_cut, ordered by descending eigenvalue, so the
// environment dimension equals the numerical rank.
PureJointState purify(const DensityMatrix& rho, Real rank_cut = tol::kZeroClip);

// Computational-basis measurement of the system register. Branch a gets
// probability <a|rho_sys|a> and the normalized environment state it leaves
// behind. Branches at or below the atom-drop tolerance are omitted.
CQState measure_computational(const PureJointState& joint);

// Appends an ancilla register of dimension dim_b (default: the system
// dimension) in state |0> and applies the copy unitary
// |x, y> -> |x, x + y mod d_sys> for y < d_sys, identity for y >= d_sys,
// on system (x) ancilla. The result is returned with the system register
// fused as system (x) ancilla (slow to fast: system, ancilla, environment).
PureJointState cnot_embed(const PureJointState& joint, Index dim_b = 0);

// True when rho is diagonal in the computational basis within entry_tol.
bool is_incoherent_state(const DensityMatrix& rho, Real entry_tol = tol::kHermitian);

// True when u has exactly one entry of magnitude above entry_tol in every row
// and column. Throws NotUnitary when u is not unitary within entry_tol.
bool is_incoherent_unitary(const Matrix& u, Real entry_tol = tol::kHermitian);

// True when the channel maps every computational basis state to an incoherent
// state (which settles the question for all incoherent inputs).
bool is_incoherence_preserving(const KrausChannel& channel, Real entry_tol = tol::kHermitian);

// n-fold product state. Labels combine positionally with the first copy
// slowest: label(a_1..a_n) = sum_i a_i * base^(n-1-i), base = label_space.
CQState cq_tensor_power(const CQState& cq, int n, const Caps& caps = Caps{});

}  // namespace corex
