#include "corex/states.hpp"

#include <algorithm>
#include <cmath>

namespace corex {

namespace {

std::vector<Index> normalize_dims(std::vector<Index> dims, Index total, const char* who) {
  if (dims.empty()) return {total};
  Index prod = 1;
  for (Index d : dims) {
    if (d <= 0) throw DimMismatch(std::string(who) + ": nonpositive subsystem dimension");
    prod *= d;
  }
  if (prod != total) {
    throw DimMismatch(std::string(who) + ": dims product " + std::to_string(prod) +
                      " does not match dimension " + std::to_string(total));
  }
  return dims;
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix m, std::vector<Index> dims) {
  if (m.rows() != m.cols()) throw DimMismatch("DensityMatrix: matrix is not square");
  const Real skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (skew > tol::kHermitian) {
    throw NotHermitian("DensityMatrix: skew part " + format_real(skew) + " exceeds tolerance");
  }
  m_ = 0.5 * (m + m.adjoint());
  const Real tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol::kUnitTrace) {
    throw BadTrace("DensityMatrix: trace " + format_real(tr) + " is not 1 within tolerance");
  }
  eig_ = eig_hermitian(m_);
  const Real min_eig = eig_.eigenvalues.minCoeff();
  if (min_eig < tol::kEigenvalueFloor) {
    throw NotPsd("DensityMatrix: eigenvalue " + format_real(min_eig) + " below admissible floor");
  }
  if (min_eig < 0.0) {
    RealVector clipped = eig_.eigenvalues.cwiseMax(0.0);
    clipped /= clipped.sum();
    eig_.eigenvalues = clipped;
    m_ = eig_.reconstruct();
    m_ = 0.5 * (m_ + m_.adjoint());
  }
  dims_ = normalize_dims(std::move(dims), m_.rows(), "DensityMatrix");
}

DensityMatrix DensityMatrix::from_pure(const Vector& amplitudes, std::vector<Index> dims) {
  const Real norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-8) {
    throw BadTrace("from_pure: amplitude norm " + format_real(norm) + " is not 1");
  }
  const Vector unit = amplitudes / norm;
  return DensityMatrix(unit * unit.adjoint(), std::move(dims));
}

DensityMatrix DensityMatrix::with_dims(std::vector<Index> dims) const {
  DensityMatrix out = *this;
  out.dims_ = normalize_dims(std::move(dims), m_.rows(), "with_dims");
  return out;
}

RealVector DensityMatrix::diagonal() const { return m_.diagonal().real(); }

PureJointState::PureJointState(Vector amplitudes, Index dim_system, Index dim_env)
    : amps_(std::move(amplitudes)), dim_system_(dim_system), dim_env_(dim_env) {
  if (dim_system_ <= 0 || dim_env_ <= 0) {
    throw DimMismatch("PureJointState: nonpositive register dimension");
  }
  if (amps_.size() != dim_system_ * dim_env_) {
    throw DimMismatch("PureJointState: amplitude length " + std::to_string(amps_.size()) +
                      " does not match " + std::to_string(dim_system_) + "x" +
                      std::to_string(dim_env_));
  }
  const Real norm = amps_.norm();
  if (std::abs(norm - 1.0) > 1e-8) {
    throw BadTrace("PureJointState: norm " + format_real(norm) + " is not 1");
  }
  amps_ /= norm;
}

DensityMatrix PureJointState::system_marginal() const {
  return DensityMatrix(partial_trace(density(), {dim_system_, dim_env_}, {0}));
}

DensityMatrix PureJointState::env_marginal() const {
  return DensityMatrix(partial_trace(density(), {dim_system_, dim_env_}, {1}));
}

CQState::CQState(std::vector<CQAtom> atoms, std::uint64_t label_space, Index env_dim)
    : label_space_(label_space), env_dim_(env_dim) {
  if (label_space_ == 0) throw DimMismatch("CQState: empty label space");
  if (env_dim_ <= 0) throw DimMismatch("CQState: nonpositive environment dimension");
  std::sort(atoms.begin(), atoms.end(),
            [](const CQAtom& a, const CQAtom& b) { return a.label < b.label; });
  KahanSum total;
  std::uint64_t prev_label = 0;
  bool first = true;
  for (CQAtom& atom : atoms) {
    if (atom.label >= label_space_) {
      throw LabelMismatch("CQState: label " + std::to_string(atom.label) +
                          " outside alphabet of size " + std::to_string(label_space_));
    }
    if (!first && atom.label == prev_label) {
      throw LabelMismatch("CQState: duplicate label " + std::to_string(atom.label));
    }
    prev_label = atom.label;
    first = false;
    if (atom.probability < -tol::kUnitTrace) {
      throw BadProbabilities("CQState: negative probability " + format_real(atom.probability));
    }
    if (atom.probability <= tol::kAtomDrop) continue;
    if (atom.env.rows() != env_dim_ || atom.env.cols() != env_dim_) {
      throw DimMismatch("CQState: conditional state has wrong dimension");
    }
    // Validate and clean each conditional state through the density checks.
    atom.env = DensityMatrix(atom.env).matrix();
    total.add(atom.probability);
    atoms_.push_back(std::move(atom));
  }
  if (std::abs(total.value() - 1.0) > tol::kUnitTrace) {
    throw BadProbabilities("CQState: probabilities sum to " + format_real(total.value()));
  }
}

Matrix CQState::env_marginal() const {
  Matrix out = Matrix::Zero(env_dim_, env_dim_);
  for (const CQAtom& atom : atoms_) out += atom.probability * atom.env;
  return out;
}

Matrix CQState::assemble(const Caps& caps) const {
  const std::uint64_t side = label_space_ * static_cast<std::uint64_t>(env_dim_);
  if (side > static_cast<std::uint64_t>(caps.tensor_dim)) {
    throw TooLarge("CQState::assemble: joint dimension " + std::to_string(side) +
                   " exceeds cap " + std::to_string(caps.tensor_dim));
  }
  const Index total = static_cast<Index>(side);
  Matrix out = Matrix::Zero(total, total);
  for (const CQAtom& atom : atoms_) {
    const Index base = static_cast<Index>(atom.label) * env_dim_;
    out.block(base, base, env_dim_, env_dim_) = atom.probability * atom.env;
  }
  return out;
}

DensityMatrix CQState::assemble_density(const Caps& caps) const {
  return DensityMatrix(assemble(caps), {static_cast<Index>(label_space_), env_dim_});
}

CQState CQState::embedded(std::uint64_t label_space) const {
  if (label_space < label_space_) {
    throw LabelMismatch("CQState::embedded: alphabet cannot shrink");
  }
  return CQState(atoms_, label_space, env_dim_);
}

KrausChannel::KrausChannel(std::vector<Matrix> ops, Real tp_tol) : ops_(std::move(ops)) {
  if (ops_.empty()) throw DimMismatch("KrausChannel: no operators");
  dim_out_ = ops_[0].rows();
  dim_in_ = ops_[0].cols();
  Matrix sum = Matrix::Zero(dim_in_, dim_in_);
  for (const Matrix& k : ops_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) {
      throw DimMismatch("KrausChannel: operators have mixed shapes");
    }
    sum += k.adjoint() * k;
  }
  const Real defect = (sum - Matrix::Identity(dim_in_, dim_in_)).cwiseAbs().maxCoeff();
  if (defect > tp_tol) {
    throw NotTracePreserving("KrausChannel: sum K^dag K deviates from identity by " +
                             format_real(defect));
  }
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  if (rho.rows() != dim_in_ || rho.cols() != dim_in_) {
    throw DimMismatch("KrausChannel::apply: state dimension mismatch");
  }
  Matrix out = Matrix::Zero(dim_out_, dim_out_);
  for (const Matrix& k : ops_) out += k * rho * k.adjoint();
  return out;
}

PureJointState purify(const DensityMatrix& rho, Real rank_cut) {
  const SpectralDecomposition& eig = rho.spectrum();
  const Index d = rho.dim();
  std::vector<Index> kept;  // descending eigenvalue order
  for (Index i = eig.eigenvalues.size() - 1; i >= 0; --i) {
    if (eig.eigenvalues[i] > rank_cut) kept.push_back(i);
  }
  if (kept.empty()) throw NotPsd("purify: state has empty support");
  const Index rank = static_cast<Index>(kept.size());
  Vector amps = Vector::Zero(d * rank);
  for (Index e = 0; e < rank; ++e) {
    const Index col = kept[static_cast<std::size_t>(e)];
    const Real root = std::sqrt(eig.eigenvalues[col]);
    for (Index x = 0; x < d; ++x) amps[x * rank + e] = root * eig.eigenvectors(x, col);
  }
  return PureJointState(amps, d, rank);
}

CQState measure_computational(const PureJointState& joint) {
  const Index d = joint.dim_system();
  const Index de = joint.dim_env();
  std::vector<CQAtom> atoms;
  for (Index a = 0; a < d; ++a) {
    const Vector branch = joint.amplitudes().segment(a * de, de);
    const Real p = branch.squaredNorm();
    if (p <= tol::kAtomDrop) continue;
    const Vector unit = branch / std::sqrt(p);
    atoms.push_back(CQAtom{static_cast<std::uint64_t>(a), p, unit * unit.adjoint()});
  }
  return CQState(std::move(atoms), static_cast<std::uint64_t>(d), de);
}

PureJointState cnot_embed(const PureJointState& joint, Index dim_b) {
  const Index da = joint.dim_system();
  const Index de = joint.dim_env();
  if (dim_b == 0) dim_b = da;
  if (dim_b < da) {
    throw DimMismatch("cnot_embed: ancilla dimension " + std::to_string(dim_b) +
                      " smaller than system dimension " + std::to_string(da));
  }
  // The ancilla starts in |0>, so the copy unitary sends |x, 0> to |x, x>.
  Vector amps = Vector::Zero(da * dim_b * de);
  for (Index x = 0; x < da; ++x) {
    for (Index e = 0; e < de; ++e) {
      amps[(x * dim_b + x) * de + e] = joint.amplitude(x, e);
    }
  }
  return PureJointState(amps, da * dim_b, de);
}

bool is_incoherent_state(const DensityMatrix& rho, Real entry_tol) {
  const Index d = rho.dim();
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i != j && std::abs(rho.matrix()(i, j)) > entry_tol) return false;
    }
  }
  return true;
}

bool is_incoherent_unitary(const Matrix& u, Real entry_tol) {
  if (u.rows() != u.cols()) return false;
  const Index d = u.rows();
  const Real defect = (u * u.adjoint() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > tol::kUnitary) {
    throw NotUnitary("is_incoherent_unitary: U U^dag deviates from identity by " +
                     format_real(defect));
  }
  for (Index i = 0; i < d; ++i) {
    Index row_hits = 0;
    Index col_hits = 0;
    for (Index j = 0; j < d; ++j) {
      if (std::abs(u(i, j)) > entry_tol) ++row_hits;
      if (std::abs(u(j, i)) > entry_tol) ++col_hits;
    }
    if (row_hits != 1 || col_hits != 1) return false;
  }
  return true;
}

bool is_incoherence_preserving(const KrausChannel& channel, Real entry_tol) {
  const Index d = channel.dim_in();
  for (Index a = 0; a < d; ++a) {
    Matrix basis = Matrix::Zero(d, d);
    basis(a, a) = Complex(1.0, 0.0);
    const DensityMatrix image(channel.apply(basis));
    if (!is_incoherent_state(image, entry_tol)) return false;
  }
  return true;
}

CQState cq_tensor_power(const CQState& cq, int n, const Caps& caps) {
  if (n < 1) throw DomainError("cq_tensor_power: copy count must be positive");
  long double space = 1.0L;
  long double count = 1.0L;
  long double env = 1.0L;
  for (int i = 0; i < n; ++i) {
    space *= static_cast<long double>(cq.label_space());
    count *= static_cast<long double>(cq.atoms().size());
    env *= static_cast<long double>(cq.env_dim());
  }
  if (space > static_cast<long double>(caps.label_space) ||
      count > static_cast<long double>(caps.label_space)) {
    throw TooLarge("cq_tensor_power: label space exceeds cap " +
                   std::to_string(caps.label_space));
  }
  if (env > static_cast<long double>(caps.env_dim)) {
    throw TooLarge("cq_tensor_power: environment dimension exceeds cap " +
                   std::to_string(caps.env_dim));
  }

  std::vector<CQAtom> combined{CQAtom{0, 1.0, Matrix::Identity(1, 1)}};
  Index env_dim = 1;
  for (int i = 0; i < n; ++i) {
    std::vector<CQAtom> next;
    next.reserve(combined.size() * cq.atoms().size());
    for (const CQAtom& left : combined) {
      for (const CQAtom& right : cq.atoms()) {
        CQAtom atom;
        atom.label = left.label * cq.label_space() + right.label;
        atom.probability = left.probability * right.probability;
        atom.env = tensor(left.env, right.env, caps.tensor_dim);
        next.push_back(std::move(atom));
      }
    }
    combined = std::move(next);
    env_dim *= cq.env_dim();
  }
  std::uint64_t label_space = 1;
  for (int i = 0; i < n; ++i) label_space *= cq.label_space();
  return CQState(std::move(combined), label_space, env_dim);
}

}  // namespace corex
