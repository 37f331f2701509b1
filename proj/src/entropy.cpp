#include "corex/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corex {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Internal view of a bipartite joint: either one dense block with an explicit
// system dimension, or the diagonal blocks of a classical-quantum state with
// the label probabilities folded in.
struct ConditionalJoint {
  std::vector<Matrix> blocks;  // each env_dim x env_dim, traces sum to 1
  Index dim_sys = 0;           // dense case only (blocks.size() == 1)
  Index dim_env = 0;
  bool dense = false;
  Matrix env_marginal;
};

ConditionalJoint view_of(const DensityMatrix& joint) {
  if (joint.dims().size() != 2) {
    throw BadSplit("conditional entropy: joint must carry dims {dim_sys, dim_env}");
  }
  ConditionalJoint v;
  v.dense = true;
  v.dim_sys = joint.dims()[0];
  v.dim_env = joint.dims()[1];
  v.blocks.push_back(joint.matrix());
  v.env_marginal = partial_trace(joint.matrix(), joint.dims(), {1});
  return v;
}

ConditionalJoint view_of(const CQState& cq) {
  ConditionalJoint v;
  v.dense = false;
  v.dim_sys = static_cast<Index>(cq.label_space());
  v.dim_env = cq.env_dim();
  v.blocks.reserve(cq.atoms().size());
  for (const CQAtom& atom : cq.atoms()) v.blocks.push_back(atom.probability * atom.env);
  v.env_marginal = cq.env_marginal();
  return v;
}

RealVector clipped_spectrum(const SpectralDecomposition& eig) {
  RealVector out = eig.eigenvalues.cwiseMax(0.0);
  return out;
}

Real entropy_of_spectrum(const RealVector& lambda) {
  KahanSum sum;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > tol::kZeroClip) sum.add(-lambda[i] * std::log2(lambda[i]));
  }
  return sum.value();
}

// Mass of rho outside the support of the decomposed sigma.
Real support_leak(const Matrix& rho, const SpectralDecomposition& sigma_eig) {
  Real leak = 0.0;
  for (Index i = 0; i < sigma_eig.eigenvalues.size(); ++i) {
    if (sigma_eig.eigenvalues[i] > tol::kZeroClip) continue;
    const Vector v = sigma_eig.eigenvectors.col(i);
    leak += (v.adjoint() * rho * v).real()(0, 0);
  }
  return leak;
}

// Power of a decomposed PSD matrix on its support.
Matrix power_from_eig(const SpectralDecomposition& eig, Real p) {
  RealVector mapped(eig.eigenvalues.size());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const Real lambda = eig.eigenvalues[i];
    mapped[i] = lambda > tol::kZeroClip ? std::pow(lambda, p) : 0.0;
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

// Adds pow(mu_i, alpha) for the eigenvalues above the roundoff scale of the
// largest one; noise eigenvalues would inflate sums for powers below 1.
void add_powers(KahanSum& sum, const RealVector& mu, Real alpha) {
  const Real floor = 1e-14 * std::max(1e-300, mu.cwiseAbs().maxCoeff());
  for (Index i = 0; i < mu.size(); ++i) {
    if (mu[i] > floor) sum.add(std::pow(mu[i], alpha));
  }
}

// log2 tr((sigma^p rho sigma^p)^alpha) summed over blocks, with the identity
// on the system register implicit in the blockwise action of sigma.
Real sandwiched_divergence(const ConditionalJoint& v, const Matrix& sigma, Real alpha) {
  const SpectralDecomposition sigma_eig = eig_hermitian(sigma);
  if (alpha > 1.0 && support_leak(v.env_marginal, sigma_eig) > tol::kSupportLeak) {
    return kInf;
  }
  const Real p = (1.0 - alpha) / (2.0 * alpha);
  const Matrix sigma_p = power_from_eig(sigma_eig, p);
  KahanSum q;
  if (v.dense) {
    const Matrix big = tensor(Matrix(Matrix::Identity(v.dim_sys, v.dim_sys)), sigma_p,
                              std::numeric_limits<Index>::max());
    add_powers(q, eigenvalues_only(big * v.blocks[0] * big), alpha);
  } else {
    for (const Matrix& block : v.blocks) {
      add_powers(q, eigenvalues_only(sigma_p * block * sigma_p), alpha);
    }
  }
  if (!(q.value() > 0.0)) return kInf;
  return std::log2(q.value()) / (alpha - 1.0);
}

// tr_sys(joint^alpha) for the Petz up variant, computed once per (joint, alpha).
Matrix petz_partial_power(const ConditionalJoint& v, Real alpha) {
  if (v.dense) {
    const Matrix powered = matrix_power_psd(v.blocks[0], alpha);
    return partial_trace(powered, {v.dim_sys, v.dim_env}, {1});
  }
  Matrix x = Matrix::Zero(v.dim_env, v.dim_env);
  for (const Matrix& block : v.blocks) x += matrix_power_psd(block, alpha);
  return x;
}

Real petz_divergence_from_partial(const Matrix& x, const Matrix& sigma, Real alpha) {
  const SpectralDecomposition sigma_eig = eig_hermitian(sigma);
  if (alpha > 1.0 && support_leak(x, sigma_eig) > tol::kSupportLeak) return kInf;
  const Matrix sigma_pow = power_from_eig(sigma_eig, 1.0 - alpha);
  const Real q = (x * sigma_pow).trace().real();
  if (!(q > 0.0)) return kInf;
  return std::log2(q) / (alpha - 1.0);
}

// Parametrization of conditioning states: sigma = L L^dag / tr, with L a
// lower-triangular complex factor packed as interleaved re/im parameters.
Index factor_param_count(Index d) { return d * (d + 1); }

Matrix factor_from_params(const RealVector& params, Index d) {
  Matrix l = Matrix::Zero(d, d);
  Index at = 0;
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c <= r; ++c) {
      l(r, c) = Complex(params[at], params[at + 1]);
      at += 2;
    }
  }
  return l;
}

RealVector params_from_factor(const Matrix& l) {
  const Index d = l.rows();
  RealVector params(factor_param_count(d));
  Index at = 0;
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c <= r; ++c) {
      params[at] = l(r, c).real();
      params[at + 1] = l(r, c).imag();
      at += 2;
    }
  }
  return params;
}

Matrix sigma_from_params(const RealVector& params, Index d) {
  const Matrix l = factor_from_params(params, d);
  Matrix sigma = l * l.adjoint();
  const Real tr = sigma.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) return Matrix();
  sigma /= tr;
  return sigma;
}

RealVector cholesky_seed(const Matrix& psd) {
  const Index d = psd.rows();
  const Matrix shifted = psd + 1e-10 * Matrix::Identity(d, d);
  Eigen::LLT<Matrix> llt(shifted);
  return params_from_factor(Matrix(llt.matrixL()));
}

std::vector<RealVector> sigma_seeds(const Matrix& env_marginal,
                                    const std::vector<Matrix>& extra_candidates) {
  const Index d = env_marginal.rows();
  std::vector<RealVector> seeds;
  seeds.push_back(
      params_from_factor(Matrix((1.0 / std::sqrt(static_cast<Real>(d))) *
                                Matrix::Identity(d, d))));
  seeds.push_back(cholesky_seed(env_marginal));
  SplitMix64 rng(0xC0FD5EEDULL);
  for (int r = 0; r < 3; ++r) {
    RealVector params(factor_param_count(d));
    for (Index i = 0; i < params.size(); ++i) params[i] = 0.5 * rng.next_gaussian();
    seeds.push_back(params);
  }
  for (const Matrix& candidate : extra_candidates) seeds.push_back(cholesky_seed(candidate));
  return seeds;
}

CondOptResult conditional_up(const ConditionalJoint& v, AlphaOrder alpha, bool sandwiched,
                             const DescentOptions& options) {
  const Index d = v.dim_env;
  if (d == 1) {
    const Matrix one = Matrix::Identity(1, 1);
    const Real div = sandwiched ? sandwiched_divergence(v, one, alpha.value())
                                : petz_divergence_from_partial(petz_partial_power(v, alpha.value()),
                                                               one, alpha.value());
    return CondOptResult{-div, one};
  }

  Matrix petz_x;
  std::vector<Matrix> extras;
  if (!sandwiched) {
    petz_x = petz_partial_power(v, alpha.value());
    // Closed-form optimum of the Petz variant, validated in tests and added
    // as one more start.
    Matrix candidate = matrix_power_psd(petz_x, 1.0 / alpha.value());
    const Real tr = candidate.trace().real();
    if (tr > 0.0) extras.push_back(candidate / tr);
  }

  const Real a = alpha.value();
  Objective objective = [&](const RealVector& params) -> Real {
    const Matrix sigma = sigma_from_params(params, d);
    if (sigma.size() == 0) return 1e100;
    Real div;
    try {
      div = sandwiched ? sandwiched_divergence(v, sigma, a)
                       : petz_divergence_from_partial(petz_x, sigma, a);
    } catch (const Error&) {
      return 1e100;
    }
    return std::isfinite(div) ? div : 1e100;
  };

  const DescentResult best = minimize_multistart(objective, sigma_seeds(v.env_marginal, extras),
                                                 options);
  return CondOptResult{-best.value, sigma_from_params(best.point, d)};
}

Real cond_entropy_view(const ConditionalJoint& v) {
  Real joint_entropy = 0.0;
  if (v.dense) {
    joint_entropy = entropy_of_spectrum(clipped_spectrum(eig_hermitian(v.blocks[0])));
  } else {
    KahanSum sum;
    for (const Matrix& block : v.blocks) {
      const RealVector mu = eigenvalues_only(block);
      for (Index i = 0; i < mu.size(); ++i) {
        if (mu[i] > tol::kZeroClip) sum.add(-mu[i] * std::log2(mu[i]));
      }
    }
    joint_entropy = sum.value();
  }
  const Real env_entropy = entropy_of_spectrum(clipped_spectrum(eig_hermitian(v.env_marginal)));
  return joint_entropy - env_entropy;
}

}  // namespace

AlphaOrder::AlphaOrder(Real value) : value_(value) {
  if (!std::isfinite(value_) || value_ <= 0.0) {
    throw AlphaOutOfRange("AlphaOrder: order must be finite and positive, got " +
                          format_real(value_));
  }
}

bool AlphaOrder::near_one(Real window) const { return std::abs(value_ - 1.0) < window; }

Real shannon_entropy(const RealVector& p) {
  KahanSum sum;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] < -tol::kUnitTrace) {
      throw BadProbabilities("shannon_entropy: negative probability " + format_real(p[i]));
    }
    if (p[i] > tol::kZeroClip) sum.add(-p[i] * std::log2(p[i]));
  }
  return sum.value();
}

Real binary_entropy(Real p) {
  if (p < -tol::kUnitTrace || p > 1.0 + tol::kUnitTrace) {
    throw BadProbabilities("binary_entropy: probability " + format_real(p) + " outside [0, 1]");
  }
  RealVector v(2);
  v << std::clamp(p, 0.0, 1.0), std::clamp(1.0 - p, 0.0, 1.0);
  return shannon_entropy(v);
}

Real von_neumann(const DensityMatrix& rho) {
  return entropy_of_spectrum(clipped_spectrum(rho.spectrum()));
}

Real renyi_entropy(const DensityMatrix& rho, AlphaOrder alpha) {
  if (alpha.near_one()) return von_neumann(rho);
  KahanSum sum;
  const RealVector lambda = clipped_spectrum(rho.spectrum());
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > tol::kZeroClip) sum.add(std::pow(lambda[i], alpha.value()));
  }
  return std::log2(sum.value()) / (1.0 - alpha.value());
}

Real relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimMismatch("relative_entropy: dimension mismatch");
  if (support_leak(rho.matrix(), sigma.spectrum()) > tol::kSupportLeak) return kInf;
  const Matrix log_rho = matrix_log2_psd(rho.matrix());
  const Matrix log_sigma = sigma.spectrum().apply(
      [](Real lambda) { return lambda > tol::kZeroClip ? std::log2(lambda) : 0.0; });
  return (rho.matrix() * (log_rho - log_sigma)).trace().real();
}

Real renyi_rel_petz(const DensityMatrix& rho, const DensityMatrix& sigma, AlphaOrder alpha) {
  const Real a = alpha.value();
  if (a > 2.0 + 1e-12) {
    throw AlphaOutOfRange("renyi_rel_petz: order " + format_real(a) + " above 2");
  }
  if (alpha.near_one()) return relative_entropy(rho, sigma);
  if (a > 1.0 && support_leak(rho.matrix(), sigma.spectrum()) > tol::kSupportLeak) return kInf;
  const Matrix rho_a = matrix_power_psd(rho.matrix(), a);
  const Matrix sigma_pow = power_from_eig(sigma.spectrum(), 1.0 - a);
  const Real q = (rho_a * sigma_pow).trace().real();
  if (!(q > 0.0)) return kInf;
  return std::log2(q) / (a - 1.0);
}

Real renyi_rel_sandwiched(const DensityMatrix& rho, const DensityMatrix& sigma, AlphaOrder alpha) {
  const Real a = alpha.value();
  if (a < 0.5 - 1e-12) {
    throw AlphaOutOfRange("renyi_rel_sandwiched: order " + format_real(a) + " below 1/2");
  }
  if (alpha.near_one()) return relative_entropy(rho, sigma);
  if (a > 1.0 && support_leak(rho.matrix(), sigma.spectrum()) > tol::kSupportLeak) return kInf;
  const Real p = (1.0 - a) / (2.0 * a);
  const Matrix sigma_p = power_from_eig(sigma.spectrum(), p);
  KahanSum q;
  add_powers(q, eigenvalues_only(sigma_p * rho.matrix() * sigma_p), a);
  if (!(q.value() > 0.0)) return kInf;
  return std::log2(q.value()) / (a - 1.0);
}

Real cond_entropy(const DensityMatrix& joint) { return cond_entropy_view(view_of(joint)); }

Real cond_entropy(const CQState& cq) { return cond_entropy_view(view_of(cq)); }

namespace {

Real cond_down_view(const ConditionalJoint& v, AlphaOrder alpha) {
  if (alpha.near_one()) return cond_entropy_view(v);
  if (alpha.value() < 0.5 - 1e-12) {
    throw AlphaOutOfRange("renyi_cond_down_sand: order below 1/2");
  }
  return -sandwiched_divergence(v, v.env_marginal, alpha.value());
}

CondOptResult cond_up_sand_view(const ConditionalJoint& v, AlphaOrder alpha,
                                const DescentOptions& options) {
  if (alpha.near_one()) return CondOptResult{cond_entropy_view(v), v.env_marginal};
  if (alpha.value() < 0.5 - 1e-12) {
    throw AlphaOutOfRange("renyi_cond_up_sand: order below 1/2");
  }
  return conditional_up(v, alpha, true, options);
}

}  // namespace

Real renyi_cond_down_sand(const DensityMatrix& joint, AlphaOrder alpha) {
  return cond_down_view(view_of(joint), alpha);
}

Real renyi_cond_down_sand(const CQState& cq, AlphaOrder alpha) {
  return cond_down_view(view_of(cq), alpha);
}

CondOptResult renyi_cond_up_sand_opt(const DensityMatrix& joint, AlphaOrder alpha,
                                     const DescentOptions& options) {
  return cond_up_sand_view(view_of(joint), alpha, options);
}

CondOptResult renyi_cond_up_sand_opt(const CQState& cq, AlphaOrder alpha,
                                     const DescentOptions& options) {
  return cond_up_sand_view(view_of(cq), alpha, options);
}

CondOptResult renyi_cond_up_petz_opt(const DensityMatrix& joint, AlphaOrder alpha,
                                     const DescentOptions& options) {
  const ConditionalJoint v = view_of(joint);
  if (alpha.near_one()) return CondOptResult{cond_entropy_view(v), v.env_marginal};
  const Real a = alpha.value();
  if (a > 2.0 + 1e-12) {
    throw AlphaOutOfRange("renyi_cond_up_petz: order " + format_real(a) + " above 2");
  }
  return conditional_up(v, alpha, false, options);
}

Real renyi_cond_up_sand(const DensityMatrix& joint, AlphaOrder alpha) {
  return renyi_cond_up_sand_opt(joint, alpha).value;
}

Real renyi_cond_up_sand(const CQState& cq, AlphaOrder alpha) {
  return renyi_cond_up_sand_opt(cq, alpha).value;
}

Real renyi_cond_up_petz(const DensityMatrix& joint, AlphaOrder alpha) {
  return renyi_cond_up_petz_opt(joint, alpha).value;
}

}  // namespace corex
