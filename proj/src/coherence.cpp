#include "corex/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace corex {
namespace {

constexpr Real kBigPenalty = 1e100;

// Softmax with the usual max shift; returns a strictly positive distribution.
RealVector softmax(const RealVector& t) {
  const Real shift = t.maxCoeff();
  RealVector q = (t.array() - shift).exp();
  q /= q.sum();
  return q;
}

RealVector log_clamped(const RealVector& p, Real floor_log = -600.0) {
  RealVector t(p.size());
  for (Index i = 0; i < p.size(); ++i) {
    t[i] = p[i] > 0.0 ? std::max(std::log(p[i]), floor_log) : floor_log;
  }
  return t;
}

std::vector<RealVector> diagonal_starts(const DensityMatrix& rho,
                                        const RealVector& closed_form_seed) {
  const Index d = rho.dim();
  std::vector<RealVector> starts;
  starts.push_back(RealVector::Zero(d));
  starts.push_back(log_clamped(rho.diagonal()));
  if (closed_form_seed.size() == d) {
    starts.push_back(log_clamped(closed_form_seed));
  }
  SplitMix64 rng(0x5EEDD1A60ULL);
  for (int r = 0; r < 3; ++r) {
    RealVector t(d);
    for (Index i = 0; i < d; ++i) t[i] = rng.next_gaussian();
    starts.push_back(t);
  }
  return starts;
}

Real minimize_over_diagonal(const Objective& f,
                            const std::vector<RealVector>& starts,
                            const DescentOptions& options) {
  DescentOptions opts = options;
  opts.improvement_tol = std::min(opts.improvement_tol, 1e-12);
  return minimize_multistart(f, starts, opts).value;
}

// Amplitudes of the Bloch vector (x, y, z), assumed on the sphere.
Vector pure_from_bloch(Real x, Real y, Real z) {
  const Real theta = std::acos(std::clamp(z, -1.0, 1.0));
  const Real c = std::cos(theta / 2.0);
  const Real s = std::sin(theta / 2.0);
  const Real rxy = std::hypot(x, y);
  Complex phase = rxy > 0.0 ? Complex(x / rxy, y / rxy) : Complex(1.0, 0.0);
  Vector psi(2);
  psi[0] = Complex(c, 0.0);
  psi[1] = phase * s;
  return psi;
}

Real ensemble_cost(const Matrix& psi) {
  KahanSum cost;
  for (Index j = 0; j < psi.cols(); ++j) {
    const Real pj = psi.col(j).squaredNorm();
    if (pj <= tol::kZeroClip) continue;
    const Real log_pj = std::log2(pj);
    for (Index x = 0; x < psi.rows(); ++x) {
      const Real w = std::norm(psi(x, j));
      if (w <= 0.0) continue;
      cost.add(w * (log_pj - std::log2(w)));
    }
  }
  return cost.value();
}

}  // namespace

DensityMatrix density_from_bloch(const QubitBloch& b) {
  const Real r = std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z);
  if (r > 1.0 + 1e-12) throw BlochOutOfBall("Bloch vector has norm > 1");
  Matrix m(2, 2);
  m(0, 0) = Complex(0.5 * (1.0 + b.z), 0.0);
  m(1, 1) = Complex(0.5 * (1.0 - b.z), 0.0);
  m(0, 1) = Complex(0.5 * b.x, -0.5 * b.y);
  m(1, 0) = Complex(0.5 * b.x, 0.5 * b.y);
  return DensityMatrix(m);
}

QubitBloch bloch_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimMismatch("Bloch coordinates need a qubit");
  const Matrix& m = rho.matrix();
  QubitBloch b;
  b.x = 2.0 * m(0, 1).real();
  b.y = -2.0 * m(0, 1).imag();
  b.z = m(0, 0).real() - m(1, 1).real();
  return b;
}

Real c_r(const DensityMatrix& rho) {
  const Real diag_entropy = shannon_entropy(rho.diagonal());
  const Real state_entropy = shannon_entropy(rho.spectrum().eigenvalues);
  return std::max(0.0, diag_entropy - state_entropy);
}

Real c_r_alpha_petz(const DensityMatrix& rho, AlphaOrder alpha,
                    const DescentOptions& options) {
  const Real a = alpha.value();
  if (!((a > 0.0 && a < 1.0) || (a > 1.0 && a <= 2.0))) {
    throw AlphaOutOfRange("Petz order must lie in (0,1) or (1,2]");
  }
  if (alpha.near_one()) return c_r(rho);

  const Matrix rho_a = matrix_power_psd(rho.matrix(), a);
  RealVector diag_pow = rho_a.diagonal().real().cwiseMax(0.0);
  // The minimizer is proportional to the 1/a power of these diagonal weights;
  // keep it as a start and let the descent confirm it.
  RealVector seed(diag_pow.size());
  for (Index i = 0; i < seed.size(); ++i) seed[i] = std::pow(diag_pow[i], 1.0 / a);
  if (seed.sum() > 0.0) seed /= seed.sum();

  Objective f = [&](const RealVector& t) -> Real {
    const RealVector q = softmax(t);
    KahanSum sum;
    for (Index i = 0; i < q.size(); ++i) {
      if (diag_pow[i] <= 0.0) continue;
      sum.add(diag_pow[i] * std::pow(q[i], 1.0 - a));
    }
    const Real total = sum.value();
    if (!(total > 0.0) || !std::isfinite(total)) return kBigPenalty;
    return std::log2(total) / (a - 1.0);
  };
  return std::max(0.0, minimize_over_diagonal(f, diagonal_starts(rho, seed), options));
}

Real c_r_alpha_sand(const DensityMatrix& rho, AlphaOrder alpha,
                    const DescentOptions& options) {
  const Real a = alpha.value();
  if (a < 0.5) throw AlphaOutOfRange("sandwiched order must be >= 1/2");
  if (alpha.near_one()) return c_r(rho);

  const Real p = (1.0 - a) / (2.0 * a);
  const SpectralDecomposition eig = rho.spectrum();
  const bool pure = eig.eigenvalues[eig.eigenvalues.size() - 1] >= 1.0 - tol::kPureTop;

  RealVector seed;
  if (pure && std::abs(2.0 * a - 1.0) > 1e-6) {
    // On pure states the optimum is the diagonal raised to a/(2a-1).
    const Real expo = a / (2.0 * a - 1.0);
    RealVector w = rho.diagonal();
    seed.resize(w.size());
    for (Index i = 0; i < w.size(); ++i) {
      seed[i] = w[i] > 0.0 ? std::pow(w[i], expo) : 0.0;
    }
    if (seed.sum() > 0.0) seed /= seed.sum();
  }

  const Matrix& m = rho.matrix();
  Objective f = [&](const RealVector& t) -> Real {
    const RealVector q = softmax(t);
    RealVector qp(q.size());
    for (Index i = 0; i < q.size(); ++i) qp[i] = std::pow(q[i], p);
    Matrix conj = qp.asDiagonal() * m * qp.asDiagonal();
    RealVector mu;
    try {
      mu = eigenvalues_only(conj);
    } catch (const Error&) {
      return kBigPenalty;
    }
    // Eigenvalues at the roundoff scale of the top one are noise; powers
    // below 1 would otherwise inflate the sum by ~sqrt(eps).
    const Real floor = 1e-14 * std::max(1e-300, mu.cwiseAbs().maxCoeff());
    KahanSum sum;
    for (Index i = 0; i < mu.size(); ++i) {
      if (mu[i] > floor) sum.add(std::pow(mu[i], a));
    }
    const Real total = sum.value();
    if (!(total > 0.0) || !std::isfinite(total)) return kBigPenalty;
    return std::log2(total) / (a - 1.0);
  };
  return std::max(0.0, minimize_over_diagonal(f, diagonal_starts(rho, seed), options));
}

QubitMeasures qubit_measures(const QubitBloch& b) {
  const Real r2 = b.x * b.x + b.y * b.y + b.z * b.z;
  if (r2 > 1.0 + 1e-12) throw BlochOutOfBall("Bloch vector has norm > 1");
  const Real r = std::sqrt(std::min(r2, 1.0));
  QubitMeasures out;
  out.c_r = binary_entropy(0.5 * (1.0 + b.z)) - binary_entropy(0.5 * (1.0 + r));
  const Real w2 = std::max(0.0, 1.0 - b.x * b.x - b.y * b.y);
  out.c_f = binary_entropy(0.5 * (1.0 + std::sqrt(w2)));
  return out;
}

ConvexRoofResult c_f(const DensityMatrix& rho, int restarts) {
  const Index d = rho.dim();
  const SpectralDecomposition eig = rho.spectrum();
  const RealVector& lam = eig.eigenvalues;
  ConvexRoofResult out;

  // Incoherent states have zero roof; the basis decomposition certifies it.
  bool incoherent = true;
  for (Index i = 0; i < d && incoherent; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      if (std::abs(rho.matrix()(i, j)) > tol::kZeroClip) {
        incoherent = false;
        break;
      }
    }
  }
  if (incoherent) {
    out.value = 0.0;
    out.exact = true;
    for (Index i = 0; i < d; ++i) {
      const Real pi = rho.diagonal()[i];
      if (pi <= tol::kZeroClip) continue;
      Vector basis = Vector::Zero(d);
      basis[i] = Complex(1.0, 0.0);
      out.decomposition.probabilities.push_back(pi);
      out.decomposition.states.push_back(basis);
    }
    return out;
  }

  if (lam[d - 1] >= 1.0 - tol::kPureTop) {
    Vector psi = eig.eigenvectors.col(d - 1);
    psi /= psi.norm();
    out.value = shannon_entropy(psi.cwiseAbs2());
    out.exact = true;
    out.decomposition.probabilities = {1.0};
    out.decomposition.states = {psi};
    return out;
  }

  if (d == 2) {
    const QubitBloch b = bloch_from_density(rho);
    out.value = qubit_measures(b).c_f;
    out.exact = true;
    const Real w = std::sqrt(std::max(0.0, 1.0 - b.x * b.x - b.y * b.y));
    const Real p_up = std::clamp(0.5 * (1.0 + (w > 0.0 ? b.z / w : 0.0)), 0.0, 1.0);
    if (p_up > 0.0) {
      out.decomposition.probabilities.push_back(p_up);
      out.decomposition.states.push_back(pure_from_bloch(b.x, b.y, w));
    }
    if (p_up < 1.0) {
      out.decomposition.probabilities.push_back(1.0 - p_up);
      out.decomposition.states.push_back(pure_from_bloch(b.x, b.y, -w));
    }
    return out;
  }

  // Upper bound by descent over ensembles psi_j = sum_i U_ji sqrt(lam_i) v_i
  // with U an isometry obtained from a polar retraction of a free complex
  // matrix G. Ensemble size rank^2 suffices for an exact roof in principle.
  Index rank = 0;
  for (Index i = 0; i < d; ++i) {
    if (lam[i] > tol::kZeroClip) ++rank;
  }
  const Index n_ens = rank * rank;
  Matrix carrier(d, rank);
  RealVector roots(rank);
  for (Index i = 0, c = 0; i < d; ++i) {
    if (lam[i] <= tol::kZeroClip) continue;
    carrier.col(c) = eig.eigenvectors.col(i);
    roots[c] = std::sqrt(lam[i]);
    ++c;
  }
  const Matrix base = carrier * roots.asDiagonal();

  const Index n_params = 2 * n_ens * rank;
  auto unpack = [&](const RealVector& t) {
    Matrix g(n_ens, rank);
    for (Index j = 0; j < n_ens; ++j) {
      for (Index i = 0; i < rank; ++i) {
        const Index at = 2 * (j * rank + i);
        g(j, i) = Complex(t[at], t[at + 1]);
      }
    }
    return g;
  };

  Objective f = [&](const RealVector& t) -> Real {
    const Matrix g = unpack(t);
    const Matrix h = g.adjoint() * g;
    SpectralDecomposition he;
    try {
      he = eig_hermitian(h, 1e-6);
    } catch (const Error&) {
      return kBigPenalty;
    }
    if (he.eigenvalues[0] < 1e-12) return kBigPenalty;
    Matrix inv_root = he.apply([](Real v) { return 1.0 / std::sqrt(v); });
    const Matrix u = g * inv_root;
    const Matrix psi = base * u.transpose();
    return ensemble_cost(psi);
  };

  std::vector<RealVector> starts;
  RealVector ident = RealVector::Zero(n_params);
  for (Index i = 0; i < rank; ++i) ident[2 * (i * rank + i)] = 1.0;
  starts.push_back(ident);
  SplitMix64 rng(0x600F5EEDULL);
  for (int r = 1; r < std::max(1, restarts); ++r) {
    RealVector t(n_params);
    for (Index i = 0; i < n_params; ++i) t[i] = rng.next_gaussian();
    starts.push_back(t);
  }

  DescentOptions opts;
  opts.max_iterations = 400;
  DescentResult best = minimize_multistart(f, starts, opts);

  out.value = std::max(best.value, 0.0);
  out.exact = false;
  const Matrix g = unpack(best.point);
  const Matrix h = g.adjoint() * g;
  const Matrix u = g * eig_hermitian(h, 1e-6).apply([](Real v) {
    return 1.0 / std::sqrt(std::max(v, 1e-300));
  });
  const Matrix psi = base * u.transpose();
  for (Index j = 0; j < psi.cols(); ++j) {
    const Real pj = psi.col(j).squaredNorm();
    if (pj <= tol::kZeroClip) continue;
    out.decomposition.probabilities.push_back(pj);
    out.decomposition.states.push_back(psi.col(j) / std::sqrt(pj));
  }
  return out;
}

bool rates_coincide(const DensityMatrix& rho, Real tolerance) {
  const Index d = rho.dim();
  const RealVector& lam = rho.spectrum().eigenvalues;
  if (lam[d - 1] >= 1.0 - tolerance) return true;

  // Union of basis indices coupled by off-diagonal support; the rates agree
  // exactly when each coupled block carries a pure restriction.
  std::vector<Index> parent(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) parent[static_cast<std::size_t>(i)] = i;
  std::function<Index(Index)> find = [&](Index i) -> Index {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      if (std::abs(rho.matrix()(i, j)) > tolerance) {
        parent[static_cast<std::size_t>(find(i))] = find(j);
      }
    }
  }
  std::vector<std::vector<Index>> blocks(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    blocks[static_cast<std::size_t>(find(i))].push_back(i);
  }
  for (const auto& block : blocks) {
    if (block.size() <= 1) continue;
    const Index b = static_cast<Index>(block.size());
    Matrix sub(b, b);
    for (Index i = 0; i < b; ++i) {
      for (Index j = 0; j < b; ++j) {
        sub(i, j) = rho.matrix()(block[static_cast<std::size_t>(i)],
                                 block[static_cast<std::size_t>(j)]);
      }
    }
    const Real weight = sub.trace().real();
    if (weight <= tolerance) continue;
    const RealVector mu = eigenvalues_only(sub);
    if (mu[b - 1] < (1.0 - tolerance) * weight) return false;
  }
  return true;
}

}  // namespace corex
