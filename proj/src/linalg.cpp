#include "corex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

namespace corex {

Real SplitMix64::next_gaussian() {
  const Real u1 = next_unit();
  const Real u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = static_cast<std::size_t>(t); i < count;
           i += static_cast<std::size_t>(n_threads)) {
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::string format_real(Real value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_hex64(std::uint64_t value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(value));
  return buf;
}

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

Matrix SpectralDecomposition::apply(const std::function<Real(Real)>& f) const {
  RealVector mapped(eigenvalues.size());
  for (Index i = 0; i < eigenvalues.size(); ++i) mapped[i] = f(eigenvalues[i]);
  return eigenvectors * mapped.asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition eig_hermitian(const Matrix& m, Real hermitian_tol) {
  if (m.rows() != m.cols()) {
    throw DimMismatch("eig_hermitian: matrix is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
  }
  const Real skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (skew > hermitian_tol) {
    throw NotHermitian("eig_hermitian: skew part " + format_real(skew) + " exceeds tolerance " +
                       format_real(hermitian_tol));
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("eig_hermitian: eigensolver failed on a " + std::to_string(m.rows()) +
                        "-dim matrix");
  }
  return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

void check_tensor_cap(Index rows, Index cols, Index dim_cap) {
  if (rows > dim_cap || cols > dim_cap) {
    throw DimensionOverflow("tensor: output " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " exceeds cap " + std::to_string(dim_cap));
  }
}

}  // namespace

Matrix tensor(const Matrix& a, const Matrix& b, Index dim_cap) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  check_tensor_cap(rows, cols, dim_cap);
  Matrix out(rows, cols);
  for (Index ia = 0; ia < a.rows(); ++ia) {
    for (Index ja = 0; ja < a.cols(); ++ja) {
      out.block(ia * b.rows(), ja * b.cols(), b.rows(), b.cols()) = a(ia, ja) * b;
    }
  }
  return out;
}

Vector tensor(const Vector& a, const Vector& b, Index dim_cap) {
  const Index size = a.size() * b.size();
  check_tensor_cap(size, 1, dim_cap);
  Vector out(size);
  for (Index ia = 0; ia < a.size(); ++ia) out.segment(ia * b.size(), b.size()) = a[ia] * b;
  return out;
}

Matrix partial_trace(const Matrix& joint, const std::vector<Index>& dims,
                     const std::vector<int>& keep) {
  if (joint.rows() != joint.cols()) {
    throw DimMismatch("partial_trace: matrix is not square");
  }
  Index total = 1;
  for (Index d : dims) {
    if (d <= 0) throw DimMismatch("partial_trace: nonpositive subsystem dimension");
    total *= d;
  }
  if (total != joint.rows()) {
    throw DimMismatch("partial_trace: dims product " + std::to_string(total) +
                      " does not match matrix side " + std::to_string(joint.rows()));
  }
  const int n_sub = static_cast<int>(dims.size());
  std::vector<bool> kept(static_cast<std::size_t>(n_sub), false);
  int prev = -1;
  for (int k : keep) {
    if (k <= prev || k >= n_sub) {
      throw BadSplit("partial_trace: keep indices must be strictly increasing and in range");
    }
    kept[static_cast<std::size_t>(k)] = true;
    prev = k;
  }

  // Strides of each subsystem in the flattened index, slowest axis first.
  std::vector<Index> stride(static_cast<std::size_t>(n_sub), 1);
  for (int s = n_sub - 2; s >= 0; --s) {
    stride[static_cast<std::size_t>(s)] =
        stride[static_cast<std::size_t>(s + 1)] * dims[static_cast<std::size_t>(s + 1)];
  }

  // Enumerate the flattened offsets contributed by the kept and traced parts.
  auto offsets_for = [&](bool want_kept) {
    std::vector<Index> offsets{0};
    for (int s = 0; s < n_sub; ++s) {
      if (kept[static_cast<std::size_t>(s)] != want_kept) continue;
      const Index d = dims[static_cast<std::size_t>(s)];
      const Index st = stride[static_cast<std::size_t>(s)];
      std::vector<Index> next;
      next.reserve(offsets.size() * static_cast<std::size_t>(d));
      for (Index base : offsets) {
        for (Index v = 0; v < d; ++v) next.push_back(base + v * st);
      }
      offsets = std::move(next);
    }
    return offsets;
  };
  const std::vector<Index> kept_off = offsets_for(true);
  const std::vector<Index> traced_off = offsets_for(false);

  const Index out_dim = static_cast<Index>(kept_off.size());
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Index r = 0; r < out_dim; ++r) {
    for (Index c = 0; c < out_dim; ++c) {
      Complex acc(0.0, 0.0);
      for (Index t : traced_off) {
        acc += joint(kept_off[static_cast<std::size_t>(r)] + t,
                     kept_off[static_cast<std::size_t>(c)] + t);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Real trace_norm(const Matrix& m, Real hermitian_tol) {
  const SpectralDecomposition eig = eig_hermitian(m, hermitian_tol);
  KahanSum sum;
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) sum.add(std::abs(eig.eigenvalues[i]));
  return sum.value();
}

RealVector eigenvalues_only(const Matrix& m, Real hermitian_tol) {
  if (m.rows() != m.cols()) {
    throw DimMismatch("eigenvalues_only: matrix is not square");
  }
  // Inputs here are often products of well-conditioned Hermitian factors whose
  // roundoff skew scales with the entry magnitude, so the check is relative.
  const Real scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const Real skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (skew > hermitian_tol * scale) {
    throw NotHermitian("eigenvalues_only: skew part " + format_real(skew) +
                       " exceeds tolerance " + format_real(hermitian_tol * scale));
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("eigenvalues_only: eigensolver failed on a " +
                        std::to_string(m.rows()) + "-dim matrix");
  }
  return solver.eigenvalues();
}

Matrix spectral_apply(const Matrix& m, const std::function<Real(Real)>& f, Real zero_clip) {
  const SpectralDecomposition eig = eig_hermitian(m);
  RealVector mapped(eig.eigenvalues.size());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const Real v = f(eig.eigenvalues[i]);
    if (!std::isfinite(v) && eig.eigenvalues[i] > zero_clip) {
      throw DomainError("spectral_apply: function not finite at eigenvalue " +
                        format_real(eig.eigenvalues[i]));
    }
    mapped[i] = std::isfinite(v) ? v : 0.0;
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix matrix_power_psd(const Matrix& m, Real p, Real zero_clip) {
  const SpectralDecomposition eig = eig_hermitian(m);
  return eig.apply([p, zero_clip](Real lambda) {
    if (lambda <= zero_clip) return 0.0;
    return std::pow(lambda, p);
  });
}

Matrix matrix_log2_psd(const Matrix& m, Real zero_clip) {
  const SpectralDecomposition eig = eig_hermitian(m);
  return eig.apply([zero_clip](Real lambda) {
    if (lambda <= zero_clip) return 0.0;
    return std::log2(lambda);
  });
}

std::vector<SpectralGroup> group_spectrum(const SpectralDecomposition& eig, Real group_tol) {
  std::vector<SpectralGroup> groups;
  const Index n = eig.eigenvalues.size();
  if (n == 0) return groups;
  const Real scale = std::max(1.0, std::abs(eig.eigenvalues[n - 1]));
  const Real gap = group_tol * scale;
  SpectralGroup current{eig.eigenvalues[0], {0}};
  for (Index i = 1; i < n; ++i) {
    if (eig.eigenvalues[i] - eig.eigenvalues[i - 1] <= gap) {
      current.columns.push_back(i);
    } else {
      groups.push_back(std::move(current));
      current = SpectralGroup{eig.eigenvalues[i], {i}};
    }
  }
  groups.push_back(std::move(current));
  return groups;
}

Matrix pinch(const Matrix& sigma, const Matrix& rho, Real group_tol) {
  if (sigma.rows() != rho.rows() || sigma.cols() != rho.cols()) {
    throw DimMismatch("pinch: sigma and rho dimensions differ");
  }
  const SpectralDecomposition eig = eig_hermitian(sigma);
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const SpectralGroup& g : group_spectrum(eig, group_tol)) {
    Matrix basis(rho.rows(), static_cast<Index>(g.columns.size()));
    for (std::size_t c = 0; c < g.columns.size(); ++c) {
      basis.col(static_cast<Index>(c)) = eig.eigenvectors.col(g.columns[c]);
    }
    const Matrix proj = basis * basis.adjoint();
    out += proj * rho * proj;
  }
  return out;
}

}  // namespace corex
