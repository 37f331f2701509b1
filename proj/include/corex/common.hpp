#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace corex {

inline constexpr const char* kVersion = "0.1.0";

using Real = double;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotHermitian : Error { explicit NotHermitian(const std::string& w) : Error(w) {} };
struct NotPsd : Error { explicit NotPsd(const std::string& w) : Error(w) {} };
struct BadTrace : Error { explicit BadTrace(const std::string& w) : Error(w) {} };
struct NotUnitary : Error { explicit NotUnitary(const std::string& w) : Error(w) {} };
struct NotTracePreserving : Error { explicit NotTracePreserving(const std::string& w) : Error(w) {} };
struct NoConvergence : Error { explicit NoConvergence(const std::string& w) : Error(w) {} };
struct DimMismatch : Error { explicit DimMismatch(const std::string& w) : Error(w) {} };
struct DimensionOverflow : Error { explicit DimensionOverflow(const std::string& w) : Error(w) {} };
struct BadSplit : Error { explicit BadSplit(const std::string& w) : Error(w) {} };
struct LengthMismatch : Error { explicit LengthMismatch(const std::string& w) : Error(w) {} };
struct LabelMismatch : Error { explicit LabelMismatch(const std::string& w) : Error(w) {} };
struct BadProbabilities : Error { explicit BadProbabilities(const std::string& w) : Error(w) {} };
struct AlphaOutOfRange : Error { explicit AlphaOutOfRange(const std::string& w) : Error(w) {} };
struct BlochOutOfBall : Error { explicit BlochOutOfBall(const std::string& w) : Error(w) {} };
struct DomainError : Error { explicit DomainError(const std::string& w) : Error(w) {} };
struct TooLarge : Error { explicit TooLarge(const std::string& w) : Error(w) {} };
struct ParseError : Error { explicit ParseError(const std::string& w) : Error(w) {} };

namespace tol {
inline constexpr Real kHermitian = 1e-9;         // max |M - M^dag| entry admitted as Hermitian
inline constexpr Real kEigenvalueFloor = -1e-10; // most negative admissible density eigenvalue
inline constexpr Real kUnitTrace = 1e-10;        // |tr - 1| admitted for states and distributions
inline constexpr Real kZeroClip = 1e-12;         // spectrum entries at or below this count as 0
inline constexpr Real kPinchGroup = 1e-9;        // relative gap that merges eigenvalues into one group
inline constexpr Real kAtomDrop = 1e-14;         // classical atoms at or below this weight are dropped
inline constexpr Real kAlphaLimitSwitch = 1e-5;  // |alpha - 1| below this switches to the limit formulas
inline constexpr Real kSupportLeak = 1e-12;      // mass outside a support that triggers the +inf sentinel
inline constexpr Real kUnitary = 1e-9;           // max |U U^dag - I| entry admitted as unitary
inline constexpr Real kPureTop = 1e-8;           // 1 - top eigenvalue admitted as pure
}  // namespace tol

// Hard size limits for exact computations. Exceeding one raises TooLarge or
// DimensionOverflow, which the command line maps to its resource exit code.
struct Caps {
  Index tensor_dim = 4096;            // largest matrix side produced by tensor()
  std::uint64_t label_space = 1024;   // largest classical label alphabet handled exactly
  std::uint64_t family_size = 65536;  // largest hash family enumerated exhaustively
  Index env_dim = 1024;               // largest environment dimension assembled
};

// Deterministic 64-bit generator (SplitMix64, fixed constants). Every random
// choice in the library flows through one of these, seeded explicitly, so runs
// are reproducible bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in the open interval (0, 1).
  Real next_unit() {
    return (static_cast<Real>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, one deviate per call.
  Real next_gaussian();

  // Uniform in [0, n). Modulo bias is negligible for the small n used here.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Compensated (Kahan) accumulator so sums do not depend on chunking order
// beyond rounding of the fixed sequential order.
class KahanSum {
 public:
  void add(Real x) {
    const Real y = x - carry_;
    const Real t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  Real value() const { return sum_; }

 private:
  Real sum_ = 0.0;
  Real carry_ = 0.0;
};

// Runs fn(i) for i in [0, count) on up to `workers` threads. Callers keep
// determinism by writing into preallocated slots indexed by i and reducing
// sequentially afterwards.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

std::string format_real(Real value);                 // printf %.17g, round-trip safe
std::string format_hex64(std::uint64_t value);       // 0x%016x

}  // namespace corex
