#pragma once

#include "corex/coherence.hpp"
#include "corex/hashing.hpp"

namespace corex {

// Trace-distance security metric: Schatten-1 distance between the joint state
// and the ideal uniform-and-independent state, summed blockwise over the
// classical register (the difference is block diagonal). Labels with no atom
// contribute 1/|A| each.
Real d1(const CQState& cq);

// Relative-entropy security metric: log2(label space) - H(A|E).
Real i_prime(const CQState& cq);

// Universal-2 hashing guarantee: sqrt(out_size) * 2^{-H2up/2} with H2up the
// order-2 sandwiched conditional entropy of cq (optimized over sigma).
Real leftover_bound(const CQState& cq, std::uint64_t out_size);
Real leftover_bound_from_entropy(Real h2_up, std::uint64_t out_size);

struct StrategyConfig {
  int copies = 1;   // n
  int k_bits = 1;   // output length; rate = k_bits / n bits per copy
  AverageMode mode = AverageMode::kExact;
  std::uint64_t samples = 256;  // Monte Carlo draws when mode is kMonteCarlo
  std::uint64_t rng_seed = 0x5EC5EED5EC5EEDULL;
  int workers = 1;
  Caps caps{};
};

struct ExponentBound {
  Real value = 0.0;
  Real argmax_s = 0.0;
};

struct ExtractionReport {
  int copies = 1;
  int k_bits = 1;
  Real rate = 0.0;
  AverageMode mode = AverageMode::kExact;
  std::uint64_t samples = 0;  // members actually averaged
  std::uint64_t rng_seed = 0;

  Real c_r = 0.0;
  Real c_f = 0.0;
  bool c_f_exact = false;
  bool coincide = false;

  Real d1_mean = 0.0;
  Real d1_std_err = 0.0;
  Real iprime_mean = 0.0;
  Real iprime_std_err = 0.0;

  Real cond2_up = 0.0;  // order-2 conditional entropy of the n-copy state
  Real leftover = 0.0;
  Real finite_length = 0.0;
  Real finite_length_s = 0.0;
  ExponentBound exp_d1;
  ExponentBound exp_iprime;
};

// The measured-and-hashed strategy end to end: purify, measure in the
// computational basis, take n copies, average d1 and I' over the Toeplitz
// family with m = n * ceil(log2 dim), and attach every bound of the report.
ExtractionReport run_strategy(const DensityMatrix& rho_a, const StrategyConfig& cfg);

// Error-exponent lower bounds as functions of the rate, maximized over
// s in [0,1] on a 0.01 grid with golden-section refinement to 1e-6.
ExponentBound exponent_bound_d1(const DensityMatrix& rho_a, Real rate);
ExponentBound exponent_bound_iprime(const DensityMatrix& rho_a, Real rate);

// Computable finite-length upper bound on the expected d1 at blocklength n:
// (4 + sqrt(v_n)) * 2^{(s/2) n rate} * sqrt(Q(s)), where v_n counts the
// distinct eigenvalues of sigma_E^{(x)n}, sigma_E is fixed to the environment
// marginal, and Q(s) sums the pinched spectrum. s = 0 returns 4 + sqrt(v_n).
Real finite_length_bound(const DensityMatrix& rho_a, int copies, Real rate, Real s,
                         const Caps& caps = Caps{});

// Minimum of finite_length_bound over the s grid {0, 0.01, ..., 1}.
struct FiniteLengthResult {
  Real value = 0.0;
  Real best_s = 0.0;
};
FiniteLengthResult finite_length_best(const DensityMatrix& rho_a, int copies, Real rate,
                                      const Caps& caps = Caps{});

// Empirical exponent -(1/n) log2 d1_mean for n = 1..n_max at a fixed target
// rate, with k_bits = max(1, ceil(rate * n)) and the analytic exponent bound
// at the realized rate attached for overlay. d1_mean below 1e-15 reports the
// +infinity sentinel.
struct TrendPoint {
  int copies = 1;
  int k_bits = 1;
  Real rate = 0.0;
  Real d1_mean = 0.0;
  Real d1_std_err = 0.0;
  Real exponent = 0.0;
  Real bound = 0.0;
};
std::vector<TrendPoint> exponent_trend(const DensityMatrix& rho_a, Real rate, int n_max,
                                       const StrategyConfig& defaults);

}  // namespace corex
