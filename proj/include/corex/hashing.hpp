#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corex/states.hpp"

namespace corex {

// Family of GF(2)-linear maps {0,1}^m -> {0,1}^k given by Toeplitz matrices.
// A seed of m+k-1 bits s_0..s_{m+k-2} fixes the matrix T[i][j] = s_{k-1+j-i}.
struct ToeplitzFamily {
  ToeplitzFamily(int label_bits, int output_bits);

  int label_bits = 1;   // m
  int output_bits = 1;  // k, at most m

  int seed_bits() const { return label_bits + output_bits - 1; }
  std::uint64_t size() const { return std::uint64_t(1) << seed_bits(); }
};

// One family member. Bit conventions, fixed for reproducible outputs:
// label bit a_j = (label >> (m-1-j)) & 1, output bit z_i sits at (k-1-i),
// seed bit s_t = (seed_index >> t) & 1.
class HashFunction {
 public:
  HashFunction(const ToeplitzFamily& family, std::uint64_t seed_index);

  int label_bits() const { return family_.label_bits; }
  int output_bits() const { return family_.output_bits; }
  std::uint64_t seed_index() const { return seed_index_; }
  std::string seed_hex() const;
  const std::vector<std::uint64_t>& row_masks() const { return rows_; }

  // T * label over GF(2), each output bit a parity of masked label bits.
  std::uint64_t apply(std::uint64_t label) const;

 private:
  ToeplitzFamily family_;
  std::uint64_t seed_index_ = 0;
  std::vector<std::uint64_t> rows_;
};

std::uint64_t apply_hash(const HashFunction& f, std::uint64_t label);

// Uniform member draw from the deterministic RNG stream.
HashFunction sample_hash(const ToeplitzFamily& family, std::uint64_t rng_seed);
HashFunction sample_hash(const ToeplitzFamily& family, SplitMix64& rng);

// Exhaustive pairwise collision audit. Counts are exact integers; the family
// passes when worst_count * 2^k <= family size for every label pair.
struct Universal2Certificate {
  bool universal = false;
  std::uint64_t family_size = 0;
  std::uint64_t worst_count = 0;
  std::uint64_t numerator = 0;    // worst_count / family_size, reduced
  std::uint64_t denominator = 1;
  Real worst_probability = 0.0;
  Real bound = 0.0;  // 2^{-k}
  std::uint64_t witness_a = 0;
  std::uint64_t witness_b = 0;
};

// For Toeplitz members collisions depend only on the label difference, so the
// count per pair is 2^{seed_bits - rank} with rank taken over GF(2).
Universal2Certificate certify_universal2(const ToeplitzFamily& family,
                                         const Caps& caps = Caps{});

// Same audit over an explicit collection of linear members.
Universal2Certificate certify_members(const std::vector<HashFunction>& members);

// Pushes the classical register through f: P(z) sums the preimage weights and
// each conditional environment is the probability-weighted mixture.
CQState hash_cq(const CQState& cq, const HashFunction& f);

enum class AverageMode { kExact, kMonteCarlo };

struct MetricStats {
  Real mean = 0.0;
  Real std_err = 0.0;
  std::uint64_t members = 0;
};

struct FamilyAverage {
  RealVector mean;
  RealVector std_err;
  std::uint64_t members = 0;
};

using CqMetric = std::function<RealVector(const CQState&)>;

// Averages vector-valued metrics of hash_cq(cq, member) over the family:
// every member in exact mode (std_err = 0), `samples` uniformly drawn members
// in Monte Carlo mode (std_err = sample standard error). Member evaluations
// may run on `workers` threads; accumulation order is fixed regardless.
FamilyAverage average_over_family(const CQState& cq, const ToeplitzFamily& family,
                                  AverageMode mode, std::uint64_t samples,
                                  std::uint64_t rng_seed, int workers, const CqMetric& metrics,
                                  const Caps& caps = Caps{});

// Family expectation of the trace-distance security metric.
MetricStats expected_d1(const CQState& cq, const ToeplitzFamily& family, AverageMode mode,
                        std::uint64_t samples, std::uint64_t rng_seed, int workers = 1,
                        const Caps& caps = Caps{});

}  // namespace corex
