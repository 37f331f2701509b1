#include "corex/hashing.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <utility>

#include "corex/extraction.hpp"

namespace corex {
namespace {

std::uint64_t label_cap(int bits) { return std::uint64_t(1) << bits; }

// GF(2) rank of bit-packed rows.
int gf2_rank(std::vector<std::uint64_t> rows) {
  int rank = 0;
  for (int bit = 63; bit >= 0; --bit) {
    const std::uint64_t mask = std::uint64_t(1) << bit;
    std::size_t pivot = rows.size();
    for (std::size_t r = static_cast<std::size_t>(rank); r < rows.size(); ++r) {
      if (rows[r] & mask) {
        pivot = r;
        break;
      }
    }
    if (pivot == rows.size()) continue;
    std::swap(rows[static_cast<std::size_t>(rank)], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != static_cast<std::size_t>(rank) && (rows[r] & mask)) {
        rows[r] ^= rows[static_cast<std::size_t>(rank)];
      }
    }
    ++rank;
  }
  return rank;
}

Universal2Certificate finish_certificate(std::uint64_t family_size, int output_bits,
                                         std::uint64_t worst_count, std::uint64_t witness_b) {
  Universal2Certificate cert;
  cert.family_size = family_size;
  cert.worst_count = worst_count;
  const std::uint64_t g = std::gcd(worst_count == 0 ? family_size : worst_count, family_size);
  cert.numerator = worst_count / (g == 0 ? 1 : g);
  cert.denominator = family_size / (g == 0 ? 1 : g);
  cert.worst_probability = static_cast<Real>(worst_count) / static_cast<Real>(family_size);
  cert.bound = std::ldexp(1.0, -output_bits);
  cert.witness_a = 0;
  cert.witness_b = witness_b;
  // Exact integer form of worst_probability <= 2^{-k}.
  cert.universal = worst_count * label_cap(output_bits) <= family_size;
  return cert;
}

}  // namespace

ToeplitzFamily::ToeplitzFamily(int label_bits_in, int output_bits_in)
    : label_bits(label_bits_in), output_bits(output_bits_in) {
  if (output_bits < 1 || label_bits < output_bits) {
    throw LengthMismatch("ToeplitzFamily: need 1 <= output bits <= label bits, got m=" +
                         std::to_string(label_bits) + " k=" + std::to_string(output_bits));
  }
  if (label_bits + output_bits - 1 > 62) {
    throw TooLarge("ToeplitzFamily: seed space 2^" + std::to_string(label_bits + output_bits - 1) +
                   " does not fit the seed integer");
  }
}

HashFunction::HashFunction(const ToeplitzFamily& family, std::uint64_t seed_index)
    : family_(family), seed_index_(seed_index) {
  if (seed_index >= family.size()) {
    throw LengthMismatch("HashFunction: seed index " + std::to_string(seed_index) +
                         " outside family of size " + std::to_string(family.size()));
  }
  const int m = family_.label_bits;
  const int k = family_.output_bits;
  rows_.assign(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i) {
    std::uint64_t mask = 0;
    for (int j = 0; j < m; ++j) {
      const int t = k - 1 + j - i;
      if ((seed_index_ >> t) & 1ULL) mask |= std::uint64_t(1) << (m - 1 - j);
    }
    rows_[static_cast<std::size_t>(i)] = mask;
  }
}

std::string HashFunction::seed_hex() const { return format_hex64(seed_index_); }

std::uint64_t HashFunction::apply(std::uint64_t label) const {
  const int m = family_.label_bits;
  const int k = family_.output_bits;
  if (label >= label_cap(m)) {
    throw LengthMismatch("apply: label " + std::to_string(label) + " needs more than " +
                         std::to_string(m) + " bits");
  }
  std::uint64_t out = 0;
  for (int i = 0; i < k; ++i) {
    const int parity = std::popcount(rows_[static_cast<std::size_t>(i)] & label) & 1;
    if (parity) out |= std::uint64_t(1) << (k - 1 - i);
  }
  return out;
}

std::uint64_t apply_hash(const HashFunction& f, std::uint64_t label) { return f.apply(label); }

HashFunction sample_hash(const ToeplitzFamily& family, std::uint64_t rng_seed) {
  SplitMix64 rng(rng_seed);
  return sample_hash(family, rng);
}

HashFunction sample_hash(const ToeplitzFamily& family, SplitMix64& rng) {
  return HashFunction(family, rng.next() & (family.size() - 1));
}

Universal2Certificate certify_universal2(const ToeplitzFamily& family, const Caps& caps) {
  if (family.label_bits > 10) {
    throw TooLarge("certify_universal2: exhaustive pair audit capped at 10 label bits, got " +
                   std::to_string(family.label_bits));
  }
  if (family.size() > static_cast<std::uint64_t>(caps.family_size)) {
    throw TooLarge("certify_universal2: family size " + std::to_string(family.size()) +
                   " exceeds cap " + std::to_string(caps.family_size));
  }
  const int m = family.label_bits;
  const int k = family.output_bits;
  // Members are linear, so Pr{f(a) = f(b)} = Pr{f(a xor b) = 0} and the
  // collision count for difference d is 2^{seed_bits - rank} with the rank of
  // the k parity masks acting on the seed bits.
  int min_rank = k + 1;
  std::uint64_t witness = 1;
  for (std::uint64_t d = 1; d < label_cap(m); ++d) {
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) {
      std::uint64_t w = 0;
      for (int j = 0; j < m; ++j) {
        if ((d >> (m - 1 - j)) & 1ULL) w |= std::uint64_t(1) << (k - 1 + j - i);
      }
      rows[static_cast<std::size_t>(i)] = w;
    }
    const int rank = gf2_rank(rows);
    if (rank < min_rank) {
      min_rank = rank;
      witness = d;
    }
  }
  const std::uint64_t worst = std::uint64_t(1) << (family.seed_bits() - min_rank);
  return finish_certificate(family.size(), k, worst, witness);
}

Universal2Certificate certify_members(const std::vector<HashFunction>& members) {
  if (members.empty()) throw DomainError("certify_members: empty collection");
  const int m = members.front().label_bits();
  const int k = members.front().output_bits();
  for (const HashFunction& f : members) {
    if (f.label_bits() != m || f.output_bits() != k) {
      throw DimMismatch("certify_members: mixed family shapes");
    }
  }
  if (m > 10) {
    throw TooLarge("certify_members: exhaustive pair audit capped at 10 label bits");
  }
  std::uint64_t worst = 0;
  std::uint64_t witness = 1;
  for (std::uint64_t d = 1; d < label_cap(m); ++d) {
    std::uint64_t count = 0;
    for (const HashFunction& f : members) {
      if (f.apply(d) == 0) ++count;
    }
    if (count > worst) {
      worst = count;
      witness = d;
    }
  }
  return finish_certificate(members.size(), k, worst, witness);
}

CQState hash_cq(const CQState& cq, const HashFunction& f) {
  if (cq.label_space() != label_cap(f.label_bits())) {
    throw LabelMismatch("hash_cq: state labels cover " + std::to_string(cq.label_space()) +
                        " values, hash input covers " +
                        std::to_string(label_cap(f.label_bits())));
  }
  std::map<std::uint64_t, std::pair<Real, Matrix>> merged;
  for (const CQAtom& atom : cq.atoms()) {
    const std::uint64_t z = f.apply(atom.label);
    auto it = merged.find(z);
    if (it == merged.end()) {
      merged.emplace(z, std::make_pair(atom.probability, Matrix(atom.probability * atom.env)));
    } else {
      it->second.first += atom.probability;
      it->second.second += atom.probability * atom.env;
    }
  }
  std::vector<CQAtom> atoms;
  atoms.reserve(merged.size());
  for (const auto& [z, acc] : merged) {
    atoms.push_back(CQAtom{z, acc.first, acc.second / acc.first});
  }
  return CQState(std::move(atoms), label_cap(f.output_bits()), cq.env_dim());
}

FamilyAverage average_over_family(const CQState& cq, const ToeplitzFamily& family,
                                  AverageMode mode, std::uint64_t samples, std::uint64_t rng_seed,
                                  int workers, const CqMetric& metrics, const Caps& caps) {
  if (cq.label_space() > static_cast<std::uint64_t>(caps.label_space)) {
    throw TooLarge("average_over_family: label space " + std::to_string(cq.label_space()) +
                   " exceeds cap " + std::to_string(caps.label_space));
  }
  std::vector<std::uint64_t> indices;
  if (mode == AverageMode::kExact) {
    if (family.size() > static_cast<std::uint64_t>(caps.family_size)) {
      throw TooLarge("average_over_family: family size " + std::to_string(family.size()) +
                     " exceeds exact-mode cap " + std::to_string(caps.family_size));
    }
    indices.resize(family.size());
    for (std::uint64_t i = 0; i < family.size(); ++i) indices[i] = i;
  } else {
    if (samples == 0) throw DomainError("average_over_family: montecarlo needs samples >= 1");
    SplitMix64 rng(rng_seed);
    indices.resize(samples);
    for (std::uint64_t i = 0; i < samples; ++i) indices[i] = rng.next() & (family.size() - 1);
  }

  const std::size_t count = indices.size();
  std::vector<RealVector> rows(count);
  parallel_for(count, workers, [&](std::size_t i) {
    rows[i] = metrics(hash_cq(cq, HashFunction(family, indices[i])));
  });

  const Index width = rows.front().size();
  FamilyAverage out;
  out.members = count;
  out.mean = RealVector::Zero(width);
  out.std_err = RealVector::Zero(width);
  for (Index c = 0; c < width; ++c) {
    KahanSum sum;
    for (std::size_t i = 0; i < count; ++i) sum.add(rows[i][c]);
    out.mean[c] = sum.value() / static_cast<Real>(count);
  }
  if (mode == AverageMode::kMonteCarlo && count > 1) {
    for (Index c = 0; c < width; ++c) {
      KahanSum sq;
      for (std::size_t i = 0; i < count; ++i) {
        const Real delta = rows[i][c] - out.mean[c];
        sq.add(delta * delta);
      }
      const Real variance = sq.value() / static_cast<Real>(count - 1);
      out.std_err[c] = std::sqrt(variance / static_cast<Real>(count));
    }
  }
  return out;
}

MetricStats expected_d1(const CQState& cq, const ToeplitzFamily& family, AverageMode mode,
                        std::uint64_t samples, std::uint64_t rng_seed, int workers,
                        const Caps& caps) {
  const CqMetric metric = [](const CQState& hashed) {
    RealVector v(1);
    v[0] = d1(hashed);
    return v;
  };
  const FamilyAverage avg =
      average_over_family(cq, family, mode, samples, rng_seed, workers, metric, caps);
  return MetricStats{avg.mean[0], avg.std_err[0], avg.members};
}

}  // namespace corex
