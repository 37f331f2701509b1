#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "corex/extraction.hpp"
#include "corex/statespec.hpp"
#include "oracles.hpp"

using namespace corex;

namespace {

CQState uniform_independent_bit(const Matrix& env) {
  std::vector<CQAtom> atoms;
  atoms.push_back({0, 0.5, env});
  atoms.push_back({1, 0.5, env});
  return CQState(atoms, 2, static_cast<Index>(env.rows()));
}

CQState correlated_bit() {
  Matrix e0 = Matrix::Zero(2, 2);
  Matrix e1 = Matrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e1(1, 1) = 1.0;
  std::vector<CQAtom> atoms;
  atoms.push_back({0, 0.5, e0});
  atoms.push_back({1, 0.5, e1});
  return CQState(atoms, 2, 2);
}

CQState deterministic_bit() {
  std::vector<CQAtom> atoms;
  atoms.push_back({0, 1.0, Matrix::Identity(1, 1)});
  return CQState(atoms, 2, 1);
}

Real d1_via_assemble(const CQState& cq) {
  const Index space = cq.label_space();
  const Index d_env = cq.env_dim();
  const Matrix joint = cq.assemble_density().matrix();
  const Matrix rho_env = cq.env_marginal().matrix();
  Matrix ideal = Matrix::Zero(space * d_env, space * d_env);
  for (Index a = 0; a < space; ++a) {
    ideal.block(a * d_env, a * d_env, d_env, d_env) =
        rho_env / static_cast<Real>(space);
  }
  return oracle::trace_norm_svd(joint - ideal);
}

CQState measured_state(const DensityMatrix& rho, int copies, const Caps& caps = Caps{}) {
  const CQState one = measure_computational(purify(rho));
  return cq_tensor_power(one, copies, caps);
}

int gf2_rank(std::vector<std::uint64_t> rows, int bits) {
  int rank = 0;
  for (int col = bits - 1; col >= 0 && rank < static_cast<int>(rows.size()); --col) {
    const std::uint64_t bit = std::uint64_t{1} << col;
    std::size_t pivot = static_cast<std::size_t>(rank);
    while (pivot < rows.size() && !(rows[pivot] & bit)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != static_cast<std::size_t>(rank) && (rows[r] & bit)) {
        rows[r] ^= rows[static_cast<std::size_t>(rank)];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("d1 vanishes exactly for a uniform label with a constant environment") {
  Matrix env(2, 2);
  env << 0.7, 0.1, 0.1, 0.3;
  CHECK(d1(uniform_independent_bit(env)) == 0.0);
}

TEST_CASE("d1 of a perfectly correlated classical bit is 1") {
  CHECK(d1(correlated_bit()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("d1 of a deterministic label in a 1-bit space is 1") {
  // One atom carries all the mass; the missing label contributes 1/2 and the
  // present block contributes |1 - 1/2|.
  CHECK(d1(deterministic_bit()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("d1 stays in [0, 2] and matches the assembled trace norm") {
  oracle::Rng rng(0xD15EC);
  for (int trial = 0; trial < 20; ++trial) {
    const Index space = 2 + (trial % 3);
    const Index d_env = 2 + (trial % 2);
    std::vector<CQAtom> atoms;
    std::vector<Real> ps;
    Real total = 0.0;
    const Index count = 1 + static_cast<Index>(rng.next() % static_cast<std::uint64_t>(space));
    for (Index i = 0; i < count; ++i) {
      const Real w = 0.05 + rng.unit();
      ps.push_back(w);
      total += w;
    }
    for (Index i = 0; i < count; ++i) {
      atoms.push_back({static_cast<std::uint64_t>(i), ps[static_cast<std::size_t>(i)] / total,
                       oracle::random_density(d_env, rng)});
    }
    const CQState cq(atoms, space, d_env);
    const Real value = d1(cq);
    CHECK(value >= 0.0);
    CHECK(value <= 2.0 + 1e-12);
    CHECK(value == doctest::Approx(d1_via_assemble(cq)).epsilon(1e-10));
  }
}

TEST_CASE("i_prime goldens") {
  Matrix env(2, 2);
  env << 0.6, 0.2, 0.2, 0.4;
  CHECK(i_prime(uniform_independent_bit(env)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(i_prime(correlated_bit()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(i_prime(deterministic_bit()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("i_prime equals the relative entropy to the ideal product state") {
  oracle::Rng rng(0x1FACE);
  for (int trial = 0; trial < 10; ++trial) {
    const Index space = 2 + (trial % 2);
    std::vector<CQAtom> atoms;
    Real total = 0.0;
    std::vector<Real> ps;
    for (Index a = 0; a < space; ++a) {
      const Real w = 0.1 + rng.unit();
      ps.push_back(w);
      total += w;
    }
    for (Index a = 0; a < space; ++a) {
      atoms.push_back({static_cast<std::uint64_t>(a), ps[static_cast<std::size_t>(a)] / total,
                       oracle::random_density(2, rng)});
    }
    const CQState cq(atoms, space, 2);
    const Matrix joint = cq.assemble_density().matrix();
    const Matrix rho_env = cq.env_marginal().matrix();
    Matrix ideal = Matrix::Zero(space * 2, space * 2);
    for (Index a = 0; a < space; ++a) {
      ideal.block(a * 2, a * 2, 2, 2) = rho_env / static_cast<Real>(space);
    }
    const Real reference =
        relative_entropy(DensityMatrix(joint), DensityMatrix(ideal));
    CHECK(i_prime(cq) == doctest::Approx(reference).epsilon(1e-9));
  }
}

TEST_CASE("d1 and i_prime agree on what ideal means") {
  Matrix env(2, 2);
  env << 0.55, 0.1, 0.1, 0.45;
  const CQState ideal = uniform_independent_bit(env);
  CHECK(d1(ideal) <= 1e-10);
  CHECK(i_prime(ideal) <= 1e-8);
  const CQState bad = correlated_bit();
  CHECK(d1(bad) > 1e-6);
  CHECK(i_prime(bad) > 1e-6);
}

TEST_CASE("leftover_bound_from_entropy golden") {
  CHECK(leftover_bound_from_entropy(3.0, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(leftover_bound_from_entropy(0.0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("leftover_bound on a uniform independent bit") {
  Matrix env(2, 2);
  env << 0.8, 0.0, 0.0, 0.2;
  const CQState cq = uniform_independent_bit(env);
  // H2up(A|E) = 1 for a uniform bit independent of E, so the bound is
  // sqrt(2) * 2^{-1/2} = 1 while the actual distance is 0.
  CHECK(leftover_bound(cq, 2) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(d1(cq) == 0.0);
}

TEST_CASE("leftover bound dominates the exact family-averaged d1") {
  const DensityMatrix rho = mixed06_state();
  for (int n = 1; n <= 2; ++n) {
    const CQState cqn = measured_state(rho, n);
    for (int k = 1; k <= n; ++k) {
      const ToeplitzFamily family(n, k);
      const MetricStats stats =
          expected_d1(cqn, family, AverageMode::kExact, 0, 0, 1, Caps{});
      const Real bound = leftover_bound(cqn, std::uint64_t{1} << k);
      CHECK(stats.mean <= bound + 1e-9);
    }
  }
}

TEST_CASE("run_strategy on the maximally coherent qubit") {
  StrategyConfig cfg;
  cfg.copies = 1;
  cfg.k_bits = 1;
  const ExtractionReport r1 = run_strategy(plus_state(), cfg);
  CHECK(r1.d1_mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r1.c_r == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r1.coincide);
  CHECK(r1.rate == doctest::Approx(1.0));

  cfg.copies = 2;
  cfg.k_bits = 2;
  const ExtractionReport r2 = run_strategy(plus_state(), cfg);
  CHECK(r2.d1_mean == doctest::Approx(0.5625).epsilon(1e-12));

  // The family mean never vanishes at k = n because rank-deficient members
  // (the all-zero seed included) keep a positive gap; only the full-rank
  // members produce an exactly uniform output.
  cfg.copies = 3;
  cfg.k_bits = 3;
  const ExtractionReport r3 = run_strategy(plus_state(), cfg);
  const ToeplitzFamily family(3, 3);
  KahanSum rank_mean;
  for (std::uint64_t seed = 0; seed < family.size(); ++seed) {
    const HashFunction member(family, seed);
    const int rank = gf2_rank(member.row_masks(), 3);
    rank_mean.add(2.0 * (1.0 - std::ldexp(1.0, rank - 3)));
  }
  CHECK(r3.d1_mean ==
        doctest::Approx(rank_mean.value() / static_cast<Real>(family.size()))
            .epsilon(1e-12));
  CHECK(r3.d1_mean > 0.0);
}

TEST_CASE("run_strategy on the maximally mixed qubit extracts nothing") {
  StrategyConfig cfg;
  cfg.copies = 2;
  cfg.k_bits = 1;
  const ExtractionReport r = run_strategy(maximally_mixed(2), cfg);
  // The environment is a perfect copy of the label, so every nonzero member
  // leaves full correlation and the zero member leaves a constant output.
  CHECK(r.d1_mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.d1_mean > 0.4);
  CHECK(r.iprime_mean == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.c_r == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("run_strategy d1 grows with the attempted output length") {
  const DensityMatrix rho = mixed06_state();
  StrategyConfig cfg;
  cfg.copies = 4;
  cfg.k_bits = 1;
  const ExtractionReport low = run_strategy(rho, cfg);
  cfg.k_bits = 3;
  const ExtractionReport high = run_strategy(rho, cfg);
  CHECK(low.d1_mean < high.d1_mean);
  CHECK(low.iprime_mean < high.iprime_mean);
}

TEST_CASE("run_strategy security bounds hold on every exact run") {
  const std::vector<DensityMatrix> states = {plus_state(), mixed06_state(),
                                             maximally_mixed(2)};
  for (const DensityMatrix& rho : states) {
    for (int n = 1; n <= 3; ++n) {
      for (int k = 1; k <= n; ++k) {
        StrategyConfig cfg;
        cfg.copies = n;
        cfg.k_bits = k;
        const ExtractionReport r = run_strategy(rho, cfg);
        CHECK(r.d1_mean <= r.leftover + 1e-9);
        CHECK(r.d1_mean <= r.finite_length + 1e-9);
        CHECK(r.leftover ==
              doctest::Approx(leftover_bound_from_entropy(r.cond2_up,
                                                          std::uint64_t{1} << k))
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("run_strategy order-2 conditional entropy is additive over copies") {
  const DensityMatrix rho = mixed06_state();
  const CQState one = measure_computational(purify(rho));
  const Real h1 = renyi_cond_up_sand(one, AlphaOrder{2.0});
  StrategyConfig cfg;
  cfg.copies = 2;
  cfg.k_bits = 1;
  const ExtractionReport r = run_strategy(rho, cfg);
  CHECK(r.cond2_up == doctest::Approx(2.0 * h1).epsilon(1e-8));
  const CQState two = cq_tensor_power(one, 2, Caps{});
  CHECK(renyi_cond_up_sand(two, AlphaOrder{2.0}) ==
        doctest::Approx(2.0 * h1).epsilon(2e-6));
}

TEST_CASE("run_strategy handles a qutrit input") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.5;
  m(1, 1) = 0.3;
  m(2, 2) = 0.2;
  m(0, 1) = m(1, 0) = 0.25;
  StrategyConfig cfg;
  cfg.copies = 1;
  cfg.k_bits = 1;
  const ExtractionReport r = run_strategy(DensityMatrix(m), cfg);
  // Three labels embed into a 2-bit register; the missing label only enters
  // through the ideal-state term of d1. Rate counts bits per copy.
  CHECK(r.rate == doctest::Approx(1.0));
  CHECK(r.d1_mean > 0.0);
  CHECK(r.d1_mean <= 2.0);
}

TEST_CASE("run_strategy validates its configuration") {
  StrategyConfig cfg;
  cfg.copies = 0;
  CHECK_THROWS_AS(run_strategy(plus_state(), cfg), DomainError);
  cfg.copies = 2;
  cfg.k_bits = 3;
  CHECK_THROWS_AS(run_strategy(plus_state(), cfg), LengthMismatch);
  cfg.k_bits = 0;
  CHECK_THROWS_AS(run_strategy(plus_state(), cfg), LengthMismatch);
  CHECK_THROWS_AS(run_strategy(DensityMatrix(Matrix::Identity(1, 1)), StrategyConfig{}),
                  DomainError);
}

TEST_CASE("exponent bounds are zero at rates above the coherence") {
  const DensityMatrix rho = mixed06_state();
  const ExponentBound d = exponent_bound_d1(rho, 0.5);
  CHECK(d.value == 0.0);
  CHECK(d.argmax_s == 0.0);
  const ExponentBound i = exponent_bound_iprime(rho, 0.5);
  CHECK(i.value == 0.0);
  CHECK(i.argmax_s == 0.0);
}

TEST_CASE("exponent bounds for the maximally coherent qubit at rate 0") {
  // Every Renyi coherence of |+> equals 1, so the objectives are s/2 and s,
  // both maximized at s = 1.
  const ExponentBound d = exponent_bound_d1(plus_state(), 0.0);
  CHECK(d.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.argmax_s == doctest::Approx(1.0).epsilon(1e-6));
  const ExponentBound i = exponent_bound_iprime(plus_state(), 0.0);
  CHECK(i.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(i.argmax_s == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exponent bounds match a direct grid scan at a low rate") {
  const DensityMatrix rho = mixed06_state();
  const Real rate = 0.1;
  Real best_d = 0.0;
  Real best_i = 0.0;
  for (int step = 1; step <= 100; ++step) {
    const Real s = 0.01 * step;
    const Real alpha_d = (1.0 + s) / (1.0 + 2.0 * s);
    const Real vd = 0.5 * s * (c_r_alpha_sand(rho, AlphaOrder{alpha_d}) - rate);
    best_d = std::max(best_d, vd);
    const Real alpha_i = 1.0 / (1.0 + s);
    const Real vi = s * (c_r_alpha_petz(rho, AlphaOrder{alpha_i}) - rate);
    best_i = std::max(best_i, vi);
  }
  const ExponentBound d = exponent_bound_d1(rho, rate);
  CHECK(d.value >= best_d - 1e-12);
  CHECK(d.value == doctest::Approx(best_d).epsilon(1e-4));
  CHECK(d.value > 0.0);
  const ExponentBound i = exponent_bound_iprime(rho, rate);
  CHECK(i.value >= best_i - 1e-12);
  CHECK(i.value == doctest::Approx(best_i).epsilon(1e-4));
  CHECK(i.value > 0.0);
  CHECK_THROWS_AS(exponent_bound_d1(rho, -0.1), DomainError);
}

TEST_CASE("finite_length_bound at s = 0 counts eigenvalue groups") {
  // The measured environment of the 0.6-Bloch qubit has spectrum {0.8, 0.2},
  // so three copies give the four products 0.512, 0.128, 0.032, 0.008 and the
  // bound collapses to 4 + sqrt(4) = 6 for any rate.
  const DensityMatrix rho = mixed06_state();
  CHECK(finite_length_bound(rho, 3, 0.7, 0.0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(finite_length_bound(rho, 1, 0.3, 0.0) == doctest::Approx(4.0 + std::sqrt(2.0)).epsilon(1e-12));
  // A pure input has a one-dimensional environment, v_n = 1 at every n.
  CHECK(finite_length_bound(plus_state(), 4, 0.2, 0.0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("finite_length_bound validates its arguments") {
  CHECK_THROWS_AS(finite_length_bound(plus_state(), 0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(finite_length_bound(plus_state(), 2, 0.5, -0.01), DomainError);
  CHECK_THROWS_AS(finite_length_bound(plus_state(), 2, 0.5, 1.01), DomainError);
}

TEST_CASE("finite_length_best minimizes over the s grid and stays above d1") {
  const DensityMatrix rho = mixed06_state();
  for (int n = 2; n <= 4; ++n) {
    const FiniteLengthResult best = finite_length_best(rho, n, 0.5);
    for (int step = 0; step <= 10; ++step) {
      const Real s = 0.1 * step;
      CHECK(best.value <= finite_length_bound(rho, n, 0.5, s) + 1e-12);
    }
    const int k = std::max(1, static_cast<int>(std::ceil(0.5 * n - 1e-9)));
    const CQState cqn = measured_state(rho, n);
    const ToeplitzFamily family(n, k);
    const MetricStats stats =
        expected_d1(cqn, family, AverageMode::kExact, 0, 0, 1, Caps{});
    CHECK(stats.mean <= best.value + 1e-9);
  }
}

TEST_CASE("exponent_trend tracks the empirical decay") {
  StrategyConfig defaults;
  const std::vector<TrendPoint> mm =
      exponent_trend(maximally_mixed(2), 0.5, 4, defaults);
  REQUIRE(mm.size() == 4);
  for (const TrendPoint& p : mm) {
    CHECK(p.rate == doctest::Approx(static_cast<Real>(p.k_bits) / p.copies));
    // No extractable randomness: the mean distance never drops below 1, so
    // the empirical exponent is at most zero (negative when the mean tops 1).
    CHECK(p.d1_mean >= 1.0 - 1e-12);
    CHECK(p.exponent <= 0.05);
    CHECK(p.bound == 0.0);
  }

  const std::vector<TrendPoint> mixed =
      exponent_trend(mixed06_state(), 0.1, 5, defaults);
  REQUIRE(mixed.size() == 5);
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    CHECK(mixed[i].copies == static_cast<int>(i) + 1);
    CHECK(mixed[i].k_bits == 1);
    CHECK(mixed[i].d1_mean > 0.0);
    if (i > 0) CHECK(mixed[i].d1_mean <= mixed[i - 1].d1_mean + 1e-12);
    CHECK(mixed[i].bound == doctest::Approx(
        exponent_bound_d1(mixed06_state(), mixed[i].rate).value).epsilon(1e-10));
  }
  CHECK_THROWS_AS(exponent_trend(plus_state(), -0.5, 3, defaults), DomainError);
  CHECK_THROWS_AS(exponent_trend(plus_state(), 0.5, 0, defaults), DomainError);
}

TEST_CASE("monte carlo run_strategy agrees with the exact average") {
  StrategyConfig exact;
  exact.copies = 2;
  exact.k_bits = 1;
  const ExtractionReport re = run_strategy(mixed06_state(), exact);
  StrategyConfig mc = exact;
  mc.mode = AverageMode::kMonteCarlo;
  mc.samples = 200;
  mc.rng_seed = 0xFEEDFACE;
  const ExtractionReport rm = run_strategy(mixed06_state(), mc);
  CHECK(rm.samples == 200);
  CHECK(std::abs(rm.d1_mean - re.d1_mean) <= 4.0 * rm.d1_std_err + 1e-12);
  const ExtractionReport rm2 = run_strategy(mixed06_state(), mc);
  CHECK(rm2.d1_mean == rm.d1_mean);
  CHECK(rm2.iprime_mean == rm.iprime_mean);
}
