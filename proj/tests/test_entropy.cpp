#include "doctest.h"

#include <cmath>
#include <limits>

#include "corex/entropy.hpp"
#include "oracles.hpp"

using namespace corex;

namespace {

const Real kInf = std::numeric_limits<Real>::infinity();

DensityMatrix bell_pair() {
  Vector v = Vector::Zero(4);
  v[0] = 1.0 / std::sqrt(2.0);
  v[3] = 1.0 / std::sqrt(2.0);
  return DensityMatrix::from_pure(v, {2, 2});
}

DensityMatrix diag_state(std::initializer_list<Real> probs) {
  Matrix m = Matrix::Zero(static_cast<Index>(probs.size()), static_cast<Index>(probs.size()));
  Index i = 0;
  for (Real p : probs) m(i, i) = p, ++i;
  return DensityMatrix(m);
}

DensityMatrix random_joint(Index da, Index de, oracle::Rng& rng) {
  return DensityMatrix(oracle::random_density(da * de, rng), {da, de});
}

}  // namespace

TEST_CASE("AlphaOrder validates and flags the order-1 window") {
  CHECK_THROWS_AS(AlphaOrder{0.0}, AlphaOutOfRange);
  CHECK_THROWS_AS(AlphaOrder{-1.0}, AlphaOutOfRange);
  CHECK_THROWS_AS(AlphaOrder{kInf}, AlphaOutOfRange);
  CHECK(AlphaOrder(1.0).near_one());
  CHECK(AlphaOrder(1.0 + 5e-6).near_one());
  CHECK(!AlphaOrder(1.1).near_one());
}

TEST_CASE("shannon_entropy and binary_entropy golden values") {
  RealVector p(2);
  p << 0.8, 0.2;
  CHECK(shannon_entropy(p) == doctest::Approx(0.721928094887362).epsilon(1e-12));
  CHECK(binary_entropy(0.8) == doctest::Approx(0.721928094887362).epsilon(1e-12));
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);

  RealVector u(4);
  u << 0.25, 0.25, 0.25, 0.25;
  CHECK(shannon_entropy(u) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("von_neumann matches the oracle on random states") {
  oracle::Rng rng(31);
  for (int t = 0; t < 5; ++t) {
    const Matrix m = oracle::random_density(4, rng);
    CHECK(von_neumann(DensityMatrix(m)) ==
          doctest::Approx(oracle::vn_entropy(m)).epsilon(1e-11));
  }
  CHECK(von_neumann(bell_pair()) == doctest::Approx(0.0).epsilon(1e-11));
}

TEST_CASE("renyi_entropy interpolates min and max orders") {
  const DensityMatrix rho = diag_state({0.5, 0.25, 0.25});
  CHECK(renyi_entropy(rho, AlphaOrder(1.0)) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(renyi_entropy(rho, AlphaOrder(2.0)) ==
        doctest::Approx(-std::log2(0.25 + 0.0625 + 0.0625)).epsilon(1e-12));
  CHECK(renyi_entropy(rho, AlphaOrder(0.5)) >=
        renyi_entropy(rho, AlphaOrder(2.0)));
  CHECK(renyi_entropy(rho, AlphaOrder(1.0 + 1e-7)) ==
        doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("relative_entropy golden value and support rule") {
  const DensityMatrix tau = diag_state({0.5, 0.5});
  const DensityMatrix sigma = diag_state({0.8, 0.2});
  CHECK(relative_entropy(tau, sigma) ==
        doctest::Approx(0.321928094887362).epsilon(1e-12));
  CHECK(relative_entropy(tau, tau) == doctest::Approx(0.0).epsilon(1e-12));

  const DensityMatrix point = diag_state({1.0, 0.0});
  CHECK(relative_entropy(tau, point) == kInf);
  CHECK(relative_entropy(point, tau) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("renyi_rel_petz commuting golden and order window") {
  const DensityMatrix tau = diag_state({0.5, 0.5});
  const DensityMatrix sigma = diag_state({0.8, 0.2});
  const Real expect2 = std::log2(0.25 / 0.8 + 0.25 / 0.2);
  CHECK(renyi_rel_petz(tau, sigma, AlphaOrder(2.0)) ==
        doctest::Approx(expect2).epsilon(1e-12));
  CHECK(expect2 == doctest::Approx(0.643856189774725).epsilon(1e-12));

  CHECK(renyi_rel_petz(tau, sigma, AlphaOrder(1.0)) ==
        doctest::Approx(relative_entropy(tau, sigma)).epsilon(1e-10));
  CHECK_THROWS_AS(renyi_rel_petz(tau, sigma, AlphaOrder(2.5)), AlphaOutOfRange);
}

TEST_CASE("renyi_rel_petz matches the oracle on random pairs") {
  oracle::Rng rng(32);
  for (Real a : {0.3, 0.7, 1.5, 2.0}) {
    const Matrix r = oracle::random_density(3, rng);
    const Matrix s = oracle::random_density(3, rng);
    CHECK(renyi_rel_petz(DensityMatrix(r), DensityMatrix(s), AlphaOrder(a)) ==
          doctest::Approx(oracle::petz_div(r, s, a)).epsilon(1e-10));
  }
}

TEST_CASE("renyi_rel_sandwiched matches the oracle and its limits") {
  oracle::Rng rng(33);
  for (Real a : {0.5, 0.8, 1.5, 3.0}) {
    const Matrix r = oracle::random_density(3, rng);
    const Matrix s = oracle::random_density(3, rng);
    CHECK(renyi_rel_sandwiched(DensityMatrix(r), DensityMatrix(s), AlphaOrder(a)) ==
          doctest::Approx(oracle::sand_div(r, s, a)).epsilon(1e-10));
  }
  const DensityMatrix tau = diag_state({0.5, 0.5});
  const DensityMatrix sigma = diag_state({0.8, 0.2});
  CHECK(renyi_rel_sandwiched(tau, sigma, AlphaOrder(1.0)) ==
        doctest::Approx(relative_entropy(tau, sigma)).epsilon(1e-10));
  CHECK_THROWS_AS(renyi_rel_sandwiched(tau, sigma, AlphaOrder(0.4)), AlphaOutOfRange);
}

TEST_CASE("sandwiched divergence is monotone in alpha") {
  oracle::Rng rng(34);
  const DensityMatrix r(oracle::random_density(3, rng));
  const DensityMatrix s(oracle::random_density(3, rng));
  Real prev = -kInf;
  for (Real a : {0.5, 0.9, 1.3, 2.0, 4.0}) {
    const Real d = renyi_rel_sandwiched(r, s, AlphaOrder(a));
    CHECK(d >= prev - 1e-10);
    prev = d;
  }
}

TEST_CASE("petz divergence dominates sandwiched at equal order") {
  oracle::Rng rng(35);
  const DensityMatrix r(oracle::random_density(3, rng));
  const DensityMatrix s(oracle::random_density(3, rng));
  for (Real a : {0.6, 1.4, 2.0}) {
    CHECK(renyi_rel_petz(r, s, AlphaOrder(a)) >=
          renyi_rel_sandwiched(r, s, AlphaOrder(a)) - 1e-10);
  }
}

TEST_CASE("support leak gives +infinity for both Renyi families") {
  const DensityMatrix tau = diag_state({0.5, 0.5});
  const DensityMatrix point = diag_state({1.0, 0.0});
  CHECK(renyi_rel_petz(tau, point, AlphaOrder(1.5)) == kInf);
  CHECK(renyi_rel_sandwiched(tau, point, AlphaOrder(1.5)) == kInf);
  CHECK(renyi_rel_petz(tau, point, AlphaOrder(0.5)) < kInf);
}

TEST_CASE("cond_entropy on dense joints matches the entropy difference") {
  oracle::Rng rng(36);
  const DensityMatrix joint = random_joint(2, 3, rng);
  const Matrix env = oracle::partial_trace(joint.matrix(), {2, 3}, {1});
  const Real want = oracle::vn_entropy(joint.matrix()) - oracle::vn_entropy(env);
  CHECK(cond_entropy(joint) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("cond_entropy of the Bell pair is -1") {
  CHECK(cond_entropy(bell_pair()) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("cond_entropy agrees between a CQ state and its assembled joint") {
  oracle::Rng rng(37);
  std::vector<CQAtom> atoms;
  atoms.push_back({0, 0.3, oracle::random_density(2, rng)});
  atoms.push_back({2, 0.45, oracle::random_density(2, rng)});
  atoms.push_back({3, 0.25, oracle::random_density(2, rng)});
  const CQState cq(atoms, 4, 2);
  CHECK(cond_entropy(cq) == doctest::Approx(cond_entropy(cq.assemble_density())).epsilon(1e-10));
}

TEST_CASE("renyi_cond_down_sand agrees between CQ and dense forms") {
  oracle::Rng rng(38);
  std::vector<CQAtom> atoms;
  atoms.push_back({0, 0.6, oracle::random_density(2, rng)});
  atoms.push_back({1, 0.4, oracle::random_density(2, rng)});
  const CQState cq(atoms, 2, 2);
  for (Real a : {0.5, 2.0}) {
    CHECK(renyi_cond_down_sand(cq, AlphaOrder(a)) ==
          doctest::Approx(renyi_cond_down_sand(cq.assemble_density(), AlphaOrder(a)))
              .epsilon(1e-9));
  }
}

TEST_CASE("renyi_cond_down_sand equals minus the divergence to the env marginal") {
  oracle::Rng rng(39);
  const DensityMatrix joint = random_joint(2, 2, rng);
  const Matrix env = oracle::partial_trace(joint.matrix(), {2, 2}, {1});
  const Matrix full = oracle::kron(Matrix::Identity(2, 2), env);
  const Real want = -oracle::sand_div(joint.matrix(), full, 2.0);
  CHECK(renyi_cond_down_sand(joint, AlphaOrder(2.0)) ==
        doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("renyi_cond_up_petz matches the Sibson closed form") {
  oracle::Rng rng(40);
  for (Real a : {0.5, 2.0}) {
    const DensityMatrix joint = random_joint(2, 2, rng);
    const Real want = oracle::petz_up_sibson(joint.matrix(), 2, 2, a);
    CHECK(renyi_cond_up_petz(joint, AlphaOrder(a)) ==
          doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("renyi_cond_up_sand beats every grid sigma and reaches the best") {
  oracle::Rng rng(41);
  const DensityMatrix joint = random_joint(2, 2, rng);
  const Real got = renyi_cond_up_sand(joint, AlphaOrder(2.0));
  const Real grid = oracle::sand_up_bloch_grid(joint.matrix(), 2, 2.0, 24);
  CHECK(got >= grid - 1e-8);
  CHECK(got <= grid + 2e-3);
}

TEST_CASE("conditional entropy family ordering on a random joint") {
  oracle::Rng rng(42);
  const DensityMatrix joint = random_joint(2, 2, rng);
  const Real down2 = renyi_cond_down_sand(joint, AlphaOrder(2.0));
  const Real up2 = renyi_cond_up_sand(joint, AlphaOrder(2.0));
  const Real vn = cond_entropy(joint);
  CHECK(down2 <= up2 + 1e-8);
  CHECK(up2 <= vn + 1e-8);
}

TEST_CASE("order-1 window of the conditional entropies recovers von Neumann") {
  oracle::Rng rng(43);
  const DensityMatrix joint = random_joint(2, 2, rng);
  const Real vn = cond_entropy(joint);
  CHECK(renyi_cond_down_sand(joint, AlphaOrder(1.0)) == doctest::Approx(vn).epsilon(1e-9));
  CHECK(renyi_cond_up_sand(joint, AlphaOrder(1.0)) == doctest::Approx(vn).epsilon(1e-7));
  CHECK(renyi_cond_up_petz(joint, AlphaOrder(1.0)) == doctest::Approx(vn).epsilon(1e-7));
}

TEST_CASE("Bell pair conditional Renyi entropies are all -1") {
  const DensityMatrix bell = bell_pair();
  CHECK(renyi_cond_down_sand(bell, AlphaOrder(2.0)) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(renyi_cond_up_sand(bell, AlphaOrder(2.0)) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(renyi_cond_up_petz(bell, AlphaOrder(2.0)) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("product joint conditional entropy reduces to the system entropy") {
  oracle::Rng rng(44);
  const Matrix a = oracle::random_density(2, rng);
  const Matrix e = oracle::random_density(3, rng);
  const DensityMatrix joint(oracle::kron(a, e), {2, 3});
  const Real ha = oracle::vn_entropy(a);
  CHECK(cond_entropy(joint) == doctest::Approx(ha).epsilon(1e-10));
  const Real h2a = renyi_entropy(DensityMatrix(a), AlphaOrder(2.0));
  CHECK(renyi_cond_up_sand(joint, AlphaOrder(2.0)) == doctest::Approx(h2a).epsilon(1e-6));
  CHECK(renyi_cond_down_sand(joint, AlphaOrder(2.0)) == doctest::Approx(h2a).epsilon(1e-8));
}

TEST_CASE("up optimizer returns the optimizing sigma it claims") {
  oracle::Rng rng(45);
  const DensityMatrix joint = random_joint(2, 2, rng);
  const CondOptResult res = renyi_cond_up_sand_opt(joint, AlphaOrder(2.0));
  const Matrix full = oracle::kron(Matrix::Identity(2, 2), res.sigma);
  const Real at_sigma = -oracle::sand_div(joint.matrix(), full, 2.0);
  CHECK(res.value == doctest::Approx(at_sigma).epsilon(1e-8));
  CHECK(res.sigma.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("CQ up entropy agrees with the dense assembled joint") {
  oracle::Rng rng(46);
  std::vector<CQAtom> atoms;
  atoms.push_back({0, 0.5, oracle::random_density(2, rng)});
  atoms.push_back({1, 0.5, oracle::random_density(2, rng)});
  const CQState cq(atoms, 2, 2);
  for (Real a : {2.0, 0.6}) {
    const Real dense = renyi_cond_up_sand(cq.assemble_density(), AlphaOrder(a));
    const Real blocked = renyi_cond_up_sand(cq, AlphaOrder(a));
    CHECK(blocked == doctest::Approx(dense).epsilon(1e-6));
  }
}
