#include "corex/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace corex {
namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

int bits_needed(Index dim) {
  int bits = 0;
  while ((Index(1) << bits) < dim) ++bits;
  return bits;
}

// Measured single-copy state with labels padded into full bit width.
CQState measured_copy(const DensityMatrix& rho_a) {
  const PureJointState psi = purify(rho_a);
  const CQState cq = measure_computational(psi);
  const std::uint64_t padded = std::uint64_t(1) << bits_needed(rho_a.dim());
  return padded == cq.label_space() ? cq : cq.embedded(padded);
}

Real golden_section_max(const std::function<Real(Real)>& f, Real lo, Real hi, Real x_tol) {
  const Real inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  Real a = lo, b = hi;
  Real c = b - inv_phi * (b - a);
  Real d = a + inv_phi * (b - a);
  Real fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

ExponentBound maximize_bracket(const std::function<Real(Real)>& bracket) {
  Real best_s = 0.0;
  Real best_v = bracket(0.0);
  for (int i = 1; i <= 100; ++i) {
    const Real s = 0.01 * i;
    const Real v = bracket(s);
    if (v > best_v) {
      best_v = v;
      best_s = s;
    }
  }
  const Real lo = std::max(0.0, best_s - 0.01);
  const Real hi = std::min(1.0, best_s + 0.01);
  const Real s_star = golden_section_max(bracket, lo, hi, 1e-6);
  const Real v_star = bracket(s_star);
  if (v_star > best_v) {
    best_v = v_star;
    best_s = s_star;
  }
  if (best_v <= 0.0) return ExponentBound{0.0, 0.0};
  return ExponentBound{best_v, best_s};
}

// Pinched spectrum of the n-copy measured state against sigma_E^{(x)n}:
// the list of (group eigenvalue lambda, atom probability p_X, eigenvalue mu of
// the projected environment block), compressed to the terms of Q(s).
struct PinchedSpectrum {
  int groups = 0;  // v_n
  std::vector<Real> lambdas;
  std::vector<Real> weights;  // p_X * mu paired with lambdas
};

PinchedSpectrum pinched_spectrum(const DensityMatrix& rho_a, int copies, const Caps& caps) {
  const CQState cq = measured_copy(rho_a);
  const Index d_env = cq.env_dim();
  Real env_total = 1.0;
  for (int i = 0; i < copies; ++i) {
    env_total *= static_cast<Real>(d_env);
    if (env_total > static_cast<Real>(caps.env_dim)) {
      throw TooLarge("finite_length_bound: environment dimension " + std::to_string(d_env) +
                     "^" + std::to_string(copies) + " exceeds cap " +
                     std::to_string(caps.env_dim));
    }
  }
  const std::size_t n_atoms = cq.atoms().size();
  Real label_total = 1.0;
  for (int i = 0; i < copies; ++i) {
    label_total *= static_cast<Real>(n_atoms);
    if (label_total > static_cast<Real>(caps.tensor_dim)) {
      throw TooLarge("finite_length_bound: label tuple count exceeds cap " +
                     std::to_string(caps.tensor_dim));
    }
  }

  const SpectralDecomposition sigma_eig = eig_hermitian(cq.env_marginal());
  const Matrix& v = sigma_eig.eigenvectors;

  // Conditional environments rotated into the sigma eigenbasis; projected
  // block entries are then plain products across copies.
  std::vector<Matrix> rotated;
  std::vector<Real> probs;
  rotated.reserve(n_atoms);
  for (const CQAtom& atom : cq.atoms()) {
    rotated.push_back(v.adjoint() * atom.env * v);
    probs.push_back(atom.probability);
  }

  // Eigen-tuples of sigma^{(x)n}, grouped by product eigenvalue.
  const Index tuples = static_cast<Index>(std::llround(env_total));
  std::vector<std::pair<Real, Index>> products(static_cast<std::size_t>(tuples));
  for (Index t = 0; t < tuples; ++t) {
    Real prod = 1.0;
    Index rest = t;
    for (int i = 0; i < copies; ++i) {
      prod *= sigma_eig.eigenvalues[rest % d_env];
      rest /= d_env;
    }
    products[static_cast<std::size_t>(t)] = {prod, t};
  }
  std::sort(products.begin(), products.end());
  const Real scale = std::max(1.0, products.back().first);
  std::vector<std::vector<Index>> groups;
  std::vector<Real> group_lambda;
  for (std::size_t i = 0; i < products.size(); ++i) {
    if (i == 0 || products[i].first - products[i - 1].first > tol::kPinchGroup * scale) {
      groups.emplace_back();
      group_lambda.push_back(products[i].first);
    }
    groups.back().push_back(products[i].second);
  }

  auto tuple_digit = [&](Index t, int copy) {
    for (int i = 0; i < copy; ++i) t /= d_env;
    return t % d_env;
  };

  PinchedSpectrum out;
  out.groups = static_cast<int>(groups.size());

  // Walk all atom tuples; per tuple, eigendecompose the projection of the
  // product environment onto every sigma eigen-group.
  std::vector<std::size_t> atom_at(static_cast<std::size_t>(copies), 0);
  while (true) {
    Real p_x = 1.0;
    for (int i = 0; i < copies; ++i) p_x *= probs[atom_at[static_cast<std::size_t>(i)]];
    if (p_x > 0.0) {
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const std::vector<Index>& members = groups[g];
        const Index b = static_cast<Index>(members.size());
        Matrix block(b, b);
        for (Index r = 0; r < b; ++r) {
          for (Index c = 0; c < b; ++c) {
            Complex entry(1.0, 0.0);
            for (int i = 0; i < copies; ++i) {
              const Matrix& gm = rotated[atom_at[static_cast<std::size_t>(i)]];
              entry *= gm(tuple_digit(members[static_cast<std::size_t>(r)], copies - 1 - i),
                          tuple_digit(members[static_cast<std::size_t>(c)], copies - 1 - i));
            }
            block(r, c) = entry;
          }
        }
        const RealVector mu = eigenvalues_only(block);
        for (Index e = 0; e < mu.size(); ++e) {
          if (mu[e] > tol::kZeroClip) {
            out.lambdas.push_back(group_lambda[g]);
            out.weights.push_back(p_x * mu[e]);
          }
        }
      }
    }
    int pos = copies - 1;
    while (pos >= 0) {
      if (++atom_at[static_cast<std::size_t>(pos)] < n_atoms) break;
      atom_at[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

}  // namespace

Real d1(const CQState& cq) {
  const Matrix env = cq.env_marginal();
  const Real inv_a = 1.0 / static_cast<Real>(cq.label_space());
  const Matrix ideal_block = inv_a * env;
  KahanSum total;
  for (const CQAtom& atom : cq.atoms()) {
    const Matrix diff = atom.probability * atom.env - ideal_block;
    const RealVector mu = eigenvalues_only(diff);
    for (Index i = 0; i < mu.size(); ++i) total.add(std::abs(mu[i]));
  }
  const std::uint64_t missing = cq.label_space() - cq.atoms().size();
  total.add(static_cast<Real>(missing) * inv_a);
  return total.value();
}

Real i_prime(const CQState& cq) {
  const Real bits = std::log2(static_cast<Real>(cq.label_space()));
  return std::max(0.0, bits - cond_entropy(cq));
}

Real leftover_bound_from_entropy(Real h2_up, std::uint64_t out_size) {
  return std::exp2(0.5 * std::log2(static_cast<Real>(out_size)) - 0.5 * h2_up);
}

Real leftover_bound(const CQState& cq, std::uint64_t out_size) {
  return leftover_bound_from_entropy(renyi_cond_up_sand(cq, AlphaOrder(2.0)), out_size);
}

ExponentBound exponent_bound_d1(const DensityMatrix& rho_a, Real rate) {
  if (rate < 0.0) throw DomainError("exponent_bound_d1: rate must be nonnegative");
  const std::function<Real(Real)> bracket = [&](Real s) -> Real {
    if (s < 1e-12) return 0.0;
    const AlphaOrder order((1.0 + s) / (1.0 + 2.0 * s));
    return 0.5 * s * (c_r_alpha_sand(rho_a, order) - rate);
  };
  return maximize_bracket(bracket);
}

ExponentBound exponent_bound_iprime(const DensityMatrix& rho_a, Real rate) {
  if (rate < 0.0) throw DomainError("exponent_bound_iprime: rate must be nonnegative");
  const std::function<Real(Real)> bracket = [&](Real s) -> Real {
    if (s < 1e-12) return 0.0;
    const AlphaOrder order(1.0 / (1.0 + s));
    return s * (c_r_alpha_petz(rho_a, order) - rate);
  };
  return maximize_bracket(bracket);
}

Real finite_length_bound(const DensityMatrix& rho_a, int copies, Real rate, Real s,
                         const Caps& caps) {
  if (copies < 1) throw DomainError("finite_length_bound: copies must be >= 1");
  if (s < 0.0 || s > 1.0) throw DomainError("finite_length_bound: s outside [0, 1]");
  const PinchedSpectrum spec = pinched_spectrum(rho_a, copies, caps);
  const Real base = 4.0 + std::sqrt(static_cast<Real>(spec.groups));
  if (s == 0.0) return base;
  KahanSum q;
  for (std::size_t i = 0; i < spec.weights.size(); ++i) {
    q.add(std::pow(spec.weights[i], 1.0 + s) * std::pow(spec.lambdas[i], -s));
  }
  return base * std::exp2(0.5 * s * static_cast<Real>(copies) * rate) * std::sqrt(q.value());
}

FiniteLengthResult finite_length_best(const DensityMatrix& rho_a, int copies, Real rate,
                                      const Caps& caps) {
  const PinchedSpectrum spec = pinched_spectrum(rho_a, copies, caps);
  const Real base = 4.0 + std::sqrt(static_cast<Real>(spec.groups));
  FiniteLengthResult best{base, 0.0};
  for (int i = 1; i <= 100; ++i) {
    const Real s = 0.01 * i;
    KahanSum q;
    for (std::size_t j = 0; j < spec.weights.size(); ++j) {
      q.add(std::pow(spec.weights[j], 1.0 + s) * std::pow(spec.lambdas[j], -s));
    }
    const Real value =
        base * std::exp2(0.5 * s * static_cast<Real>(copies) * rate) * std::sqrt(q.value());
    if (value < best.value) best = FiniteLengthResult{value, s};
  }
  return best;
}

ExtractionReport run_strategy(const DensityMatrix& rho_a, const StrategyConfig& cfg) {
  if (cfg.copies < 1) throw DomainError("run_strategy: copies must be >= 1");
  const int bits = bits_needed(rho_a.dim());
  if (bits < 1) throw DomainError("run_strategy: system must have dimension >= 2");
  const int m = cfg.copies * bits;
  if (cfg.k_bits < 1 || cfg.k_bits > m) {
    throw LengthMismatch("run_strategy: k_bits " + std::to_string(cfg.k_bits) +
                         " outside [1, " + std::to_string(m) + "]");
  }

  const CQState copy = measured_copy(rho_a);
  const CQState power = cq_tensor_power(copy, cfg.copies, cfg.caps);
  const ToeplitzFamily family(m, cfg.k_bits);

  const CqMetric metrics = [](const CQState& hashed) {
    RealVector v(2);
    v[0] = d1(hashed);
    v[1] = i_prime(hashed);
    return v;
  };
  const FamilyAverage avg = average_over_family(power, family, cfg.mode, cfg.samples,
                                                cfg.rng_seed, cfg.workers, metrics, cfg.caps);

  ExtractionReport report;
  report.copies = cfg.copies;
  report.k_bits = cfg.k_bits;
  report.rate = static_cast<Real>(cfg.k_bits) / static_cast<Real>(cfg.copies);
  report.mode = cfg.mode;
  report.samples = avg.members;
  report.rng_seed = cfg.rng_seed;

  report.c_r = c_r(rho_a);
  const ConvexRoofResult roof = c_f(rho_a);
  report.c_f = roof.value;
  report.c_f_exact = roof.exact;
  report.coincide = rates_coincide(rho_a);

  report.d1_mean = avg.mean[0];
  report.d1_std_err = avg.std_err[0];
  report.iprime_mean = avg.mean[1];
  report.iprime_std_err = avg.std_err[1];

  // Order-2 conditional entropy is additive over product states, so the
  // n-copy value is n times the single-copy optimization.
  report.cond2_up = static_cast<Real>(cfg.copies) * renyi_cond_up_sand(copy, AlphaOrder(2.0));
  report.leftover =
      leftover_bound_from_entropy(report.cond2_up, std::uint64_t(1) << cfg.k_bits);

  const FiniteLengthResult fl = finite_length_best(rho_a, cfg.copies, report.rate, cfg.caps);
  report.finite_length = fl.value;
  report.finite_length_s = fl.best_s;

  report.exp_d1 = exponent_bound_d1(rho_a, report.rate);
  report.exp_iprime = exponent_bound_iprime(rho_a, report.rate);
  return report;
}

std::vector<TrendPoint> exponent_trend(const DensityMatrix& rho_a, Real rate, int n_max,
                                       const StrategyConfig& defaults) {
  if (rate < 0.0) throw DomainError("exponent_trend: rate must be nonnegative");
  if (n_max < 1) throw DomainError("exponent_trend: n_max must be >= 1");
  const int bits = bits_needed(rho_a.dim());
  const CQState copy = measured_copy(rho_a);

  std::vector<TrendPoint> points;
  points.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const int m = n * bits;
    int k = std::max(1, static_cast<int>(std::ceil(rate * n - 1e-9)));
    k = std::min(k, m);

    const CQState power = cq_tensor_power(copy, n, defaults.caps);
    const ToeplitzFamily family(m, k);
    const MetricStats stats = expected_d1(power, family, defaults.mode, defaults.samples,
                                          defaults.rng_seed, defaults.workers, defaults.caps);

    TrendPoint point;
    point.copies = n;
    point.k_bits = k;
    point.rate = static_cast<Real>(k) / static_cast<Real>(n);
    point.d1_mean = stats.mean;
    point.d1_std_err = stats.std_err;
    point.exponent = stats.mean < 1e-15 ? kInf : -std::log2(stats.mean) / static_cast<Real>(n);
    point.bound = exponent_bound_d1(rho_a, point.rate).value;
    points.push_back(point);
  }
  return points;
}

}  // namespace corex
