#include "corex/statespec.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace corex {
namespace {

using Json = nlohmann::ordered_json;

std::string trim_number(Real v) {
  std::string s = format_real(v);
  return s;
}

DensityMatrix named_state(const std::string& name) {
  if (name == "plus") return plus_state();
  if (name == "mixed06") return mixed06_state();
  const auto dim_suffix = [&](const std::string& prefix) -> Index {
    const std::string digits = name.substr(prefix.size());
    if (digits.empty() || digits.size() > 4 ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("state spec: malformed dimension in named state '" + name + "'");
    }
    const long d = std::stol(digits);
    if (d < 2 || d > 1024) {
      throw ParseError("state spec: named-state dimension " + digits + " outside [2, 1024]");
    }
    return static_cast<Index>(d);
  };
  if (name.rfind("mm_", 0) == 0) return maximally_mixed(dim_suffix("mm_"));
  if (name.rfind("mcs_", 0) == 0) return maximally_coherent(dim_suffix("mcs_"));
  throw ParseError("state spec: unknown named state '" + name +
                   "' (expected plus, mixed06, mm_<d>, mcs_<d>)");
}

StateSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("state spec: expected a JSON object");
  try {
    if (j.contains("named")) {
      const std::string name = j.at("named").get<std::string>();
      return StateSpec{name, named_state(name)};
    }
    if (j.contains("bloch")) {
      const Json& b = j.at("bloch");
      if (!b.is_array() || b.size() != 3) {
        throw ParseError("state spec: field 'bloch' must be an array of 3 numbers");
      }
      QubitBloch v{b.at(0).get<Real>(), b.at(1).get<Real>(), b.at(2).get<Real>()};
      std::string id = "bloch_" + trim_number(v.x) + "_" + trim_number(v.y) + "_" +
                       trim_number(v.z);
      return StateSpec{std::move(id), density_from_bloch(v)};
    }
    if (j.contains("matrix")) {
      const Json& m = j.at("matrix");
      const Index dim = m.at("dim").get<Index>();
      if (dim < 1 || dim > 1024) {
        throw ParseError("state spec: field 'matrix.dim' outside [1, 1024]");
      }
      const Json& entries = m.at("entries");
      if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim)) {
        throw ParseError("state spec: field 'matrix.entries' must list dim^2 [re, im] pairs");
      }
      Matrix mat(dim, dim);
      for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) {
          const Json& pair = entries.at(static_cast<std::size_t>(r * dim + c));
          if (!pair.is_array() || pair.size() != 2) {
            throw ParseError("state spec: matrix entry " + std::to_string(r * dim + c) +
                             " is not a [re, im] pair");
          }
          mat(r, c) = Complex(pair.at(0).get<Real>(), pair.at(1).get<Real>());
        }
      }
      return StateSpec{"matrix_" + std::to_string(dim), DensityMatrix(mat)};
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("state spec: invalid state: ") + e.what());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("state spec: ") + e.what());
  }
  throw ParseError("state spec: expected one of the fields 'named', 'bloch', 'matrix'");
}

Json spec_to_json(const StateSpec& spec) {
  Json entries = Json::array();
  const Matrix& m = spec.state.matrix();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      entries.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  Json out;
  out["matrix"] = Json{{"dim", m.rows()}, {"entries", entries}};
  return out;
}

Json parse_text(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

std::string csv_line(const std::string& state_id, const ExtractionReport& r) {
  std::ostringstream line;
  line << state_id << ',' << r.copies << ',' << r.k_bits << ',' << format_real(r.rate) << ','
       << format_real(r.d1_mean) << ',' << format_real(r.d1_std_err) << ','
       << format_real(r.iprime_mean) << ',' << format_real(r.leftover) << ','
       << format_real(r.finite_length) << ',' << format_real(r.exp_d1.value) << ','
       << format_real(r.exp_iprime.value) << ',' << format_hex64(r.rng_seed);
  return line.str();
}

Json report_to_json(const std::string& state_id, const ExtractionReport& r) {
  Json j;
  j["state_id"] = state_id;
  j["n"] = r.copies;
  j["k_bits"] = r.k_bits;
  j["rate"] = r.rate;
  j["mode"] = r.mode == AverageMode::kExact ? "exact" : "mc";
  j["members"] = r.samples;
  j["seed"] = format_hex64(r.rng_seed);
  j["c_r"] = r.c_r;
  j["c_f"] = r.c_f;
  j["c_f_exact"] = r.c_f_exact;
  j["rates_coincide"] = r.coincide;
  j["d1_mean"] = r.d1_mean;
  j["d1_stderr"] = r.d1_std_err;
  j["iprime_mean"] = r.iprime_mean;
  j["iprime_stderr"] = r.iprime_std_err;
  j["cond2_up"] = r.cond2_up;
  j["leftover_bound"] = r.leftover;
  j["finite_bound"] = r.finite_length;
  j["finite_bound_s"] = r.finite_length_s;
  j["exp_bound_d1"] = Json{{"value", r.exp_d1.value}, {"argmax_s", r.exp_d1.argmax_s}};
  j["exp_bound_iprime"] = Json{{"value", r.exp_iprime.value}, {"argmax_s", r.exp_iprime.argmax_s}};
  return j;
}

// Random pure state with amplitudes drawn from the rotation-invariant complex
// Gaussian measure.
Vector random_pure(Index dim, SplitMix64& rng) {
  Vector psi(dim);
  for (Index i = 0; i < dim; ++i) psi[i] = Complex(rng.next_gaussian(), rng.next_gaussian());
  psi /= psi.norm();
  return psi;
}

}  // namespace

DensityMatrix plus_state() {
  Matrix m(2, 2);
  m.setConstant(Complex(0.5, 0.0));
  return DensityMatrix(m);
}

DensityMatrix mixed06_state() { return density_from_bloch(QubitBloch{0.6, 0.0, 0.0}); }

DensityMatrix maximally_mixed(Index dim) {
  Matrix m = Matrix::Identity(dim, dim) / static_cast<Real>(dim);
  return DensityMatrix(m);
}

DensityMatrix maximally_coherent(Index dim) {
  Matrix m(dim, dim);
  m.setConstant(Complex(1.0 / static_cast<Real>(dim), 0.0));
  return DensityMatrix(m);
}

StateSpec parse_state_spec_text(const std::string& text) {
  return spec_from_json(parse_text(text, "state spec"));
}

std::string state_spec_round_trip(const StateSpec& spec) { return spec_to_json(spec).dump(); }

RunManifest parse_manifest_text(const std::string& text) {
  const Json j = parse_text(text, "manifest");
  if (!j.is_object()) throw ParseError("manifest: expected a JSON object");
  RunManifest m;
  try {
    if (!j.contains("state")) throw ParseError("manifest: missing field 'state'");
    m.spec = spec_from_json(j.at("state"));
    if (j.contains("state_id")) m.spec.id = j.at("state_id").get<std::string>();
    if (!j.contains("n")) throw ParseError("manifest: missing field 'n'");
    for (const Json& v : j.at("n")) {
      const int n = v.get<int>();
      if (n < 1) throw ParseError("manifest: field 'n' entries must be >= 1");
      m.n_list.push_back(n);
    }
    if (j.contains("k")) {
      for (const Json& v : j.at("k")) {
        const int k = v.get<int>();
        if (k < 1) throw ParseError("manifest: field 'k' entries must be >= 1");
        m.k_list.push_back(k);
      }
    }
    if (j.contains("mode")) {
      const std::string mode = j.at("mode").get<std::string>();
      if (mode == "exact") {
        m.mode = AverageMode::kExact;
      } else if (mode == "mc") {
        m.mode = AverageMode::kMonteCarlo;
      } else {
        throw ParseError("manifest: field 'mode' must be 'exact' or 'mc'");
      }
    }
    if (j.contains("samples")) m.samples = j.at("samples").get<std::uint64_t>();
    if (j.contains("seed")) m.rng_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) m.workers = std::max(1, j.at("workers").get<int>());
    if (j.contains("out")) m.out_dir = j.at("out").get<std::string>();
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string provenance_json(std::uint64_t rng_seed) {
  Json j;
  j["version"] = kVersion;
  j["tolerances"] = Json{{"hermitian", tol::kHermitian},
                         {"unit_trace", tol::kUnitTrace},
                         {"zero_clip", tol::kZeroClip},
                         {"pinch_group", tol::kPinchGroup},
                         {"alpha_switch", tol::kAlphaLimitSwitch},
                         {"support_leak", tol::kSupportLeak},
                         {"atom_drop", tol::kAtomDrop},
                         {"pure_top", tol::kPureTop}};
  const Caps caps;
  j["caps"] = Json{{"tensor_dim", caps.tensor_dim},
                   {"label_space", caps.label_space},
                   {"family_size", caps.family_size},
                   {"env_dim", caps.env_dim}};
  j["grid"] = Json{{"s_step", 0.01}, {"s_tol", 1e-6}};
  j["rng"] = Json{{"algorithm", "splitmix64"}, {"seed", format_hex64(rng_seed)}};
  return j.dump();
}

int cmd_measures(const std::string& spec_text, const std::vector<Real>& alphas,
                 std::ostream& out) {
  StateSpec spec;
  try {
    spec = parse_state_spec_text(spec_text);
  } catch (const ParseError& e) {
    out << Json{{"error", e.what()}}.dump() << '\n';
    return kExitParse;
  }
  Json j;
  j["provenance"] = Json::parse(provenance_json(0));
  j["state_id"] = spec.id;
  j["c_r"] = c_r(spec.state);
  const ConvexRoofResult roof = c_f(spec.state);
  j["c_f"] = roof.value;
  j["c_f_exact"] = roof.exact;
  j["rates_coincide"] = rates_coincide(spec.state);
  Json orders = Json::array();
  for (Real a : alphas) {
    Json row;
    row["alpha"] = a;
    const AlphaOrder order(a);
    const bool petz_ok = (a > 0.0 && a < 1.0) || (a > 1.0 && a <= 2.0) || order.near_one();
    if (petz_ok) {
      row["c_r_petz"] = c_r_alpha_petz(spec.state, order);
    } else {
      row["c_r_petz"] = nullptr;
    }
    if (a >= 0.5) {
      row["c_r_sand"] = c_r_alpha_sand(spec.state, order);
    } else {
      row["c_r_sand"] = nullptr;
    }
    orders.push_back(row);
  }
  j["orders"] = orders;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_extract(const RunManifest& manifest, std::ostream& out) {
  const int bits = [&] {
    int b = 0;
    while ((Index(1) << b) < manifest.spec.state.dim()) ++b;
    return b;
  }();

  // Validate the whole grid against the caps before any computation.
  std::vector<std::pair<int, int>> grid;
  for (int n : manifest.n_list) {
    const std::vector<int>& ks =
        manifest.k_list.empty() ? std::vector<int>{n * bits} : manifest.k_list;
    for (int k : ks) {
      const int m = n * bits;
      if (k > m) {
        out << "cap: k_bits " << k << " exceeds label bits " << m << " at n " << n << '\n';
        return kExitCaps;
      }
      if ((std::uint64_t(1) << m) > manifest.caps.label_space) {
        out << "cap: label space 2^" << m << " exceeds label_space cap "
            << manifest.caps.label_space << '\n';
        return kExitCaps;
      }
      if (manifest.mode == AverageMode::kExact &&
          (std::uint64_t(1) << (m + k - 1)) > manifest.caps.family_size) {
        out << "cap: family size 2^" << (m + k - 1) << " exceeds family_size cap "
            << manifest.caps.family_size << '\n';
        return kExitCaps;
      }
      grid.emplace_back(n, k);
    }
  }

  std::ostringstream csv;
  csv << "state_id,n,k_bits,R,d1_mean,d1_stderr,iprime_mean,leftover_bound,finite_bound,"
         "exp_bound_d1,exp_bound_iprime,seed\r\n";
  Json rows = Json::array();
  for (const auto& [n, k] : grid) {
    StrategyConfig cfg;
    cfg.copies = n;
    cfg.k_bits = k;
    cfg.mode = manifest.mode;
    cfg.samples = manifest.samples;
    cfg.rng_seed = manifest.rng_seed;
    cfg.workers = manifest.workers;
    cfg.caps = manifest.caps;
    const ExtractionReport report = run_strategy(manifest.spec.state, cfg);
    csv << csv_line(manifest.spec.id, report) << "\r\n";
    rows.push_back(report_to_json(manifest.spec.id, report));
  }

  std::filesystem::create_directories(manifest.out_dir);
  const std::string csv_path = manifest.out_dir + "/extract.csv";
  const std::string json_path = manifest.out_dir + "/extract.json";
  {
    std::ofstream f(csv_path, std::ios::binary);
    f << csv.str();
  }
  Json doc;
  doc["provenance"] = Json::parse(provenance_json(manifest.rng_seed));
  doc["state_id"] = manifest.spec.id;
  doc["rows"] = rows;
  {
    std::ofstream f(json_path, std::ios::binary);
    f << doc.dump(2) << '\n';
  }

  Json summary;
  summary["csv"] = csv_path;
  summary["json"] = json_path;
  summary["rows"] = grid.size();
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_certify(int label_bits, int output_bits, std::ostream& out) {
  Universal2Certificate cert;
  try {
    const ToeplitzFamily family(label_bits, output_bits);
    cert = certify_universal2(family);
  } catch (const TooLarge& e) {
    out << "cap: " << e.what() << '\n';
    return kExitCaps;
  } catch (const Error& e) {
    out << Json{{"error", e.what()}}.dump() << '\n';
    return kExitParse;
  }
  Json j;
  j["provenance"] = Json::parse(provenance_json(0));
  j["m"] = label_bits;
  j["k"] = output_bits;
  j["family_size"] = cert.family_size;
  j["max_collision_prob"] =
      std::to_string(cert.numerator) + "/" + std::to_string(cert.denominator);
  j["bound"] = "1/" + std::to_string(std::uint64_t(1) << output_bits);
  j["witness"] = Json::array({cert.witness_a, cert.witness_b});
  j["pass"] = cert.universal;
  out << j.dump(2) << '\n';
  out << cert.numerator << "/" << cert.denominator << (cert.universal ? " PASS" : " FAIL")
      << '\n';
  return cert.universal ? kExitOk : kExitPropertyFail;
}

DualityReport duality_scan(const std::vector<Index>& dims, int trials, std::uint64_t rng_seed) {
  if (dims.size() != 3) throw ParseError("duality: need exactly three dimensions");
  for (Index d : dims) {
    if (d < 2) throw ParseError("duality: dimensions must be >= 2");
  }
  const Index total = dims[0] * dims[1] * dims[2];
  const Caps caps;
  if (total > caps.tensor_dim) {
    throw TooLarge("duality: joint dimension " + std::to_string(total) + " exceeds cap " +
                   std::to_string(caps.tensor_dim));
  }

  static const std::vector<std::pair<Real, Real>> up_pairs = {
      {2.0, 2.0 / 3.0}, {1.25, 5.0 / 6.0}, {1.5, 0.75}};
  static const std::vector<std::pair<Real, Real>> down_pairs = {{2.0, 0.5}, {0.5, 2.0}};

  DualityReport report;
  report.trials = trials;
  SplitMix64 rng(rng_seed);
  for (int t = 0; t < trials; ++t) {
    const Vector psi = random_pure(total, rng);
    const Matrix full = psi * psi.adjoint();
    const DensityMatrix rho_ae(partial_trace(full, {dims[0], dims[1], dims[2]}, {0, 2}),
                               {dims[0], dims[2]});
    const DensityMatrix rho_ab(partial_trace(full, {dims[0], dims[1], dims[2]}, {0, 1}),
                               {dims[0], dims[1]});
    for (const auto& [a, b] : up_pairs) {
      const Real defect = std::abs(renyi_cond_up_sand(rho_ae, AlphaOrder(a)) +
                                   renyi_cond_up_sand(rho_ab, AlphaOrder(b)));
      report.max_defect = std::max(report.max_defect, defect);
    }
    for (const auto& [a, b] : down_pairs) {
      const Real defect = std::abs(renyi_cond_down_sand(rho_ae, AlphaOrder(a)) +
                                   renyi_cond_up_petz(rho_ab, AlphaOrder(b)));
      report.max_defect = std::max(report.max_defect, defect);
    }
  }
  return report;
}

int cmd_duality(const std::vector<Index>& dims, int trials, std::uint64_t rng_seed,
                std::ostream& out) {
  DualityReport report;
  try {
    report = duality_scan(dims, trials, rng_seed);
  } catch (const ParseError& e) {
    out << Json{{"error", e.what()}}.dump() << '\n';
    return kExitParse;
  } catch (const TooLarge& e) {
    out << "cap: " << e.what() << '\n';
    return kExitCaps;
  }
  Json j;
  j["provenance"] = Json::parse(provenance_json(rng_seed));
  j["dims"] = dims;
  j["trials"] = report.trials;
  if (report.trials > 0) {
    j["max_defect"] = report.max_defect;
  } else {
    j["max_defect"] = nullptr;
  }
  j["tolerance"] = 1e-6;
  const bool ok = report.trials == 0 || report.max_defect <= 1e-6;
  j["pass"] = ok;
  out << j.dump(2) << '\n';
  return ok ? kExitOk : kExitPropertyFail;
}

}  // namespace corex
