#pragma once

#include <string>
#include <vector>

#include "corex/extraction.hpp"

namespace corex {

// Builders for the named states accepted by the CLI.
DensityMatrix plus_state();
DensityMatrix mixed06_state();
DensityMatrix maximally_mixed(Index dim);
DensityMatrix maximally_coherent(Index dim);

// A parsed state specification: one of a named state, a Bloch vector, or an
// explicit matrix. Parsing is strict; resolve() validates the state.
struct StateSpec {
  std::string id;
  DensityMatrix state = DensityMatrix(Matrix::Identity(1, 1));
};

// Parses JSON text of the form {"named": "mixed06"}, {"bloch": [x, y, z]} or
// {"matrix": {"dim": d, "entries": [[re, im], ...]}} (row major, dim^2 pairs).
// Throws ParseError with a field diagnostic on malformed input.
StateSpec parse_state_spec_text(const std::string& text);

// Serializes a resolved spec back to the explicit matrix form.
std::string state_spec_round_trip(const StateSpec& spec);

struct RunManifest {
  StateSpec spec;
  std::vector<int> n_list;
  std::vector<int> k_list;  // empty means k = n per combination
  AverageMode mode = AverageMode::kExact;
  std::uint64_t samples = 256;
  std::uint64_t rng_seed = 0x5EC5EED5EC5EEDULL;
  int workers = 1;
  std::string out_dir = ".";
  Caps caps{};
};

// Parses the manifest JSON: {"state": <spec>, "n": [..], "k": [..],
// "mode": "exact"|"mc", "samples": u, "seed": u, "workers": w, "out": dir}.
RunManifest parse_manifest_text(const std::string& text);

// Provenance block shared by every report: version, tolerances, caps, grids.
std::string provenance_json(std::uint64_t rng_seed);

// Randomized audit of the conditional-entropy duality relations on tripartite
// pure states; reports the maximum absolute defect over all trials and pairs.
struct DualityReport {
  int trials = 0;
  Real max_defect = 0.0;
};
DualityReport duality_scan(const std::vector<Index>& dims, int trials, std::uint64_t rng_seed);

// Command backends. Each returns the process exit code and writes
// human-facing output to the given stream.
int cmd_measures(const std::string& spec_text, const std::vector<Real>& alphas,
                 std::ostream& out);
int cmd_extract(const RunManifest& manifest, std::ostream& out);
int cmd_certify(int label_bits, int output_bits, std::ostream& out);
int cmd_duality(const std::vector<Index>& dims, int trials, std::uint64_t rng_seed,
                std::ostream& out);

// Exit codes shared by the command backends.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFail = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitCaps = 3;

}  // namespace corex
