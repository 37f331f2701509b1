#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corex/statespec.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw corex::ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

int dispatch(int argc, char** argv) {
  CLI::App app{"coherence measures and secure randomness extraction"};
  app.require_subcommand(1);

  std::string spec_path;
  std::vector<double> alphas{0.5, 2.0};
  CLI::App* measures = app.add_subcommand("measures", "coherence measures of one state");
  measures->add_option("--spec", spec_path, "state spec JSON file")->required();
  measures->add_option("--alpha", alphas, "Renyi orders to evaluate")->delimiter(',');

  std::string manifest_path;
  std::string out_dir;
  std::string mode;
  std::uint64_t samples = 0;
  bool samples_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<int> n_list;
  std::vector<int> k_list;
  int workers = 0;
  CLI::App* extract = app.add_subcommand("extract", "run the extraction strategy grid");
  extract->add_option("--spec", manifest_path, "run manifest JSON file")->required();
  extract->add_option("--out", out_dir, "output directory for CSV/JSON");
  extract->add_option("--mode", mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  extract->add_option("--samples", samples, "Monte Carlo sample count")
      ->each([&](const std::string&) { samples_set = true; });
  extract->add_option("--seed", seed, "RNG seed")
      ->each([&](const std::string&) { seed_set = true; });
  extract->add_option("--n", n_list, "copy counts")->delimiter(',');
  extract->add_option("--k", k_list, "output bit lengths")->delimiter(',');
  extract->add_option("--workers", workers, "worker thread count");

  int cert_m = 0;
  int cert_k = 0;
  CLI::App* certify = app.add_subcommand("certify", "exhaustive universal-2 certification");
  certify->add_option("-m,--m", cert_m, "label bits")->required();
  certify->add_option("-k,--k", cert_k, "output bits")->required();

  std::vector<corex::Index> dims{2, 2, 2};
  int trials = 100;
  std::uint64_t duality_seed = 0xD0A11D5EEDULL;
  CLI::App* duality = app.add_subcommand("duality", "conditional-entropy duality audit");
  duality->add_option("--dims", dims, "three subsystem dimensions")->delimiter(',');
  duality->add_option("--trials", trials, "number of random states");
  duality->add_option("--seed", duality_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? corex::kExitOk : corex::kExitParse;
  }

  if (measures->parsed()) {
    std::vector<corex::Real> orders(alphas.begin(), alphas.end());
    return corex::cmd_measures(read_file(spec_path), orders, std::cout);
  }
  if (extract->parsed()) {
    corex::RunManifest manifest = corex::parse_manifest_text(read_file(manifest_path));
    if (!out_dir.empty()) manifest.out_dir = out_dir;
    if (!mode.empty()) {
      manifest.mode = mode == "exact" ? corex::AverageMode::kExact
                                      : corex::AverageMode::kMonteCarlo;
    }
    if (samples_set) manifest.samples = samples;
    if (seed_set) manifest.rng_seed = seed;
    if (!n_list.empty()) manifest.n_list = n_list;
    if (!k_list.empty()) manifest.k_list = k_list;
    if (workers > 0) manifest.workers = workers;
    return corex::cmd_extract(manifest, std::cout);
  }
  if (certify->parsed()) {
    return corex::cmd_certify(cert_m, cert_k, std::cout);
  }
  return corex::cmd_duality(dims, trials, duality_seed, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const corex::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return corex::kExitParse;
  } catch (const corex::TooLarge& e) {
    std::cerr << "cap: " << e.what() << '\n';
    return corex::kExitCaps;
  } catch (const corex::DimensionOverflow& e) {
    std::cerr << "cap: " << e.what() << '\n';
    return corex::kExitCaps;
  } catch (const corex::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return corex::kExitPropertyFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return corex::kExitPropertyFail;
  }
}
