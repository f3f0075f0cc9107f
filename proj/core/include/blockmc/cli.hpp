// Command implementations behind the blockmc binary. Kept in the library so
// tests can drive them directly.
#ifndef BLOCKMC_CLI_HPP
#define BLOCKMC_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "blockmc/model.hpp"

namespace blockmc {

extern const char kVersion[];

struct GenerateOptions {
  std::string model = "bmm";
  int d = 6;
  std::uint64_t seed = 1;
  std::string out;
};

struct RunOptions {
  std::string sampler = "gibbs";
  std::string model;  // "bmm" or "irm"
  std::string data;
  int chains = 8;
  int iterations = 1000;
  int restarts = 1;
  std::uint64_t seed = 1;
  double scale = 1.0;
  int sm_sweeps = 5;
  double burn_in = 0.5;
  int threads = 0;
  int warmup = 50;
  bool interlace = true;
  ModelParams params;
  std::string out;
};

struct DiagnoseOptions {
  std::string traces;                 // glob over trace csv files
  std::string quantity = "logjoint";  // logjoint | topfrac | indicator
  std::string pairs;                  // pair file, required for indicator
  std::string out;                    // stem; writes <out>.csv and <out>.json
};

struct VerifyExactOptions {
  std::string sampler = "gibbs";
  int iterations = 160000;
  int chains = 8;
  std::uint64_t seed = 1;
  std::string out;
};

struct VerifyExactSummary {
  double max_abs_dev = 0;
  double total_variation = 0;
};

int cmd_generate(const GenerateOptions& opts);
int cmd_run(const RunOptions& opts);
int cmd_diagnose(const DiagnoseOptions& opts);
int cmd_verify_exact(const VerifyExactOptions& opts);

// Library form of verify-exact; used by the acceptance suite.
VerifyExactSummary run_verify_exact(const VerifyExactOptions& opts);

// '*' and '?' wildcards within path segments.
std::vector<std::string> glob_files(const std::string& pattern);

}  // namespace blockmc

#endif
