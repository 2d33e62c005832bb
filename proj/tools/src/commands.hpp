#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace csd::cli {

struct GlobalOptions {
  uint64_t seed = 20240801;
  int threads = 0;
  std::string out;
  std::string format = "csv";
  std::string command_line;  // provenance echo for emitted files
};

struct ShapesArgs {
  int dim = 2;
  std::string conn = "nearest";
  int kmax = 3;
  bool full = false;
  int cap = -1;
};

struct TheoryArgs {
  std::string preset;
  std::string conn;  // empty: preset default
  std::vector<double> us;
  int kmax = 6;
  std::string mode;  // empty: exact-denominator (d=1) / truncated-plus-mc-tail (d>=2)
  bool peak = false;
  int anchor = 0;
  double qmc_rel_error = 1e-4;
  uint64_t mc_draws = 10'000'000;
  uint64_t tail_m = 2000;
  std::string histogram;
};

struct EstimateArgs {
  std::string preset;
  std::string conn;
  std::vector<double> us;
  uint64_t m = 0;  // 0: preset default
  std::string window;
  std::string sub;
  std::string estimator = "direct";
  int k = 0;
  int kmax = 64;
  std::string boundary = "include-all";
  uint64_t stream_every = 0;
  std::string dump_fields;
  uint64_t dump_count = 1;
  std::string dump_clusters;
};

struct CompareArgs {
  std::string preset;
  std::string conn;
  std::vector<double> us;
  int kmax = 6;
  uint64_t m = 0;
  std::string window;
  double tolerance = 0.002;
  double qmc_rel_error = 1e-4;
  uint64_t mc_draws = 1'000'000;
};

struct ReproduceArgs {
  std::string table;
  double scale = 1.0;
  int exact_kmax = 6;
  // anchored peak classes cost far more per size; exact head for peak rows
  int exact_kmax_peak = 4;
  double tolerance = 0.0;  // 0: default 0.002 (1D) / 0.005 (2D)
  uint64_t mc_theory_m = 15000;
};

int cmd_shapes(const ShapesArgs& args, const GlobalOptions& global);
int cmd_theory(const TheoryArgs& args, const GlobalOptions& global);
int cmd_estimate(const EstimateArgs& args, const GlobalOptions& global);
int cmd_compare(const CompareArgs& args, const GlobalOptions& global);
int cmd_reproduce_table(const ReproduceArgs& args, const GlobalOptions& global);

}  // namespace csd::cli
