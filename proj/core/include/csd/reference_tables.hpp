#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csd/lattice.hpp"

namespace csd::reference {

/// One published row: per-size densities and their empirical estimates,
/// rounded to five decimals. NaN marks columns the source does not print.
struct Row {
  int k;
  double w;
  double w_hat;
  double w_peak;
  double w_peak_hat;
};

struct Block {
  double u;
  std::vector<Row> rows;
  double sum_w, sum_w_hat, sum_w_peak, sum_w_peak_hat;
};

/// A complete reference experiment: model configuration plus published values.
struct Table {
  int id;
  std::string key;
  std::string title;
  std::string preset;  // model preset consumed by the CLI
  Connectivity conn;
  int dim;
  uint64_t realizations;  // M of the published experiment
  int64_t extent;         // window extent per axis
  bool peak_only;         // nonstationary: only peak columns exist
  /// The printed empirical peak column duplicates the empirical w column
  /// (its parenthesized masses are self-consistent and are used instead).
  bool peak_hat_column_unreliable;
  std::vector<Block> blocks;
};

const std::vector<Table>& reference_tables();
/// Lookup by id (1..7). Throws std::invalid_argument for unknown ids.
const Table& reference_table(int id);
/// Lookup by key ("wn-1d", "sq-exp-2d-nearest", ...); nullptr if absent.
const Table* find_reference_table(const std::string& key);

}  // namespace csd::reference
