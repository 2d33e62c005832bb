#pragma once

#include <functional>
#include <map>

#include "csd/fields.hpp"
#include "csd/lattice.hpp"
#include "csd/mvn.hpp"

namespace csd {

enum class EstimatorKind { Direct, DirectPeak, McOrigin, McRefined, McPeak, NonstatPeak };
enum class BoundaryPolicy { IncludeAll, ExcludeTouching };

const char* to_string(EstimatorKind e);
const char* to_string(BoundaryPolicy p);

struct CountRow {
  int k = 0;
  /// Raw accumulation across realizations: cluster / peak / indicator counts,
  /// or the integer intersection-site sum for the refined estimator. Integer
  /// valued, stored exactly.
  double count = 0.0;
  double count_sq = 0.0;  // sum of squared per-realization counts
  double estimate = 0.0;
  double std_error = 0.0;
};

struct CountingResult {
  EstimatorKind estimator = EstimatorKind::Direct;
  std::string model;
  double u = 0.0;
  Connectivity conn = Connectivity::Nearest;
  uint64_t realizations = 0;
  Window window;
  Window subwindow;
  bool has_subwindow = false;
  BoundaryPolicy policy = BoundaryPolicy::IncludeAll;
  uint64_t seed = 0;
  int64_t normalizer_sites = 0;    // N^d, n^d or |D_0| depending on the estimator
  uint64_t boundary_excluded = 0;  // clusters skipped for touching the window edge
  int64_t tie_count = 0;           // exact local-maximum ties encountered
  uint64_t overflow_clusters = 0;  // clusters larger than the row cap
  uint64_t overflow_sites = 0;
  std::vector<CountRow> rows;      // ascending k
  double sum_estimate = 0.0;       // estimate of sum_k w_k (all clusters / peaks)
  double sum_std_error = 0.0;

  const CountRow* row(int k) const;
  double estimate_at(int k) const;
};

struct EmpiricalOptions {
  int threads = 0;
  int k_cap = 64;  // per-size rows kept up to this size; larger go to overflow
  /// Invoked with (realizations done, partial result) every stream_every
  /// realizations; 0 disables streaming.
  uint64_t stream_every = 0;
  std::function<void(uint64_t, const CountingResult&)> on_partial;
};

/// Direct estimator: size-k cluster counts over M realizations divided by
/// M * N^d. include-all counts every cluster; exclude-touching drops clusters
/// on the window edge.
CountingResult empirical_wk(const FieldModel& model, uint64_t m, const Window& window, double u,
                            Connectivity conn, BoundaryPolicy policy, uint64_t seed,
                            const EmpiricalOptions& options = {});

/// Peak estimator: local maxima above u (interior sites) binned by the size of
/// their cluster measured on the full window.
CountingResult empirical_peak_wk(const FieldModel& model, uint64_t m, const Window& window,
                                 double u, Connectivity conn, uint64_t seed,
                                 const EmpiricalOptions& options = {});

/// Origin indicator estimator of w_k: I_m flags a size-k cluster containing
/// the origin and not touching the window boundary; estimate sum I / (M k).
CountingResult mc_origin(const FieldModel& model, uint64_t m, const Window& window, double u,
                         Connectivity conn, int k, uint64_t seed,
                         const EmpiricalOptions& options = {});

/// Refined estimator: size-k clusters meeting the subwindow in x sites and
/// not touching the outer boundary count x/k; estimate sum J / (n^d M).
CountingResult mc_refined(const FieldModel& model, uint64_t m, const Window& window,
                          const Window& subwindow, double u, Connectivity conn, int k,
                          uint64_t seed, const EmpiricalOptions& options = {});

/// Peak estimator over a subwindow: local maxima above u inside the subwindow
/// whose clusters have size k and avoid the outer boundary.
CountingResult mc_peak(const FieldModel& model, uint64_t m, const Window& window,
                       const Window& subwindow, double u, Connectivity conn, int k,
                       uint64_t seed, const EmpiricalOptions& options = {});

/// Nonstationary cos-mean preset: peaks pooled over the even interior sites
/// D_0 = {0, +-2, +-4, ...}, normalized by M * |D_0|.
CountingResult nonstationary_peak_empirical(const FieldModel& model, uint64_t m,
                                            const Window& window, double u, int k_max,
                                            uint64_t seed,
                                            const EmpiricalOptions& options = {});

/// Refined estimator swept over every cluster size in one labeling pass;
/// rows carry estimates sum J_k / (k n^d M) for each observed k.
CountingResult mc_refined_sweep(const FieldModel& model, uint64_t m, const Window& window,
                                const Window& subwindow, double u, Connectivity conn,
                                uint64_t seed, const EmpiricalOptions& options = {});

/// Peak estimator swept over every cluster size in one pass.
CountingResult mc_peak_sweep(const FieldModel& model, uint64_t m, const Window& window,
                             const Window& subwindow, double u, Connectivity conn,
                             uint64_t seed, const EmpiricalOptions& options = {});

/// Refined-MC estimate of the tail mass sum_{k > k_min} w_k.
ProbEstimate mc_refined_tail(const FieldModel& model, uint64_t m, const Window& window,
                             const Window& subwindow, double u, Connectivity conn, int k_min,
                             uint64_t seed, const EmpiricalOptions& options = {});

}  // namespace csd
