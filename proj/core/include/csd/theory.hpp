#pragma once

#include <optional>

#include "csd/event_prob.hpp"
#include "csd/shapes.hpp"

namespace csd {

/// How the denominator of P(S_u = k) = w_k / sum_j w_j is formed.
enum class NormalizationMode {
  ExactDenominator,     // d = 1 only: the bivariate start-of-cluster probability
  Truncated,            // sum of the computed rows
  TruncatedPlusMcTail,  // computed rows plus a refined-MC estimate of the tail
};

const char* to_string(NormalizationMode m);

struct DistributionRow {
  int k = 0;
  double w = 0.0;
  double w_stderr = 0.0;
  double mass = 0.0;
  double mass_stderr = 0.0;
  std::string method;
};

/// Exact or peak-based cluster-size distribution with provenance metadata.
struct DistributionTable {
  double u = 0.0;
  std::string model;
  Connectivity conn = Connectivity::Nearest;
  int dim = 1;
  bool peak = false;
  Site anchor;  // peak tables only
  NormalizationMode mode = NormalizationMode::Truncated;
  int k_max = 0;
  double denominator = 0.0;
  double denominator_stderr = 0.0;
  std::vector<DistributionRow> rows;

  double mass_sum() const;
  /// Masses rescaled to sum to one.
  DistributionTable renormalized() const;
};

struct TheoryOptions {
  EventOptions event;
  /// Isotropic models: evaluate one representative per rigid-motion class.
  bool use_class_reduction = true;
  int shape_cap = -1;
  int threads = 0;
  // refined-MC tail estimation for TruncatedPlusMcTail
  uint64_t tail_realizations = 2000;
  std::vector<int64_t> tail_window;     // default 100 per axis
  std::vector<int64_t> tail_subwindow;  // default 50 per axis
  uint64_t tail_seed = 0x7A11ULL;
};

/// w_k: per-site density of size-k clusters rooted at the origin, summed over
/// the rooted shape catalog.
ProbEstimate wk_exact(int k, double u, const FieldModel& model, Connectivity conn, int dim,
                      const TheoryOptions& options = {});

/// 1D specialization: the (k+2)-dimensional joint probability of a size-k run.
ProbEstimate wk_1d(int k, double u, const FieldModel& model, const TheoryOptions& options = {});

/// w_k^inside: density of size-k clusters containing the origin (equals k*w_k).
ProbEstimate wk_inside(int k, double u, const FieldModel& model, Connectivity conn, int dim,
                       const TheoryOptions& options = {});

/// w_k^peak(t): density of size-k clusters whose anchor t is a strict local
/// maximum above u. Stationary models evaluate at the origin.
ProbEstimate wk_peak(int k, const Site& anchor, double u, const FieldModel& model,
                     Connectivity conn, int dim, const TheoryOptions& options = {});

DistributionTable cluster_size_distribution(double u, const FieldModel& model, Connectivity conn,
                                            int dim, int k_max, NormalizationMode mode,
                                            const TheoryOptions& options = {});

/// Peak-based distribution; the denominator is the exact single-site local
/// maximum probability, never a truncated sum.
DistributionTable peak_cluster_size_distribution(const Site& anchor, double u,
                                                 const FieldModel& model, Connectivity conn,
                                                 int dim, int k_max,
                                                 const TheoryOptions& options = {});

/// Independent 1D route: sums the k left/right-split joint probabilities per
/// size instead of walking the shape catalog.
DistributionTable peak_csd_1d(const Site& anchor, double u, const FieldModel& model, int k_max,
                              const TheoryOptions& options = {});

struct InsideConsistencyReport {
  int k = 0;
  double w_inside = 0.0, w_inside_stderr = 0.0;
  double k_times_wk = 0.0, k_times_wk_stderr = 0.0;
  double gap = 0.0;
  double gate = 0.0;  // 3 joint standard errors
  bool pass = false;
};

/// Checks w_k^inside = k * w_k with the two sides estimated independently.
InsideConsistencyReport inside_consistency(int k, double u, const FieldModel& model,
                                           Connectivity conn, int dim,
                                           const TheoryOptions& options = {});

}  // namespace csd
