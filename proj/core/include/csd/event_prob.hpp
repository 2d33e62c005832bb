#pragma once

#include "csd/fields.hpp"
#include "csd/lattice.hpp"
#include "csd/mvn.hpp"

namespace csd {

struct EventOptions {
  MvnOptions mvn;
  uint64_t mc_draws = 10'000'000;  // joint Monte-Carlo draws for non-Gaussian models
  uint64_t mc_seed = 0xC4153ULL;
  int threads = 0;  // 0 = hardware concurrency
};

/// P(X_D > u, X_{N(D)} <= u): the event that D is exactly an excursion
/// cluster. White noise: closed form p^{|N(D)|} q^{|D|}. Gaussian models: MVN
/// rectangle. Chi-squared: joint Monte-Carlo over the Gaussian pair.
ProbEstimate excursion_probability(const SiteSet& d, double u, const FieldModel& model,
                                   Connectivity conn, const EventOptions& options = {});

/// P(X_D > u, X_{N(D)} <= u, X_t > max of X over neighbors of t) for t in D.
/// Only the m = |neighbors(t) ∩ D| in-shape dominance constraints are added;
/// out-of-shape neighbors are already forced <= u < X_t. White noise closed
/// form: p^{|N(D)|} q^{|D|} / (m+1).
ProbEstimate peak_event_probability(const SiteSet& d, const Site& anchor, double u,
                                    const FieldModel& model, Connectivity conn,
                                    const EventOptions& options = {});

/// P(X_t > u, X_t > max of X over neighbors of t). White noise closed form:
/// (1 - p^{n+1})/(n+1) with n = |neighbors(t)|.
ProbEstimate peak_denominator(const Site& t, double u, const FieldModel& model,
                              Connectivity conn, const EventOptions& options = {});

}  // namespace csd
