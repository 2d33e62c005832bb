#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace csd {

/// A numerical probability with an attached error bound.
struct ProbEstimate {
  enum class Method { ClosedForm, Quadrature, Qmc, MonteCarlo };

  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::ClosedForm;
  uint64_t evaluations = 0;
  bool converged = true;

  static ProbEstimate closed_form(double v);
};

const char* to_string(ProbEstimate::Method m);

/// P(lower <= X <= upper) for X ~ N(mean, cov); +-infinity bounds allowed.
struct RectangleProblem {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dim() const { return mean.size(); }
};

struct MvnOptions {
  double target_rel_error = 1e-4;
  double abs_error_floor = 1e-10;   // converged once stderr <= max(rel*value, floor)
  int randomizations = 8;           // random shifts of the lattice rule
  uint64_t initial_points = 1 << 12;  // points per shift before escalation
  uint64_t max_points = 1 << 21;      // per-shift budget
  uint64_t seed = 0x51D25ULL;
};

/// Randomized quasi-Monte Carlo estimate of the rectangle probability via
/// sequential conditioning on a reordered (pivoted) Cholesky factor. Handles
/// singular covariances: linearly dependent coordinates contribute indicator
/// factors. Diagonal problems reduce to the exact product of univariate
/// interval probabilities (stderr 0).
ProbEstimate mvn_rectangle(const RectangleProblem& problem, const MvnOptions& options = {});

}  // namespace csd
