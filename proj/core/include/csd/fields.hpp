#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include "csd/lattice.hpp"

namespace csd {

/// Stationary covariance as a function of the integer lag vector.
struct CovarianceKernel {
  std::string name;
  std::function<double(const Site&)> at;
  double variance = 1.0;

  /// C(h) = exp(-|h|^2), unit variance.
  static CovarianceKernel squared_exponential();
};

enum class FieldKind { WhiteNoise, StationaryGaussian, ChiSquared, NonstationaryGaussian };

/// Marginal law of a white-noise field.
enum class Marginal { StandardNormal, ChiSquared2 };

/// A random-field model on Z^d. The chi-squared variant is the standardized
/// field Z = (X^2 + Y^2)/2 - 1 built from two independent Gaussian layers
/// sharing the kernel; the nonstationary variant adds the deterministic mean
/// cos(pi*t) to a stationary Gaussian process on Z.
class FieldModel {
 public:
  static FieldModel white_noise(int dim, Marginal marginal = Marginal::StandardNormal);
  static FieldModel stationary_gaussian(int dim, CovarianceKernel kernel);
  static FieldModel chi_squared(int dim, CovarianceKernel kernel);
  static FieldModel nonstationary_cos(CovarianceKernel kernel);

  FieldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  Marginal marginal() const { return marginal_; }
  const CovarianceKernel& kernel() const;

  double mean_at(const Site& t) const;
  /// Marginal CDF F(u) for white-noise variants.
  double marginal_cdf(double u) const;

  bool is_stationary() const { return kind_ != FieldKind::NonstationaryGaussian; }
  bool is_isotropic() const;
  /// True when joint laws reduce to a Gaussian vector (possibly with mean).
  bool is_gaussian() const;
  std::string descriptor() const;

 private:
  FieldModel(FieldKind kind, int dim) : kind_(kind), dim_(dim) {}

  FieldKind kind_;
  int dim_;
  Marginal marginal_ = Marginal::StandardNormal;
  CovarianceKernel kernel_;
  bool has_kernel_ = false;
};

double mean_at(const FieldModel& model, const Site& t);

/// Covariance matrix of the model's Gaussian layer on an ordered site list.
Eigen::MatrixXd covariance_matrix(std::span<const Site> sites, const FieldModel& model);

/// One simulated field on a window; (seed, index, model, window) reproduce it
/// bit-identically.
struct Realization {
  Window window;
  std::vector<double> values;  // lex order over window sites
  std::string model;
  uint64_t seed = 0;
  uint64_t index = 0;
};

/// Simulation engine: circulant embedding on a padded torus for stationary
/// Gaussian layers (dense Cholesky fallback for small windows), direct
/// counter-based draws for white noise. Thread-safe generate().
class FieldSimulator {
 public:
  FieldSimulator(const FieldModel& model, const Window& window, uint64_t seed);
  ~FieldSimulator();
  FieldSimulator(const FieldSimulator&) = delete;
  FieldSimulator& operator=(const FieldSimulator&) = delete;

  Realization generate(uint64_t realization_index) const;

  const FieldModel& model() const;
  const Window& window() const;
  uint64_t seed() const;
  /// True if the embedding had slightly negative eigenvalues clamped to zero.
  bool eigenvalues_clamped() const;

 private:
  struct Impl;
  std::unique_ptr<const Impl> impl_;
};

Realization simulate(const FieldModel& model, const Window& window, uint64_t seed);

}  // namespace csd
