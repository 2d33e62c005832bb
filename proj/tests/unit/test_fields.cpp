#include <doctest.h>
#include <stdexcept>

#include <cmath>

#include "csd/fields.hpp"

using namespace csd;

TEST_CASE("covariance matrices from the built-in models") {
  std::vector<Site> sites3{Site{0, 0}, Site{2, 1}, Site{-1, 3}};
  Eigen::MatrixXd wn = covariance_matrix(sites3, FieldModel::white_noise(2));
  CHECK(wn.isIdentity(0.0));

  FieldModel g1 = FieldModel::stationary_gaussian(1, CovarianceKernel::squared_exponential());
  std::vector<Site> sites1{Site{0}, Site{1}};
  Eigen::MatrixXd c1 = covariance_matrix(sites1, g1);
  CHECK(c1(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(c1(0, 0) == 1.0);

  FieldModel g2 = FieldModel::stationary_gaussian(2, CovarianceKernel::squared_exponential());
  std::vector<Site> sites2{Site{0, 0}, Site{1, 1}};
  CHECK(covariance_matrix(sites2, g2)(0, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("means: centered models and the cosine preset") {
  FieldModel ns = FieldModel::nonstationary_cos(CovarianceKernel::squared_exponential());
  CHECK(mean_at(ns, Site{0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean_at(ns, Site{1}) == doctest::Approx(-1.0).epsilon(1e-12));
  for (int t = -5; t <= 5; ++t)
    CHECK(mean_at(ns, Site{t}) == doctest::Approx(mean_at(ns, Site{t + 2})).epsilon(1e-9));

  FieldModel g = FieldModel::stationary_gaussian(1, CovarianceKernel::squared_exponential());
  CHECK(mean_at(g, Site{7}) == 0.0);
}

TEST_CASE("white-noise marginals") {
  FieldModel wn = FieldModel::white_noise(1);
  CHECK(wn.marginal_cdf(0.5) == doctest::Approx(0.69146246127401312).epsilon(1e-14));
  FieldModel chi = FieldModel::white_noise(1, Marginal::ChiSquared2);
  CHECK(chi.marginal_cdf(-1.0) == 0.0);
  CHECK(chi.marginal_cdf(0.5) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-14));
}

TEST_CASE("simulation is a pure function of (model, window, seed)") {
  Window w = Window::centered(std::vector<int64_t>{64, 64});
  FieldModel g = FieldModel::stationary_gaussian(2, CovarianceKernel::squared_exponential());
  Realization a = simulate(g, w, 42);
  Realization b = simulate(g, w, 42);
  CHECK(a.values == b.values);  // bitwise
  Realization c = simulate(g, w, 43);
  CHECK(a.values != c.values);

  FieldSimulator sim(g, w, 42);
  CHECK(sim.generate(0).values == a.values);
  CHECK(sim.generate(1).values != a.values);
  CHECK_FALSE(sim.eigenvalues_clamped());
}

TEST_CASE("white noise sample moments") {
  Window w = Window::centered(std::vector<int64_t>{100000});
  Realization r = simulate(FieldModel::white_noise(1), w, 7);
  double sum = 0.0, sum_sq = 0.0;
  for (double v : r.values) {
    sum += v;
    sum_sq += v * v;
  }
  double n = static_cast<double>(r.values.size());
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("circulant embedding reproduces the lag-1 correlation") {
  Window w = Window::centered(std::vector<int64_t>{100000});
  FieldModel g = FieldModel::stationary_gaussian(1, CovarianceKernel::squared_exponential());
  Realization r = simulate(g, w, 11);
  double s0 = 0.0, s1 = 0.0;
  for (size_t i = 0; i + 1 < r.values.size(); ++i) {
    s0 += r.values[i] * r.values[i];
    s1 += r.values[i] * r.values[i + 1];
  }
  double lag1 = s1 / s0;
  CHECK(std::abs(lag1 - std::exp(-1.0)) < 0.02);
}

TEST_CASE("stationarity across realizations: covariance at fixed lags") {
  const uint64_t m = 200;
  Window w = Window::centered(std::vector<int64_t>{1500});
  FieldModel g = FieldModel::stationary_gaussian(1, CovarianceKernel::squared_exponential());
  FieldSimulator sim(g, w, 5);
  for (int lag : {0, 1, 2}) {
    double sum = 0.0, sum_sq = 0.0;
    for (uint64_t rep = 0; rep < m; ++rep) {
      Realization r = sim.generate(rep);
      double acc = 0.0;
      size_t n = r.values.size() - static_cast<size_t>(lag);
      for (size_t i = 0; i < n; ++i) acc += r.values[i] * r.values[i + static_cast<size_t>(lag)];
      acc /= static_cast<double>(n);
      sum += acc;
      sum_sq += acc * acc;
    }
    double mean = sum / m;
    double sd = std::sqrt((sum_sq - sum * sum / m) / (m - 1.0));
    double se = sd / std::sqrt(static_cast<double>(m));
    double target = std::exp(-static_cast<double>(lag) * lag);
    CHECK(std::abs(mean - target) <= 4.0 * se);
  }
}

TEST_CASE("2D embedding matches nearest and diagonal lags") {
  const uint64_t m = 150;
  Window w = Window::centered(std::vector<int64_t>{48, 48});
  FieldModel g = FieldModel::stationary_gaussian(2, CovarianceKernel::squared_exponential());
  FieldSimulator sim(g, w, 17);
  double sum1 = 0.0, sq1 = 0.0, sum2 = 0.0, sq2 = 0.0;
  for (uint64_t rep = 0; rep < m; ++rep) {
    Realization r = sim.generate(rep);
    double a1 = 0.0, a2 = 0.0;
    int n1 = 0, n2 = 0;
    for (int64_t i = 0; i < w.site_count(); ++i) {
      Site s = w.site_at(i);
      Site right = s + Site::unit(2, 0);
      Site diag = s + Site{1, 1};
      if (w.contains(right)) {
        a1 += r.values[static_cast<size_t>(i)] * r.values[static_cast<size_t>(w.index_of(right))];
        ++n1;
      }
      if (w.contains(diag)) {
        a2 += r.values[static_cast<size_t>(i)] * r.values[static_cast<size_t>(w.index_of(diag))];
        ++n2;
      }
    }
    a1 /= n1;
    a2 /= n2;
    sum1 += a1;
    sq1 += a1 * a1;
    sum2 += a2;
    sq2 += a2 * a2;
  }
  double mean1 = sum1 / m, se1 = std::sqrt((sq1 - sum1 * sum1 / m) / (m - 1.0) / m);
  double mean2 = sum2 / m, se2 = std::sqrt((sq2 - sum2 * sum2 / m) / (m - 1.0) / m);
  CHECK(std::abs(mean1 - std::exp(-1.0)) <= 4.0 * se1);
  CHECK(std::abs(mean2 - std::exp(-2.0)) <= 4.0 * se2);
}

TEST_CASE("chi-squared field: centering and the exceedance identity") {
  Window w = Window::centered(std::vector<int64_t>{320, 320});
  FieldModel chi = FieldModel::chi_squared(2, CovarianceKernel::squared_exponential());
  Realization r = simulate(chi, w, 23);
  double sum = 0.0;
  int64_t above = 0;
  for (double v : r.values) {
    sum += v;
    if (v > 0.5) ++above;
  }
  double n = static_cast<double>(r.values.size());
  CHECK(std::abs(sum / n) < 0.02);
  // P(Z > 0.5) = exp(-1.5): (X^2+Y^2)/2 > 1.5 iff a chi-square(2) exceeds 3
  CHECK(std::abs(static_cast<double>(above) / n - std::exp(-1.5)) < 0.01);
}

TEST_CASE("nonstationary preset adds the cosine mean") {
  Window w = Window::centered(std::vector<int64_t>{2000});
  FieldModel ns = FieldModel::nonstationary_cos(CovarianceKernel::squared_exponential());
  FieldSimulator sim(ns, w, 31);
  double even = 0.0, odd = 0.0;
  int64_t n_even = 0, n_odd = 0;
  const uint64_t m = 50;
  for (uint64_t rep = 0; rep < m; ++rep) {
    Realization r = sim.generate(rep);
    for (int64_t i = 0; i < w.site_count(); ++i) {
      if (w.site_at(i)[0] % 2 == 0) {
        even += r.values[static_cast<size_t>(i)];
        ++n_even;
      } else {
        odd += r.values[static_cast<size_t>(i)];
        ++n_odd;
      }
    }
  }
  CHECK(even / n_even == doctest::Approx(1.0).epsilon(0.02));
  CHECK(odd / n_odd == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("3D circulant embedding runs and reproduces") {
  Window w = Window::centered(std::vector<int64_t>{12, 12, 12});
  FieldModel g = FieldModel::stationary_gaussian(3, CovarianceKernel::squared_exponential());
  FieldSimulator sim(g, w, 51);
  Realization a = sim.generate(0);
  Realization b = sim.generate(0);
  CHECK(a.values == b.values);
  CHECK_FALSE(sim.eigenvalues_clamped());
  double s0 = 0.0, s1 = 0.0;
  int64_t n1 = 0;
  for (int64_t i = 0; i < w.site_count(); ++i) {
    s0 += a.values[static_cast<size_t>(i)] * a.values[static_cast<size_t>(i)];
    Site right = w.site_at(i) + Site::unit(3, 2);
    if (w.contains(right)) {
      s1 += a.values[static_cast<size_t>(i)] * a.values[static_cast<size_t>(w.index_of(right))];
      ++n1;
    }
  }
  // one realization of 1728 sites: a loose sanity band around exp(-1)
  double lag1 = (s1 / n1) / (s0 / static_cast<double>(w.site_count()));
  CHECK(lag1 > 0.15);
  CHECK(lag1 < 0.6);
}

TEST_CASE("model/window dimension mismatch is rejected") {
  Window w = Window::centered(std::vector<int64_t>{16, 16});
  CHECK_THROWS_AS(simulate(FieldModel::white_noise(1), w, 1), std::invalid_argument);
}
