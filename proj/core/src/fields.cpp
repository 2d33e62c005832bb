#include "csd/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "csd/normal.hpp"
#include "csd/rng.hpp"

namespace csd {

CovarianceKernel CovarianceKernel::squared_exponential() {
  CovarianceKernel k;
  k.name = "sq-exp";
  k.at = [](const Site& h) {
    double r2 = 0.0;
    for (int i = 0; i < h.dim(); ++i) r2 += static_cast<double>(h[i]) * h[i];
    return std::exp(-r2);
  };
  k.variance = 1.0;
  return k;
}

FieldModel FieldModel::white_noise(int dim, Marginal marginal) {
  FieldModel m(FieldKind::WhiteNoise, dim);
  m.marginal_ = marginal;
  return m;
}

FieldModel FieldModel::stationary_gaussian(int dim, CovarianceKernel kernel) {
  FieldModel m(FieldKind::StationaryGaussian, dim);
  m.kernel_ = std::move(kernel);
  m.has_kernel_ = true;
  return m;
}

FieldModel FieldModel::chi_squared(int dim, CovarianceKernel kernel) {
  FieldModel m(FieldKind::ChiSquared, dim);
  m.kernel_ = std::move(kernel);
  m.has_kernel_ = true;
  return m;
}

FieldModel FieldModel::nonstationary_cos(CovarianceKernel kernel) {
  FieldModel m(FieldKind::NonstationaryGaussian, 1);
  m.kernel_ = std::move(kernel);
  m.has_kernel_ = true;
  return m;
}

const CovarianceKernel& FieldModel::kernel() const {
  if (!has_kernel_) throw std::logic_error("FieldModel: no covariance kernel");
  return kernel_;
}

double FieldModel::mean_at(const Site& t) const {
  if (kind_ == FieldKind::NonstationaryGaussian)
    return std::cos(std::numbers::pi * static_cast<double>(t[0]));
  return 0.0;
}

double FieldModel::marginal_cdf(double u) const {
  if (kind_ != FieldKind::WhiteNoise)
    throw std::logic_error("marginal_cdf: white-noise models only");
  switch (marginal_) {
    case Marginal::StandardNormal: return normal_cdf(u);
    case Marginal::ChiSquared2: return u <= -1.0 ? 0.0 : 1.0 - std::exp(-(u + 1.0));
  }
  return 0.0;
}

bool FieldModel::is_isotropic() const {
  // all built-in kernels depend on |h| only; white noise trivially isotropic
  return kind_ != FieldKind::NonstationaryGaussian;
}

bool FieldModel::is_gaussian() const {
  return kind_ == FieldKind::StationaryGaussian || kind_ == FieldKind::NonstationaryGaussian ||
         (kind_ == FieldKind::WhiteNoise && marginal_ == Marginal::StandardNormal);
}

std::string FieldModel::descriptor() const {
  switch (kind_) {
    case FieldKind::WhiteNoise:
      return marginal_ == Marginal::StandardNormal
                 ? "white-noise-normal-" + std::to_string(dim_) + "d"
                 : "white-noise-chisq2-" + std::to_string(dim_) + "d";
    case FieldKind::StationaryGaussian:
      return "gaussian-" + kernel_.name + "-" + std::to_string(dim_) + "d";
    case FieldKind::ChiSquared:
      return "chisq-" + kernel_.name + "-" + std::to_string(dim_) + "d";
    case FieldKind::NonstationaryGaussian:
      return "nonstat-cos-" + kernel_.name + "-1d";
  }
  return "unknown";
}

double mean_at(const FieldModel& model, const Site& t) { return model.mean_at(t); }

Eigen::MatrixXd covariance_matrix(std::span<const Site> sites, const FieldModel& model) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd cov(n, n);
  if (model.kind() == FieldKind::WhiteNoise) {
    cov.setIdentity();
    return cov;
  }
  const auto& k = model.kernel();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double v = k.at(sites[static_cast<size_t>(i)] - sites[static_cast<size_t>(j)]);
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

namespace {

constexpr int kPadPerSide = 8;
constexpr int64_t kDenseFallbackLimit = 4096;
constexpr double kEigenvalueTolerance = 1e-12;

std::mutex& fftw_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftBuffers {
  fftw_complex* data = nullptr;
  explicit FftBuffers(int64_t n) {
    data = fftw_alloc_complex(static_cast<size_t>(n));
    if (!data) throw std::bad_alloc();
  }
  ~FftBuffers() { fftw_free(data); }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

}  // namespace

struct FieldSimulator::Impl {
  FieldModel model;
  Window window;
  uint64_t seed;

  enum class Method { WhiteNoise, Circulant, DenseCholesky };
  Method method = Method::WhiteNoise;
  bool clamped = false;

  // circulant embedding state
  std::vector<int64_t> torus_dims;
  int64_t torus_size = 0;
  std::vector<double> sqrt_lambda;  // sqrt(eigenvalue), length torus_size
  fftw_plan plan = nullptr;

  // dense fallback state
  Eigen::MatrixXd chol_lower;

  Impl(const FieldModel& m, const Window& w, uint64_t s) : model(m), window(w), seed(s) {
    if (m.dim() != w.dim())
      throw std::invalid_argument("FieldSimulator: model/window dimension mismatch");
    if (m.kind() == FieldKind::WhiteNoise) {
      method = Method::WhiteNoise;
      return;
    }
    if (!setup_circulant()) {
      if (w.site_count() <= kDenseFallbackLimit) {
        setup_dense();
      } else {
        throw std::runtime_error(
            "FieldSimulator: circulant embedding not nonnegative and window too large "
            "for the dense fallback; increase the torus padding");
      }
    }
  }

  ~Impl() {
    if (plan) {
      std::scoped_lock lock(fftw_mutex());
      fftw_destroy_plan(plan);
    }
  }

  bool setup_circulant() {
    const int d = window.dim();
    torus_dims.resize(static_cast<size_t>(d));
    torus_size = 1;
    for (int i = 0; i < d; ++i) {
      torus_dims[static_cast<size_t>(i)] = window.extent(i) + 2 * kPadPerSide;
      torus_size *= torus_dims[static_cast<size_t>(i)];
    }

    // covariance row of the wrapped kernel
    FftBuffers row(torus_size);
    const auto& kern = model.kernel();
    std::vector<int64_t> c(static_cast<size_t>(d), 0);
    for (int64_t idx = 0; idx < torus_size; ++idx) {
      Site lag = Site::origin(d);
      for (int i = 0; i < d; ++i) {
        int64_t ci = c[static_cast<size_t>(i)];
        int64_t L = torus_dims[static_cast<size_t>(i)];
        lag[i] = static_cast<int32_t>(ci <= L / 2 ? ci : ci - L);
      }
      row.data[idx][0] = kern.at(lag);
      row.data[idx][1] = 0.0;
      for (int i = d - 1; i >= 0; --i) {
        if (++c[static_cast<size_t>(i)] < torus_dims[static_cast<size_t>(i)]) break;
        c[static_cast<size_t>(i)] = 0;
      }
    }

    FftBuffers lambda(torus_size);
    std::vector<int> dims_int(torus_dims.begin(), torus_dims.end());
    {
      std::scoped_lock lock(fftw_mutex());
      fftw_plan fwd = fftw_plan_dft(d, dims_int.data(), row.data, lambda.data, FFTW_FORWARD,
                                    FFTW_ESTIMATE);
      fftw_execute(fwd);
      fftw_destroy_plan(fwd);
    }

    sqrt_lambda.resize(static_cast<size_t>(torus_size));
    for (int64_t i = 0; i < torus_size; ++i) {
      double ev = lambda.data[i][0];
      if (ev < -kEigenvalueTolerance) {
        sqrt_lambda.clear();
        return false;  // genuine violation: caller falls back or errors
      }
      if (ev < 0.0) clamped = true;
      sqrt_lambda[static_cast<size_t>(i)] = ev > 0.0 ? std::sqrt(ev) : 0.0;
    }

    {
      std::scoped_lock lock(fftw_mutex());
      FftBuffers in(torus_size), out(torus_size);
      plan = fftw_plan_dft(d, dims_int.data(), in.data, out.data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    method = Method::Circulant;
    return true;
  }

  void setup_dense() {
    std::vector<Site> sites;
    sites.reserve(static_cast<size_t>(window.site_count()));
    for (int64_t i = 0; i < window.site_count(); ++i) sites.push_back(window.site_at(i));
    Eigen::MatrixXd cov = covariance_matrix(sites, model);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      // allow tiny indefiniteness by lifting the diagonal once
      Eigen::MatrixXd lifted = cov + 1e-12 * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
      llt.compute(lifted);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("FieldSimulator: dense Cholesky factorization failed");
    }
    chol_lower = llt.matrixL();
    method = Method::DenseCholesky;
  }

  // one stationary Gaussian layer with the model's kernel
  std::vector<double> gaussian_layer(uint64_t realization, uint32_t component) const {
    CounterRng rng(seed, component);
    const int d = window.dim();
    const int64_t n = window.site_count();
    std::vector<double> values(static_cast<size_t>(n));

    if (method == Method::DenseCholesky) {
      Eigen::VectorXd z(n);
      for (int64_t i = 0; i < n; ++i)
        z(i) = rng.normal_pair(realization, static_cast<uint64_t>(i)).first;
      Eigen::VectorXd v = chol_lower * z;
      for (int64_t i = 0; i < n; ++i) values[static_cast<size_t>(i)] = v(i);
      return values;
    }

    FftBuffers in(torus_size), out(torus_size);
    for (int64_t k = 0; k < torus_size; ++k) {
      auto [a, b] = rng.normal_pair(realization, static_cast<uint64_t>(k));
      double s = sqrt_lambda[static_cast<size_t>(k)];
      in.data[k][0] = s * a;
      in.data[k][1] = s * b;
    }
    fftw_execute_dft(plan, in.data, out.data);

    const double scale = 1.0 / std::sqrt(static_cast<double>(torus_size));
    std::vector<int64_t> c(static_cast<size_t>(d), 0);
    for (int64_t idx = 0; idx < n; ++idx) {
      int64_t t = 0;
      for (int i = 0; i < d; ++i) t = t * torus_dims[static_cast<size_t>(i)] + c[static_cast<size_t>(i)];
      values[static_cast<size_t>(idx)] = out.data[t][0] * scale;
      for (int i = d - 1; i >= 0; --i) {
        if (++c[static_cast<size_t>(i)] < window.extent(i)) break;
        c[static_cast<size_t>(i)] = 0;
      }
    }
    return values;
  }

  Realization generate(uint64_t realization) const {
    Realization r;
    r.window = window;
    r.model = model.descriptor();
    r.seed = seed;
    r.index = realization;
    const int64_t n = window.site_count();

    switch (model.kind()) {
      case FieldKind::WhiteNoise: {
        CounterRng rng(seed, 0);
        r.values.resize(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) {
          auto [a, b] = rng.normal_pair(realization, static_cast<uint64_t>(i));
          r.values[static_cast<size_t>(i)] =
              model.marginal() == Marginal::StandardNormal ? a : 0.5 * (a * a + b * b) - 1.0;
        }
        break;
      }
      case FieldKind::StationaryGaussian:
        r.values = gaussian_layer(realization, 0);
        break;
      case FieldKind::ChiSquared: {
        std::vector<double> x = gaussian_layer(realization, 0);
        std::vector<double> y = gaussian_layer(realization, 1);
        r.values.resize(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) {
          size_t s = static_cast<size_t>(i);
          r.values[s] = 0.5 * (x[s] * x[s] + y[s] * y[s]) - 1.0;
        }
        break;
      }
      case FieldKind::NonstationaryGaussian: {
        r.values = gaussian_layer(realization, 0);
        for (int64_t i = 0; i < n; ++i)
          r.values[static_cast<size_t>(i)] += model.mean_at(window.site_at(i));
        break;
      }
    }
    return r;
  }
};

FieldSimulator::FieldSimulator(const FieldModel& model, const Window& window, uint64_t seed)
    : impl_(std::make_unique<Impl>(model, window, seed)) {}

FieldSimulator::~FieldSimulator() = default;

Realization FieldSimulator::generate(uint64_t realization_index) const {
  return impl_->generate(realization_index);
}

const FieldModel& FieldSimulator::model() const { return impl_->model; }
const Window& FieldSimulator::window() const { return impl_->window; }
uint64_t FieldSimulator::seed() const { return impl_->seed; }
bool FieldSimulator::eigenvalues_clamped() const { return impl_->clamped; }

Realization simulate(const FieldModel& model, const Window& window, uint64_t seed) {
  return FieldSimulator(model, window, seed).generate(0);
}

}  // namespace csd
