#include "csd/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "csd/normal.hpp"
#include "csd/rng.hpp"

namespace csd {

ProbEstimate ProbEstimate::closed_form(double v) {
  ProbEstimate e;
  e.value = std::clamp(v, 0.0, 1.0);
  e.std_error = 0.0;
  e.method = Method::ClosedForm;
  e.evaluations = 0;
  return e;
}

const char* to_string(ProbEstimate::Method m) {
  switch (m) {
    case ProbEstimate::Method::ClosedForm: return "closed-form";
    case ProbEstimate::Method::Quadrature: return "quadrature";
    case ProbEstimate::Method::Qmc: return "qmc";
    case ProbEstimate::Method::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPsdTol = 1e-10;

constexpr int kMaxDimension = 64;

const double kSqrtPrimes[kMaxDimension] = {
    1.4142135623730951, 1.7320508075688772, 2.23606797749979,  2.6457513110645907,
    3.3166247903554,    3.605551275463989,  4.123105625617661, 4.358898943540674,
    4.795831523312719,  5.385164807134504,  5.5677643628300215, 6.082762530298219,
    6.4031242374328485, 6.557438524302,     6.855654600401044, 7.280109889280518,
    7.681145747868608,  7.810249675906654,  8.18535277187245,  8.426149773176359,
    8.54400374531753,   8.888194417315589,  9.1104335791443,   9.433981132056603,
    9.848857801796104,  10.04987562112089,  10.14889156509222, 10.344080432788601,
    10.44030650891055,  10.63014581273465,  11.269427669584644, 11.445523142259598,
    11.704699910719626, 11.789826122551595, 12.206555615733702, 12.288205727444508,
    12.529964086141668, 12.767145334803704, 12.92284798332788, 13.152946437965905,
    13.379088160259652, 13.45362404707371,  13.82027496108949, 13.89244398944981,
    14.035668847618199, 14.106735979665885, 14.52583904633395, 14.933184523068078,
    15.066519173319364, 15.132745950421556, 15.264337522473747, 15.459624833740307,
    15.524174696260024, 15.84297951775486,  16.0312195418814,  16.217274740226856,
    16.401219466856727, 16.46207763315433,  16.64331697709324, 16.76305461424021,
    16.822603841260722, 17.11724276862369,  17.52141546793523, 17.69180601295413};

struct PreparedProblem {
  int n = 0;
  Eigen::MatrixXd chol;            // reordered lower factor, zero columns for dependents
  Eigen::VectorXd a, b;            // reordered, mean-subtracted bounds
  std::vector<bool> deterministic; // rows with zero residual variance
  std::vector<bool> needs_z;       // stochastic rows whose z feeds later rows
  int qmc_dim = 0;
};

// Pivoted Cholesky with Genz's ordering: at each step take a deterministic
// (zero residual variance) row if one exists, otherwise the row with the
// smallest conditional interval probability at the truncated expectations.
PreparedProblem prepare(const RectangleProblem& problem) {
  const auto n = problem.dim();
  PreparedProblem prep;
  prep.n = static_cast<int>(n);
  Eigen::MatrixXd cov = problem.cov;
  Eigen::VectorXd a = problem.lower - problem.mean;
  Eigen::VectorXd b = problem.upper - problem.mean;

  const double scale = std::max(1.0, cov.diagonal().maxCoeff());
  const double det_tol = 1e-12 * scale;

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  prep.deterministic.assign(static_cast<size_t>(n), false);

  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index pick = -1;
    double best_p = kInf;
    bool det_pick = false;
    for (Eigen::Index j = i; j < n; ++j) {
      double v = cov(j, j) - L.row(j).head(i).squaredNorm();
      if (v < -kPsdTol * scale)
        throw std::invalid_argument("mvn_rectangle: covariance is not PSD within tolerance");
      if (v <= det_tol) {
        pick = j;
        det_pick = true;
        break;
      }
      double mu = L.row(j).head(i).dot(y.head(i));
      double sd = std::sqrt(v);
      double p = normal_cdf((b(j) - mu) / sd) - normal_cdf((a(j) - mu) / sd);
      if (p < best_p) {
        best_p = p;
        pick = j;
      }
    }
    if (pick != i) {
      cov.row(pick).swap(cov.row(i));
      cov.col(pick).swap(cov.col(i));
      L.row(pick).head(i).swap(L.row(i).head(i));
      std::swap(a(pick), a(i));
      std::swap(b(pick), b(i));
    }

    double v = cov(i, i) - L.row(i).head(i).squaredNorm();
    if (det_pick || v <= det_tol) {
      prep.deterministic[static_cast<size_t>(i)] = true;
      L(i, i) = 0.0;  // dependent row: residual covariances vanish as well
      continue;
    }
    double sd = std::sqrt(v);
    L(i, i) = sd;
    for (Eigen::Index r = i + 1; r < n; ++r)
      L(r, i) = (cov(r, i) - L.row(r).head(i).dot(L.row(i).head(i))) / sd;

    double mu = L.row(i).head(i).dot(y.head(i));
    double alpha = (a(i) - mu) / sd;
    double beta = (b(i) - mu) / sd;
    double p = normal_cdf(beta) - normal_cdf(alpha);
    if (p > 1e-12) {
      double lo_pdf = std::isinf(alpha) ? 0.0 : normal_pdf(alpha);
      double hi_pdf = std::isinf(beta) ? 0.0 : normal_pdf(beta);
      y(i) = (lo_pdf - hi_pdf) / p;
    } else {
      double m = 0.0;
      if (std::isinf(alpha)) m = beta;
      else if (std::isinf(beta)) m = alpha;
      else m = 0.5 * (alpha + beta);
      y(i) = std::clamp(m, -10.0, 10.0);
    }
  }

  prep.chol = std::move(L);
  prep.a = std::move(a);
  prep.b = std::move(b);

  prep.needs_z.assign(static_cast<size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (prep.deterministic[static_cast<size_t>(i)]) continue;
    for (Eigen::Index r = i + 1; r < n; ++r) {
      if (prep.chol(r, i) != 0.0) {
        prep.needs_z[static_cast<size_t>(i)] = true;
        break;
      }
    }
    if (prep.needs_z[static_cast<size_t>(i)]) ++prep.qmc_dim;
  }
  return prep;
}

// One sequential-conditioning evaluation at a point of the unit cube.
double evaluate(const PreparedProblem& prep, const double* u) {
  const int n = prep.n;
  double z[kMaxDimension];
  double prod = 1.0;
  int zidx = 0;
  for (int i = 0; i < n; ++i) {
    double mu = 0.0;
    for (int l = 0; l < i; ++l) {
      double c = prep.chol(i, l);
      if (c != 0.0) mu += c * z[l];
    }
    if (prep.deterministic[static_cast<size_t>(i)]) {
      if (mu < prep.a(i) || mu > prep.b(i)) return 0.0;
      continue;
    }
    double sd = prep.chol(i, i);
    double pa = normal_cdf((prep.a(i) - mu) / sd);
    double pb = normal_cdf((prep.b(i) - mu) / sd);
    double f = pb - pa;
    if (f <= 0.0) return 0.0;
    prod *= f;
    if (prep.needs_z[static_cast<size_t>(i)]) {
      double t = pa + u[zidx++] * f;
      t = std::clamp(t, 1e-300, 1.0 - 1e-16);
      z[i] = normal_quantile(t);
    } else {
      z[i] = 0.0;  // never read
    }
  }
  return prod;
}

}  // namespace

ProbEstimate mvn_rectangle(const RectangleProblem& problem, const MvnOptions& options) {
  const auto n = problem.dim();
  if (n < 1) throw std::invalid_argument("mvn_rectangle: empty problem");
  if (n > kMaxDimension)
    throw std::invalid_argument(
        "mvn_rectangle: dimension exceeds 64; decompose the event first");
  if (problem.cov.rows() != n || problem.cov.cols() != n || problem.lower.size() != n ||
      problem.upper.size() != n)
    throw std::invalid_argument("mvn_rectangle: inconsistent dimensions");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(problem.lower(i) < problem.upper(i)))
      throw std::invalid_argument("mvn_rectangle: lower must be strictly below upper");

  if (n == 1) {
    double sd = std::sqrt(std::max(problem.cov(0, 0), 0.0));
    double lo = problem.lower(0) - problem.mean(0);
    double hi = problem.upper(0) - problem.mean(0);
    if (sd == 0.0) return ProbEstimate::closed_form(lo <= 0.0 && 0.0 <= hi ? 1.0 : 0.0);
    return ProbEstimate::closed_form(normal_cdf(hi / sd) - normal_cdf(lo / sd));
  }

  PreparedProblem prep = prepare(problem);

  if (prep.qmc_dim == 0) {
    // all factors are constants: the estimate is exact
    double v = evaluate(prep, nullptr);
    ProbEstimate e = ProbEstimate::closed_form(v);
    e.evaluations = 1;
    return e;
  }

  const int s = prep.qmc_dim;
  const int shifts = std::max(2, options.randomizations);
  CounterRng shift_rng(options.seed, 0xAEu);

  std::vector<std::array<double, kMaxDimension>> delta(static_cast<size_t>(shifts));
  for (int k = 0; k < shifts; ++k)
    for (int i = 0; i < s; ++i)
      delta[static_cast<size_t>(k)][static_cast<size_t>(i)] =
          shift_rng.uniform_pair(static_cast<uint64_t>(k), static_cast<uint64_t>(i)).first;

  std::vector<double> sums(static_cast<size_t>(shifts), 0.0);
  uint64_t per_shift = 0;
  uint64_t evaluations = 0;
  double estimate = 0.0, stderr_ = 0.0;
  uint64_t batch = options.initial_points;

  while (true) {
    for (int k = 0; k < shifts; ++k) {
      double acc = 0.0;
      double pt[kMaxDimension], anti[kMaxDimension];
      for (uint64_t j = per_shift; j < per_shift + batch; ++j) {
        for (int i = 0; i < s; ++i) {
          double v = static_cast<double>(j + 1) * kSqrtPrimes[i] +
                     delta[static_cast<size_t>(k)][static_cast<size_t>(i)];
          v -= std::floor(v);
          pt[i] = v;
          anti[i] = 1.0 - v;
        }
        acc += 0.5 * (evaluate(prep, pt) + evaluate(prep, anti));
      }
      sums[static_cast<size_t>(k)] += acc;
      evaluations += 2 * batch;
    }
    per_shift += batch;

    double mean = 0.0;
    for (double v : sums) mean += v / static_cast<double>(per_shift);
    mean /= shifts;
    double var = 0.0;
    for (double v : sums) {
      double m = v / static_cast<double>(per_shift) - mean;
      var += m * m;
    }
    var /= (shifts - 1);
    estimate = mean;
    stderr_ = std::sqrt(var / shifts);

    double target = std::max(options.target_rel_error * std::abs(estimate),
                             options.abs_error_floor);
    if (stderr_ <= target || per_shift >= options.max_points) break;
    batch = std::min(per_shift, options.max_points - per_shift);
  }

  ProbEstimate e;
  e.value = std::clamp(estimate, 0.0, 1.0);
  e.std_error = stderr_;
  e.method = ProbEstimate::Method::Qmc;
  e.evaluations = evaluations;
  e.converged = stderr_ <= std::max(options.target_rel_error * std::abs(estimate),
                                    options.abs_error_floor);
  return e;
}

}  // namespace csd
