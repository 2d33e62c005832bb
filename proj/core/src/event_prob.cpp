#include "csd/event_prob.hpp"

#include <atomic>
#include <cstring>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "csd/rng.hpp"
#include "csd/shapes.hpp"

namespace csd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct JointSites {
  std::vector<Site> sites;      // D followed by N(D), each lex sorted
  size_t n_inside;              // |D|
  std::vector<size_t> anchor_neighbors_inside;  // indices into sites of nbrs(t) ∩ D
  size_t anchor_index = 0;
};

JointSites joint_sites(const SiteSet& d, Connectivity conn) {
  JointSites j;
  j.n_inside = d.size();
  j.sites.assign(d.begin(), d.end());
  for (const auto& s : exterior_neighbors(d, conn)) j.sites.push_back(s);
  return j;
}

RectangleProblem excursion_rectangle(const JointSites& j, double u, const FieldModel& model) {
  RectangleProblem p;
  const auto n = static_cast<Eigen::Index>(j.sites.size());
  p.mean.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.mean(i) = model.mean_at(j.sites[static_cast<size_t>(i)]);
  p.cov = covariance_matrix(j.sites, model);
  p.lower.resize(n);
  p.upper.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<size_t>(i) < j.n_inside) {
      p.lower(i) = u;
      p.upper(i) = kInf;
    } else {
      p.lower(i) = -kInf;
      p.upper(i) = u;
    }
  }
  return p;
}

// Append difference rows X_anchor - X_s > 0; a linear image of the joint
// Gaussian, so the augmented problem stays a rectangle (with a singular
// covariance handled by the integrator).
RectangleProblem augment_with_dominance(const RectangleProblem& base, size_t anchor,
                                        std::span<const size_t> rivals) {
  const auto n = base.dim();
  const auto m = static_cast<Eigen::Index>(rivals.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + m, n);
  a.topLeftCorner(n, n).setIdentity();
  for (Eigen::Index r = 0; r < m; ++r) {
    a(n + r, static_cast<Eigen::Index>(anchor)) = 1.0;
    a(n + r, static_cast<Eigen::Index>(rivals[static_cast<size_t>(r)])) = -1.0;
  }
  RectangleProblem p;
  p.mean = a * base.mean;
  p.cov = a * base.cov * a.transpose();
  p.lower.resize(n + m);
  p.upper.resize(n + m);
  p.lower.head(n) = base.lower;
  p.upper.head(n) = base.upper;
  p.lower.tail(m).setConstant(0.0);
  p.upper.tail(m).setConstant(kInf);
  return p;
}

int auto_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Distinct problems get distinct draw streams; otherwise per-shape errors
// would be correlated and quadrature stderr addition would be wrong.
uint64_t problem_salt(std::span<const Site> sites, double u, uint64_t tag) {
  uint64_t h = 0xcbf29ce484222325ULL ^ tag;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  for (const auto& s : sites) {
    for (int i = 0; i < s.dim(); ++i) mix(static_cast<uint64_t>(static_cast<int64_t>(s[i])));
    mix(0x9e37ULL);
  }
  uint64_t ubits;
  static_assert(sizeof(double) == sizeof(uint64_t));
  std::memcpy(&ubits, &u, sizeof(ubits));
  mix(ubits);
  return h;
}

// Joint Monte-Carlo for the chi-squared field: draw the two Gaussian layers
// on the listed sites and count the event.
template <typename EventFn>
ProbEstimate chi_squared_mc(std::span<const Site> sites, const FieldModel& model,
                            const EventOptions& options, uint64_t salt, EventFn&& event) {
  Eigen::MatrixXd cov = covariance_matrix(sites, model);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov += 1e-12 * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("chi-squared MC: covariance factorization failed");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  const auto n = static_cast<Eigen::Index>(sites.size());
  const uint64_t draws = options.mc_draws;
  const int threads = auto_threads(options.threads);

  const uint64_t stream_seed = options.mc_seed ^ salt;
  std::atomic<uint64_t> hits{0};
  auto worker = [&](uint64_t begin, uint64_t end) {
    CounterRng rng_x(stream_seed, 0);
    CounterRng rng_y(stream_seed, 1);
    Eigen::VectorXd gx(n), gy(n), x(n), y(n), z(n);
    uint64_t local = 0;
    for (uint64_t r = begin; r < end; ++r) {
      for (Eigen::Index i = 0; i < n; ++i) {
        gx(i) = rng_x.normal_pair(r, static_cast<uint64_t>(i)).first;
        gy(i) = rng_y.normal_pair(r, static_cast<uint64_t>(i)).first;
      }
      x.noalias() = chol * gx;
      y.noalias() = chol * gy;
      for (Eigen::Index i = 0; i < n; ++i) z(i) = 0.5 * (x(i) * x(i) + y(i) * y(i)) - 1.0;
      if (event(z)) ++local;
    }
    hits += local;
  };

  std::vector<std::thread> pool;
  uint64_t chunk = (draws + static_cast<uint64_t>(threads) - 1) / static_cast<uint64_t>(threads);
  for (int t = 0; t < threads; ++t) {
    uint64_t begin = static_cast<uint64_t>(t) * chunk;
    uint64_t end = std::min(draws, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(worker, begin, end);
  }
  for (auto& th : pool) th.join();

  double p = static_cast<double>(hits.load()) / static_cast<double>(draws);
  ProbEstimate e;
  e.value = p;
  e.std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(draws));
  e.method = ProbEstimate::Method::MonteCarlo;
  e.evaluations = draws;
  return e;
}

}  // namespace

ProbEstimate excursion_probability(const SiteSet& d, double u, const FieldModel& model,
                                   Connectivity conn, const EventOptions& options) {
  if (d.empty()) throw std::invalid_argument("excursion_probability: empty shape");
  if (!is_connected(d, conn))
    throw std::invalid_argument("excursion_probability: shape not connected");

  if (model.kind() == FieldKind::WhiteNoise) {
    double p = model.marginal_cdf(u);
    double q = 1.0 - p;
    size_t shell = exterior_neighbors(d, conn).size();
    return ProbEstimate::closed_form(std::pow(p, static_cast<double>(shell)) *
                                     std::pow(q, static_cast<double>(d.size())));
  }

  JointSites j = joint_sites(d, conn);
  if (model.is_gaussian()) {
    MvnOptions mvn = options.mvn;
    mvn.seed ^= problem_salt(j.sites, u, 11);
    return mvn_rectangle(excursion_rectangle(j, u, model), mvn);
  }

  // chi-squared: count the joint event on the Gaussian pair
  const size_t nd = j.n_inside;
  return chi_squared_mc(j.sites, model, options, problem_salt(j.sites, u, 1),
                        [&](const Eigen::VectorXd& z) {
    for (size_t i = 0; i < j.sites.size(); ++i) {
      if (i < nd) {
        if (!(z(static_cast<Eigen::Index>(i)) > u)) return false;
      } else {
        if (!(z(static_cast<Eigen::Index>(i)) <= u)) return false;
      }
    }
    return true;
  });
}

ProbEstimate peak_event_probability(const SiteSet& d, const Site& anchor, double u,
                                    const FieldModel& model, Connectivity conn,
                                    const EventOptions& options) {
  if (!d.contains(anchor))
    throw std::invalid_argument("peak_event_probability: anchor not in shape");
  if (!is_connected(d, conn))
    throw std::invalid_argument("peak_event_probability: shape not connected");

  const int m = peak_constraint_degree(d, anchor, conn);
  if (model.kind() == FieldKind::WhiteNoise) {
    double p = model.marginal_cdf(u);
    double q = 1.0 - p;
    size_t shell = exterior_neighbors(d, conn).size();
    return ProbEstimate::closed_form(std::pow(p, static_cast<double>(shell)) *
                                     std::pow(q, static_cast<double>(d.size())) / (m + 1));
  }

  JointSites j = joint_sites(d, conn);
  size_t anchor_idx = 0;
  std::vector<size_t> rivals;
  for (size_t i = 0; i < j.n_inside; ++i)
    if (j.sites[i] == anchor) anchor_idx = i;
  for (size_t i = 0; i < j.n_inside; ++i) {
    if (i == anchor_idx) continue;
    Site diff = j.sites[i] - anchor;
    bool is_neighbor = false;
    for (const auto& off : neighbor_offsets(conn, d.dim()))
      if (off == diff) { is_neighbor = true; break; }
    if (is_neighbor) rivals.push_back(i);
  }

  if (model.is_gaussian()) {
    MvnOptions mvn = options.mvn;
    mvn.seed ^= problem_salt(j.sites, u, 13 + anchor_idx);
    RectangleProblem base = excursion_rectangle(j, u, model);
    if (rivals.empty()) return mvn_rectangle(base, mvn);
    return mvn_rectangle(augment_with_dominance(base, anchor_idx, rivals), mvn);
  }

  const size_t nd = j.n_inside;
  return chi_squared_mc(j.sites, model, options, problem_salt(j.sites, u, 2 + anchor_idx),
                        [&](const Eigen::VectorXd& z) {
    for (size_t i = 0; i < j.sites.size(); ++i) {
      if (i < nd) {
        if (!(z(static_cast<Eigen::Index>(i)) > u)) return false;
      } else {
        if (!(z(static_cast<Eigen::Index>(i)) <= u)) return false;
      }
    }
    double zt = z(static_cast<Eigen::Index>(anchor_idx));
    for (size_t i : rivals)
      if (!(zt > z(static_cast<Eigen::Index>(i)))) return false;
    return true;
  });
}

ProbEstimate peak_denominator(const Site& t, double u, const FieldModel& model,
                              Connectivity conn, const EventOptions& options) {
  const int n = neighbor_count(conn, t.dim());
  if (model.kind() == FieldKind::WhiteNoise) {
    double p = model.marginal_cdf(u);
    return ProbEstimate::closed_form((1.0 - std::pow(p, n + 1)) / (n + 1));
  }

  std::vector<Site> sites{t};
  for (const auto& s : neighbors(t, conn)) sites.push_back(s);

  if (model.is_gaussian()) {
    RectangleProblem base;
    const auto nn = static_cast<Eigen::Index>(sites.size());
    base.mean.resize(nn);
    for (Eigen::Index i = 0; i < nn; ++i)
      base.mean(i) = model.mean_at(sites[static_cast<size_t>(i)]);
    base.cov = covariance_matrix(sites, model);
    base.lower.resize(nn);
    base.upper.resize(nn);
    base.lower(0) = u;
    base.upper(0) = kInf;
    base.lower.tail(nn - 1).setConstant(-kInf);
    base.upper.tail(nn - 1).setConstant(kInf);
    std::vector<size_t> rivals(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) rivals[static_cast<size_t>(i)] = static_cast<size_t>(i + 1);
    MvnOptions mvn = options.mvn;
    mvn.seed ^= problem_salt(sites, u, 17);
    return mvn_rectangle(augment_with_dominance(base, 0, rivals), mvn);
  }

  return chi_squared_mc(sites, model, options, problem_salt(sites, u, 0),
                        [&](const Eigen::VectorXd& z) {
    double zt = z(0);
    if (!(zt > u)) return false;
    for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(sites.size()); ++i)
      if (!(zt > z(i))) return false;
    return true;
  });
}

}  // namespace csd
