#include "csd/theory.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "csd/empirical.hpp"
#include "csd/rng.hpp"

namespace csd {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Evaluates fn(i) for i in [0, n) on up to t workers; results land in slots,
// so the reduction below is deterministic.
template <typename Fn>
std::vector<ProbEstimate> evaluate_all(int64_t n, int t, Fn&& fn) {
  std::vector<ProbEstimate> out(static_cast<size_t>(n));
  t = std::min<int64_t>(std::max(t, 1), n);
  if (t <= 1) {
    for (int64_t i = 0; i < n; ++i) out[static_cast<size_t>(i)] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<int64_t> next{0};
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int64_t i = next.fetch_add(1);
        if (i >= n) return;
        out[static_cast<size_t>(i)] = fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

ProbEstimate combine_sum(std::span<const ProbEstimate> parts,
                         std::span<const int> multiplicities) {
  ProbEstimate total;
  total.method = ProbEstimate::Method::ClosedForm;
  double value = 0.0, var = 0.0;
  uint64_t evals = 0;
  bool converged = true;
  for (size_t i = 0; i < parts.size(); ++i) {
    double mult = multiplicities.empty() ? 1.0 : multiplicities[i];
    value += mult * parts[i].value;
    var += mult * mult * parts[i].std_error * parts[i].std_error;
    evals += parts[i].evaluations;
    converged = converged && parts[i].converged;
    if (parts[i].method != ProbEstimate::Method::ClosedForm) total.method = parts[i].method;
  }
  total.value = value;
  total.std_error = std::sqrt(var);
  total.evaluations = evals;
  total.converged = converged;
  return total;
}

bool reduce_by_class(const FieldModel& model, const TheoryOptions& o) {
  return o.use_class_reduction && model.is_isotropic() && model.is_stationary() &&
         model.kind() != FieldKind::WhiteNoise;
}

}  // namespace

const char* to_string(NormalizationMode m) {
  switch (m) {
    case NormalizationMode::ExactDenominator: return "exact-denominator";
    case NormalizationMode::Truncated: return "truncated";
    case NormalizationMode::TruncatedPlusMcTail: return "truncated-plus-mc-tail";
  }
  return "unknown";
}

double DistributionTable::mass_sum() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.mass;
  return s;
}

DistributionTable DistributionTable::renormalized() const {
  DistributionTable t = *this;
  double s = mass_sum();
  if (s > 0.0) {
    for (auto& r : t.rows) {
      r.mass /= s;
      r.mass_stderr /= s;
    }
  }
  return t;
}

ProbEstimate wk_exact(int k, double u, const FieldModel& model, Connectivity conn, int dim,
                      const TheoryOptions& options) {
  std::vector<SiteSet> shapes = enumerate_rooted(k, conn, dim, options.shape_cap);
  const int threads = resolve_threads(options.threads);

  if (reduce_by_class(model, options)) {
    std::vector<ShapeClass> classes = group_by_rigid_motion(shapes);
    std::vector<int> mult(classes.size());
    for (size_t i = 0; i < classes.size(); ++i) mult[i] = classes[i].multiplicity;
    auto parts = evaluate_all(static_cast<int64_t>(classes.size()), threads, [&](int64_t i) {
      return excursion_probability(classes[static_cast<size_t>(i)].representative, u, model,
                                   conn, options.event);
    });
    return combine_sum(parts, mult);
  }

  auto parts = evaluate_all(static_cast<int64_t>(shapes.size()), threads, [&](int64_t i) {
    return excursion_probability(shapes[static_cast<size_t>(i)], u, model, conn, options.event);
  });
  return combine_sum(parts, {});
}

ProbEstimate wk_1d(int k, double u, const FieldModel& model, const TheoryOptions& options) {
  if (model.dim() != 1) throw std::invalid_argument("wk_1d: model must be one-dimensional");
  std::vector<Site> run;
  for (int i = 0; i < k; ++i) run.push_back(Site{i});
  return excursion_probability(SiteSet(std::move(run)), u, model, Connectivity::Nearest,
                               options.event);
}

ProbEstimate wk_inside(int k, double u, const FieldModel& model, Connectivity conn, int dim,
                       const TheoryOptions& options) {
  std::vector<SiteSet> shapes = enumerate_containing_origin(k, conn, dim, options.shape_cap);
  const int threads = resolve_threads(options.threads);
  auto parts = evaluate_all(static_cast<int64_t>(shapes.size()), threads, [&](int64_t i) {
    return excursion_probability(shapes[static_cast<size_t>(i)], u, model, conn, options.event);
  });
  return combine_sum(parts, {});
}

ProbEstimate wk_peak(int k, const Site& anchor, double u, const FieldModel& model,
                     Connectivity conn, int dim, const TheoryOptions& options) {
  if (anchor.dim() != dim) throw std::invalid_argument("wk_peak: anchor dimension mismatch");
  std::vector<SiteSet> shapes = enumerate_containing_origin(k, conn, dim, options.shape_cap);
  const int threads = resolve_threads(options.threads);
  const Site o = Site::origin(dim);

  if (model.is_stationary()) {
    if (reduce_by_class(model, options)) {
      std::vector<ShapeClass> classes = group_anchored_by_rigid_motion(shapes);
      std::vector<int> mult(classes.size());
      for (size_t i = 0; i < classes.size(); ++i) mult[i] = classes[i].multiplicity;
      auto parts = evaluate_all(static_cast<int64_t>(classes.size()), threads, [&](int64_t i) {
        return peak_event_probability(classes[static_cast<size_t>(i)].representative, o, u,
                                      model, conn, options.event);
      });
      return combine_sum(parts, mult);
    }
    auto parts = evaluate_all(static_cast<int64_t>(shapes.size()), threads, [&](int64_t i) {
      return peak_event_probability(shapes[static_cast<size_t>(i)], o, u, model, conn,
                                    options.event);
    });
    return combine_sum(parts, {});
  }

  // nonstationary: evaluate at the true anchor location
  auto parts = evaluate_all(static_cast<int64_t>(shapes.size()), threads, [&](int64_t i) {
    return peak_event_probability(shapes[static_cast<size_t>(i)].translated(anchor), anchor, u,
                                  model, conn, options.event);
  });
  return combine_sum(parts, {});
}

namespace {

ProbEstimate exact_denominator_1d(double u, const FieldModel& model,
                                  const TheoryOptions& options) {
  // P(X_{-1} <= u, X_0 > u)
  if (model.kind() == FieldKind::WhiteNoise) {
    double p = model.marginal_cdf(u);
    return ProbEstimate::closed_form(p * (1.0 - p));
  }
  std::vector<Site> sites{Site{-1}, Site{0}};
  if (model.is_gaussian()) {
    RectangleProblem prob;
    prob.mean.resize(2);
    prob.mean(0) = model.mean_at(sites[0]);
    prob.mean(1) = model.mean_at(sites[1]);
    prob.cov = covariance_matrix(sites, model);
    prob.lower.resize(2);
    prob.upper.resize(2);
    prob.lower(0) = -std::numeric_limits<double>::infinity();
    prob.upper(0) = u;
    prob.lower(1) = u;
    prob.upper(1) = std::numeric_limits<double>::infinity();
    return mvn_rectangle(prob, options.event.mvn);
  }
  throw std::invalid_argument("exact denominator: unsupported model for d = 1");
}

ProbEstimate tail_mass(double u, const FieldModel& model, Connectivity conn, int dim, int k_max,
                       const TheoryOptions& options) {
  std::vector<int64_t> wdims = options.tail_window;
  std::vector<int64_t> sdims = options.tail_subwindow;
  if (wdims.empty()) wdims.assign(static_cast<size_t>(dim), 100);
  if (sdims.empty()) sdims.assign(static_cast<size_t>(dim), 50);
  Window win = Window::centered(wdims);
  Window sub = Window::centered(sdims);
  EmpiricalOptions eo;
  eo.threads = options.threads;
  return mc_refined_tail(model, options.tail_realizations, win, sub, u, conn, k_max,
                         options.tail_seed, eo);
}

void fill_masses(DistributionTable& table) {
  for (auto& r : table.rows) {
    r.mass = table.denominator > 0.0 ? r.w / table.denominator : 0.0;
    if (r.w > 0.0 && table.denominator > 0.0) {
      double rel_w = r.w_stderr / r.w;
      double rel_d = table.denominator_stderr / table.denominator;
      r.mass_stderr = r.mass * std::sqrt(rel_w * rel_w + rel_d * rel_d);
    } else {
      r.mass_stderr = 0.0;
    }
  }
}

}  // namespace

DistributionTable cluster_size_distribution(double u, const FieldModel& model, Connectivity conn,
                                            int dim, int k_max, NormalizationMode mode,
                                            const TheoryOptions& options) {
  if (k_max < 1) throw std::invalid_argument("cluster_size_distribution: k_max must be >= 1");
  if (mode == NormalizationMode::ExactDenominator && dim >= 2)
    throw std::invalid_argument(
        "cluster_size_distribution: the exact denominator is only available for d = 1 "
        "(the boundary correction has no closed form in higher dimensions)");
  if (!model.is_stationary())
    throw std::invalid_argument(
        "cluster_size_distribution: nonstationary models only admit the peak-based "
        "distribution");

  DistributionTable table;
  table.u = u;
  table.model = model.descriptor();
  table.conn = conn;
  table.dim = dim;
  table.mode = mode;
  table.k_max = k_max;

  for (int k = 1; k <= k_max; ++k) {
    ProbEstimate e = wk_exact(k, u, model, conn, dim, options);
    DistributionRow row;
    row.k = k;
    row.w = e.value;
    row.w_stderr = e.std_error;
    row.method = to_string(e.method);
    table.rows.push_back(row);
  }

  double head = 0.0, head_var = 0.0;
  for (const auto& r : table.rows) {
    head += r.w;
    head_var += r.w_stderr * r.w_stderr;
  }

  switch (mode) {
    case NormalizationMode::ExactDenominator: {
      ProbEstimate d = exact_denominator_1d(u, model, options);
      table.denominator = d.value;
      table.denominator_stderr = d.std_error;
      break;
    }
    case NormalizationMode::Truncated:
      table.denominator = head;
      table.denominator_stderr = std::sqrt(head_var);
      break;
    case NormalizationMode::TruncatedPlusMcTail: {
      ProbEstimate t = tail_mass(u, model, conn, dim, k_max, options);
      table.denominator = head + t.value;
      table.denominator_stderr = std::sqrt(head_var + t.std_error * t.std_error);
      break;
    }
  }

  fill_masses(table);
  return table;
}

DistributionTable peak_cluster_size_distribution(const Site& anchor, double u,
                                                 const FieldModel& model, Connectivity conn,
                                                 int dim, int k_max,
                                                 const TheoryOptions& options) {
  if (k_max < 1)
    throw std::invalid_argument("peak_cluster_size_distribution: k_max must be >= 1");
  DistributionTable table;
  table.u = u;
  table.model = model.descriptor();
  table.conn = conn;
  table.dim = dim;
  table.peak = true;
  table.anchor = anchor;
  table.mode = NormalizationMode::ExactDenominator;
  table.k_max = k_max;

  for (int k = 1; k <= k_max; ++k) {
    ProbEstimate e = wk_peak(k, anchor, u, model, conn, dim, options);
    DistributionRow row;
    row.k = k;
    row.w = e.value;
    row.w_stderr = e.std_error;
    row.method = to_string(e.method);
    table.rows.push_back(row);
  }

  ProbEstimate d = peak_denominator(anchor, u, model, conn, options.event);
  table.denominator = d.value;
  table.denominator_stderr = d.std_error;
  fill_masses(table);
  return table;
}

DistributionTable peak_csd_1d(const Site& anchor, double u, const FieldModel& model, int k_max,
                              const TheoryOptions& options) {
  if (model.dim() != 1) throw std::invalid_argument("peak_csd_1d: model must be 1D");
  if (anchor.dim() != 1) throw std::invalid_argument("peak_csd_1d: anchor must be 1D");

  DistributionTable table;
  table.u = u;
  table.model = model.descriptor();
  table.conn = Connectivity::Nearest;
  table.dim = 1;
  table.peak = true;
  table.anchor = anchor;
  table.mode = NormalizationMode::ExactDenominator;
  table.k_max = k_max;

  // decorrelate from the catalog route so the two agree only up to QMC error
  TheoryOptions o = options;
  o.event.mvn.seed = mix64(options.event.mvn.seed ^ 0x1d5eedULL);

  const int threads = resolve_threads(o.threads);
  for (int k = 1; k <= k_max; ++k) {
    // right part j sites, left part k-1-j sites around the anchor
    auto parts = evaluate_all(k, threads, [&](int64_t j) {
      std::vector<Site> run;
      for (int i = -(k - 1 - static_cast<int>(j)); i <= static_cast<int>(j); ++i)
        run.push_back(Site{anchor[0] + i});
      return peak_event_probability(SiteSet(std::move(run)), anchor, u, model,
                                    Connectivity::Nearest, o.event);
    });
    ProbEstimate e = combine_sum(parts, {});
    DistributionRow row;
    row.k = k;
    row.w = e.value;
    row.w_stderr = e.std_error;
    row.method = to_string(e.method);
    table.rows.push_back(row);
  }

  ProbEstimate d = peak_denominator(anchor, u, model, Connectivity::Nearest, o.event);
  table.denominator = d.value;
  table.denominator_stderr = d.std_error;
  fill_masses(table);
  return table;
}

InsideConsistencyReport inside_consistency(int k, double u, const FieldModel& model,
                                           Connectivity conn, int dim,
                                           const TheoryOptions& options) {
  if (!model.is_stationary())
    throw std::invalid_argument("inside_consistency: stationary models only");

  ProbEstimate wk = wk_exact(k, u, model, conn, dim, options);

  TheoryOptions o = options;
  o.event.mvn.seed = mix64(options.event.mvn.seed ^ 0x1451deULL);
  o.use_class_reduction = false;
  ProbEstimate inside = wk_inside(k, u, model, conn, dim, o);

  InsideConsistencyReport rep;
  rep.k = k;
  rep.w_inside = inside.value;
  rep.w_inside_stderr = inside.std_error;
  rep.k_times_wk = k * wk.value;
  rep.k_times_wk_stderr = k * wk.std_error;
  rep.gap = std::abs(rep.w_inside - rep.k_times_wk);
  rep.gate = 3.0 * std::sqrt(rep.w_inside_stderr * rep.w_inside_stderr +
                             rep.k_times_wk_stderr * rep.k_times_wk_stderr);
  rep.pass = rep.gap <= std::max(rep.gate, 1e-12);
  return rep;
}

}  // namespace csd
