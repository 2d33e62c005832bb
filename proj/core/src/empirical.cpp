#include "csd/empirical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace csd {

const char* to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::Direct: return "direct";
    case EstimatorKind::DirectPeak: return "direct-peak";
    case EstimatorKind::McOrigin: return "mc-origin";
    case EstimatorKind::McRefined: return "mc-refined";
    case EstimatorKind::McPeak: return "mc-peak";
    case EstimatorKind::NonstatPeak: return "nonstat-peak";
  }
  return "unknown";
}

const char* to_string(BoundaryPolicy p) {
  return p == BoundaryPolicy::IncludeAll ? "include-all" : "exclude-touching";
}

const CountRow* CountingResult::row(int k) const {
  for (const auto& r : rows)
    if (r.k == k) return &r;
  return nullptr;
}

double CountingResult::estimate_at(int k) const {
  const CountRow* r = row(k);
  return r ? r->estimate : 0.0;
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Integer-exact accumulation across realizations.
struct Accum {
  std::vector<uint64_t> sum;     // per k: sum of per-realization counts
  std::vector<uint64_t> sum_sq;  // per k: sum of squared per-realization counts
  uint64_t total_sum = 0;        // all clusters / peaks per realization, summed
  uint64_t total_sq = 0;
  double j_sum = 0.0;  // refined tail weights
  double j_sq = 0.0;
  uint64_t boundary_excluded = 0;
  int64_t ties = 0;
  uint64_t overflow_clusters = 0;
  uint64_t overflow_sites = 0;

  explicit Accum(int k_cap) : sum(static_cast<size_t>(k_cap) + 1, 0),
                              sum_sq(static_cast<size_t>(k_cap) + 1, 0) {}

  void merge(const Accum& o) {
    for (size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sum_sq[i] += o.sum_sq[i];
    }
    total_sum += o.total_sum;
    total_sq += o.total_sq;
    j_sum += o.j_sum;
    j_sq += o.j_sq;
    boundary_excluded += o.boundary_excluded;
    ties += o.ties;
    overflow_clusters += o.overflow_clusters;
    overflow_sites += o.overflow_sites;
  }
};

struct Task {
  EstimatorKind kind;
  double u;
  Connectivity conn;
  BoundaryPolicy policy = BoundaryPolicy::IncludeAll;
  int k = 0;       // single-k estimators
  int k_min = 0;   // tail
  bool tail = false;
  bool all_k = false;  // sweep variants bin every observed size
  Window subwindow;
  bool has_sub = false;
  int k_cap = 64;
};

void process_realization(const Task& task, const Realization& real, Accum& acc) {
  const Window& w = real.window;
  ExcursionMask mask = ExcursionMask::from_values(w, real.values, task.u);
  Labeling lab = label_clusters(mask, task.conn);

  std::vector<uint64_t> local(static_cast<size_t>(task.k_cap) + 1, 0);
  uint64_t total = 0;

  switch (task.kind) {
    case EstimatorKind::Direct: {
      for (const auto& c : lab.clusters) {
        if (task.policy == BoundaryPolicy::ExcludeTouching && c.touches_boundary) {
          ++acc.boundary_excluded;
          continue;
        }
        ++total;
        if (c.size <= task.k_cap) ++local[static_cast<size_t>(c.size)];
        else {
          ++acc.overflow_clusters;
          acc.overflow_sites += static_cast<uint64_t>(c.size);
        }
      }
      break;
    }
    case EstimatorKind::DirectPeak:
    case EstimatorKind::NonstatPeak: {
      LocalMaxima peaks = local_maxima(w, real.values, task.u, task.conn);
      acc.ties += peaks.tie_count;
      for (int64_t idx : peaks.indices) {
        if (task.kind == EstimatorKind::NonstatPeak && w.site_at(idx)[0] % 2 != 0) continue;
        int32_t id = lab.label[static_cast<size_t>(idx)];
        int64_t size = lab.clusters[static_cast<size_t>(id)].size;
        ++total;
        if (size <= task.k_cap) ++local[static_cast<size_t>(size)];
        else {
          ++acc.overflow_clusters;
          acc.overflow_sites += static_cast<uint64_t>(size);
        }
      }
      break;
    }
    case EstimatorKind::McOrigin: {
      int32_t id = lab.label[static_cast<size_t>(w.index_of(Site::origin(w.dim())))];
      if (id >= 0) {
        const auto& c = lab.clusters[static_cast<size_t>(id)];
        if (c.size == task.k && !c.touches_boundary) local[static_cast<size_t>(task.k)] = 1;
        if (c.size == task.k && c.touches_boundary) ++acc.boundary_excluded;
      }
      total = local[static_cast<size_t>(task.k)];
      break;
    }
    case EstimatorKind::McRefined: {
      // intersection site counts on the labeled full window
      std::vector<int64_t> inter(lab.clusters.size(), 0);
      const Window& sub = task.subwindow;
      for (int64_t si = 0; si < sub.site_count(); ++si) {
        int32_t id = lab.label[static_cast<size_t>(w.index_of(sub.site_at(si)))];
        if (id >= 0) ++inter[static_cast<size_t>(id)];
      }
      if (task.tail) {
        double j = 0.0;
        for (size_t id = 0; id < lab.clusters.size(); ++id) {
          const auto& cl = lab.clusters[id];
          if (inter[id] == 0 || cl.size <= task.k_min) continue;
          if (cl.touches_boundary) ++acc.boundary_excluded;
          else j += static_cast<double>(inter[id]) / static_cast<double>(cl.size);
        }
        acc.j_sum += j;
        acc.j_sq += j * j;
        return;
      }
      if (task.all_k) {
        for (size_t id = 0; id < lab.clusters.size(); ++id) {
          if (inter[id] == 0) continue;
          const auto& cl = lab.clusters[id];
          if (cl.touches_boundary) {
            ++acc.boundary_excluded;
            continue;
          }
          if (cl.size <= task.k_cap)
            local[static_cast<size_t>(cl.size)] += static_cast<uint64_t>(inter[id]);
          else {
            ++acc.overflow_clusters;
            acc.overflow_sites += static_cast<uint64_t>(inter[id]);
          }
        }
        break;
      }
      uint64_t x_total = 0;
      for (size_t id = 0; id < lab.clusters.size(); ++id) {
        if (inter[id] == 0) continue;
        const auto& cl = lab.clusters[id];
        if (cl.size != task.k) continue;
        if (cl.touches_boundary) {
          ++acc.boundary_excluded;
          continue;
        }
        x_total += static_cast<uint64_t>(inter[id]);
      }
      local[static_cast<size_t>(task.k)] = x_total;
      total = x_total;
      break;
    }
    case EstimatorKind::McPeak: {
      LocalMaxima peaks = local_maxima(w, real.values, task.u, task.conn);
      acc.ties += peaks.tie_count;
      uint64_t l_count = 0;
      for (int64_t idx : peaks.indices) {
        if (!task.subwindow.contains(w.site_at(idx))) continue;
        int32_t id = lab.label[static_cast<size_t>(idx)];
        const auto& cl = lab.clusters[static_cast<size_t>(id)];
        if (!task.all_k && cl.size != task.k) continue;
        if (cl.touches_boundary) {
          ++acc.boundary_excluded;
          continue;
        }
        if (task.all_k) {
          if (cl.size <= task.k_cap) {
            ++local[static_cast<size_t>(cl.size)];
            ++l_count;
          } else {
            ++acc.overflow_clusters;
            acc.overflow_sites += static_cast<uint64_t>(cl.size);
          }
        } else {
          ++l_count;
        }
      }
      if (!task.all_k) local[static_cast<size_t>(task.k)] = l_count;
      total = l_count;
      break;
    }
  }

  for (size_t k = 1; k < local.size(); ++k) {
    if (local[k]) {
      acc.sum[k] += local[k];
      acc.sum_sq[k] += local[k] * local[k];
    }
  }
  acc.total_sum += total;
  acc.total_sq += total * total;
}

Accum run(const FieldModel& model, uint64_t m, const Window& window, uint64_t seed,
          const Task& task, const EmpiricalOptions& options,
          const std::function<CountingResult(const Accum&, uint64_t)>& finalize) {
  if (m < 1) throw std::invalid_argument("empirical estimators need M >= 1");
  FieldSimulator sim(model, window, seed);
  const int threads = resolve_threads(options.threads);

  Accum global(task.k_cap);
  uint64_t done = 0;
  const uint64_t block =
      options.stream_every > 0 && options.on_partial ? options.stream_every : m;

  while (done < m) {
    uint64_t end = std::min(m, done + block);
    std::vector<Accum> locals(static_cast<size_t>(threads), Accum(task.k_cap));
    std::atomic<uint64_t> next{done};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (;;) {
          uint64_t r = next.fetch_add(1);
          if (r >= end) return;
          Realization real = sim.generate(r);
          process_realization(task, real, locals[static_cast<size_t>(t)]);
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& l : locals) global.merge(l);
    done = end;
    if (options.on_partial && done < m) options.on_partial(done, finalize(global, done));
  }
  return global;
}

// estimate = count / (M * normalizer); stderr from the across-realization
// sample variance of the per-realization counts.
void fill_rows(CountingResult& res, const Accum& acc, uint64_t m, double normalizer,
               int k_cap, bool divide_by_k = false) {
  const double dm = static_cast<double>(m);
  for (int k = 1; k <= k_cap; ++k) {
    uint64_t s = acc.sum[static_cast<size_t>(k)];
    uint64_t s2 = acc.sum_sq[static_cast<size_t>(k)];
    if (s == 0) continue;
    CountRow row;
    row.k = k;
    row.count = static_cast<double>(s);
    row.count_sq = static_cast<double>(s2);
    double norm = divide_by_k ? normalizer * static_cast<double>(k) : normalizer;
    row.estimate = row.count / (dm * norm);
    double var = m > 1 ? (row.count_sq - row.count * row.count / dm) / (dm - 1.0) : 0.0;
    row.std_error = std::sqrt(std::max(var, 0.0) / dm) / norm;
    res.rows.push_back(row);
  }
  double tot = static_cast<double>(acc.total_sum);
  res.sum_estimate = tot / (dm * normalizer);
  double tvar =
      m > 1 ? (static_cast<double>(acc.total_sq) - tot * tot / dm) / (dm - 1.0) : 0.0;
  res.sum_std_error = std::sqrt(std::max(tvar, 0.0) / dm) / normalizer;
  res.boundary_excluded = acc.boundary_excluded;
  res.tie_count = acc.ties;
  res.overflow_clusters = acc.overflow_clusters;
  res.overflow_sites = acc.overflow_sites;
}

void require_subwindow(const Window& window, const Window& sub) {
  if (sub.dim() != window.dim())
    throw std::invalid_argument("subwindow dimension mismatch");
  for (int i = 0; i < window.dim(); ++i)
    if (sub.lo[i] <= window.lo[i] || sub.hi[i] >= window.hi[i])
      throw std::invalid_argument("subwindow must be strictly interior to the window");
}

}  // namespace

CountingResult empirical_wk(const FieldModel& model, uint64_t m, const Window& window, double u,
                            Connectivity conn, BoundaryPolicy policy, uint64_t seed,
                            const EmpiricalOptions& options) {
  Task task;
  task.kind = EstimatorKind::Direct;
  task.u = u;
  task.conn = conn;
  task.policy = policy;
  task.k_cap = options.k_cap;

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::Direct;
    res.model = model.descriptor();
    res.u = u;
    res.conn = conn;
    res.realizations = done;
    res.window = window;
    res.policy = policy;
    res.seed = seed;
    res.normalizer_sites = window.site_count();
    fill_rows(res, acc, done, static_cast<double>(window.site_count()), task.k_cap);
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

CountingResult empirical_peak_wk(const FieldModel& model, uint64_t m, const Window& window,
                                 double u, Connectivity conn, uint64_t seed,
                                 const EmpiricalOptions& options) {
  Task task;
  task.kind = EstimatorKind::DirectPeak;
  task.u = u;
  task.conn = conn;
  task.k_cap = options.k_cap;

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::DirectPeak;
    res.model = model.descriptor();
    res.u = u;
    res.conn = conn;
    res.realizations = done;
    res.window = window;
    res.seed = seed;
    res.normalizer_sites = window.site_count();
    fill_rows(res, acc, done, static_cast<double>(window.site_count()), task.k_cap);
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

CountingResult mc_origin(const FieldModel& model, uint64_t m, const Window& window, double u,
                         Connectivity conn, int k, uint64_t seed,
                         const EmpiricalOptions& options) {
  if (!window.is_interior(Site::origin(window.dim())))
    throw std::invalid_argument("mc_origin: the origin must be interior to the window");
  if (k < 1) throw std::invalid_argument("mc_origin: k must be >= 1");
  Task task;
  task.kind = EstimatorKind::McOrigin;
  task.u = u;
  task.conn = conn;
  task.k = k;
  task.k_cap = std::max(options.k_cap, k);

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::McOrigin;
    res.model = model.descriptor();
    res.u = u;
    res.conn = conn;
    res.realizations = done;
    res.window = window;
    res.seed = seed;
    res.normalizer_sites = 1;
    fill_rows(res, acc, done, static_cast<double>(k) * 1.0, task.k_cap);
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

CountingResult mc_refined(const FieldModel& model, uint64_t m, const Window& window,
                          const Window& subwindow, double u, Connectivity conn, int k,
                          uint64_t seed, const EmpiricalOptions& options) {
  require_subwindow(window, subwindow);
  if (k < 1) throw std::invalid_argument("mc_refined: k must be >= 1");
  Task task;
  task.kind = EstimatorKind::McRefined;
  task.u = u;
  task.conn = conn;
  task.k = k;
  task.subwindow = subwindow;
  task.has_sub = true;
  task.k_cap = std::max(options.k_cap, k);

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::McRefined;
    res.model = model.descriptor();
    res.u = u;
    res.conn = conn;
    res.realizations = done;
    res.window = window;
    res.subwindow = subwindow;
    res.has_subwindow = true;
    res.seed = seed;
    res.normalizer_sites = subwindow.site_count();
    fill_rows(res, acc, done,
              static_cast<double>(k) * static_cast<double>(subwindow.site_count()), task.k_cap);
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

CountingResult mc_peak(const FieldModel& model, uint64_t m, const Window& window,
                       const Window& subwindow, double u, Connectivity conn, int k,
                       uint64_t seed, const EmpiricalOptions& options) {
  require_subwindow(window, subwindow);
  if (k < 1) throw std::invalid_argument("mc_peak: k must be >= 1");
  Task task;
  task.kind = EstimatorKind::McPeak;
  task.u = u;
  task.conn = conn;
  task.k = k;
  task.subwindow = subwindow;
  task.has_sub = true;
  task.k_cap = std::max(options.k_cap, k);

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::McPeak;
    res.model = model.descriptor();
    res.u = u;
    res.conn = conn;
    res.realizations = done;
    res.window = window;
    res.subwindow = subwindow;
    res.has_subwindow = true;
    res.seed = seed;
    res.normalizer_sites = subwindow.site_count();
    fill_rows(res, acc, done, static_cast<double>(subwindow.site_count()), task.k_cap);
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

CountingResult nonstationary_peak_empirical(const FieldModel& model, uint64_t m,
                                            const Window& window, double u, int k_max,
                                            uint64_t seed, const EmpiricalOptions& options) {
  if (model.kind() != FieldKind::NonstationaryGaussian)
    throw std::invalid_argument(
        "nonstationary_peak_empirical: requires the cos-mean nonstationary preset");
  Task task;
  task.kind = EstimatorKind::NonstatPeak;
  task.u = u;
  task.conn = Connectivity::Nearest;
  task.k_cap = std::max(options.k_cap, k_max);

  int64_t d0 = 0;
  for (int32_t t = window.lo[0] + 1; t < window.hi[0]; ++t)
    if (t % 2 == 0) ++d0;

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::NonstatPeak;
    res.model = model.descriptor();
    res.u = u;
    res.conn = Connectivity::Nearest;
    res.realizations = done;
    res.window = window;
    res.seed = seed;
    res.normalizer_sites = d0;
    fill_rows(res, acc, done, static_cast<double>(d0), task.k_cap);
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

CountingResult mc_refined_sweep(const FieldModel& model, uint64_t m, const Window& window,
                                const Window& subwindow, double u, Connectivity conn,
                                uint64_t seed, const EmpiricalOptions& options) {
  require_subwindow(window, subwindow);
  Task task;
  task.kind = EstimatorKind::McRefined;
  task.u = u;
  task.conn = conn;
  task.all_k = true;
  task.subwindow = subwindow;
  task.has_sub = true;
  task.k_cap = options.k_cap;

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::McRefined;
    res.model = model.descriptor();
    res.u = u;
    res.conn = conn;
    res.realizations = done;
    res.window = window;
    res.subwindow = subwindow;
    res.has_subwindow = true;
    res.seed = seed;
    res.normalizer_sites = subwindow.site_count();
    fill_rows(res, acc, done, static_cast<double>(subwindow.site_count()), task.k_cap,
              /*divide_by_k=*/true);
    res.sum_estimate = 0.0;
    for (const auto& r : res.rows) res.sum_estimate += r.estimate;
    res.sum_std_error = 0.0;
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

CountingResult mc_peak_sweep(const FieldModel& model, uint64_t m, const Window& window,
                             const Window& subwindow, double u, Connectivity conn,
                             uint64_t seed, const EmpiricalOptions& options) {
  require_subwindow(window, subwindow);
  Task task;
  task.kind = EstimatorKind::McPeak;
  task.u = u;
  task.conn = conn;
  task.all_k = true;
  task.subwindow = subwindow;
  task.has_sub = true;
  task.k_cap = options.k_cap;

  auto finalize = [&](const Accum& acc, uint64_t done) {
    CountingResult res;
    res.estimator = EstimatorKind::McPeak;
    res.model = model.descriptor();
    res.u = u;
    res.conn = conn;
    res.realizations = done;
    res.window = window;
    res.subwindow = subwindow;
    res.has_subwindow = true;
    res.seed = seed;
    res.normalizer_sites = subwindow.site_count();
    fill_rows(res, acc, done, static_cast<double>(subwindow.site_count()), task.k_cap);
    return res;
  };
  Accum acc = run(model, m, window, seed, task, options, finalize);
  return finalize(acc, m);
}

ProbEstimate mc_refined_tail(const FieldModel& model, uint64_t m, const Window& window,
                             const Window& subwindow, double u, Connectivity conn, int k_min,
                             uint64_t seed, const EmpiricalOptions& options) {
  require_subwindow(window, subwindow);
  Task task;
  task.kind = EstimatorKind::McRefined;
  task.u = u;
  task.conn = conn;
  task.tail = true;
  task.k_min = k_min;
  task.subwindow = subwindow;
  task.has_sub = true;
  task.k_cap = options.k_cap;

  auto finalize = [&](const Accum&, uint64_t) { return CountingResult{}; };
  Accum acc = run(model, m, window, seed, task, options, finalize);

  const double dm = static_cast<double>(m);
  const double nsub = static_cast<double>(subwindow.site_count());
  ProbEstimate e;
  e.value = acc.j_sum / (dm * nsub);
  double var = m > 1 ? (acc.j_sq - acc.j_sum * acc.j_sum / dm) / (dm - 1.0) : 0.0;
  e.std_error = std::sqrt(std::max(var, 0.0) / dm) / nsub;
  e.method = ProbEstimate::Method::MonteCarlo;
  e.evaluations = m;
  return e;
}

}  // namespace csd
