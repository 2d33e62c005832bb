#include "csd/lattice.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace csd {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("lattice dimension must be in [1, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(d));
}

}  // namespace

Site::Site(std::initializer_list<int32_t> coords) {
  check_dim(static_cast<int>(coords.size()));
  nd = static_cast<int8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), x.begin());
}

Site::Site(std::span<const int32_t> coords) {
  check_dim(static_cast<int>(coords.size()));
  nd = static_cast<int8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), x.begin());
}

Site Site::origin(int dim) {
  check_dim(dim);
  Site s;
  s.nd = static_cast<int8_t>(dim);
  return s;
}

Site Site::unit(int dim, int axis) {
  Site s = origin(dim);
  if (axis < 0 || axis >= dim) throw std::invalid_argument("axis out of range");
  s.x[static_cast<size_t>(axis)] = 1;
  return s;
}

Site Site::operator+(const Site& o) const {
  Site r = *this;
  for (int i = 0; i < nd; ++i) r.x[static_cast<size_t>(i)] += o.x[static_cast<size_t>(i)];
  return r;
}

Site Site::operator-(const Site& o) const {
  Site r = *this;
  for (int i = 0; i < nd; ++i) r.x[static_cast<size_t>(i)] -= o.x[static_cast<size_t>(i)];
  return r;
}

Site Site::operator-() const {
  Site r = *this;
  for (int i = 0; i < nd; ++i) r.x[static_cast<size_t>(i)] = -r.x[static_cast<size_t>(i)];
  return r;
}

std::strong_ordering lex_compare(const Site& a, const Site& b) {
  if (a.nd != b.nd) throw std::invalid_argument("lex_compare: dimension mismatch");
  for (int i = 0; i < a.nd; ++i) {
    if (auto c = a.x[static_cast<size_t>(i)] <=> b.x[static_cast<size_t>(i)]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string to_string(const Site& s) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < s.nd; ++i) {
    if (i) os << ',';
    os << s.x[static_cast<size_t>(i)];
  }
  os << ')';
  return os.str();
}

const char* to_string(Connectivity c) {
  return c == Connectivity::Nearest ? "nearest" : "moore";
}

Connectivity connectivity_from_string(const std::string& s) {
  if (s == "nearest") return Connectivity::Nearest;
  if (s == "moore") return Connectivity::Moore;
  throw std::invalid_argument("unknown connectivity: " + s);
}

const std::vector<Site>& neighbor_offsets(Connectivity conn, int dim) {
  check_dim(dim);
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<Site>> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_pair(static_cast<int>(conn), dim);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<Site> offs;
  if (conn == Connectivity::Nearest) {
    for (int i = 0; i < dim; ++i) {
      offs.push_back(-Site::unit(dim, i));
      offs.push_back(Site::unit(dim, i));
    }
  } else {
    Site v = Site::origin(dim);
    for (int i = 0; i < dim; ++i) v[i] = -1;
    // odometer over {-1,0,1}^d, skipping the origin
    for (;;) {
      bool zero = true;
      for (int i = 0; i < dim; ++i) zero = zero && v[i] == 0;
      if (!zero) offs.push_back(v);
      int axis = dim - 1;
      while (axis >= 0 && v[axis] == 1) v[axis--] = -1;
      if (axis < 0) break;
      ++v[axis];
    }
  }
  std::sort(offs.begin(), offs.end(), LexLess{});
  return cache.emplace(key, std::move(offs)).first->second;
}

int neighbor_count(Connectivity conn, int dim) {
  return static_cast<int>(neighbor_offsets(conn, dim).size());
}

SiteSet::SiteSet(std::vector<Site> sites) : sites_(std::move(sites)) {
  for (const auto& s : sites_) {
    if (s.dim() != sites_.front().dim())
      throw std::invalid_argument("SiteSet: dimension mismatch among members");
  }
  std::sort(sites_.begin(), sites_.end(), LexLess{});
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

bool SiteSet::contains(const Site& s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s, LexLess{});
}

SiteSet SiteSet::translated(const Site& v) const {
  std::vector<Site> out;
  out.reserve(sites_.size());
  for (const auto& s : sites_) out.push_back(s + v);
  SiteSet r;
  r.sites_ = std::move(out);  // translation preserves lex order
  return r;
}

SiteSet neighbors(const Site& t, Connectivity conn) {
  std::vector<Site> out;
  for (const auto& o : neighbor_offsets(conn, t.dim())) out.push_back(t + o);
  return SiteSet(std::move(out));
}

SiteSet exterior_neighbors(const SiteSet& d, Connectivity conn) {
  if (d.empty()) throw std::invalid_argument("empty shape");
  std::vector<Site> out;
  for (const auto& t : d) {
    for (const auto& o : neighbor_offsets(conn, d.dim())) {
      Site n = t + o;
      if (!d.contains(n)) out.push_back(n);
    }
  }
  return SiteSet(std::move(out));
}

Site root_of(const SiteSet& cluster) {
  if (cluster.empty()) throw std::invalid_argument("root_of: empty cluster");
  return cluster[0];
}

bool is_connected(const SiteSet& d, Connectivity conn) {
  if (d.empty()) return false;
  std::vector<uint8_t> seen(d.size(), 0);
  std::vector<size_t> stack{0};
  seen[0] = 1;
  size_t visited = 1;
  const auto& sites = d.sites();
  while (!stack.empty()) {
    size_t i = stack.back();
    stack.pop_back();
    for (const auto& o : neighbor_offsets(conn, d.dim())) {
      Site n = sites[i] + o;
      auto it = std::lower_bound(sites.begin(), sites.end(), n, LexLess{});
      if (it != sites.end() && *it == n) {
        size_t j = static_cast<size_t>(it - sites.begin());
        if (!seen[j]) {
          seen[j] = 1;
          ++visited;
          stack.push_back(j);
        }
      }
    }
  }
  return visited == d.size();
}

Window::Window(Site lo_, Site hi_) : lo(lo_), hi(hi_) {
  if (lo.dim() != hi.dim()) throw std::invalid_argument("Window: corner dimension mismatch");
  for (int i = 0; i < lo.dim(); ++i)
    if (lo[i] > hi[i]) throw std::invalid_argument("Window: lo > hi on axis " + std::to_string(i));
}

Window Window::centered(std::span<const int64_t> extents) {
  check_dim(static_cast<int>(extents.size()));
  Site lo = Site::origin(static_cast<int>(extents.size()));
  Site hi = lo;
  for (size_t i = 0; i < extents.size(); ++i) {
    if (extents[i] < 1) throw std::invalid_argument("Window: extent must be positive");
    int64_t half = extents[i] / 2;
    lo[static_cast<int>(i)] = static_cast<int32_t>(-half);
    hi[static_cast<int>(i)] = static_cast<int32_t>(extents[i] - half - 1);
  }
  return Window(lo, hi);
}

int64_t Window::site_count() const {
  int64_t n = 1;
  for (int i = 0; i < dim(); ++i) n *= extent(i);
  return n;
}

bool Window::contains(const Site& s) const {
  if (s.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (s[i] < lo[i] || s[i] > hi[i]) return false;
  return true;
}

bool Window::contains(const Window& w) const {
  return contains(w.lo) && contains(w.hi);
}

bool Window::is_interior(const Site& s) const {
  if (s.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (s[i] <= lo[i] || s[i] >= hi[i]) return false;
  return true;
}

int64_t Window::index_of(const Site& s) const {
  int64_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx = idx * extent(i) + (s[i] - lo[i]);
  return idx;
}

Site Window::site_at(int64_t index) const {
  Site s = Site::origin(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    int64_t e = extent(i);
    s[i] = static_cast<int32_t>(lo[i] + index % e);
    index /= e;
  }
  return s;
}

ExcursionMask ExcursionMask::from_values(const Window& w, std::span<const double> values,
                                         double u) {
  if (static_cast<int64_t>(values.size()) != w.site_count())
    throw std::invalid_argument("ExcursionMask: one value per window site required");
  ExcursionMask m;
  m.window = w;
  m.above.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) m.above[i] = values[i] > u ? 1 : 0;
  return m;
}

namespace {

struct UnionFind {
  std::vector<int64_t> parent;
  explicit UnionFind(int64_t n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), int64_t{0});
  }
  int64_t find(int64_t a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  }
  void unite(int64_t a, int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);  // keep the smaller index as the root
    parent[static_cast<size_t>(a)] = b;
  }
};

// Stencil offsets that precede the origin in lex order, as (coord offset, flat offset).
struct BackwardStencil {
  std::vector<Site> coord;
  std::vector<int64_t> flat;
};

BackwardStencil backward_stencil(const Window& w, Connectivity conn) {
  BackwardStencil st;
  Site o = Site::origin(w.dim());
  for (const auto& off : neighbor_offsets(conn, w.dim())) {
    if (LexLess{}(off, o)) {
      st.coord.push_back(off);
      int64_t f = 0;
      for (int i = 0; i < w.dim(); ++i) f = f * w.extent(i) + off[i];
      st.flat.push_back(f);
    }
  }
  return st;
}

}  // namespace

Labeling label_clusters(const ExcursionMask& mask, Connectivity conn) {
  const Window& w = mask.window;
  const int64_t n = w.site_count();
  const int d = w.dim();
  BackwardStencil st = backward_stencil(w, conn);

  UnionFind uf(n);
  // odometer over window coordinates in lex (= flat) order
  std::vector<int64_t> c(static_cast<size_t>(d), 0);  // coords relative to lo
  for (int64_t idx = 0; idx < n; ++idx) {
    if (mask.above[static_cast<size_t>(idx)]) {
      for (size_t s = 0; s < st.coord.size(); ++s) {
        bool inside = true;
        for (int i = 0; i < d && inside; ++i) {
          int64_t ci = c[static_cast<size_t>(i)] + st.coord[s][i];
          inside = ci >= 0 && ci < w.extent(i);
        }
        if (!inside) continue;
        int64_t nb = idx + st.flat[s];
        if (mask.above[static_cast<size_t>(nb)]) uf.unite(idx, nb);
      }
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++c[static_cast<size_t>(i)] < w.extent(i)) break;
      c[static_cast<size_t>(i)] = 0;
    }
  }

  Labeling out;
  out.window = w;
  out.conn = conn;
  out.label.assign(static_cast<size_t>(n), -1);

  std::vector<int32_t> id_of_root(static_cast<size_t>(n), -1);
  std::fill(c.begin(), c.end(), 0);
  for (int64_t idx = 0; idx < n; ++idx) {
    if (mask.above[static_cast<size_t>(idx)]) {
      int64_t r = uf.find(idx);
      int32_t id = id_of_root[static_cast<size_t>(r)];
      if (id < 0) {
        // first member in flat order is the lex-smallest: r == idx here
        id = static_cast<int32_t>(out.clusters.size());
        id_of_root[static_cast<size_t>(r)] = id;
        out.clusters.push_back(ClusterInfo{idx, 0, false});
      }
      out.label[static_cast<size_t>(idx)] = id;
      auto& ci = out.clusters[static_cast<size_t>(id)];
      ++ci.size;
      for (int i = 0; i < d && !ci.touches_boundary; ++i) {
        if (c[static_cast<size_t>(i)] == 0 || c[static_cast<size_t>(i)] == w.extent(i) - 1)
          ci.touches_boundary = true;
      }
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++c[static_cast<size_t>(i)] < w.extent(i)) break;
      c[static_cast<size_t>(i)] = 0;
    }
  }
  return out;
}

std::vector<SiteSet> connected_components(const ExcursionMask& mask, Connectivity conn) {
  Labeling lab = label_clusters(mask, conn);
  std::vector<std::vector<Site>> members(lab.clusters.size());
  for (size_t i = 0; i < lab.clusters.size(); ++i)
    members[i].reserve(static_cast<size_t>(lab.clusters[i].size));
  for (int64_t idx = 0; idx < mask.window.site_count(); ++idx) {
    int32_t id = lab.label[static_cast<size_t>(idx)];
    if (id >= 0) members[static_cast<size_t>(id)].push_back(mask.window.site_at(idx));
  }
  std::vector<SiteSet> out;
  out.reserve(members.size());
  for (auto& m : members) out.emplace_back(std::move(m));
  return out;
}

std::vector<Site> LocalMaxima::sites(const Window& w) const {
  std::vector<Site> out;
  out.reserve(indices.size());
  for (int64_t i : indices) out.push_back(w.site_at(i));
  return out;
}

LocalMaxima local_maxima(const Window& w, std::span<const double> values, double u,
                         Connectivity conn) {
  if (static_cast<int64_t>(values.size()) != w.site_count())
    throw std::invalid_argument("local_maxima: one value per window site required");
  LocalMaxima out;
  const int d = w.dim();
  bool has_interior = true;
  for (int i = 0; i < d; ++i) has_interior = has_interior && w.extent(i) >= 3;
  if (!has_interior) {
    out.no_interior = true;
    return out;
  }

  const auto& offs = neighbor_offsets(conn, d);
  std::vector<int64_t> flat;
  flat.reserve(offs.size());
  for (const auto& o : offs) {
    int64_t f = 0;
    for (int i = 0; i < d; ++i) f = f * w.extent(i) + o[i];
    flat.push_back(f);
  }

  // odometer over interior coordinates only
  std::vector<int64_t> c(static_cast<size_t>(d), 1);
  for (;;) {
    int64_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * w.extent(i) + c[static_cast<size_t>(i)];
    double v = values[static_cast<size_t>(idx)];
    if (v > u) {
      bool any_greater = false, any_equal = false;
      for (size_t s = 0; s < flat.size() && !any_greater; ++s) {
        double nv = values[static_cast<size_t>(idx + flat[s])];
        if (nv > v) any_greater = true;
        else if (nv == v) any_equal = true;
      }
      if (!any_greater) {
        if (any_equal) ++out.tie_count;
        else out.indices.push_back(idx);
      }
    }
    int axis = d - 1;
    while (axis >= 0 && c[static_cast<size_t>(axis)] == w.extent(axis) - 2)
      c[static_cast<size_t>(axis--)] = 1;
    if (axis < 0) break;
    ++c[static_cast<size_t>(axis)];
  }
  return out;
}

}  // namespace csd
