#include "csd/shapes.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace csd {

RootedShape RootedShape::checked(SiteSet sites, Connectivity conn) {
  if (sites.empty()) throw std::invalid_argument("RootedShape: empty shape");
  Site o = Site::origin(sites.dim());
  if (!(sites[0] == o))
    throw std::invalid_argument("RootedShape: lex-smallest member must be the origin");
  if (!is_connected(sites, conn)) throw std::invalid_argument("RootedShape: not connected");
  return RootedShape{std::move(sites), conn};
}

int default_enumeration_cap(int dim) {
  switch (dim) {
    case 1: return 256;
    case 2: return 12;
    case 3: return 8;
    default: return 6;
  }
}

namespace {

// Bounded box holding every rooted k-shape: first axis [0, k-1], others
// [-(k-1), k-1]. Cells are addressed by flat index.
struct GrowthGrid {
  int dim;
  int k;
  std::vector<int64_t> extent;
  std::vector<int64_t> stride;
  int64_t cells;
  int64_t origin;

  GrowthGrid(int k_, int dim_) : dim(dim_), k(k_) {
    extent.assign(static_cast<size_t>(dim), 2 * static_cast<int64_t>(k) - 1);
    extent[0] = k;
    stride.assign(static_cast<size_t>(dim), 1);
    for (int i = dim - 2; i >= 0; --i) stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i + 1)] * extent[static_cast<size_t>(i + 1)];
    cells = stride[0] * extent[0];
    origin = flat_of(Site::origin(dim));
  }

  int64_t flat_of(const Site& s) const {
    int64_t f = 0;
    for (int i = 0; i < dim; ++i) {
      int64_t c = s[i] - (i == 0 ? 0 : -(k - 1));
      f += c * stride[static_cast<size_t>(i)];
    }
    return f;
  }

  Site site_of(int64_t f) const {
    Site s = Site::origin(dim);
    for (int i = 0; i < dim; ++i) {
      int64_t c = f / stride[static_cast<size_t>(i)];
      f %= stride[static_cast<size_t>(i)];
      s[i] = static_cast<int32_t>(c + (i == 0 ? 0 : -(k - 1)));
    }
    return s;
  }

  bool in_box(const Site& s) const {
    if (s[0] < 0 || s[0] > k - 1) return false;
    for (int i = 1; i < dim; ++i)
      if (s[i] < -(k - 1) || s[i] > k - 1) return false;
    return true;
  }
};

// Redelmeier recursion: each candidate popped from the untried stack is used
// once and then permanently excluded at its level, so every shape is reached
// exactly once.
struct Enumerator {
  GrowthGrid grid;
  std::vector<Site> offsets;
  int target_k;
  std::vector<uint8_t> reached;
  std::vector<int64_t> shape;
  std::vector<SiteSet>* out;

  Enumerator(int k, Connectivity conn, int dim, std::vector<SiteSet>* sink)
      : grid(k, dim), offsets(neighbor_offsets(conn, dim)), target_k(k),
        reached(static_cast<size_t>(grid.cells), 0), out(sink) {}

  bool allowed(const Site& s) const {
    // origin itself, or strictly after the origin in lex order
    for (int i = 0; i < grid.dim; ++i) {
      if (s[i] > 0) return true;
      if (s[i] < 0) return false;
    }
    return true;
  }

  void emit() {
    std::vector<Site> sites;
    sites.reserve(shape.size());
    for (int64_t f : shape) sites.push_back(grid.site_of(f));
    out->emplace_back(std::move(sites));
  }

  void grow(std::vector<int64_t> untried) {
    while (!untried.empty()) {
      int64_t cell = untried.back();
      untried.pop_back();
      shape.push_back(cell);
      if (static_cast<int>(shape.size()) == target_k) {
        emit();
      } else {
        Site here = grid.site_of(cell);
        std::vector<int64_t> added;
        for (const auto& off : offsets) {
          Site n = here + off;
          if (!grid.in_box(n) || !allowed(n)) continue;
          int64_t f = grid.flat_of(n);
          if (!reached[static_cast<size_t>(f)]) {
            reached[static_cast<size_t>(f)] = 1;
            added.push_back(f);
          }
        }
        std::vector<int64_t> next = untried;
        next.insert(next.end(), added.begin(), added.end());
        grow(std::move(next));
        for (int64_t f : added) reached[static_cast<size_t>(f)] = 0;
      }
      shape.pop_back();
    }
  }

  void run() {
    reached[static_cast<size_t>(grid.origin)] = 1;
    grow({grid.origin});
  }
};

}  // namespace

std::vector<SiteSet> enumerate_rooted(int k, Connectivity conn, int dim, int cap_override) {
  if (k < 1) throw std::invalid_argument("enumerate_rooted: k must be >= 1");
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("enumerate_rooted: bad dimension");
  int cap = cap_override > 0 ? cap_override : default_enumeration_cap(dim);
  if (k > cap)
    throw std::invalid_argument("enumerate_rooted: k = " + std::to_string(k) +
                                " exceeds enumeration cap " + std::to_string(cap));
  std::vector<SiteSet> out;
  Enumerator e(k, conn, dim, &out);
  e.run();
  std::sort(out.begin(), out.end(), [](const SiteSet& a, const SiteSet& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), LexLess{});
  });
  return out;
}

std::vector<SiteSet> enumerate_containing_origin(int k, Connectivity conn, int dim,
                                                 int cap_override) {
  std::vector<SiteSet> rooted = enumerate_rooted(k, conn, dim, cap_override);
  std::vector<SiteSet> out;
  out.reserve(rooted.size() * static_cast<size_t>(k));
  for (const auto& d : rooted)
    for (const auto& s : d) out.push_back(d.translated(-s));
  std::sort(out.begin(), out.end(), [](const SiteSet& a, const SiteSet& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), LexLess{});
  });
  return out;
}

ShapeCatalog::ShapeCatalog(Connectivity conn, int dim, int cap_override)
    : conn_(conn), dim_(dim),
      cap_(cap_override > 0 ? cap_override : default_enumeration_cap(dim)) {
  rooted_.resize(static_cast<size_t>(cap_) + 1);
  inside_.resize(static_cast<size_t>(cap_) + 1);
}

const std::vector<SiteSet>& ShapeCatalog::rooted(int k) const {
  if (k < 1 || k > cap_)
    throw std::invalid_argument("ShapeCatalog: k = " + std::to_string(k) +
                                " outside [1, " + std::to_string(cap_) + "]");
  auto& slot = rooted_[static_cast<size_t>(k)];
  if (slot.empty()) slot = enumerate_rooted(k, conn_, dim_, cap_);
  return slot;
}

const std::vector<SiteSet>& ShapeCatalog::containing_origin(int k) const {
  if (k < 1 || k > cap_)
    throw std::invalid_argument("ShapeCatalog: k = " + std::to_string(k) +
                                " outside [1, " + std::to_string(cap_) + "]");
  auto& slot = inside_[static_cast<size_t>(k)];
  if (slot.empty()) slot = enumerate_containing_origin(k, conn_, dim_, cap_);
  return slot;
}

namespace {

// All signed permutations of the coordinate axes (hyperoctahedral group).
std::vector<std::pair<std::vector<int>, std::vector<int>>> signed_permutations(int dim) {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> group;
  std::vector<int> perm(static_cast<size_t>(dim));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (int signs = 0; signs < (1 << dim); ++signs) {
      std::vector<int> sgn(static_cast<size_t>(dim));
      for (int i = 0; i < dim; ++i) sgn[static_cast<size_t>(i)] = (signs >> i) & 1 ? -1 : 1;
      group.emplace_back(perm, sgn);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return group;
}

Site apply_motion(const Site& s, const std::vector<int>& perm, const std::vector<int>& sgn) {
  Site r = Site::origin(s.dim());
  for (int i = 0; i < s.dim(); ++i)
    r[i] = static_cast<int32_t>(sgn[static_cast<size_t>(i)] * s[perm[static_cast<size_t>(i)]]);
  return r;
}

std::vector<int32_t> flat_key(const SiteSet& s) {
  std::vector<int32_t> key;
  key.reserve(s.size() * static_cast<size_t>(s.dim()));
  for (const auto& site : s)
    for (int i = 0; i < s.dim(); ++i) key.push_back(site[i]);
  return key;
}

void check_homogeneous(std::span<const SiteSet> shapes) {
  if (shapes.empty()) return;
  for (const auto& s : shapes) {
    if (s.size() != shapes.front().size() || s.dim() != shapes.front().dim())
      throw std::invalid_argument("group_by_rigid_motion: heterogeneous shape list");
  }
}

std::vector<ShapeClass> group_impl(std::span<const SiteSet> shapes, bool reroot) {
  check_homogeneous(shapes);
  std::vector<ShapeClass> out;
  if (shapes.empty()) return out;
  const int dim = shapes.front().dim();
  auto group = signed_permutations(dim);

  std::map<std::vector<int32_t>, size_t> classes;
  for (const auto& shape : shapes) {
    std::vector<int32_t> best;
    SiteSet best_shape;
    for (const auto& [perm, sgn] : group) {
      std::vector<Site> img;
      img.reserve(shape.size());
      for (const auto& s : shape) img.push_back(apply_motion(s, perm, sgn));
      SiteSet candidate(std::move(img));
      if (reroot) candidate = candidate.translated(-candidate[0]);
      auto key = flat_key(candidate);
      if (best.empty() || key < best) {
        best = std::move(key);
        best_shape = std::move(candidate);
      }
    }
    auto it = classes.find(best);
    if (it == classes.end()) {
      classes.emplace(std::move(best), out.size());
      out.push_back(ShapeClass{std::move(best_shape), 1});
    } else {
      ++out[it->second].multiplicity;
    }
  }
  return out;
}

}  // namespace

std::vector<ShapeClass> group_by_rigid_motion(std::span<const SiteSet> shapes) {
  return group_impl(shapes, /*reroot=*/true);
}

std::vector<ShapeClass> group_anchored_by_rigid_motion(std::span<const SiteSet> shapes) {
  return group_impl(shapes, /*reroot=*/false);
}

int peak_constraint_degree(const SiteSet& shape, const Site& anchor, Connectivity conn) {
  if (!shape.contains(anchor))
    throw std::invalid_argument("peak_constraint_degree: anchor not in shape");
  int m = 0;
  for (const auto& off : neighbor_offsets(conn, shape.dim()))
    if (shape.contains(anchor + off)) ++m;
  return m;
}

}  // namespace csd
