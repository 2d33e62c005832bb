#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace csd {

/// Maximum lattice dimension supported by the fixed-capacity Site type.
inline constexpr int kMaxDim = 4;

/// A point of the integer lattice Z^d, 1 <= d <= kMaxDim.
struct Site {
  int8_t nd = 0;
  std::array<int32_t, kMaxDim> x{};

  Site() = default;
  Site(std::initializer_list<int32_t> coords);
  explicit Site(std::span<const int32_t> coords);

  static Site origin(int dim);
  /// Standard basis vector e_axis (0-based axis).
  static Site unit(int dim, int axis);

  int dim() const { return nd; }
  int32_t operator[](int i) const { return x[static_cast<size_t>(i)]; }
  int32_t& operator[](int i) { return x[static_cast<size_t>(i)]; }

  friend bool operator==(const Site& a, const Site& b) {
    if (a.nd != b.nd) return false;
    for (int i = 0; i < a.nd; ++i)
      if (a.x[static_cast<size_t>(i)] != b.x[static_cast<size_t>(i)]) return false;
    return true;
  }

  Site operator+(const Site& o) const;
  Site operator-(const Site& o) const;
  Site operator-() const;
};

/// Lexicographic order: the first coordinate where the two sites differ decides.
/// Throws std::invalid_argument on dimension mismatch.
std::strong_ordering lex_compare(const Site& a, const Site& b);

/// Unchecked lexicographic less-than for dimension-homogeneous containers.
struct LexLess {
  bool operator()(const Site& a, const Site& b) const {
    for (int i = 0; i < a.nd; ++i) {
      if (a.x[static_cast<size_t>(i)] != b.x[static_cast<size_t>(i)])
        return a.x[static_cast<size_t>(i)] < b.x[static_cast<size_t>(i)];
    }
    return false;
  }
};

std::string to_string(const Site& s);

/// Neighborhood system: Nearest has 2d neighbors (unit Euclidean distance),
/// Moore has 3^d - 1 (unit max-norm distance, diagonals included).
enum class Connectivity { Nearest, Moore };

const char* to_string(Connectivity c);
Connectivity connectivity_from_string(const std::string& s);

/// Offsets of the neighborhood stencil, in lex order.
const std::vector<Site>& neighbor_offsets(Connectivity conn, int dim);

/// Number of stencil offsets: 2d for Nearest, 3^d - 1 for Moore.
int neighbor_count(Connectivity conn, int dim);

/// A finite, dimension-homogeneous set of sites kept sorted in lex order.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<Site> sites);

  int dim() const { return sites_.empty() ? 0 : sites_.front().dim(); }
  size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool contains(const Site& s) const;
  const Site& operator[](size_t i) const { return sites_[i]; }
  const std::vector<Site>& sites() const { return sites_; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  friend bool operator==(const SiteSet& a, const SiteSet& b) { return a.sites_ == b.sites_; }

  SiteSet translated(const Site& v) const;

 private:
  std::vector<Site> sites_;  // sorted, unique
};

SiteSet neighbors(const Site& t, Connectivity conn);

/// Exterior neighbor set N(D): all neighbors of members of D that are not in D.
/// Throws on empty D ("empty shape").
SiteSet exterior_neighbors(const SiteSet& d, Connectivity conn);

/// Lexicographically smallest member. Throws on empty input.
Site root_of(const SiteSet& cluster);

/// True if the set is connected under the given neighborhood system.
bool is_connected(const SiteSet& d, Connectivity conn);

/// Axis-aligned box of lattice sites, inclusive corners, lo <= hi componentwise.
struct Window {
  Site lo, hi;

  Window() = default;
  Window(Site lo_, Site hi_);

  /// Window of the given per-axis extents, centered on the origin
  /// (extent n covers [-floor(n/2), n - floor(n/2) - 1]).
  static Window centered(std::span<const int64_t> extents);

  int dim() const { return lo.dim(); }
  int64_t extent(int axis) const { return static_cast<int64_t>(hi[axis]) - lo[axis] + 1; }
  int64_t site_count() const;
  bool contains(const Site& s) const;
  bool contains(const Window& w) const;
  /// All coordinates strictly between lo and hi: the full neighbor set
  /// (either stencil) lies inside the window.
  bool is_interior(const Site& s) const;

  /// Row-major flat index with the first coordinate most significant,
  /// so flat order coincides with lex order.
  int64_t index_of(const Site& s) const;
  Site site_at(int64_t index) const;
};

/// Threshold-exceedance indicator over a window: above[i] <=> X > u at site i.
struct ExcursionMask {
  Window window;
  std::vector<uint8_t> above;

  static ExcursionMask from_values(const Window& w, std::span<const double> values, double u);
};

struct ClusterInfo {
  int64_t min_index;  // flat index of the lex-smallest member
  int64_t size;
  bool touches_boundary;
};

/// Cluster labels for every window site: -1 below threshold, otherwise the
/// cluster id; ids are assigned in lex order of the cluster roots.
struct Labeling {
  Window window;
  Connectivity conn;
  std::vector<int32_t> label;
  std::vector<ClusterInfo> clusters;
};

/// Single-pass union-find labeling of the excursion set.
Labeling label_clusters(const ExcursionMask& mask, Connectivity conn);

/// Maximal connected components of the true sites, sorted by lex-smallest member.
std::vector<SiteSet> connected_components(const ExcursionMask& mask, Connectivity conn);

struct LocalMaxima {
  std::vector<int64_t> indices;  // flat indices of strict local maxima above u, lex order
  int64_t tie_count = 0;         // sites above u that failed only by an exact tie
  bool no_interior = false;      // window too small to contain any interior site

  std::vector<Site> sites(const Window& w) const;
};

/// Strict local maxima above u, evaluated at interior sites only.
LocalMaxima local_maxima(const Window& w, std::span<const double> values, double u,
                         Connectivity conn);

}  // namespace csd
