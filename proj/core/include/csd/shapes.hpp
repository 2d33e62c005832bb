#pragma once

#include <vector>

#include "csd/lattice.hpp"

namespace csd {

/// A connected k-site set whose lex-smallest member is the origin.
struct RootedShape {
  SiteSet sites;
  Connectivity conn;

  int k() const { return static_cast<int>(sites.size()); }

  /// Validates connectivity, origin membership and rootedness.
  static RootedShape checked(SiteSet sites, Connectivity conn);
};

/// Default per-dimension enumeration caps; catalog growth is exponential.
int default_enumeration_cap(int dim);

/// All connected k-site shapes rooted at the origin (fixed polyominoes for
/// Nearest, polyplets for Moore), generated by Redelmeier-style recursive
/// growth restricted to sites >= origin in lex order. Sorted by site list.
std::vector<SiteSet> enumerate_rooted(int k, Connectivity conn, int dim,
                                      int cap_override = -1);

/// All translates of rooted k-shapes that contain the origin; exactly
/// k * |enumerate_rooted(k)| shapes. The origin plays the anchor role.
std::vector<SiteSet> enumerate_containing_origin(int k, Connectivity conn, int dim,
                                                 int cap_override = -1);

/// Lazily built per-size shape lists for one (connectivity, dimension) pair.
/// Catalogs are immutable once a size has been enumerated.
class ShapeCatalog {
 public:
  ShapeCatalog(Connectivity conn, int dim, int cap_override = -1);

  Connectivity conn() const { return conn_; }
  int dim() const { return dim_; }
  int cap() const { return cap_; }

  /// Rooted k-shapes (lex-minimum at the origin), cached after first use.
  const std::vector<SiteSet>& rooted(int k) const;
  /// Origin-containing translates; exactly k * |rooted(k)| shapes.
  const std::vector<SiteSet>& containing_origin(int k) const;
  size_t count(int k) const { return rooted(k).size(); }

 private:
  Connectivity conn_;
  int dim_;
  int cap_;
  mutable std::vector<std::vector<SiteSet>> rooted_;   // index k, empty until built
  mutable std::vector<std::vector<SiteSet>> inside_;
};

/// Orbit of congruent shapes under the hyperoctahedral group (all signed
/// coordinate permutations), after re-rooting.
struct ShapeClass {
  SiteSet representative;
  int multiplicity;
};

/// Partition of a homogeneous shape list into rigid-motion congruence classes.
std::vector<ShapeClass> group_by_rigid_motion(std::span<const SiteSet> shapes);

/// Same, for origin-anchored shapes: motions fix the origin (no re-rooting),
/// so classes respect the anchored-site geometry used by peak events.
std::vector<ShapeClass> group_anchored_by_rigid_motion(std::span<const SiteSet> shapes);

/// Number of in-shape neighbors of the anchor. Throws if anchor not in shape.
int peak_constraint_degree(const SiteSet& shape, const Site& anchor, Connectivity conn);

}  // namespace csd
