#include <doctest.h>

#include <set>
#include <stdexcept>

#include "csd/shapes.hpp"
#include "shape_oracle.hpp"

using namespace csd;

namespace {

SiteSet shape2(std::initializer_list<std::pair<int, int>> pts) {
  std::vector<Site> sites;
  for (auto [x, y] : pts) sites.push_back(Site{x, y});
  return SiteSet(std::move(sites));
}

std::set<std::vector<std::vector<int32_t>>> as_set(const std::vector<SiteSet>& shapes) {
  std::set<std::vector<std::vector<int32_t>>> out;
  for (const auto& s : shapes) out.insert(testing::key_of(s));
  return out;
}

}  // namespace

TEST_CASE("rooted triominoes under nearest neighbors match the explicit list") {
  auto shapes = enumerate_rooted(3, Connectivity::Nearest, 2);
  std::vector<SiteSet> expected{
      shape2({{0, 0}, {1, 0}, {2, 0}}), shape2({{0, 0}, {1, 0}, {1, 1}}),
      shape2({{0, 0}, {1, 0}, {1, -1}}), shape2({{0, 0}, {1, 0}, {0, 1}}),
      shape2({{0, 0}, {0, 1}, {0, 2}}), shape2({{0, 0}, {0, 1}, {1, 1}})};
  CHECK(as_set(shapes) == as_set(expected));
}

TEST_CASE("rooted dominoes under Moore neighbors include the diagonals") {
  auto shapes = enumerate_rooted(2, Connectivity::Moore, 2);
  std::vector<SiteSet> expected{shape2({{0, 0}, {1, 0}}), shape2({{0, 0}, {0, 1}}),
                                shape2({{0, 0}, {1, 1}}), shape2({{0, 0}, {1, -1}})};
  CHECK(as_set(shapes) == as_set(expected));
}

TEST_CASE("size one catalog is the origin alone") {
  for (auto conn : {Connectivity::Nearest, Connectivity::Moore}) {
    auto shapes = enumerate_rooted(1, conn, 2);
    REQUIRE(shapes.size() == 1);
    CHECK(shapes[0] == SiteSet({Site::origin(2)}));
  }
}

TEST_CASE("rooted shape counts match the brute-force oracle set-for-set") {
  const int nearest_counts[] = {1, 2, 6, 19, 63, 216};
  for (int k = 1; k <= 6; ++k) {
    auto fast = enumerate_rooted(k, Connectivity::Nearest, 2);
    auto slow = testing::brute_force_rooted(k, Connectivity::Nearest, 2);
    CHECK(fast.size() == static_cast<size_t>(nearest_counts[k - 1]));
    CHECK(as_set(fast) == as_set(slow));
  }
  const int moore_counts[] = {1, 4, 20, 110};
  for (int k = 1; k <= 4; ++k) {
    auto fast = enumerate_rooted(k, Connectivity::Moore, 2);
    auto slow = testing::brute_force_rooted(k, Connectivity::Moore, 2);
    CHECK(fast.size() == static_cast<size_t>(moore_counts[k - 1]));
    CHECK(as_set(fast) == as_set(slow));
  }
}

TEST_CASE("3D rooted counts agree with the oracle") {
  for (int k = 1; k <= 4; ++k) {
    auto fast = enumerate_rooted(k, Connectivity::Nearest, 3);
    auto slow = testing::brute_force_rooted(k, Connectivity::Nearest, 3);
    CHECK(as_set(fast) == as_set(slow));
  }
}

TEST_CASE("every enumerated shape is connected, rooted and the right size") {
  for (auto conn : {Connectivity::Nearest, Connectivity::Moore}) {
    for (int k = 1; k <= 5; ++k) {
      for (const auto& s : enumerate_rooted(k, conn, 2)) {
        CHECK(s.size() == static_cast<size_t>(k));
        CHECK(is_connected(s, conn));
        CHECK(s[0] == Site::origin(2));  // lex minimum at the origin
      }
    }
  }
}

TEST_CASE("enumeration cap raises a descriptive error") {
  CHECK_THROWS_WITH_AS(enumerate_rooted(13, Connectivity::Nearest, 2),
                       "enumerate_rooted: k = 13 exceeds enumeration cap 12",
                       std::invalid_argument);
  CHECK_NOTHROW(enumerate_rooted(7, Connectivity::Moore, 2, 7));
}

TEST_CASE("origin-containing catalog is k times the rooted catalog") {
  for (auto conn : {Connectivity::Nearest, Connectivity::Moore}) {
    for (int k = 1; k <= 5; ++k) {
      auto inside = enumerate_containing_origin(k, conn, 2);
      auto rooted = enumerate_rooted(k, conn, 2);
      CHECK(inside.size() == rooted.size() * static_cast<size_t>(k));
      std::set<std::vector<std::vector<int32_t>>> dedup = as_set(inside);
      CHECK(dedup.size() == inside.size());
      for (const auto& s : inside) CHECK(s.contains(Site::origin(2)));
    }
  }
}

TEST_CASE("origin-containing dominoes and triominoes match the stated counts") {
  auto k1 = enumerate_containing_origin(1, Connectivity::Nearest, 2);
  CHECK(k1.size() == 1);
  auto k2 = enumerate_containing_origin(2, Connectivity::Nearest, 2);
  std::vector<SiteSet> expected{shape2({{0, 0}, {1, 0}}), shape2({{0, 0}, {-1, 0}}),
                                shape2({{0, 0}, {0, 1}}), shape2({{0, 0}, {0, -1}})};
  CHECK(as_set(k2) == as_set(expected));
  CHECK(enumerate_containing_origin(3, Connectivity::Nearest, 2).size() == 18);
}

TEST_CASE("rigid-motion classes of the rooted triominoes: lines and Ls") {
  auto classes = group_by_rigid_motion(enumerate_rooted(3, Connectivity::Nearest, 2));
  REQUIRE(classes.size() == 2);
  std::multiset<int> mults{classes[0].multiplicity, classes[1].multiplicity};
  CHECK(mults == std::multiset<int>{2, 4});
}

TEST_CASE("rigid-motion classes: dominoes and singletons") {
  auto dominoes = group_by_rigid_motion(enumerate_rooted(2, Connectivity::Nearest, 2));
  REQUIRE(dominoes.size() == 1);
  CHECK(dominoes[0].multiplicity == 2);

  auto singles = group_by_rigid_motion(enumerate_rooted(1, Connectivity::Nearest, 2));
  REQUIRE(singles.size() == 1);
  CHECK(singles[0].multiplicity == 1);
}

TEST_CASE("class multiplicities always sum to the catalog size") {
  for (auto conn : {Connectivity::Nearest, Connectivity::Moore}) {
    for (int k = 1; k <= 5; ++k) {
      auto shapes = enumerate_rooted(k, conn, 2);
      int total = 0;
      for (const auto& c : group_by_rigid_motion(shapes)) total += c.multiplicity;
      CHECK(total == static_cast<int>(shapes.size()));

      auto inside = enumerate_containing_origin(k, conn, 2);
      total = 0;
      for (const auto& c : group_anchored_by_rigid_motion(inside)) total += c.multiplicity;
      CHECK(total == static_cast<int>(inside.size()));
    }
  }
}

TEST_CASE("anchored classes keep the anchor fixed") {
  auto pairs = enumerate_containing_origin(2, Connectivity::Nearest, 2);
  auto classes = group_anchored_by_rigid_motion(pairs);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].multiplicity == 4);
  CHECK(classes[0].representative.contains(Site::origin(2)));
}

TEST_CASE("heterogeneous shape lists are rejected") {
  std::vector<SiteSet> bad{shape2({{0, 0}}), shape2({{0, 0}, {1, 0}})};
  CHECK_THROWS_AS(group_by_rigid_motion(bad), std::invalid_argument);
}

TEST_CASE("peak constraint degree counts in-shape neighbors of the anchor") {
  CHECK(peak_constraint_degree(SiteSet({Site::origin(2)}), Site::origin(2),
                               Connectivity::Nearest) == 0);
  CHECK(peak_constraint_degree(shape2({{0, 0}, {1, 0}}), Site{0, 0}, Connectivity::Nearest) ==
        1);
  SiteSet straight({Site{-1}, Site{0}, Site{1}});
  CHECK(peak_constraint_degree(straight, Site{0}, Connectivity::Nearest) == 2);
  CHECK_THROWS_AS(peak_constraint_degree(straight, Site{5}, Connectivity::Nearest),
                  std::invalid_argument);
}

TEST_CASE("shape catalogs cache per-size lists and enforce the cap") {
  ShapeCatalog catalog(Connectivity::Nearest, 2);
  CHECK(catalog.count(4) == 19);
  CHECK(&catalog.rooted(4) == &catalog.rooted(4));  // cached
  CHECK(catalog.containing_origin(3).size() == 3 * catalog.count(3));
  CHECK_THROWS_AS(catalog.rooted(catalog.cap() + 1), std::invalid_argument);
  CHECK_THROWS_AS(catalog.rooted(0), std::invalid_argument);
}

TEST_CASE("RootedShape factory validates its invariants") {
  CHECK_NOTHROW(RootedShape::checked(shape2({{0, 0}, {1, 0}}), Connectivity::Nearest));
  CHECK_THROWS_AS(RootedShape::checked(shape2({{1, 0}, {2, 0}}), Connectivity::Nearest),
                  std::invalid_argument);
  CHECK_THROWS_AS(RootedShape::checked(shape2({{0, 0}, {2, 0}}), Connectivity::Nearest),
                  std::invalid_argument);
}
