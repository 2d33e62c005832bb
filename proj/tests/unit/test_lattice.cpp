#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "csd/lattice.hpp"

using namespace csd;

TEST_CASE("neighbor stencils have the right sizes") {
  for (int d = 1; d <= 3; ++d) {
    CHECK(neighbor_count(Connectivity::Nearest, d) == 2 * d);
    int moore = 1;
    for (int i = 0; i < d; ++i) moore *= 3;
    CHECK(neighbor_count(Connectivity::Moore, d) == moore - 1);
  }
}

TEST_CASE("nearest neighbors of the origin in Z^2") {
  SiteSet n = neighbors(Site::origin(2), Connectivity::Nearest);
  SiteSet expected({Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}});
  CHECK(n == expected);
}

TEST_CASE("Moore neighbors of the origin in Z^2 are the unit max-norm shell") {
  SiteSet n = neighbors(Site::origin(2), Connectivity::Moore);
  CHECK(n.size() == 8);
  for (const auto& s : n) {
    CHECK(std::max(std::abs(s[0]), std::abs(s[1])) == 1);
  }
}

TEST_CASE("1D nearest neighbors") {
  SiteSet n = neighbors(Site::origin(1), Connectivity::Nearest);
  CHECK(n == SiteSet({Site{-1}, Site{1}}));
}

TEST_CASE("lex order follows the first differing coordinate") {
  CHECK(lex_compare(Site{0, 0}, Site{0, 1}) == std::strong_ordering::less);
  CHECK(lex_compare(Site{0, 1}, Site{1, -1}) == std::strong_ordering::less);
  CHECK(lex_compare(Site{1, -1}, Site{1, 0}) == std::strong_ordering::less);
  CHECK(lex_compare(Site{1, 0}, Site{1, 1}) == std::strong_ordering::less);
  CHECK(lex_compare(Site{3, -2}, Site{3, -2}) == std::strong_ordering::equal);
  CHECK_THROWS_AS(lex_compare(Site{1}, Site{1, 2}), std::invalid_argument);
}

TEST_CASE("exterior neighbor sets") {
  SiteSet single({Site::origin(2)});
  CHECK(exterior_neighbors(single, Connectivity::Nearest).size() == 4);
  CHECK(exterior_neighbors(single, Connectivity::Moore).size() == 8);

  SiteSet domino({Site{0, 0}, Site{1, 0}});
  SiteSet shell = exterior_neighbors(domino, Connectivity::Nearest);
  CHECK(shell.size() == 6);  // matches the exponent in w_2 = 2 p^6 q^2
  for (const auto& s : shell) CHECK(!domino.contains(s));

  CHECK_THROWS_WITH_AS(exterior_neighbors(SiteSet{}, Connectivity::Nearest), "empty shape",
                       std::invalid_argument);
}

TEST_CASE("exterior neighbors are neighbors of some member") {
  std::mt19937 gen(7);
  std::uniform_int_distribution<int32_t> coord(-3, 3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Site> sites;
    for (int i = 0; i < 5; ++i) sites.push_back(Site{coord(gen), coord(gen)});
    SiteSet d(std::move(sites));
    for (auto conn : {Connectivity::Nearest, Connectivity::Moore}) {
      SiteSet ext = exterior_neighbors(d, conn);
      for (const auto& s : ext) {
        CHECK(!d.contains(s));
        bool adjacent = false;
        for (const auto& t : d) adjacent = adjacent || neighbors(t, conn).contains(s);
        CHECK(adjacent);
      }
    }
  }
}

TEST_CASE("root_of picks the lex minimum") {
  CHECK(root_of(SiteSet({Site{1, 0}, Site{0, 0}, Site{0, 1}})) == Site{0, 0});
  CHECK(root_of(SiteSet({Site{0, 0}, Site{1, 0}, Site{2, 0}})) == Site{0, 0});
  CHECK(root_of(SiteSet({Site{2, 5}})) == Site{2, 5});
  CHECK_THROWS_AS(root_of(SiteSet{}), std::invalid_argument);
}

TEST_CASE("root translation equivariance") {
  std::mt19937 gen(13);
  std::uniform_int_distribution<int32_t> coord(-4, 4);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Site> sites;
    for (int i = 0; i < 6; ++i) sites.push_back(Site{coord(gen), coord(gen)});
    SiteSet d(std::move(sites));
    Site v{coord(gen), coord(gen)};
    CHECK(root_of(d.translated(v)) == root_of(d) + v);
  }
}

namespace {

ExcursionMask mask_from(const Window& w, const std::vector<Site>& true_sites) {
  std::vector<double> values(static_cast<size_t>(w.site_count()), -1.0);
  for (const auto& s : true_sites) values[static_cast<size_t>(w.index_of(s))] = 1.0;
  return ExcursionMask::from_values(w, values, 0.0);
}

}  // namespace

TEST_CASE("connected components: 1D run") {
  Window w(Site{0}, Site{9});
  auto comps = connected_components(mask_from(w, {Site{3}, Site{4}, Site{5}}),
                                    Connectivity::Nearest);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].size() == 3);
}

TEST_CASE("connected components: diagonal pair splits under nearest only") {
  Window w(Site{-2, -2}, Site{2, 2});
  auto mask = mask_from(w, {Site{0, 0}, Site{1, 1}});
  CHECK(connected_components(mask, Connectivity::Nearest).size() == 2);
  CHECK(connected_components(mask, Connectivity::Moore).size() == 1);
}

TEST_CASE("connected components: empty mask") {
  Window w(Site{0, 0}, Site{3, 3});
  CHECK(connected_components(mask_from(w, {}), Connectivity::Nearest).empty());
}

TEST_CASE("labeling is a partition ordered by lex-smallest member") {
  std::mt19937 gen(23);
  std::bernoulli_distribution above(0.4);
  Window w(Site{-4, -4}, Site{4, 4});
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> values(static_cast<size_t>(w.site_count()));
    for (auto& v : values) v = above(gen) ? 1.0 : -1.0;
    ExcursionMask mask = ExcursionMask::from_values(w, values, 0.0);
    for (auto conn : {Connectivity::Nearest, Connectivity::Moore}) {
      auto comps = connected_components(mask, conn);
      // union equals the true set, pairwise disjoint
      std::set<int64_t> seen;
      size_t total = 0;
      for (const auto& c : comps) {
        CHECK(is_connected(c, conn));
        for (const auto& s : c) {
          CHECK(mask.above[static_cast<size_t>(w.index_of(s))] == 1);
          CHECK(seen.insert(w.index_of(s)).second);
        }
        total += c.size();
      }
      size_t expected = 0;
      for (auto b : mask.above) expected += b;
      CHECK(total == expected);
      // no two distinct components adjacent
      for (size_t i = 0; i < comps.size(); ++i) {
        SiteSet ext = exterior_neighbors(comps[i], conn);
        for (size_t j = 0; j < comps.size(); ++j) {
          if (i == j) continue;
          for (const auto& s : comps[j]) CHECK(!ext.contains(s));
        }
      }
      // sorted by lex-smallest member
      for (size_t i = 1; i < comps.size(); ++i)
        CHECK(LexLess{}(root_of(comps[i - 1]), root_of(comps[i])));
    }
    // Moore components are coarser: each nearest component is inside one Moore component
    auto nearest = connected_components(mask, Connectivity::Nearest);
    auto moore = connected_components(mask, Connectivity::Moore);
    for (const auto& nc : nearest) {
      int container = 0;
      for (const auto& mc : moore) {
        bool all = true;
        for (const auto& s : nc) all = all && mc.contains(s);
        if (all) ++container;
      }
      CHECK(container == 1);
    }
  }
}

TEST_CASE("local maxima: basic examples") {
  Window w(Site{-1}, Site{1});
  std::vector<double> values{0.0, 2.0, 0.0};
  LocalMaxima lm = local_maxima(w, values, 0.5, Connectivity::Nearest);
  REQUIRE(lm.indices.size() == 1);
  CHECK(lm.sites(w)[0] == Site{0});
  CHECK(lm.tie_count == 0);
}

TEST_CASE("local maxima: constant field has only ties") {
  Window w(Site{0}, Site{4});
  std::vector<double> values(5, 1.0);
  LocalMaxima lm = local_maxima(w, values, 0.5, Connectivity::Nearest);
  CHECK(lm.indices.empty());
  CHECK(lm.tie_count == 3);  // the three interior sites
}

TEST_CASE("local maxima: size-2 cluster has exactly one peak") {
  Window w(Site{0}, Site{3});
  std::vector<double> values{0.0, 2.0, 1.9, 0.0};
  LocalMaxima lm = local_maxima(w, values, 0.5, Connectivity::Nearest);
  REQUIRE(lm.indices.size() == 1);
  CHECK(values[static_cast<size_t>(lm.indices[0])] == 2.0);
}

TEST_CASE("local maxima: window without interior sets the flag") {
  Window w(Site{0, 0}, Site{1, 5});
  std::vector<double> values(static_cast<size_t>(w.site_count()), 1.0);
  LocalMaxima lm = local_maxima(w, values, 0.5, Connectivity::Nearest);
  CHECK(lm.no_interior);
  CHECK(lm.indices.empty());
}

TEST_CASE("every interior cluster with distinct values contains a local maximum") {
  std::mt19937 gen(37);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Window w(Site{-5, -5}, Site{5, 5});
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> values(static_cast<size_t>(w.site_count()));
    for (auto& v : values) v = val(gen);
    double u = 0.2;
    ExcursionMask mask = ExcursionMask::from_values(w, values, u);
    for (auto conn : {Connectivity::Nearest, Connectivity::Moore}) {
      LocalMaxima lm = local_maxima(w, values, u, conn);
      std::set<int64_t> peak_set(lm.indices.begin(), lm.indices.end());
      for (const auto& c : connected_components(mask, conn)) {
        bool interior = true;
        for (const auto& s : c) interior = interior && w.is_interior(s);
        if (!interior) continue;
        int peaks = 0;
        for (const auto& s : c) peaks += peak_set.count(w.index_of(s));
        CHECK(peaks >= 1);
      }
    }
  }
}

TEST_CASE("window indexing round-trips and follows lex order") {
  Window w(Site{-2, 3, -1}, Site{1, 5, 2});
  CHECK(w.site_count() == 4 * 3 * 4);
  for (int64_t i = 0; i < w.site_count(); ++i) {
    CHECK(w.index_of(w.site_at(i)) == i);
    if (i > 0) CHECK(LexLess{}(w.site_at(i - 1), w.site_at(i)));
  }
  CHECK_THROWS_AS(Window(Site{1, 0}, Site{0, 5}), std::invalid_argument);
}

TEST_CASE("window centered on the origin") {
  std::vector<int64_t> ext{1500};
  Window w = Window::centered(ext);
  CHECK(w.lo == Site{-750});
  CHECK(w.hi == Site{749});
  CHECK(w.site_count() == 1500);
  CHECK(w.is_interior(Site::origin(1)));
}
