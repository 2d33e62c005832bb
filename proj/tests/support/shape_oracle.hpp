#pragma once

// Test-only brute-force shape enumerator, independent of the Redelmeier path:
// grows every rooted (k-1)-shape by one allowed cell and deduplicates, which
// reaches each rooted k-shape because every connected set has a removable
// non-root cell.

#include <set>
#include <vector>

#include "csd/lattice.hpp"

namespace csd::testing {

inline std::vector<std::vector<int32_t>> key_of(const SiteSet& s) {
  std::vector<std::vector<int32_t>> key;
  for (const auto& site : s) {
    std::vector<int32_t> c;
    for (int i = 0; i < s.dim(); ++i) c.push_back(site[i]);
    key.push_back(std::move(c));
  }
  return key;
}

inline std::vector<SiteSet> brute_force_rooted(int k, Connectivity conn, int dim) {
  Site o = Site::origin(dim);
  std::vector<SiteSet> level{SiteSet({o})};
  for (int size = 2; size <= k; ++size) {
    std::set<std::vector<std::vector<int32_t>>> seen;
    std::vector<SiteSet> next;
    for (const auto& shape : level) {
      for (const auto& t : shape) {
        for (const auto& off : neighbor_offsets(conn, dim)) {
          Site cand = t + off;
          if (shape.contains(cand)) continue;
          if (!LexLess{}(o, cand)) continue;  // keep the origin as the lex minimum
          std::vector<Site> grown(shape.begin(), shape.end());
          grown.push_back(cand);
          SiteSet g(std::move(grown));
          if (seen.insert(key_of(g)).second) next.push_back(std::move(g));
        }
      }
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace csd::testing
