#include "csd/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace csd {

namespace {

using nlohmann::json;

void write_meta(std::ostream& os, const MetaMap& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
}

json site_json(const Site& s) {
  json a = json::array();
  for (int i = 0; i < s.dim(); ++i) a.push_back(s[i]);
  return a;
}

json window_json(const Window& w) {
  return json{{"lo", site_json(w.lo)}, {"hi", site_json(w.hi)}};
}

json table_json(const DistributionTable& t, const MetaMap& meta) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back(json{{"k", r.k},
                        {"w", r.w},
                        {"w_stderr", r.w_stderr},
                        {"mass", r.mass},
                        {"mass_stderr", r.mass_stderr},
                        {"method", r.method}});
  }
  json j{{"u", t.u},
         {"model", t.model},
         {"connectivity", to_string(t.conn)},
         {"dim", t.dim},
         {"peak", t.peak},
         {"mode", to_string(t.mode)},
         {"k_max", t.k_max},
         {"denominator", t.denominator},
         {"denominator_stderr", t.denominator_stderr},
         {"rows", rows}};
  if (t.peak) j["anchor"] = site_json(t.anchor);
  if (!meta.empty()) j["meta"] = meta;
  return j;
}

json counting_json(const CountingResult& r, const MetaMap& meta) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"k", row.k},
                        {"count", row.count},
                        {"estimate", row.estimate},
                        {"stderr", row.std_error}});
  }
  json j{{"estimator", to_string(r.estimator)},
         {"model", r.model},
         {"u", r.u},
         {"connectivity", to_string(r.conn)},
         {"realizations", r.realizations},
         {"window", window_json(r.window)},
         {"policy", to_string(r.policy)},
         {"seed", r.seed},
         {"normalizer_sites", r.normalizer_sites},
         {"boundary_excluded", r.boundary_excluded},
         {"tie_count", r.tie_count},
         {"overflow_clusters", r.overflow_clusters},
         {"overflow_sites", r.overflow_sites},
         {"sum_estimate", r.sum_estimate},
         {"sum_stderr", r.sum_std_error},
         {"rows", rows}};
  if (r.has_subwindow) j["subwindow"] = window_json(r.subwindow);
  if (!meta.empty()) j["meta"] = meta;
  return j;
}

}  // namespace

void write_csv(const DistributionTable& table, std::ostream& os, const MetaMap& meta) {
  write_meta(os, meta);
  os << "# model=" << table.model << " u=" << table.u
     << " conn=" << to_string(table.conn) << " mode=" << to_string(table.mode)
     << " denominator=" << table.denominator << "\n";
  os << "k,w,mass,stderr\n";
  for (const auto& r : table.rows)
    os << r.k << ',' << r.w << ',' << r.mass << ',' << r.w_stderr << "\n";
}

void write_csv(const CountingResult& result, std::ostream& os, const MetaMap& meta) {
  write_meta(os, meta);
  os << "# estimator=" << to_string(result.estimator) << " model=" << result.model
     << " u=" << result.u << " conn=" << to_string(result.conn)
     << " M=" << result.realizations << " seed=" << result.seed << "\n";
  os << "k,count,estimate,stderr\n";
  for (const auto& r : result.rows)
    os << r.k << ',' << r.count << ',' << r.estimate << ',' << r.std_error << "\n";
}

void write_histogram_csv(const DistributionTable& table, std::ostream& os) {
  os << "k,mass\n";
  for (const auto& r : table.rows) os << r.k << ',' << r.mass << "\n";
}

std::string to_json_string(const DistributionTable& table, const MetaMap& meta) {
  return table_json(table, meta).dump(2);
}

std::string to_json_string(const CountingResult& result, const MetaMap& meta) {
  return counting_json(result, meta).dump(2);
}

std::string labeling_to_json(const Labeling& labeling) {
  std::vector<json> clusters(labeling.clusters.size(), json::array());
  for (int64_t idx = 0; idx < labeling.window.site_count(); ++idx) {
    int32_t id = labeling.label[static_cast<size_t>(idx)];
    if (id >= 0) clusters[static_cast<size_t>(id)].push_back(site_json(labeling.window.site_at(idx)));
  }
  json j{{"window", window_json(labeling.window)},
         {"connectivity", to_string(labeling.conn)},
         {"clusters", clusters}};
  return j.dump(2);
}

void write_realization(const Realization& realization, const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("write_realization: cannot open " + path);
  bin.write(reinterpret_cast<const char*>(realization.values.data()),
            static_cast<std::streamsize>(realization.values.size() * sizeof(double)));
  bin.close();

  json extents = json::array();
  for (int i = 0; i < realization.window.dim(); ++i)
    extents.push_back(realization.window.extent(i));
  json sidecar{{"format", "float64-le"},
               {"order", "row-major"},
               {"window", window_json(realization.window)},
               {"extents", extents},
               {"model", realization.model},
               {"seed", realization.seed},
               {"index", realization.index}};
  std::ofstream meta(path + ".json");
  if (!meta) throw std::runtime_error("write_realization: cannot open " + path + ".json");
  meta << sidecar.dump(2) << "\n";
}

}  // namespace csd
