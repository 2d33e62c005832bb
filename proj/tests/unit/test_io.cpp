#include <doctest.h>
#include <stdexcept>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csd/io.hpp"
#include "csd/theory.hpp"

using namespace csd;

namespace {

DistributionTable sample_table() {
  return cluster_size_distribution(0.5, FieldModel::white_noise(1), Connectivity::Nearest, 1, 3,
                                   NormalizationMode::ExactDenominator);
}

}  // namespace

TEST_CASE("distribution tables serialize to the k,w,mass,stderr layout") {
  std::ostringstream os;
  write_csv(sample_table(), os, {{"seed", "42"}});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# seed=42");
  std::getline(is, line);  // model comment
  std::getline(is, line);
  CHECK(line == "k,w,mass,stderr");
  int rows = 0;
  while (std::getline(is, line)) {
    int k;
    double w, mass, se;
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &k, &w, &mass, &se) == 4);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("distribution JSON carries the metadata") {
  auto j = nlohmann::json::parse(to_json_string(sample_table(), {{"cmd", "theory"}}));
  CHECK(j["model"] == "white-noise-normal-1d");
  CHECK(j["mode"] == "exact-denominator");
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][0]["k"] == 1);
  CHECK(j["meta"]["cmd"] == "theory");
  CHECK(j["denominator"].get<double>() > 0.0);
}

TEST_CASE("histogram output is k,mass pairs") {
  std::ostringstream os;
  write_histogram_csv(sample_table(), os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,mass");
  std::getline(is, line);
  CHECK(line.rfind("1,", 0) == 0);
}

TEST_CASE("counting results serialize with their provenance") {
  Window w = Window::centered(std::vector<int64_t>{100});
  CountingResult res = empirical_wk(FieldModel::white_noise(1), 10, w, 0.5,
                                    Connectivity::Nearest, BoundaryPolicy::IncludeAll, 77);
  auto j = nlohmann::json::parse(to_json_string(res));
  CHECK(j["estimator"] == "direct");
  CHECK(j["seed"] == 77);
  CHECK(j["realizations"] == 10);
  CHECK(j["policy"] == "include-all");

  std::ostringstream os;
  write_csv(res, os);
  CHECK(os.str().find("k,count,estimate,stderr") != std::string::npos);
}

TEST_CASE("labeling export lists clusters as site arrays") {
  Window w(Site{0, 0}, Site{2, 2});
  std::vector<double> values(9, -1.0);
  values[static_cast<size_t>(w.index_of(Site{0, 0}))] = 1.0;
  values[static_cast<size_t>(w.index_of(Site{1, 1}))] = 1.0;
  ExcursionMask mask = ExcursionMask::from_values(w, values, 0.0);
  auto j = nlohmann::json::parse(labeling_to_json(label_clusters(mask, Connectivity::Moore)));
  CHECK(j["connectivity"] == "moore");
  CHECK(j["window"]["lo"] == nlohmann::json::array({0, 0}));
  REQUIRE(j["clusters"].size() == 1);
  CHECK(j["clusters"][0].size() == 2);
}

TEST_CASE("realizations round-trip through the binary dump") {
  Window w = Window::centered(std::vector<int64_t>{8, 8});
  Realization r = simulate(FieldModel::white_noise(2), w, 123);
  std::string path = "test_realization.f64";
  write_realization(r, path);

  std::ifstream bin(path, std::ios::binary);
  REQUIRE(bin.good());
  std::vector<double> back(r.values.size());
  bin.read(reinterpret_cast<char*>(back.data()),
           static_cast<std::streamsize>(back.size() * sizeof(double)));
  CHECK(back == r.values);

  std::ifstream meta(path + ".json");
  REQUIRE(meta.good());
  nlohmann::json sidecar;
  meta >> sidecar;
  CHECK(sidecar["format"] == "float64-le");
  CHECK(sidecar["seed"] == 123);
  CHECK(sidecar["extents"] == nlohmann::json::array({8, 8}));
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}
