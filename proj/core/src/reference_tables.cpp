#include "csd/reference_tables.hpp"

#include <limits>
#include <stdexcept>

namespace csd::reference {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<Table> build() {
  std::vector<Table> tables;

  // 1: Gaussian white noise on Z
  tables.push_back(Table{
      1, "wn-1d", "Gaussian white noise process on Z", "wn1d", Connectivity::Nearest, 1,
      10000, 1500, false, true,
      {Block{0.5,
             {{1, .14755, .14752, .14800, .14752},
              {2, .04553, .04551, .04550, .04551},
              {3, .01402, .01404, .01870, .01404},
              {4, .00433, .00433, .00723, .00433},
              {5, .00134, .00134, .00269, .00134},
              {6, .00041, .00041, .00096, .00041}},
             .21337, .21334, .22300, .21334},
       Block{1.5,
             {{1, .05820, .05818, .05823, .05818},
              {2, .00390, .00389, .00390, .00389},
              {3, .00026, .00026, .00035, .00026},
              {4, .00002, .00002, .00003, .00002}},
             .06240, .06234, .06251, .06234}}});

  // 2: stationary Gaussian process on Z, C(t,s) = exp(-(t-s)^2)
  tables.push_back(Table{
      2, "sq-exp-1d", "Gaussian process on Z with squared-exponential covariance", "sq-exp-1d",
      Connectivity::Nearest, 1, 10000, 1500, false, false,
      {Block{0.5,
             {{1, .08370, .08380, .08370, .08380},
              {2, .04620, .04620, .04620, .04630},
              {3, .01950, .01940, .02320, .02320},
              {4, .00865, .00866, .01310, .01320},
              {5, .00381, .00379, .00696, .00695},
              {6, .00168, .00168, .00359, .00361}},
             .16500, .16500, .18000, .18000},
       Block{1.5,
             {{1, .04210, .04210, .04210, .04210},
              {2, .00947, .00948, .00947, .00949},
              {3, .00149, .00148, .00181, .00181},
              {4, .00026, .00026, .00040, .00040}},
             .05340, .05340, .05390, .05390}}});

  // 3: nonstationary Y_t = X_t + cos(pi t), peak-based at t = 0
  tables.push_back(Table{
      3, "cos-nonstat-1d", "Nonstationary Gaussian with cosine mean, peaks at t=0",
      "cos-nonstat-1d", Connectivity::Nearest, 1, 10000, 1500, true, false,
      {Block{0.5,
             {{1, kNan, kNan, .57400, .57600},
              {2, kNan, kNan, .01050, .01050},
              {3, kNan, kNan, .07930, .07940},
              {4, kNan, kNan, .00150, .00148},
              {5, kNan, kNan, .00874, .00854}},
             kNan, kNan, .67600, .67700},
       Block{1.5,
             {{1, kNan, kNan, .30000, .30000},
              {2, kNan, kNan, .00232, .00230},
              {3, kNan, kNan, .00493, .00488},
              {4, kNan, kNan, .00004, .00003},
              {5, kNan, kNan, .00006, .00004}},
             kNan, kNan, .30700, .30700}}});

  // 4: 2D Gaussian field, squared-exponential kernel, nearest neighbors
  tables.push_back(Table{
      4, "sq-exp-2d-nearest", "Gaussian field on Z^2, nearest neighbors", "sq-exp-2d",
      Connectivity::Nearest, 2, 2000, 300, false, false,
      {Block{0.5,
             {{1, .02463, .02460, .02463, .02469},
              {2, .00974, .00971, .00974, .00976},
              {3, .00592, .00588, .00723, .00731},
              {4, .00414, .00410, .00596, .00603},
              {5, .00304, .00299, .00506, .00511},
              {6, .00233, .00229, .00437, .00451},
              {7, .00161, .00181, .00398, .00400},
              {8, .00160, .00146, .00359, .00360},
              {9, .00110, .00121, .00322, .00329},
              {10, .00085, .00100, .00298, .00301}},
             .06254, .06230, .11188, .11203},
       Block{1.5,
             {{1, .02686, .02647, .02686, .02689},
              {2, .00800, .00785, .00800, .00802},
              {3, .00325, .00317, .00401, .00401},
              {4, .00148, .00144, .00216, .00216},
              {5, .00069, .00067, .00118, .00117},
              {6, .00034, .00033, .00066, .00066},
              {7, .00014, .00016, .00037, .00036},
              {8, .00010, .00008, .00021, .00020},
              {9, .00008, .00004, .00012, .00012}},
             .04099, .04024, .04374, .04375}}});

  // 5: same field under Moore neighbors
  tables.push_back(Table{
      5, "sq-exp-2d-moore", "Gaussian field on Z^2, Moore neighbors", "sq-exp-2d",
      Connectivity::Moore, 2, 2000, 300, false, false,
      {Block{0.5,
             {{1, .01053, .01053, .01052, .01053},
              {2, .00509, .00511, .00509, .00511},
              {3, .00307, .00310, .00342, .00345},
              {4, .00219, .00222, .00277, .00280},
              {5, .00162, .00165, .00233, .00237},
              {6, .00127, .00130, .00205, .00229},
              {7, .00103, .00086, .00186, .00190},
              {8, .00085, .00073, .00170, .00175},
              {9, .00072, .00054, .00157, .00161},
              {10, .00062, .00059, .00146, .00153}},
             .03371, .03381, .07389, .07822},
       Block{1.5,
             {{1, .02095, .02100, .02095, .02090},
              {2, .00788, .00785, .00788, .00790},
              {3, .00350, .00346, .00393, .00392},
              {4, .00175, .00173, .00226, .00224},
              {5, .00090, .00089, .00134, .00132},
              {6, .00033, .00048, .00081, .00081},
              {7, .00026, .00026, .00049, .00051},
              {8, .00018, .00015, .00032, .00031},
              {9, .00007, .00008, .00020, .00019},
              {10, .00005, .00005, .00012, .00012}},
             .03590, .03600, .03850, .03850}}});

  // 6: standardized chi-squared field, Moore neighbors
  tables.push_back(Table{
      6, "chisq-2d-moore", "Standardized chi-squared field on Z^2, Moore neighbors",
      "chisq-2d", Connectivity::Moore, 2, 2000, 300, false, false,
      {Block{0.5,
             {{1, .02497, .02445, .02497, .02445},
              {2, .01119, .01100, .01113, .01100},
              {3, .00613, .00625, .00755, .00735},
              {4, .00423, .00413, .00592, .00577},
              {5, .00322, .00289, .00487, .00471},
              {6, .00207, .00212, .00410, .00397},
              {7, .00169, .00160, .00353, .00339},
              {8, .00135, .00124, .00307, .00293},
              {9, .00119, .00098, .00270, .00255},
              {10, .00094, .00078, .00235, .00223}},
             .06141, .05940, .08962, .08638},
       Block{1.5,
             {{1, .03164, .03110, .03164, .03110},
              {2, .01037, .01000, .01057, .01000},
              {3, .00373, .00397, .00477, .00464},
              {4, .00193, .00178, .00254, .00247},
              {5, .00094, .00083, .00138, .00135},
              {6, .00050, .00041, .00080, .00075},
              {7, .00019, .00020, .00044, .00042},
              {8, .00009, .00010, .00025, .00024},
              {9, .00003, .00005, .00014, .00014},
              {10, .00004, .00003, .00009, .00008}},
             .04950, .04850, .05274, .05130}}});

  // 7: Gaussian white noise on Z^2 under Moore neighbors (closed forms apply)
  tables.push_back(Table{
      7, "wn-2d-moore", "Gaussian white noise field on Z^2, Moore neighbors", "wn2d",
      Connectivity::Moore, 2, 2000, 300, false, false,
      {Block{0.5,
             {{1, .01610, .01610, .01612, .01610},
              {2, .00703, .00703, .00703, .00704},
              {3, .00407, .00409, .00496, .00499},
              {4, .00274, .00275, .00404, .00407},
              {5, .00199, .00200, .00347, .00349},
              {6, .00152, .00153, .00306, .00308},
              {7, .00121, .00122, .00278, .00279},
              {8, .00114, .00098, .00253, .00252},
              {9, .00094, .00082, .00234, .00231},
              {10, .00076, .00070, .00214, .00216}},
             .04446, .04432, .10502, .10707},
       Block{1.5,
             {{1, .03840, .03850, .03842, .03850},
              {2, .00836, .00837, .00836, .00837},
              {3, .00231, .00232, .00290, .00291},
              {4, .00071, .00070, .00109, .00109},
              {5, .00023, .00023, .00042, .00042},
              {6, .00008, .00008, .00016, .00016},
              {7, .00003, .00003, .00006, .00007},
              {8, .00000, .00001, .00003, .00002},
              {9, .00000, .00000, .00001, .00001},
              {10, .00000, .00000, .00001, .00000}},
             .05013, .05018, .05148, .05152}}});

  return tables;
}

}  // namespace

const std::vector<Table>& reference_tables() {
  static const std::vector<Table> tables = build();
  return tables;
}

const Table& reference_table(int id) {
  for (const auto& t : reference_tables())
    if (t.id == id) return t;
  throw std::invalid_argument("unknown reference table id: " + std::to_string(id));
}

const Table* find_reference_table(const std::string& key) {
  for (const auto& t : reference_tables())
    if (t.key == key) return &t;
  return nullptr;
}

}  // namespace csd::reference
