#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "csd/io.hpp"

namespace csd::cli {

struct ReportRow {
  std::string quantity;  // "w" or "w-peak"
  std::string k_label;   // "1".."10" or "sum"
  double theory, theory_se;
  double empirical, empirical_se;
  double ref_theory, ref_empirical;
  double gap;
  double tolerance;
  bool gated;
  bool pass;
  std::string note;

  ReportRow();
};

struct ComparisonReport {
  std::string title;
  MetaMap meta;
  std::vector<ReportRow> rows;

  bool all_pass() const;
  size_t failures() const;
};

void print_report(const ComparisonReport& report, std::ostream& os);
void write_report_csv(const ComparisonReport& report, std::ostream& os);
std::string report_json(const ComparisonReport& report);

}  // namespace csd::cli
