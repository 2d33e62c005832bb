#include "report.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace csd::cli {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void put(std::ostream& os, double v) {
  if (std::isnan(v)) os << "-";
  else os << std::fixed << std::setprecision(5) << v;
}
}  // namespace

ReportRow::ReportRow()
    : theory(kNan), theory_se(0.0), empirical(kNan), empirical_se(0.0), ref_theory(kNan),
      ref_empirical(kNan), gap(kNan), tolerance(0.0), gated(false), pass(true) {}

bool ComparisonReport::all_pass() const { return failures() == 0; }

size_t ComparisonReport::failures() const {
  size_t n = 0;
  for (const auto& r : rows)
    if (r.gated && !r.pass) ++n;
  return n;
}

void print_report(const ComparisonReport& report, std::ostream& os) {
  os << report.title << "\n";
  os << std::left << std::setw(8) << "qty" << std::setw(5) << "k" << std::setw(10) << "theory"
     << std::setw(10) << "emp" << std::setw(11) << "emp-se" << std::setw(10) << "ref-th"
     << std::setw(10) << "ref-emp" << std::setw(10) << "gap" << std::setw(9) << "tol"
     << "status\n";
  for (const auto& r : report.rows) {
    os << std::left << std::setw(8) << r.quantity << std::setw(5) << r.k_label;
    os << std::setw(10);
    put(os, r.theory);
    os << std::setw(10);
    put(os, r.empirical);
    os << std::setw(11) << std::scientific << std::setprecision(1) << r.empirical_se
       << std::fixed;
    os << std::setw(10);
    put(os, r.ref_theory);
    os << std::setw(10);
    put(os, r.ref_empirical);
    os << std::setw(10);
    put(os, r.gap);
    os << std::setw(9) << std::setprecision(4) << r.tolerance;
    if (!r.gated) os << "info";
    else os << (r.pass ? "pass" : "FAIL");
    if (!r.note.empty()) os << "  (" << r.note << ")";
    os << "\n";
  }
  os << (report.all_pass() ? "ALL PASS" : "FAILURES: " + std::to_string(report.failures()))
     << "\n";
}

void write_report_csv(const ComparisonReport& report, std::ostream& os) {
  for (const auto& [k, v] : report.meta) os << "# " << k << "=" << v << "\n";
  os << "quantity,k,theory,theory_stderr,empirical,empirical_stderr,ref_theory,ref_empirical,"
        "gap,tolerance,gated,pass,note\n";
  for (const auto& r : report.rows) {
    os << r.quantity << ',' << r.k_label << ',' << r.theory << ',' << r.theory_se << ','
       << r.empirical << ',' << r.empirical_se << ',' << r.ref_theory << ',' << r.ref_empirical
       << ',' << r.gap << ',' << r.tolerance << ',' << (r.gated ? 1 : 0) << ','
       << (r.pass ? 1 : 0) << ',' << r.note << "\n";
  }
}

std::string report_json(const ComparisonReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  auto num = [](double v) {
    return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
  };
  for (const auto& r : report.rows) {
    rows.push_back({{"quantity", r.quantity},
                    {"k", r.k_label},
                    {"theory", num(r.theory)},
                    {"theory_stderr", r.theory_se},
                    {"empirical", num(r.empirical)},
                    {"empirical_stderr", r.empirical_se},
                    {"ref_theory", num(r.ref_theory)},
                    {"ref_empirical", num(r.ref_empirical)},
                    {"gap", num(r.gap)},
                    {"tolerance", r.tolerance},
                    {"gated", r.gated},
                    {"pass", r.pass},
                    {"note", r.note}});
  }
  nlohmann::json j{{"title", report.title},
                   {"meta", report.meta},
                   {"rows", rows},
                   {"all_pass", report.all_pass()}};
  return j.dump(2);
}

}  // namespace csd::cli
