#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lu25d/cost_model.hpp"
#include "lu25d/error.hpp"
#include "lu25d/harness.hpp"

namespace lu25d {

enum class ReportFormat { Csv, Json };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw InvalidArgument("unknown report format '" + std::string(s) + "'");
}

inline constexpr std::string_view kReportCsvHeader =
    "grid,n,v,seed,phase,measured_words,eq1_sum,eq3_corrected,lemma8_claim,remaining_bound,"
    "ratio_measured_over_eq1,ratio_measured_over_eq3";

/// Rows of one report: each selected phase, then "panel-reduction" (A10 + A01)
/// and "total".
struct ReportRow {
  std::string phase;
  Words measured = 0;
};

inline std::vector<ReportRow> report_rows(const PhaseCostReport& r,
                                          const std::vector<Phase>& phases) {
  std::vector<ReportRow> rows;
  for (Phase p : phases) rows.push_back({std::string(to_string(p)), r.measured(p)});
  rows.push_back({"panel-reduction", r.panel_reduction});
  rows.push_back({"total", r.total});
  return rows;
}

namespace detail {

// Zero predictions (e.g. n == v) give a ratio of 0 rather than a non-finite value.
inline double ratio(Words measured, double predicted) {
  return predicted > 0.0 ? static_cast<double>(measured) / predicted : 0.0;
}

}  // namespace detail

inline void write_report_csv(std::ostream& os, const std::vector<PhaseCostReport>& reports,
                             const std::vector<Phase>& phases = {kAllPhases.begin(),
                                                                 kAllPhases.end()}) {
  using detail::format_number;
  os << kReportCsvHeader << '\n';
  for (const auto& r : reports) {
    for (const auto& row : report_rows(r, phases)) {
      os << r.grid.to_string() << ',' << r.n << ',' << r.v << ',' << r.seed << ',' << row.phase
         << ',' << row.measured << ',' << format_number(r.predicted.eq1_sum) << ','
         << format_number(r.predicted.eq3_corrected) << ','
         << format_number(r.predicted.lemma8_claim) << ','
         << format_number(r.predicted.remaining_bound) << ','
         << format_number(detail::ratio(row.measured, r.predicted.eq1_sum)) << ','
         << format_number(detail::ratio(row.measured, r.predicted.eq3_corrected)) << '\n';
    }
  }
}

inline nlohmann::json report_json(const std::vector<PhaseCostReport>& reports,
                                  const std::vector<Phase>& phases = {kAllPhases.begin(),
                                                                      kAllPhases.end()},
                                  const std::vector<GridEntry>& skipped = {}) {
  nlohmann::json out;
  out["reports"] = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["grid"] = r.grid.to_string();
    j["n"] = r.n;
    j["v"] = r.v;
    j["seed"] = r.seed;
    j["eq1_sum"] = r.predicted.eq1_sum;
    j["eq3_corrected"] = r.predicted.eq3_corrected;
    j["lemma8_claim"] = r.predicted.lemma8_claim;
    j["remaining_bound"] = r.predicted.remaining_bound;
    j["residual"] = r.residual;
    j["phases"] = nlohmann::json::array();
    for (const auto& row : report_rows(r, phases)) {
      j["phases"].push_back({{"phase", row.phase},
                             {"measured_words", row.measured},
                             {"ratio_measured_over_eq1",
                              detail::ratio(row.measured, r.predicted.eq1_sum)},
                             {"ratio_measured_over_eq3",
                              detail::ratio(row.measured, r.predicted.eq3_corrected)}});
    }
    j["pivot_histogram"] = r.pivots.histogram;
    j["pivot_chi_square"] = r.pivots.chi_square;
    out["reports"].push_back(std::move(j));
  }
  out["skipped"] = nlohmann::json::array();
  for (const auto& s : skipped) out["skipped"].push_back({{"grid", s.label}, {"error", s.error}});
  return out;
}

inline void write_report_json(std::ostream& os, const std::vector<PhaseCostReport>& reports,
                              const std::vector<Phase>& phases = {kAllPhases.begin(),
                                                                  kAllPhases.end()},
                              const std::vector<GridEntry>& skipped = {}) {
  os << report_json(reports, phases, skipped).dump(2) << '\n';
}

inline void emit_report(const std::string& path, ReportFormat format,
                        const std::vector<PhaseCostReport>& reports,
                        const std::vector<Phase>& phases = {kAllPhases.begin(), kAllPhases.end()},
                        const std::vector<GridEntry>& skipped = {}) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  if (format == ReportFormat::Csv) {
    write_report_csv(os, reports, phases);
  } else {
    write_report_json(os, reports, phases, skipped);
  }
  os.flush();
  if (!os) throw Error("failed writing '" + path + "'");
}

}  // namespace lu25d
