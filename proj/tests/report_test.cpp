#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lu25d/report.hpp"

using namespace lu25d;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

PhaseCostReport sample_report(std::uint64_t seed = 2) {
  return simulate_report(32, 4, GridConfig(2, 2, 2), seed, Collective::Rsag);
}

}  // namespace

TEST(ReportCsv, EmptyTableIsHeaderOnly) {
  std::ostringstream os;
  write_report_csv(os, {});
  EXPECT_EQ(os.str(),
            "grid,n,v,seed,phase,measured_words,eq1_sum,eq3_corrected,lemma8_claim,"
            "remaining_bound,ratio_measured_over_eq1,ratio_measured_over_eq3\n");
}

TEST(ReportCsv, OneRowPerPhasePlusSummaries) {
  const auto r = sample_report();
  std::ostringstream os;
  write_report_csv(os, {r});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(split(line, ','));
  ASSERT_EQ(rows.size(), kAllPhases.size() + 2);
  EXPECT_EQ(rows[0][0], "2x2x2");
  EXPECT_EQ(rows[0][4], "panel-reduce-A10");
  EXPECT_EQ(rows[kAllPhases.size()][4], "panel-reduction");
  EXPECT_EQ(rows.back()[4], "total");
  EXPECT_EQ(std::stoull(rows.back()[5]), r.total);
  for (const auto& row : rows) {
    ASSERT_EQ(row.size(), 12u);
    const double measured = std::stod(row[5]);
    EXPECT_NEAR(std::stod(row[10]), measured / r.predicted.eq1_sum, 1e-12 * (1 + measured));
  }
}

TEST(ReportCsv, PhaseSelection) {
  std::ostringstream os;
  write_report_csv(os, {sample_report()}, {Phase::SchurUpdate});
  const std::string s = os.str();
  EXPECT_NE(s.find(",schur-update,"), std::string::npos);
  EXPECT_EQ(s.find(",trsm,"), std::string::npos);
}

TEST(ReportJson, CarriesTheSameValuesAsCsv) {
  const auto r = sample_report();
  const auto j = report_json({r});
  ASSERT_EQ(j["reports"].size(), 1u);
  const auto& jr = j["reports"][0];
  EXPECT_EQ(jr["grid"], "2x2x2");
  EXPECT_EQ(jr["eq1_sum"].get<double>(), r.predicted.eq1_sum);

  std::ostringstream os;
  write_report_csv(os, {r});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  std::size_t i = 0;
  while (std::getline(in, line)) {
    const auto row = split(line, ',');
    const auto& phase = jr["phases"][i++];
    EXPECT_EQ(phase["phase"], row[4]);
    EXPECT_EQ(phase["measured_words"].get<Words>(), std::stoull(row[5]));
    EXPECT_EQ(phase["ratio_measured_over_eq3"].get<double>(), std::stod(row[11]));
  }
  EXPECT_EQ(i, jr["phases"].size());
  std::size_t hist = 0;
  for (const auto& h : jr["pivot_histogram"]) hist += h.get<std::size_t>();
  EXPECT_EQ(hist, 32u);
}

TEST(EmitReport, BitIdenticalAcrossRuns) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "lu25d_report_a.json").string();
  const auto b = (dir / "lu25d_report_b.json").string();
  emit_report(a, ReportFormat::Json, {sample_report(7)});
  emit_report(b, ReportFormat::Json, {sample_report(7)});
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(sa.str().empty());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(EmitReport, UnwritableDestination) {
  EXPECT_THROW(emit_report("/nonexistent-dir/x.csv", ReportFormat::Csv, {}), Error);
}

TEST(ReportFormat, Parse) {
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::Csv);
  EXPECT_EQ(parse_report_format("json"), ReportFormat::Json);
  EXPECT_THROW(parse_report_format("xml"), InvalidArgument);
}
