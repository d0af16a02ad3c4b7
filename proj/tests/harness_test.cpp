#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "lu25d/harness.hpp"

using namespace lu25d;

TEST(FitExponent, GeometricSequences) {
  auto f = fit_exponent({{4, 100}, {16, 50}, {64, 25}});
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(200.0), 1e-12);
  EXPECT_NEAR(fit_exponent({{8, 100}, {27, 100}, {64, 100}}).slope, 0.0, 1e-12);
  EXPECT_NEAR(fit_exponent({{4, 100}, {16, 25}, {64, 6.25}}).slope, -1.0, 1e-12);
}

TEST(FitExponent, NoisyDataHasR2BelowOne) {
  const auto f = fit_exponent({{2, 10}, {4, 4}, {8, 3}, {16, 1}});
  EXPECT_LT(f.r2, 1.0);
  EXPECT_GT(f.r2, 0.0);
  EXPECT_EQ(f.points.size(), 4u);
}

TEST(FitExponent, Errors) {
  EXPECT_THROW(fit_exponent({{4, 1}, {16, 2}}), InvalidArgument);
  EXPECT_THROW(fit_exponent({{4, 1}, {16, 0}, {64, 2}}), InvalidArgument);
  EXPECT_THROW(fit_exponent({{4, 1}, {4, 2}, {4, 3}}), InvalidArgument);
}

TEST(PivotUniformity, SingleProcessor) {
  const auto r = run(EngineConfig{32, 4, GridConfig(1, 1, 1), 1}, random_matrix(32, 1));
  const auto s = pivot_uniformity(r);
  ASSERT_EQ(s.histogram.size(), 1u);
  EXPECT_EQ(s.histogram[0], 32u);
  EXPECT_EQ(s.chi_square, 0.0);
}

TEST(PivotUniformity, HistogramSumsToNAndStatisticIsFinite) {
  for (auto g : {GridConfig(4, 4, 1), GridConfig(2, 2, 2), GridConfig(2, 4, 1)}) {
    const auto r = run(EngineConfig{128, 4, g, 3}, random_matrix(128, 3));
    const auto s = pivot_uniformity(r);
    EXPECT_EQ(s.histogram.size(), g.p1());
    std::size_t total = 0;
    for (auto h : s.histogram) total += h;
    EXPECT_EQ(total, 128u);
    EXPECT_TRUE(std::isfinite(s.chi_square));
    EXPECT_GE(s.chi_square, 0.0);
  }
}

TEST(PivotUniformity, ChiSquareOracle) {
  FactorizationRun run;
  run.config.grid = GridConfig(2, 1, 1);
  run.pivot_owner_counts = {6, 2};
  // expected 4 per bin: (2^2 + 2^2) / 4 = 2
  EXPECT_DOUBLE_EQ(pivot_uniformity(run).chi_square, 2.0);
}

TEST(SweepSpec, ParsesGridsPresetsAndCounts) {
  const auto spec = parse_sweep_spec(nlohmann::json::parse(R"({
    "n": 64, "v": 4, "grids": ["2x2x1", "cube:8", "3x3x1", "flat:8"],
    "processor_counts": [16], "seeds": [5, 6], "phases": ["trsm"], "collective": "binomial"
  })"));
  EXPECT_EQ(spec.n, 64u);
  ASSERT_EQ(spec.grids.size(), 5u);
  EXPECT_TRUE(spec.grids[0].grid.has_value());
  EXPECT_EQ(spec.grids[1].grid, std::optional<GridConfig>(GridConfig(2, 2, 2)));
  EXPECT_FALSE(spec.grids[2].grid.has_value());  // 64 not divisible by 4*3
  EXPECT_FALSE(spec.grids[3].grid.has_value());  // 8 is not a square
  EXPECT_FALSE(spec.grids[2].error.empty());
  EXPECT_EQ(spec.grids[4].label, "flat:16");  // 16 admits no two-layer or cube grid
  EXPECT_EQ(spec.seeds, (std::vector<std::uint64_t>{5, 6}));
  EXPECT_EQ(spec.phases, std::vector<Phase>{Phase::Trsm});
  EXPECT_EQ(spec.collective, Collective::Binomial);
}

TEST(SweepSpec, PresetLabels) {
  EXPECT_EQ(preset_labels(64), (std::vector<std::string>{"flat:64", "cube:64"}));
  EXPECT_EQ(preset_labels(8), (std::vector<std::string>{"two-layer:8", "cube:8"}));
  EXPECT_TRUE(preset_labels(7).empty());
}

TEST(SweepSpec, Malformed) {
  EXPECT_THROW(parse_sweep_spec(nlohmann::json::parse(R"({"v": 4, "grids": ["1x1x1"]})")),
               InvalidArgument);
  EXPECT_THROW(parse_sweep_spec(nlohmann::json::parse(R"({"n": 8, "v": 4})")), InvalidArgument);
  EXPECT_THROW(parse_sweep_spec(nlohmann::json::parse(R"({"n": 8, "v": 4, "grids": ["1x1x1"], "phases": ["x"]})")),
               InvalidArgument);
  std::istringstream not_json("{ n: ");
  EXPECT_THROW(read_sweep_spec(not_json), InvalidArgument);
}

TEST(RunSweep, OneProcessorReportsZeroTraffic) {
  SweepSpec spec;
  spec.n = 32;
  spec.v = 4;
  spec.grids = {resolve_grid("1x1x1", 32, 4)};
  const auto result = run_sweep(spec);
  ASSERT_EQ(result.reports.size(), 1u);
  for (Phase p : kAllPhases) EXPECT_EQ(result.reports[0].measured(p), 0u);
}

TEST(RunSweep, TwoGridsAndInvalidEntriesListed) {
  SweepSpec spec;
  spec.n = 64;
  spec.v = 4;
  spec.seeds = {1, 2};
  for (const char* g : {"2x2x1", "2x2x2", "3x3x1"}) spec.grids.push_back(resolve_grid(g, 64, 4));
  const auto result = run_sweep(spec);
  ASSERT_EQ(result.reports.size(), 4u);
  ASSERT_EQ(result.skipped.size(), 1u);
  EXPECT_EQ(result.skipped[0].label, "3x3x1");
  EXPECT_EQ(result.reports[0].grid, GridConfig(2, 2, 1));
  EXPECT_EQ(result.reports[1].seed, 2u);
  EXPECT_EQ(result.reports[2].grid, GridConfig(2, 2, 2));
  EXPECT_GT(result.reports[2].measured(Phase::PanelReduceA10), 0u);
  for (const auto& r : result.reports) EXPECT_LE(r.residual, 1e-10);
}

TEST(RunSweep, Deterministic) {
  SweepSpec spec;
  spec.n = 48;
  spec.v = 4;
  spec.seeds = {3, 4};
  for (const char* g : {"2x2x1", "2x2x2", "cube:27"}) spec.grids.push_back(resolve_grid(g, 48, 4));
  const auto a = run_sweep(spec), b = run_sweep(spec);
  ASSERT_EQ(a.reports.size(), b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_EQ(a.reports[i].phase_totals, b.reports[i].phase_totals);
    EXPECT_EQ(a.reports[i].pivots.histogram, b.reports[i].pivots.histogram);
    EXPECT_EQ(a.reports[i].residual, b.reports[i].residual);
  }
}

TEST(Predictions, MatchCostModel) {
  const auto m = predictions_for(64, 4, GridConfig(4, 4, 4));
  const auto params = make_params(64, 4, 4, 64);
  EXPECT_DOUBLE_EQ(m.eq1_sum, eq1_total(params));
  EXPECT_DOUBLE_EQ(m.eq3_corrected, eq3_cumulative(params).summed);
  EXPECT_DOUBLE_EQ(m.lemma8_claim, lemma8_claim(params));
  EXPECT_DOUBLE_EQ(m.remaining_bound, remaining_steps_bound(64, 64).value);
}

TEST(Band, CubeGridsStayInside) {
  for (auto g : {GridConfig(2, 2, 2), GridConfig(3, 3, 3), GridConfig(4, 4, 4)}) {
    const auto r = run(EngineConfig{96, 4, g, 1}, random_matrix(96, 1));
    EXPECT_TRUE(check_band(r).empty()) << g.to_string();
  }
}

TEST(Band, SkippedOnOneProcessor) {
  const auto r = run(EngineConfig{32, 4, GridConfig(1, 1, 1), 1}, random_matrix(32, 1));
  EXPECT_TRUE(check_band(r).empty());
}
