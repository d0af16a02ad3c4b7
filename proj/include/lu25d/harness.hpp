#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lu25d/cost_model.hpp"
#include "lu25d/engine.hpp"
#include "lu25d/error.hpp"
#include "lu25d/fabric.hpp"
#include "lu25d/grid.hpp"
#include "lu25d/matrix.hpp"

namespace lu25d {

inline constexpr std::array<Phase, 2> kPanelReductionPhases = {Phase::PanelReduceA10,
                                                               Phase::PanelReduceA01};

// ---------------------------------------------------------------- sweep spec

/// One grid as written in a sweep spec, resolved if it is usable for (n, v).
struct GridEntry {
  std::string label;
  std::optional<GridConfig> grid;
  std::string error;  // why the entry cannot run; empty when it can
};

struct SweepSpec {
  std::size_t n = 0;
  std::size_t v = 0;
  std::vector<GridEntry> grids;
  std::vector<std::uint64_t> seeds{0};
  std::vector<Phase> phases{kAllPhases.begin(), kAllPhases.end()};
  Collective collective = Collective::Rsag;
  double kappa = 1.0;
};

/// Resolves "PXxPYxPZ" or "preset:p" (e.g. "cube:27") against (n, v).
inline GridEntry resolve_grid(const std::string& label, std::size_t n, std::size_t v) {
  GridEntry e{label, std::nullopt, {}};
  try {
    GridConfig g{1, 1, 1};
    if (const auto colon = label.find(':'); colon != std::string::npos) {
      const auto preset = parse_preset(label.substr(0, colon));
      const auto p = std::stoull(label.substr(colon + 1));
      g = make_grid(static_cast<std::size_t>(p), preset);
    } else {
      g = parse_grid(label);
    }
    EngineConfig{n, v, g, 0}.validate();
    e.grid = g;
  } catch (const std::exception& ex) {
    e.error = ex.what();
  }
  return e;
}

/// Every preset grid p admits, in flat, two-layer, cube order.
inline std::vector<std::string> preset_labels(std::size_t p) {
  std::vector<std::string> out;
  for (const char* name : {"flat", "two-layer", "cube"}) {
    try {
      make_grid(p, parse_preset(name));
      out.push_back(std::string(name) + ":" + std::to_string(p));
    } catch (const ShapeError&) {
    }
  }
  return out;
}

/// JSON fields: n, v, grids (labels), processor_counts (expanded to every
/// admissible preset), seeds, phases, collective, kappa.
inline SweepSpec parse_sweep_spec(const nlohmann::json& j) {
  SweepSpec s;
  try {
    s.n = j.at("n").get<std::size_t>();
    s.v = j.at("v").get<std::size_t>();
    std::vector<std::string> labels;
    if (j.contains("grids")) labels = j.at("grids").get<std::vector<std::string>>();
    if (j.contains("processor_counts")) {
      for (auto p : j.at("processor_counts").get<std::vector<std::size_t>>()) {
        const auto more = preset_labels(p);
        if (more.empty()) labels.push_back("flat:" + std::to_string(p));
        labels.insert(labels.end(), more.begin(), more.end());
      }
    }
    if (labels.empty()) throw InvalidArgument("sweep spec lists no grids");
    for (const auto& l : labels) s.grids.push_back(resolve_grid(l, s.n, s.v));
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (s.seeds.empty()) throw InvalidArgument("sweep spec lists no seeds");
    if (j.contains("phases")) {
      s.phases.clear();
      for (const auto& name : j.at("phases").get<std::vector<std::string>>()) {
        s.phases.push_back(parse_phase(name));
      }
    }
    if (j.contains("collective")) s.collective = parse_collective(j.at("collective").get<std::string>());
    if (j.contains("kappa")) s.kappa = j.at("kappa").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("malformed sweep spec: ") + ex.what());
  }
  return s;
}

inline SweepSpec read_sweep_spec(std::istream& in) {
  try {
    return parse_sweep_spec(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& ex) {
    throw InvalidArgument(std::string("sweep spec is not valid JSON: ") + ex.what());
  }
}

// ---------------------------------------------------------------- statistics

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// Least squares on (log p, log cost).
inline ExponentFit fit_exponent(std::vector<std::pair<double, double>> points) {
  if (points.size() < 3) throw InvalidArgument("exponent fit needs at least 3 points");
  const double k = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [p, cost] : points) {
    if (!(p > 0.0) || !(cost > 0.0)) throw InvalidArgument("exponent fit needs positive p and cost");
    sx += std::log(p);
    sy += std::log(cost);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [p, cost] : points) {
    const double dx = std::log(p) - mx, dy = std::log(cost) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InvalidArgument("exponent fit needs distinct p values");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  f.points = std::move(points);
  return f;
}

struct PivotStats {
  std::size_t px = 1;
  std::size_t py = 1;
  std::vector<std::size_t> histogram;  // index pi + px * pj
  double chi_square = 0.0;
};

/// Pivot origins over the px x py positions against a uniform spread.
inline PivotStats pivot_uniformity(const FactorizationRun& run) {
  const GridConfig& g = run.config.grid;
  PivotStats s;
  s.px = g.px();
  s.py = g.py();
  s.histogram.assign(g.p1(), 0);
  for (std::size_t r = 0; r < g.p(); ++r) {
    const ProcId id = g.proc(r);
    s.histogram[id.pi + g.px() * id.pj] += run.pivot_owner_counts[r];
  }
  std::size_t total = 0;
  for (auto h : s.histogram) total += h;
  const double expected = static_cast<double>(total) / static_cast<double>(s.histogram.size());
  if (expected > 0.0) {
    for (auto h : s.histogram) {
      const double d = static_cast<double>(h) - expected;
      s.chi_square += d * d / expected;
    }
  }
  return s;
}

// ---------------------------------------------------------------- band check

struct BandViolation {
  std::size_t iteration = 0;
  Phase phase = Phase::PanelReduceA10;
  double measured = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline std::size_t ceil_log2(std::size_t x) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < x) ++r;
  return r;
}

/// Per-iteration panel reductions against the corrected step cost E2 with
/// t = iteration + 1: measured in [E2/2, (2 ceil(log2 c) + 1) E2 + 2 v^2 ceil(log2(px pz))].
/// Skipped when the active set is a single processor.
inline std::vector<BandViolation> check_band(const FactorizationRun& run) {
  std::vector<BandViolation> out;
  const auto& cfg = run.config;
  const GridConfig& g = cfg.grid;
  const auto table = phase_costs(run);
  const double root_p1 = std::sqrt(static_cast<double>(g.p1()));
  const double v = static_cast<double>(cfg.v);
  const double lc = static_cast<double>(ceil_log2(g.pz()));
  for (Phase phase : kPanelReductionPhases) {
    const std::size_t set_size =
        (phase == Phase::PanelReduceA10 ? g.px() : g.py()) * g.pz();
    if (set_size <= 1) continue;
    const double slack = 2.0 * v * v * static_cast<double>(ceil_log2(set_size));
    for (std::size_t t0 = 0; t0 < table.iterations(); ++t0) {
      const double e2 = static_cast<double>(cfg.n - (t0 + 1) * cfg.v) * v / root_p1;
      const double measured = static_cast<double>(table.at(t0, phase));
      const double lo = 0.5 * e2;
      const double hi = (2.0 * lc + 1.0) * e2 + slack;
      if (measured < lo || measured > hi) out.push_back({t0, phase, measured, lo, hi});
    }
  }
  return out;
}

/// Recheck of the engine's inline confinement: in every panel-phase superstep
/// only the phase's active set moves data. Returns a description per offence.
inline std::vector<std::string> check_confinement(const CommLedger& ledger) {
  std::vector<std::string> out;
  const GridConfig& g = ledger.grid();
  for (const auto& s : ledger.supersteps()) {
    if (!is_panel_phase(s.phase)) continue;
    const bool row_panel = s.phase == Phase::PanelReduceA01 || s.phase == Phase::Trsm;
    const auto allowed = row_panel ? row_panel_active_set(g, s.iteration)
                                   : panel_active_set(g, s.iteration);
    std::vector<bool> ok(g.p(), false);
    for (const auto& id : allowed) ok[g.rank(id)] = true;
    for (std::size_t r = 0; r < g.p(); ++r) {
      if (!ok[r] && (s.sent[r] != 0 || s.received[r] != 0)) {
        out.push_back("superstep " + std::to_string(s.id) + " (" + std::string(to_string(s.phase)) +
                      "): rank " + std::to_string(r) + " outside the active set");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- reports

struct ModelPredictions {
  double eq1_sum = 0.0;
  double eq3_corrected = 0.0;
  double lemma8_claim = 0.0;
  double remaining_bound = 0.0;
};

/// Formula values for the grid's own (p1, c); m follows its default rule.
inline ModelPredictions predictions_for(std::size_t n, std::size_t v, const GridConfig& g,
                                        double kappa = 1.0) {
  const auto params = make_params(n, v, g.pz(), g.p(), std::nullopt, std::nullopt, kappa);
  ModelPredictions m;
  m.eq1_sum = eq1_total(params);
  m.eq3_corrected = static_cast<double>(eq3_scaled_sum(n, v)) /
                    std::sqrt(static_cast<double>(g.p1()));
  m.lemma8_claim = lemma8_claim(params);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(g.p());
  CostModelParams at_rule = params;
  at_rule.m = nn * nn / std::cbrt(p * p);
  if (const auto q = exact_cbrt(g.p())) at_rule.m = nn * nn / static_cast<double>(*q * *q);
  m.remaining_bound = lemma8_claim(at_rule);
  return m;
}

struct PhaseCostReport {
  GridConfig grid{1, 1, 1};
  std::size_t n = 0;
  std::size_t v = 0;
  std::uint64_t seed = 0;
  std::array<Words, kAllPhases.size()> phase_totals{};
  Words panel_reduction = 0;  // A10 + A01
  Words total = 0;
  ModelPredictions predicted;
  PivotStats pivots;
  double residual = 0.0;

  Words measured(Phase p) const { return phase_totals[static_cast<std::size_t>(p)]; }
};

inline PhaseCostReport make_report(const FactorizationRun& run, const DenseMatrix& a,
                                   double kappa = 1.0) {
  PhaseCostReport r;
  r.grid = run.config.grid;
  r.n = run.config.n;
  r.v = run.config.v;
  r.seed = run.config.seed;
  const auto table = phase_costs(run);
  for (Phase p : kAllPhases) r.phase_totals[static_cast<std::size_t>(p)] = table.phase_total(p);
  r.panel_reduction = r.measured(Phase::PanelReduceA10) + r.measured(Phase::PanelReduceA01);
  r.total = table.total();
  r.predicted = predictions_for(r.n, r.v, r.grid, kappa);
  r.pivots = pivot_uniformity(run);
  r.residual = residual_norm(a, run.factors);
  return r;
}

struct SweepResult {
  std::vector<PhaseCostReport> reports;     // grid-major, then seed, in spec order
  std::vector<GridEntry> skipped;           // entries that could not run
  std::vector<Phase> phases;
};

inline PhaseCostReport simulate_report(std::size_t n, std::size_t v, const GridConfig& g,
                                       std::uint64_t seed, Collective collective,
                                       double kappa = 1.0) {
  EngineConfig cfg{n, v, g, seed, collective};
  const DenseMatrix a = random_matrix(n, seed);
  return make_report(run(cfg, a), a, kappa);
}

/// Runs every (grid, seed) pair concurrently; results come back in spec order.
inline SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult out;
  out.phases = spec.phases;
  std::vector<std::future<PhaseCostReport>> jobs;
  for (const auto& entry : spec.grids) {
    if (!entry.grid) {
      out.skipped.push_back(entry);
      continue;
    }
    for (auto seed : spec.seeds) {
      jobs.push_back(std::async(std::launch::async, [&spec, g = *entry.grid, seed] {
        return simulate_report(spec.n, spec.v, g, seed, spec.collective, spec.kappa);
      }));
    }
  }
  for (auto& j : jobs) out.reports.push_back(j.get());
  return out;
}

}  // namespace lu25d
