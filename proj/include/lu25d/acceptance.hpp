#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lu25d/cost_model.hpp"
#include "lu25d/engine.hpp"
#include "lu25d/grid.hpp"
#include "lu25d/harness.hpp"
#include "lu25d/matrix.hpp"

namespace lu25d::acceptance {

struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr std::size_t kScalingN = 384;
inline constexpr std::size_t kScalingV = 4;
inline constexpr double kResidualTolerance = 1e-10;

struct PresetSweep {
  GridPreset preset;
  std::vector<std::size_t> counts;
};

inline std::vector<PresetSweep> acceptance_presets() {
  return {{GridPreset::SquareFlat, {4, 16, 64}},
          {GridPreset::Cube, {8, 27, 64}},
          {GridPreset::SquareTwoLayer, {8, 32}}};
}

namespace detail {

inline std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

inline PhaseCostTable scaling_costs(const GridConfig& g) {
  EngineConfig cfg{kScalingN, kScalingV, g, 1};
  return phase_costs(run(cfg, random_matrix(kScalingN, 1)));
}

inline ExponentFit fit_phases(GridPreset preset, const std::vector<std::size_t>& counts,
                              std::span<const Phase> phases) {
  std::vector<std::pair<double, double>> pts;
  for (auto p : counts) {
    const auto table = scaling_costs(make_grid(p, preset));
    Words w = 0;
    for (Phase ph : phases) w += table.phase_total(ph);
    pts.emplace_back(static_cast<double>(p), static_cast<double>(w));
  }
  return fit_exponent(std::move(pts));
}

inline std::string describe_fit(const ExponentFit& f) {
  std::string s = "slope=" + fmt(f.slope) + " r2=" + fmt(f.r2) + " points=";
  for (const auto& [p, w] : f.points) s += "(" + fmt(p) + "," + fmt(w, 8) + ")";
  return s;
}

}  // namespace detail

/// Residuals, conservation, confinement and the per-iteration band over every
/// admissible preset grid for n in {64, 128, 384}, v = 4, three seeds.
struct CorrectnessSweep {
  std::size_t runs = 0;
  double worst_residual = 0.0;
  std::string worst_case;
  std::vector<std::string> failures;       // residual or engine errors
  std::vector<std::string> conservation;   // offending runs
  std::vector<std::string> confinement;
  std::vector<std::string> band;
  std::set<std::string> band_grids;  // grids with at least one band violation
};

inline CorrectnessSweep correctness_sweep() {
  CorrectnessSweep out;
  for (std::size_t n : {64, 128, 384}) {
    for (const auto& ps : acceptance_presets()) {
      for (auto p : ps.counts) {
        const GridConfig g = make_grid(p, ps.preset);
        EngineConfig cfg{n, 4, g, 0};
        try {
          cfg.validate();
        } catch (const InvalidArgument&) {
          continue;  // n not a multiple of v*px
        }
        for (std::uint64_t seed : {1, 2, 3}) {
          cfg.seed = seed;
          const std::string label =
              "n=" + std::to_string(n) + " " + g.to_string() + " seed=" + std::to_string(seed);
          ++out.runs;
          try {
            const DenseMatrix a = random_matrix(n, seed);
            const auto r = run(cfg, a);
            const double res = residual_norm(a, r.factors);
            if (!(res <= out.worst_residual)) {
              out.worst_residual = res;
              out.worst_case = label;
            }
            if (!(res <= kResidualTolerance)) out.failures.push_back(label + " residual " + detail::fmt(res));
            try {
              check_conservation(r.ledger);
            } catch (const InvariantViolation& e) {
              out.conservation.push_back(label + ": " + e.what());
            }
            for (const auto& c : check_confinement(r.ledger)) out.confinement.push_back(label + ": " + c);
            const auto violations = check_band(r);
            if (!violations.empty()) out.band_grids.insert(g.to_string());
            for (const auto& b : violations) {
              out.band.push_back(label + " t=" + std::to_string(b.iteration) + " " +
                                 std::string(to_string(b.phase)) + " " + detail::fmt(b.measured) +
                                 " not in [" + detail::fmt(b.lower) + ", " + detail::fmt(b.upper) + "]");
            }
          } catch (const InvariantViolation& e) {
            const std::string what = e.what();
            (what.find("conservation") != std::string::npos ? out.conservation : out.confinement)
                .push_back(label + ": " + what);
          } catch (const std::exception& e) {
            out.failures.push_back(label + ": " + e.what());
          }
        }
      }
    }
  }
  return out;
}

inline CriterionResult oracle_equivalence() {
  CriterionResult c{"2", "oracle equivalence on 1x1x1", true, {}};
  std::size_t cases = 0;
  for (std::size_t n : {32, 64}) {
    for (std::size_t v : {2, 4}) {
      for (std::uint64_t seed : {1, 2, 3}) {
        const DenseMatrix a = random_matrix(n, seed);
        const auto r = run(EngineConfig{n, v, GridConfig{1, 1, 1}, seed}, a);
        const auto o = blocked_lu_oracle(a, v);
        ++cases;
        const bool same = r.pivot_sequence == o.perm.map() && r.factors.perm == o.perm &&
                          r.factors.l == o.l && r.factors.u == o.u;
        if (!same) {
          c.pass = false;
          c.detail += "mismatch n=" + std::to_string(n) + " v=" + std::to_string(v) +
                      " seed=" + std::to_string(seed) + "; ";
        }
      }
    }
  }
  if (c.pass) c.detail = std::to_string(cases) + " cases element-exact";
  return c;
}

inline CriterionResult panel_reduction_slopes() {
  CriterionResult c{"5", "panel-reduction slopes (flat and cube)", false, {}};
  const auto flat = detail::fit_phases(GridPreset::SquareFlat, {4, 16, 64}, kPanelReductionPhases);
  const auto cube = detail::fit_phases(GridPreset::Cube, {8, 27, 64}, kPanelReductionPhases);
  const bool flat_ok = flat.slope >= -0.65 && flat.slope <= -0.35;
  const bool flat_not_one = !(flat.slope >= -1.15 && flat.slope <= -0.85);
  const bool cube_ok = cube.slope >= -0.48 && cube.slope <= -0.18;
  c.pass = flat_ok && flat_not_one && cube_ok;
  c.detail = std::string("flat ") + (flat_ok ? "in" : "NOT in") + " [-0.65,-0.35], " +
             (flat_not_one ? "outside" : "INSIDE") + " [-1.15,-0.85]: " + detail::describe_fit(flat) +
             " | cube " + (cube_ok ? "in" : "NOT in") + " [-0.48,-0.18]: " + detail::describe_fit(cube);
  return c;
}

inline CriterionResult schur_slope() {
  CriterionResult c{"6", "cube Schur-update slope", false, {}};
  const std::array<Phase, 1> schur = {Phase::SchurUpdate};
  const auto fit = detail::fit_phases(GridPreset::Cube, {8, 27, 64}, schur);
  c.pass = fit.slope >= -0.8 && fit.slope <= -0.55;
  c.detail = "[-0.8,-0.55]: " + detail::describe_fit(fit);
  return c;
}

inline CriterionResult discrepancy_ratio() {
  CriterionResult c{"7", "measured/eq1 ratio growth on flat grids", false, {}};
  auto ratio = [](std::size_t p) {
    const GridConfig g = make_grid(p, GridPreset::SquareFlat);
    const auto table = detail::scaling_costs(g);
    const Words w = table.phase_total(Phase::PanelReduceA10) + table.phase_total(Phase::PanelReduceA01);
    return static_cast<double>(w) / predictions_for(kScalingN, kScalingV, g).eq1_sum;
  };
  const double r4 = ratio(4), r64 = ratio(64);
  c.pass = r64 >= 1.5 * r4;
  c.detail = "ratio(p=4)=" + detail::fmt(r4) + " ratio(p=64)=" + detail::fmt(r64) +
             " growth=" + detail::fmt(r64 / r4) + " (need >= 1.5)";
  return c;
}

inline CriterionResult closed_form_exactness() {
  CriterionResult c{"8", "eq3 closed form and worked examples", true, {}};
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<std::size_t> pick_s(1, 16), pick_v(1, 32), pick_k(1, 200);
  std::size_t mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t s = pick_s(gen), v = pick_v(gen), n = v * pick_k(gen);
    const auto e3 = eq3_cumulative(make_params(n, v, 1, s * s));
    if (!e3.exact_match || e3.summed != e3.closed_form) ++mismatches;
  }
  const auto p1 = make_params(16, 2, 2, 8);
  const double e1 = eq1_original_step(p1, 1).value;
  const auto p2 = make_params(16, 2, 1, 4);
  const double e2 = eq2_corrected_step(p2, 1);
  c.pass = mismatches == 0 && e1 == 7.0 && e2 == 14.0;
  c.detail = "200 tuples, " + std::to_string(mismatches) + " mismatches; eq1=" + detail::fmt(e1) +
             " eq2=" + detail::fmt(e2);
  return c;
}

inline CriterionResult lower_bound_checks() {
  CriterionResult c{"9", "lower bound value and 1/p homogeneity", true, {}};
  const double q = lower_bound_q(300.0, 10, 3.0).value;
  std::size_t bad = 0;
  for (double vc : {1.0, 300.0, 1e6, 7.25e9}) {
    for (double rho : {0.5, 1.0, 3.0, 17.0}) {
      const double base = lower_bound_q(vc, 1, rho).value;
      for (std::size_t p : {1, 2, 3, 10, 64, 1000}) {
        const double lb = lower_bound_q(vc, p, rho).value;
        if (std::abs(lb * static_cast<double>(p) - base) > 1e-12 * base) ++bad;
      }
    }
  }
  c.pass = q == 10.0 && bad == 0;
  c.detail = "Q=" + detail::fmt(q) + ", homogeneity violations=" + std::to_string(bad);
  return c;
}

inline CriterionResult regime_flag_checks() {
  CriterionResult c{"10", "regime flags", true, {}};
  const bool ex1 = regime_flags(64, 64, 4096.0).m_term_exceeds_n2_over_p.value;
  const bool ex2 = regime_flags(4096, 8, 16.0).m_term_exceeds_first_term.value;
  const bool ex3 = regime_flags(64, 64, 64.0).m_term_exceeds_n2_over_p.value;
  std::size_t non_monotone = 0;
  for (std::size_t n : {16, 64, 256, 4096}) {
    for (std::size_t p : {1, 8, 27, 64, 100}) {
      bool seen1 = false, seen2 = false;
      for (double m = 1.0; m <= 1e16; m *= 1.5) {
        const auto f = regime_flags(n, p, m);
        if (seen1 && !f.m_term_exceeds_n2_over_p.value) ++non_monotone;
        if (seen2 && !f.m_term_exceeds_first_term.value) ++non_monotone;
        seen1 = seen1 || f.m_term_exceeds_n2_over_p.value;
        seen2 = seen2 || f.m_term_exceeds_first_term.value;
      }
    }
  }
  c.pass = ex1 && !ex2 && !ex3 && non_monotone == 0;
  c.detail = std::string("examples ") + (ex1 ? "T" : "F") + (ex2 ? "T" : "F") + (ex3 ? "T" : "F") +
             " (want TFF), monotonicity violations=" + std::to_string(non_monotone);
  return c;
}

template <typename F>
CriterionResult timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult c = f();
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

/// Every criterion plus the per-iteration band, in order.
inline std::vector<CriterionResult> run_all() {
  std::vector<CriterionResult> out;
  const auto start = std::chrono::steady_clock::now();
  const auto sweep = correctness_sweep();
  const double sweep_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto first = [](const std::vector<std::string>& v) { return v.empty() ? std::string() : " first: " + v.front(); };
  auto join = [](const std::set<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  };

  out.push_back({"1", "residual <= 1e-10 on every preset grid", sweep.failures.empty(),
                 std::to_string(sweep.runs) + " runs, worst " + detail::fmt(sweep.worst_residual) +
                     " (" + sweep.worst_case + ")" + first(sweep.failures),
                 sweep_s});
  out.push_back(timed(oracle_equivalence));
  out.push_back({"3", "ledger conservation", sweep.conservation.empty(),
                 std::to_string(sweep.conservation.size()) + " offending runs" + first(sweep.conservation), 0.0});
  out.push_back({"4", "active-set confinement", sweep.confinement.empty(),
                 std::to_string(sweep.confinement.size()) + " offences" + first(sweep.confinement), 0.0});
  out.push_back(timed(panel_reduction_slopes));
  out.push_back(timed(schur_slope));
  out.push_back(timed(discrepancy_ratio));
  out.push_back(timed(closed_form_exactness));
  out.push_back(timed(lower_bound_checks));
  out.push_back(timed(regime_flag_checks));
  out.push_back({"band", "per-iteration panel reduction within the measurement band", sweep.band.empty(),
                 std::to_string(sweep.band.size()) + " violations on grids {" + join(sweep.band_grids) + "}" +
                     first(sweep.band),
                 0.0});
  return out;
}

inline void print(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " :: " << r.detail
       << " (" << detail::fmt(r.seconds, 3) << "s)\n";
  }
}

inline bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace lu25d::acceptance
