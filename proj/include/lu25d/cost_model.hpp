#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lu25d/error.hpp"
#include "lu25d/grid.hpp"

namespace lu25d {

/// Symbols shared by the cost formulas. m is memory per processor in words,
/// rho the maximal computational intensity, v_count the CDAG vertex count.
struct CostModelParams {
  std::size_t n = 0;
  std::size_t v = 0;
  std::size_t c = 1;
  std::size_t p = 1;
  std::size_t p1 = 1;
  double m = 0.0;
  std::optional<double> rho;
  double v_count = 0.0;
  double kappa = 1.0;
  bool v_count_is_default = true;

  void validate() const {
    if (n == 0 || v == 0 || c == 0 || p == 0 || p1 == 0) {
      throw InvalidArgument("cost model counts must be >= 1");
    }
    if (p != p1 * c) throw InvalidArgument("cost model needs p = p1 * c");
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("memory m must be positive");
    if (rho && !(*rho > 0.0)) throw InvalidArgument("rho must be positive");
    if (!(v_count > 0.0)) throw InvalidArgument("|V| must be positive");
    if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be nonnegative");
  }
};

/// n^2 c / (2p): the memory at which the two forms of the original step cost coincide.
inline double default_memory(std::size_t n, std::size_t c, std::size_t p) {
  const double nn = static_cast<double>(n);
  return nn * nn * static_cast<double>(c) / (2.0 * static_cast<double>(p));
}

/// n^3 / 3, the conventional vertex count for LU.
inline double default_vertex_count(std::size_t n) {
  const double nn = static_cast<double>(n);
  return nn * nn * nn / 3.0;
}

inline CostModelParams make_params(std::size_t n, std::size_t v, std::size_t c, std::size_t p,
                                   std::optional<double> m = std::nullopt,
                                   std::optional<double> rho = std::nullopt,
                                   double kappa = 1.0,
                                   std::optional<double> v_count = std::nullopt) {
  if (c == 0 || p % c != 0) throw InvalidArgument("layer count must divide p");
  CostModelParams params;
  params.n = n;
  params.v = v;
  params.c = c;
  params.p = p;
  params.p1 = p / c;
  params.m = m ? *m : default_memory(n, c, p);
  params.rho = rho;
  params.kappa = kappa;
  params.v_count = v_count ? *v_count : default_vertex_count(n);
  params.v_count_is_default = !v_count.has_value();
  params.validate();
  return params;
}

/// Parameters for the grid a preset builds from p.
inline CostModelParams make_params(std::size_t n, std::size_t v, std::size_t p, GridPreset preset,
                                   std::optional<double> m = std::nullopt,
                                   std::optional<double> rho = std::nullopt,
                                   double kappa = 1.0) {
  const GridConfig g = make_grid(p, preset);
  return make_params(n, v, g.pz(), p, m, rho, kappa);
}

namespace detail {

inline void check_step(const CostModelParams& params, std::size_t t) {
  if (params.n % params.v != 0) throw InvalidArgument("panel width must divide n");
  if (t < 1 || t > params.n / params.v) {
    throw InvalidArgument("iteration t=" + std::to_string(t) + " outside [1, " +
                          std::to_string(params.n / params.v) + "]");
  }
}

inline std::size_t sqrt_p1(const CostModelParams& params) {
  const auto s = exact_sqrt(params.p1);
  if (!s) throw InvalidArgument("p1=" + std::to_string(params.p1) + " is not a perfect square");
  return *s;
}

}  // namespace detail

struct StepCost {
  double value = 0.0;
  double memory_form = 0.0;  // 2 (n - tv) v m / n^2
};

inline StepCost eq1_original_step(const CostModelParams& params, std::size_t t) {
  detail::check_step(params, t);
  const double rest = static_cast<double>(params.n - t * params.v);
  const double v = static_cast<double>(params.v);
  const double nn = static_cast<double>(params.n);
  return {rest * v * static_cast<double>(params.c) / static_cast<double>(params.p),
          2.0 * rest * v * params.m / (nn * nn)};
}

inline double eq2_corrected_step(const CostModelParams& params, std::size_t t) {
  detail::check_step(params, t);
  const std::size_t s = detail::sqrt_p1(params);
  return static_cast<double>((params.n - t * params.v) * params.v) / static_cast<double>(s);
}

/// Sum over t of (n - tv) v, before the division by sqrt(p1).
inline std::uint64_t eq3_scaled_sum(std::size_t n, std::size_t v) {
  if (v == 0 || n % v != 0) throw InvalidArgument("panel width must divide n");
  std::uint64_t s = 0;
  for (std::size_t t = 1; t <= n / v; ++t) s += static_cast<std::uint64_t>((n - t * v) * v);
  return s;
}

/// n (n - v), which equals twice eq3_scaled_sum.
inline std::uint64_t eq3_scaled_closed_form_times_two(std::size_t n, std::size_t v) {
  if (v == 0 || n % v != 0) throw InvalidArgument("panel width must divide n");
  return static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - v);
}

struct CumulativeCost {
  double summed = 0.0;
  double closed_form = 0.0;
  bool exact_match = false;  // 2 * scaled sum == n (n - v) in integers
};

inline CumulativeCost eq3_cumulative(const CostModelParams& params) {
  const std::size_t s = detail::sqrt_p1(params);
  const std::uint64_t sum = eq3_scaled_sum(params.n, params.v);
  const std::uint64_t twice = eq3_scaled_closed_form_times_two(params.n, params.v);
  return {static_cast<double>(sum) / static_cast<double>(s),
          static_cast<double>(twice) / (2.0 * static_cast<double>(s)), 2 * sum == twice};
}

/// Sum of the original step cost over t = 1..n/v.
inline double eq1_total(const CostModelParams& params) {
  if (params.n % params.v != 0) throw InvalidArgument("panel width must divide n");
  return static_cast<double>(eq3_scaled_sum(params.n, params.v)) *
         static_cast<double>(params.c) / static_cast<double>(params.p);
}

/// n^3 / (p sqrt(m)) + kappa n^2 / p.
inline double lemma8_claim(const CostModelParams& params) {
  const double nn = static_cast<double>(params.n);
  const double p = static_cast<double>(params.p);
  return nn * nn * nn / (p * std::sqrt(params.m)) + params.kappa * nn * nn / p;
}

struct CorrectedTotals {
  std::optional<double> flat;  // p1 = p, one layer
  std::optional<double> cube;  // p1 = p^{2/3}
  double lemma8 = 0.0;
};

inline double corrected_flat_total(std::size_t n, std::size_t v, std::size_t p) {
  const auto s = exact_sqrt(p);
  if (!s) throw ShapeError("flat total needs a square p, got " + std::to_string(p));
  return static_cast<double>(eq3_scaled_sum(n, v)) / static_cast<double>(*s);
}

inline double corrected_cube_total(std::size_t n, std::size_t v, std::size_t p) {
  const auto s = exact_cbrt(p);
  if (!s) throw ShapeError("cube total needs a cubic p, got " + std::to_string(p));
  return static_cast<double>(eq3_scaled_sum(n, v)) / static_cast<double>(*s);
}

/// Both corrected totals where p admits the grid; inadmissible ones are empty.
inline CorrectedTotals corrected_totals(const CostModelParams& params) {
  CorrectedTotals out;
  if (exact_sqrt(params.p)) out.flat = corrected_flat_total(params.n, params.v, params.p);
  if (exact_cbrt(params.p)) out.cube = corrected_cube_total(params.n, params.v, params.p);
  out.lemma8 = lemma8_claim(params);
  return out;
}

struct RemainingBound {
  double value = 0.0;
  double memory = 0.0;  // n^2 / p^{2/3}
  std::string annotation;
};

/// The claimed-cost expression evaluated at m = n^2 / p^{2/3}.
inline RemainingBound remaining_steps_bound(std::size_t n, std::size_t p, double kappa = 1.0) {
  const auto q = exact_cbrt(p);
  if (!q) throw ShapeError("remaining-steps bound needs a cubic p, got " + std::to_string(p));
  const double nn = static_cast<double>(n);
  const double q2 = static_cast<double>(*q * *q);
  CostModelParams params;
  params.n = n;
  params.p = p;
  params.m = nn * nn / q2;
  params.kappa = kappa;
  return {lemma8_claim(params), params.m,
          "asymptotically below the corrected cube total n(n-v)/(2 p^{1/3})"};
}

struct LowerBound {
  double value = 0.0;
  std::vector<std::string> annotations;
};

/// |V| / (p rho).
inline LowerBound lower_bound_q(double v_count, std::size_t p, double rho) {
  if (!(v_count > 0.0) || p == 0 || !(rho > 0.0)) {
    throw InvalidArgument("lower bound needs positive |V|, p and rho");
  }
  return {v_count / (static_cast<double>(p) * rho),
          {"total I/O summed over processors grows proportionally to p",
           "not every processor need take part in every step"}};
}

inline LowerBound lower_bound_q(const CostModelParams& params) {
  if (!params.rho) throw InvalidArgument("rho has no default and must be given");
  auto out = lower_bound_q(params.v_count, params.p, *params.rho);
  if (params.v_count_is_default) out.annotations.emplace_back("|V| = n^3/3 by convention");
  return out;
}

struct RegimeFlag {
  bool value = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct RegimeFlags {
  RegimeFlag m_term_exceeds_n2_over_p;     // m > n^2 / p
  RegimeFlag m_term_exceeds_first_term;    // n^2 < p^{2/3} sqrt(m)
};

inline RegimeFlags regime_flags(std::size_t n, std::size_t p, double m) {
  if (n == 0 || p == 0 || !(m > 0.0)) throw InvalidArgument("regime flags need positive n, p, m");
  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);
  RegimeFlags f;
  f.m_term_exceeds_n2_over_p = {m > nn * nn / pp, m, nn * nn / pp};
  const auto q = exact_cbrt(p);
  const double p23 = q ? static_cast<double>(*q * *q) : std::cbrt(pp * pp);
  const double rhs = p23 * std::sqrt(m);
  f.m_term_exceeds_first_term = {nn * nn < rhs, nn * nn, rhs};
  return f;
}

inline RegimeFlags regime_flags(const CostModelParams& params) {
  return regime_flags(params.n, params.p, params.m);
}

struct BoundComparison {
  double original_total = 0.0;
  std::optional<double> corrected_total_flat;
  std::optional<double> corrected_total_cube;
  double lemma8_claim = 0.0;
  std::optional<double> remaining_bound;
  std::optional<double> lower_bound_q;
  RegimeFlags dominance_flags;
};

inline BoundComparison compare_bounds(const CostModelParams& params) {
  params.validate();
  BoundComparison b;
  b.original_total = eq1_total(params);
  const auto totals = corrected_totals(params);
  b.corrected_total_flat = totals.flat;
  b.corrected_total_cube = totals.cube;
  b.lemma8_claim = totals.lemma8;
  if (exact_cbrt(params.p)) b.remaining_bound = remaining_steps_bound(params.n, params.p, params.kappa).value;
  if (params.rho) b.lower_bound_q = lower_bound_q(params).value;
  b.dominance_flags = regime_flags(params);
  return b;
}

struct ModelRow {
  std::string formula;
  double value = 0.0;
  double constant = 1.0;
  std::string annotation;
};

/// Every formula evaluated at `params` (per-step ones at t = 1).
inline std::vector<ModelRow> model_table(const CostModelParams& params) {
  params.validate();
  std::vector<ModelRow> rows;
  const auto e1 = eq1_original_step(params, 1);
  rows.push_back({"eq1_original_step", e1.value, 1.0, "t=1"});
  rows.push_back({"eq1_memory_form", e1.memory_form, 1.0, "t=1; 2(n-tv)vm/n^2"});
  rows.push_back({"eq1_total", eq1_total(params), 1.0, "sum over t"});
  if (exact_sqrt(params.p1)) {
    rows.push_back({"eq2_corrected_step", eq2_corrected_step(params, 1), 1.0, "t=1"});
    const auto e3 = eq3_cumulative(params);
    rows.push_back({"eq3_cumulative", e3.summed, 1.0,
                    e3.exact_match ? "closed form matches sum" : "closed form MISMATCH"});
  }
  const auto totals = corrected_totals(params);
  if (totals.flat) rows.push_back({"corrected_total_flat", *totals.flat, 1.0, "p1 = p"});
  if (totals.cube) rows.push_back({"corrected_total_cube", *totals.cube, 1.0, "p1 = p^(2/3)"});
  rows.push_back({"lemma8_claim", totals.lemma8, params.kappa, "n^3/(p sqrt(m)) + kappa n^2/p"});
  if (exact_cbrt(params.p)) {
    const auto rb = remaining_steps_bound(params.n, params.p, params.kappa);
    rows.push_back({"remaining_steps_bound", rb.value, params.kappa, rb.annotation});
  }
  if (params.rho) {
    const auto lb = lower_bound_q(params);
    std::string note;
    for (const auto& a : lb.annotations) note += (note.empty() ? "" : "; ") + a;
    rows.push_back({"lower_bound_q", lb.value, 1.0, note});
  }
  const auto flags = regime_flags(params);
  rows.push_back({"flag_m_exceeds_n2_over_p", flags.m_term_exceeds_n2_over_p.value ? 1.0 : 0.0,
                  1.0, "m > n^2/p"});
  rows.push_back({"flag_m_exceeds_first_term", flags.m_term_exceeds_first_term.value ? 1.0 : 0.0,
                  1.0, "n^2 < p^(2/3) sqrt(m)"});
  return rows;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace detail

/// CSV columns: formula,n,v,c,p,p1,m,rho,v_count,value,constant,annotation.
inline void write_model_csv(std::ostream& os, const CostModelParams& params,
                            const std::vector<ModelRow>& rows) {
  using detail::format_number;
  os << "formula,n,v,c,p,p1,m,rho,v_count,value,constant,annotation\n";
  for (const auto& r : rows) {
    os << r.formula << ',' << params.n << ',' << params.v << ',' << params.c << ',' << params.p
       << ',' << params.p1 << ',' << format_number(params.m) << ','
       << (params.rho ? format_number(*params.rho) : std::string()) << ','
       << format_number(params.v_count) << ',' << format_number(r.value) << ','
       << format_number(r.constant) << ',' << detail::csv_field(r.annotation) << '\n';
  }
}

}  // namespace lu25d
