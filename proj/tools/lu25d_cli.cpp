#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lu25d/acceptance.hpp"
#include "lu25d/lu25d.hpp"

namespace {

using namespace lu25d;

void print_summary(std::ostream& os, const PhaseCostReport& r, const CommLedger& ledger) {
  os << "grid " << r.grid.to_string() << "  n=" << r.n << "  v=" << r.v << "  seed=" << r.seed
     << "\nresidual " << std::setprecision(3) << r.residual << "\nsupersteps "
     << ledger.supersteps().size() << "\n\n";
  os << std::left << std::setw(20) << "phase" << std::right << std::setw(14) << "critical_words"
     << '\n';
  for (Phase p : kAllPhases) {
    os << std::left << std::setw(20) << to_string(p) << std::right << std::setw(14)
       << r.measured(p) << '\n';
  }
  os << std::left << std::setw(20) << "panel-reduction" << std::right << std::setw(14)
     << r.panel_reduction << '\n'
     << std::left << std::setw(20) << "total" << std::right << std::setw(14) << r.total << "\n\n";
  os << std::setprecision(6) << "eq1_sum " << r.predicted.eq1_sum << "\neq3_corrected "
     << r.predicted.eq3_corrected << "\nlemma8_claim " << r.predicted.lemma8_claim
     << "\nremaining_bound " << r.predicted.remaining_bound << '\n';
}

void print_pivots(std::ostream& os, const PivotStats& s) {
  os << "pivot origins over " << s.px << "x" << s.py << " (rows pi, columns pj)\n";
  for (std::size_t pi = 0; pi < s.px; ++pi) {
    for (std::size_t pj = 0; pj < s.py; ++pj) {
      os << std::setw(8) << s.histogram[pi + s.px * pj];
    }
    os << '\n';
  }
  os << "chi_square " << std::setprecision(6) << s.chi_square << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2.5D LU communication simulator and cost model"};
  app.require_subcommand(1);

  // simulate
  std::size_t n = 0, v = 0;
  std::string grid_text, collective_text = "rsag", out_path, format_text = "csv";
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "Run one simulated factorization");
  sim->add_option("--n", n, "Matrix order")->required();
  sim->add_option("--v", v, "Panel width (default: largest <= 8 that fits)");
  sim->add_option("--grid", grid_text, "Processor grid PXxPYxPZ")->required();
  sim->add_option("--seed", seed, "Random matrix seed")->required();
  sim->add_option("--collective", collective_text, "binomial | rsag")
      ->check(CLI::IsMember({"binomial", "rsag"}));
  sim->add_option("--out", out_path, "Write a report file");
  sim->add_option("--format", format_text, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  std::string ledger_path;
  sim->add_option("--ledger", ledger_path, "Write the raw ledger CSV");

  // model
  std::size_t p = 0;
  std::string preset_text;
  std::optional<double> m, rho;
  double kappa = 1.0;
  auto* model = app.add_subcommand("model", "Evaluate the cost formulas");
  model->add_option("--n", n, "Matrix order")->required();
  model->add_option("--v", v, "Panel width")->required();
  model->add_option("--p", p, "Processor count")->required();
  model->add_option("--preset", preset_text, "flat | two-layer | cube")
      ->required()
      ->check(CLI::IsMember({"flat", "two-layer", "cube"}));
  model->add_option("--m", m, "Memory per processor in words");
  model->add_option("--rho", rho, "Maximal computational intensity");
  model->add_option("--kappa", kappa, "Constant of the n^2/p term");
  bool model_csv = false;
  model->add_flag("--csv", model_csv, "Print the table as CSV");

  // sweep
  std::string spec_path, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run a sweep described by a JSON spec");
  sweep->add_option("--spec", spec_path, "Sweep spec file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "Report path prefix (writes PREFIX.csv and PREFIX.json)");

  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");

  auto* pstats = app.add_subcommand("pivot-stats", "Pivot origin histogram and chi-square");
  pstats->add_option("--n", n, "Matrix order")->required();
  pstats->add_option("--v", v, "Panel width");
  pstats->add_option("--grid", grid_text, "Processor grid PXxPYxPZ")->required();
  pstats->add_option("--seed", seed, "Random matrix seed")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const GridConfig g = parse_grid(grid_text);
      if (v == 0) v = default_panel_width(n, g);
      EngineConfig cfg{n, v, g, seed, parse_collective(collective_text)};
      cfg.validate();
      const DenseMatrix a = random_matrix(n, seed);
      const auto result = run(cfg, a);
      const auto report = make_report(result, a);
      print_summary(std::cout, report, result.ledger);
      if (!out_path.empty()) {
        emit_report(out_path, parse_report_format(format_text), {report});
        std::cout << "\nwrote " << out_path << '\n';
      }
      if (!ledger_path.empty()) {
        std::ofstream os(ledger_path);
        if (!os) throw Error("cannot open '" + ledger_path + "' for writing");
        write_ledger_csv(os, result.ledger);
        std::cout << "wrote " << ledger_path << '\n';
      }
    } else if (*model) {
      const auto params = make_params(n, v, p, parse_preset(preset_text), m, rho, kappa);
      const auto rows = model_table(params);
      if (model_csv) {
        write_model_csv(std::cout, params, rows);
      } else {
        std::cout << "n=" << params.n << " v=" << params.v << " p=" << params.p
                  << " c=" << params.c << " p1=" << params.p1 << " m=" << params.m
                  << (m ? "" : " (default n^2 c/(2p))") << " kappa=" << params.kappa << '\n';
        if (!rho) std::cout << "rho not given: lower bound omitted\n";
        for (const auto& r : rows) {
          std::cout << std::left << std::setw(28) << r.formula << std::right << std::setw(18)
                    << std::setprecision(10) << r.value << "   " << r.annotation << '\n';
        }
      }
    } else if (*sweep) {
      std::ifstream in(spec_path);
      const auto spec = read_sweep_spec(in);
      const auto result = run_sweep(spec);
      for (const auto& s : result.skipped) {
        std::cerr << "skipped grid " << s.label << ": " << s.error << '\n';
      }
      if (sweep_out.empty()) {
        write_report_csv(std::cout, result.reports, result.phases);
      } else {
        emit_report(sweep_out + ".csv", ReportFormat::Csv, result.reports, result.phases);
        emit_report(sweep_out + ".json", ReportFormat::Json, result.reports, result.phases,
                    result.skipped);
        std::cout << "wrote " << sweep_out << ".csv and " << sweep_out << ".json ("
                  << result.reports.size() << " reports, " << result.skipped.size()
                  << " skipped)\n";
      }
    } else if (*verify) {
      const auto results = acceptance::run_all();
      acceptance::print(std::cout, results);
      return acceptance::all_pass(results) ? 0 : 1;
    } else if (*pstats) {
      const GridConfig g = parse_grid(grid_text);
      if (v == 0) v = default_panel_width(n, g);
      EngineConfig cfg{n, v, g, seed};
      cfg.validate();
      const auto result = run(cfg, random_matrix(n, seed));
      print_pivots(std::cout, pivot_uniformity(result));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
