// qotto_main.cpp — command-line driver for the asymmetric quantum Otto engine
// toolkit.
//
// Subcommands:
//   q         print the nonadiabaticity parameters Q_f, Q_b for one config
//   stats     one statistics CSV row for one config
//   cycle     finite-thermalization statistics row plus cycle diagnostics
//   sweep     full (tau_u, r_u) sweep table
//   optimize  sweep table + optima series + annotations (requires --output)
//
// Exit codes: 0 success, 1 validation error, 2 numerical error,
// 3 sweep completed with failed grid points.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qotto/csv.hpp"
#include "qotto/cycle.hpp"
#include "qotto/optimize.hpp"
#include "qotto/run_config.hpp"

namespace {

void print_usage(std::ostream& os) {
    os << "usage: qotto <q|stats|cycle|sweep|optimize> [--config FILE] [--key value]...\n"
          "keys: omega1 omega2 beta_h beta_c tau_u tau_b r_u r_b kappa gamma n_cut\n"
          "      substance (ho|tls) delta weak_coupling_max ode_tol mode (perfect|finite)\n"
          "      r_grid_min r_grid_max r_grid_count tau_grid_min tau_grid_max tau_grid_count\n"
          "      tau_b_factor jump_threshold match_tol refine_tol output precision jobs\n";
}

int cmd_q(const qotto::RunConfig& rc) {
    const qotto::AdiabaticityPair pair = qotto::adiabaticity_pair(rc.engine);
    std::cout << "q_f = " << qotto::format_value(pair.q_f, rc.precision)
              << "\nq_b = " << qotto::format_value(pair.q_b, rc.precision) << "\n";
    return 0;
}

int write_single_row(const qotto::RunConfig& rc, bool with_diagnostics) {
    const qotto::EngineConfig& cfg = rc.engine;
    const qotto::AdiabaticityPair pair = qotto::adiabaticity_pair(cfg);

    std::ostringstream body;
    qotto::write_config_header(body, rc);
    qotto::CycleStatistics stats;
    if (cfg.perfect_thermalization() && rc.mode == qotto::SweepMode::Perfect) {
        stats = qotto::statistics_perfect(cfg, pair);
    } else if (cfg.perfect_thermalization()) {
        throw qotto::validation_error("finite mode requires a finite tau_b");
    } else {
        const qotto::FiniteCycleResult res = qotto::statistics_finite_detailed(cfg, pair);
        stats = res.stats;
        if (with_diagnostics) {
            body << "# leakage = " << res.leakage << "\n";
            body << "# stationary_residual = " << res.stationary.residual << "\n";
            body << "# spectral_gap_estimate = " << res.stationary.gap_estimate << "\n";
            body << "# power_iterations = " << res.stationary.iterations
                 << (res.stationary.used_direct_solve ? " (direct solve fallback)" : "") << "\n";
        }
    }
    body << qotto::stats_csv_header() << "\n";
    body << qotto::stats_csv_row(cfg.tau_u, cfg.r_u, pair, stats, rc.precision) << "\n";

    if (rc.output.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(rc.output);
        if (!out) throw qotto::validation_error("cannot open output file '" + rc.output + "'");
        out << body.str();
    }
    return 0;
}

bool has_failures(const qotto::OptimizationRun& run) {
    for (const auto& block : run.sweeps)
        for (const auto& rec : block)
            if (!rec.error.empty()) return true;
    return false;
}

int cmd_sweep(const qotto::RunConfig& rc) {
    const qotto::OptimizationRun run =
        qotto::optimize_over_grid(rc.engine, rc.tau_grid.values(), rc.r_grid.values(), rc.mode,
                                  rc.jobs, rc.refine_tol, rc.tau_b_factor);
    if (rc.output.empty()) {
        qotto::write_sweep_table(std::cout, rc, run);
    } else {
        std::ofstream out(rc.output);
        if (!out) throw qotto::validation_error("cannot open output file '" + rc.output + "'");
        qotto::write_sweep_table(out, rc, run);
    }
    return has_failures(run) ? 3 : 0;
}

int cmd_optimize(const qotto::RunConfig& rc) {
    if (rc.output.empty())
        throw qotto::validation_error("optimize requires --output BASE (writes BASE_sweep.csv "
                                      "and BASE_optima.csv)");
    const qotto::OptimizationRun run =
        qotto::optimize_over_grid(rc.engine, rc.tau_grid.values(), rc.r_grid.values(), rc.mode,
                                  rc.jobs, rc.refine_tol, rc.tau_b_factor);

    const std::string sweep_path = rc.output + "_sweep.csv";
    std::ofstream sweep_out(sweep_path);
    if (!sweep_out) throw qotto::validation_error("cannot open output file '" + sweep_path + "'");
    qotto::write_sweep_table(sweep_out, rc, run);

    const std::string optima_path = rc.output + "_optima.csv";
    std::ofstream optima_out(optima_path);
    if (!optima_out) throw qotto::validation_error("cannot open output file '" + optima_path + "'");
    qotto::write_optima_series(optima_out, rc, run.series);

    return has_failures(run) ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        print_usage(std::cerr);
        return 1;
    }
    const std::string command = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);

    try {
        qotto::RunConfig rc = qotto::parse_cli_config(args);
        rc.validate();
        if (command == "q") return cmd_q(rc);
        if (command == "stats") return write_single_row(rc, false);
        if (command == "cycle") {
            if (rc.engine.perfect_thermalization())
                throw qotto::validation_error("cycle requires a finite tau_b");
            qotto::RunConfig finite = rc;
            finite.mode = qotto::SweepMode::Finite;
            return write_single_row(finite, true);
        }
        if (command == "sweep") return cmd_sweep(rc);
        if (command == "optimize") return cmd_optimize(rc);
        print_usage(std::cerr);
        std::cerr << "error: unknown command '" << command << "'\n";
        return 1;
    } catch (const qotto::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qotto::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
