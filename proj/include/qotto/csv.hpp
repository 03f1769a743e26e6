// csv.hpp — deterministic CSV emission for statistics rows, sweep tables and
// optima series. Files start with '#' comment lines echoing the resolved
// configuration and the tool version so figures can be regenerated.

#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "qotto/optimize.hpp"
#include "qotto/run_config.hpp"

namespace qotto {

inline constexpr const char* kVersion = "0.1.0";

// %.{precision}g rendering: compact, locale-independent, round-trips at the
// emitted precision.
inline std::string format_value(double v, int precision) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

inline void write_config_header(std::ostream& os, const RunConfig& rc) {
    os << "# qotto " << kVersion << "\n";
    for (const auto& [key, value] : rc.resolved()) os << "# " << key << " = " << value << "\n";
}

inline const char* stats_csv_header() {
    return "tau_u,r_u,q_f,q_b,w_mean,w_var,qh_mean,qh_var,work_output,reliability_w,"
           "efficiency,eta2,reliability_eta,engine_regime";
}

inline std::string stats_csv_row(double tau_u, double r_u, const AdiabaticityPair& pair,
                                 const CycleStatistics& st, int precision) {
    std::string row;
    auto push = [&row, precision](double v) {
        row += format_value(v, precision);
        row += ',';
    };
    push(tau_u);
    push(r_u);
    push(pair.q_f);
    push(pair.q_b);
    push(st.w_mean);
    push(st.w_var);
    push(st.qh_mean);
    push(st.qh_var);
    push(st.work_output);
    push(st.reliability_w);
    push(st.efficiency);
    push(st.eta2);
    push(st.reliability_eta);
    row += st.engine_regime ? "true" : "false";
    return row;
}

// Sweep table: one stats row per (tau_u, r_u) grid point; failed grid points
// become '#error' comment lines.
inline void write_sweep_table(std::ostream& os, const RunConfig& rc, const OptimizationRun& run) {
    write_config_header(os, rc);
    os << stats_csv_header() << "\n";
    for (const auto& block : run.sweeps) {
        for (const auto& rec : block) {
            if (!rec.error.empty()) {
                os << "#error tau_u=" << format_value(rec.tau_u, rc.precision)
                   << " r_u=" << format_value(rec.r_u, rc.precision) << " " << rec.error << "\n";
                continue;
            }
            os << stats_csv_row(rec.tau_u, rec.r_u, rec.pair, rec.stats, rc.precision) << "\n";
        }
    }
}

inline const char* optima_csv_header() {
    return "tau_u,r_star,w_opt,r_circ,rw_opt,r_odot,eta_opt,r_delta,reta_opt";
}

// Optima series plus '#' annotation lines for discontinuities and co-optimal
// cycle times.
inline void write_optima_series(std::ostream& os, const RunConfig& rc, const OptimaSeries& series) {
    write_config_header(os, rc);
    os << optima_csv_header() << "\n";
    const int p = rc.precision;
    for (const auto& pt : series.points) {
        os << format_value(pt.tau_u, p) << ',';
        auto emit = [&os, p](const OptimumPoint& o, bool last = false) {
            os << (o.valid ? format_value(o.r, p) : "") << ','
               << (o.valid ? format_value(o.value, p) : "");
            if (!last) os << ',';
        };
        emit(pt.work);
        emit(pt.reliability_w);
        emit(pt.efficiency);
        emit(pt.reliability_eta, true);
        os << "\n";
    }
    for (const auto& d : detect_discontinuities(series, rc.jump_threshold)) {
        os << "#discontinuity curve=" << metric_curve_name(d.metric) << " tau between "
           << format_value(d.tau_lo, p) << " and " << format_value(d.tau_hi, p)
           << " jump=" << format_value(d.jump, p) << "\n";
    }
    const CooptimalTimes co = find_cooptimal_times(series, rc.match_tol);
    for (double tau : co.work_reliability)
        os << "#cooptimal work-reliability tau_u=" << format_value(tau, p) << "\n";
    for (double tau : co.efficiency_reliability)
        os << "#cooptimal efficiency-reliability tau_u=" << format_value(tau, p) << "\n";
}

} // namespace qotto
