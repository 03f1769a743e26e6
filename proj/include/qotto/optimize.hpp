// optimize.hpp — asymmetry-parameter sweeps, optimum location with golden-
// section refinement, discontinuity detection, and co-optimization search.

#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qotto/cycle.hpp"
#include "qotto/statistics.hpp"

namespace qotto {

enum class SweepMode { Perfect, Finite };

struct SweepRecord {
    double tau_u = 0.0;
    double r_u = 0.0;
    AdiabaticityPair pair;
    CycleStatistics stats;
    bool engine_regime = false;
    std::string error; // non-empty if this grid point failed numerically
};

// The figures of merit tracked across sweeps. SigmaW is minimized (tracked to
// test that its discontinuities line up with the reliability optimum's).
enum class Metric { WorkOutput, ReliabilityW, Efficiency, ReliabilityEta, SigmaW };

inline const char* metric_curve_name(Metric m) {
    switch (m) {
        case Metric::WorkOutput: return "r_star";
        case Metric::ReliabilityW: return "r_circ";
        case Metric::Efficiency: return "r_odot";
        case Metric::ReliabilityEta: return "r_delta";
        case Metric::SigmaW: return "r_sigma";
    }
    return "?";
}

// Value to MAXIMIZE for a metric; NaN when undefined at this record.
inline double metric_value(const CycleStatistics& st, Metric m) {
    if (!st.engine_regime) return std::numeric_limits<double>::quiet_NaN();
    switch (m) {
        case Metric::WorkOutput: return st.work_output;
        case Metric::ReliabilityW: return st.reliability_w;
        case Metric::Efficiency: return st.efficiency;
        case Metric::ReliabilityEta: return st.reliability_eta;
        case Metric::SigmaW: return st.w_var > 0.0 ? -std::sqrt(st.w_var)
                                                   : std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline EngineConfig grid_point_config(const EngineConfig& base, double tau_u, double r_u,
                                      SweepMode mode, double tau_b_factor) {
    EngineConfig cfg = base;
    cfg.tau_u = tau_u;
    cfg.r_u = r_u;
    if (mode == SweepMode::Perfect) {
        cfg.tau_b = infinite_time();
    } else if (tau_b_factor > 0.0) {
        cfg.tau_b = tau_b_factor * tau_u;
    }
    return cfg;
}

inline CycleStatistics evaluate_statistics(const EngineConfig& cfg, SweepMode mode) {
    return (mode == SweepMode::Perfect || cfg.perfect_thermalization()) ? statistics_perfect(cfg)
                                                                        : statistics_finite(cfg);
}

// One record per r-grid point at fixed tau_u. Numerical failures are recorded
// in the offending record instead of aborting the sweep. Grid points are
// independent; `jobs` threads share the work and write disjoint slots.
inline std::vector<SweepRecord> sweep_r_u(const EngineConfig& base, double tau_u,
                                          const std::vector<double>& r_grid, SweepMode mode,
                                          int jobs = 1, double tau_b_factor = 0.0) {
    if (r_grid.empty()) throw validation_error("sweep_r_u: empty r grid");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0.0 && r_grid[i] < 1.0))
            throw validation_error("sweep_r_u: r grid must lie strictly inside (0, 1)");
        if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
            throw validation_error("sweep_r_u: r grid must be strictly ascending");
    }

    std::vector<SweepRecord> records(r_grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < r_grid.size(); i = next.fetch_add(1)) {
            SweepRecord& rec = records[i];
            rec.tau_u = tau_u;
            rec.r_u = r_grid[i];
            try {
                const EngineConfig cfg = grid_point_config(base, tau_u, r_grid[i], mode, tau_b_factor);
                rec.pair = adiabaticity_pair(cfg);
                rec.stats = mode == SweepMode::Perfect ? statistics_perfect(cfg, rec.pair)
                                                       : statistics_finite(cfg, rec.pair);
                rec.engine_regime = rec.stats.engine_regime;
            } catch (const std::exception& e) {
                rec.error = e.what();
                rec.engine_regime = false;
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(r_grid.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return records;
}

struct OptimumPoint {
    double r = std::numeric_limits<double>::quiet_NaN();
    double value = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
};

struct TauOptima {
    double tau_u = 0.0;
    OptimumPoint work;            // r_star
    OptimumPoint reliability_w;   // r_circ
    OptimumPoint efficiency;      // r_odot
    OptimumPoint reliability_eta; // r_delta
    OptimumPoint sigma_w;         // r_sigma (sigma_w minimizer; value = -sigma_w)
    bool any_engine = false;

    const OptimumPoint& point(Metric m) const {
        switch (m) {
            case Metric::WorkOutput: return work;
            case Metric::ReliabilityW: return reliability_w;
            case Metric::Efficiency: return efficiency;
            case Metric::ReliabilityEta: return reliability_eta;
            case Metric::SigmaW: return sigma_w;
        }
        return work;
    }
    OptimumPoint& point(Metric m) { return const_cast<OptimumPoint&>(std::as_const(*this).point(m)); }
};

using StatsEvaluator = std::function<CycleStatistics(double r_u)>;

namespace detail {

// Golden-section maximization on [a, b]; assumes the bracket from the grid
// scan isolates the optimum well enough for unimodal refinement. Returns the
// best point actually evaluated, preferring smaller r on ties.
inline OptimumPoint golden_section_max(const std::function<double(double)>& f, double a, double b,
                                       double tol, OptimumPoint best) {
    static const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto consider = [&best](double r, double v) {
        if (!std::isfinite(v)) return;
        if (!best.valid || v > best.value || (v == best.value && r < best.r)) {
            best.r = r;
            best.value = v;
            best.valid = true;
        }
    };
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    consider(c, fc);
    consider(d, fd);
    while (b - a > tol) {
        const bool keep_left = !(fd > fc); // ties move toward smaller r
        if (keep_left) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
            consider(d, fd);
        }
    }
    return best;
}

} // namespace detail

// Argmax over engine-regime records for each figure of merit, followed by one
// golden-section refinement pass inside the bracketing grid interval when an
// evaluator is supplied. Ties break toward smaller r_u.
inline TauOptima locate_optima(const std::vector<SweepRecord>& records,
                               const StatsEvaluator& evaluate = nullptr,
                               double refine_tol = 1.0e-4) {
    if (records.empty()) throw validation_error("locate_optima: no records");
    TauOptima out;
    out.tau_u = records.front().tau_u;
    for (const auto& rec : records) out.any_engine = out.any_engine || rec.engine_regime;
    if (!out.any_engine) return out; // signalled via any_engine = false

    constexpr Metric metrics[] = {Metric::WorkOutput, Metric::ReliabilityW, Metric::Efficiency,
                                  Metric::ReliabilityEta, Metric::SigmaW};
    for (Metric m : metrics) {
        std::ptrdiff_t best_idx = -1;
        double best_val = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double v = metric_value(records[i].stats, m);
            if (std::isfinite(v) && v > best_val) {
                best_val = v;
                best_idx = static_cast<std::ptrdiff_t>(i);
            }
        }
        OptimumPoint& pt = out.point(m);
        if (best_idx < 0) continue;
        pt.r = records[static_cast<std::size_t>(best_idx)].r_u;
        pt.value = best_val;
        pt.valid = true;

        if (evaluate && records.size() > 1) {
            const std::size_t i = static_cast<std::size_t>(best_idx);
            const double lo = (i == 0) ? records[i].r_u : records[i - 1].r_u;
            const double hi = (i + 1 == records.size()) ? records[i].r_u : records[i + 1].r_u;
            if (hi - lo > refine_tol) {
                auto objective = [&](double r) {
                    try {
                        return metric_value(evaluate(r), m);
                    } catch (const std::exception&) {
                        return std::numeric_limits<double>::quiet_NaN();
                    }
                };
                pt = detail::golden_section_max(objective, lo, hi, refine_tol, pt);
            }
        }
    }
    return out;
}

struct OptimaSeries {
    std::vector<TauOptima> points; // ascending in tau_u
};

struct Discontinuity {
    double tau_lo = 0.0;  // jump bracketed between consecutive grid times
    double tau_hi = 0.0;
    Metric metric = Metric::WorkOutput;
    double jump = 0.0; // |delta r| across the bracket
};

inline std::vector<Discontinuity> detect_discontinuities(const OptimaSeries& series,
                                                         double jump_threshold = 0.05) {
    std::vector<Discontinuity> jumps;
    constexpr Metric metrics[] = {Metric::WorkOutput, Metric::ReliabilityW, Metric::Efficiency,
                                  Metric::ReliabilityEta, Metric::SigmaW};
    for (Metric m : metrics) {
        for (std::size_t i = 1; i < series.points.size(); ++i) {
            const OptimumPoint& prev = series.points[i - 1].point(m);
            const OptimumPoint& cur = series.points[i].point(m);
            if (!prev.valid || !cur.valid) continue;
            const double jump = std::abs(cur.r - prev.r);
            if (jump >= jump_threshold)
                jumps.push_back({series.points[i - 1].tau_u, series.points[i].tau_u, m, jump});
        }
    }
    return jumps;
}

struct CooptimalTimes {
    std::vector<double> work_reliability;       // |r_star - r_circ| <= match_tol
    std::vector<double> efficiency_reliability; // |r_odot - r_delta| <= match_tol
};

inline CooptimalTimes find_cooptimal_times(const OptimaSeries& series, double match_tol = 0.01) {
    CooptimalTimes out;
    for (const auto& p : series.points) {
        if (p.work.valid && p.reliability_w.valid &&
            std::abs(p.work.r - p.reliability_w.r) <= match_tol)
            out.work_reliability.push_back(p.tau_u);
        if (p.efficiency.valid && p.reliability_eta.valid &&
            std::abs(p.efficiency.r - p.reliability_eta.r) <= match_tol)
            out.efficiency_reliability.push_back(p.tau_u);
    }
    return out;
}

struct OptimizationRun {
    std::vector<std::vector<SweepRecord>> sweeps; // one block per tau grid point
    OptimaSeries series;
};

// Full driver: sweep every tau in the grid, locate and refine the optima.
// When tau_b_factor > 0 (finite mode), the heat-stroke budget scales with the
// work-stroke time as tau_b = tau_b_factor * tau_u.
inline OptimizationRun optimize_over_grid(const EngineConfig& base,
                                          const std::vector<double>& tau_grid,
                                          const std::vector<double>& r_grid, SweepMode mode,
                                          int jobs = 1, double refine_tol = 1.0e-4,
                                          double tau_b_factor = 0.0) {
    if (tau_grid.empty()) throw validation_error("optimize_over_grid: empty tau grid");
    OptimizationRun run;
    run.sweeps.reserve(tau_grid.size());
    run.series.points.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        auto records = sweep_r_u(base, tau, r_grid, mode, jobs, tau_b_factor);
        StatsEvaluator eval = [&base, tau, mode, tau_b_factor](double r) {
            return evaluate_statistics(grid_point_config(base, tau, r, mode, tau_b_factor), mode);
        };
        run.series.points.push_back(locate_optima(records, eval, refine_tol));
        run.sweeps.push_back(std::move(records));
    }
    return run;
}

} // namespace qotto
