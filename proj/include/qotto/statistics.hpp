// statistics.hpp — moment extraction from characteristic functions and the
// derived engine figures of merit.

#pragma once

#include <cmath>
#include <limits>

#include "qotto/generating_function.hpp"

namespace qotto {

// Per-cycle work/heat statistics. Efficiency-related fields are NaN outside
// the engine regime (work output or absorbed heat non-positive).
struct CycleStatistics {
    double w_mean = 0.0;   // <w>, work done on the system
    double w_var = 0.0;    // sigma_w^2
    double qh_mean = 0.0;  // <q_h>, heat absorbed from the hot bath
    double qh_var = 0.0;
    double work_output = 0.0;    // -<w>
    double reliability_w = std::numeric_limits<double>::quiet_NaN();  // -<w>/sigma_w
    double efficiency = std::numeric_limits<double>::quiet_NaN();     // -<w>/<q_h>
    double eta2 = std::numeric_limits<double>::quiet_NaN();           // sigma_w^2 / Var(q_h)
    double reliability_eta = std::numeric_limits<double>::quiet_NaN();// <eta>/sqrt(eta2)
    bool engine_regime = false;
};

namespace detail {

// 4th-order central stencils in one variable, offsets {-2,-1,+1,+2}.
inline ComplexL stencil_d1(const CfCore& g, bool in_alpha, long double h) {
    auto at = [&](long double off) { return in_alpha ? g(off, 0.0L) : g(0.0L, off); };
    return (8.0L * (at(h) - at(-h)) - (at(2.0L * h) - at(-2.0L * h))) / (12.0L * h);
}

inline ComplexL stencil_d2(const CfCore& g, bool in_alpha, long double h) {
    auto at = [&](long double off) { return in_alpha ? g(off, 0.0L) : g(0.0L, off); };
    return (-at(2.0L * h) + 16.0L * at(h) - 30.0L * at(0.0L) + 16.0L * at(-h) - at(-2.0L * h)) /
           (12.0L * h * h);
}

inline ComplexL stencil_d11(const CfCore& g, long double h) {
    static constexpr long double off[4] = {-2.0L, -1.0L, 1.0L, 2.0L};
    static constexpr long double coef[4] = {1.0L, -8.0L, 8.0L, -1.0L};
    ComplexL sum(0.0L, 0.0L);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sum += coef[i] * coef[j] * g(off[i] * h, off[j] * h);
    return sum / (144.0L * h * h);
}

// One Richardson level for an O(h^4) estimate.
inline ComplexL richardson4(ComplexL coarse, ComplexL fine) {
    return (16.0L * fine - coarse) / 15.0L;
}

} // namespace detail

// <w^p q_h^s> from a characteristic-function evaluator via 4th-order central
// finite differences along the real axis with one Richardson extrapolation.
// Only p + s <= 2 is supported (all figures of merit need at most second
// moments). An imaginary residue above 1e-8 of the moment scale signals a
// step-size or branch problem and is reported as an error.
inline double moment_from_cf(const CfCore& g, int p, int s, double step = 1.0e-3) {
    if (p < 0 || s < 0 || p + s > 2) throw validation_error("moment_from_cf: need 0 <= p + s <= 2");
    const long double h = step;

    ComplexL d;
    int order = p + s;
    if (order == 0) {
        d = g(0.0L, 0.0L);
    } else if (order == 1) {
        const bool in_alpha = (p == 1);
        d = detail::richardson4(detail::stencil_d1(g, in_alpha, h),
                                detail::stencil_d1(g, in_alpha, 0.5L * h));
    } else if (p == 1 && s == 1) {
        d = detail::richardson4(detail::stencil_d11(g, h), detail::stencil_d11(g, 0.5L * h));
    } else {
        const bool in_alpha = (p == 2);
        d = detail::richardson4(detail::stencil_d2(g, in_alpha, h),
                                detail::stencil_d2(g, in_alpha, 0.5L * h));
    }

    // d/d(i alpha) = -i d/d alpha, applied (p+s) times
    const ComplexL mi(0.0L, -1.0L);
    ComplexL m = d;
    for (int k = 0; k < order; ++k) m *= mi;

    const double re = static_cast<double>(m.real());
    const double im = static_cast<double>(m.imag());
    if (std::abs(im) > 1.0e-8 * std::max(std::abs(re), 1.0)) {
        std::ostringstream os;
        os << "moment_from_cf: imaginary residue " << im << " for moment (" << p << ", " << s
           << ") with real part " << re;
        throw numerical_error(os.str());
    }
    return re;
}

// Assembles the full statistics record from raw first/second moments.
inline CycleStatistics assemble_statistics(double w1, double w2, double q1, double q2) {
    CycleStatistics st;
    st.w_mean = w1;
    st.qh_mean = q1;
    st.w_var = std::max(w2 - w1 * w1, 0.0);
    st.qh_var = std::max(q2 - q1 * q1, 0.0);
    st.work_output = -w1;
    st.engine_regime = (st.work_output > 0.0) && (st.qh_mean > 0.0);
    if (st.engine_regime) {
        if (st.w_var > 0.0) st.reliability_w = st.work_output / std::sqrt(st.w_var);
        st.efficiency = st.work_output / st.qh_mean;
        if (st.qh_var > 0.0) {
            st.eta2 = st.w_var / st.qh_var;
            if (st.eta2 > 0.0) st.reliability_eta = st.efficiency / std::sqrt(st.eta2);
        }
    }
    return st;
}

// Statistics in the perfect-thermalization limit (tau_b -> infinity), from
// the closed-form characteristic function of the configured substance.
inline CycleStatistics statistics_perfect(const EngineConfig& cfg, const AdiabaticityPair& pair) {
    const CfCore g = make_cf_core(pair, cfg);

    const ComplexL g00 = g(0.0L, 0.0L);
    if (std::abs(g00 - ComplexL(1.0L, 0.0L)) > 1.0e-12)
        throw numerical_error("statistics_perfect: characteristic function fails G(0,0) = 1");

    const double w1 = moment_from_cf(g, 1, 0);
    const double w2 = moment_from_cf(g, 2, 0);
    const double q1 = moment_from_cf(g, 0, 1);
    const double q2 = moment_from_cf(g, 0, 2);
    return assemble_statistics(w1, w2, q1, q2);
}

inline CycleStatistics statistics_perfect(const EngineConfig& cfg) {
    cfg.validate();
    return statistics_perfect(cfg, adiabaticity_pair(cfg));
}

} // namespace qotto
