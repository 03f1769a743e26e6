// generating_function.hpp — joint characteristic functions G(alpha, alpha_bar)
// of work and hot-bath heat in the perfect-thermalization limit.
//
// Both evaluators run in extended precision so that finite-difference moment
// extraction keeps roundoff well below the oracle tolerances.

#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "qotto/adiabaticity.hpp"
#include "qotto/model.hpp"

namespace qotto {

namespace detail {

// Square-root argument of one HO stroke factor.
inline ComplexL ho_sqrt_argument(long double q, ComplexL x, ComplexL y) {
    const ComplexL x2 = x * x;
    const ComplexL y2 = y * y;
    return q * (1.0L - x2) * (1.0L - y2) + (1.0L + x2) * (1.0L + y2) - 4.0L * x * y;
}

// 1/sqrt(S) with the branch continued from the real positive value at
// alpha = alpha_bar = 0 along the straight path lambda*(alpha, alpha_bar).
// A discontinuous jump that survives path refinement is reported as an error
// rather than silently resolved.
template <class ArgFn>
ComplexL reciprocal_sqrt_tracked(ArgFn&& argument) {
    int segments = 8;
    while (true) {
        const ComplexL s0 = argument(0.0L);
        if (!(s0.real() > 0.0L) || std::abs(s0.imag()) > 1.0e-14L * std::abs(s0))
            throw numerical_error("characteristic function: sqrt argument not positive at alpha = 0");
        ComplexL root = std::sqrt(s0);
        bool smooth = true;
        for (int k = 1; k <= segments; ++k) {
            const ComplexL sk = argument(static_cast<long double>(k) / segments);
            if (std::abs(sk) < 1.0e-60L) throw numerical_error(
                "characteristic function: sqrt argument passed through zero (branch point)");
            ComplexL rk = std::sqrt(sk);
            if (std::abs(rk - root) > std::abs(rk + root)) rk = -rk;
            if (std::abs(rk - root) > 0.3L * std::abs(root)) {
                smooth = false;
                break;
            }
            root = rk;
        }
        if (smooth) return 1.0L / root;
        segments *= 2;
        if (segments > 4096)
            throw numerical_error("characteristic function: branch tracking failed to resolve path");
    }
}

inline ComplexL cf_ho_core(ComplexL alpha, ComplexL alpha_bar, long double q_f, long double q_b,
                           long double omega1, long double omega2, long double beta_c,
                           long double beta_h) {
    const ComplexL i(0.0L, 1.0L);
    auto factor_f = [&](long double lam) {
        const ComplexL a = lam * alpha, ab = lam * alpha_bar;
        const ComplexL x0 = std::exp(-(i * a + beta_c) * omega1);
        const ComplexL y0 = std::exp(i * (a - ab) * omega2);
        return ho_sqrt_argument(q_f, x0, y0);
    };
    auto factor_b = [&](long double lam) {
        const ComplexL a = lam * alpha, ab = lam * alpha_bar;
        const ComplexL x1 = std::exp(-(i * (a - ab) + beta_h) * omega2);
        const ComplexL y1 = std::exp(i * a * omega1);
        return ho_sqrt_argument(q_b, x1, y1);
    };
    // Normalization: at alpha = alpha_bar = 0 each factor reduces to
    // 1/(sqrt(2) (1 - e^{-beta omega})), so this prefactor makes G(0,0) = 1.
    const long double pref = 2.0L * (-std::expm1l(-beta_c * omega1)) * (-std::expm1l(-beta_h * omega2));
    return pref * reciprocal_sqrt_tracked(factor_f) * reciprocal_sqrt_tracked(factor_b);
}

inline ComplexL cf_tls_core(ComplexL alpha, ComplexL alpha_bar, long double q_f, long double q_b,
                            long double delta1, long double delta2, long double beta_c,
                            long double beta_h) {
    const ComplexL i(0.0L, 1.0L);
    const ComplexL xm = std::cos((alpha - alpha_bar) * delta2 - (alpha - i * beta_c) * delta1);
    const ComplexL xp = std::cos((alpha - alpha_bar) * delta2 + (alpha - i * beta_c) * delta1);
    const ComplexL ym = std::cos(alpha * delta1 - (alpha - alpha_bar - i * beta_h) * delta2);
    const ComplexL yp = std::cos(alpha * delta1 + (alpha - alpha_bar - i * beta_h) * delta2);
    const ComplexL num = (q_f * xm - (q_f - 1.0L) * xp) * (q_b * ym - (q_b - 1.0L) * yp);
    return num / (std::cosh(beta_c * delta1) * std::cosh(beta_h * delta2));
}

} // namespace detail

// G(alpha, alpha_bar) for the HO working substance, Q_f = Q_b >= 1.
inline Complex cf_ho(Complex alpha, Complex alpha_bar, const AdiabaticityPair& pair,
                     const EngineConfig& cfg) {
    if (!(pair.q_f >= 1.0 - 1.0e-8) || !(pair.q_b >= 1.0 - 1.0e-8))
        throw validation_error("cf_ho: HO adiabaticity parameters must be >= 1");
    const ComplexL g = detail::cf_ho_core(ComplexL(alpha.real(), alpha.imag()),
                                          ComplexL(alpha_bar.real(), alpha_bar.imag()),
                                          std::max<long double>(pair.q_f, 1.0L),
                                          std::max<long double>(pair.q_b, 1.0L), cfg.omega1,
                                          cfg.omega2, cfg.beta_c, cfg.beta_h);
    return Complex(static_cast<double>(g.real()), static_cast<double>(g.imag()));
}

// G(alpha, alpha_bar) for the TLS working substance, Q_f, Q_b in [0, 1].
inline Complex cf_tls(Complex alpha, Complex alpha_bar, const AdiabaticityPair& pair,
                      const EngineConfig& cfg) {
    if (!(pair.q_f >= 0.0 && pair.q_f <= 1.0) || !(pair.q_b >= 0.0 && pair.q_b <= 1.0))
        throw validation_error("cf_tls: TLS adiabaticity parameters must lie in [0, 1]");
    if (!cfg.substance.is_tls()) throw validation_error("cf_tls: config is not a TLS substance");
    const long double d1 = tls_level(cfg.omega1, cfg.substance.delta);
    const long double d2 = tls_level(cfg.omega2, cfg.substance.delta);
    const ComplexL g = detail::cf_tls_core(ComplexL(alpha.real(), alpha.imag()),
                                           ComplexL(alpha_bar.real(), alpha_bar.imag()), pair.q_f,
                                           pair.q_b, d1, d2, cfg.beta_c, cfg.beta_h);
    return Complex(static_cast<double>(g.real()), static_cast<double>(g.imag()));
}

// Extended-precision evaluator over real (alpha, alpha_bar), as used by the
// finite-difference moment stencils.
using CfCore = std::function<ComplexL(long double, long double)>;

inline CfCore make_cf_core(const AdiabaticityPair& pair, const EngineConfig& cfg) {
    if (cfg.substance.is_ho()) {
        const long double qf = std::max<long double>(pair.q_f, 1.0L);
        const long double qb = std::max<long double>(pair.q_b, 1.0L);
        const long double w1 = cfg.omega1, w2 = cfg.omega2, bc = cfg.beta_c, bh = cfg.beta_h;
        return [qf, qb, w1, w2, bc, bh](long double a, long double ab) {
            return detail::cf_ho_core(ComplexL(a, 0.0L), ComplexL(ab, 0.0L), qf, qb, w1, w2, bc, bh);
        };
    }
    const long double d1 = tls_level(cfg.omega1, cfg.substance.delta);
    const long double d2 = tls_level(cfg.omega2, cfg.substance.delta);
    const long double qf = pair.q_f, qb = pair.q_b;
    const long double bc = cfg.beta_c, bh = cfg.beta_h;
    return [qf, qb, d1, d2, bc, bh](long double a, long double ab) {
        return detail::cf_tls_core(ComplexL(a, 0.0L), ComplexL(ab, 0.0L), qf, qb, d1, d2, bc, bh);
    };
}

} // namespace qotto
