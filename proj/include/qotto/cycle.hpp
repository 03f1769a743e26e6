// cycle.hpp — finite-thermalization cycle: composed transition matrix,
// stationary (limit-cycle) distribution, and moments by explicit summation
// over the four measurement outcomes.
//
// With tau_b -> infinity the thermal factors collapse to rank-one Gibbs
// projectors and this module doubles as the brute-force oracle for the
// characteristic-function statistics.

#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "qotto/adiabaticity.hpp"
#include "qotto/kernels.hpp"
#include "qotto/statistics.hpp"

namespace qotto {

// Energies of the omega_i eigenbasis for the configured substance.
inline Vector basis_energies(const EngineConfig& cfg, double omega) {
    if (cfg.substance.is_ho()) {
        Vector e(cfg.n_cut);
        for (int j = 0; j < cfg.n_cut; ++j) e[j] = omega * (j + 0.5);
        return e;
    }
    const double d = tls_level(omega, cfg.substance.delta);
    Vector e(2);
    e << -d, d;
    return e;
}

struct CycleMatrix {
    Matrix t_cyc;      // T_cold * T_II * T_hot * T_I over the omega1 eigenbasis
    Matrix t_unitary_f; // T_I, compression (Q_f)
    Matrix t_hot;       // hot-bath stroke, duration r_b * tau_b
    Matrix t_unitary_b; // T_II, expansion (Q_b)
    Matrix t_cold;      // cold-bath stroke, duration (1 - r_b) * tau_b
    double leakage = 0.0; // max column deficit of t_cyc
};

// Thermal kernel dispatch; tau_b = infinity yields the exact Gibbs projector.
inline Matrix thermal_stroke_kernel(const EngineConfig& cfg, double duration, double omega,
                                    double beta) {
    if (cfg.substance.is_ho()) {
        if (!std::isfinite(duration))
            return gibbs_projector(ho_gibbs(beta, omega, cfg.n_cut));
        return ho_thermal_kernel_cached(duration, omega, beta, cfg.kappa, cfg.n_cut);
    }
    const double d = tls_level(omega, cfg.substance.delta);
    if (!std::isfinite(duration)) return gibbs_projector(tls_gibbs(beta, d));
    return tls_thermal_kernel(duration, d, beta, cfg.gamma);
}

inline Matrix unitary_stroke_kernel(const EngineConfig& cfg, double q) {
    return cfg.substance.is_ho() ? ho_unitary_kernel_cached(q, cfg.n_cut) : tls_unitary_kernel(q);
}

inline CycleMatrix build_cycle_matrix(const EngineConfig& cfg, const AdiabaticityPair& pair) {
    cfg.validate();
    CycleMatrix cm;
    cm.t_unitary_f = unitary_stroke_kernel(cfg, pair.q_f);
    cm.t_unitary_b = unitary_stroke_kernel(cfg, pair.q_b);
    cm.t_hot = thermal_stroke_kernel(cfg, cfg.r_b * cfg.tau_b, cfg.omega2, cfg.beta_h);
    cm.t_cold = thermal_stroke_kernel(cfg, (1.0 - cfg.r_b) * cfg.tau_b, cfg.omega1, cfg.beta_c);
    cm.t_cyc = cm.t_cold * (cm.t_unitary_b * (cm.t_hot * cm.t_unitary_f));
    // The expansion stroke multiplies quantum indices by ~omega2/omega1, so
    // hot-tail mass always flows past the basis edge; the composed leakage is
    // reported for diagnostics and only aborts when it would visibly corrupt
    // the moments.
    cm.leakage = max_column_leakage(cm.t_cyc, std::max(1, static_cast<int>(cm.t_cyc.cols()) / 8));
    if (cm.leakage > 1.0e-3) {
        std::ostringstream os;
        os << "build_cycle_matrix: composed leakage " << cm.leakage << "; increase n_cut";
        throw numerical_error(os.str());
    }
    return cm;
}

struct StationaryDistribution {
    Vector p1;                 // normalized fixed vector over the omega1 eigenbasis
    double residual = 0.0;     // ||T p1 - p1||_1 (bounded below by basis leakage)
    double gap_estimate = 1.0; // 1 - |lambda_2| estimated from residual decay
    int iterations = 0;
    bool used_direct_solve = false;
};

// Fixed vector of a column-stochastic matrix by power iteration, falling back
// to a direct nullspace solve of (T - I) when the spectral gap is too small
// for iteration to converge.
inline StationaryDistribution stationary_distribution(const Matrix& t_cyc) {
    const Eigen::Index n = t_cyc.rows();
    if (t_cyc.cols() != n) throw validation_error("stationary_distribution: matrix must be square");

    if ((t_cyc - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1.0e-13)
        throw numerical_error(
            "stationary_distribution: cycle matrix is the identity; fixed point is degenerate");

    StationaryDistribution out;
    Vector p = Vector::Constant(n, 1.0 / static_cast<double>(n));
    double prev_residual = std::numeric_limits<double>::infinity();
    double ratio = 0.0;
    const int max_iter = 100000;
    for (int it = 1; it <= max_iter; ++it) {
        Vector q = t_cyc * p;
        const double mass = q.sum();
        if (!(mass > 0.0)) throw numerical_error("stationary_distribution: probability mass vanished");
        q /= mass;
        const double res = (q - p).cwiseAbs().sum();
        p = q;
        out.iterations = it;
        if (prev_residual < std::numeric_limits<double>::infinity() && prev_residual > 0.0)
            ratio = res / prev_residual;
        prev_residual = res;
        if (res < 1.0e-12) {
            out.gap_estimate = 1.0 - std::min(ratio, 1.0);
            break;
        }
        // stalled iteration with |lambda_2| ~ 1: hand over to the direct solve
        if (it == max_iter || (it > 256 && ratio > 1.0 - 1.0e-6)) {
            Eigen::FullPivLU<Matrix> lu(t_cyc - Matrix::Identity(n, n));
            lu.setThreshold(1.0e-6); // rank decision, relative to the largest pivot
            const Matrix kernel = lu.kernel();
            if (kernel.cols() > 1)
                throw numerical_error(
                    "stationary_distribution: fixed point not unique (spectral gap below 1e-6)");
            Vector k = kernel.col(0);
            if (std::abs(k.sum()) < 1.0e-300)
                throw numerical_error("stationary_distribution: no stationary direction found");
            if (k.sum() < 0.0) k = -k;
            p = k / k.sum();
            out.gap_estimate = 1.0 - std::min(ratio, 1.0);
            out.used_direct_solve = true;
            break;
        }
    }

    const double min_entry = p.minCoeff();
    if (min_entry < -1.0e-12) {
        std::ostringstream os;
        os << "stationary_distribution: negative probability " << min_entry;
        throw numerical_error(os.str());
    }
    p = p.cwiseMax(0.0);
    p /= p.sum();
    out.p1 = p;
    out.residual = (t_cyc * p - p).cwiseAbs().sum();
    return out;
}

// First and second moments of the per-cycle increments
//   a = e2(m) - e1(n)   (compression work),
//   h = e2(k) - e2(m)   (hot-bath heat),
//   b = e1(l) - e2(k)   (expansion work),
// contracted along the measurement chain n -> m -> k -> l. Work is a + b.
// Staged matrix-vector products keep the cost at O(n_cut^2).
struct ChainMoments {
    double total = 0.0; // chain probability mass (1 up to truncation leakage)
    double a1 = 0.0, a2 = 0.0;
    double b1 = 0.0, b2 = 0.0;
    double h1 = 0.0, h2 = 0.0;
    double ab = 0.0, ah = 0.0, bh = 0.0;

    double w_moment(int p) const { return p == 1 ? a1 + b1 : a2 + 2.0 * ab + b2; }
    double q_moment(int s) const { return s == 1 ? h1 : h2; }
    double wq_moment() const { return ah + bh; }

    double moment(int p, int s) const {
        if (p == 0 && s == 0) return total;
        if (s == 0) return w_moment(p);
        if (p == 0) return q_moment(s);
        return wq_moment();
    }
};

inline ChainMoments chain_moments(const EngineConfig& cfg, const CycleMatrix& cm, const Vector& p1) {
    const Vector e1 = basis_energies(cfg, cfg.omega1);
    const Vector e2 = basis_energies(cfg, cfg.omega2);
    const Vector e1sq = e1.cwiseAbs2();
    const Vector e2sq = e2.cwiseAbs2();

    const Matrix& ti = cm.t_unitary_f;
    const Matrix& th = cm.t_hot;
    const Matrix& tii = cm.t_unitary_b;

    // stage 1: compression stroke, weight a(m, n) = e2(m) - e1(n)
    const Vector m0 = ti * p1;
    const Vector ti_e1p = ti * e1.cwiseProduct(p1);
    const Vector m1 = e2.cwiseProduct(m0) - ti_e1p;
    const Vector m2 = e2sq.cwiseProduct(m0) - 2.0 * e2.cwiseProduct(ti_e1p) + ti * e1sq.cwiseProduct(p1);

    // stage 2: hot stroke, weight h(k, m) = e2(k) - e2(m)
    const Vector k0 = th * m0;
    const Vector th_e2m0 = th * e2.cwiseProduct(m0);
    const Vector kh1 = e2.cwiseProduct(k0) - th_e2m0;
    const Vector kh2 = e2sq.cwiseProduct(k0) - 2.0 * e2.cwiseProduct(th_e2m0) + th * e2sq.cwiseProduct(m0);
    const Vector ka1 = th * m1;
    const Vector kah = e2.cwiseProduct(ka1) - th * e2.cwiseProduct(m1);
    const Vector ka2 = th * m2;

    // stage 3: expansion stroke, weight b(l, k) = e1(l) - e2(k), contracted over l
    const Vector colsum = tii.transpose() * Vector::Ones(tii.rows());
    const Vector tii_e1 = tii.transpose() * e1;
    const Vector b1v = tii_e1 - e2.cwiseProduct(colsum);
    const Vector b2v = tii.transpose() * e1sq - 2.0 * e2.cwiseProduct(tii_e1) + e2sq.cwiseProduct(colsum);

    ChainMoments cmoms;
    cmoms.total = colsum.dot(k0);
    cmoms.a1 = colsum.dot(ka1);
    cmoms.a2 = colsum.dot(ka2);
    cmoms.h1 = colsum.dot(kh1);
    cmoms.h2 = colsum.dot(kh2);
    cmoms.b1 = b1v.dot(k0);
    cmoms.b2 = b2v.dot(k0);
    cmoms.ab = b1v.dot(ka1);
    cmoms.ah = colsum.dot(kah);
    cmoms.bh = b1v.dot(kh1);
    return cmoms;
}

// <w^p q_h^s> by explicit summation over measurement outcomes, with the
// initial omega1-basis populations p1.
inline double moment_by_summation(const EngineConfig& cfg, const AdiabaticityPair& pair,
                                  const Vector& p1, int p, int s) {
    if (p < 0 || s < 0 || p + s > 2) throw validation_error("moment_by_summation: need 0 <= p + s <= 2");
    const CycleMatrix cm = build_cycle_matrix(cfg, pair);
    return chain_moments(cfg, cm, p1).moment(p, s);
}

struct FiniteCycleResult {
    CycleStatistics stats;
    StationaryDistribution stationary;
    double leakage = 0.0;
    AdiabaticityPair pair;
};

inline FiniteCycleResult statistics_finite_detailed(const EngineConfig& cfg,
                                                    const AdiabaticityPair& pair) {
    FiniteCycleResult out;
    out.pair = pair;
    const CycleMatrix cm = build_cycle_matrix(cfg, pair);
    out.leakage = cm.leakage;
    out.stationary = stationary_distribution(cm.t_cyc);
    const ChainMoments moms = chain_moments(cfg, cm, out.stationary.p1);
    out.stats = assemble_statistics(moms.w_moment(1), moms.w_moment(2), moms.q_moment(1),
                                    moms.q_moment(2));
    return out;
}

// Statistics of the stationary (limit-cycle) state with finite-duration
// thermal strokes.
inline CycleStatistics statistics_finite(const EngineConfig& cfg, const AdiabaticityPair& pair) {
    return statistics_finite_detailed(cfg, pair).stats;
}

inline CycleStatistics statistics_finite(const EngineConfig& cfg) {
    cfg.validate();
    return statistics_finite(cfg, adiabaticity_pair(cfg));
}

} // namespace qotto
