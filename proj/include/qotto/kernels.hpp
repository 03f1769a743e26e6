// kernels.hpp — transition-probability matrices for the unitary work strokes
// and the finite-time thermal strokes, plus Gibbs population vectors.
//
// Convention: kernels are column-stochastic with entry (out, in); HO indices
// ascend n = 0..n_cut-1, TLS index 0 is the ground state (-Delta), 1 the
// excited state (+Delta).

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qotto/common.hpp"
#include "qotto/model.hpp"

namespace qotto {

// largest column deficit 1 - colsum over the leading columns (the trailing
// columns of a truncated HO kernel legitimately leak into the cut tail)
inline double max_column_leakage(const Matrix& t, int columns) {
    double worst = 0.0;
    for (int n = 0; n < columns && n < t.cols(); ++n)
        worst = std::max(worst, 1.0 - t.col(n).sum());
    return worst;
}

// Unitary work-stroke kernel for the HO. The parity-resolved probabilities
// T(m, n) have the bivariate generating function
//   sum_{m,n} T(m,n) y^m x^n = sqrt(2 / S(x, y)),
//   S = Q(1-x^2)(1-y^2) + (1+x^2)(1+y^2) - 4xy,
// whose coefficients are computed by the forward recurrence induced by
// 2 S dG/dy + (dS/dy) G = 0. The dependency lattice is causal in m, so the
// n_cut x n_cut block is exact regardless of truncation; the recurrence is
// stable at every index (the closed hypergeometric form of the same numbers
// cancels catastrophically beyond index ~50 and is kept as a test reference).
inline Matrix ho_unitary_kernel(double Q, int n_cut) {
    if (!(Q >= 1.0 - 1.0e-8)) throw validation_error("ho_unitary_kernel: Q must be >= 1");
    if (n_cut < 2) throw validation_error("ho_unitary_kernel: n_cut must be >= 2");

    if (std::abs(Q - 1.0) < 1.0e-8) return Matrix::Identity(n_cut, n_cut);

    using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const long double q = Q;
    const long double rho = (q - 1.0L) / (q + 1.0L);
    MatrixL g = MatrixL::Zero(n_cut, n_cut); // g(m, n), same-parity lattice

    // column 0: squeezed-vacuum probabilities T(2k, 0) = C(2k, k)/4^k rho^k sech
    g(0, 0) = std::sqrt(2.0L / (q + 1.0L));
    for (int m = 2; m < n_cut; m += 2) g(m, 0) = g(m - 2, 0) * rho * (m - 1.0L) / m;

    // column 1 from the n = 0 slice of the recurrence
    for (int m = 1; m < n_cut; m += 2) {
        long double acc = 4.0L * g(m - 1, 0);
        if (m >= 2) acc += (q - 1.0L) * 2.0L * g(m - 2, 1);
        g(m, 1) = acc / ((q + 1.0L) * 2.0L);
    }

    // general step: column n+1 from columns n and n-1
    for (int n = 1; n + 1 < n_cut; ++n) {
        for (int m = (n + 1) % 2; m < n_cut; m += 2) {
            long double acc = (m >= 1) ? 4.0L * (2.0L * n + 1.0L) * g(m - 1, n) : 0.0L;
            acc += (q - 1.0L) * 2.0L * n * g(m, n - 1);
            if (m >= 2) {
                acc += (q - 1.0L) * (2.0L * n + 2.0L) * g(m - 2, n + 1);
                acc -= (q + 1.0L) * 2.0L * n * g(m - 2, n - 1);
            }
            g(m, n + 1) = acc / ((q + 1.0L) * (2.0L * n + 2.0L));
        }
    }

    Matrix t(n_cut, n_cut);
    for (int n = 0; n < n_cut; ++n)
        for (int m = 0; m < n_cut; ++m) {
            const double value = static_cast<double>(g(m, n));
            if (value < -1.0e-12) {
                std::ostringstream os;
                os << "ho_unitary_kernel: entry (" << m << ", " << n << ") = " << value
                   << " below -1e-12";
                throw numerical_error(os.str());
            }
            t(m, n) = std::max(value, 0.0);
        }
    t = 0.5 * (t + t.transpose()).eval(); // coefficients are symmetric; trim rounding skew

    // The kernel spreads multiplicatively (support of column n reaches
    // m ~ n (Q + sqrt(Q^2 - 1))), so only the leading eighth of the columns
    // can be expected to stay clean at any truncation. Accuracy for the
    // weighted moments is guarded separately by n_cut convergence checks.
    const double leak = max_column_leakage(t, std::max(1, n_cut / 8));
    if (leak > 1.0e-6) {
        std::ostringstream os;
        os << "ho_unitary_kernel: truncation leakage " << leak
           << " in the leading columns; increase n_cut (Q = " << Q << ", n_cut = " << n_cut << ")";
        throw numerical_error(os.str());
    }
    return t;
}

// Tridiagonal generator of the bosonic birth-death rate equation induced by
// the thermal dissipator: decay rate 2*kappa*(nbar+1)*n, excitation rate
// 2*kappa*nbar*(n+1). Columns at the truncation edge lose the up-flux, which
// surfaces as reported leakage.
inline Matrix ho_rate_generator(double omega, double beta, double kappa, int n_cut) {
    const double nbar = bose_occupation(beta, omega);
    Matrix gen = Matrix::Zero(n_cut, n_cut);
    for (int n = 0; n < n_cut; ++n) {
        if (n + 1 < n_cut) {
            gen(n, n + 1) += 2.0 * kappa * (nbar + 1.0) * (n + 1);
            gen(n + 1, n) += 2.0 * kappa * nbar * (n + 1);
        }
        gen(n, n) -= 2.0 * kappa * ((nbar + 1.0) * n + nbar * (n + 1));
    }
    return gen;
}

// Finite-time thermal kernel for the HO: the propagator exp(L tau) of the
// birth-death rate equation, with relaxation variable theta = e^{-2 kappa tau}
// and nu = e^{-beta omega}. Evaluated by uniformization (L = Lambda (P - I)
// with P non-negative) over a short step followed by repeated squaring, so
// every entry is a sum of products of non-negative terms. The closed-form
// coefficient sum for the same propagator alternates in sign and loses to
// cancellation at large indices; it survives as a test reference.
// tau = 0 returns the identity analytically; theta below 1e-15 returns the
// exact Gibbs columns (1 - nu) nu^n.
inline Matrix ho_thermal_kernel(double tau, double omega, double beta, double kappa, int n_cut) {
    if (!(tau >= 0.0)) throw validation_error("ho_thermal_kernel: tau must be non-negative");
    if (!(kappa > 0.0)) throw validation_error("ho_thermal_kernel: kappa must be positive");
    if (!(omega > 0.0) || !(beta > 0.0)) throw validation_error("ho_thermal_kernel: omega, beta must be positive");
    if (n_cut < 2) throw validation_error("ho_thermal_kernel: n_cut must be >= 2");

    if (tau == 0.0) return Matrix::Identity(n_cut, n_cut);
    if (std::exp(-2.0 * kappa * tau) < 1.0e-15) {
        Vector gibbs(n_cut);
        const double nu = std::exp(-beta * omega);
        double w = 1.0 - nu;
        for (int n = 0; n < n_cut; ++n) {
            gibbs[n] = w;
            w *= nu;
        }
        return gibbs * Eigen::RowVectorXd::Ones(n_cut);
    }

    const Matrix gen = ho_rate_generator(omega, beta, kappa, n_cut);
    const double rate_scale = gen.diagonal().cwiseAbs().maxCoeff();

    int squarings = 0;
    double step = tau;
    while (rate_scale * step > 0.5) {
        step *= 0.5;
        ++squarings;
    }

    // exp(L*step) = e^{-Lambda*step} sum_k (Lambda*step)^k / k! P^k, P = I + L/Lambda
    const double lam_step = rate_scale * step;
    const Matrix p_step = Matrix::Identity(n_cut, n_cut) + gen / rate_scale;
    Matrix term = Matrix::Identity(n_cut, n_cut);
    Matrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = (p_step * term * (lam_step / k)).eval();
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1.0e-22) break;
    }
    Matrix t = std::exp(-lam_step) * sum;
    for (int s = 0; s < squarings; ++s) t = (t * t).eval();

    for (int l = 0; l < n_cut; ++l)
        for (int n = 0; n < n_cut; ++n)
            if (t(n, l) < -1.0e-12) {
                std::ostringstream os;
                os << "ho_thermal_kernel: entry (" << n << ", " << l << ") = " << t(n, l)
                   << " below -1e-12";
                throw numerical_error(os.str());
            }
    t = t.cwiseMax(0.0).eval();
    return t;
}

// 2x2 doubly stochastic work-stroke kernel for the TLS.
inline Matrix tls_unitary_kernel(double Q) {
    if (!(Q >= 0.0 && Q <= 1.0)) throw validation_error("tls_unitary_kernel: Q must lie in [0, 1]");
    Matrix t(2, 2);
    t << Q, 1.0 - Q, 1.0 - Q, Q;
    return t;
}

// Finite-time thermal kernel for the TLS with level splitting +/- Delta.
// Analytic solution of the two-level population rate equation: the excited
// population relaxes to the Gibbs value with rate 2*gamma*(2*mbar+1) where
// mbar is the Bose occupation at the transition energy 2*Delta. Columns sum
// to one exactly.
inline Matrix tls_thermal_kernel(double tau, double Delta, double beta, double gamma) {
    if (!(tau >= 0.0)) throw validation_error("tls_thermal_kernel: tau must be non-negative");
    if (!(gamma > 0.0)) throw validation_error("tls_thermal_kernel: gamma must be positive");
    if (!(Delta > 0.0) || !(beta > 0.0)) throw validation_error("tls_thermal_kernel: Delta, beta must be positive");

    const double x = beta * Delta;
    const double p_exc = 1.0 / (1.0 + std::exp(2.0 * x)); // Gibbs excited population
    const double rate = 2.0 * gamma / std::tanh(x);       // 2*gamma*(2*mbar+1)
    const double decay = std::exp(-rate * tau);

    Matrix t(2, 2);
    const double relax = 1.0 - decay;
    t(1, 1) = p_exc + (1.0 - p_exc) * decay; // excited stays excited
    t(0, 1) = 1.0 - t(1, 1);
    t(1, 0) = p_exc * relax;                 // ground gets excited
    t(0, 0) = 1.0 - t(1, 0);
    return t;
}

// Gibbs populations over the truncated HO basis (not renormalized: the
// truncation tail is reported as leakage, matching the kernel limits).
inline Vector ho_gibbs(double beta, double omega, int n_cut) {
    if (!(beta > 0.0) || !(omega > 0.0)) throw validation_error("ho_gibbs: beta, omega must be positive");
    Vector p(n_cut);
    const double nu = std::exp(-beta * omega);
    double w = 1.0 - nu;
    for (int n = 0; n < n_cut; ++n) {
        p[n] = w;
        w *= nu;
    }
    return p;
}

// Gibbs populations (ground, excited) of the TLS at splitting +/- Delta.
inline Eigen::Vector2d tls_gibbs(double beta, double Delta) {
    const double p_exc = 1.0 / (1.0 + std::exp(2.0 * beta * Delta));
    return Eigen::Vector2d(1.0 - p_exc, p_exc);
}

// Rank-one perfect-thermalization kernel: every column is the Gibbs vector.
inline Matrix gibbs_projector(const Vector& gibbs) {
    return gibbs * Eigen::RowVectorXd::Ones(gibbs.size());
}

namespace detail {

struct UnitaryKernelKey {
    std::uint64_t q;
    int n_cut;
    bool operator==(const UnitaryKernelKey&) const = default;
};
struct UnitaryKernelKeyHash {
    std::size_t operator()(const UnitaryKernelKey& k) const noexcept {
        return hash_mix(hash_mix(0, k.q), static_cast<std::uint64_t>(k.n_cut));
    }
};

struct ThermalKernelKey {
    std::uint64_t tau, omega, beta, rate;
    int n_cut;
    bool operator==(const ThermalKernelKey&) const = default;
};
struct ThermalKernelKeyHash {
    std::size_t operator()(const ThermalKernelKey& k) const noexcept {
        std::size_t h = hash_mix(0, k.tau);
        h = hash_mix(h, k.omega);
        h = hash_mix(h, k.beta);
        h = hash_mix(h, k.rate);
        return hash_mix(h, static_cast<std::uint64_t>(k.n_cut));
    }
};

inline MemoCache<UnitaryKernelKey, Matrix, UnitaryKernelKeyHash>& ho_unitary_cache() {
    static MemoCache<UnitaryKernelKey, Matrix, UnitaryKernelKeyHash> cache(1024);
    return cache;
}

inline MemoCache<ThermalKernelKey, Matrix, ThermalKernelKeyHash>& ho_thermal_cache() {
    static MemoCache<ThermalKernelKey, Matrix, ThermalKernelKeyHash> cache(1024);
    return cache;
}

} // namespace detail

inline Matrix ho_unitary_kernel_cached(double Q, int n_cut) {
    return detail::ho_unitary_cache().get_or_compute(
        detail::UnitaryKernelKey{bits_of(Q), n_cut}, [&] { return ho_unitary_kernel(Q, n_cut); });
}

inline Matrix ho_thermal_kernel_cached(double tau, double omega, double beta, double kappa, int n_cut) {
    return detail::ho_thermal_cache().get_or_compute(
        detail::ThermalKernelKey{bits_of(tau), bits_of(omega), bits_of(beta), bits_of(kappa), n_cut},
        [&] { return ho_thermal_kernel(tau, omega, beta, kappa, n_cut); });
}

} // namespace qotto
