// adiabaticity.hpp — protocol-dependent nonadiabaticity parameters Q_f, Q_b.
//
// HO: Q is assembled from two independent solutions of the classical equation
// of motion  X'' + omega^2(t) X = 0  and equals 1 exactly in the adiabatic
// limit, approaching (w_a^2 + w_b^2)/(2 w_a w_b) for an instantaneous quench.
// TLS: Q is the staying probability in the instantaneous energy eigenstates
// under the 2x2 Schrodinger evolution with H(t) = omega(t) sigma_z + delta sigma_x.

#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qotto/model.hpp"
#include "qotto/ode.hpp"

namespace qotto {

struct AdiabaticityPair {
    double q_f = 1.0; // compression stroke (omega1 -> omega2)
    double q_b = 1.0; // expansion stroke (omega2 -> omega1)
};

// Classical-trajectory functional for the HO work stroke.
// State layout: (X, X', Y, Y') with X(0)=0, X'(0)=1, Y(0)=1, Y'(0)=0.
inline double ho_Q(const WorkProtocol& protocol, double tol = 1.0e-10) {
    if (!protocol.schedule) throw validation_error("ho_Q: protocol has no schedule");
    if (!(tol > 0.0)) throw validation_error("ho_Q: tolerance must be positive");

    using State = Eigen::Vector4d;
    const auto& omega = protocol.schedule;
    auto rhs = [&omega](double t, const State& s) -> State {
        const double w = omega(t);
        const double w2 = w * w;
        return State(s[1], -w2 * s[0], s[3], -w2 * s[2]);
    };

    State s0(0.0, 1.0, 1.0, 0.0);
    const State s = integrate_adaptive(rhs, s0, 0.0, protocol.duration, tol, tol * 1.0e-2);

    const double wronskian = s[1] * s[2] - s[0] * s[3]; // X'Y - XY' = 1 conserved
    if (std::abs(wronskian - 1.0) > 1.0e-8) {
        std::ostringstream os;
        os << "ho_Q: Wronskian drift " << wronskian - 1.0 << " exceeds 1e-8 (duration "
           << protocol.duration << ")";
        throw numerical_error(os.str());
    }

    const double wa = protocol.omega_start;
    const double wb = protocol.omega_end;
    const double q = (wa * wa * (wb * wb * s[0] * s[0] + s[1] * s[1]) +
                      (wb * wb * s[2] * s[2] + s[3] * s[3])) /
                     (2.0 * wa * wb);
    if (q < 1.0 - 10.0 * tol) {
        std::ostringstream os;
        os << "ho_Q: computed Q = " << q << " below the adiabatic floor";
        throw numerical_error(os.str());
    }
    return q;
}

// Instantaneous eigenstate of omega*sigma_z + delta*sigma_x with eigenvalue
// +sqrt(omega^2+delta^2), expressed in the fixed sigma_z basis.
inline Eigen::Vector2cd tls_plus_state(double omega, double delta) {
    const double theta = std::atan2(delta, omega);
    return Eigen::Vector2cd(std::cos(0.5 * theta), std::sin(0.5 * theta));
}

// Staying probability |<omega_end,+| U |omega_start,+>|^2. Propagation is done
// in the fixed sigma_z basis; instantaneous eigenvectors enter only at the
// endpoints.
inline double tls_Q(const WorkProtocol& protocol, double delta, double tol = 1.0e-10) {
    if (!protocol.schedule) throw validation_error("tls_Q: protocol has no schedule");
    if (!(delta > 0.0)) throw validation_error("tls_Q: delta must be positive");
    if (!(tol > 0.0)) throw validation_error("tls_Q: tolerance must be positive");

    using State = Eigen::Vector4cd; // U column-major: (U00, U10, U01, U11)
    const std::complex<double> mi(0.0, -1.0);
    const auto& omega = protocol.schedule;
    auto rhs = [&omega, delta, mi](double t, const State& s) -> State {
        const double w = omega(t);
        // U' = -i H U with H = [[w, delta], [delta, -w]]
        return State(mi * (w * s[0] + delta * s[1]), mi * (delta * s[0] - w * s[1]),
                     mi * (w * s[2] + delta * s[3]), mi * (delta * s[2] - w * s[3]));
    };

    State u0;
    u0 << 1.0, 0.0, 0.0, 1.0;
    const State u = integrate_adaptive(rhs, u0, 0.0, protocol.duration, tol, tol * 1.0e-2);

    Eigen::Matrix2cd U;
    U << u[0], u[2], u[1], u[3];
    const double unitarity = (U.adjoint() * U - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    if (unitarity > 1.0e-8) {
        std::ostringstream os;
        os << "tls_Q: unitarity deviation " << unitarity << " exceeds 1e-8";
        throw numerical_error(os.str());
    }

    const Eigen::Vector2cd plus_in = tls_plus_state(protocol.omega_start, delta);
    const Eigen::Vector2cd plus_out = tls_plus_state(protocol.omega_end, delta);
    const double q = std::norm(plus_out.dot(U * plus_in));
    return std::clamp(q, 0.0, 1.0);
}

namespace detail {

struct QKey {
    int kind;
    std::uint64_t omega_start, omega_end, delta, duration, tol;
    int family;
    bool operator==(const QKey&) const = default;
};

struct QKeyHash {
    std::size_t operator()(const QKey& k) const noexcept {
        std::size_t h = hash_mix(0, static_cast<std::uint64_t>(k.kind));
        h = hash_mix(h, k.omega_start);
        h = hash_mix(h, k.omega_end);
        h = hash_mix(h, k.delta);
        h = hash_mix(h, k.duration);
        h = hash_mix(h, k.tol);
        h = hash_mix(h, static_cast<std::uint64_t>(k.family));
        return h;
    }
};

inline MemoCache<QKey, double, QKeyHash>& q_cache() {
    static MemoCache<QKey, double, QKeyHash> cache(1 << 16);
    return cache;
}

} // namespace detail

// Q for one stroke of the given substance, memoized for the linear protocol
// family (sweeps revisit identical stroke durations thousands of times).
inline double stroke_Q(const WorkingSubstance& substance, const WorkProtocol& protocol, double tol) {
    auto compute = [&] {
        return substance.is_ho() ? ho_Q(protocol, tol) : tls_Q(protocol, substance.delta, tol);
    };
    if (protocol.family != WorkProtocol::Family::LinearOmegaSquared) return compute();

    const detail::QKey key{static_cast<int>(substance.kind), bits_of(protocol.omega_start),
                           bits_of(protocol.omega_end),      bits_of(substance.delta),
                           bits_of(protocol.duration),       bits_of(tol),
                           static_cast<int>(protocol.family)};
    return detail::q_cache().get_or_compute(key, compute);
}

// (Q_f, Q_b) for the configured cycle: compression over r_u*tau_u sweeping
// omega1 -> omega2, expansion over (1-r_u)*tau_u sweeping back.
inline AdiabaticityPair adiabaticity_pair(const EngineConfig& cfg) {
    cfg.validate();
    const WorkProtocol forward = make_linear_protocol(cfg.omega1, cfg.omega2, cfg.r_u * cfg.tau_u);
    const WorkProtocol backward = make_linear_protocol(cfg.omega2, cfg.omega1, (1.0 - cfg.r_u) * cfg.tau_u);
    return {stroke_Q(cfg.substance, forward, cfg.ode_tol),
            stroke_Q(cfg.substance, backward, cfg.ode_tol)};
}

} // namespace qotto
