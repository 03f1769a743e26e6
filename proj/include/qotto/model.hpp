// model.hpp — working substances, engine configuration, work protocols,
// and the closed-form quasi-static / sudden-quench / Carnot limits.
//
// Units: omega1 sets the frequency scale (default 1), times are in 1/omega1,
// energies in omega1, inverse temperatures in 1/omega1. hbar = k_B = 1.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "qotto/common.hpp"

namespace qotto {

enum class SubstanceKind { HarmonicOscillator, TwoLevelSystem };

struct WorkingSubstance {
    SubstanceKind kind = SubstanceKind::HarmonicOscillator;
    double delta = 0.0; // sigma_x coefficient of the TLS Hamiltonian; unused for HO

    static WorkingSubstance harmonic_oscillator() { return {SubstanceKind::HarmonicOscillator, 0.0}; }
    static WorkingSubstance two_level(double delta) { return {SubstanceKind::TwoLevelSystem, delta}; }

    bool is_ho() const { return kind == SubstanceKind::HarmonicOscillator; }
    bool is_tls() const { return kind == SubstanceKind::TwoLevelSystem; }
};

// Bose occupation of a bath mode at angular frequency omega.
inline double bose_occupation(double beta, double omega) {
    return 1.0 / std::expm1(beta * omega);
}

// TLS eigenvalue magnitude: H = omega*sigma_z + delta*sigma_x has eigenvalues
// +/- sqrt(omega^2 + delta^2); the transition energy is twice this.
inline double tls_level(double omega, double delta) {
    return std::hypot(omega, delta);
}

// Bath occupation entering the TLS dissipator, taken at the transition
// energy 2*sqrt(omega^2 + delta^2).
inline double tls_bath_occupation(double beta, double omega, double delta) {
    return bose_occupation(beta, 2.0 * tls_level(omega, delta));
}

inline double infinite_time() { return std::numeric_limits<double>::infinity(); }

// Full physical + numerical parameterization of one cycle. Immutable in
// practice: construct, validate(), then share read-only across workers.
struct EngineConfig {
    double omega1 = 1.0;  // frequency at the cold end of the work strokes
    double omega2 = 2.0;  // frequency at the hot end; must exceed omega1
    double beta_h = 0.1;  // hot-bath inverse temperature
    double beta_c = 0.5;  // cold-bath inverse temperature; must exceed beta_h
    double tau_u = 5.0;   // total duration of the two work strokes
    double tau_b = infinite_time(); // total duration of the two heat strokes
    double r_u = 0.5;     // fraction of tau_u spent on compression
    double r_b = 0.5;     // fraction of tau_b spent on the hot-bath stroke
    double kappa = 0.01;  // HO damping rate
    double gamma = 0.01;  // TLS damping rate
    int n_cut = 50;       // HO basis truncation
    WorkingSubstance substance = WorkingSubstance::harmonic_oscillator();

    double weak_coupling_max = 0.05; // bound on kappa*(nbar+1)/omega per bath
    double r_min = 1.0e-3;           // admissible band for r_u, r_b
    double ode_tol = 1.0e-10;        // relative tolerance for stroke integration

    bool perfect_thermalization() const { return !std::isfinite(tau_b); }

    void validate() const;
};

inline void EngineConfig::validate() const {
    auto fail = [](const std::string& msg) { throw validation_error("config: " + msg); };

    if (!(omega1 > 0.0)) fail("omega1 must be positive");
    if (!(omega2 > omega1)) fail("omega2 must exceed omega1 (engine orientation)");
    if (!(beta_h > 0.0)) fail("beta_h must be positive");
    if (!(beta_c > beta_h)) fail("beta_c must exceed beta_h (engine orientation)");
    if (!(tau_u > 0.0)) fail("tau_u must be positive");
    if (!(tau_b >= 0.0)) fail("tau_b must be non-negative");
    if (!(r_u >= r_min && r_u <= 1.0 - r_min)) {
        std::ostringstream os;
        os << "r_u = " << r_u << " outside [" << r_min << ", " << 1.0 - r_min << "]";
        fail(os.str());
    }
    if (!(r_b >= r_min && r_b <= 1.0 - r_min)) {
        std::ostringstream os;
        os << "r_b = " << r_b << " outside [" << r_min << ", " << 1.0 - r_min << "]";
        fail(os.str());
    }
    if (n_cut < 2) fail("n_cut must be at least 2");
    if (!(ode_tol > 0.0)) fail("ode_tol must be positive");

    if (substance.is_tls() && !(substance.delta > 0.0))
        fail("delta must be positive for a two-level substance");

    if (substance.is_ho()) {
        if (!(kappa > 0.0)) fail("kappa must be positive");
        const double wc1 = kappa * (bose_occupation(beta_c, omega1) + 1.0) / omega1;
        const double wc2 = kappa * (bose_occupation(beta_h, omega2) + 1.0) / omega2;
        if (wc1 > weak_coupling_max || wc2 > weak_coupling_max) {
            std::ostringstream os;
            os << "weak-coupling bound violated: kappa*(nbar+1)/omega = "
               << std::max(wc1, wc2) << " > " << weak_coupling_max;
            fail(os.str());
        }
    } else {
        if (!(gamma > 0.0)) fail("gamma must be positive");
        const double d1 = tls_level(omega1, substance.delta);
        const double d2 = tls_level(omega2, substance.delta);
        const double wc1 = gamma * (tls_bath_occupation(beta_c, omega1, substance.delta) + 1.0) / d1;
        const double wc2 = gamma * (tls_bath_occupation(beta_h, omega2, substance.delta) + 1.0) / d2;
        if (wc1 > weak_coupling_max || wc2 > weak_coupling_max) {
            std::ostringstream os;
            os << "weak-coupling bound violated: gamma*(mbar+1)/Delta = "
               << std::max(wc1, wc2) << " > " << weak_coupling_max;
            fail(os.str());
        }
    }
}

// A frequency schedule omega(t) over one work stroke.
struct WorkProtocol {
    enum class Family { LinearOmegaSquared, Custom };

    double omega_start = 1.0;
    double omega_end = 1.0;
    double duration = 1.0;
    std::function<double(double)> schedule; // t in [0, duration] -> omega(t) > 0
    Family family = Family::Custom;
};

// Default protocol family: omega^2(t) interpolates linearly between the
// squared endpoint frequencies.
inline WorkProtocol make_linear_protocol(double omega_start, double omega_end, double duration) {
    if (!(duration > 0.0)) throw validation_error("protocol: duration must be positive");
    if (!(omega_start > 0.0) || !(omega_end > 0.0))
        throw validation_error("protocol: frequencies must be positive");

    WorkProtocol p;
    p.omega_start = omega_start;
    p.omega_end = omega_end;
    p.duration = duration;
    p.family = WorkProtocol::Family::LinearOmegaSquared;
    const double w2a = omega_start * omega_start;
    const double w2b = omega_end * omega_end;
    p.schedule = [w2a, w2b, duration](double t) {
        return std::sqrt(w2a + (w2b - w2a) * (t / duration));
    };
    return p;
}

// Quasi-static (tau_u -> infinity) work output of the HO engine:
//   -<w> = (omega2 - omega1)/2 * [coth(beta_h*omega2/2) - coth(beta_c*omega1/2)].
inline double quasistatic_work_ho(const EngineConfig& cfg) {
    cfg.validate();
    if (!cfg.substance.is_ho())
        throw validation_error("quasistatic_work_ho requires a harmonic-oscillator substance");
    const double coth_h = 1.0 / std::tanh(0.5 * cfg.beta_h * cfg.omega2);
    const double coth_c = 1.0 / std::tanh(0.5 * cfg.beta_c * cfg.omega1);
    return 0.5 * (cfg.omega2 - cfg.omega1) * (coth_h - coth_c);
}

// Work standard deviation in the same limit. The two measured occupations are
// independent Bose-distributed numbers, so the variances add:
//   sigma_w^2 = (omega2-omega1)^2/4 * [csch^2(beta_c*omega1/2) + csch^2(beta_h*omega2/2)].
inline double quasistatic_work_stddev_ho(const EngineConfig& cfg) {
    cfg.validate();
    if (!cfg.substance.is_ho())
        throw validation_error("quasistatic_work_stddev_ho requires a harmonic-oscillator substance");
    const double csch_c = 1.0 / std::sinh(0.5 * cfg.beta_c * cfg.omega1);
    const double csch_h = 1.0 / std::sinh(0.5 * cfg.beta_h * cfg.omega2);
    return 0.5 * (cfg.omega2 - cfg.omega1) * std::sqrt(csch_c * csch_c + csch_h * csch_h);
}

// Quasi-static reliability R_w = -<w>/sigma_w.
inline double quasistatic_reliability_ho(const EngineConfig& cfg) {
    const double work = quasistatic_work_ho(cfg);
    if (!(work > 0.0))
        throw validation_error("quasistatic_reliability_ho: not in engine regime (-<w> <= 0)");
    return work / quasistatic_work_stddev_ho(cfg);
}

// Nonadiabaticity parameter of an instantaneous HO quench between two
// frequencies: Q = (w_a^2 + w_b^2) / (2 w_a w_b) >= 1.
inline double sudden_quench_Q_ho(double omega_start, double omega_end) {
    if (!(omega_start > 0.0) || !(omega_end > 0.0))
        throw validation_error("sudden_quench_Q_ho: frequencies must be positive");
    return (omega_start * omega_start + omega_end * omega_end) / (2.0 * omega_start * omega_end);
}

inline double carnot_efficiency(const EngineConfig& cfg) {
    if (!(cfg.beta_c > 0.0) || !(cfg.beta_h >= 0.0) || !(cfg.beta_c >= cfg.beta_h))
        throw validation_error("carnot_efficiency: requires beta_c >= beta_h > 0");
    return 1.0 - cfg.beta_h / cfg.beta_c;
}

} // namespace qotto
