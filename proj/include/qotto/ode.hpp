// ode.hpp — adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4)).
//
// The stroke dynamics integrated here (classical HO equations of motion and
// the 2x2 Schrodinger equation) are smooth and non-stiff, so an explicit
// adaptive pair with a proportional step controller is sufficient.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "qotto/common.hpp"

namespace qotto {

struct OdeStats {
    std::int64_t steps_accepted = 0;
    std::int64_t steps_rejected = 0;
    double final_step = 0.0;
};

namespace detail {

// abs-squared that works for both real and complex scalars
template <class Scalar>
double abs2_of(const Scalar& v) {
    using std::abs;
    const double a = static_cast<double>(abs(v));
    return a * a;
}

} // namespace detail

// Integrates y' = f(t, y) from t0 to t1 and returns y(t1).
// State is any fixed-size Eigen vector (real or complex scalar).
template <class State, class Rhs>
State integrate_adaptive(Rhs&& f, State y, double t0, double t1, double rtol, double atol,
                         OdeStats* stats = nullptr) {
    if (!(rtol > 0.0) || !(atol > 0.0)) throw validation_error("integrate_adaptive: tolerances must be positive");
    const double span = t1 - t0;
    if (span == 0.0) return y;
    if (!(span > 0.0)) throw validation_error("integrate_adaptive: t1 must exceed t0");

    // Dormand-Prince 5(4) tableau (FSAL)
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference between 5th- and embedded 4th-order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t0), std::abs(t1));
    const std::int64_t max_steps = 50'000'000;

    double t = t0;
    double h = std::clamp(span * 1.0e-3, hmin > 0 ? hmin : 1e-300, span);
    State k1 = f(t, y);
    OdeStats local;

    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        if (local.steps_accepted + local.steps_rejected > max_steps) {
            std::ostringstream os;
            os << "integrate_adaptive: step budget exhausted at t = " << t << " (h = " << h << ")";
            throw numerical_error(os.str());
        }

        const State k2 = f(t + c2 * h, (y + h * (a21 * k1)).eval());
        const State k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
        const State k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        const State k5 = f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        const State k6 = f(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        const State y5 = (y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)).eval();
        const State k7 = f(t + h, y5);
        const State err_vec = (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).eval();

        // scaled RMS error
        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            using std::abs;
            const double scale = atol + rtol * std::max(abs(y[i]), abs(y5[i]));
            err += detail::abs2_of(err_vec[i]) / (scale * scale);
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        if (err <= 1.0) {
            t += h;
            y = y5;
            k1 = k7; // FSAL
            ++local.steps_accepted;
        } else {
            ++local.steps_rejected;
        }

        const double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < hmin && t < t1) {
            std::ostringstream os;
            os << "integrate_adaptive: step size underflow at t = " << t << " (h = " << h << ")";
            throw numerical_error(os.str());
        }
    }

    local.final_step = h;
    if (stats) *stats = local;
    return y;
}

} // namespace qotto
