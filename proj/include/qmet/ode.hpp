// ode.hpp — adaptive Dormand-Prince 4(5) integration for small fixed-size systems

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qmet::ode {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    double initial_step = 1e-4;
    double min_step = 1e-14;
    std::size_t max_steps = 2000000;
};

class StepSizeUnderflow : public std::runtime_error {
  public:
    explicit StepSizeUnderflow(double t)
        : std::runtime_error("ODE step size underflow at t = " + std::to_string(t)) {}
};

// Integrate dy/dt = f(t, y) from t0 to t1; y is updated in place.
// State must be an Eigen type supporting +, scalar*, norm().
template <typename State, typename F>
void integrate(const F& f, State& y, double t0, double t1, const Options& opts = {}) {
    if (t1 < t0) throw std::invalid_argument("ode::integrate: t1 < t0");
    if (t1 == t0) return;

    // Dormand-Prince coefficients
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
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double t = t0;
    double h = std::min(opts.initial_step, t1 - t0);
    State k1 = f(t, y);
    for (std::size_t step = 0; step < opts.max_steps; ++step) {
        if (t1 - t <= 1e-14 * std::max(1.0, std::abs(t1))) return;
        if (t + h > t1) h = t1 - t;

        const State k2 = f(t + c2 * h, State(y + h * a21 * k1));
        const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
        const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const State k6 = f(
            t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = f(t + h, y5);
        const State err_vec =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale = opts.abs_tol + opts.rel_tol * std::max(y.norm(), y5.norm());
        const double err = err_vec.norm() / scale;

        if (err <= 1.0) {
            t += h;
            y = y5;
            k1 = k7; // FSAL
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < opts.min_step * std::max(1.0, std::abs(t))) throw StepSizeUnderflow(t);
    }
    throw std::runtime_error("ode::integrate: max step count exceeded");
}

} // namespace qmet::ode
