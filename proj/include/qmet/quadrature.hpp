// quadrature.hpp — globally adaptive Gauss-Kronrod 15(7) integration on finite intervals

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmet::quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    std::size_t max_intervals = 20000;
};

class NonConvergence : public std::runtime_error {
  public:
    NonConvergence(double value, double error)
        : std::runtime_error("quadrature did not converge (value " + std::to_string(value) +
                             ", estimated error " + std::to_string(error) + ")"),
          value(value), error_estimate(error) {}
    double value;
    double error_estimate;
};

namespace detail {

// Kronrod-15 nodes on [-1, 1] and weights; Gauss-7 weights on the shared nodes
inline constexpr double kNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double kWeightsK[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kWeightsG[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

template <typename F>
Interval gk15(const F& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double kronrod = 0.0, gauss = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(mid + half * kNodes[i]);
        kronrod += kWeightsK[i] * fx;
        if (i % 2 == 1) gauss += kWeightsG[i / 2] * fx;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

// Integrate f over [a, b]; throws NonConvergence when the tolerance cannot be met.
template <typename F>
Result integrate(const F& f, double a, double b, const Options& opts = {}) {
    Result res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::priority_queue<detail::Interval> queue;
    queue.push(detail::gk15(f, a, b));
    res.evaluations = 15;
    double total = queue.top().value;
    double total_err = queue.top().error;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (queue.size() >= opts.max_intervals)
            throw NonConvergence(total, total_err);
        const detail::Interval worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) throw NonConvergence(total, total_err);
        const detail::Interval left = detail::gk15(f, worst.a, mid);
        const detail::Interval right = detail::gk15(f, mid, worst.b);
        res.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    res.value = total;
    res.error_estimate = total_err;
    res.converged = true;
    return res;
}

// Integrate over a union of segments defined by sorted breakpoints.
template <typename F>
Result integrate_segments(const F& f, std::vector<double> breaks, const Options& opts = {}) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    Result total;
    total.converged = true;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const Result r = integrate(f, breaks[i], breaks[i + 1], opts);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evaluations += r.evaluations;
    }
    return total;
}

} // namespace qmet::quad
