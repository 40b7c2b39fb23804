// optimize.hpp — derivative-free minimization: Nelder-Mead simplex with
// deterministic multi-start, and golden-section line search

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qmet::opt {

using Eigen::VectorXd;

struct SimplexOptions {
    std::size_t max_iterations = 4000;
    double rel_tol = 1e-8;
    double initial_scale = 0.1;
    int restarts = 8;
    unsigned seed = 20240915;
};

struct SimplexResult {
    VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t evaluations = 0;
};

// Single Nelder-Mead run from a given starting point.
inline SimplexResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                                 const VectorXd& x0, const SimplexOptions& opts = {}) {
    const int n = static_cast<int>(x0.size());
    if (n == 0) {
        SimplexResult r;
        r.x = x0;
        r.value = f(x0);
        r.converged = true;
        r.evaluations = 1;
        return r;
    }
    std::vector<VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (int i = 1; i <= n; ++i)
        pts[i](i - 1) += opts.initial_scale * std::max(1.0, std::abs(x0(i - 1)));
    SimplexResult res;
    for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);
    res.evaluations = n + 1;

    const auto order = [&] {
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (vals[j] < vals[i]) {
                    std::swap(vals[i], vals[j]);
                    std::swap(pts[i], pts[j]);
                }
    };

    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        order();
        const double spread = std::abs(vals[n] - vals[0]);
        if (spread <= opts.rel_tol * (std::abs(vals[0]) + 1e-300) + 1e-300) {
            res.converged = true;
            break;
        }
        VectorXd centroid = VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += pts[i];
        centroid /= n;

        const VectorXd refl = centroid + (centroid - pts[n]);
        const double f_refl = f(refl);
        ++res.evaluations;
        if (f_refl < vals[0]) {
            const VectorXd exp_pt = centroid + 2.0 * (centroid - pts[n]);
            const double f_exp = f(exp_pt);
            ++res.evaluations;
            if (f_exp < f_refl) {
                pts[n] = exp_pt;
                vals[n] = f_exp;
            } else {
                pts[n] = refl;
                vals[n] = f_refl;
            }
        } else if (f_refl < vals[n - 1 >= 0 ? n - 1 : 0]) {
            pts[n] = refl;
            vals[n] = f_refl;
        } else {
            const VectorXd contr = centroid + 0.5 * (pts[n] - centroid);
            const double f_contr = f(contr);
            ++res.evaluations;
            if (f_contr < vals[n]) {
                pts[n] = contr;
                vals[n] = f_contr;
            } else {
                for (int i = 1; i <= n; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    vals[i] = f(pts[i]);
                }
                res.evaluations += n;
            }
        }
    }
    order();
    res.x = pts[0];
    res.value = vals[0];
    return res;
}

// Multi-start wrapper: the nominal start plus deterministic random restarts.
inline SimplexResult nelder_mead_multistart(const std::function<double(const VectorXd&)>& f,
                                            const VectorXd& x0,
                                            const SimplexOptions& opts = {}) {
    SimplexResult best = nelder_mead(f, x0, opts);
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int r = 1; r < opts.restarts; ++r) {
        VectorXd start = x0;
        for (int i = 0; i < start.size(); ++i)
            start(i) += opts.initial_scale * (1 + r) * noise(rng);
        const SimplexResult cand = nelder_mead(f, start, opts);
        best.evaluations += cand.evaluations;
        if (cand.value < best.value) {
            best.x = cand.x;
            best.value = cand.value;
            best.converged = cand.converged;
        }
    }
    return best;
}

struct ScalarResult {
    double x = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

// Golden-section minimization on [a, b] for a unimodal objective.
inline ScalarResult golden_section(const std::function<double(double)>& f, double a, double b,
                                   double rel_tol = 1e-10, std::size_t max_iter = 200) {
    if (b < a) std::swap(a, b);
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (std::size_t i = 0; i < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? ScalarResult{x1, f1} : ScalarResult{x2, f2};
}

} // namespace qmet::opt
