// nprobe.hpp — N-probe precision: channel-extension QFI upper bound, GHZ
// parity-measurement error, interrogation-time optimization and scaling fits

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmet/channel.hpp"
#include "qmet/linalg.hpp"
#include "qmet/optimize.hpp"

namespace qmet::nprobe {

using channel::KrausSet;
using channel::TransferMap;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

struct BoundResult {
    double f_up = 0.0;
    MatrixXcd h_opt;
    long n = 0;
    double t = 0.0;
    bool converged = false;
};

struct PrecisionPoint {
    long n = 0;
    double t_opt = 0.0;
    double error = 0.0; // Delta^2 omega * T
    std::string source;
};

struct PrecisionCurve {
    std::vector<PrecisionPoint> points;
    double eta = 0.0;
    double fit_residual = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
};

namespace detail {

inline double operator_norm(const Matrix2cd& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix2cd> es(hermitian);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Pack/unpack a Hermitian r x r matrix into r^2 real parameters
inline MatrixXcd unpack_hermitian(const VectorXd& p, int r) {
    MatrixXcd h = MatrixXcd::Zero(r, r);
    int idx = 0;
    for (int i = 0; i < r; ++i) h(i, i) = p(idx++);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            h(i, j) = Complex(p(idx), p(idx + 1));
            h(j, i) = std::conj(h(i, j));
            idx += 2;
        }
    return h;
}

inline VectorXd pack_hermitian(const MatrixXcd& h) {
    const int r = static_cast<int>(h.rows());
    VectorXd p(r * r);
    int idx = 0;
    for (int i = 0; i < r; ++i) p(idx++) = h(i, i).real();
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            p(idx++) = h(i, j).real();
            p(idx++) = h(i, j).imag();
        }
    return p;
}

// Hermitian basis images K_j^dag K_k + h.c. of the packed gauge parameters,
// as real Pauli components; beta(h) = beta0 + G p is affine in the packing.
inline Eigen::MatrixXd beta_response(const KrausSet& kraus) {
    const int r = static_cast<int>(kraus.operators.size());
    Eigen::MatrixXd g(4, r * r);
    int idx = 0;
    const auto column = [&](const Matrix2cd& op) {
        const Vector4cd c = to_pauli_components(op);
        for (int a = 0; a < 4; ++a) g(a, idx) = c(a).real();
        ++idx;
    };
    for (int i = 0; i < r; ++i) column(kraus.operators[i].adjoint() * kraus.operators[i]);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            const Matrix2cd kk = kraus.operators[i].adjoint() * kraus.operators[j];
            column(kk + kk.adjoint());
            column(Complex(0, 1) * (kk - kk.adjoint()));
        }
    return g;
}

// Minimal-norm gauge canceling the beta term plus a basis of the gauges that
// leave beta unchanged; the large-N optimum lives on this affine subspace.
struct BetaCancellation {
    VectorXd h0;              // least-squares beta-canceling gauge (packed)
    Eigen::MatrixXd nullspace; // columns: packed gauges with zero beta response
};

inline BetaCancellation beta_cancellation(const KrausSet& kraus) {
    const int r = static_cast<int>(kraus.operators.size());
    Matrix2cd beta0 = Matrix2cd::Zero();
    for (int i = 0; i < r; ++i)
        beta0 += Complex(0, 1) * kraus.derivatives[i].adjoint() * kraus.operators[i];
    beta0 = 0.5 * (beta0 + beta0.adjoint()).eval();
    const Vector4cd c = to_pauli_components(beta0);
    Eigen::Vector4d rhs;
    for (int a = 0; a < 4; ++a) rhs(a) = -c(a).real();
    const Eigen::MatrixXd g = beta_response(kraus);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const double tol = 1e-12 * std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    svd.setThreshold(Eigen::NumTraits<double>::epsilon() * 4);
    BetaCancellation out;
    out.h0 = svd.solve(rhs);
    out.nullspace = svd.matrixV().rightCols(r * r - rank);
    return out;
}

inline VectorXd beta_cancelling_start(const KrausSet& kraus) {
    return beta_cancellation(kraus).h0;
}

// N ||alpha|| + N(N-1) ||beta||^2 for the gauge-shifted Kraus derivatives
inline double gauge_objective(const KrausSet& kraus, const MatrixXcd& h, long n) {
    const int r = static_cast<int>(kraus.operators.size());
    Matrix2cd alpha = Matrix2cd::Zero();
    Matrix2cd beta = Matrix2cd::Zero();
    for (int i = 0; i < r; ++i) {
        Matrix2cd kdot = kraus.derivatives[i];
        for (int j = 0; j < r; ++j) kdot += Complex(0, 1) * h(i, j) * kraus.operators[j];
        alpha += kdot.adjoint() * kdot;
        beta += Complex(0, 1) * kdot.adjoint() * kraus.operators[i];
    }
    const double na = operator_norm(alpha);
    const double nb = operator_norm(0.5 * (beta + beta.adjoint()));
    return static_cast<double>(n) * na + static_cast<double>(n) * (n - 1.0) * nb * nb;
}

} // namespace detail

// Upper bound F^ = 4 min_h [ N||alpha|| + N(N-1)||beta||^2 ] over the Kraus
// gauge Kdot_i -> Kdot_i + i sum_j h_ij K_j with Hermitian h. Any h gives a
// valid bound, so global optimality is not required. An optional warm start
// seeds the search (useful along a time sweep).
inline BoundResult channel_qfi_bound(const KrausSet& kraus, long n,
                                     const opt::SimplexOptions& opts = {},
                                     const MatrixXcd* warm_start = nullptr) {
    if (kraus.operators.empty() || kraus.derivatives.size() != kraus.operators.size())
        throw std::invalid_argument("channel_qfi_bound: Kraus derivatives missing");
    const int r = static_cast<int>(kraus.operators.size());

    Matrix2cd consistency = Matrix2cd::Zero();
    for (int i = 0; i < r; ++i)
        consistency += kraus.derivatives[i].adjoint() * kraus.operators[i] +
                       kraus.operators[i].adjoint() * kraus.derivatives[i];
    if (consistency.norm() > 1e-6)
        throw std::invalid_argument("channel_qfi_bound: inconsistent Kraus derivatives");

    const auto objective = [&](const VectorXd& p) {
        return detail::gauge_objective(kraus, detail::unpack_hermitian(p, r), n);
    };

    // Deterministic starts: zero gauge, the beta-canceling least-squares
    // gauge (optimal as N grows), and the caller's warm start; the configured
    // restart budget is spent on random perturbations of the best seed.
    const detail::BetaCancellation cancel = detail::beta_cancellation(kraus);
    std::vector<VectorXd> starts;
    starts.push_back(VectorXd::Zero(r * r));
    starts.push_back(cancel.h0);
    if (warm_start && warm_start->rows() == r)
        starts.push_back(detail::pack_hermitian(*warm_start));

    opt::SimplexResult best;
    for (const VectorXd& s : starts) {
        const opt::SimplexResult cand = opt::nelder_mead(objective, s, opts);
        if (cand.value < best.value) best = cand;
    }

    // The N(N-1)||beta||^2 term makes the joint search stiff at large N, so
    // also minimize within the affine subspace where beta stays canceled;
    // every subspace point is feasible for the joint problem.
    if (cancel.nullspace.cols() > 0) {
        const auto subspace_objective = [&](const VectorXd& c) {
            return objective(cancel.h0 + cancel.nullspace * c);
        };
        opt::SimplexResult sub =
            opt::nelder_mead(subspace_objective, VectorXd::Zero(cancel.nullspace.cols()), opts);
        sub.x = cancel.h0 + cancel.nullspace * sub.x;
        if (sub.value < best.value) best = sub;
        // joint polish from the subspace winner
        const opt::SimplexResult polished = opt::nelder_mead(objective, sub.x, opts);
        if (polished.value < best.value) best = polished;
    }
    const int extra = opts.restarts - static_cast<int>(starts.size());
    if (extra > 0) {
        opt::SimplexOptions rest = opts;
        rest.restarts = extra + 1;
        const opt::SimplexResult cand = opt::nelder_mead_multistart(objective, best.x, rest);
        if (cand.value < best.value) best = cand;
    }
    // h = 0 is always admissible; never report worse than it.
    const double at_zero = objective(VectorXd::Zero(r * r));
    if (at_zero < best.value) {
        best.value = at_zero;
        best.x = VectorXd::Zero(r * r);
    }

    BoundResult out;
    out.f_up = 4.0 * best.value;
    out.h_opt = detail::unpack_hermitian(best.x, r);
    out.n = n;
    out.converged = best.converged;
    return out;
}

namespace detail {

// c_ab = tr(sigma_x Lambda[|a><b|]) for the GHZ parity expectation; a = 0 is
// the excited (sigma_z = +1) basis state.
inline Complex parity_element(const Matrix4d& ptm, int a, int b) {
    Matrix2cd eab = Matrix2cd::Zero();
    eab(a, b) = 1.0;
    return (ops::sigma_x() * apply_transfer(ptm, eab)).trace();
}

} // namespace detail

// <P_x> = (1/2)(c00^N + c11^N + c01^N + c10^N) for the N-qubit GHZ input
inline double parity_expectation(const TransferMap& map, long n) {
    if (n < 1) throw std::invalid_argument("parity_expectation: n must be >= 1");
    Complex total = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            total += std::pow(detail::parity_element(map.matrix, a, b), n);
    return 0.5 * total.real();
}

inline double parity_expectation_derivative(const TransferMap& map, long n) {
    if (!map.derivative) throw std::logic_error("parity_expectation_derivative: no derivative");
    Complex total = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const Complex c = detail::parity_element(map.matrix, a, b);
            const Complex cdot = detail::parity_element(*map.derivative, a, b);
            const Complex pw = (n == 1) ? Complex(1.0, 0.0) : std::pow(c, n - 1);
            total += static_cast<double>(n) * pw * cdot;
        }
    return 0.5 * total.real();
}

// Error-propagation precision t (1 - <P_x>^2) / <P_x-dot>^2 of the parity readout
inline double parity_precision(const TransferMap& map, long n, double t) {
    const double p = parity_expectation(map, n);
    const double pdot = parity_expectation_derivative(map, n);
    const double numerator = std::max(1.0 - p * p, 0.0);
    if (pdot * pdot < 1e-300 * std::max(numerator, 1.0))
        return std::numeric_limits<double>::infinity();
    return t * numerator / (pdot * pdot);
}

struct TimeOptimum {
    double t_opt = 0.0;
    double error = std::numeric_limits<double>::infinity();
};

// Coarse log-spaced scan plus a dense local scan and golden-section polish.
// The objective may have many local minima (parity); the scan keeps the
// global structure while the polish refines the winning bracket.
inline TimeOptimum optimize_time(const std::function<double(double)>& objective, double t_max,
                                 std::size_t grid_size = 400, double t_min = 0.0) {
    if (t_max <= 0.0) throw std::domain_error("optimize_time: t_max must be > 0");
    if (grid_size < 3) throw std::invalid_argument("optimize_time: grid too small");
    if (t_min <= 0.0) t_min = 1e-4 * t_max;

    std::vector<double> grid(grid_size);
    const double log_lo = std::log(t_min), log_hi = std::log(t_max);
    for (std::size_t i = 0; i < grid_size; ++i)
        grid[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                        static_cast<double>(grid_size - 1));

    std::size_t best = grid_size;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double v = objective(grid[i]);
        if (std::isfinite(v) && v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best == grid_size) throw std::runtime_error("optimize_time: objective infinite everywhere");

    double lo = best > 0 ? grid[best - 1] : grid[0];
    double hi = best + 1 < grid_size ? grid[best + 1] : grid[grid_size - 1];
    // Dense uniform scan inside the bracket to isolate the right local minimum
    const std::size_t dense = 48;
    double dense_best = grid[best], dense_val = best_val;
    for (std::size_t i = 0; i <= dense; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(dense);
        const double v = objective(t);
        if (std::isfinite(v) && v < dense_val) {
            dense_val = v;
            dense_best = t;
        }
    }
    const double step = (hi - lo) / static_cast<double>(dense);
    const opt::ScalarResult polished =
        opt::golden_section(objective, std::max(lo, dense_best - step),
                            std::min(hi, dense_best + step), 1e-10);
    if (polished.value < dense_val) return {polished.x, polished.value};
    return {dense_best, dense_val};
}

struct FitResult {
    double eta = 0.0;
    double residual = 0.0;
    std::size_t points_used = 0;
};

class InsufficientData : public std::runtime_error {
  public:
    explicit InsufficientData(std::size_t n)
        : std::runtime_error("scaling fit needs >= 5 points in window, got " +
                             std::to_string(n)) {}
};

// eta = -slope of log(error) vs log(N) over the window [n_lo, n_hi]
inline FitResult scaling_fit(const std::vector<PrecisionPoint>& points, double n_lo,
                             double n_hi) {
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (p.n < n_lo || p.n > n_hi) continue;
        if (!(p.error > 0.0) || !std::isfinite(p.error))
            throw std::invalid_argument("scaling_fit: nonpositive error in window");
        x.push_back(std::log(static_cast<double>(p.n)));
        y.push_back(std::log(p.error));
    }
    if (x.size() < 5) throw InsufficientData(x.size());
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - slope * x[i] - intercept, 2);
    return {-slope, std::sqrt(ss / n), x.size()};
}

// Geometric N-grid with a fixed number of points per decade
inline std::vector<long> n_grid(long n_lo, long n_hi, int per_decade = 25) {
    std::vector<long> out;
    const double step = std::pow(10.0, 1.0 / per_decade);
    double v = static_cast<double>(n_lo);
    long prev = 0;
    while (v <= static_cast<double>(n_hi) * (1.0 + 1e-12)) {
        const long n = std::lround(v);
        if (n != prev) out.push_back(n);
        prev = n;
        v *= step;
    }
    return out;
}

} // namespace qmet::nprobe
