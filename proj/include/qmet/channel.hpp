// channel.hpp — affine Bloch (Pauli-transfer) representation of qubit channels,
// short-time Dyson maps, Choi/Kraus conversion and structural classifiers

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmet/linalg.hpp"

namespace qmet::channel {

struct TransferMap {
    Matrix4d matrix = Matrix4d::Identity();       // first row (1, 0, 0, 0)
    std::optional<Matrix4d> derivative;           // d/d omega0
    double t = 0.0;

    Matrix3d block() const { return matrix.bottomRightCorner<3, 3>(); }
    Vector3d translation() const { return matrix.block<3, 1>(1, 0); }
    Matrix3d derivative_block() const {
        if (!derivative) throw std::logic_error("TransferMap: derivative not available");
        return derivative->bottomRightCorner<3, 3>();
    }

    static TransferMap identity() { return {}; }
};

struct MapGeometry {
    Matrix3d rotation_pre = Matrix3d::Identity();  // applied after the scaling
    Matrix3d rotation_post = Matrix3d::Identity(); // applied first
    Vector3d axis_pre = Vector3d::UnitZ();
    Vector3d axis_post = Vector3d::UnitZ();
    double angle_pre = 0.0;
    double angle_post = 0.0;
    Vector3d scalings = Vector3d::Ones();
    Vector3d translation = Vector3d::Zero();
};

struct KrausSet {
    std::vector<Matrix2cd> operators;
    std::vector<Matrix2cd> derivatives; // empty when no derivative was requested
    bool derivative_gauge_warning = false;
};

struct Classification {
    bool cptp = false;
    bool unital = false;
    bool phase_covariant = false;
    MapGeometry geometry;
};

// Third-order Dyson solution of the high-temperature master equation; alpha is
// the integrated correlation weight. The secular flag selects the PC variant.
inline TransferMap short_time_map(double omega0, double alpha, double theta_coupling, double t,
                                  bool secular = false) {
    if (t < 0.0) throw std::domain_error("short_time_map: t must be >= 0");
    const double c = std::cos(theta_coupling);
    const double s = std::sin(theta_coupling);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double q = omega0 * t3 / 6.0 * (alpha * (1.0 + 2.0 * s * s) + omega0 * omega0);
    const double q_dot = t3 / 6.0 * (alpha * (1.0 + 2.0 * s * s) + 3.0 * omega0 * omega0);

    TransferMap map;
    map.t = t;
    Matrix4d& m = map.matrix;
    Matrix4d d = Matrix4d::Zero();
    m.setZero();
    m(0, 0) = 1.0;
    if (secular) {
        const double xy = 1.0 - 0.5 * omega0 * omega0 * t2 - 0.25 * alpha * t2 * (1.0 + s * s);
        m(1, 1) = m(2, 2) = xy;
        m(1, 2) = -omega0 * t + q;
        m(2, 1) = omega0 * t - q;
        m(3, 3) = 1.0 - 0.5 * alpha * t2 * c * c;
        d(1, 1) = d(2, 2) = -omega0 * t2;
        d(1, 2) = -t + q_dot;
        d(2, 1) = t - q_dot;
    } else {
        m(1, 1) = 1.0 - 0.5 * omega0 * omega0 * t2 - 0.5 * alpha * t2 * s * s;
        m(1, 2) = -omega0 * t + q;
        m(1, 3) = 0.5 * alpha * t2 * c * s;
        m(2, 1) = omega0 * t - q;
        m(2, 2) = 1.0 - 0.5 * omega0 * omega0 * t2 - 0.5 * alpha * t2;
        m(2, 3) = alpha * omega0 * t3 * c * s / 3.0;
        m(3, 1) = 0.5 * alpha * t2 * c * s;
        m(3, 2) = -alpha * omega0 * t3 * c * s / 3.0;
        m(3, 3) = 1.0 - 0.5 * alpha * t2 * c * c;
        d(1, 1) = d(2, 2) = -omega0 * t2;
        d(1, 2) = -t + q_dot;
        d(2, 1) = t - q_dot;
        d(2, 3) = alpha * t3 * c * s / 3.0;
        d(3, 2) = -alpha * t3 * c * s / 3.0;
    }
    map.derivative = d;
    return map;
}

// Choi matrix with the trace-2 convention: C = sum_ij |i><j| (x) Map[|i><j|];
// complete positivity <=> C >= 0.
inline Matrix4cd choi_matrix(const TransferMap& map) {
    Matrix4cd choi = Matrix4cd::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Matrix2cd eij = Matrix2cd::Zero();
            eij(i, j) = 1.0;
            const Matrix2cd image = apply_transfer(map.matrix, eij);
            choi.block<2, 2>(2 * i, 2 * j) = image;
        }
    }
    return choi;
}

inline double min_choi_eigenvalue(const TransferMap& map) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(choi_matrix(map));
    return es.eigenvalues().minCoeff();
}

namespace detail {

// Column-stacked Kraus operator from a Choi eigenvector: C = sum |K>><<K| with
// |K>>_(i,k) indexed by (input i, output k).
inline Matrix2cd kraus_from_vector(const Vector4cd& v) {
    Matrix2cd k;
    for (int i = 0; i < 2; ++i)
        for (int out = 0; out < 2; ++out) k(out, i) = v(2 * i + out);
    return k;
}

struct Eigensystem {
    Eigen::Vector4d values;
    Matrix4cd vectors;
};

inline Eigensystem choi_eigensystem(const TransferMap& map) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(choi_matrix(map));
    return {es.eigenvalues(), es.eigenvectors()};
}

} // namespace detail

class NotCompletelyPositive : public std::runtime_error {
  public:
    explicit NotCompletelyPositive(double eig)
        : std::runtime_error("channel is not completely positive (Choi eigenvalue " +
                             std::to_string(eig) + ")") {}
};

inline KrausSet kraus_from_choi(const Matrix4cd& choi, double tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(choi);
    KrausSet set;
    Matrix2cd completeness = Matrix2cd::Zero();
    for (int i = 0; i < 4; ++i) {
        const double mu = es.eigenvalues()(i);
        if (mu < -tol) throw NotCompletelyPositive(mu);
        if (mu < tol) continue;
        const Matrix2cd k = std::sqrt(mu) * detail::kraus_from_vector(es.eigenvectors().col(i));
        completeness += k.adjoint() * k;
        set.operators.push_back(k);
    }
    if ((completeness - Matrix2cd::Identity()).norm() > 1e-8)
        throw std::runtime_error("Kraus completeness violated beyond 1e-8");
    return set;
}

inline KrausSet kraus_from_map(const TransferMap& map, double tol = 1e-10) {
    return kraus_from_choi(choi_matrix(map), tol);
}

// Kraus set at the central frequency with frequency derivatives taken by a
// central finite difference of the Choi eigendecompositions. Eigenvector
// phases (and ordering) of the side points are aligned with the central
// decomposition; residual gauge freedom is absorbed downstream by the
// Kraus-gauge minimization.
inline KrausSet kraus_derivative_pair(const TransferMap& map_minus, const TransferMap& map_center,
                                      const TransferMap& map_plus, double delta,
                                      double tol = 1e-10) {
    if (delta <= 0.0) throw std::domain_error("kraus_derivative_pair: delta must be > 0");
    const auto center = detail::choi_eigensystem(map_center);
    const auto minus = detail::choi_eigensystem(map_minus);
    const auto plus = detail::choi_eigensystem(map_plus);

    KrausSet set;
    bool warn = false;
    // Align each side eigenvector with the central one of maximal overlap.
    const auto aligned = [&](const detail::Eigensystem& side, int central_idx,
                             double& value_out) -> Vector4cd {
        int best = 0;
        double best_overlap = -1.0;
        for (int j = 0; j < 4; ++j) {
            const double ov = std::abs(center.vectors.col(central_idx).dot(side.vectors.col(j)));
            if (ov > best_overlap) {
                best_overlap = ov;
                best = j;
            }
        }
        if (best_overlap < 0.9) warn = true;
        const Complex phase = center.vectors.col(central_idx).dot(side.vectors.col(best));
        Vector4cd v = side.vectors.col(best);
        if (std::abs(phase) > 0.0) v *= std::conj(phase) / std::abs(phase);
        value_out = side.values(best);
        return v;
    };

    Matrix2cd completeness = Matrix2cd::Zero();
    for (int i = 0; i < 4; ++i) {
        const double mu = center.values(i);
        if (mu < -tol) throw NotCompletelyPositive(mu);
        if (mu < tol) continue;
        double mu_m = 0.0, mu_p = 0.0;
        const Vector4cd vm = aligned(minus, i, mu_m);
        const Vector4cd vp = aligned(plus, i, mu_p);
        if (mu_m < 0.0) mu_m = 0.0;
        if (mu_p < 0.0) mu_p = 0.0;
        const Matrix2cd k = std::sqrt(mu) * detail::kraus_from_vector(center.vectors.col(i));
        const Matrix2cd km = std::sqrt(mu_m) * detail::kraus_from_vector(vm);
        const Matrix2cd kp = std::sqrt(mu_p) * detail::kraus_from_vector(vp);
        completeness += k.adjoint() * k;
        set.operators.push_back(k);
        set.derivatives.push_back((kp - km) / (2.0 * delta));
    }
    if ((completeness - Matrix2cd::Identity()).norm() > 1e-8)
        throw std::runtime_error("Kraus completeness violated beyond 1e-8");
    set.derivative_gauge_warning = warn;
    return set;
}

inline MapGeometry map_geometry(const TransferMap& map) {
    const Matrix3d v = map.block();
    Eigen::JacobiSVD<Matrix3d> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3d u = svd.matrixU();
    Matrix3d w = svd.matrixV();
    Vector3d d = svd.singularValues();
    // Push reflections into the scalings so both factors are proper rotations.
    if (u.determinant() < 0.0) {
        u.col(2) *= -1.0;
        d(2) *= -1.0;
    }
    if (w.determinant() < 0.0) {
        w.col(2) *= -1.0;
        d(2) *= -1.0;
    }
    MapGeometry geo;
    geo.rotation_pre = u;
    geo.rotation_post = w.transpose();
    geo.scalings = d;
    geo.translation = map.translation();
    const Eigen::AngleAxisd aa1(u), aa2(Matrix3d(w.transpose()));
    geo.axis_pre = aa1.axis();
    geo.angle_pre = aa1.angle();
    geo.axis_post = aa2.axis();
    geo.angle_post = aa2.angle();
    return geo;
}

// Phase covariance is detected by the structural pattern of the PC map form:
// equal x/y contractions with a z-rotation, no x/y translation, no x/y<->z mixing.
inline bool is_phase_covariant(const TransferMap& map, double tol = 1e-8) {
    const Matrix3d v = map.block();
    const Vector3d tr = map.translation();
    return std::abs(v(0, 0) - v(1, 1)) <= tol && std::abs(v(0, 1) + v(1, 0)) <= tol &&
           std::abs(v(0, 2)) <= tol && std::abs(v(1, 2)) <= tol && std::abs(v(2, 0)) <= tol &&
           std::abs(v(2, 1)) <= tol && std::abs(tr(0)) <= tol && std::abs(tr(1)) <= tol;
}

inline Classification classify(const TransferMap& map, double tol = 1e-8) {
    Classification c;
    c.unital = map.translation().norm() <= tol;
    c.phase_covariant = is_phase_covariant(map, tol);
    c.geometry = map_geometry(map);
    const bool trace_preserving = std::abs(map.matrix(0, 0) - 1.0) <= tol &&
                                  map.matrix.block<1, 3>(0, 1).norm() <= tol;
    c.cptp = trace_preserving && min_choi_eigenvalue(map) >= -std::max(tol, 1e-6);
    return c;
}

} // namespace qmet::channel
