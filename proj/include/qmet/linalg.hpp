// linalg.hpp — Pauli operators and the normalized-Pauli (Bloch) operator basis

#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace qmet {

using Complex = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix3d;
using Eigen::Matrix4cd;
using Eigen::Matrix4d;
using Eigen::Vector3d;
using Eigen::Vector4cd;

inline constexpr double kPi = 3.14159265358979323846;

namespace ops {

inline Matrix2cd identity() { return Matrix2cd::Identity(); }

inline Matrix2cd sigma_x() {
    Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix2cd sigma_y() {
    Matrix2cd m;
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline Matrix2cd sigma_z() {
    Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

// sigma_+ maps the ground state onto the excited (sigma_z = +1) state
inline Matrix2cd sigma_plus() {
    Matrix2cd m;
    m << 0, 1, 0, 0;
    return m;
}

inline Matrix2cd sigma_minus() {
    Matrix2cd m;
    m << 0, 0, 1, 0;
    return m;
}

} // namespace ops

// Orthonormal operator basis {1/sqrt2, sigma_x/sqrt2, sigma_y/sqrt2, sigma_z/sqrt2}
inline const Matrix2cd& pauli_basis(int alpha) {
    static const Matrix2cd tau[4] = {
        ops::identity() / std::sqrt(2.0),
        ops::sigma_x() / std::sqrt(2.0),
        ops::sigma_y() / std::sqrt(2.0),
        ops::sigma_z() / std::sqrt(2.0),
    };
    if (alpha < 0 || alpha > 3) throw std::out_of_range("pauli_basis index");
    return tau[alpha];
}

// Hilbert-Schmidt components of a (possibly non-Hermitian) 2x2 operator
inline Vector4cd to_pauli_components(const Matrix2cd& x) {
    Vector4cd c;
    for (int a = 0; a < 4; ++a) c[a] = (pauli_basis(a).adjoint() * x).trace();
    return c;
}

inline Matrix2cd from_pauli_components(const Vector4cd& c) {
    Matrix2cd x = Matrix2cd::Zero();
    for (int a = 0; a < 4; ++a) x += c[a] * pauli_basis(a);
    return x;
}

// Apply a 4x4 transfer matrix to an operator through its Pauli components
inline Matrix2cd apply_transfer(const Matrix4d& m, const Matrix2cd& x) {
    return from_pauli_components(m.cast<Complex>() * to_pauli_components(x));
}

// 4x4 transfer-matrix representation of a superoperator given its action
template <typename Superop>
Matrix4d transfer_matrix_of(Superop&& action) {
    Matrix4d m;
    for (int b = 0; b < 4; ++b) {
        const Matrix2cd image = action(pauli_basis(b));
        for (int a = 0; a < 4; ++a)
            m(a, b) = std::real((pauli_basis(a).adjoint() * image).trace());
    }
    return m;
}

inline Matrix2cd bloch_to_density(const Vector3d& r) {
    return 0.5 * (ops::identity() + r.x() * ops::sigma_x() + r.y() * ops::sigma_y() +
                  r.z() * ops::sigma_z());
}

inline Vector3d density_to_bloch(const Matrix2cd& rho) {
    return Vector3d(std::real((ops::sigma_x() * rho).trace()),
                    std::real((ops::sigma_y() * rho).trace()),
                    std::real((ops::sigma_z() * rho).trace()));
}

} // namespace qmet
