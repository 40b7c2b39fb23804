// tcl2.hpp — second-order time-convolutionless master-equation coefficients:
// dissipator matrix b_jk(t), Lamb-shift Hamiltonian, and the generator as a
// 4x4 transfer matrix in the normalized Pauli basis

#pragma once

#include <cmath>

#include "qmet/bath.hpp"
#include "qmet/linalg.hpp"

namespace qmet::tcl2 {

// Index order for the dissipator matrix b
enum JumpIndex { kPlus = 0, kMinus = 1, kZ = 2 };

struct GeneratorCoefficients {
    Eigen::Matrix3cd b = Eigen::Matrix3cd::Zero(); // indexed (+, -, z), units 1/time
    Matrix2cd h_ls = Matrix2cd::Zero();            // Lamb shift, basis {excited, ground}
    double t = 0.0;
    double omega0 = 0.0;        // rotation frequency entering H0
    double theta_coupling = 0.0;
};

struct GeneratorPTM {
    Matrix4d matrix = Matrix4d::Zero();
    double t = 0.0;
};

// b_jk(t) from Gamma(0, t) and Gamma(+-omega0, t). With high_temperature the
// relation Gamma(-omega0, t) = Gamma(omega0, t)* replaces one quadrature; with
// wide_cutoff every Gamma argument collapses to 0.
inline GeneratorCoefficients dissipator_coefficients(const bath::BathModel& model, double omega0,
                                                     double theta_coupling, double t) {
    if (t < 0.0) throw std::domain_error("dissipator_coefficients: t must be >= 0");
    const double c = std::cos(theta_coupling);
    const double s = std::sin(theta_coupling);

    const Complex g0 = bath::gamma_integral(model, 0.0, t).value;
    Complex g_minus, g_plus; // Gamma(-omega0, t), Gamma(+omega0, t)
    if (model.wide_cutoff) {
        g_minus = g_plus = g0;
    } else if (model.high_temperature) {
        g_plus = bath::gamma_integral(model, omega0, t).value;
        g_minus = std::conj(g_plus);
    } else {
        g_plus = bath::gamma_integral(model, omega0, t).value;
        g_minus = bath::gamma_integral(model, -omega0, t).value;
    }

    GeneratorCoefficients out;
    out.t = t;
    out.omega0 = omega0;
    out.theta_coupling = theta_coupling;
    out.b(kZ, kZ) = 0.5 * s * s * std::real(g0);
    out.b(kPlus, kPlus) = 0.5 * c * c * std::real(g_minus);
    out.b(kMinus, kMinus) = 0.5 * c * c * std::real(g_plus);
    out.b(kPlus, kMinus) = 0.25 * c * c * (g_minus + std::conj(g_plus));
    out.b(kMinus, kPlus) = std::conj(out.b(kPlus, kMinus));
    out.b(kZ, kPlus) = 0.25 * s * c * (g0 + std::conj(g_minus));
    out.b(kPlus, kZ) = std::conj(out.b(kZ, kPlus));
    out.b(kZ, kMinus) = 0.25 * s * c * (g0 + std::conj(g_plus));
    out.b(kMinus, kZ) = std::conj(out.b(kZ, kMinus));

    out.h_ls(0, 0) = 0.25 * c * c * std::imag(g_plus);
    out.h_ls(1, 1) = 0.25 * c * c * std::imag(g_minus);
    out.h_ls(0, 1) =
        Complex(0, -0.25) * s * c * (std::real(g0) - 0.5 * (std::conj(g_minus) + g_plus));
    out.h_ls(1, 0) = std::conj(out.h_ls(0, 1));
    return out;
}

inline Matrix2cd lamb_shift(const bath::BathModel& model, double omega0, double theta_coupling,
                            double t) {
    return dissipator_coefficients(model, omega0, theta_coupling, t).h_ls;
}

// Secular approximation: drop all terms oscillating at e^{+-i omega0 t}
inline GeneratorCoefficients secular_truncate(GeneratorCoefficients coeffs) {
    coeffs.b(kPlus, kMinus) = coeffs.b(kMinus, kPlus) = 0.0;
    coeffs.b(kZ, kPlus) = coeffs.b(kPlus, kZ) = 0.0;
    coeffs.b(kZ, kMinus) = coeffs.b(kMinus, kZ) = 0.0;
    coeffs.h_ls(0, 1) = coeffs.h_ls(1, 0) = 0.0;
    return coeffs;
}

// Full time-local generator -i[H0 + H_LS, .] + dissipator as a transfer matrix
inline GeneratorPTM generator_ptm(const GeneratorCoefficients& coeffs) {
    const Matrix2cd jump[3] = {ops::sigma_plus(), ops::sigma_minus(), ops::sigma_z()};
    const Matrix2cd h = 0.5 * coeffs.omega0 * ops::sigma_z() + coeffs.h_ls;

    const auto action = [&](const Matrix2cd& x) {
        Matrix2cd out = Complex(0, -1) * (h * x - x * h);
        for (int k = 0; k < 3; ++k) {
            for (int j = 0; j < 3; ++j) {
                const Complex bkj = coeffs.b(k, j);
                if (bkj == Complex(0, 0)) continue;
                const Matrix2cd jd = jump[j].adjoint();
                out += bkj * (jump[k] * x * jd -
                              0.5 * (jd * jump[k] * x + x * jd * jump[k]));
            }
        }
        return out;
    };

    GeneratorPTM gen;
    gen.matrix = transfer_matrix_of(action);
    gen.t = coeffs.t;
    return gen;
}

} // namespace qmet::tcl2
