// dynamics.hpp — time propagation of transfer maps and their frequency
// sensitivity; closed forms for the Ohmic high-temperature regime and its
// semigroup limit

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qmet/channel.hpp"
#include "qmet/ode.hpp"
#include "qmet/tcl2.hpp"

namespace qmet::dynamics {

using channel::TransferMap;

struct Trajectory {
    std::vector<double> times;
    std::vector<TransferMap> maps;
};

struct OhmicConfig {
    double lambda_over_beta = 0.1; // rate scale, 1/time
    double omega_c = 1.0;          // cutoff
    double omega0 = 1.0;
    double theta_coupling = 0.0;
    bool secular = false;
    bool semigroup = false; // omega_c -> infinity limit

    void validate() const {
        if (lambda_over_beta < 0.0) throw std::invalid_argument("lambda_over_beta must be >= 0");
        if (!semigroup && omega_c <= 0.0) throw std::invalid_argument("omega_c must be > 0");
    }
};

// Generator together with its analytic omega0-derivative (zero function when
// a derivative is not available and finite differences are wanted instead).
struct GeneratorFamily {
    std::function<Matrix4d(double)> matrix;
    std::function<Matrix4d(double)> omega0_derivative;
};

inline double ohmic_rate(const OhmicConfig& config, double t) {
    config.validate();
    if (t < 0.0) throw std::domain_error("ohmic_rate: t must be >= 0");
    if (config.semigroup) return 0.5 * kPi * config.lambda_over_beta;
    return config.lambda_over_beta * std::atan(config.omega_c * t);
}

// G(t) = int_0^t gamma, evaluated in closed form
inline double ohmic_rate_primitive(const OhmicConfig& config, double t) {
    config.validate();
    if (t < 0.0) throw std::domain_error("ohmic_rate_primitive: t must be >= 0");
    if (config.semigroup) return 0.5 * kPi * config.lambda_over_beta * t;
    const double wt = config.omega_c * t;
    return config.lambda_over_beta *
           (t * std::atan(wt) - std::log1p(wt * wt) / (2.0 * config.omega_c));
}

// 3x3 Bloch-generator block at time t: omega0 rotation plus the dissipative
// part 2*gamma(t)(n n^T - 1) with coupling direction n = (cos, 0, sin) of the
// coupling angle; the secular variant keeps only the PC diagonal.
inline Matrix3d ohmic_generator_block(const OhmicConfig& config, double t) {
    const double g = ohmic_rate(config, t);
    const double c = std::cos(config.theta_coupling);
    const double s = std::sin(config.theta_coupling);
    Matrix3d m = Matrix3d::Zero();
    m(0, 1) = -config.omega0;
    m(1, 0) = config.omega0;
    if (config.secular) {
        m(0, 0) = m(1, 1) = -(2.0 - c * c) * g;
        m(2, 2) = -2.0 * c * c * g;
    } else {
        m(0, 0) = -2.0 * g * s * s;
        m(1, 1) = -2.0 * g;
        m(2, 2) = -2.0 * g * c * c;
        m(0, 2) = m(2, 0) = 2.0 * g * c * s;
    }
    return m;
}

inline Matrix4d embed_block(const Matrix3d& block) {
    Matrix4d m = Matrix4d::Zero();
    m.bottomRightCorner<3, 3>() = block;
    return m;
}

// Constant generator of the omega_c -> infinity (Lindblad) limit
inline tcl2::GeneratorPTM semigroup_generator(const OhmicConfig& config) {
    if (!config.semigroup) throw std::invalid_argument("semigroup_generator: flag not set");
    return {embed_block(ohmic_generator_block(config, 0.0)), 0.0};
}

inline GeneratorFamily ohmic_generator_family(const OhmicConfig& config) {
    config.validate();
    GeneratorFamily fam;
    fam.matrix = [config](double t) { return embed_block(ohmic_generator_block(config, t)); };
    // Only the rotation entries depend on omega0 (rates are omega0-free).
    Matrix4d d = Matrix4d::Zero();
    d(1, 2) = -1.0;
    d(2, 1) = 1.0;
    fam.omega0_derivative = [d](double) { return d; };
    return fam;
}

inline GeneratorFamily finite_difference_family(std::function<Matrix4d(double, double)> of_omega,
                                                double omega0, double step = 0.0) {
    if (step <= 0.0) step = 1e-5 * std::max(std::abs(omega0), 1.0);
    GeneratorFamily fam;
    fam.matrix = [of_omega, omega0](double t) { return of_omega(omega0, t); };
    fam.omega0_derivative = [of_omega, omega0, step](double t) {
        // Richardson-extrapolated central difference
        const Matrix4d d1 = (of_omega(omega0 + step, t) - of_omega(omega0 - step, t)) / (2 * step);
        const Matrix4d d2 = (of_omega(omega0 + 0.5 * step, t) - of_omega(omega0 - 0.5 * step, t)) / step;
        return (4.0 * d2 - d1) / 3.0;
    };
    return fam;
}

class CptpViolation : public std::runtime_error {
  public:
    CptpViolation(double t, double eig)
        : std::runtime_error("propagated map violates complete positivity at t = " +
                             std::to_string(t) + " (Choi eigenvalue " + std::to_string(eig) +
                             ")") {}
};

// Integrate dV/dt = L(t) V from the identity; with sensitivity on, co-integrate
// dVdot/dt = Ldot(t) V + L(t) Vdot from zero.
inline Trajectory propagate(const GeneratorFamily& family, double t_end, std::size_t grid,
                            bool sensitivity = true, const ode::Options& opts = {}) {
    if (t_end <= 0.0) throw std::domain_error("propagate: t_end must be > 0");
    if (grid < 2) throw std::invalid_argument("propagate: grid must have >= 2 points");

    using State = Eigen::Matrix<double, 4, 8>;
    State y = State::Zero();
    y.leftCols<4>() = Matrix4d::Identity();

    const auto rhs = [&](double t, const State& s) {
        const Matrix4d l = family.matrix(t);
        State out;
        out.leftCols<4>() = l * s.leftCols<4>();
        if (sensitivity)
            out.rightCols<4>() = family.omega0_derivative(t) * s.leftCols<4>() + l * s.rightCols<4>();
        else
            out.rightCols<4>().setZero();
        return out;
    };

    Trajectory traj;
    traj.times.reserve(grid);
    traj.maps.reserve(grid);
    double t = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
        const double ti = t_end * static_cast<double>(i) / static_cast<double>(grid - 1);
        ode::integrate(rhs, y, t, ti, opts);
        t = ti;
        TransferMap map;
        map.matrix = y.leftCols<4>();
        map.t = ti;
        if (sensitivity) map.derivative = y.rightCols<4>();
        const double eig = channel::min_choi_eigenvalue(map);
        if (eig < -1e-6) throw CptpViolation(ti, eig);
        traj.times.push_back(ti);
        traj.maps.push_back(std::move(map));
    }
    return traj;
}

inline TransferMap propagate_to(const GeneratorFamily& family, double t, bool sensitivity = true,
                                const ode::Options& opts = {}) {
    if (t == 0.0) {
        TransferMap map = TransferMap::identity();
        if (sensitivity) map.derivative = Matrix4d::Zero();
        return map;
    }
    return propagate(family, t, 2, sensitivity, opts).maps.back();
}

// Exact PC (secular) Ohmic map: contraction d(t) = e^{-(2-cos^2) G(t)} on the
// equator with a z-rotation by omega0 t, and e^{-2 cos^2 G(t)} along z.
inline TransferMap ohmic_pc_map(const OhmicConfig& config, double t) {
    config.validate();
    if (t < 0.0) throw std::domain_error("ohmic_pc_map: t must be >= 0");
    const double c2 = std::pow(std::cos(config.theta_coupling), 2);
    const double big_g = ohmic_rate_primitive(config, t);
    const double d = std::exp(-(2.0 - c2) * big_g);
    const double dz = std::exp(-2.0 * c2 * big_g);
    const double cs = std::cos(config.omega0 * t);
    const double sn = std::sin(config.omega0 * t);

    TransferMap map;
    map.t = t;
    Matrix4d& m = map.matrix;
    m.setZero();
    m(0, 0) = 1.0;
    m(1, 1) = m(2, 2) = d * cs;
    m(1, 2) = -d * sn;
    m(2, 1) = d * sn;
    m(3, 3) = dz;
    Matrix4d der = Matrix4d::Zero();
    der(1, 1) = der(2, 2) = -d * t * sn;
    der(1, 2) = -d * t * cs;
    der(2, 1) = d * t * cs;
    map.derivative = der;
    return map;
}

inline TransferMap ohmic_map(const OhmicConfig& config, double t, bool sensitivity = true,
                             const ode::Options& opts = {}) {
    if (config.secular) {
        TransferMap map = ohmic_pc_map(config, t);
        if (!sensitivity) map.derivative.reset();
        return map;
    }
    return propagate_to(ohmic_generator_family(config), t, sensitivity, opts);
}

namespace detail {

inline void check_density(const Matrix2cd& rho) {
    if ((rho - rho.adjoint()).norm() > 1e-10 || std::abs(rho.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho.trace().imag()) > 1e-12)
        throw std::invalid_argument("not a density matrix");
    Eigen::SelfAdjointEigenSolver<Matrix2cd> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("density matrix not positive semidefinite");
}

} // namespace detail

// Density-matrix trajectory. PC uses the decoupled closed-form population and
// coherence solutions; NPC integrates the equivalent real Bloch-vector system.
inline std::vector<Matrix2cd> ohmic_density_ode(const OhmicConfig& config, const Matrix2cd& rho0,
                                                const std::vector<double>& t_grid,
                                                const ode::Options& opts = {}) {
    config.validate();
    detail::check_density(rho0);
    std::vector<Matrix2cd> out;
    out.reserve(t_grid.size());

    if (config.secular) {
        const double c2 = std::pow(std::cos(config.theta_coupling), 2);
        const Complex r10 = rho0(0, 1); // <excited| rho |ground>
        const double p_exc = rho0(0, 0).real();
        for (double t : t_grid) {
            if (t < 0.0) throw std::domain_error("ohmic_density_ode: t must be >= 0");
            const double big_g = ohmic_rate_primitive(config, t);
            Matrix2cd rho = Matrix2cd::Zero();
            const double p = 0.5 + (p_exc - 0.5) * std::exp(-2.0 * c2 * big_g);
            rho(0, 0) = p;
            rho(1, 1) = 1.0 - p;
            rho(0, 1) = std::exp(Complex(-(2.0 - c2) * big_g, -config.omega0 * t)) * r10;
            rho(1, 0) = std::conj(rho(0, 1));
            out.push_back(rho);
        }
        return out;
    }

    Vector3d r = density_to_bloch(rho0);
    const auto rhs = [&](double t, const Vector3d& v) -> Vector3d {
        return ohmic_generator_block(config, t) * v;
    };
    double t_prev = 0.0;
    for (double t : t_grid) {
        if (t < t_prev) throw std::invalid_argument("ohmic_density_ode: t_grid must be increasing");
        ode::integrate(rhs, r, t_prev, t, opts);
        t_prev = t;
        out.push_back(bloch_to_density(r));
    }
    return out;
}

} // namespace qmet::dynamics
