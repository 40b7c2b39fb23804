// qfi.hpp — single-probe quantum Fisher information: Bloch-vector formula,
// fourth-order short-time expansions, analytic PC expressions, auxiliary
// (frozen-rate) QFI and the classical Fisher information

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qmet/channel.hpp"
#include "qmet/linalg.hpp"

namespace qmet::qfi {

struct BlochState {
    Vector3d r = Vector3d::Zero();

    static BlochState pure(double theta, double phi) {
        return {Vector3d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                         std::cos(theta))};
    }
    bool is_pure(double tol = 1e-12) const { return std::abs(r.norm() - 1.0) <= tol; }
};

enum class QfiVariant { bloch, short_time_pc, short_time_npc, pc_analytic, auxiliary };

struct QfiValue {
    double value = 0.0; // units time^2
    double t = 0.0;
    QfiVariant variant = QfiVariant::bloch;
};

// F_Q = |Vdot r0|^2 + (V r0 . Vdot r0)^2 / (1 - |V r0|^2); the second term is
// dropped when the evolved state is pure within 1e-10.
inline QfiValue qfi_bloch(const Matrix3d& v, const Matrix3d& v_dot, const BlochState& r0,
                          double t = 0.0) {
    const Vector3d rt = v * r0.r;
    const Vector3d rdot = v_dot * r0.r;
    const double purity_gap = 1.0 - rt.squaredNorm();
    if (purity_gap < -1e-8) throw std::invalid_argument("qfi_bloch: |V r0| > 1, map not a contraction");
    QfiValue out;
    out.t = t;
    out.value = rdot.squaredNorm();
    if (purity_gap >= 1e-10) out.value += std::pow(rt.dot(rdot), 2) / purity_gap;
    return out;
}

inline QfiValue qfi_bloch(const channel::TransferMap& map, const BlochState& r0) {
    return qfi_bloch(map.block(), map.derivative_block(), r0, map.t);
}

namespace detail {

// NPC correction of the fourth-order expansion, with the denominator
// regularized by sin(theta) cos^2(coupling) so it stays finite everywhere.
inline double npc_correction_over_alpha_t4(double theta, double phi, double vartheta) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sv = std::sin(vartheta), cv = std::cos(vartheta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double term1 = st * ct * (2.0 * sv * cv) * cp / 3.0;
    const double a = sv * ct + cv * cp * st;
    const double num = sp * sp * a * a * cv * cv * st * st / 4.0;
    const double den = cv * cv * ct * ct - 2.0 * sv * cv * cp * ct * st +
                       st * st * (1.0 - cv * cv * cp * cp);
    if (std::abs(den) < 1e-12) {
        if (std::abs(num) < 1e-24) return term1; // removable: limit along phi
        const double eps = 1e-4;
        return 0.5 * (npc_correction_over_alpha_t4(theta, phi + eps, vartheta) +
                      npc_correction_over_alpha_t4(theta, phi - eps, vartheta));
    }
    return term1 + num / den;
}

} // namespace detail

// Fourth-order short-time QFI; validity requires alpha t^2 << 1, omega0 t <~ 1.
inline QfiValue qfi_short_time(double theta, double phi, double theta_coupling, double alpha,
                               double /*omega0*/, double t, bool secular) {
    const double st2 = std::pow(std::sin(theta), 2);
    const double sv2 = std::pow(std::sin(theta_coupling), 2);
    QfiValue out;
    out.t = t;
    out.variant = secular ? QfiVariant::short_time_pc : QfiVariant::short_time_npc;
    out.value = st2 * t * t - alpha / 3.0 * st2 * (1.0 + sv2) * std::pow(t, 4);
    if (!secular)
        out.value += alpha * std::pow(t, 4) *
                     detail::npc_correction_over_alpha_t4(theta, phi, theta_coupling);
    return out;
}

struct PcAnalyticResult {
    QfiValue aux;
    QfiValue full;
};

// Analytic PC QFI from the map parameters: equatorial contraction d and its
// frequency derivative, z-contraction dz, z-translation vz, initial z0 of a
// pure state, and the frequency derivative of z(t) = vz + z0 dz.
inline PcAnalyticResult qfi_pc_analytic(double d, double d_dot, double dz, double vz, double z0,
                                        double z_dot, double t) {
    const double xy0_sq = 1.0 - z0 * z0;
    if (xy0_sq < -1e-12) throw std::invalid_argument("qfi_pc_analytic: |z0| > 1");
    const double dzt = std::abs(d) * std::sqrt(std::max(xy0_sq, 0.0));
    const double dzt_dot = (d == 0.0) ? 0.0 : (d * d_dot / std::abs(d)) * std::sqrt(std::max(xy0_sq, 0.0));
    const double z = vz + z0 * dz;
    const double gap = 1.0 - dzt * dzt - z * z;
    if (gap < -1e-10) throw std::invalid_argument("qfi_pc_analytic: state outside the Bloch ball");

    PcAnalyticResult out;
    out.aux = {t * t * dzt * dzt, t, QfiVariant::pc_analytic};
    double full = out.aux.value + dzt_dot * dzt_dot + z_dot * z_dot;
    if (gap >= 1e-10 && d != 0.0)
        full += std::pow(dzt * dzt * d_dot / d + z * z_dot, 2) / gap;
    out.full = {full, t, QfiVariant::pc_analytic};
    return out;
}

// QFI with the noise rates frozen: differentiate only the explicit rotation
// frequency, with the rate argument held fixed at Omega = omega0.
inline QfiValue auxiliary_qfi(
    const std::function<channel::TransferMap(double, double)>& map_family, const BlochState& r0,
    double omega0) {
    const channel::TransferMap center = map_family(omega0, omega0);
    const double h = 1e-5 * std::max(std::abs(omega0), 1.0);
    const Matrix3d vdot =
        (map_family(omega0 + h, omega0).block() - map_family(omega0 - h, omega0).block()) /
        (2.0 * h);
    QfiValue out = qfi_bloch(center.block(), vdot, r0, center.t);
    out.variant = QfiVariant::auxiliary;
    return out;
}

// Classical Fisher information sum p_dot^2 / p over outcome probabilities
inline double classical_fi(const std::vector<double>& p, const std::vector<double>& p_dot) {
    if (p.size() != p_dot.size()) throw std::invalid_argument("classical_fi: size mismatch");
    double sum_p = 0.0, sum_pdot = 0.0, fi = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < -1e-12) throw std::invalid_argument("classical_fi: negative probability");
        sum_p += p[i];
        sum_pdot += p_dot[i];
        if (p[i] < 1e-14) {
            if (std::abs(p_dot[i]) < 1e-14) continue;
            return std::numeric_limits<double>::infinity();
        }
        fi += p_dot[i] * p_dot[i] / p[i];
    }
    if (std::abs(sum_p - 1.0) > 1e-8 || std::abs(sum_pdot) > 1e-8)
        throw std::invalid_argument("classical_fi: not a normalized probability family");
    return fi;
}

struct StateAngles {
    double theta;
    double phi;
};

// Initial pure state maximizing the fourth-order NPC QFI
inline StateAngles optimal_short_time_state(double theta_coupling) {
    if (theta_coupling < 0.0 || theta_coupling > 0.5 * kPi)
        throw std::domain_error("optimal_short_time_state: coupling angle outside [0, pi/2]");
    return {0.5 * kPi, std::atan(std::sqrt(std::sin(theta_coupling)))};
}

} // namespace qmet::qfi
