// Transfer maps, short-time Dyson solutions, Choi/Kraus conversion, classifiers

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qmet/channel.hpp"

using namespace qmet;
using Catch::Approx;

namespace {

Matrix2cd act_by_kraus(const channel::KrausSet& set, const Matrix2cd& x) {
    Matrix2cd out = Matrix2cd::Zero();
    for (const auto& k : set.operators) out += k * x * k.adjoint();
    return out;
}

channel::TransferMap rotation_map(double omega0, double t) {
    channel::TransferMap map;
    map.t = t;
    map.matrix.setZero();
    map.matrix(0, 0) = map.matrix(3, 3) = 1.0;
    map.matrix(1, 1) = map.matrix(2, 2) = std::cos(omega0 * t);
    map.matrix(1, 2) = -std::sin(omega0 * t);
    map.matrix(2, 1) = std::sin(omega0 * t);
    Matrix4d d = Matrix4d::Zero();
    d(1, 1) = d(2, 2) = -t * std::sin(omega0 * t);
    d(1, 2) = -t * std::cos(omega0 * t);
    d(2, 1) = t * std::cos(omega0 * t);
    map.derivative = d;
    return map;
}

} // namespace

TEST_CASE("short-time map") {
    SECTION("identity at t = 0") {
        const auto m = channel::short_time_map(1.0, 0.5, 0.3, 0.0);
        CHECK((m.matrix - Matrix4d::Identity()).norm() == 0.0);
    }
    SECTION("noiseless limit is the Taylor rotation") {
        const double w0 = 1.3, t = 0.2;
        const auto m = channel::short_time_map(w0, 0.0, 0.3, t);
        CHECK(m.matrix(1, 1) == Approx(1.0 - 0.5 * w0 * w0 * t * t));
        CHECK(m.matrix(1, 2) == Approx(-(w0 * t - std::pow(w0 * t, 3) / 6.0)));
        CHECK(m.matrix(2, 1) == Approx(w0 * t - std::pow(w0 * t, 3) / 6.0));
        CHECK(m.matrix(3, 3) == Approx(1.0));
    }
    SECTION("pure dephasing decouples z") {
        const auto m = channel::short_time_map(1.0, 0.5, kPi / 2, 0.3);
        CHECK(m.matrix(3, 3) == Approx(1.0));
        CHECK(m.matrix(1, 3) == Approx(0.0).margin(1e-15));
        CHECK(m.matrix(3, 1) == Approx(0.0).margin(1e-15));
        // secular and non-secular variants coincide for pure dephasing
        const auto sec = channel::short_time_map(1.0, 0.5, kPi / 2, 0.3, true);
        CHECK((m.matrix - sec.matrix).norm() < 1e-14);
    }
    SECTION("analytic derivative matches finite differences") {
        const double t = 0.25, alpha = 0.8, vt = 0.5;
        for (bool secular : {false, true}) {
            const double h = 1e-6;
            const auto lo = channel::short_time_map(1.0 - h, alpha, vt, t, secular);
            const auto hi = channel::short_time_map(1.0 + h, alpha, vt, t, secular);
            const auto m = channel::short_time_map(1.0, alpha, vt, t, secular);
            const Matrix4d fd = (hi.matrix - lo.matrix) / (2.0 * h);
            CHECK((fd - *m.derivative).norm() < 1e-8);
        }
    }
}

TEST_CASE("Choi matrix") {
    SECTION("identity map gives the rank-1 entangled projector") {
        const auto choi = channel::choi_matrix(channel::TransferMap::identity());
        Eigen::SelfAdjointEigenSolver<Matrix4cd> es(choi);
        CHECK(es.eigenvalues()(3) == Approx(2.0));
        CHECK(es.eigenvalues().head(3).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("short-time maps are completely positive") {
        for (double t : {0.05, 0.15, 0.3})
            CHECK(channel::min_choi_eigenvalue(channel::short_time_map(1.0, 0.8, 0.4, t)) >= -1e-6);
    }
    SECTION("completely depolarizing map") {
        channel::TransferMap depol;
        depol.matrix.setZero();
        depol.matrix(0, 0) = 1.0;
        Eigen::SelfAdjointEigenSolver<Matrix4cd> es(channel::choi_matrix(depol));
        for (int i = 0; i < 4; ++i) CHECK(es.eigenvalues()(i) == Approx(0.5));
    }
}

TEST_CASE("Kraus decomposition") {
    SECTION("unitary channel gives a single Kraus operator") {
        const auto set = channel::kraus_from_map(rotation_map(1.0, 0.7));
        REQUIRE(set.operators.size() == 1);
        // equal, up to a global phase, to the z-rotation by 0.7
        Matrix2cd u = Matrix2cd::Zero();
        u(0, 0) = std::exp(Complex(0.0, -0.35));
        u(1, 1) = std::exp(Complex(0.0, 0.35));
        const Complex phase = set.operators[0](0, 0) / u(0, 0);
        CHECK(std::abs(std::abs(phase) - 1.0) < 1e-10);
        CHECK((set.operators[0] - phase * u).norm() < 1e-10);
    }
    SECTION("round trip reproduces the transfer matrix") {
        for (double t : {0.05, 0.2, 0.35}) {
            const auto map = channel::short_time_map(1.2, 0.7, 0.4, t);
            const auto set = channel::kraus_from_map(map);
            const Matrix2cd excited = 0.5 * (ops::identity() + ops::sigma_z());
            for (const auto& basis : {ops::sigma_x(), ops::sigma_z(), excited,
                                      Matrix2cd(ops::sigma_plus())}) {
                const Matrix2cd via_map = apply_transfer(map.matrix, basis);
                CHECK((act_by_kraus(set, basis) - via_map).norm() < 1e-8);
            }
        }
    }
    SECTION("completely depolarizing map has four Kraus operators") {
        channel::TransferMap depol;
        depol.matrix.setZero();
        depol.matrix(0, 0) = 1.0;
        const auto set = channel::kraus_from_map(depol);
        REQUIRE(set.operators.size() == 4);
        const Matrix2cd out = act_by_kraus(set, 0.5 * (ops::identity() + ops::sigma_z()));
        CHECK((out - 0.5 * Matrix2cd::Identity()).norm() < 1e-10);
    }
    SECTION("semigroup dephasing weights") {
        const double g = 0.8, t = 1.0;
        channel::TransferMap deph;
        deph.t = t;
        deph.matrix = Eigen::Vector4d(1.0, std::exp(-g), std::exp(-g), 1.0).asDiagonal();
        Eigen::SelfAdjointEigenSolver<Matrix4cd> eigsolver(channel::choi_matrix(deph));
        const Eigen::Vector4d values = eigsolver.eigenvalues();
        std::vector<double> weights;
        for (int i = 0; i < 4; ++i)
            if (values(i) > 1e-12) weights.push_back(values(i) / 2.0);
        REQUIRE(weights.size() == 2);
        std::sort(weights.begin(), weights.end());
        CHECK(weights[0] == Approx(0.5 * (1.0 - std::exp(-g))));
        CHECK(weights[1] == Approx(0.5 * (1.0 + std::exp(-g))));
    }
    SECTION("not completely positive input throws") {
        channel::TransferMap bad;
        bad.matrix = Eigen::Vector4d(1.0, 1.0, 1.0, -1.0).asDiagonal();
        CHECK_THROWS_AS(channel::kraus_from_map(bad), channel::NotCompletelyPositive);
    }
}

TEST_CASE("Kraus derivatives") {
    const double delta = 1e-6;
    SECTION("frequency-independent channel gives zero derivatives") {
        channel::TransferMap deph;
        deph.matrix = Eigen::Vector4d(1.0, 0.7, 0.7, 1.0).asDiagonal();
        const auto set = channel::kraus_derivative_pair(deph, deph, deph, delta);
        REQUIRE(set.derivatives.size() == set.operators.size());
        for (const auto& kd : set.derivatives) CHECK(kd.norm() < 1e-10);
    }
    SECTION("unitary family matches the analytic generator up to gauge") {
        const double w0 = 1.0, t = 0.6;
        const auto set = channel::kraus_derivative_pair(
            rotation_map(w0 - delta, t), rotation_map(w0, t), rotation_map(w0 + delta, t), delta);
        REQUIRE(set.operators.size() == 1);
        // dK/dw0 = -i (t/2) sigma_z K + i phi K for some real gauge phi
        const Matrix2cd k = set.operators[0];
        const Matrix2cd kd = set.derivatives[0];
        const Matrix2cd expected = Complex(0.0, -0.5 * t) * ops::sigma_z() * k;
        const Complex gauge = ((kd - expected) * k.adjoint()).trace() / 2.0;
        CHECK(std::abs(gauge.real()) < 1e-6);
        CHECK((kd - expected - Complex(0.0, 1.0) * gauge.imag() * k).norm() < 1e-5);
    }
    SECTION("trace-preservation consistency sum") {
        for (double t : {0.1, 0.3}) {
            const auto set = channel::kraus_derivative_pair(
                channel::short_time_map(1.0 - delta, 0.8, 0.4, t),
                channel::short_time_map(1.0, 0.8, 0.4, t),
                channel::short_time_map(1.0 + delta, 0.8, 0.4, t), delta);
            Matrix2cd sum = Matrix2cd::Zero();
            for (std::size_t i = 0; i < set.operators.size(); ++i)
                sum += set.derivatives[i].adjoint() * set.operators[i];
            CHECK((sum + sum.adjoint()).norm() < 1e-6);
        }
    }
}

TEST_CASE("map geometry") {
    SECTION("reconstruction") {
        for (double t : {0.1, 0.25}) {
            const auto map = channel::short_time_map(1.3, 0.6, 0.3, t);
            const auto geo = channel::map_geometry(map);
            const Matrix3d rebuilt =
                geo.rotation_pre * geo.scalings.asDiagonal() * geo.rotation_post;
            CHECK((rebuilt - map.block()).norm() < 1e-10);
            CHECK((geo.translation - map.translation()).norm() < 1e-12);
            CHECK(geo.rotation_pre.determinant() == Approx(1.0));
            CHECK(geo.rotation_post.determinant() == Approx(1.0));
        }
    }
    SECTION("CPTP scalings stay inside the unit interval") {
        for (double t : {0.05, 0.2, 0.35}) {
            const auto geo = channel::map_geometry(channel::short_time_map(1.0, 0.8, 0.4, t));
            CHECK(geo.scalings.cwiseAbs().maxCoeff() <= 1.0 + 1e-8);
        }
    }
}

TEST_CASE("classification") {
    SECTION("secular short-time maps are phase covariant") {
        const auto c = channel::classify(channel::short_time_map(1.0, 0.6, 0.4, 0.2, true));
        CHECK(c.phase_covariant);
        CHECK(c.cptp);
    }
    SECTION("non-secular tilted maps are not phase covariant") {
        const auto map = channel::short_time_map(1.0, 0.6, 0.4, 0.2, false);
        CHECK_FALSE(channel::is_phase_covariant(map));
    }
    SECTION("transversal non-secular maps break phase covariance in-plane") {
        // no x-z mixing at theta_coupling = 0, but x and y damp at different
        // rates, which already breaks covariance
        const auto map = channel::short_time_map(1.0, 0.6, 0.0, 0.2, false);
        CHECK(map.matrix(1, 3) == 0.0);
        CHECK(map.matrix(3, 1) == 0.0);
        CHECK(map.matrix(2, 3) == 0.0);
        CHECK(map.matrix(3, 2) == 0.0);
        CHECK_FALSE(channel::is_phase_covariant(map));
    }
    SECTION("unital dephasing, non-unital amplitude-damping-like translation") {
        channel::TransferMap deph;
        deph.matrix = Eigen::Vector4d(1.0, 0.7, 0.7, 1.0).asDiagonal();
        CHECK(channel::classify(deph).unital);
        channel::TransferMap ad;
        ad.matrix = Eigen::Vector4d(1.0, 0.8, 0.8, 0.64).asDiagonal();
        ad.matrix(3, 0) = 0.36;
        const auto c = channel::classify(ad);
        CHECK_FALSE(c.unital);
        CHECK(c.cptp);
        CHECK(c.phase_covariant);
    }
}
