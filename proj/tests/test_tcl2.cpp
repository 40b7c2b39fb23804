// Master-equation coefficients, Lamb shift and the generator transfer matrix

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qmet/quadrature.hpp"
#include "qmet/tcl2.hpp"

using namespace qmet;
using Catch::Approx;
using tcl2::kMinus;
using tcl2::kPlus;
using tcl2::kZ;

namespace {

bath::BathModel ohmic_high_t(double lambda, double omega_c, double beta, bool wide = false) {
    return bath::BathModel(bath::SpectralDensity(bath::OhmicSpectrum{lambda, omega_c}), beta,
                           true, wide);
}

// f1, f2 of the high-temperature generator, by independent quadrature
double f_integral(const bath::BathModel& model, double omega0, double t, bool cosine) {
    const double limit = model.spectral.support_limit();
    const auto f = [&](double w) {
        const double u = w - omega0;
        const double x = u * t;
        double kernel;
        if (cosine) {
            kernel = std::abs(x) < 1e-6 ? -0.5 * u * t * t : (std::cos(x) - 1.0) / u;
        } else {
            kernel = std::abs(x) < 1e-6 ? t * (1.0 - x * x / 6.0) : std::sin(x) / u;
        }
        return bath::correlation_weight(model, w) * kernel;
    };
    return quad::integrate_segments(f, {-limit, 0.0, omega0, limit + std::abs(omega0)}).value;
}

} // namespace

TEST_CASE("dissipator coefficients") {
    const auto model = ohmic_high_t(0.5, 3.0, 2.0);
    SECTION("pure dephasing keeps only b_zz") {
        const auto c = tcl2::dissipator_coefficients(model, 1.0, kPi / 2, 0.8);
        CHECK(std::abs(c.b(kZ, kZ)) > 1e-6);
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j)
                if (!(k == kZ && j == kZ)) CHECK(std::abs(c.b(k, j)) < 1e-14);
    }
    SECTION("transversal coupling removes all z entries") {
        const auto c = tcl2::dissipator_coefficients(model, 1.0, 0.0, 0.8);
        CHECK(std::abs(c.b(kZ, kZ)) < 1e-14);
        CHECK(std::abs(c.b(kZ, kPlus)) < 1e-14);
        CHECK(std::abs(c.b(kZ, kMinus)) < 1e-14);
        CHECK(std::abs(c.b(kPlus, kPlus)) > 1e-6);
    }
    SECTION("wide cutoff collapses every entry to Gamma(0, t) weights") {
        const auto wide = ohmic_high_t(0.5, 3.0, 2.0, true);
        const double vt = 0.6, t = 0.9;
        const auto c = tcl2::dissipator_coefficients(wide, 1.0, vt, t);
        const double g0 = bath::gamma_integral(wide, 0.0, t).value.real();
        const double s = std::sin(vt), co = std::cos(vt);
        CHECK(c.b(kZ, kZ).real() == Approx(0.5 * s * s * g0));
        CHECK(c.b(kPlus, kPlus).real() == Approx(0.5 * co * co * g0));
        CHECK(c.b(kMinus, kMinus).real() == Approx(0.5 * co * co * g0));
        CHECK(c.b(kPlus, kMinus).real() == Approx(0.5 * co * co * g0));
        CHECK(c.b(kZ, kPlus).real() == Approx(0.5 * s * co * g0));
        CHECK(c.b(kZ, kMinus).real() == Approx(0.5 * s * co * g0));
    }
    SECTION("index Hermiticity and real diagonal") {
        const auto c = tcl2::dissipator_coefficients(model, 1.3, 0.4, 1.1);
        CHECK(std::abs(c.b(kPlus, kMinus) - std::conj(c.b(kMinus, kPlus))) < 1e-14);
        CHECK(std::abs(c.b(kZ, kPlus) - std::conj(c.b(kPlus, kZ))) < 1e-14);
        CHECK(std::abs(c.b(kZ, kMinus) - std::conj(c.b(kMinus, kZ))) < 1e-14);
        CHECK(std::abs(std::imag(c.b(kPlus, kPlus))) < 1e-14);
        CHECK(std::abs(std::imag(c.b(kMinus, kMinus))) < 1e-14);
        CHECK(std::abs(std::imag(c.b(kZ, kZ))) < 1e-14);
    }
}

TEST_CASE("Lamb shift") {
    const auto model = ohmic_high_t(0.5, 3.0, 2.0);
    SECTION("vanishes for pure dephasing") {
        CHECK(tcl2::lamb_shift(model, 1.0, kPi / 2, 0.7).norm() < 1e-14);
    }
    SECTION("vanishes in the wide-cutoff regime") {
        const auto wide = ohmic_high_t(0.5, 3.0, 2.0, true);
        CHECK(tcl2::lamb_shift(wide, 1.0, 0.4, 0.7).norm() < 1e-8);
    }
    SECTION("symmetric weights give opposite diagonal entries") {
        const auto h = tcl2::lamb_shift(model, 1.0, 0.3, 0.9);
        CHECK(h(1, 1).real() == Approx(-h(0, 0).real()).margin(1e-10));
        CHECK((h - h.adjoint()).norm() < 1e-14);
    }
}

TEST_CASE("secular truncation") {
    const auto model = ohmic_high_t(0.5, 3.0, 2.0);
    SECTION("pure dephasing is a fixed point") {
        const auto c = tcl2::dissipator_coefficients(model, 1.0, kPi / 2, 0.8);
        const auto s = tcl2::secular_truncate(c);
        CHECK((s.b - c.b).norm() < 1e-14);
        CHECK((s.h_ls - c.h_ls).norm() < 1e-14);
    }
    SECTION("idempotent") {
        const auto c = tcl2::dissipator_coefficients(model, 1.0, 0.4, 0.8);
        const auto once = tcl2::secular_truncate(c);
        const auto twice = tcl2::secular_truncate(once);
        CHECK((once.b - twice.b).norm() == 0.0);
        CHECK((once.h_ls - twice.h_ls).norm() == 0.0);
    }
    SECTION("zero in, zero out") {
        tcl2::GeneratorCoefficients zero;
        const auto s = tcl2::secular_truncate(zero);
        CHECK(s.b.norm() == 0.0);
        CHECK(s.h_ls.norm() == 0.0);
    }
    SECTION("secular generator has the PC block pattern") {
        auto c = tcl2::dissipator_coefficients(model, 1.0, 0.4, 0.8);
        const auto g = tcl2::generator_ptm(tcl2::secular_truncate(c)).matrix;
        CHECK(g(1, 1) == Approx(g(2, 2)).margin(1e-12));
        CHECK(g(1, 2) == Approx(-g(2, 1)).margin(1e-12));
        for (auto [a, b] : {std::pair{1, 3}, {3, 1}, {2, 3}, {3, 2}}) CHECK(std::abs(g(a, b)) < 1e-12);
        CHECK(std::abs(g(3, 0)) < 1e-12); // unital in the high-T regime
    }
}

TEST_CASE("generator transfer matrix") {
    SECTION("Hamiltonian-only limit is a z-rotation generator") {
        tcl2::GeneratorCoefficients c;
        c.omega0 = 1.0;
        const auto g = tcl2::generator_ptm(c).matrix;
        Matrix4d expected = Matrix4d::Zero();
        expected(1, 2) = -1.0;
        expected(2, 1) = 1.0;
        CHECK((g - expected).norm() < 1e-12);
    }
    SECTION("trace preservation: zero first row everywhere") {
        const auto model = ohmic_high_t(0.5, 3.0, 2.0);
        for (double vt : {0.0, 0.4, kPi / 2})
            for (double t : {0.1, 0.9, 2.5}) {
                const auto g =
                    tcl2::generator_ptm(tcl2::dissipator_coefficients(model, 1.2, vt, t));
                CHECK(g.matrix.row(0).norm() < 1e-12);
            }
    }
    SECTION("high-T transversal entries match the f1 quadrature") {
        const auto model = ohmic_high_t(0.5, 3.0, 2.0);
        const double w0 = 1.2;
        for (double t : {0.3, 1.0, 2.0}) {
            const auto g = tcl2::generator_ptm(tcl2::dissipator_coefficients(model, w0, 0.0, t));
            const double f1 = f_integral(model, w0, t, false);
            CHECK(g.matrix(3, 3) == Approx(-f1).epsilon(1e-6));
            CHECK(g.matrix(1, 1) == Approx(0.0).margin(1e-8));
        }
    }
    SECTION("unitality of the high-T dissipator") {
        const auto model = ohmic_high_t(0.5, 3.0, 2.0);
        const auto c = tcl2::dissipator_coefficients(model, 1.0, 0.4, 0.8);
        const auto g = tcl2::generator_ptm(c);
        // identity column: the generator annihilates the identity
        CHECK(g.matrix.col(0).norm() < 1e-10);
    }
}
