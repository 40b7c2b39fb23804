// Spectral densities, thermal occupation, correlation weights and memory integrals

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include "qmet/bath.hpp"
#include "qmet/linalg.hpp"

using namespace qmet;
using Catch::Approx;

namespace {

bath::BathModel ohmic_high_t(double lambda, double omega_c, double beta, bool wide = false) {
    return bath::BathModel(bath::SpectralDensity(bath::OhmicSpectrum{lambda, omega_c}), beta,
                           true, wide);
}

} // namespace

TEST_CASE("thermal occupation") {
    CHECK(bath::thermal_occupation(50.0, 10.0) == Approx(0.0).margin(1e-12));
    CHECK(bath::thermal_occupation(std::log(2.0), 1.0) == Approx(1.0));
    CHECK(bath::thermal_occupation(0.01, 1.0) == Approx(100.0).epsilon(0.01));
    SECTION("identity -N(-w) = N(w) + 1") {
        for (double w : {0.1, 0.7, 2.5}) {
            CHECK(-bath::thermal_occupation(-w, 2.0) ==
                  Approx(bath::thermal_occupation(w, 2.0) + 1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(bath::thermal_occupation(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(bath::thermal_occupation(1.0, 0.0), std::domain_error);
}

TEST_CASE("correlation weight") {
    SECTION("high-temperature symmetry") {
        const auto model = ohmic_high_t(0.7, 3.0, 2.0);
        for (double w : {0.05, 0.3, 1.0, 2.9, 5.0})
            CHECK(bath::correlation_weight(model, w) ==
                  Approx(bath::correlation_weight(model, -w)).epsilon(1e-12));
    }
    SECTION("large-cutoff value at omega = 1") {
        const auto model = ohmic_high_t(1.0, 1e4, 1.0);
        CHECK(bath::correlation_weight(model, 1.0) == Approx(1.0).epsilon(1e-3));
    }
    SECTION("noise strength alpha = 2 lambda omega_c / beta") {
        for (auto [lambda, omega_c, beta] : {std::array{1.0, 2.0, 1.0}, {0.05, 10.0, 1.0}}) {
            const auto model = ohmic_high_t(lambda, omega_c, beta);
            CHECK(bath::noise_strength(model) ==
                  Approx(2.0 * lambda * omega_c / beta).epsilon(1e-7));
        }
    }
    SECTION("general weight uses detailed balance") {
        const bath::BathModel model(bath::SpectralDensity(bath::OhmicSpectrum{1.0, 2.0}), 1.5,
                                    false, false);
        const double w = 0.8;
        const double up = bath::thermal_occupation(w, 1.5) * model.spectral(w);
        CHECK(bath::correlation_weight(model, w) == Approx(up));
        const double down = (bath::thermal_occupation(w, 1.5) + 1.0) * model.spectral(w);
        CHECK(bath::correlation_weight(model, -w) == Approx(down));
    }
}

TEST_CASE("gamma integral") {
    SECTION("zero at t = 0") {
        const auto model = ohmic_high_t(1.0, 2.0, 1.0);
        for (double sigma : {-1.0, 0.0, 1.0})
            CHECK(std::abs(bath::gamma_integral(model, sigma, 0.0).value) == 0.0);
    }
    SECTION("Ohmic high-temperature closed form at sigma = 0") {
        const double lambda = 0.4, omega_c = 5.0, beta = 2.0;
        const auto model = ohmic_high_t(lambda, omega_c, beta);
        for (double t : {0.01, 0.1, 0.5, 2.0, 10.0}) {
            const auto g = bath::gamma_integral(model, 0.0, t);
            const double expected = 2.0 * lambda / beta * std::atan(omega_c * t);
            CHECK(g.value.real() == Approx(expected).epsilon(1e-6));
            CHECK(std::abs(g.value.imag()) < 1e-8);
        }
    }
    SECTION("approaches the semigroup constant pi lambda / beta") {
        const auto model = ohmic_high_t(1.0, 40.0, 1.0);
        const auto g = bath::gamma_integral(model, 0.0, 2.0);
        CHECK(g.value.real() == Approx(kPi).epsilon(1e-2));
    }
    SECTION("conjugation symmetry for symmetric weights") {
        const auto model = ohmic_high_t(0.3, 4.0, 1.5);
        for (double t : {0.2, 1.0, 3.0})
            for (double sigma : {0.5, 1.0, 2.0}) {
                const auto plus = bath::gamma_integral(model, sigma, t).value;
                const auto minus = bath::gamma_integral(model, -sigma, t).value;
                CHECK(minus.real() == Approx(plus.real()).margin(1e-8));
                CHECK(minus.imag() == Approx(-plus.imag()).margin(1e-8));
            }
    }
    SECTION("Re Gamma(0, t) non-decreasing") {
        const auto model = ohmic_high_t(1.0, 3.0, 1.0);
        double prev = 0.0;
        for (double t = 0.1; t <= 5.0; t += 0.35) {
            const double cur = bath::gamma_integral(model, 0.0, t).value.real();
            CHECK(cur >= prev - 1e-10);
            prev = cur;
        }
    }
}

TEST_CASE("tabulated spectral density") {
    const bath::TabulatedSpectrum tab({1.0, 2.0, 4.0}, {0.5, 1.0, 0.0});
    CHECK(tab(1.5) == Approx(0.75));
    CHECK(tab(3.0) == Approx(0.5));
    CHECK(tab(0.5) == 0.0);
    CHECK(tab(5.0) == 0.0);
    CHECK_THROWS(bath::TabulatedSpectrum({2.0, 1.0}, {0.5, 0.5}));
    CHECK_THROWS(bath::TabulatedSpectrum({-1.0, 1.0}, {0.5, 0.5}));
    CHECK_THROWS(bath::TabulatedSpectrum({1.0, 2.0}, {0.5, -0.5}));

    SECTION("file ingestion") {
        const std::string path = "tab_spectrum_test.txt";
        {
            std::ofstream out(path);
            out << "# omega J\n1.0 0.5\n2.0 1.0\n4.0 0.0\n";
        }
        const auto loaded = bath::TabulatedSpectrum::from_file(path);
        CHECK(loaded(1.5) == Approx(0.75));
        std::remove(path.c_str());
    }
}

TEST_CASE("driven frame parameters") {
    SECTION("transversal") {
        const auto f = bath::driven_frame_parameters(1.0, 1.0, -1.0);
        CHECK(f.omega0 == Approx(1.0));
        CHECK(f.theta_coupling == Approx(0.0).margin(1e-15));
    }
    SECTION("pure dephasing") {
        const auto f = bath::driven_frame_parameters(0.0, 1.0, 0.0);
        CHECK(f.omega0 == Approx(1.0));
        CHECK(f.theta_coupling == Approx(kPi / 2));
    }
    SECTION("3-4-5 triangle") {
        const auto f = bath::driven_frame_parameters(-3.0 / 5, 0.0, -4.0 / 5);
        CHECK(f.omega0 == Approx(1.0));
        CHECK(f.theta_coupling == Approx(std::asin(3.0 / 5)));
    }
    SECTION("round trip") {
        for (auto [det, rabi] : {std::array{0.3, -0.9}, {-1.2, 0.4}, {2.0, 2.0}}) {
            const auto f = bath::driven_frame_parameters(det, 0.0, rabi);
            CHECK(-f.omega0 * std::sin(f.theta_coupling) == Approx(det).epsilon(1e-12));
            CHECK(-f.omega0 * std::cos(f.theta_coupling) == Approx(rabi).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(bath::driven_frame_parameters(1.0, 1.0, 0.0), std::domain_error);
}
