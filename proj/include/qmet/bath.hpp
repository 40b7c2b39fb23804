// bath.hpp — spectral densities, thermal occupation, correlation weights and
// the memory integrals Gamma(sigma, t) behind every master-equation rate

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qmet/quadrature.hpp"

namespace qmet::bath {

using Complex = std::complex<double>;

struct OhmicSpectrum {
    double lambda = 1.0;  // dimensionless coupling strength
    double omega_c = 1.0; // cutoff frequency

    double operator()(double omega) const {
        if (omega <= 0.0) return 0.0;
        return lambda * omega * std::exp(-omega / omega_c);
    }
};

// Linearly interpolated J(omega) samples on a strictly increasing positive grid;
// zero outside the grid.
struct TabulatedSpectrum {
    std::vector<double> omega;
    std::vector<double> j;

    TabulatedSpectrum() = default;
    TabulatedSpectrum(std::vector<double> w, std::vector<double> values)
        : omega(std::move(w)), j(std::move(values)) {
        if (omega.size() != j.size() || omega.size() < 2)
            throw std::invalid_argument("tabulated spectrum needs >= 2 samples");
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (omega[i] <= 0.0) throw std::invalid_argument("tabulated frequencies must be > 0");
            if (i > 0 && omega[i] <= omega[i - 1])
                throw std::invalid_argument("tabulated frequencies must be strictly increasing");
            if (j[i] < 0.0) throw std::invalid_argument("spectral density must be >= 0");
        }
    }

    double operator()(double w) const {
        if (w < omega.front() || w > omega.back()) return 0.0;
        auto it = std::lower_bound(omega.begin(), omega.end(), w);
        if (it == omega.begin()) return j.front();
        const std::size_t hi = static_cast<std::size_t>(it - omega.begin());
        const std::size_t lo = hi - 1;
        const double f = (w - omega[lo]) / (omega[hi] - omega[lo]);
        return j[lo] + f * (j[hi] - j[lo]);
    }

    // Two-column whitespace-separated text file: omega  J(omega)
    static TabulatedSpectrum from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open spectral density file: " + path);
        std::vector<double> w, v;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            double a, b;
            if (!(ss >> a >> b)) throw std::runtime_error("malformed spectral density line: " + line);
            w.push_back(a);
            v.push_back(b);
        }
        return TabulatedSpectrum(std::move(w), std::move(v));
    }
};

struct SpectralDensity {
    std::variant<OhmicSpectrum, TabulatedSpectrum> variant;

    SpectralDensity(OhmicSpectrum s) : variant(s) {}
    SpectralDensity(TabulatedSpectrum s) : variant(std::move(s)) {}

    double operator()(double omega) const {
        return std::visit([omega](const auto& s) { return s(omega); }, variant);
    }

    bool is_ohmic() const { return std::holds_alternative<OhmicSpectrum>(variant); }
    const OhmicSpectrum& ohmic() const { return std::get<OhmicSpectrum>(variant); }

    // Frequency beyond which the spectrum is negligible (integration window)
    double support_limit() const {
        if (is_ohmic()) return 45.0 * ohmic().omega_c;
        return std::get<TabulatedSpectrum>(variant).omega.back();
    }
};

struct BathModel {
    SpectralDensity spectral;
    double beta = 1.0;              // inverse temperature
    bool high_temperature = false;  // symmetrized j(omega) ~ J(|omega|)/(beta |omega|)
    bool wide_cutoff = false;       // treat Gamma(+-omega0, t) as Gamma(0, t)

    BathModel(SpectralDensity s, double beta_, bool high_t = false, bool wide = false)
        : spectral(std::move(s)), beta(beta_), high_temperature(high_t), wide_cutoff(wide) {
        if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
    }

    quad::Options quad_options; // defaults: abs 1e-10, rel 1e-8
};

struct GammaValue {
    Complex value{0.0, 0.0}; // units 1/time
    double sigma = 0.0;
    double t = 0.0;
    double error_estimate = 0.0;
};

// Average thermal excitation number N(omega) = 1/(e^{beta omega} - 1)
inline double thermal_occupation(double omega, double beta) {
    if (beta <= 0.0) throw std::domain_error("thermal_occupation: beta must be > 0");
    if (omega == 0.0) throw std::domain_error("thermal_occupation: pole at omega = 0");
    return 1.0 / std::expm1(beta * omega);
}

// Anti-Fourier weight j(omega) of the bath correlation function
inline double correlation_weight(const BathModel& model, double omega) {
    const double scale = model.spectral.is_ohmic() ? model.spectral.ohmic().omega_c
                                                   : model.spectral.support_limit();
    const double tiny = 1e-9 * scale;
    if (model.high_temperature) {
        const double w = std::abs(omega);
        if (w < tiny) {
            // removable point: J(w)/w slope at the origin
            return model.spectral(tiny) / (model.beta * tiny);
        }
        return model.spectral(w) / (model.beta * w);
    }
    if (std::abs(omega) < tiny) {
        const double up = thermal_occupation(tiny, model.beta) * model.spectral(tiny);
        const double dn = (thermal_occupation(tiny, model.beta) + 1.0) * model.spectral(tiny);
        return 0.5 * (up + dn);
    }
    if (omega > 0.0) return thermal_occupation(omega, model.beta) * model.spectral(omega);
    return (thermal_occupation(-omega, model.beta) + 1.0) * model.spectral(-omega);
}

namespace detail {

// (e^{iut} - 1)/(iu) with the removable singularity at u = 0
inline double kernel_re(double u, double t) {
    const double x = u * t;
    if (std::abs(x) < 1e-6) return t * (1.0 - x * x / 6.0);
    return std::sin(x) / u;
}

inline double kernel_im(double u, double t) {
    const double x = u * t;
    if (std::abs(x) < 1e-6) return 0.5 * u * t * t * (1.0 - x * x / 12.0);
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s / u;
}

} // namespace detail

// Gamma(sigma, t) = int_0^t e^{i sigma tau} C(tau) dtau, evaluated as a single
// frequency integral with the analytic inner tau-integral.
inline GammaValue gamma_integral(const BathModel& model, double sigma, double t) {
    if (t < 0.0) throw std::domain_error("gamma_integral: t must be >= 0");
    GammaValue out;
    out.sigma = sigma;
    out.t = t;
    if (t == 0.0) return out;

    const double limit = model.spectral.support_limit();
    std::vector<double> breaks = {-limit - std::abs(sigma), -std::abs(sigma), -sigma, 0.0,
                                  std::abs(sigma), limit + std::abs(sigma)};
    if (model.spectral.is_ohmic()) {
        const double wc = model.spectral.ohmic().omega_c;
        breaks.push_back(-wc);
        breaks.push_back(wc);
    }
    for (double& b : breaks)
        b = std::clamp(b, -limit - std::abs(sigma), limit + std::abs(sigma));

    const auto re_f = [&](double w) {
        return correlation_weight(model, w) * detail::kernel_re(sigma + w, t);
    };
    const auto im_f = [&](double w) {
        return correlation_weight(model, w) * detail::kernel_im(sigma + w, t);
    };
    const quad::Result re = quad::integrate_segments(re_f, breaks, model.quad_options);
    const quad::Result im = quad::integrate_segments(im_f, breaks, model.quad_options);
    out.value = Complex(re.value, im.value);
    out.error_estimate = re.error_estimate + im.error_estimate;
    return out;
}

// Global noise strength alpha = int j(omega) domega (short-time expansion scale)
inline double noise_strength(const BathModel& model) {
    const double limit = model.spectral.support_limit();
    const auto f = [&](double w) { return correlation_weight(model, w); };
    return quad::integrate_segments(f, {-limit, 0.0, limit}, model.quad_options).value;
}

struct DrivenFrame {
    double omega0;         // effective level splitting
    double theta_coupling; // coupling angle
};

// Invert omega - omega_L = -omega0 sin(theta), Omega = -omega0 cos(theta)
inline DrivenFrame driven_frame_parameters(double omega, double omega_L, double Omega) {
    const double detuning = omega - omega_L;
    if (detuning == 0.0 && Omega == 0.0)
        throw std::domain_error("driven_frame_parameters: zero detuning and Rabi frequency");
    return {std::hypot(detuning, Omega), std::atan2(-detuning, -Omega)};
}

} // namespace qmet::bath
