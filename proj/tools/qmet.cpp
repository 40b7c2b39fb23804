// qmet.cpp — command-line front end: bath integrals, map trajectories,
// single-probe QFI curves, N-probe bounds, parity precision and the full
// scaling study, all emitted as versioned CSV plus a plot-script artifact.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmet/bath.hpp"
#include "qmet/config.hpp"
#include "qmet/csv.hpp"
#include "qmet/dynamics.hpp"
#include "qmet/nprobe.hpp"
#include "qmet/pipeline.hpp"
#include "qmet/qfi.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitInvariant = 3;

struct Settings {
    std::string config_path;
    std::string output = "qmet_out.csv";

    // bath
    std::string bath_variant = "ohmic";
    std::string bath_file;
    double lambda = 0.5;
    double omega_c = 10.0;
    double beta = 10.0;
    bool high_temperature = true;
    bool wide_cutoff = false;

    // dynamics
    double omega0 = 1.0;
    double theta_coupling = 0.0;
    bool secular = false;
    bool semigroup = false;

    // probe state
    double theta = qmet::kPi / 2;
    double phi = 0.0;

    // grids
    double t_min = 1e-3;
    double t_max = 10.0;
    std::size_t t_points = 200;
    long n = 10;
    long n_lo = 10;
    long n_hi = 10000;
    int per_decade = 25;
    unsigned seed = 20240915;

    void load_config() {
        if (config_path.empty()) return;
        const auto kv = qmet::config::KeyValue::from_file(config_path);
        bath_variant = kv.get_string("bath.variant", bath_variant);
        bath_file = kv.get_string("bath.file", bath_file);
        lambda = kv.get_double("bath.lambda", lambda);
        omega_c = kv.get_double("bath.omega_c", omega_c);
        beta = kv.get_double("bath.beta", beta);
        high_temperature = kv.get_bool("bath.high_temperature", high_temperature);
        wide_cutoff = kv.get_bool("bath.wide_cutoff", wide_cutoff);
        omega0 = kv.get_double("omega0", omega0);
        theta_coupling = kv.get_double("theta_coupling", theta_coupling);
        secular = kv.get_bool("secular", secular);
        semigroup = kv.get_bool("semigroup", semigroup);
        theta = kv.get_double("state.theta", theta);
        phi = kv.get_double("state.phi", phi);
        t_min = kv.get_double("t.min", t_min);
        t_max = kv.get_double("t.max", t_max);
        t_points = static_cast<std::size_t>(kv.get_long("t.points", static_cast<long>(t_points)));
        n = kv.get_long("n", n);
        n_lo = kv.get_long("n.lo", n_lo);
        n_hi = kv.get_long("n.hi", n_hi);
        per_decade = static_cast<int>(kv.get_long("n.per_decade", per_decade));
        seed = static_cast<unsigned>(kv.get_long("seed", static_cast<long>(seed)));
        output = kv.get_string("output", output);
    }

    void validate() const {
        if (lambda < 0 || omega_c <= 0 || beta <= 0)
            throw CLI::ValidationError("bath parameters must be positive");
        if (t_min <= 0 || t_max <= t_min || t_points < 2)
            throw CLI::ValidationError("time grid requires 0 < t.min < t.max, >= 2 points");
        if (n < 1 || n_lo < 1 || n_hi < n_lo)
            throw CLI::ValidationError("probe counts must satisfy 1 <= n.lo <= n.hi");
        if (semigroup && !wide_cutoff && bath_variant == "ohmic" && !high_temperature)
            throw CLI::ValidationError("semigroup limit requires the high-temperature regime");
    }

    qmet::bath::BathModel bath_model() const {
        using namespace qmet::bath;
        if (bath_variant == "ohmic")
            return BathModel(SpectralDensity(OhmicSpectrum{lambda, omega_c}), beta,
                             high_temperature, wide_cutoff);
        if (bath_variant == "tabulated") {
            if (bath_file.empty()) throw CLI::ValidationError("bath.file required for tabulated");
            return BathModel(SpectralDensity(TabulatedSpectrum::from_file(bath_file)), beta,
                             high_temperature, wide_cutoff);
        }
        throw CLI::ValidationError("unknown bath.variant: " + bath_variant);
    }

    qmet::dynamics::OhmicConfig ohmic_config() const {
        return {lambda / beta, omega_c, omega0, theta_coupling, secular, semigroup};
    }

    std::vector<double> time_grid() const {
        std::vector<double> t(t_points);
        const double lo = std::log(t_min), hi = std::log(t_max);
        for (std::size_t i = 0; i < t_points; ++i)
            t[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(t_points - 1));
        return t;
    }
};

void emit_plot_script(const std::string& csv_path, const std::string& title,
                      const std::vector<std::pair<std::string, std::string>>& series,
                      bool loglog = false) {
    const std::filesystem::path csv(csv_path);
    std::filesystem::path script = csv;
    script.replace_extension(".plot.py");
    const std::filesystem::path tmp = script.string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << "#!/usr/bin/env python3\n"
            << "import csv\nimport matplotlib.pyplot as plt\n\n"
            << "rows = [r for r in csv.reader(open(" << csv.filename()
            << ")) if r and not r[0].startswith('#')]\n"
            << "header, data = rows[0], rows[1:]\n"
            << "col = {name: i for i, name in enumerate(header)}\n";
        for (const auto& [x, y] : series)
            out << "plt.plot([float(r[col['" << x << "']]) for r in data], [float(r[col['" << y
                << "']]) for r in data], label='" << y << "')\n";
        if (loglog) out << "plt.xscale('log')\nplt.yscale('log')\n";
        out << "plt.xlabel('" << series.front().first << "')\nplt.legend()\nplt.title('" << title
            << "')\nplt.savefig('" << csv.stem().string() << ".png', dpi=150)\n";
    }
    std::filesystem::rename(tmp, script);
}

int cmd_gamma(const Settings& s) {
    const auto model = s.bath_model();
    qmet::csv::Writer w({"t", "re_gamma_0", "im_gamma_0", "re_gamma_plus", "im_gamma_plus",
                         "re_gamma_minus", "im_gamma_minus", "rate"});
    const qmet::dynamics::OhmicConfig cfg = s.ohmic_config();
    for (double t : s.time_grid()) {
        const auto g0 = qmet::bath::gamma_integral(model, 0.0, t);
        const auto gp = qmet::bath::gamma_integral(model, s.omega0, t);
        const auto gm = model.high_temperature
                            ? qmet::bath::GammaValue{std::conj(gp.value), -s.omega0, t,
                                                     gp.error_estimate}
                            : qmet::bath::gamma_integral(model, -s.omega0, t);
        const double rate = s.bath_variant == "ohmic" && model.high_temperature
                                ? qmet::dynamics::ohmic_rate(cfg, t)
                                : 0.5 * g0.value.real();
        w.row(t, g0.value.real(), g0.value.imag(), gp.value.real(), gp.value.imag(),
              gm.value.real(), gm.value.imag(), rate);
    }
    w.save(s.output);
    emit_plot_script(s.output, "bath memory integrals",
                     {{"t", "re_gamma_0"}, {"t", "re_gamma_plus"}, {"t", "rate"}});
    return kExitOk;
}

int cmd_map(const Settings& s) {
    const auto cfg = s.ohmic_config();
    std::vector<std::string> cols = {"t"};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) cols.push_back("v" + std::to_string(a) + std::to_string(b));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) cols.push_back("dv" + std::to_string(a) + std::to_string(b));
    qmet::csv::Writer w(cols);
    for (double t : s.time_grid()) {
        const auto map = qmet::dynamics::ohmic_map(cfg, t);
        std::ostringstream line;
        line << std::setprecision(17) << t;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) line << "," << map.matrix(a, b);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) line << "," << (*map.derivative)(a, b);
        w.raw_row(line.str());
    }
    w.save(s.output);
    emit_plot_script(s.output, "transfer-map entries", {{"t", "v11"}, {"t", "v22"}, {"t", "v33"}});
    return kExitOk;
}

int cmd_qfi_single(const Settings& s) {
    const auto cfg = s.ohmic_config();
    auto pc_cfg = cfg;
    pc_cfg.secular = true;
    auto npc_cfg = cfg;
    npc_cfg.secular = false;
    const auto r0 = qmet::qfi::BlochState::pure(s.theta, s.phi);

    qmet::csv::Writer w({"t", "f_npc", "f_pc", "f_aux"});
    for (double t : s.time_grid()) {
        const auto npc = qmet::dynamics::ohmic_map(npc_cfg, t);
        const auto pc = qmet::dynamics::ohmic_map(pc_cfg, t);
        const double f_npc = qmet::qfi::qfi_bloch(npc, r0).value;
        const double f_pc = qmet::qfi::qfi_bloch(pc, r0).value;
        // Ohmic rates are frequency-free, so the auxiliary QFI differentiates
        // the same family; it coincides with f_npc and is emitted as a check.
        const double f_aux =
            qmet::qfi::auxiliary_qfi(
                [&](double w0, double) {
                    auto c = npc_cfg;
                    c.omega0 = w0;
                    return qmet::dynamics::ohmic_map(c, t);
                },
                r0, s.omega0)
                .value;
        w.row(t, f_npc, f_pc, f_aux);
    }
    w.save(s.output);
    emit_plot_script(s.output, "single-probe QFI", {{"t", "f_npc"}, {"t", "f_pc"}, {"t", "f_aux"}});
    return kExitOk;
}

int cmd_bound(const Settings& s) {
    const qmet::pipeline::ChannelProvider provider{s.ohmic_config()};
    qmet::opt::SimplexOptions opts;
    opts.seed = s.seed;
    qmet::csv::Writer w({"t", "f_up", "error"});
    for (double t : s.time_grid()) {
        const auto kraus = provider.kraus(t);
        const auto bound = qmet::nprobe::channel_qfi_bound(kraus, s.n, opts);
        w.row(t, bound.f_up, t / bound.f_up);
    }
    w.save(s.output);
    emit_plot_script(s.output, "channel-extension bound", {{"t", "f_up"}}, true);
    return kExitOk;
}

int cmd_parity(const Settings& s) {
    const qmet::pipeline::ChannelProvider provider{s.ohmic_config()};
    qmet::csv::Writer w({"t", "p_x", "p_x_dot", "error"});
    for (double t : s.time_grid()) {
        const auto map = provider.map(t);
        w.row(t, qmet::nprobe::parity_expectation(map, s.n),
              qmet::nprobe::parity_expectation_derivative(map, s.n),
              qmet::nprobe::parity_precision(map, s.n, t));
    }
    w.save(s.output);
    emit_plot_script(s.output, "GHZ parity precision", {{"t", "error"}}, true);
    return kExitOk;
}

int cmd_scaling(const Settings& s, bool table) {
    std::vector<qmet::pipeline::Regime> regimes;
    if (table) {
        regimes = qmet::pipeline::table_regimes();
    } else {
        qmet::pipeline::Regime r;
        r.ohmic = s.ohmic_config();
        r.name = "custom";
        r.t_min = s.t_min;
        r.t_max = s.t_max;
        r.t_grid = s.t_points;
        r.n_lo = s.n_lo;
        r.n_hi = s.n_hi;
        r.per_decade = s.per_decade;
        r.fit_lo = std::max<double>(static_cast<double>(s.n_lo), s.n_hi / 10.0);
        r.fit_hi = static_cast<double>(s.n_hi);
        r.seed = s.seed;
        regimes.push_back(r);
    }

    qmet::csv::Writer w({"regime", "source", "n", "t_opt", "error", "eta_running"});
    for (const auto& regime : regimes) {
        const auto outcome = qmet::pipeline::run_scaling(regime);
        for (const auto* curve : {&outcome.bound, &outcome.parity}) {
            for (std::size_t i = 0; i < curve->points.size(); ++i) {
                const auto& p = curve->points[i];
                double eta_running = std::numeric_limits<double>::quiet_NaN();
                if (i >= 5) {
                    try {
                        eta_running = qmet::nprobe::scaling_fit(
                                          curve->points, curve->points[i].n / 10.0,
                                          static_cast<double>(curve->points[i].n))
                                          .eta;
                    } catch (const qmet::nprobe::InsufficientData&) {
                    }
                }
                w.row(regime.name, p.source, p.n, p.t_opt, p.error, eta_running);
            }
        }
        w.comment(regime.name + " eta_bound=" + std::to_string(outcome.bound.eta) +
                  " eta_parity=" + std::to_string(outcome.parity.eta));
        std::cout << regime.name << ": eta_bound=" << outcome.bound.eta
                  << " eta_parity=" << outcome.parity.eta << "\n";
    }
    w.save(s.output);
    emit_plot_script(s.output, "precision scaling", {{"n", "error"}}, true);
    return kExitOk;
}

int cmd_check(const Settings& s) {
    using namespace qmet;
    int failures = 0;
    const auto expect = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "ok    " : "FAIL  ") << what << "\n";
        if (!ok) ++failures;
    };

    const auto cfg = s.ohmic_config();
    const auto fam = dynamics::ohmic_generator_family(cfg);
    const auto traj = dynamics::propagate(fam, std::min(s.t_max, 5.0), 21);
    bool trace_ok = true, cptp_ok = true, unital_ok = true;
    for (const auto& m : traj.maps) {
        trace_ok &= std::abs(m.matrix(0, 0) - 1.0) < 1e-10 &&
                    m.matrix.block<1, 3>(0, 1).norm() < 1e-10;
        cptp_ok &= channel::min_choi_eigenvalue(m) >= -1e-6;
        unital_ok &= m.translation().norm() <= 1e-8;
    }
    expect(trace_ok, "trace preservation along trajectory");
    expect(cptp_ok, "complete positivity along trajectory");
    expect(unital_ok, "unitality in the high-temperature regime");

    auto pc_cfg = cfg;
    pc_cfg.secular = true;
    bool pc_ok = true, rot_ok = true;
    for (double t : {0.3, 1.0, 3.0}) {
        const auto pc = dynamics::ohmic_map(pc_cfg, t);
        pc_ok &= channel::is_phase_covariant(pc);
        const double f0 = qfi::qfi_bloch(pc, qfi::BlochState::pure(s.theta, 0.1)).value;
        const double f1 = qfi::qfi_bloch(pc, qfi::BlochState::pure(s.theta, 2.3)).value;
        rot_ok &= std::abs(f0 - f1) < 1e-9 * std::max(1.0, f0);
    }
    expect(pc_ok, "secular maps are phase covariant");
    expect(rot_ok, "PC QFI invariant under z-rotations of the probe");

    const auto map1 = dynamics::ohmic_map(cfg, 0.5);
    bool parity_ok = true;
    for (long n : {1L, 2L, 3L}) {
        // dense brute force over the 2^n GHZ state
        const auto kraus = channel::kraus_from_map(map1);
        const long dim = 1L << n;
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
        rho(0, 0) = rho(0, dim - 1) = rho(dim - 1, 0) = rho(dim - 1, dim - 1) = 0.5;
        for (long q = 0; q < n; ++q) {
            Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(dim, dim);
            for (const auto& k : kraus.operators) {
                Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
                for (long j = 0; j < n; ++j) {
                    const Eigen::MatrixXcd factor =
                        (j == q) ? Eigen::MatrixXcd(k) : Eigen::MatrixXcd(Matrix2cd::Identity());
                    Eigen::MatrixXcd grown(op.rows() * 2, op.cols() * 2);
                    grown << op * factor(0, 0), op * factor(0, 1), op * factor(1, 0),
                        op * factor(1, 1);
                    op = grown;
                }
                next += op * rho * op.adjoint();
            }
            rho = next;
        }
        Eigen::MatrixXcd px = Eigen::MatrixXcd::Identity(1, 1);
        for (long j = 0; j < n; ++j) {
            Eigen::MatrixXcd grown(px.rows() * 2, px.cols() * 2);
            const Matrix2cd sx = ops::sigma_x();
            grown << px * sx(0, 0), px * sx(0, 1), px * sx(1, 0), px * sx(1, 1);
            px = grown;
        }
        const double brute = (px * rho).trace().real();
        parity_ok &= std::abs(brute - nprobe::parity_expectation(map1, n)) < 1e-10;
    }
    expect(parity_ok, "parity expectation matches dense simulation for N <= 3");

    const auto kraus = pipeline::ChannelProvider::kraus_of(map1);
    const double f_up = nprobe::channel_qfi_bound(kraus, 1).f_up;
    const double f_q = qfi::qfi_bloch(map1, qfi::BlochState::pure(kPi / 2, 0.0)).value;
    expect(f_up >= f_q - 1e-9, "channel bound dominates the single-probe QFI");

    return failures == 0 ? kExitOk : kExitInvariant;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-estimation precision toolkit for qubit probes in bosonic baths"};
    app.require_subcommand(1);

    Settings s;
    bool table = false;
    app.add_option("--config", s.config_path, "flat key = value configuration file");
    app.add_option("--output,-o", s.output, "output CSV path");
    app.add_option("--lambda", s.lambda, "bath coupling strength");
    app.add_option("--omega-c", s.omega_c, "bath cutoff frequency");
    app.add_option("--beta", s.beta, "inverse temperature");
    app.add_option("--omega0", s.omega0, "qubit frequency");
    app.add_option("--coupling-angle", s.theta_coupling, "system-bath coupling angle");
    app.add_flag("--secular", s.secular, "secular (phase-covariant) dynamics");
    app.add_flag("--semigroup", s.semigroup, "constant-rate (Lindblad) limit");
    app.add_flag("--wide-cutoff,!--no-wide-cutoff", s.wide_cutoff, "wide-cutoff regime");
    app.add_option("--theta", s.theta, "probe polar angle");
    app.add_option("--phi", s.phi, "probe azimuthal phase");
    app.add_option("--t-min", s.t_min, "time grid start");
    app.add_option("--t-max", s.t_max, "time grid end");
    app.add_option("--t-points", s.t_points, "time grid size");
    app.add_option("--n", s.n, "probe count");
    app.add_option("--n-lo", s.n_lo, "scaling grid lower N");
    app.add_option("--n-hi", s.n_hi, "scaling grid upper N");
    app.add_option("--per-decade", s.per_decade, "scaling grid points per decade");
    app.add_option("--seed", s.seed, "optimizer seed");

    auto* gamma = app.add_subcommand("gamma", "bath memory integrals and rates");
    auto* map = app.add_subcommand("map", "transfer-map trajectory export");
    auto* qfi_single = app.add_subcommand("qfi-single", "single-probe QFI curves");
    auto* bound = app.add_subcommand("bound", "channel-extension bound vs time");
    auto* parity = app.add_subcommand("parity", "GHZ parity precision vs time");
    auto* scaling = app.add_subcommand("scaling", "per-N time optimization and exponent fit");
    scaling->add_flag("--table", table, "run the five benchmark regimes");
    auto* check = app.add_subcommand("check", "run the invariant suite");

    // shared options live on the parent; let "qmet gamma --t-max 2" reach them
    for (auto* sub : {gamma, map, qfi_single, bound, parity, scaling, check})
        sub->fallthrough(true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        s.load_config();
        s.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (gamma->parsed()) return cmd_gamma(s);
        if (map->parsed()) return cmd_map(s);
        if (qfi_single->parsed()) return cmd_qfi_single(s);
        if (bound->parsed()) return cmd_bound(s);
        if (parity->parsed()) return cmd_parity(s);
        if (scaling->parsed()) return cmd_scaling(s, table);
        if (check->parsed()) return cmd_check(s);
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
