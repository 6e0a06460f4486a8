#include "cavity_bell/correlation.hpp"
#include "cavity_bell/errors.hpp"
#include "cavity_bell/harness.hpp"
#include "cavity_bell/oracle.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

namespace cavity_bell {

namespace {

constexpr double kPi = std::numbers::pi;

// Values bound to CLI options. Only options the user actually passed are
// copied into a job, so a config file fills everything else.
struct StateFlags {
    std::string polarization = "antiparallel";
    double xi = kPi / 4.0;
    double eta = 0.0;
    CLI::Option* pol_opt = nullptr;
    CLI::Option* xi_opt = nullptr;
    CLI::Option* eta_opt = nullptr;
};

struct CavityFlags {
    double omega = 1.0;
    double g = 1.0;
    double gamma = 0.0;
    double gamma2 = 0.0;
    double phi = 0.0;
    CLI::Option* omega_opt = nullptr;
    CLI::Option* g_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* gamma2_opt = nullptr;
    CLI::Option* phi_opt = nullptr;
};

void add_state_flags(CLI::App* app, StateFlags& f) {
    f.pol_opt = app->add_option("--polarization", f.polarization, "antiparallel | parallel");
    f.xi_opt = app->add_option("--xi", f.xi, "mixing angle xi");
    f.eta_opt = app->add_option("--eta", f.eta, "relative phase eta");
}

void add_cavity_flags(CLI::App* app, CavityFlags& f) {
    f.omega_opt = app->add_option("--omega", f.omega, "field frequency");
    f.g_opt = app->add_option("--g", f.g, "spin-field coupling");
    f.gamma_opt = app->add_option("--gamma", f.gamma, "coherent amplitude |alpha|");
    f.gamma2_opt = app->add_option("--gamma2", f.gamma2, "mean photon number |alpha|^2");
    f.gamma_opt->excludes(f.gamma2_opt);
    f.phi_opt = app->add_option("--phi", f.phi, "coherent-state phase");
}

double angle(double v, bool degrees) { return degrees ? v * kPi / 180.0 : v; }

void merge_state(const StateFlags& f, bool degrees, SweepJob& job) {
    Polarization pol = job.spec.polarization();
    double xi = job.spec.xi();
    double eta = job.spec.eta();
    if (f.pol_opt->count() > 0) pol = parse_polarization(f.polarization);
    if (f.xi_opt->count() > 0) xi = angle(f.xi, degrees);
    if (f.eta_opt->count() > 0) eta = angle(f.eta, degrees);
    job.spec = EntangledStateSpec(pol, xi, eta);
}

void merge_cavity(const CavityFlags& f, bool degrees, CavityConfig& cfg) {
    if (f.omega_opt->count() > 0) cfg.omega = f.omega;
    if (f.g_opt->count() > 0) cfg.g = f.g;
    if (f.gamma_opt->count() > 0) cfg.gamma = f.gamma;
    if (f.gamma2_opt->count() > 0) {
        if (f.gamma2 < 0.0) throw ValidationError("--gamma2 must be >= 0");
        cfg.gamma = std::sqrt(f.gamma2);
    }
    if (f.phi_opt->count() > 0) cfg.phi = angle(f.phi, degrees);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt(Complex z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << text;
}

int run_state(const StateFlags& sf, bool degrees) {
    SweepJob job;
    merge_state(sf, degrees, job);
    const TwoQubitState psi = make_entangled(job.spec);
    const DensityMatrix4 rho = density_from_pure(psi);
    static const char* names[4] = {"|++>", "|+->", "|-+>", "|-->"};
    std::cout << "polarization " << to_string(job.spec.polarization()) << "\n"
              << "xi " << fmt(job.spec.xi()) << "\neta " << fmt(job.spec.eta()) << "\n";
    for (int i = 0; i < 4; ++i) std::cout << names[i] << ' ' << fmt(psi[i]) << '\n';
    std::cout << "p_chsh_max " << fmt(max_chsh(rho)) << "\nconcurrence " << fmt(concurrence(rho))
              << '\n';
    return 0;
}

int run_spectrum(const CavityFlags& cf, bool degrees, bool stationary) {
    CavityConfig cfg;
    merge_cavity(cf, degrees, cfg);
    cfg.validate();
    for (const SemiclassicalLevel& level : semiclassical_spectrum(cfg, cfg.gamma)) {
        std::cout << fmt(level.energy) << '\n';
    }
    if (stationary) {
        for (const StationaryPoint& p : stationary_amplitudes(cfg)) {
            std::cout << "stationary branch=" << p.branch << " gamma=" << fmt(p.gamma)
                      << " energy=" << fmt(p.energy) << " kind=" << to_string(p.kind) << '\n';
        }
    }
    return 0;
}

int run_oracle_check(const SweepJob& job, double t_end, std::size_t points, double tol,
                     const std::string& spin_term) {
    std::vector<double> times;
    const double period = job.cfg.period();
    for (std::size_t i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        times.push_back(frac * t_end * period);
    }
    oracle::OracleOptions opts;
    opts.spin_term = oracle::parse_spin_term(spin_term);
    opts.closed_form.tol = job.tol;
    const oracle::ComparisonReport r = oracle::compare_closed_form(job.spec, job.cfg, times, tol, opts);
    std::cout << (r.pass ? "PASS" : "FAIL") << " max_deviation=" << fmt(r.worst)
              << " tolerance=" << fmt(r.tolerance) << " n_max=" << r.n_max << " n_fock=" << r.n_fock
              << " edge_population=" << fmt(r.max_edge_population) << '\n';
    return r.pass ? 0 : 2;
}

bool selftest_line(const std::string& name, double deviation, double tol) {
    const bool ok = deviation <= tol;
    std::cout << (ok ? "PASS " : "FAIL ") << name << " deviation=" << fmt(deviation)
              << " tol=" << fmt(tol) << '\n';
    return ok;
}

int run_selftest() {
    bool ok = true;
    const double root2 = std::sqrt(2.0);

    {
        const EntangledStateSpec singlet(Polarization::Antiparallel, 3.0 * kPi / 4.0, 0.0);
        CavityConfig cfg;
        cfg.gamma = std::sqrt(15.0);
        double dev = 0.0;
        for (double tt : {0.0, 1.3, 4.7, 9.1}) {
            const auto rd = reduced_density(singlet, tt * cfg.period(), cfg);
            dev = std::max({dev, std::abs(max_chsh(rd.rho) - 2.0 * root2),
                            std::abs(concurrence(rd.rho) - 1.0)});
        }
        ok &= selftest_line("singlet-stationary", dev, 1e-6);
    }
    {
        const EntangledStateSpec spec(Polarization::Antiparallel, kPi / 4.0, 0.0);
        const CavityConfig cfg;
        double dev = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double t = 0.1 * i;
            const double c = std::cos(root2 * t);
            dev = std::max(dev, std::abs(concurrence(reduced_density(spec, t, cfg).rho) - c * c));
        }
        ok &= selftest_line("vacuum-rabi", dev, 1e-8);
    }
    {
        double dev = 0.0;
        for (double xi : {0.3, 1.1, 2.0}) {
            for (auto pol : {Polarization::Antiparallel, Polarization::Parallel}) {
                const EntangledStateSpec spec(pol, xi, 0.4);
                CavityConfig cfg;
                cfg.gamma = 2.0;
                const auto rd = reduced_density(spec, 0.0, cfg);
                const double s = std::sin(2.0 * xi);
                dev = std::max({dev, std::abs(max_chsh(rd.rho) - 2.0 * std::sqrt(1.0 + s * s)),
                                std::abs(concurrence(rd.rho) - std::abs(s))});
            }
        }
        ok &= selftest_line("initial-values", dev, 1e-9);
    }
    {
        const EntangledStateSpec spec(Polarization::Parallel, kPi / 3.0, kPi / 6.0);
        CavityConfig cfg;
        cfg.gamma = 1.0;
        std::vector<double> times;
        for (int i = 0; i < 10; ++i) times.push_back(0.5 * i);
        const auto r = oracle::compare_closed_form(spec, cfg, times, 1e-6);
        ok &= selftest_line("oracle-equivalence", r.worst, 1e-6);
    }
    std::cout << (ok ? "selftest PASS" : "selftest FAIL") << '\n';
    return ok ? 0 : 2;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Two-spin entanglement dynamics in a single-mode cavity"};
    app.require_subcommand(1);
    bool degrees = false;
    app.add_flag("--degrees", degrees, "read angle flags in degrees");

    // state
    StateFlags state_flags;
    auto* state_cmd = app.add_subcommand("state", "print the initial entangled state");
    add_state_flags(state_cmd, state_flags);

    // spectrum
    CavityFlags spectrum_flags;
    bool stationary = false;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "semiclassical energy levels");
    add_cavity_flags(spectrum_cmd, spectrum_flags);
    spectrum_cmd->add_flag("--stationary", stationary, "also list stationary coherent amplitudes");

    // sweep
    StateFlags sweep_state;
    CavityFlags sweep_cavity;
    std::string config_path, out_path, manifest_path;
    double t_start = 0.0, t_end = 10.0, tol = 1e-10;
    std::size_t points = 400, threads = 0;
    bool renormalize = false, rho_elements = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "time series of max CHSH and concurrence");
    add_state_flags(sweep_cmd, sweep_state);
    add_cavity_flags(sweep_cmd, sweep_cavity);
    sweep_cmd->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    auto* t_start_opt = sweep_cmd->add_option("--t-start", t_start, "grid start in units of T");
    auto* t_end_opt = sweep_cmd->add_option("--t-end", t_end, "grid end in units of T");
    auto* points_opt = sweep_cmd->add_option("--points", points, "number of grid points");
    auto* tol_opt = sweep_cmd->add_option("--tol", tol, "Poisson tail tolerance");
    auto* threads_opt = sweep_cmd->add_option("--threads", threads, "worker count (0: all cores)");
    auto* renorm_opt = sweep_cmd->add_flag("--renormalize", renormalize, "rescale rho to unit trace");
    auto* rho_opt = sweep_cmd->add_flag("--rho", rho_elements, "append the 16 rho elements");
    sweep_cmd->add_option("--out", out_path, "CSV output path")->required();
    sweep_cmd->add_option("--manifest", manifest_path, "JSON manifest output path");

    // figure
    std::string figure_id, out_dir;
    FigurePreset preset;
    auto* figure_cmd = app.add_subcommand("figure", "reproduce a figure as CSV series");
    figure_cmd->add_option("id", figure_id, "fig1 | fig2 | fig3 | fig4")->required();
    figure_cmd->add_option("--out-dir", out_dir, "output directory")->required();
    figure_cmd->add_flag("--alternate", preset.alternate,
                         "use the alternate parameter reading where caption and text differ");
    figure_cmd->add_option("--t-end", preset.t_end, "series end in units of T");
    figure_cmd->add_option("--points-per-period", preset.points_per_period, "samples per T");
    figure_cmd->add_option("--tol", preset.tol, "Poisson tail tolerance");
    figure_cmd->add_option("--threads", preset.threads, "worker count (0: all cores)");

    // oracle-check
    StateFlags oc_state;
    CavityFlags oc_cavity;
    double oc_tol = 1e-6, oc_t_end = 5.0;
    std::size_t oc_points = 50;
    std::string spin_term = "resonant";
    auto* oc_cmd = app.add_subcommand("oracle-check", "compare closed form with brute-force evolution");
    add_state_flags(oc_cmd, oc_state);
    add_cavity_flags(oc_cmd, oc_cavity);
    oc_cmd->add_option("--tol", oc_tol, "element-wise tolerance");
    oc_cmd->add_option("--t-end", oc_t_end, "last time in units of T");
    oc_cmd->add_option("--points", oc_points, "number of times")->check(CLI::PositiveNumber);
    oc_cmd->add_option("--spin-term", spin_term, "resonant | absent");

    auto* selftest_cmd = app.add_subcommand("selftest", "quick consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*state_cmd) return run_state(state_flags, degrees);
        if (*spectrum_cmd) return run_spectrum(spectrum_flags, degrees, stationary);
        if (*sweep_cmd) {
            SweepJob job;
            if (!config_path.empty()) apply_config_file(config_path, job);
            merge_state(sweep_state, degrees, job);
            merge_cavity(sweep_cavity, degrees, job.cfg);
            if (t_start_opt->count() > 0) job.grid.start = t_start;
            if (t_end_opt->count() > 0) job.grid.stop = t_end;
            if (points_opt->count() > 0) job.grid.count = points;
            if (tol_opt->count() > 0) job.tol = tol;
            if (threads_opt->count() > 0) job.threads = threads;
            if (renorm_opt->count() > 0) job.renormalize = renormalize;
            if (rho_opt->count() > 0) job.rho_elements = rho_elements;
            const CorrelationSeries series = run_sweep(job);
            write_text(out_path, series_csv(series, job.rho_elements));
            if (!manifest_path.empty()) write_text(manifest_path, sweep_manifest(job, series));
            std::cout << "wrote " << series.t_over_T.size() << " rows to " << out_path
                      << " (n_max=" << series.truncation.n_max << ")\n";
            return 0;
        }
        if (*figure_cmd) {
            preset.id = parse_figure_id(figure_id);
            const FigureOutput out = run_figure(preset, out_dir);
            std::cout << "wrote " << out.csv_files.size() << " series and " << out.manifest.string()
                      << '\n';
            return 0;
        }
        if (*oc_cmd) {
            SweepJob job;
            merge_state(oc_state, degrees, job);
            merge_cavity(oc_cavity, degrees, job.cfg);
            return run_oracle_check(job, oc_t_end, oc_points, oc_tol, spin_term);
        }
        if (*selftest_cmd) return run_selftest();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace cavity_bell
