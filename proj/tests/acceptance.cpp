// Acceptance suite: one PASS/FAIL line per criterion. Criteria 6 and 7 are
// soft: a failure is reported but does not change the exit status.

#include "cavity_bell/correlation.hpp"
#include "cavity_bell/dynamics.hpp"
#include "cavity_bell/harness.hpp"
#include "cavity_bell/oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace cavity_bell;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTsirelson = 2.0 * std::sqrt(2.0);
const std::vector<double> kFigureRows{0.01, 1.0, 15.0, 150.0};

struct Outcome {
    bool pass;
    std::string detail;
};

// Density matrices produced by criteria 1 and 2, re-checked by criterion 3.
std::vector<DensityMatrix4> g_collected;

CavityConfig with_mean(double mean) {
    CavityConfig cfg;
    cfg.gamma = std::sqrt(mean);
    return cfg;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome singlet_conservation() {
    const auto start = std::chrono::steady_clock::now();
    const EntangledStateSpec singlet(Polarization::Antiparallel, 3.0 * kPi / 4.0, 0.0);
    double dp = 0.0, dc = 0.0;
    for (double mean : kFigureRows) {
        SweepJob job;
        job.spec = singlet;
        job.cfg = with_mean(mean);
        job.grid = {0.0, 10.0, 200};
        job.rho_elements = true;
        const CorrelationSeries s = run_sweep(job);
        for (std::size_t i = 0; i < s.t_over_T.size(); ++i) {
            dp = std::max(dp, std::abs(s.p_chsh_max[i] - kTsirelson));
            dc = std::max(dc, std::abs(s.concurrence[i] - 1.0));
            g_collected.emplace_back(s.rho[i]);
        }
    }
    const double secs = seconds_since(start);
    return {dp < 1e-6 && dc < 1e-6 && secs < 30.0,
            fmt("max|P-2sqrt2|=%.2e max|C-1|=%.2e runtime=%.2fs", dp, dc, secs)};
}

Outcome oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> xis{kPi / 6.0, kPi / 4.0, kPi / 3.0, 3.0 * kPi / 4.0};
    const std::vector<double> etas{0.0, kPi / 6.0, kPi / 4.0, kPi / 3.0};
    double worst = 0.0;
    double edge = 0.0;
    int runs = 0, failures = 0;
    for (double mean : {0.0, 0.5, 1.0, 5.0}) {
        const CavityConfig cfg = with_mean(mean);
        std::vector<double> times;
        for (int i = 0; i < 50; ++i) times.push_back(5.0 * cfg.period() * i / 49.0);
        for (auto pol : {Polarization::Antiparallel, Polarization::Parallel}) {
            for (double xi : xis) {
                for (double eta : etas) {
                    const EntangledStateSpec spec(pol, xi, eta);
                    const auto r = oracle::compare_closed_form(spec, cfg, times, 1e-6);
                    worst = std::max(worst, r.worst);
                    edge = std::max(edge, r.max_edge_population);
                    ++runs;
                    if (!r.pass) ++failures;
                    for (double t : {times[7], times[23], times[49]})
                        g_collected.push_back(reduced_density(spec, t, cfg).rho);
                }
            }
        }
    }
    const double secs = seconds_since(start);
    return {failures == 0 && secs < 300.0,
            fmt("%g runs, %g failed, worst=%.2e, max edge population=%.1e", runs, failures, worst, edge) +
                fmt(", runtime=%.2fs; no printed-formula deviations found, compatibility flag not needed",
                    secs)};
}

Outcome bounds() {
    std::mt19937_64 rng(kDefaultSeed);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& rho : g_collected) {
        worst = std::max(worst, max_chsh(rho));
        ++checked;
    }
    for (int k = 0; k < 1000; ++k) {
        Eigen::Matrix4cd g;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) g(i, j) = {normal(rng), normal(rng)};
        Eigen::Matrix4cd rho = g * g.adjoint();
        rho /= rho.trace().real();
        worst = std::max(worst, max_chsh(DensityMatrix4(0.5 * (rho + rho.adjoint()))));
        ++checked;
    }

    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto direction = [&] { return MeasurementDirection{std::acos(2.0 * u(rng) - 1.0), 2.0 * kPi * u(rng)}; };
    double local = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const auto pol = k % 2 == 0 ? Polarization::Antiparallel : Polarization::Parallel;
        const EntangledStateSpec spec(pol, 2.0 * kPi * u(rng), 2.0 * kPi * u(rng));
        local = std::max(local, chsh_local_value(spec, {direction(), direction(), direction(), direction()}));
    }
    return {worst <= kTsirelson + 1e-9 && local <= 2.0,
            fmt("%g matrices, max P=%.12f (bound %.12f); 10^4 quadruples, max local=%.12f", static_cast<double>(checked),
                worst, kTsirelson, local)};
}

Outcome initial_values() {
    double dp = 0.0, dc = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double xi = (i + 0.5) * kPi / 4.0 - 0.1;
            const double eta = j * kPi / 4.0 + 0.05;
            const double s = std::sin(2.0 * xi);
            for (auto pol : {Polarization::Antiparallel, Polarization::Parallel}) {
                for (double mean : kFigureRows) {
                    const auto rd = reduced_density({pol, xi, eta}, 0.0, with_mean(mean));
                    dp = std::max(dp, std::abs(max_chsh(rd.rho) - 2.0 * std::sqrt(1.0 + s * s)));
                    dc = std::max(dc, std::abs(concurrence(rd.rho) - std::abs(s)));
                }
            }
        }
    }
    return {dp <= 1e-9 && dc <= 1e-9, fmt("16 (xi, eta) x 2 polarizations x 4 photon numbers: max dP=%.2e max dC=%.2e", dp, dc)};
}

Outcome vacuum_rabi() {
    const EntangledStateSpec spec(Polarization::Antiparallel, kPi / 4.0, 0.0);
    const CavityConfig cfg;
    double dev = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double t = 2.0 * kPi / std::sqrt(2.0) * i / 199.0;
        const double c = std::cos(std::sqrt(2.0) * t);
        dev = std::max(dev, std::abs(concurrence(reduced_density(spec, t, cfg).rho) - c * c));
    }
    return {dev <= 1e-8, fmt("200 points, max|C - cos^2(sqrt2 g t)|=%.2e", dev)};
}

Outcome decoherence() {
    SweepJob job;
    job.spec = EntangledStateSpec(Polarization::Antiparallel, kPi / 6.0, 0.0);
    job.cfg = with_mean(15.0);
    job.grid = {2.0, 10.0, 400};
    const CorrelationSeries s = run_sweep(job);
    const double frac = fraction_below(s.t_over_T, s.p_chsh_max, 2.0, 2.0, 10.0);
    return {frac >= 0.9, fmt("fraction of P_max < 2 on [2T, 10T] = %.4f (threshold 0.9)", frac)};
}

Outcome revival() {
    const auto start = std::chrono::steady_clock::now();
    SweepJob job;
    job.spec = EntangledStateSpec(Polarization::Antiparallel, kPi / 6.0, 0.0);
    job.cfg = with_mean(150.0);
    job.grid = {0.0, 10.0, 400};
    const CorrelationSeries s = run_sweep(job);
    const double secs = seconds_since(start);

    const auto [window, window_t] = peak_in_window(s.t_over_T, s.p_chsh_max, 4.5, 5.5);
    const auto [early, early_t] = peak_in_window(s.t_over_T, s.p_chsh_max, 2.0, 3.0);
    const auto [late, late_t] = peak_in_window(s.t_over_T, s.p_chsh_max, 3.0, 10.0);

    // Finer look at the revival region so the reported peak time is not grid-limited.
    SweepJob fine = job;
    fine.grid = {3.0, 10.0, 2801};
    const CorrelationSeries f = run_sweep(fine);
    const auto [fine_peak, fine_t] = peak_in_window(f.t_over_T, f.p_chsh_max, 3.0, 10.0);

    const bool shape = window > 2.4 && window - early >= 0.3;
    const bool timing = secs < 60.0;
    std::printf("  revival report (gamma^2=150, xi=pi/6, eta=0, n_max=%zu, sweep runtime %.2fs):\n",
                s.truncation.n_max, secs);
    std::printf("    max P on [4.5T, 5.5T] = %.4f at t = %.3fT\n", window, window_t);
    std::printf("    max P on [2T, 3T]     = %.4f at t = %.3fT\n", early, early_t);
    std::printf("    max P on [3T, 10T]    = %.4f at t = %.3fT (400-point grid)\n", late, late_t);
    std::printf("    max P on [3T, 10T]    = %.4f at t = %.4fT (2801-point grid); expected near 5T\n",
                fine_peak, fine_t);
    // Sector frequencies g sqrt(4n + 2) are spaced by about g / gamma near n = gamma^2, and
    // P_max depends on squared amplitudes, so the first half-revival sits near pi gamma / g.
    std::printf("    half-revival estimate pi*gamma/g = %.3fT\n",
                kPi * job.cfg.gamma / job.cfg.g / job.cfg.period());
    if (!timing) return {false, fmt("runtime %.2fs exceeds 60s", secs)};
    return {shape, fmt("window max %.4f (needs > 2.4), margin over [2T,3T] %.4f (needs >= 0.3), peak at %.3fT",
                       window, window - early, fine_t)};
}

Outcome horodecki_vs_brute() {
    std::mt19937_64 rng(kDefaultSeed + 1);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    int count = 0;
    auto check = [&](const DensityMatrix4& rho) {
        worst = std::max(worst, std::abs(max_chsh(rho) - max_chsh_brute(rho).value));
        ++count;
    };
    for (int k = 0; k < 100; ++k) {
        const int rank = 1 + k % 4;
        Eigen::MatrixXcd g(4, rank);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < rank; ++j) g(i, j) = {normal(rng), normal(rng)};
        Eigen::Matrix4cd rho = g * g.adjoint();
        rho /= rho.trace().real();
        check(DensityMatrix4(0.5 * (rho + rho.adjoint())));
    }

    std::vector<FigureCurve> curves;
    for (auto id : {FigureId::Fig1, FigureId::Fig2, FigureId::Fig3, FigureId::Fig4}) {
        for (bool alternate : {false, true}) {
            FigurePreset preset{id};
            preset.alternate = alternate;
            for (const auto& c : expand_figure(preset)) {
                const bool seen = std::any_of(curves.begin(), curves.end(), [&](const FigureCurve& o) {
                    return o.spec.polarization() == c.spec.polarization() && o.spec.xi() == c.spec.xi() &&
                           o.spec.eta() == c.spec.eta() && o.mean_photons == c.mean_photons;
                });
                if (!seen) curves.push_back(c);
            }
        }
    }
    for (const auto& c : curves) {
        SweepJob job;
        job.spec = c.spec;
        job.cfg = with_mean(c.mean_photons);
        job.grid = {0.0, 10.0, 10};
        job.rho_elements = true;
        for (const auto& m : run_sweep(job).rho) check(DensityMatrix4(m));
    }
    return {worst <= 1e-3, fmt("%g matrices (100 random + %g figure curves x 10 times), max|diff|=%.2e",
                               count, static_cast<double>(curves.size()), worst)};
}

Outcome conservation() {
    const CavityConfig cfg = with_mean(1.0);
    const std::size_t n_fock = oracle::oracle_cutoff(cfg, choose_truncation(cfg.gamma, 1e-10), 8);
    double norm = 0.0, energy = 0.0, exc = 0.0, edge = 0.0;
    for (auto term : {oracle::SpinTerm::Absent, oracle::SpinTerm::Resonant}) {
        const ComplexMatrix h = oracle::build_hamiltonian(cfg, n_fock, term);
        const ComplexMatrix x = oracle::excitation_number_operator(n_fock);
        const oracle::Propagator prop(h);
        for (const EntangledStateSpec& spec :
             {EntangledStateSpec(Polarization::Antiparallel, kPi / 6.0, 0.0),
              EntangledStateSpec(Polarization::Parallel, kPi / 4.0, kPi / 3.0)}) {
            const oracle::JointState psi0 = oracle::initial_joint(spec, cfg, n_fock);
            const double e0 = oracle::expectation(psi0, h);
            const double x0 = oracle::expectation(psi0, x);
            for (int i = 0; i <= 400; ++i) {
                const double t = 10.0 * cfg.period() * i / 400.0;
                const oracle::JointState psi = prop.evolve(psi0, t);
                norm = std::max(norm, std::abs(psi.amplitudes().norm() - 1.0));
                energy = std::max(energy, std::abs(oracle::expectation(psi, h) - e0));
                exc = std::max(exc, std::abs(oracle::expectation(psi, x) - x0));
                edge = std::max(edge, oracle::edge_population(psi));
            }
        }
    }
    return {norm <= 1e-9 && energy <= 1e-9 && exc <= 1e-9,
            fmt("n_fock=%g: norm drift %.1e, energy drift %.1e, excitation drift %.1e", static_cast<double>(n_fock),
                norm, energy, exc) +
                fmt(", edge population %.1e", edge)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        bool soft;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "singlet conservation", false, singlet_conservation},
        {2, "oracle equivalence", false, oracle_equivalence},
        {3, "Tsirelson and classical bounds", false, bounds},
        {4, "t=0 analytic values", false, initial_values},
        {5, "vacuum Rabi law", false, vacuum_rabi},
        {6, "decoherence regime", true, decoherence},
        {7, "revival regime", true, revival},
        {8, "Horodecki vs brute force", false, horodecki_vs_brute},
        {9, "oracle conservation suite", false, conservation},
    };

    int hard_failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const char* status = o.pass ? "PASS" : (c.soft ? "FAIL (soft, reported only)" : "FAIL");
        std::printf("%s criterion %d %s: %s\n", status, c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass && !c.soft) ++hard_failures;
    }
    return hard_failures == 0 ? 0 : 1;
}
