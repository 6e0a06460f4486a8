#include "cavity_bell/harness.hpp"

#include "cavity_bell/correlation.hpp"
#include "cavity_bell/errors.hpp"

#include <json.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace cavity_bell {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_number(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace

double TimeGrid::at(std::size_t i) const {
    if (count < 2) return start;
    if (i + 1 == count) return stop;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void SweepJob::validate() const {
    cfg.validate();
    if (grid.count < 2) throw ValidationError("sweep: need at least 2 grid points");
    if (!std::isfinite(grid.start) || !std::isfinite(grid.stop) || !(grid.start < grid.stop)) {
        throw ValidationError("sweep: grid start must be finite and below stop");
    }
    if (!(tol > 0.0 && tol <= 1e-3)) throw ValidationError("sweep: tol must lie in (0, 1e-3]");
}

std::size_t effective_threads(std::size_t requested) {
    std::size_t n = requested;
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CAVITY_BELL_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(n, 1);
}

CorrelationSeries run_sweep(const SweepJob& job) {
    job.validate();
    const std::size_t count = job.grid.count;
    const ReducedDensityOptions opts{job.tol, kDefaultSectorCap, job.renormalize};

    CorrelationSeries out;
    out.t_over_T.resize(count);
    out.p_chsh_max.resize(count);
    out.concurrence.resize(count);
    out.trace_deficit.resize(count);
    if (job.rho_elements) out.rho.resize(count);
    out.truncation = choose_truncation(job.cfg.gamma, job.tol);
    out.sectors_evaluated = out.truncation.n_max + 3;

    const double period = job.cfg.period();
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                const double tt = job.grid.at(i);
                const ReducedDensity rd = reduced_density(job.spec, tt * period, job.cfg, opts);
                out.t_over_T[i] = tt;
                out.p_chsh_max[i] = max_chsh(rd.rho);
                out.concurrence[i] = concurrence(rd.rho);
                out.trace_deficit[i] = rd.trace_deficit;
                if (job.rho_elements) out.rho[i] = rd.rho.matrix();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };

    const std::size_t threads = std::min(effective_threads(job.threads), count);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

void write_series_csv(std::ostream& os, const CorrelationSeries& series, bool rho_elements) {
    os << "t_over_T,p_chsh_max,concurrence,trace_deficit";
    if (rho_elements) {
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j) os << ",re_rho" << i << j << ",im_rho" << i << j;
    }
    os << '\n';
    for (std::size_t k = 0; k < series.t_over_T.size(); ++k) {
        os << format_number(series.t_over_T[k], 12) << ',' << format_number(series.p_chsh_max[k], 15)
           << ',' << format_number(series.concurrence[k], 15) << ','
           << format_number(series.trace_deficit[k], 6);
        if (rho_elements) {
            const Eigen::Matrix4cd& r = series.rho.at(k);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    os << ',' << format_number(r(i, j).real(), 15) << ','
                       << format_number(r(i, j).imag(), 15);
        }
        os << '\n';
    }
}

std::string series_csv(const CorrelationSeries& series, bool rho_elements) {
    std::ostringstream os;
    write_series_csv(os, series, rho_elements);
    return os.str();
}

std::string sweep_manifest(const SweepJob& job, const CorrelationSeries& series) {
    nlohmann::ordered_json m;
    m["schema_version"] = kManifestSchemaVersion;
    m["code_version"] = kCodeVersion;
    m["polarization"] = std::string(to_string(job.spec.polarization()));
    m["xi"] = job.spec.xi();
    m["eta"] = job.spec.eta();
    m["omega"] = job.cfg.omega;
    m["g"] = job.cfg.g;
    m["gamma"] = job.cfg.gamma;
    m["gamma2"] = job.cfg.mean_photons();
    m["phi"] = job.cfg.phi;
    m["t_start"] = job.grid.start;
    m["t_end"] = job.grid.stop;
    m["points"] = job.grid.count;
    m["time_unit"] = "T";
    m["tol"] = job.tol;
    m["renormalize"] = job.renormalize;
    m["rho_elements"] = job.rho_elements;
    m["n_max"] = series.truncation.n_max;
    m["tail_bound"] = series.truncation.tail_bound;
    m["sectors_evaluated"] = series.sectors_evaluated;
    m["seed"] = kDefaultSeed;
    return m.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

FigureId parse_figure_id(const std::string& s) {
    if (s == "fig1" || s == "1") return FigureId::Fig1;
    if (s == "fig2" || s == "2") return FigureId::Fig2;
    if (s == "fig3" || s == "3") return FigureId::Fig3;
    if (s == "fig4" || s == "4") return FigureId::Fig4;
    throw ValidationError("unknown figure '" + s + "' (expected fig1..fig4)");
}

namespace {

struct AngleLabel {
    double value;
    const char* text;
    const char* slug;
};

constexpr AngleLabel kPi6{kPi / 6.0, "pi/6", "pi6"};
constexpr AngleLabel kPi4{kPi / 4.0, "pi/4", "pi4"};
constexpr AngleLabel kPi3{kPi / 3.0, "pi/3", "pi3"};
constexpr AngleLabel k3Pi4{3.0 * kPi / 4.0, "3pi/4", "3pi4"};

}  // namespace

std::vector<FigureCurve> expand_figure(const FigurePreset& preset) {
    std::array<double, 4> rows{0.01, 1.0, 15.0, 150.0};
    Polarization pol = Polarization::Antiparallel;
    bool vary_xi = true;      // otherwise eta varies at xi = pi/4
    std::array<AngleLabel, 3> curves{kPi6, kPi4, k3Pi4};

    switch (preset.id) {
        case FigureId::Fig1:
            if (preset.alternate) curves[2] = kPi3;
            break;
        case FigureId::Fig2:
            vary_xi = false;
            curves = {kPi6, kPi4, kPi3};
            break;
        case FigureId::Fig3:
            pol = Polarization::Parallel;
            curves = {kPi3, kPi4, k3Pi4};
            if (preset.alternate) rows[1] = 5.0;
            break;
        case FigureId::Fig4:
            pol = Polarization::Parallel;
            vary_xi = false;
            curves = {kPi6, kPi4, kPi3};
            break;
    }

    std::vector<FigureCurve> out;
    for (int r = 0; r < 4; ++r) {
        for (const AngleLabel& a : curves) {
            const double xi = vary_xi ? a.value : kPi / 4.0;
            const double eta = vary_xi ? 0.0 : a.value;
            const std::string name = vary_xi ? "xi" : "eta";
            out.push_back({r + 1, name + "=" + a.text, name + "_" + a.slug,
                           EntangledStateSpec(pol, xi, eta), rows[static_cast<std::size_t>(r)]});
        }
    }
    return out;
}

std::vector<std::string> figure_discrepancies(FigureId id) {
    switch (id) {
        case FigureId::Fig1:
            return {"red curve: caption gives xi=pi/3, accompanying text gives xi=3pi/4 (the "
                    "singlet, consistent with the flat-line statement); default 3pi/4, "
                    "alternate pi/3"};
        case FigureId::Fig3:
            return {"row 2: caption gives mean photon number 1, accompanying text gives 5; "
                    "default 1, alternate 5",
                    "green curve: caption and curve list give xi=pi/3, a later sentence "
                    "discusses xi=pi/6; pi/3 used in both variants"};
        default:
            return {};
    }
}

FigureOutput run_figure(const FigurePreset& preset, const std::filesystem::path& out_dir) {
    if (!(preset.t_end > 0.0)) throw ValidationError("figure: t_end must be positive");
    if (preset.points_per_period < 1) throw ValidationError("figure: points_per_period must be >= 1");
    std::filesystem::create_directories(out_dir);

    const int fig = static_cast<int>(preset.id);
    const std::size_t points =
        static_cast<std::size_t>(std::llround(preset.t_end * static_cast<double>(preset.points_per_period))) + 1;

    nlohmann::ordered_json manifest;
    manifest["schema_version"] = kManifestSchemaVersion;
    manifest["code_version"] = kCodeVersion;
    manifest["figure"] = "fig" + std::to_string(fig);
    manifest["variant"] = preset.alternate ? "alternate" : "default";
    manifest["omega"] = 1.0;
    manifest["g"] = 1.0;
    manifest["phi"] = 0.0;
    manifest["t_start"] = 0.0;
    manifest["t_end"] = preset.t_end;
    manifest["points"] = points;
    manifest["time_unit"] = "T";
    manifest["tol"] = preset.tol;
    manifest["renormalize"] = false;
    manifest["seed"] = kDefaultSeed;
    manifest["discrepancies"] = figure_discrepancies(preset.id);
    manifest["curves"] = nlohmann::ordered_json::array();

    FigureOutput result;
    for (const FigureCurve& curve : expand_figure(preset)) {
        SweepJob job;
        job.spec = curve.spec;
        job.cfg.gamma = std::sqrt(curve.mean_photons);
        job.grid = {0.0, preset.t_end, points};
        job.tol = preset.tol;
        job.threads = preset.threads;
        CorrelationSeries series = run_sweep(job);

        const std::string name =
            "fig" + std::to_string(fig) + "_row" + std::to_string(curve.row) + "_" + curve.slug + ".csv";
        const auto path = out_dir / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ValidationError("cannot open " + path.string() + " for writing");
        write_series_csv(os, series, false);

        nlohmann::ordered_json c;
        c["file"] = name;
        c["panels"] = {"a" + std::to_string(curve.row), "b" + std::to_string(curve.row)};
        c["label"] = curve.label;
        c["polarization"] = std::string(to_string(curve.spec.polarization()));
        c["xi"] = curve.spec.xi();
        c["eta"] = curve.spec.eta();
        c["gamma2"] = curve.mean_photons;
        c["n_max"] = series.truncation.n_max;
        c["tail_bound"] = series.truncation.tail_bound;
        manifest["curves"].push_back(c);

        result.csv_files.push_back(path);
        result.series.push_back(std::move(series));
    }

    result.manifest = out_dir / ("fig" + std::to_string(fig) + "_manifest.json");
    std::ofstream ms(result.manifest, std::ios::binary);
    if (!ms) throw ValidationError("cannot open " + result.manifest.string() + " for writing");
    ms << manifest.dump(2) << '\n';
    return result;
}

// ---------------------------------------------------------------------------

std::pair<double, double> peak_in_window(const std::vector<double>& t,
                                         const std::vector<double>& values, double lo, double hi) {
    double best = -std::numeric_limits<double>::infinity();
    double at = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < t.size() && i < values.size(); ++i) {
        if (t[i] >= lo && t[i] <= hi && values[i] > best) {
            best = values[i];
            at = t[i];
        }
    }
    return {best, at};
}

double fraction_below(const std::vector<double>& t, const std::vector<double>& values,
                      double threshold, double lo, double hi) {
    std::size_t in = 0;
    std::size_t below = 0;
    for (std::size_t i = 0; i < t.size() && i < values.size(); ++i) {
        if (t[i] < lo || t[i] > hi) continue;
        ++in;
        if (values[i] < threshold) ++below;
    }
    return in == 0 ? 0.0 : static_cast<double>(below) / static_cast<double>(in);
}

PeriodEstimate dominant_period(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 4) return {};
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);

    // Pearson correlation between x[0..n-lag) and x[lag..n).
    auto corr = [&](std::size_t lag) {
        const std::size_t m = n - lag;
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double x = values[i] - mean;
            const double y = values[i + lag] - mean;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    };

    const std::size_t max_lag = n / 2;
    std::vector<double> r(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) r[lag] = corr(lag);

    std::size_t lag = 1;
    while (lag < max_lag && r[lag] >= 0.0) ++lag;
    PeriodEstimate best;
    for (; lag + 1 <= max_lag; ++lag) {
        if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] > best.autocorrelation) {
            best = {lag, r[lag]};
            break;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

void apply_config_file(const std::filesystem::path& path, SweepJob& job) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError("config: " + std::string(e.what()));
    }

    auto number = [](const std::string& key, const std::string& text) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) {
            throw ValidationError("config: " + key + " is not a number: '" + text + "'");
        }
        return v;
    };
    auto boolean = [](const std::string& key, const std::string& text) {
        if (text == "true" || text == "1" || text == "yes") return true;
        if (text == "false" || text == "0" || text == "no") return false;
        throw ValidationError("config: " + key + " is not a boolean: '" + text + "'");
    };

    Polarization pol = job.spec.polarization();
    double xi = job.spec.xi();
    double eta = job.spec.eta();
    bool degrees = false;

    for (const auto& [section, body] : tree) {
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            const std::string value = node.get_value<std::string>();
            if (section == "state") {
                if (key == "polarization") pol = parse_polarization(value);
                else if (key == "xi") xi = number(full, value);
                else if (key == "eta") eta = number(full, value);
                else if (key == "degrees") degrees = boolean(full, value);
                else throw ValidationError("config: unknown key " + full);
            } else if (section == "cavity") {
                if (key == "omega") job.cfg.omega = number(full, value);
                else if (key == "g") job.cfg.g = number(full, value);
                else if (key == "gamma") job.cfg.gamma = number(full, value);
                else if (key == "gamma2") {
                    const double m = number(full, value);
                    if (m < 0.0) throw ValidationError("config: gamma2 must be >= 0");
                    job.cfg.gamma = std::sqrt(m);
                } else if (key == "phi") job.cfg.phi = number(full, value);
                else throw ValidationError("config: unknown key " + full);
            } else if (section == "grid") {
                if (key == "t_start") job.grid.start = number(full, value);
                else if (key == "t_end") job.grid.stop = number(full, value);
                else if (key == "points") {
                    const double p = number(full, value);
                    if (p < 0 || p != std::floor(p)) throw ValidationError("config: points must be a whole number");
                    job.grid.count = static_cast<std::size_t>(p);
                } else throw ValidationError("config: unknown key " + full);
            } else if (section == "run") {
                if (key == "tol") job.tol = number(full, value);
                else if (key == "renormalize") job.renormalize = boolean(full, value);
                else if (key == "rho_elements") job.rho_elements = boolean(full, value);
                else if (key == "threads") job.threads = static_cast<std::size_t>(number(full, value));
                else throw ValidationError("config: unknown key " + full);
            } else {
                throw ValidationError("config: unknown section [" + section + "]");
            }
        }
    }
    if (degrees) {
        xi *= kPi / 180.0;
        eta *= kPi / 180.0;
    }
    job.spec = EntangledStateSpec(pol, xi, eta);
}

}  // namespace cavity_bell
