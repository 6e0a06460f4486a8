// harness.hpp: sweeps over time, figure presets, and CSV/JSON output.

#pragma once

#include "cavity_bell/dynamics.hpp"
#include "cavity_bell/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cavity_bell {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'c0de'2024'0001ULL;
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "1.0.0";

/// Time grid in units of the field period T = 2 pi / omega.
struct TimeGrid {
    double start = 0.0;
    double stop = 10.0;
    std::size_t count = 400;

    double at(std::size_t i) const;
};

struct SweepJob {
    EntangledStateSpec spec{Polarization::Antiparallel, 0.0, 0.0};
    CavityConfig cfg{};
    TimeGrid grid{};
    double tol = 1e-10;
    bool renormalize = false;
    bool rho_elements = false;   // emit the 16 real/imag parts of rho_r(t)
    std::size_t threads = 0;     // 0: hardware concurrency, capped by CAVITY_BELL_THREADS

    void validate() const;
};

struct CorrelationSeries {
    std::vector<double> t_over_T;
    std::vector<double> p_chsh_max;
    std::vector<double> concurrence;
    std::vector<double> trace_deficit;
    std::vector<Eigen::Matrix4cd> rho;  // filled only when rho_elements is set
    FockTruncation truncation;
    std::size_t sectors_evaluated = 0;
};

/// Worker count after applying the CAVITY_BELL_THREADS cap; always >= 1.
std::size_t effective_threads(std::size_t requested);

/// Evaluates rho_r(t), max CHSH and concurrence at every grid time. Output is
/// independent of the worker count.
CorrelationSeries run_sweep(const SweepJob& job);

void write_series_csv(std::ostream& os, const CorrelationSeries& series, bool rho_elements);
std::string series_csv(const CorrelationSeries& series, bool rho_elements);

/// Flat JSON object with every input needed to re-run the job plus truncation metadata.
std::string sweep_manifest(const SweepJob& job, const CorrelationSeries& series);

// ---------------------------------------------------------------------------
// Figure presets

enum class FigureId { Fig1 = 1, Fig2 = 2, Fig3 = 3, Fig4 = 4 };

FigureId parse_figure_id(const std::string& s);

struct FigurePreset {
    FigureId id = FigureId::Fig1;
    /// Selects the alternate reading where caption and body text disagree
    /// (fig1: red curve xi = pi/3 instead of 3pi/4; fig3: row 2 at mean photon number 5).
    bool alternate = false;
    double t_end = 10.0;               // in units of T
    std::size_t points_per_period = 400;
    double tol = 1e-10;
    std::size_t threads = 0;
};

struct FigureCurve {
    int row;                 // photon-number row 1..4, panels a<row> and b<row>
    std::string label;       // e.g. "xi=pi/6"
    std::string slug;        // filename-safe label
    EntangledStateSpec spec;
    double mean_photons;
};

/// Curves of a figure: four photon-number rows times three state curves.
std::vector<FigureCurve> expand_figure(const FigurePreset& preset);

/// Notes on caption/text disagreements relevant to this figure.
std::vector<std::string> figure_discrepancies(FigureId id);

struct FigureOutput {
    std::vector<std::filesystem::path> csv_files;
    std::filesystem::path manifest;
    std::vector<CorrelationSeries> series;  // parallel to expand_figure(preset)
};

/// Runs every curve and writes fig<N>_row<k>_<slug>.csv plus fig<N>_manifest.json into out_dir.
FigureOutput run_figure(const FigurePreset& preset, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// Series analysis used by the figure checks

/// Max of values over samples with t in [lo, hi]; returns (value, t).
std::pair<double, double> peak_in_window(const std::vector<double>& t,
                                         const std::vector<double>& values, double lo, double hi);

/// Fraction of samples with t in [lo, hi] whose value is strictly below threshold.
double fraction_below(const std::vector<double>& t, const std::vector<double>& values,
                      double threshold, double lo, double hi);

struct PeriodEstimate {
    std::size_t lag = 0;        // in samples; 0 if no peak found
    double autocorrelation = 0.0;
};

/// Dominant period from the first local maximum of the normalized
/// autocorrelation after it first drops below zero.
PeriodEstimate dominant_period(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Config files: INI-style sections [state], [cavity], [grid], [run].

/// Reads a config file into `job` (keys absent from the file leave job untouched).
void apply_config_file(const std::filesystem::path& path, SweepJob& job);

/// CLI entry point; returns the process exit code
/// (0 success, 1 validation error, 2 numerical failure).
int cli_main(int argc, char** argv);

}  // namespace cavity_bell
