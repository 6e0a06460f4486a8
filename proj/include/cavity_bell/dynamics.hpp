// dynamics.hpp: closed-form reduced spin density for a coherent cavity field.
//
// The spin state after time t is a sum over photon-number sectors n of 4x4
// contributions rho_n(t), each built from a handful of trigonometric time
// functions multiplied by Poisson-type weights e^{-gamma^2} gamma^k / n!.
// Weights are always assembled in log space, so mean photon numbers in the
// hundreds never overflow.
//
// Only phi = 0 is supported: the element formulas carry no coherent-phase
// dependence. Use the oracle for other phases.

#pragma once

#include "cavity_bell/model.hpp"

#include <array>
#include <cstddef>

namespace cavity_bell {

struct FockTruncation {
    std::size_t n_max = 0;    // highest initial photon sector kept
    double tail_bound = 0.0;  // Poisson mass above n_max
};

inline constexpr std::size_t kDefaultSectorCap = 4096;

/// Smallest n_max whose Poisson tail sum_{n > n_max} e^{-g^2} g^{2n}/n! is <= tol.
/// Throws ValidationError for tol <= 0 and TruncationError if n_max would exceed cap.
FockTruncation choose_truncation(double gamma, double tol, std::size_t cap = kDefaultSectorCap);

/// A time function split as factor * gamma^gamma_power. `factor` is bounded in
/// magnitude by max(1, n); it is exactly zero for the coefficients whose
/// integer prefactor vanishes (C4 at n = 0, D3 at n = 0, D5 at n <= 1), in which
/// case gamma_power is meaningless and never evaluated.
struct ScaledCoefficient {
    int gamma_power = 0;
    double factor = 0.0;

    bool is_zero() const { return factor == 0.0; }
};

struct SectorCoefficients {
    Polarization polarization;
    std::size_t n;
    double t;
    /// C1..C4 in slots 0..3 (antiparallel) or D1..D6 in slots 0..5 (parallel).
    std::array<ScaledCoefficient, 6> c;

    int count() const { return polarization == Polarization::Antiparallel ? 4 : 6; }
};

SectorCoefficients coefficients_antiparallel(std::size_t n, double t, const CavityConfig& cfg);
SectorCoefficients coefficients_parallel(std::size_t n, double t, const CavityConfig& cfg);

/// Unnormalized contribution rho_n(t) of output photon sector n.
DensityMatrix4 rho_sector(const EntangledStateSpec& spec, std::size_t n, double t,
                          const CavityConfig& cfg);

struct ReducedDensityOptions {
    double tol = 1e-10;                      // Poisson tail tolerance, in (0, 1e-3]
    std::size_t sector_cap = kDefaultSectorCap;
    bool renormalize = false;                // rescale to unit trace after summing
};

struct ReducedDensity {
    DensityMatrix4 rho;
    FockTruncation truncation;
    std::size_t sectors_evaluated;  // n_max + 3: dynamics moves up to two photons
    double trace_deficit;           // 1 - Tr(rho) before any renormalization
};

/// rho_r(t) = sum_n rho_n(t), t in natural units (1/omega).
ReducedDensity reduced_density(const EntangledStateSpec& spec, double t, const CavityConfig& cfg,
                               const ReducedDensityOptions& opts = {});

}  // namespace cavity_bell
