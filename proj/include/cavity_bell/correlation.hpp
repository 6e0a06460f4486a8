// correlation.hpp: Bell/CHSH correlations, the Horodecki maximum, and concurrence.

#pragma once

#include "cavity_bell/model.hpp"

#include <cstdint>
#include <utility>

namespace cavity_bell {

/// Measurement axis n = (sin t cos p, sin t sin p, cos t).
struct MeasurementDirection {
    double theta = 0.0;
    double phi_az = 0.0;

    Eigen::Vector3d unit_vector() const;
    /// sigma . n as a 2x2 matrix.
    Eigen::Matrix2cd spin_operator() const;

    static MeasurementDirection from_vector(const Eigen::Vector3d& v);
};

struct ChshQuadruple {
    MeasurementDirection a, b, c, d;
};

/// (|+n>, |-n>) in the north/south pole gauge:
///   |+n> = (cos(t/2), sin(t/2) e^{ip}),  |-n> = (sin(t/2), -cos(t/2) e^{ip}).
std::pair<Eigen::Vector2cd, Eigen::Vector2cd> spin_coherent_pair(const MeasurementDirection& n);

/// Tr[(sigma.a (x) sigma.b) rho]. Throws NumericalError if the imaginary
/// residue exceeds 1e-12 (cannot happen for a valid DensityMatrix4).
double correlation(const DensityMatrix4& rho, const MeasurementDirection& a,
                   const MeasurementDirection& b);

/// Correlation of the classical (diagonal) part of the state:
/// -cos(ta) cos(tb) for antiparallel, +cos(ta) cos(tb) for parallel.
double local_correlation(const EntangledStateSpec& spec, const MeasurementDirection& a,
                         const MeasurementDirection& b);

/// |P(a,b) + P(a,c) + P(d,b) - P(d,c)|
double chsh_value(const DensityMatrix4& rho, const ChshQuadruple& q);

/// CHSH combination built from local_correlation; bounded by 2 for both polarizations.
double chsh_local_value(const EntangledStateSpec& spec, const ChshQuadruple& q);

/// T_ij = Tr[rho (sigma_i (x) sigma_j)], i, j in {x, y, z}.
Eigen::Matrix3d correlation_tensor(const DensityMatrix4& rho);

/// Maximum CHSH value over all measurement quadruples: 2 sqrt(u1 + u2) with
/// u1 >= u2 the two largest eigenvalues of T^T T.
double max_chsh(const DensityMatrix4& rho);

/// Wootters concurrence max{0, l1 - l2 - l3 - l4}.
///
/// The l_i are computed as singular values of sqrt(rho) Y sqrt(rho)^*, Y = s_y (x) s_y,
/// which equal the square roots of the eigenvalues of rho Y rho^* Y without
/// taking square roots of near-zero eigenvalues. Throws NumericalError when rho
/// has an eigenvalue below -1e-9; smaller negative eigenvalues are clamped to 0.
double concurrence(const DensityMatrix4& rho);

/// Square roots of the eigenvalues of rho Y rho^* Y from the general 4x4
/// eigenproblem, descending. Independent route used to cross-check concurrence().
std::array<double, 4> wootters_lambdas_direct(const DensityMatrix4& rho);

struct BruteForceOptions {
    int samples = 10000;
    int refine_iterations = 100; // coordinate sweeps per refined candidate
    int refine_candidates = 8;   // best random samples handed to refinement
    std::uint64_t seed = 0x5eed'c0de'2024'0001ULL;
};

struct BruteForceResult {
    double value = 0.0;
    ChshQuadruple best;
};

/// Direct maximization of chsh_value over quadruples: uniform sphere sampling,
/// then coordinate-wise golden-section refinement of the best candidates.
/// Deterministic for a fixed seed. Always a lower bound on max_chsh(rho).
BruteForceResult max_chsh_brute(const DensityMatrix4& rho, const BruteForceOptions& opts = {});

}  // namespace cavity_bell
