// Shared generators for the property tests. Every generator takes the engine
// by reference so a test reproduces from its fixed seed alone.
#pragma once

#include "cavity_bell/correlation.hpp"
#include "cavity_bell/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace testsupport {

using cavity_bell::Complex;

inline constexpr std::uint64_t kSeed = 20240917;
inline constexpr double kPi = std::numbers::pi;

inline Complex gaussian_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    return {re, n(rng)};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, Eigen::Index dim) {
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = gaussian_complex(rng);
    return 0.5 * (a + a.adjoint());
}

/// Ginibre ensemble of rank `rank`: G G^dagger / Tr.
inline cavity_bell::DensityMatrix4 random_density(std::mt19937_64& rng, int rank = 4) {
    Eigen::MatrixXcd g(4, rank);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = gaussian_complex(rng);
    Eigen::Matrix4cd rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return cavity_bell::DensityMatrix4(rho);
}

inline cavity_bell::MeasurementDirection random_direction(std::mt19937_64& rng) {
    const double z = uniform(rng, -1.0, 1.0);
    return {std::acos(z), uniform(rng, 0.0, 2.0 * kPi)};
}

inline cavity_bell::ChshQuadruple random_quadruple(std::mt19937_64& rng) {
    return {random_direction(rng), random_direction(rng), random_direction(rng),
            random_direction(rng)};
}

inline cavity_bell::EntangledStateSpec random_spec(std::mt19937_64& rng) {
    const auto pol = std::bernoulli_distribution(0.5)(rng) ? cavity_bell::Polarization::Antiparallel
                                                           : cavity_bell::Polarization::Parallel;
    const double xi = uniform(rng, 0.0, 2.0 * kPi);
    return {pol, xi, uniform(rng, 0.0, 2.0 * kPi)};
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testsupport
