#include "cavity_bell/correlation.hpp"

#include "cavity_bell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace cavity_bell {

namespace {

constexpr double kPi = std::numbers::pi;

// Tr[(A (x) B) rho] without forming the 4x4 product.
Complex kron_expectation(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b,
                         const Eigen::Matrix4cd& rho) {
    Complex sum = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    sum += a(i, j) * b(k, l) * rho(2 * j + l, 2 * i + k);
    return sum;
}

const Eigen::Matrix4cd& sigma_yy() {
    static const Eigen::Matrix4cd y = numerics::kron(numerics::pauli_y(), numerics::pauli_y());
    return y;
}

}  // namespace

Eigen::Vector3d MeasurementDirection::unit_vector() const {
    return {std::sin(theta) * std::cos(phi_az), std::sin(theta) * std::sin(phi_az),
            std::cos(theta)};
}

Eigen::Matrix2cd MeasurementDirection::spin_operator() const {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    Eigen::Matrix2cd m;
    m << ct, st * std::polar(1.0, -phi_az), st * std::polar(1.0, phi_az), -ct;
    return m;
}

MeasurementDirection MeasurementDirection::from_vector(const Eigen::Vector3d& v) {
    const double r = v.norm();
    if (!(r > 0.0)) throw ValidationError("MeasurementDirection: zero vector");
    return {std::acos(std::clamp(v.z() / r, -1.0, 1.0)), std::atan2(v.y(), v.x())};
}

std::pair<Eigen::Vector2cd, Eigen::Vector2cd> spin_coherent_pair(const MeasurementDirection& n) {
    const double c = std::cos(0.5 * n.theta);
    const double s = std::sin(0.5 * n.theta);
    const Complex ph = std::polar(1.0, n.phi_az);
    Eigen::Vector2cd up, down;
    up << c, s * ph;
    down << s, -c * ph;
    return {up, down};
}

double correlation(const DensityMatrix4& rho, const MeasurementDirection& a,
                   const MeasurementDirection& b) {
    const Complex v = kron_expectation(a.spin_operator(), b.spin_operator(), rho.matrix());
    if (std::abs(v.imag()) > 1e-12) {
        throw NumericalError("correlation: expectation value has imaginary part");
    }
    return v.real();
}

double local_correlation(const EntangledStateSpec& spec, const MeasurementDirection& a,
                         const MeasurementDirection& b) {
    const double zz = std::cos(a.theta) * std::cos(b.theta);
    return spec.polarization() == Polarization::Antiparallel ? -zz : zz;
}

double chsh_value(const DensityMatrix4& rho, const ChshQuadruple& q) {
    return std::abs(correlation(rho, q.a, q.b) + correlation(rho, q.a, q.c) +
                    correlation(rho, q.d, q.b) - correlation(rho, q.d, q.c));
}

double chsh_local_value(const EntangledStateSpec& spec, const ChshQuadruple& q) {
    return std::abs(local_correlation(spec, q.a, q.b) + local_correlation(spec, q.a, q.c) +
                    local_correlation(spec, q.d, q.b) - local_correlation(spec, q.d, q.c));
}

Eigen::Matrix3d correlation_tensor(const DensityMatrix4& rho) {
    const std::array<const Eigen::Matrix2cd*, 3> paulis{
        &numerics::pauli_x(), &numerics::pauli_y(), &numerics::pauli_z()};
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            t(i, j) = kron_expectation(*paulis[i], *paulis[j], rho.matrix()).real();
    return t;
}

double max_chsh(const DensityMatrix4& rho) {
    const Eigen::Matrix3d t = correlation_tensor(rho);
    const Eigen::Matrix3d u = t.transpose() * t;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(u, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("max_chsh: eigenvalues of T^T T did not converge");
    }
    const Eigen::Vector3d ev = solver.eigenvalues();  // ascending
    return 2.0 * std::sqrt(std::max(0.0, ev(1) + ev(2)));
}

double concurrence(const DensityMatrix4& rho) {
    const auto eig = numerics::hermitian_eigensystem(rho.matrix(), DensityMatrix4::kHermitianTolerance);
    if (eig.values.minCoeff() < -DensityMatrix4::kPsdTolerance) {
        throw NumericalError("concurrence: density matrix has a negative eigenvalue");
    }
    const Eigen::Vector4d root = eig.values.cwiseMax(0.0).cwiseSqrt();
    const Eigen::Matrix4cd sqrt_rho = eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
    const Eigen::Matrix4cd a = sqrt_rho * sigma_yy() * sqrt_rho.conjugate();
    const Eigen::VectorXd sv = numerics::singular_values(a);  // descending
    return std::max(0.0, sv(0) - sv(1) - sv(2) - sv(3));
}

std::array<double, 4> wootters_lambdas_direct(const DensityMatrix4& rho) {
    const Eigen::Matrix4cd& m = rho.matrix();
    const Eigen::Matrix4cd tilde = sigma_yy() * m.conjugate() * sigma_yy();
    const auto ev = numerics::general_eigenvalues_4(m * tilde);
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) {
        if (ev[i].real() < -DensityMatrix4::kPsdTolerance) {
            throw NumericalError("wootters_lambdas_direct: negative eigenvalue of rho rho~");
        }
        out[i] = std::sqrt(std::max(0.0, ev[i].real()));
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

namespace {

using Angles = std::array<double, 8>;  // (theta, phi) for a, b, c, d

ChshQuadruple to_quadruple(const Angles& x) {
    return {{x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]}, {x[6], x[7]}};
}

// Golden-section search for a maximum of f on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi, double& best_x) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if (f1 >= f2) {
        best_x = x1;
        return f1;
    }
    best_x = x2;
    return f2;
}

}  // namespace

BruteForceResult max_chsh_brute(const DensityMatrix4& rho, const BruteForceOptions& opts) {
    if (opts.samples < 1) throw ValidationError("max_chsh_brute: samples must be >= 1");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto value = [&](const Angles& x) { return chsh_value(rho, to_quadruple(x)); };

    const int keep = std::max(1, std::min(opts.refine_candidates, opts.samples));
    std::vector<std::pair<double, Angles>> pool;
    pool.reserve(static_cast<std::size_t>(opts.samples));
    for (int s = 0; s < opts.samples; ++s) {
        Angles x;
        for (int k = 0; k < 4; ++k) {
            x[2 * k] = std::acos(1.0 - 2.0 * unit(rng));
            x[2 * k + 1] = 2.0 * kPi * unit(rng);
        }
        pool.emplace_back(value(x), x);
    }
    std::partial_sort(pool.begin(), pool.begin() + keep, pool.end(),
                      [](const auto& l, const auto& r) { return l.first > r.first; });

    BruteForceResult best{pool.front().first, to_quadruple(pool.front().second)};
    for (int cand = 0; cand < keep; ++cand) {
        Angles x = pool[static_cast<std::size_t>(cand)].second;
        double fx = pool[static_cast<std::size_t>(cand)].first;
        for (int sweep = 0; sweep < opts.refine_iterations; ++sweep) {
            const double before = fx;
            const Angles start = x;
            for (std::size_t k = 0; k < x.size(); ++k) {
                Angles trial = x;
                auto along = [&](double v) {
                    trial[k] = v;
                    return value(trial);
                };
                double xk = x[k];
                const double fk = golden_max(along, x[k] - kPi, x[k] + kPi, xk);
                if (fk > fx) {
                    fx = fk;
                    x[k] = xk;
                }
            }
            // Pattern move: coordinate sweeps crawl along ridges where angles are
            // coupled, so follow the net displacement of this sweep.
            auto along_sweep = [&](double s) {
                Angles trial;
                for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + s * (x[k] - start[k]);
                return value(trial);
            };
            double s_best = 0.0;
            const double fs = golden_max(along_sweep, -1.0, 8.0, s_best);
            if (fs > fx) {
                for (std::size_t k = 0; k < x.size(); ++k) x[k] += s_best * (x[k] - start[k]);
                fx = fs;
            }
            if (fx - before < 1e-13) break;
        }
        if (fx > best.value) best = {fx, to_quadruple(x)};
    }
    return best;
}

}  // namespace cavity_bell
