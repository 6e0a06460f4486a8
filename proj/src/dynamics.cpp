#include "cavity_bell/dynamics.hpp"

#include "cavity_bell/errors.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace cavity_bell {

FockTruncation choose_truncation(double gamma, double tol, std::size_t cap) {
    if (!(tol > 0.0)) throw ValidationError("choose_truncation: tolerance must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ValidationError("choose_truncation: gamma must be finite and >= 0");
    }
    if (gamma == 0.0) return {0, 0.0};

    const double mean = gamma * gamma;
    const std::size_t last = cap + 64;
    if (mean >= static_cast<double>(last + 1)) {
        throw TruncationError("choose_truncation: mean photon number " + std::to_string(mean) +
                              " exceeds the sector cap " + std::to_string(cap));
    }

    std::vector<double> weight(last + 1);
    for (std::size_t n = 0; n <= last; ++n) {
        weight[n] = std::exp(numerics::stable_poisson_logweight(n, gamma));
    }
    // Terms past `last` decay faster than a geometric series with ratio mean/(last+1).
    const double ratio = mean / static_cast<double>(last + 1);
    double tail = weight[last] * ratio / (1.0 - ratio);

    // suffix[n] = sum_{k >= n} weight[k], summed from the small end.
    std::vector<double> suffix(last + 2);
    suffix[last + 1] = tail;
    for (std::size_t n = last + 1; n-- > 0;) {
        suffix[n] = suffix[n + 1] + weight[n];
    }
    for (std::size_t n_max = 0; n_max <= cap; ++n_max) {
        if (suffix[n_max + 1] <= tol) return {n_max, suffix[n_max + 1]};
    }
    throw TruncationError("choose_truncation: tolerance " + std::to_string(tol) +
                          " unreachable within sector cap " + std::to_string(cap));
}

namespace {

double sin2(double x) {
    const double s = std::sin(x);
    return s * s;
}

double cos2(double x) {
    const double c = std::cos(x);
    return c * c;
}

}  // namespace

SectorCoefficients coefficients_antiparallel(std::size_t n, double t, const CavityConfig& cfg) {
    const double gt = cfg.g * t;
    const double dn = static_cast<double>(n);
    const int p = static_cast<int>(n);

    SectorCoefficients out{Polarization::Antiparallel, n, t, {}};
    const double w1 = std::sqrt(4.0 * dn + 6.0);
    out.c[0] = {p + 1, std::sin(gt * w1) / w1};
    const double half = gt * std::sqrt((2.0 * dn + 1.0) / 2.0);
    out.c[1] = {p, cos2(half)};
    out.c[2] = {p, -sin2(half)};
    if (n > 0) {
        const double w4 = std::sqrt(4.0 * dn - 2.0);
        out.c[3] = {p - 1, -dn * std::sin(gt * w4) / w4};
    }
    return out;
}

SectorCoefficients coefficients_parallel(std::size_t n, double t, const CavityConfig& cfg) {
    const double gt = cfg.g * t;
    const double dn = static_cast<double>(n);
    const int p = static_cast<int>(n);

    SectorCoefficients out{Polarization::Parallel, n, t, {}};
    const double s_up = sin2(gt * std::sqrt((2.0 * dn + 3.0) / 2.0));
    out.c[0] = {p, 1.0 - 2.0 * (dn + 1.0) * s_up / (2.0 * dn + 3.0)};
    out.c[1] = {p + 2, 2.0 * s_up / (2.0 * dn + 3.0)};
    const double w = std::sqrt(4.0 * dn + 2.0);
    const double s_mid = std::sin(gt * w) / w;
    if (n > 0) out.c[2] = {p - 1, -dn * s_mid};
    out.c[3] = {p + 1, s_mid};
    if (n > 1) {
        const double s_dn = sin2(gt * std::sqrt((2.0 * dn - 1.0) / 2.0));
        out.c[4] = {p - 2, 2.0 * dn * (dn - 1.0) * s_dn / (2.0 * dn - 1.0)};
    }
    if (n == 0) {
        out.c[5] = {0, 1.0};
    } else {
        const double s_dn = sin2(gt * std::sqrt((2.0 * dn - 1.0) / 2.0));
        out.c[5] = {p, 1.0 - 2.0 * dn * s_dn / (2.0 * dn - 1.0)};
    }
    return out;
}

namespace {

// Products C_i C_j e^{-gamma^2}/n! with every gamma power folded into one exponent.
class WeightedProducts {
public:
    WeightedProducts(const SectorCoefficients& sc, double gamma)
        : sc_(sc), gamma_(gamma), log_gamma_(gamma > 0.0 ? std::log(gamma) : 0.0),
          base_(-gamma * gamma - numerics::log_factorial(sc.n)) {}

    // i, j are 1-based to match the C1..C4 / D1..D6 labels.
    double operator()(int i, int j) const {
        const ScaledCoefficient& a = sc_.c[static_cast<std::size_t>(i - 1)];
        const ScaledCoefficient& b = sc_.c[static_cast<std::size_t>(j - 1)];
        if (a.is_zero() || b.is_zero()) return 0.0;
        const int power = a.gamma_power + b.gamma_power;
        if (gamma_ == 0.0) {
            return power == 0 ? a.factor * b.factor * std::exp(base_) : 0.0;
        }
        return a.factor * b.factor * std::exp(power * log_gamma_ + base_);
    }

private:
    const SectorCoefficients& sc_;
    double gamma_;
    double log_gamma_;
    double base_;
};

Eigen::Matrix4cd antiparallel_sector(const EntangledStateSpec& spec, const SectorCoefficients& sc,
                                     double gamma) {
    const WeightedProducts w(sc, gamma);
    const double s = std::sin(spec.xi());
    const double c = std::cos(spec.xi());
    const double s2x = std::sin(2.0 * spec.xi());
    const double k = s2x * std::cos(2.0 * spec.eta()) + 1.0;
    const Complex e = std::polar(1.0, 2.0 * spec.eta());
    const Complex em = std::conj(e);

    Eigen::Matrix4cd r;
    r(0, 0) = w(1, 1) * k;
    r(1, 1) = w(2, 2) * s * s + w(3, 3) * c * c + w(2, 3) * (k - 1.0);
    r(2, 2) = w(2, 2) * c * c + w(3, 3) * s * s + w(2, 3) * (k - 1.0);
    r(3, 3) = w(4, 4) * k;
    r(0, 1) = em * (w(1, 2) * s + w(1, 3) * e * c) * (e * s + c);
    r(0, 2) = em * (w(1, 2) * e * c + w(1, 3) * s) * (e * s + c);
    r(0, 3) = w(1, 4) * k;
    r(1, 2) = 0.5 * (w(2, 2) * e * s2x + 2.0 * w(2, 3) + w(3, 3) * em * s2x);
    r(1, 3) = em * (w(2, 4) * e * s + w(3, 4) * c) * (e * c + s);
    r(2, 3) = em * (w(2, 4) * c + w(3, 4) * e * s) * (e * c + s);
    return r;
}

Eigen::Matrix4cd parallel_sector(const EntangledStateSpec& spec, const SectorCoefficients& sc,
                                 double gamma) {
    const WeightedProducts w(sc, gamma);
    const double s = std::sin(spec.xi());
    const double c = std::cos(spec.xi());
    const double kk = std::sin(2.0 * spec.xi()) * std::cos(2.0 * spec.eta());
    const Complex e = std::polar(1.0, 2.0 * spec.eta());
    const Complex em = std::conj(e);

    // (X_hi cos + e^{-2i eta} X_lo sin)(Y_hi cos + e^{2i eta} Y_lo sin), expanded so
    // each C_i C_j pair gets its own combined gamma power.
    auto cross = [&](int x_lo, int x_hi, int y_lo, int y_hi) {
        return w(x_hi, y_hi) * c * c + w(x_hi, y_lo) * e * c * s + w(x_lo, y_hi) * em * s * c +
               w(x_lo, y_lo) * s * s;
    };

    Eigen::Matrix4cd r;
    r(0, 0) = w(1, 1) * s * s + w(2, 2) * c * c + w(1, 2) * kk;
    r(1, 1) = w(3, 3) * s * s + w(4, 4) * c * c + w(3, 4) * kk;
    r(3, 3) = w(5, 5) * s * s + w(6, 6) * c * c + w(5, 6) * kk;
    r(2, 2) = r(1, 1);
    r(0, 1) = cross(3, 4, 1, 2);
    r(0, 3) = cross(5, 6, 1, 2);
    r(1, 3) = cross(5, 6, 3, 4);
    r(0, 2) = r(0, 1);
    r(1, 2) = r(1, 1);
    r(2, 3) = r(1, 3);
    return r;
}

Eigen::Matrix4cd sector_matrix(const EntangledStateSpec& spec, std::size_t n, double t,
                               const CavityConfig& cfg) {
    Eigen::Matrix4cd r = spec.polarization() == Polarization::Antiparallel
                             ? antiparallel_sector(spec, coefficients_antiparallel(n, t, cfg), cfg.gamma)
                             : parallel_sector(spec, coefficients_parallel(n, t, cfg), cfg.gamma);
    for (int i = 0; i < 4; ++i) {
        r(i, i) = r(i, i).real();
        for (int j = 0; j < i; ++j) r(i, j) = std::conj(r(j, i));
    }
    return r;
}

void require_closed_form_config(const CavityConfig& cfg) {
    cfg.validate();
    if (cfg.phi != 0.0) {
        throw UnsupportedParameter(
            "closed-form dynamics supports only phi = 0; use the oracle for other phases");
    }
}

}  // namespace

DensityMatrix4 rho_sector(const EntangledStateSpec& spec, std::size_t n, double t,
                          const CavityConfig& cfg) {
    require_closed_form_config(cfg);
    return DensityMatrix4(sector_matrix(spec, n, t, cfg));
}

ReducedDensity reduced_density(const EntangledStateSpec& spec, double t, const CavityConfig& cfg,
                               const ReducedDensityOptions& opts) {
    require_closed_form_config(cfg);
    if (!std::isfinite(t)) throw ValidationError("reduced_density: time must be finite");
    if (!(opts.tol > 0.0 && opts.tol <= 1e-3)) {
        throw ValidationError("reduced_density: tolerance must lie in (0, 1e-3]");
    }
    const FockTruncation trunc = choose_truncation(cfg.gamma, opts.tol, opts.sector_cap);
    const std::size_t sectors = trunc.n_max + 3;

    Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
    for (std::size_t n = 0; n < sectors; ++n) {
        sum += sector_matrix(spec, n, t, cfg);
    }
    const double deficit = 1.0 - sum.trace().real();
    if (opts.renormalize) sum /= sum.trace().real();
    return {DensityMatrix4(sum), trunc, sectors, deficit};
}

}  // namespace cavity_bell
