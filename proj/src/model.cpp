#include "cavity_bell/model.hpp"

#include "cavity_bell/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cavity_bell {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Matrix2cd raising() {
    return (Eigen::Matrix2cd() << 0, 1, 0, 0).finished();
}

}  // namespace

std::string_view to_string(Polarization p) {
    return p == Polarization::Antiparallel ? "antiparallel" : "parallel";
}

Polarization parse_polarization(std::string_view s) {
    if (s == "antiparallel" || s == "anti") return Polarization::Antiparallel;
    if (s == "parallel") return Polarization::Parallel;
    throw ValidationError("unknown polarization '" + std::string(s) +
                          "' (expected antiparallel or parallel)");
}

double canonical_angle(double radians) {
    if (!std::isfinite(radians)) {
        throw ValidationError("angle must be finite");
    }
    double r = std::fmod(radians, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a value just below a multiple of 2 pi can round up to 2 pi.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

EntangledStateSpec::EntangledStateSpec(Polarization polarization, double xi, double eta)
    : polarization_(polarization), xi_(canonical_angle(xi)), eta_(canonical_angle(eta)) {}

std::array<int, 2> EntangledStateSpec::support() const {
    if (polarization_ == Polarization::Antiparallel) return {kUpDown, kDownUp};
    return {kUpUp, kDownDown};
}

void CavityConfig::validate() const {
    if (!std::isfinite(omega) || !std::isfinite(g) || !std::isfinite(gamma) ||
        !std::isfinite(phi)) {
        throw ValidationError("cavity parameters must be finite");
    }
    if (!(omega > 0.0)) throw ValidationError("omega must be positive");
    if (g < 0.0) throw ValidationError("g must be non-negative");
    if (gamma < 0.0) throw ValidationError("gamma must be non-negative");
}

Complex CavityConfig::alpha() const {
    return std::polar(gamma, phi);
}

double CavityConfig::period() const {
    return kTwoPi / omega;
}

TwoQubitState::TwoQubitState(const Eigen::Vector4cd& amps) : amps_(amps) {
    numerics::require_finite(amps, "TwoQubitState");
    const double norm2 = amps.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-12) {
        throw ValidationError("TwoQubitState: amplitudes are not normalized (|psi|^2 = " +
                              std::to_string(norm2) + ")");
    }
}

DensityMatrix4::DensityMatrix4(const Eigen::Matrix4cd& m) : m_(m) {
    numerics::require_finite(m, "DensityMatrix4");
    if (numerics::hermiticity_defect(m) > kHermitianTolerance) {
        throw ValidationError("DensityMatrix4: matrix is not Hermitian");
    }
}

DensityMatrix4 DensityMatrix4::maximally_mixed() {
    return DensityMatrix4(Eigen::Matrix4cd::Identity() * 0.25);
}

double DensityMatrix4::min_eigenvalue() const {
    return numerics::hermitian_eigensystem(m_, kHermitianTolerance).values(0);
}

DensityMatrix4 DensityMatrix4::operator+(const DensityMatrix4& other) const {
    return DensityMatrix4(m_ + other.m_);
}

Eigen::Matrix4cd effective_spin_hamiltonian(const CavityConfig& cfg, double gamma) {
    const Eigen::Matrix2cd sp = raising();
    const Eigen::Matrix2cd sm = sp.adjoint();
    const Eigen::Matrix2cd one = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd h =
        kI * gamma * cfg.g * (std::polar(1.0, cfg.phi) * sp - std::polar(1.0, -cfg.phi) * sm);
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Identity() * (cfg.omega * gamma * gamma);
    out += numerics::kron(h, one) + numerics::kron(one, h);
    return out;
}

std::array<SemiclassicalLevel, 4> semiclassical_spectrum(const CavityConfig& cfg, double gamma) {
    if (!(gamma >= 0.0)) throw ValidationError("semiclassical_spectrum: gamma must be >= 0");
    const double base = cfg.omega * gamma * gamma;
    const double split = 2.0 * cfg.g * gamma;
    const Complex ep = std::polar(1.0, cfg.phi);
    const Complex em = std::conj(ep);
    const double r2 = 1.0 / std::sqrt(2.0);

    Eigen::Vector4cd psi0, psi1, psi2, psi3;
    psi0 << -0.5 * ep, -0.5 * kI, -0.5 * kI, 0.5 * em;
    psi3 << -0.5 * ep, 0.5 * kI, 0.5 * kI, 0.5 * em;
    psi2 << r2 * ep, 0, 0, r2 * em;
    psi1 << 0, -r2, r2, 0;

    return {SemiclassicalLevel{0, base - split, TwoQubitState(psi0)},
            SemiclassicalLevel{1, base, TwoQubitState(psi1)},
            SemiclassicalLevel{2, base, TwoQubitState(psi2)},
            SemiclassicalLevel{3, base + split, TwoQubitState(psi3)}};
}

std::string_view to_string(Extremum e) {
    switch (e) {
        case Extremum::Minimum: return "min";
        case Extremum::Maximum: return "max";
        case Extremum::Saddle: return "saddle";
    }
    return "?";
}

std::vector<StationaryPoint> stationary_amplitudes(const CavityConfig& cfg) {
    cfg.validate();
    // Every branch is omega gamma^2 + s g gamma with s in {-2, 0, 0, +2}:
    // root gamma* = -s g / (2 omega), curvature 2 omega > 0.
    constexpr std::array<double, 4> slope{-2.0, 0.0, 0.0, 2.0};
    std::vector<StationaryPoint> out;
    for (int k = 0; k < 4; ++k) {
        const double root = -slope[k] * cfg.g / (2.0 * cfg.omega);
        if (root < 0.0) continue;
        const double gamma = root == 0.0 ? 0.0 : root;  // normalizes -0.0
        const double energy = cfg.omega * gamma * gamma + slope[k] * cfg.g * gamma;
        out.push_back({k, gamma, energy, Extremum::Minimum});
    }
    return out;
}

TwoQubitState make_entangled(const EntangledStateSpec& spec) {
    Eigen::Vector4cd amps = Eigen::Vector4cd::Zero();
    const auto [a, b] = spec.support();
    amps(a) = std::sin(spec.xi()) * std::polar(1.0, spec.eta());
    amps(b) = std::cos(spec.xi()) * std::polar(1.0, -spec.eta());
    return TwoQubitState(amps);
}

DensityMatrix4 density_from_pure(const TwoQubitState& state) {
    const Eigen::Vector4cd& v = state.amplitudes();
    return DensityMatrix4(v * v.adjoint());
}

LocalNonlocalSplit split_local_nonlocal(const EntangledStateSpec& spec) {
    const auto [a, b] = spec.support();
    const double s = std::sin(spec.xi());
    const double c = std::cos(spec.xi());

    Eigen::Matrix4cd local = Eigen::Matrix4cd::Zero();
    local(a, a) = s * s;
    local(b, b) = c * c;

    // Same phase convention as |psi><psi|: the (a, b) entry carries e^{+2i eta}.
    Eigen::Matrix4cd nonlocal = Eigen::Matrix4cd::Zero();
    nonlocal(a, b) = s * c * std::polar(1.0, 2.0 * spec.eta());
    nonlocal(b, a) = std::conj(nonlocal(a, b));

    return {DensityMatrix4(local), DensityMatrix4(nonlocal)};
}

}  // namespace cavity_bell
