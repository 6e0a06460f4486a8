// model.hpp: two-spin states, cavity parameters, and the semiclassical spectrum.
//
// Two-qubit basis order is fixed project-wide:
//   index 0 = |++>, 1 = |+->, 2 = |-+>, 3 = |-->
// with |+> the sigma_z = +1 state. The first spin is the more significant index,
// so kron(A, B) acts with A on spin 1.

#pragma once

#include "cavity_bell/numerics.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace cavity_bell {

enum BasisIndex : int { kUpUp = 0, kUpDown = 1, kDownUp = 2, kDownDown = 3 };

enum class Polarization { Antiparallel, Parallel };

std::string_view to_string(Polarization p);
Polarization parse_polarization(std::string_view s);

/// Wraps an angle into [0, 2*pi). Throws ValidationError on NaN/Inf.
double canonical_angle(double radians);

/// Parameters of sin(xi) e^{i eta}|a> + cos(xi) e^{-i eta}|b>, where (a, b) is
/// (|+->, |-+>) for antiparallel and (|++>, |-->) for parallel polarization.
class EntangledStateSpec {
public:
    EntangledStateSpec(Polarization polarization, double xi, double eta);

    Polarization polarization() const { return polarization_; }
    double xi() const { return xi_; }
    double eta() const { return eta_; }

    /// The two populated basis indices, in (sin xi, cos xi) order.
    std::array<int, 2> support() const;

private:
    Polarization polarization_;
    double xi_;
    double eta_;
};

/// Single-mode cavity with hbar = 1. Frequencies share one unit (omega = 1 by
/// default, so g is measured in units of omega); the natural time unit is the
/// field period T = 2 pi / omega.
struct CavityConfig {
    double omega = 1.0;
    double g = 1.0;
    double gamma = 0.0;  // coherent amplitude |alpha|; gamma^2 is the mean photon number
    double phi = 0.0;    // coherent phase, alpha = gamma e^{i phi}

    void validate() const;
    Complex alpha() const;
    double period() const;
    double mean_photons() const { return gamma * gamma; }
};

class TwoQubitState {
public:
    /// Throws ValidationError unless sum |amp|^2 == 1 within 1e-12.
    explicit TwoQubitState(const Eigen::Vector4cd& amps);

    const Eigen::Vector4cd& amplitudes() const { return amps_; }
    Complex operator[](int i) const { return amps_(i); }

private:
    Eigen::Vector4cd amps_;
};

/// 4x4 Hermitian matrix in the two-qubit basis.
///
/// Construction rejects non-finite and non-Hermitian input (defect > 1e-10).
/// Trace and positivity are not enforced here: photon-sector contributions and
/// the local/nonlocal split are legitimately non-normalized or indefinite.
/// Use trace() and min_eigenvalue() to inspect them.
class DensityMatrix4 {
public:
    static constexpr double kHermitianTolerance = 1e-10;
    static constexpr double kPsdTolerance = 1e-9;

    explicit DensityMatrix4(const Eigen::Matrix4cd& m);

    static DensityMatrix4 maximally_mixed();

    const Eigen::Matrix4cd& matrix() const { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

    double trace() const { return m_.trace().real(); }
    double min_eigenvalue() const;
    bool is_psd(double tol = kPsdTolerance) const { return min_eigenvalue() >= -tol; }

    DensityMatrix4 operator+(const DensityMatrix4& other) const;

private:
    Eigen::Matrix4cd m_;
};

struct SemiclassicalLevel {
    int index;
    double energy;
    TwoQubitState state;
};

/// H_sp(alpha) = <alpha|H|alpha> = omega gamma^2 + i gamma g sum_i (e^{i phi} s+_i - e^{-i phi} s-_i)
/// with s+ = |+><-|. Uses cfg.omega, cfg.g, cfg.phi and the supplied gamma.
Eigen::Matrix4cd effective_spin_hamiltonian(const CavityConfig& cfg, double gamma);

/// Closed-form levels of effective_spin_hamiltonian, ordered by index 0..3:
/// eps0 = w gamma^2 - 2 g gamma, eps1 = eps2 = w gamma^2, eps3 = w gamma^2 + 2 g gamma.
std::array<SemiclassicalLevel, 4> semiclassical_spectrum(const CavityConfig& cfg, double gamma);

enum class Extremum { Minimum, Maximum, Saddle };
std::string_view to_string(Extremum e);

struct StationaryPoint {
    int branch;
    double gamma;
    double energy;
    Extremum kind;
};

/// Stationary points d eps_k / d gamma = 0 with gamma >= 0, for every branch
/// that has one. Branch 3 has its only root at gamma = -g/omega and therefore
/// contributes nothing unless g == 0.
std::vector<StationaryPoint> stationary_amplitudes(const CavityConfig& cfg);

TwoQubitState make_entangled(const EntangledStateSpec& spec);

DensityMatrix4 density_from_pure(const TwoQubitState& state);

struct LocalNonlocalSplit {
    DensityMatrix4 local;     // diagonal, classical mixture
    DensityMatrix4 nonlocal;  // the two interference cross terms
};

LocalNonlocalSplit split_local_nonlocal(const EntangledStateSpec& spec);

}  // namespace cavity_bell
