// oracle.hpp: brute-force reference dynamics in a truncated Fock space.
//
// The joint spin (x) field state is stored with index spin * (N + 1) + n, where
// spin follows the two-qubit basis order of model.hpp and n = 0..N is the
// photon number. Evolution is exact (full Hermitian eigendecomposition); the
// only approximation is the Fock cutoff, which is checked rather than assumed.
//
// Two spin terms are available:
//   SpinTerm::Absent    H = w a^dag a + i g sum_i (a s+_i - a^dag s-_i)
//   SpinTerm::Resonant  the same plus w sum_i s+_i s-_i (spins resonant with the field)
// The closed-form expansion in dynamics.hpp is the resonant model seen from
// the frame that co-rotates with the spins; see to_spin_rotating_frame().

#pragma once

#include "cavity_bell/dynamics.hpp"
#include "cavity_bell/model.hpp"
#include "cavity_bell/numerics.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace cavity_bell::oracle {

enum class SpinTerm { Absent, Resonant };

std::string_view to_string(SpinTerm s);
SpinTerm parse_spin_term(std::string_view s);

/// Spin transition frequency implied by the spin term.
double spin_frequency(SpinTerm s, const CavityConfig& cfg);

class JointState {
public:
    /// Throws ValidationError unless amps has 4 (n_fock + 1) entries and norm 1 within 1e-10.
    JointState(ComplexVector amps, std::size_t n_fock);

    const ComplexVector& amplitudes() const { return amps_; }
    std::size_t n_fock() const { return n_fock_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

    static std::size_t index(int spin, std::size_t n, std::size_t n_fock) {
        return static_cast<std::size_t>(spin) * (n_fock + 1) + n;
    }
    Complex amplitude(int spin, std::size_t n) const {
        return amps_(static_cast<Eigen::Index>(index(spin, n, n_fock_)));
    }

private:
    ComplexVector amps_;
    std::size_t n_fock_;
};

/// Number of spins in |+> for each basis index: (2, 1, 1, 0).
int up_count(int spin);

ComplexMatrix build_hamiltonian(const CavityConfig& cfg, std::size_t n_fock,
                                SpinTerm spin = SpinTerm::Absent);

/// Interaction-picture Hamiltonian i g sum_i (a e^{-iwt} s+_i - a^dag e^{iwt} s-_i),
/// the frame R(t) = exp(i w a^dag a t) applied to the SpinTerm::Absent model.
ComplexMatrix interaction_hamiltonian(const CavityConfig& cfg, std::size_t n_fock, double t);

ComplexMatrix photon_number_operator(std::size_t n_fock);
/// a^dag a + sum_i s+_i s-_i
ComplexMatrix excitation_number_operator(std::size_t n_fock);

double expectation(const JointState& state, const ComplexMatrix& op);

/// Spin state (x) coherent state truncated at n_fock and renormalized.
/// Throws TruncationError if the Poisson mass above n_fock exceeds 1e-12.
JointState initial_joint(const EntangledStateSpec& spec, const CavityConfig& cfg,
                         std::size_t n_fock);

/// exp(-i H t) from one eigendecomposition, reusable for any number of times.
class Propagator {
public:
    explicit Propagator(const ComplexMatrix& hamiltonian);

    JointState evolve(const JointState& state, double t) const;

    const Eigen::VectorXd& energies() const { return eig_.values; }

private:
    numerics::HermitianEigensystem eig_;
};

JointState evolve(const JointState& state, const Propagator& propagator, double t);

/// Tr_field |psi><psi|. Throws NumericalError if the result's trace is off by more than 1e-10.
DensityMatrix4 partial_trace_field(const JointState& state);

/// Population in the two highest photon sectors.
double edge_population(const JointState& state);

/// rho -> e^{i w_s n_up t} rho e^{-i w_s n_up t}: removes the free spin precession.
DensityMatrix4 to_spin_rotating_frame(const DensityMatrix4& rho, double spin_frequency, double t);

/// Applies the operator-valued 4x4 interaction propagator (entries built from
/// S = 2 a^dag a + 1) to |e_k> (x) |n>. The result lives in a space with
/// cutoff n_fock >= n + 2.
JointState interaction_propagator_column(const CavityConfig& cfg, int k, std::size_t n, double t,
                                         std::size_t n_fock);

struct OracleOptions {
    SpinTerm spin_term = SpinTerm::Resonant;
    std::size_t slack_sectors = 8;
    double edge_tolerance = 1e-10;
    ReducedDensityOptions closed_form{};
};

struct ComparisonReport {
    std::vector<double> times;          // natural units
    std::vector<double> max_deviation;  // max_ij |rho_closed - rho_oracle| at each time
    double worst = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::size_t n_max = 0;    // closed-form truncation
    std::size_t n_fock = 0;   // oracle cutoff
    double max_edge_population = 0.0;
};

/// Closed form vs brute force on a time grid. The oracle reduced density is
/// expressed in the spin rotating frame of the chosen spin term before comparing.
ComparisonReport compare_closed_form(const EntangledStateSpec& spec, const CavityConfig& cfg,
                                     const std::vector<double>& times, double tol,
                                     const OracleOptions& opts = {});

/// Fock cutoff used by compare_closed_form for the given closed-form truncation.
std::size_t oracle_cutoff(const CavityConfig& cfg, const FockTruncation& closed,
                          std::size_t slack_sectors);

}  // namespace cavity_bell::oracle
