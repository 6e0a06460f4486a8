#include "cavity_bell/oracle.hpp"

#include "cavity_bell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cavity_bell::oracle {

namespace {

using Index = Eigen::Index;

Index at(int spin, std::size_t n, std::size_t n_fock) {
    return static_cast<Index>(JointState::index(spin, n, n_fock));
}

Index joint_dim(std::size_t n_fock) {
    return static_cast<Index>(4 * (n_fock + 1));
}

// Spin basis index with spin `which` (0 = first, 1 = second) flipped from - to +.
// Returns -1 if that spin is already up.
int raise(int spin, int which) {
    const int bit = which == 0 ? 2 : 1;
    return (spin & bit) ? (spin & ~bit) : -1;
}

// Adds c * a s+_i + conj(c) * a^dag s-_i for both spins.
void add_coupling(ComplexMatrix& h, std::size_t n_fock, Complex c) {
    for (int from = 0; from < 4; ++from) {
        for (int which = 0; which < 2; ++which) {
            const int to = raise(from, which);
            if (to < 0) continue;
            for (std::size_t m = 1; m <= n_fock; ++m) {
                const Complex v = c * std::sqrt(static_cast<double>(m));
                h(at(to, m - 1, n_fock), at(from, m, n_fock)) += v;
                h(at(from, m, n_fock), at(to, m - 1, n_fock)) += std::conj(v);
            }
        }
    }
}

void require_cutoff(std::size_t n_fock) {
    if (n_fock < 1) throw ValidationError("oracle: n_fock must be >= 1");
}

}  // namespace

std::string_view to_string(SpinTerm s) {
    return s == SpinTerm::Absent ? "absent" : "resonant";
}

SpinTerm parse_spin_term(std::string_view s) {
    if (s == "absent" || s == "literal") return SpinTerm::Absent;
    if (s == "resonant") return SpinTerm::Resonant;
    throw ValidationError("unknown spin term '" + std::string(s) +
                          "' (expected resonant or absent)");
}

double spin_frequency(SpinTerm s, const CavityConfig& cfg) {
    return s == SpinTerm::Resonant ? cfg.omega : 0.0;
}

JointState::JointState(ComplexVector amps, std::size_t n_fock)
    : amps_(std::move(amps)), n_fock_(n_fock) {
    if (amps_.size() != joint_dim(n_fock)) {
        throw ValidationError("JointState: amplitude count does not match 4 (n_fock + 1)");
    }
    numerics::require_finite(amps_, "JointState");
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
        throw ValidationError("JointState: state is not normalized (|psi| = " +
                              std::to_string(norm) + ")");
    }
}

int up_count(int spin) {
    return ((spin & 2) ? 0 : 1) + ((spin & 1) ? 0 : 1);
}

ComplexMatrix build_hamiltonian(const CavityConfig& cfg, std::size_t n_fock, SpinTerm spin) {
    cfg.validate();
    require_cutoff(n_fock);
    const Index dim = joint_dim(n_fock);
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    const double ws = spin_frequency(spin, cfg);
    for (int s = 0; s < 4; ++s) {
        for (std::size_t n = 0; n <= n_fock; ++n) {
            h(at(s, n, n_fock), at(s, n, n_fock)) =
                cfg.omega * static_cast<double>(n) + ws * up_count(s);
        }
    }
    add_coupling(h, n_fock, kI * cfg.g);
    return h;
}

ComplexMatrix interaction_hamiltonian(const CavityConfig& cfg, std::size_t n_fock, double t) {
    cfg.validate();
    require_cutoff(n_fock);
    const Index dim = joint_dim(n_fock);
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    add_coupling(h, n_fock, kI * cfg.g * std::polar(1.0, -cfg.omega * t));
    return h;
}

ComplexMatrix photon_number_operator(std::size_t n_fock) {
    const Index dim = joint_dim(n_fock);
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    for (int s = 0; s < 4; ++s)
        for (std::size_t n = 0; n <= n_fock; ++n)
            op(at(s, n, n_fock), at(s, n, n_fock)) = static_cast<double>(n);
    return op;
}

ComplexMatrix excitation_number_operator(std::size_t n_fock) {
    ComplexMatrix op = photon_number_operator(n_fock);
    for (int s = 0; s < 4; ++s)
        for (std::size_t n = 0; n <= n_fock; ++n)
            op(at(s, n, n_fock), at(s, n, n_fock)) += up_count(s);
    return op;
}

double expectation(const JointState& state, const ComplexMatrix& op) {
    const ComplexVector& v = state.amplitudes();
    return v.dot(op * v).real();
}

JointState initial_joint(const EntangledStateSpec& spec, const CavityConfig& cfg,
                         std::size_t n_fock) {
    cfg.validate();
    require_cutoff(n_fock);
    if (cfg.gamma > 0.0) {
        const FockTruncation needed = choose_truncation(cfg.gamma, 1e-12, kDefaultSectorCap);
        if (needed.n_max > n_fock) {
            throw TruncationError("initial_joint: Poisson tail above n_fock = " +
                                  std::to_string(n_fock) + " exceeds 1e-12");
        }
    }
    const TwoQubitState spin = make_entangled(spec);
    ComplexVector field = ComplexVector::Zero(static_cast<Index>(n_fock + 1));
    if (cfg.gamma == 0.0) {
        field(0) = 1.0;
    } else {
        for (std::size_t n = 0; n <= n_fock; ++n) {
            const double mag = std::exp(0.5 * numerics::stable_poisson_logweight(n, cfg.gamma));
            field(static_cast<Index>(n)) = std::polar(mag, static_cast<double>(n) * cfg.phi);
        }
        field.normalize();
    }
    ComplexVector amps(joint_dim(n_fock));
    for (int s = 0; s < 4; ++s)
        amps.segment(static_cast<Index>(s) * field.size(), field.size()) = spin[s] * field;
    return JointState(std::move(amps), n_fock);
}

Propagator::Propagator(const ComplexMatrix& hamiltonian)
    : eig_(numerics::hermitian_eigensystem(hamiltonian, 1e-12)) {}

JointState Propagator::evolve(const JointState& state, double t) const {
    if (state.amplitudes().size() != eig_.vectors.rows()) {
        throw ValidationError("Propagator::evolve: state dimension does not match Hamiltonian");
    }
    ComplexVector coeff = eig_.vectors.adjoint() * state.amplitudes();
    for (Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::polar(1.0, -eig_.values(k) * t);
    ComplexVector out = eig_.vectors * coeff;
    return JointState(std::move(out), state.n_fock());
}

JointState evolve(const JointState& state, const Propagator& propagator, double t) {
    return propagator.evolve(state, t);
}

DensityMatrix4 partial_trace_field(const JointState& state) {
    const std::size_t nf = state.n_fock();
    const Index block = static_cast<Index>(nf + 1);
    Eigen::Matrix4cd rho;
    for (int i = 0; i < 4; ++i) {
        const auto vi = state.amplitudes().segment(i * block, block);
        for (int j = 0; j < 4; ++j) {
            const auto vj = state.amplitudes().segment(j * block, block);
            rho(i, j) = vj.dot(vi);  // sum_n psi(i, n) conj(psi(j, n))
        }
    }
    if (std::abs(rho.trace().real() - 1.0) > 1e-10) {
        throw NumericalError("partial_trace_field: reduced density does not have unit trace");
    }
    return DensityMatrix4(0.5 * (rho + rho.adjoint()));
}

double edge_population(const JointState& state) {
    const std::size_t nf = state.n_fock();
    double pop = 0.0;
    for (int s = 0; s < 4; ++s)
        for (std::size_t n = nf >= 1 ? nf - 1 : 0; n <= nf; ++n)
            pop += std::norm(state.amplitude(s, n));
    return pop;
}

DensityMatrix4 to_spin_rotating_frame(const DensityMatrix4& rho, double spin_frequency, double t) {
    Eigen::Matrix4cd out = rho.matrix();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out(i, j) *= std::polar(1.0, spin_frequency * t * (up_count(i) - up_count(j)));
    return DensityMatrix4(out);
}

JointState interaction_propagator_column(const CavityConfig& cfg, int k, std::size_t n, double t,
                                         std::size_t n_fock) {
    cfg.validate();
    if (k < 0 || k > 3) throw ValidationError("interaction_propagator_column: k must be 0..3");
    if (n + 2 > n_fock) {
        throw ValidationError("interaction_propagator_column: n_fock must be >= n + 2");
    }
    const double gt = cfg.g * t;
    // f1(S) = sin(gt sqrt(2S)) / sqrt(2S),  f2(S) = sin^2(gt sqrt(S/2)) / S
    auto f1 = [gt](double s) { return std::sin(gt * std::sqrt(2.0 * s)) / std::sqrt(2.0 * s); };
    auto f2 = [gt](double s) {
        const double v = std::sin(gt * std::sqrt(s / 2.0));
        return v * v / s;
    };
    auto c2 = [gt](double s) {
        const double v = std::cos(gt * std::sqrt(s / 2.0));
        return v * v;
    };
    auto s2 = [gt](double s) {
        const double v = std::sin(gt * std::sqrt(s / 2.0));
        return v * v;
    };

    const double dn = static_cast<double>(n);
    ComplexVector out = ComplexVector::Zero(joint_dim(n_fock));
    auto put = [&](int spin, std::size_t photons, double v) { out(at(spin, photons, n_fock)) += v; };

    switch (k) {
        case kUpUp: {
            const double s_up = 2.0 * dn + 3.0;
            put(kUpUp, n, 1.0 - 2.0 * (dn + 1.0) * f2(s_up));
            put(kUpDown, n + 1, -std::sqrt(dn + 1.0) * f1(s_up));
            put(kDownUp, n + 1, -std::sqrt(dn + 1.0) * f1(s_up));
            put(kDownDown, n + 2, 2.0 * std::sqrt((dn + 1.0) * (dn + 2.0)) * f2(s_up));
            break;
        }
        case kUpDown:
        case kDownUp: {
            const double s0 = 2.0 * dn + 1.0;
            const int same = k;
            const int other = k == kUpDown ? kDownUp : kUpDown;
            if (n >= 1) put(kUpUp, n - 1, std::sqrt(dn) * f1(s0));
            put(same, n, c2(s0));
            put(other, n, -s2(s0));
            put(kDownDown, n + 1, -std::sqrt(dn + 1.0) * f1(s0));
            break;
        }
        case kDownDown: {
            const double s_dn = 2.0 * dn - 1.0;
            if (n >= 2) put(kUpUp, n - 2, 2.0 * std::sqrt(dn * (dn - 1.0)) * f2(s_dn));
            if (n >= 1) {
                put(kUpDown, n - 1, std::sqrt(dn) * f1(s_dn));
                put(kDownUp, n - 1, std::sqrt(dn) * f1(s_dn));
                put(kDownDown, n, 1.0 - 2.0 * dn * f2(s_dn));
            } else {
                put(kDownDown, n, 1.0);
            }
            break;
        }
        default:
            break;
    }
    return JointState(std::move(out), n_fock);
}

std::size_t oracle_cutoff(const CavityConfig& cfg, const FockTruncation& closed,
                          std::size_t slack_sectors) {
    std::size_t n = closed.n_max;
    if (cfg.gamma > 0.0) {
        n = std::max(n, choose_truncation(cfg.gamma, 1e-12, kDefaultSectorCap).n_max);
    }
    return std::max<std::size_t>(n + slack_sectors, 2);
}

ComparisonReport compare_closed_form(const EntangledStateSpec& spec, const CavityConfig& cfg,
                                     const std::vector<double>& times, double tol,
                                     const OracleOptions& opts) {
    if (!(tol > 0.0)) throw ValidationError("compare_closed_form: tolerance must be positive");
    const FockTruncation closed =
        choose_truncation(cfg.gamma, opts.closed_form.tol, opts.closed_form.sector_cap);
    const std::size_t n_fock = oracle_cutoff(cfg, closed, opts.slack_sectors);

    const Propagator propagator(build_hamiltonian(cfg, n_fock, opts.spin_term));
    const JointState psi0 = initial_joint(spec, cfg, n_fock);
    const double ws = spin_frequency(opts.spin_term, cfg);

    ComparisonReport report;
    report.tolerance = tol;
    report.n_max = closed.n_max;
    report.n_fock = n_fock;
    for (double t : times) {
        const JointState psi = propagator.evolve(psi0, t);
        const double edge = edge_population(psi);
        report.max_edge_population = std::max(report.max_edge_population, edge);
        if (edge > opts.edge_tolerance) {
            throw TruncationError("compare_closed_form: population " + std::to_string(edge) +
                                  " reached the Fock cutoff");
        }
        const DensityMatrix4 oracle_rho = to_spin_rotating_frame(partial_trace_field(psi), ws, t);
        const ReducedDensity closed_rho = reduced_density(spec, t, cfg, opts.closed_form);
        const double dev = (closed_rho.rho.matrix() - oracle_rho.matrix()).cwiseAbs().maxCoeff();
        report.times.push_back(t);
        report.max_deviation.push_back(dev);
        report.worst = std::max(report.worst, dev);
    }
    report.pass = report.worst <= tol;
    return report;
}

}  // namespace cavity_bell::oracle
