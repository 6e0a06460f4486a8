// numerics.hpp: small dense kernels shared by every other module.
//
// The Hermitian eigensolver and the general 4x4 eigenvalue routine are thin
// contracts over Eigen; callers rely on the accuracy guarantees documented
// here, not on the provider.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>

namespace cavity_bell {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

namespace numerics {

/// Throws ValidationError if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

/// max_ij |M_ij - conj(M_ji)|
double hermiticity_defect(const ComplexMatrix& m);

/// max_ij |M_ij|
double max_abs(const ComplexMatrix& m);

struct HermitianEigensystem {
    Eigen::VectorXd values;   // ascending
    ComplexMatrix vectors;    // orthonormal columns
};

/// Eigendecomposition of a Hermitian matrix.
///
/// Input must satisfy ||M - M^dagger||_max <= herm_tol, otherwise ValidationError.
/// Guarantees ||M - V diag(values) V^dagger||_max <= 1e-9 * ||M||_max and
/// V orthonormal to 1e-10. Throws NumericalError if the solver does not converge.
HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m, double herm_tol = 1e-9);

/// All four (complex) eigenvalues of a general 4x4 matrix, in no particular order.
std::array<Complex, 4> general_eigenvalues_4(const Eigen::Matrix4cd& m);

/// Singular values of a small complex matrix, descending.
Eigen::VectorXd singular_values(const ComplexMatrix& m);

/// ln(n!) from a cumulative table of ln k; exact recursion up to kMaxLogFactorial.
double log_factorial(std::size_t n);
inline constexpr std::size_t kMaxLogFactorial = 1 << 14;

/// ln( e^{-gamma^2} gamma^{2n} / n! ). Requires gamma > 0; gamma == 0 is the
/// caller's job (only n == 0 survives).
double stable_poisson_logweight(std::size_t n, double gamma);

/// Kronecker product of two 2x2 matrices.
Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

const Eigen::Matrix2cd& pauli_x();
const Eigen::Matrix2cd& pauli_y();
const Eigen::Matrix2cd& pauli_z();

}  // namespace numerics
}  // namespace cavity_bell
