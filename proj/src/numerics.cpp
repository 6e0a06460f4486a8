#include "cavity_bell/numerics.hpp"

#include "cavity_bell/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cavity_bell::numerics {

void require_finite(const ComplexMatrix& m, const char* what) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Complex z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw ValidationError(std::string(what) + ": non-finite entry");
            }
        }
    }
}

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw ValidationError("hermiticity_defect: matrix is not square");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m, double herm_tol) {
    require_finite(m, "hermitian_eigensystem");
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("hermitian_eigensystem: matrix must be square and non-empty");
    }
    const double defect = hermiticity_defect(m);
    if (defect > herm_tol) {
        throw ValidationError("hermitian_eigensystem: matrix is not Hermitian (defect " +
                              std::to_string(defect) + ")");
    }
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eigensystem: eigendecomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

std::array<Complex, 4> general_eigenvalues_4(const Eigen::Matrix4cd& m) {
    require_finite(m, "general_eigenvalues_4");
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("general_eigenvalues_4: eigenvalue iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev(0), ev(1), ev(2), ev(3)};
}

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
    require_finite(m, "singular_values");
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues();
}

namespace {

const std::vector<double>& log_factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kMaxLogFactorial + 1);
        t[0] = 0.0;
        for (std::size_t k = 1; k <= kMaxLogFactorial; ++k) {
            t[k] = t[k - 1] + std::log(static_cast<double>(k));
        }
        return t;
    }();
    return table;
}

}  // namespace

double log_factorial(std::size_t n) {
    if (n > kMaxLogFactorial) {
        return std::lgamma(static_cast<double>(n) + 1.0);
    }
    return log_factorial_table()[n];
}

double stable_poisson_logweight(std::size_t n, double gamma) {
    if (!(gamma > 0.0)) {
        throw ValidationError("stable_poisson_logweight: gamma must be positive");
    }
    return 2.0 * static_cast<double>(n) * std::log(gamma) - gamma * gamma - log_factorial(n);
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

const Eigen::Matrix2cd& pauli_x() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    return m;
}

const Eigen::Matrix2cd& pauli_y() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, -kI, kI, 0).finished();
    return m;
}

const Eigen::Matrix2cd& pauli_z() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    return m;
}

}  // namespace cavity_bell::numerics
