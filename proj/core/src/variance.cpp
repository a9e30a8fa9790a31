#include "gapboot/variance.hpp"

#include <algorithm>
#include <cmath>

#include "gapboot/errors.hpp"

namespace gapboot {

bool is_symmetric(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix project_psd(const Matrix& m) {
    if (m.rows() == 1) return m.cwiseMax(0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const Vector lambda = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix sym_sqrt(const Matrix& m) {
    if (m.rows() == 1) return Matrix::Constant(1, 1, std::sqrt(std::max(m(0, 0), 0.0)));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix sym_inverse_sqrt(const Matrix& m, std::optional<double> eps) {
    if (!is_symmetric(m)) throw DomainError("sym_inverse_sqrt: input is not symmetric");
    if (m.rows() == 1) {
        const double floor = eps.value_or(1e-12 * std::max(m(0, 0), 1.0));
        return Matrix::Constant(1, 1, 1.0 / std::sqrt(std::max(m(0, 0), floor)));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m));
    const Vector& lambda = eig.eigenvalues();
    const double floor = eps.value_or(1e-12 * std::max(lambda.maxCoeff(), 1.0));
    const Vector scale = lambda.cwiseMax(floor).cwiseSqrt().cwiseInverse();
    return eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
}

VarianceEstimate VarianceEstimate::from_matrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DomainError("variance matrix must be square and non-empty");
    }
    if (!m.allFinite()) throw DomainError("variance matrix has non-finite entries");
    if (!is_symmetric(m)) throw DomainError("variance matrix is not symmetric");
    Matrix sym = symmetrize(m);
    double smallest = 0.0;
    if (sym.rows() == 1) {
        smallest = std::min(sym(0, 0), 0.0);
        sym(0, 0) = std::max(sym(0, 0), 0.0);
        return VarianceEstimate(std::move(sym), smallest);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    smallest = std::min(eig.eigenvalues().minCoeff(), 0.0);
    if (smallest < 0.0) {
        const Vector lambda = eig.eigenvalues().cwiseMax(0.0);
        sym = symmetrize(eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose());
    }
    return VarianceEstimate(std::move(sym), smallest);
}

Vector VarianceEstimate::standard_errors() const {
    return matrix_.diagonal().cwiseMax(0.0).cwiseSqrt();
}

double VarianceEstimate::standard_error(Eigen::Index component) const {
    return std::sqrt(std::max(matrix_(component, component), 0.0));
}

}  // namespace gapboot
