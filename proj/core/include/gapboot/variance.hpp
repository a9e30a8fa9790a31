#pragma once

#include <optional>

#include "gapboot/types.hpp"

namespace gapboot {

/// Estimated variance matrix of the full-data estimator theta_hat_n (not of
/// the sqrt(n)-scaled estimator).  Always symmetric positive semidefinite.
class VarianceEstimate {
public:
    /// Symmetrizes, projects onto the PSD cone and remembers the most negative
    /// eigenvalue seen before projection.  Throws DomainError when the input
    /// is not square, not finite, or asymmetric beyond 1e-10 relative.
    static VarianceEstimate from_matrix(const Matrix& m);

    const Matrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    Vector standard_errors() const;
    double standard_error(Eigen::Index component = 0) const;

    /// Smallest eigenvalue before the PSD projection (0 when nothing was clipped).
    double clipped_eigenvalue() const noexcept { return clipped_; }

private:
    VarianceEstimate(Matrix m, double clipped) : matrix_(std::move(m)), clipped_(clipped) {}

    Matrix matrix_;
    double clipped_ = 0.0;
};

bool is_symmetric(const Matrix& m, double rel_tol = 1e-10);

/// (M + M') / 2
Matrix symmetrize(const Matrix& m);

/// Eigenvalue floor at zero of a symmetric matrix.
Matrix project_psd(const Matrix& m);

/// Symmetric PSD square root V diag(sqrt(max(lambda, 0))) V'.
Matrix sym_sqrt(const Matrix& m);

/// V diag(max(lambda, eps)^-1/2) V'.  eps defaults to 1e-12 * max(lambda_max, 1).
/// Throws DomainError if the input is asymmetric beyond 1e-10.
Matrix sym_inverse_sqrt(const Matrix& m, std::optional<double> eps = std::nullopt);

}  // namespace gapboot
