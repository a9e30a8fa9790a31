#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gapboot/data_array.hpp"
#include "gapboot/estimator.hpp"
#include "gapboot/iid_bootstrap.hpp"
#include "gapboot/variance.hpp"

namespace gapboot {

/// Row-wise estimates theta_hat_j and their i.i.d.-bootstrap variances Sigma_hat_j.
struct RowEstimates {
    std::vector<Vector> estimates;
    std::vector<Matrix> row_variances;

    std::size_t rows() const noexcept { return estimates.size(); }
    /// Throws DimensionError on ragged or mismatched entries.
    void validate() const;
};

/// Evaluates the estimator on every row and bootstraps each row independently
/// (row j uses bootstrap stream j).
RowEstimates bootstrap_rows(const DataArray& array, const EstimatorSpec& est,
                            const BootstrapConfig& cfg);

/// Sum over ordered pairs j != k of (theta_j - theta_k)(theta_j - theta_k)' / (p(p-1)).
Matrix pairwise_difference_variance(std::span<const Vector> estimates);

/// [Sigma_j + Sigma_k - pairwise_difference_variance] / 2, symmetrized; j != k.
Matrix cross_covariance(const RowEstimates& rows, std::size_t j, std::size_t k);

/// Gap Bootstrap I variance of the equal-weight row average:
/// p^-2 [sum_j Sigma_j + sum_{j != k} cov(j, k)], projected to PSD.
///
/// Needs p >= 2; warns when p < 5 because the pairwise-difference term then
/// rests on very few pairs.
VarianceEstimate gb1_variance(const RowEstimates& rows);

/// Convenience: bootstrap_rows followed by gb1_variance.
VarianceEstimate gap_bootstrap_one(const DataArray& array, const EstimatorSpec& est,
                                   const BootstrapConfig& cfg);

}  // namespace gapboot
