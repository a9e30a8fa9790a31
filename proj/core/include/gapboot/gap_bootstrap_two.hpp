#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gapboot/data_array.hpp"
#include "gapboot/estimator.hpp"
#include "gapboot/gap_bootstrap_one.hpp"
#include "gapboot/iid_bootstrap.hpp"
#include "gapboot/variance.hpp"

namespace gapboot {

/// What to do when a sampling-window correlation has a zero denominator.
enum class DegeneratePolicy { error, zero };

/// Row estimators re-evaluated on overlapping windows of ell whole periods.
struct SubseriesEstimates {
    std::size_t ell = 0;
    /// by_row[j] is r x I; column i holds the estimate from row j restricted to
    /// periods [i, i + ell).
    std::vector<Matrix> by_row;
    /// The full-data estimate theta_hat_n, the centre of every correlation.
    Vector full_estimate;

    std::size_t rows() const noexcept { return by_row.size(); }
    std::size_t windows() const noexcept {
        return by_row.empty() ? 0 : static_cast<std::size_t>(by_row.front().cols());
    }
    Eigen::Index dim() const noexcept { return full_estimate.size(); }

    void validate() const;
};

/// round(c * m^(1/3)) clamped into [2, m - 1]; m >= 8.
std::size_t default_block_length(std::size_t periods, double c = 2.0);

/// Evaluates the estimator on each row within each of the I = m - ell + 1
/// overlapping period windows, plus once on the full data.  Needs 1 < ell < m.
SubseriesEstimates subseries_estimates(const DataArray& array, const EstimatorSpec& est,
                                       std::size_t ell);

/// Sampling-window correlation between component comp_j of row j and
/// component comp_k of row k, centred at the full-data estimate.  Throws
/// DegenerateCorrelationError when either centred sequence is identically zero
/// (up to round-off).  The result is clamped to [-1, 1].
double sampling_window_correlation(const SubseriesEstimates& sub, std::size_t j, std::size_t k,
                                   Eigen::Index comp_j = 0, Eigen::Index comp_k = 0);

/// A_j^-1/2 C_jk A_k^-1/2, where A_j is the second-moment matrix of row j's
/// centred window estimates and C_jk the cross moment.  Eigenvalues of A are
/// floored at 1e-12 of the largest.
Matrix correlation_matrix(const SubseriesEstimates& sub, std::size_t j, std::size_t k);

/// Gap Bootstrap II: sum_j sum_k w_j w_k Sigma_j^1/2 R(j,k) Sigma_k^1/2 with
/// R(j,j) = I and symmetric PSD square roots.  For r = 1 this is
/// sum_j sum_k w_j w_k sigma_j sigma_k rho(j,k).
VarianceEstimate gb2_variance(std::span<const Matrix> row_variances, const SubseriesEstimates& sub,
                              std::span<const double> weights,
                              DegeneratePolicy policy = DegeneratePolicy::error);

struct GapBootstrapTwoOptions {
    std::size_t ell = 0;  ///< 0 selects default_block_length(m).
    BootstrapConfig bootstrap;
    DegeneratePolicy policy = DegeneratePolicy::error;
};

/// Full pipeline using precomputed row bootstrap results.
VarianceEstimate gap_bootstrap_two(const DataArray& array, const EstimatorSpec& est,
                                   const RowEstimates& rows, const GapBootstrapTwoOptions& opts);

VarianceEstimate gap_bootstrap_two(const DataArray& array, const EstimatorSpec& est,
                                   const GapBootstrapTwoOptions& opts);

}  // namespace gapboot
