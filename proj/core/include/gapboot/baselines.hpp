#pragma once

#include <cstddef>

#include "gapboot/data_array.hpp"
#include "gapboot/estimator.hpp"
#include "gapboot/iid_bootstrap.hpp"
#include "gapboot/variance.hpp"

namespace gapboot {

/// Overlapping subsampling over windows of ell whole periods, rescaled by
/// ell*p/n so the result estimates Var(theta_hat_n).  Needs 1 < ell < m.
VarianceEstimate subsampling_variance(const DataArray& array, const EstimatorSpec& est,
                                      std::size_t ell);

/// Moving block bootstrap over periods: ceil(m/ell) blocks of ell consecutive
/// periods drawn with replacement, concatenated and cut back to m periods.
/// Replicate covariance uses divisor B.  ell = 1 reduces to resampling periods.
VarianceEstimate block_bootstrap_variance(const DataArray& array, const EstimatorSpec& est,
                                          std::size_t ell, const BootstrapConfig& cfg);

struct NaiveColumnResult {
    VarianceEstimate variance;
    /// theta_hat_n minus the average of the per-period estimates.
    Vector discrepancy;
};

/// Treats per-period estimates as i.i.d. replicates: m^-1 times their sample
/// covariance (divisor m - 1).  Biased whenever the estimator is not linear in
/// the periods, which the discrepancy exposes.
NaiveColumnResult naive_column_variance(const DataArray& array, const EstimatorSpec& est);

}  // namespace gapboot
