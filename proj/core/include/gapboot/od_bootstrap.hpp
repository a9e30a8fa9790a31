#pragma once

#include <cstddef>
#include <vector>

#include "gapboot/gap_bootstrap_two.hpp"
#include "gapboot/iid_bootstrap.hpp"
#include "gapboot/od_model.hpp"

namespace gapboot {

struct ODOptions {
    std::size_t ell = 0;  ///< Window length in days; 0 picks default_block_length(D).
    BootstrapConfig bootstrap;
    DegeneratePolicy policy = DegeneratePolicy::error;
    double ridge = 0.0;
};

struct ODAnalysis {
    Vector theta_hat;
    /// W_j per slot.
    std::vector<Matrix> weights;
    Vector se_gb1;
    Vector se_gb2;
    std::size_t ell = 0;
    /// Condition estimate of the full-data Gamma.
    double condition = 0.0;
};

/// Full-data split estimate with both standard errors.  Each slot's days are
/// resampled as whole (origins, destinations) records; windows run over
/// consecutive days.  Gap Bootstrap II uses per-component weights
/// w_ak = e_a' W_k and correlations of the projections w_ak'(theta_k - theta_hat).
ODAnalysis analyze_od(const ODDataset& data, const ODOptions& opts);

Vector od_gb2_standard_errors(const ODDataset& data, std::size_t ell, const BootstrapConfig& cfg,
                              DegeneratePolicy policy = DegeneratePolicy::error);

/// Equal-weight Gap Bootstrap I over the slot estimates.
Vector od_gb1_standard_errors(const ODDataset& data, const BootstrapConfig& cfg);

/// Gap Bootstrap II combiner for one component: sum_k sum_l s_k s_l rho(k, l)
/// where rho is the uncentred correlation of the rows of `projections`
/// (slots x windows).  Rows with negligible spread either raise
/// DegenerateCorrelationError or, under the zero policy or when their
/// s_k is itself negligible, keep only their diagonal term.
double projected_gb2_variance(const Vector& row_sd, const Matrix& projections, DegeneratePolicy policy,
                              double scale);

}  // namespace gapboot
