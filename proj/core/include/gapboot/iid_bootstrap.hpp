#pragma once

#include <cstddef>
#include <cstdint>

#include "gapboot/estimator.hpp"
#include "gapboot/types.hpp"
#include "gapboot/variance.hpp"

namespace gapboot {

enum class BootstrapMode { monte_carlo, exhaustive };

struct BootstrapConfig {
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    BootstrapMode mode = BootstrapMode::monte_carlo;

    /// Exhaustive enumeration is refused above this many resamples (m^m).
    static constexpr std::uint64_t max_exhaustive = 1'000'000;
};

/// Replicate estimates theta*_b of an Efron bootstrap over one row, one per column.
///
/// monte_carlo: B resamples of size m drawn with replacement; replicate b uses
/// the stream derive_key(seed, {stream, b}), so `stream` should identify the
/// row (or slot) being resampled.
/// exhaustive: all m^m equally likely index sequences, in odometer order.
Matrix iid_bootstrap_replicates(const ObsView& row, const EstimatorSpec& est,
                                const BootstrapConfig& cfg, std::uint64_t stream = 0);

/// Covariance (divisor B) of the bootstrap replicates: the bootstrap estimate
/// of Var(theta_hat) for the row estimator.
VarianceEstimate iid_bootstrap_variance(const ObsView& row, const EstimatorSpec& est,
                                        const BootstrapConfig& cfg, std::uint64_t stream = 0);

/// Population covariance (divisor = column count) of replicate columns.
Matrix replicate_covariance(const Matrix& replicates);

}  // namespace gapboot
