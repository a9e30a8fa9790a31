#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gapboot/data_array.hpp"
#include "gapboot/types.hpp"

namespace gapboot {

/// Names the slice an evaluation ran on; formatted only when something fails.
struct SliceTag {
    const char* what = "input";
    long first = -1;
    long second = -1;

    std::string describe() const;
};

/// Maps an ordered collection of d-vectors to an r-vector estimate.
/// Must be deterministic and safe to call concurrently.
using Evaluator = std::function<Vector(const ObsView&)>;

/// A pluggable estimator together with its row-linearity weights.
///
/// The same evaluator is applied to the full data, to single rows, to windows
/// of rows and to bootstrap resamples.  Weights w_1..w_p (non-negative, summing
/// to one) describe how the full-data estimate decomposes into row estimates;
/// leaving them empty means equal weights 1/p for whatever p the estimator
/// meets.
class EstimatorSpec {
public:
    EstimatorSpec(std::string name, Eigen::Index r, Evaluator evaluate,
                  std::vector<double> weights = {});

    const std::string& name() const noexcept { return name_; }
    Eigen::Index dim() const noexcept { return dim_; }
    bool has_explicit_weights() const noexcept { return !weights_.empty(); }

    /// Weights for an array with p rows; throws DimensionError if explicit
    /// weights were given for a different p.
    std::vector<double> weights_for(std::size_t p) const;

    EstimatorSpec with_weights(std::vector<double> weights) const;

    /// Evaluates and checks the result (length r, all finite); failures are
    /// rethrown as EvaluationError naming `where`.
    Vector evaluate(const ObsView& obs, const SliceTag& where = {}) const;

private:
    std::string name_;
    Eigen::Index dim_;
    Evaluator evaluate_;
    std::vector<double> weights_;
};

std::vector<double> equal_weights(std::size_t p);

/// Throws DomainError unless every weight is in [0,1] and the sum is 1 within 1e-12.
void check_weights(std::span<const double> weights);

/// Component-wise sample mean (r = d).
EstimatorSpec sample_mean(Eigen::Index d);

/// Average of the component-wise means, a scalar (r = 1).
EstimatorSpec mean_of_component_means(Eigen::Index d);

/// Median of scalar observations (d = 1, r = 1).
EstimatorSpec sample_median();

/// Plug-in variance n^-1 * sum (X_t - mean)^2 of scalar observations.
EstimatorSpec plugin_variance();

/// Euclidean norm of theta_hat - sum_j w_j theta_hat_j using the estimator's
/// scalar weights.  A diagnostic; thresholds are left to callers.
double verify_linearity(const DataArray& array, const EstimatorSpec& est);

/// Same residual with matrix-valued weights, theta_hat - sum_j W_j theta_hat_j.
double verify_linearity(const DataArray& array, const EstimatorSpec& est,
                        std::span<const Matrix> weights);

}  // namespace gapboot
