#include "gapboot/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gapboot/errors.hpp"

namespace gapboot {

EstimatorSpec::EstimatorSpec(std::string name, Eigen::Index r, Evaluator evaluate,
                             std::vector<double> weights)
    : name_(std::move(name)), dim_(r), evaluate_(std::move(evaluate)), weights_(std::move(weights)) {
    if (dim_ < 1) throw DomainError("estimator dimension r must be >= 1");
    if (!evaluate_) throw DomainError("estimator '" + name_ + "' has no evaluator");
    if (!weights_.empty()) check_weights(weights_);
}

std::vector<double> EstimatorSpec::weights_for(std::size_t p) const {
    if (weights_.empty()) return equal_weights(p);
    if (weights_.size() != p) {
        throw DimensionError("estimator '" + name_ + "' carries " + std::to_string(weights_.size()) +
                             " weights but the array has " + std::to_string(p) + " rows");
    }
    return weights_;
}

EstimatorSpec EstimatorSpec::with_weights(std::vector<double> weights) const {
    return EstimatorSpec(name_, dim_, evaluate_, std::move(weights));
}

std::string SliceTag::describe() const {
    std::string out = what;
    if (first >= 0) out += " " + std::to_string(first);
    if (second >= 0) out += ", row " + std::to_string(second);
    return out;
}

Vector EstimatorSpec::evaluate(const ObsView& obs, const SliceTag& where) const {
    Vector out;
    try {
        out = evaluate_(obs);
    } catch (const EvaluationError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError("estimator '" + name_ + "' failed on " + where.describe() + ": " + e.what());
    }
    if (out.size() != dim_) {
        throw EvaluationError("estimator '" + name_ + "' returned " + std::to_string(out.size()) +
                              " components on " + where.describe() + ", expected " + std::to_string(dim_));
    }
    if (!out.allFinite()) {
        throw EvaluationError("estimator '" + name_ + "' returned a non-finite value on " + where.describe());
    }
    return out;
}

std::vector<double> equal_weights(std::size_t p) {
    if (p == 0) throw DomainError("equal weights need p >= 1");
    return std::vector<double>(p, 1.0 / static_cast<double>(p));
}

void check_weights(std::span<const double> weights) {
    if (weights.empty()) throw DomainError("weight vector is empty");
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0)) throw DomainError("weights must lie in [0, 1]");
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw DomainError("weights sum to " + std::to_string(total) + ", expected 1");
    }
}

EstimatorSpec sample_mean(Eigen::Index d) {
    return EstimatorSpec("mean", d, [d](const ObsView& x) -> Vector {
        if (x.cols() == 0) throw EvaluationError("mean of an empty collection");
        if (x.rows() != d) throw EvaluationError("observation dimension mismatch");
        return x.rowwise().mean();
    });
}

EstimatorSpec mean_of_component_means(Eigen::Index d) {
    return EstimatorSpec("mean_of_means", 1, [d](const ObsView& x) -> Vector {
        if (x.cols() == 0) throw EvaluationError("mean of an empty collection");
        if (x.rows() != d) throw EvaluationError("observation dimension mismatch");
        return Vector::Constant(1, x.mean());
    });
}

EstimatorSpec sample_median() {
    return EstimatorSpec("median", 1, [](const ObsView& x) -> Vector {
        if (x.rows() != 1) throw EvaluationError("median expects scalar observations");
        const auto n = static_cast<std::size_t>(x.cols());
        if (n == 0) throw EvaluationError("median of an empty collection");
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = x(0, static_cast<Eigen::Index>(i));
        const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
        std::nth_element(v.begin(), mid, v.end());
        double med = *mid;
        if (n % 2 == 0) med = 0.5 * (med + *std::max_element(v.begin(), mid));
        return Vector::Constant(1, med);
    });
}

EstimatorSpec plugin_variance() {
    return EstimatorSpec("plugin_variance", 1, [](const ObsView& x) -> Vector {
        if (x.rows() != 1) throw EvaluationError("plug-in variance expects scalar observations");
        if (x.cols() == 0) throw EvaluationError("variance of an empty collection");
        const double mean = x.mean();
        return Vector::Constant(1, (x.array() - mean).square().mean());
    });
}

namespace {

Vector full_estimate(const DataArray& array, const EstimatorSpec& est) {
    return est.evaluate(array.series(), {"full data"});
}

Vector row_estimate(const DataArray& array, const EstimatorSpec& est, std::size_t j) {
    return est.evaluate(array.row(j), {"row", static_cast<long>(j)});
}

}  // namespace

double verify_linearity(const DataArray& array, const EstimatorSpec& est) {
    const auto w = est.weights_for(array.slots());
    Vector combined = Vector::Zero(est.dim());
    for (std::size_t j = 0; j < array.slots(); ++j) combined += w[j] * row_estimate(array, est, j);
    return (full_estimate(array, est) - combined).norm();
}

double verify_linearity(const DataArray& array, const EstimatorSpec& est,
                        std::span<const Matrix> weights) {
    if (weights.size() != array.slots()) {
        throw DimensionError("expected " + std::to_string(array.slots()) + " weight matrices, got " +
                             std::to_string(weights.size()));
    }
    Vector combined = Vector::Zero(est.dim());
    for (std::size_t j = 0; j < array.slots(); ++j) {
        if (weights[j].rows() != est.dim() || weights[j].cols() != est.dim()) {
            throw DimensionError("weight matrix " + std::to_string(j) + " is not r x r");
        }
        combined += weights[j] * row_estimate(array, est, j);
    }
    return (full_estimate(array, est) - combined).norm();
}

}  // namespace gapboot
