#include "gapboot/gap_bootstrap_one.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gapboot/diagnostics.hpp"
#include "gapboot/errors.hpp"
#include "gapboot/parallel.hpp"

namespace gapboot {

void RowEstimates::validate() const {
    if (estimates.size() != row_variances.size()) {
        throw DimensionError("row estimates and row variances differ in count");
    }
    if (estimates.empty()) throw InsufficientDataError("no row estimates");
    const auto r = estimates.front().size();
    for (std::size_t j = 0; j < estimates.size(); ++j) {
        if (estimates[j].size() != r || row_variances[j].rows() != r || row_variances[j].cols() != r) {
            throw DimensionError("row " + std::to_string(j) + " has inconsistent dimensions");
        }
    }
}

RowEstimates bootstrap_rows(const DataArray& array, const EstimatorSpec& est,
                            const BootstrapConfig& cfg) {
    const auto p = array.slots();
    RowEstimates out;
    out.estimates.resize(p);
    out.row_variances.resize(p);
    parallel_for(p, [&](std::size_t j) {
        const auto row = array.row(j);
        out.estimates[j] = est.evaluate(row, {"row", static_cast<long>(j)});
        out.row_variances[j] = iid_bootstrap_variance(row, est, cfg, j).matrix();
    });
    return out;
}

Matrix pairwise_difference_variance(std::span<const Vector> estimates) {
    const auto p = estimates.size();
    if (p < 2) throw InsufficientDataError("pairwise differences need p >= 2 rows");
    // Sum over ordered pairs equals 2p * sum_j (theta_j - mean)(theta_j - mean)'.
    const auto r = estimates.front().size();
    // Shifting by the first row keeps identical rows exactly at zero spread.
    Vector shift = Vector::Zero(r);
    for (const auto& e : estimates) shift += e - estimates.front();
    const Vector mean = estimates.front() + shift / static_cast<double>(p);
    Matrix scatter = Matrix::Zero(r, r);
    for (const auto& e : estimates) {
        const Vector c = e - mean;
        scatter.noalias() += c * c.transpose();
    }
    return symmetrize(2.0 * scatter / static_cast<double>(p - 1));
}

Matrix cross_covariance(const RowEstimates& rows, std::size_t j, std::size_t k) {
    rows.validate();
    if (j >= rows.rows() || k >= rows.rows()) throw BoundsError("cross_covariance: row index out of range");
    if (j == k) throw DomainError("cross_covariance needs j != k; use the row variance directly");
    const Matrix diff = pairwise_difference_variance(rows.estimates);
    return symmetrize(0.5 * (rows.row_variances[j] + rows.row_variances[k] - diff));
}

namespace {

// Lexicographic order on (estimate, variance) so the arithmetic never depends on row order.
bool row_before(const RowEstimates& rows, std::size_t a, std::size_t b) {
    const auto& ea = rows.estimates[a];
    const auto& eb = rows.estimates[b];
    for (Eigen::Index i = 0; i < ea.size(); ++i) {
        if (ea(i) != eb(i)) return ea(i) < eb(i);
    }
    const auto& va = rows.row_variances[a];
    const auto& vb = rows.row_variances[b];
    for (Eigen::Index i = 0; i < va.size(); ++i) {
        if (va(i) != vb(i)) return va(i) < vb(i);
    }
    return false;
}

RowEstimates canonical_order(const RowEstimates& rows) {
    std::vector<std::size_t> order(rows.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row_before(rows, a, b); });
    RowEstimates out;
    out.estimates.reserve(order.size());
    out.row_variances.reserve(order.size());
    for (auto j : order) {
        out.estimates.push_back(rows.estimates[j]);
        out.row_variances.push_back(rows.row_variances[j]);
    }
    return out;
}

}  // namespace

VarianceEstimate gb1_variance(const RowEstimates& unordered) {
    unordered.validate();
    const RowEstimates rows = canonical_order(unordered);
    const auto p = rows.rows();
    if (p < 2) throw InsufficientDataError("Gap Bootstrap I needs p >= 2 rows");
    if (p < 5) {
        warn("Gap Bootstrap I with p = " + std::to_string(p) +
             " rows: the cross-covariance rests on only " + std::to_string(p * (p - 1)) +
             " ordered pairs");
    }
    const auto r = rows.estimates.front().size();
    const Matrix& first = rows.row_variances.front();
    Matrix shift = Matrix::Zero(r, r);
    for (const auto& s : rows.row_variances) shift += s - first;
    const double pd = static_cast<double>(p);
    const Matrix sigma_bar = first + shift / pd;
    const Matrix diff = pairwise_difference_variance(rows.estimates);

    // p^-2 [sum_j Sigma_j + sum_{j != k} (Sigma_j + Sigma_k - diff)/2]
    // collapses to the mean row variance minus (p-1)/(2p) diff.
    return VarianceEstimate::from_matrix(symmetrize(sigma_bar - ((pd - 1.0) / (2.0 * pd)) * diff));
}

VarianceEstimate gap_bootstrap_one(const DataArray& array, const EstimatorSpec& est,
                                   const BootstrapConfig& cfg) {
    return gb1_variance(bootstrap_rows(array, est, cfg));
}

}  // namespace gapboot
