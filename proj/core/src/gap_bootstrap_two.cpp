#include "gapboot/gap_bootstrap_two.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gapboot/errors.hpp"
#include "gapboot/parallel.hpp"

namespace gapboot {

namespace {

// A centred sequence whose mean square is at round-off level relative to the
// magnitudes involved counts as constant.
bool negligible_spread(double mean_square, double scale) {
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
    return !(mean_square > tol * tol);
}

double magnitude(const SubseriesEstimates& sub, std::size_t j) {
    return std::max(sub.full_estimate.cwiseAbs().maxCoeff(), sub.by_row[j].cwiseAbs().maxCoeff());
}

Matrix centered(const SubseriesEstimates& sub, std::size_t j) {
    return sub.by_row[j].colwise() - sub.full_estimate;
}

struct InverseRoot {
    Matrix value;
    bool degenerate = false;
};

InverseRoot inverse_root_of_moment(const Matrix& z, double scale) {
    const double windows = static_cast<double>(z.cols());
    const Matrix a = symmetrize(z * z.transpose() / windows);
    InverseRoot out;
    double largest = 0.0;
    if (a.rows() == 1) {
        largest = a(0, 0);
    } else {
        largest = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    }
    if (negligible_spread(largest, scale)) {
        out.degenerate = true;
        return out;
    }
    out.value = sym_inverse_sqrt(a, 1e-12 * largest);
    return out;
}

}  // namespace

void SubseriesEstimates::validate() const {
    if (by_row.empty()) throw InsufficientDataError("subseries estimates hold no rows");
    const auto r = full_estimate.size();
    const auto windows_count = by_row.front().cols();
    if (windows_count < 1) throw InsufficientDataError("subseries estimates hold no windows");
    for (std::size_t j = 0; j < by_row.size(); ++j) {
        if (by_row[j].rows() != r || by_row[j].cols() != windows_count) {
            throw DimensionError("subseries row " + std::to_string(j) + " has inconsistent shape");
        }
    }
}

std::size_t default_block_length(std::size_t periods, double c) {
    if (periods < 8) {
        throw InsufficientDataError("default block length needs m >= 8 periods, got " +
                                    std::to_string(periods));
    }
    if (!(c > 0.0)) throw DomainError("block-length constant c must be positive");
    const double raw = std::round(c * std::cbrt(static_cast<double>(periods)));
    const double clamped = std::clamp(raw, 2.0, static_cast<double>(periods - 1));
    return static_cast<std::size_t>(clamped);
}

SubseriesEstimates subseries_estimates(const DataArray& array, const EstimatorSpec& est,
                                       std::size_t ell) {
    const auto m = array.periods();
    if (ell <= 1 || ell >= m) {
        throw BoundsError("window length must satisfy 1 < ell < m = " + std::to_string(m) +
                          ", got " + std::to_string(ell));
    }
    const auto p = array.slots();
    const auto windows = m - ell + 1;
    SubseriesEstimates out;
    out.ell = ell;
    out.full_estimate = est.evaluate(array.series(), {"full data"});
    out.by_row.assign(p, Matrix(est.dim(), static_cast<Eigen::Index>(windows)));
    parallel_for(windows, [&](std::size_t i) {
        for (std::size_t j = 0; j < p; ++j) {
            out.by_row[j].col(static_cast<Eigen::Index>(i)) =
                est.evaluate(array.row_window(j, i, ell), {"window", static_cast<long>(i), static_cast<long>(j)});
        }
    });
    return out;
}

double sampling_window_correlation(const SubseriesEstimates& sub, std::size_t j, std::size_t k,
                                   Eigen::Index comp_j, Eigen::Index comp_k) {
    sub.validate();
    if (j >= sub.rows() || k >= sub.rows()) throw BoundsError("correlation row index out of range");
    if (comp_j < 0 || comp_j >= sub.dim() || comp_k < 0 || comp_k >= sub.dim()) {
        throw BoundsError("correlation component index out of range");
    }
    const double windows = static_cast<double>(sub.windows());
    const Eigen::ArrayXd a = sub.by_row[j].row(comp_j).array() - sub.full_estimate(comp_j);
    const Eigen::ArrayXd b = sub.by_row[k].row(comp_k).array() - sub.full_estimate(comp_k);
    const double saa = a.square().sum() / windows;
    const double sbb = b.square().sum() / windows;
    if (negligible_spread(saa, magnitude(sub, j))) {
        throw DegenerateCorrelationError("row " + std::to_string(j) +
                                             ": window estimates do not vary around the full-data estimate",
                                         j);
    }
    if (negligible_spread(sbb, magnitude(sub, k))) {
        throw DegenerateCorrelationError("row " + std::to_string(k) +
                                             ": window estimates do not vary around the full-data estimate",
                                         k);
    }
    if (j == k && comp_j == comp_k) return 1.0;
    const double sab = (a * b).sum() / windows;
    return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

Matrix correlation_matrix(const SubseriesEstimates& sub, std::size_t j, std::size_t k) {
    sub.validate();
    if (j >= sub.rows() || k >= sub.rows()) throw BoundsError("correlation row index out of range");
    const Matrix zj = centered(sub, j);
    const Matrix zk = centered(sub, k);
    const auto rj = inverse_root_of_moment(zj, magnitude(sub, j));
    if (rj.degenerate) {
        throw DegenerateCorrelationError("row " + std::to_string(j) + ": degenerate window second moment", j);
    }
    const auto rk = j == k ? rj : inverse_root_of_moment(zk, magnitude(sub, k));
    if (rk.degenerate) {
        throw DegenerateCorrelationError("row " + std::to_string(k) + ": degenerate window second moment", k);
    }
    const Matrix cross = zj * zk.transpose() / static_cast<double>(sub.windows());
    return rj.value * cross * rk.value;
}

VarianceEstimate gb2_variance(std::span<const Matrix> row_variances, const SubseriesEstimates& sub,
                              std::span<const double> weights, DegeneratePolicy policy) {
    sub.validate();
    const auto p = sub.rows();
    const auto r = sub.dim();
    if (row_variances.size() != p || weights.size() != p) {
        throw DimensionError("Gap Bootstrap II needs one row variance and one weight per row (p = " +
                             std::to_string(p) + ")");
    }
    check_weights(weights);
    for (std::size_t j = 0; j < p; ++j) {
        if (row_variances[j].rows() != r || row_variances[j].cols() != r) {
            throw DimensionError("row variance " + std::to_string(j) + " is not r x r");
        }
    }

    std::vector<Matrix> roots(p);
    std::vector<InverseRoot> inverse_roots(p);
    std::vector<Matrix> z(p);
    parallel_for(p, [&](std::size_t j) {
        roots[j] = sym_sqrt(symmetrize(row_variances[j]));
        z[j] = centered(sub, j);
        inverse_roots[j] = inverse_root_of_moment(z[j], magnitude(sub, j));
    });
    if (policy == DegeneratePolicy::error && p > 1) {
        for (std::size_t j = 0; j < p; ++j) {
            if (inverse_roots[j].degenerate) {
                throw DegenerateCorrelationError(
                    "row " + std::to_string(j) + ": window estimates do not vary around the full-data estimate", j);
            }
        }
    }

    // Whitened window deviations: R(j,k) = (A_j^-1/2 Z_j)(A_k^-1/2 Z_k)' / I.
    std::vector<Matrix> whitened(p);
    for (std::size_t j = 0; j < p; ++j) {
        if (!inverse_roots[j].degenerate) whitened[j] = inverse_roots[j].value * z[j];
    }
    const double windows = static_cast<double>(sub.windows());

    Matrix total = Matrix::Zero(r, r);
    for (std::size_t j = 0; j < p; ++j) {
        total += weights[j] * weights[j] * row_variances[j];
        if (inverse_roots[j].degenerate) continue;
        for (std::size_t k = j + 1; k < p; ++k) {
            if (inverse_roots[k].degenerate) continue;
            const Matrix corr = whitened[j] * whitened[k].transpose() / windows;
            const Matrix term = weights[j] * weights[k] * (roots[j] * corr * roots[k]);
            total += term + term.transpose();
        }
    }
    return VarianceEstimate::from_matrix(symmetrize(total));
}

VarianceEstimate gap_bootstrap_two(const DataArray& array, const EstimatorSpec& est,
                                   const RowEstimates& rows, const GapBootstrapTwoOptions& opts) {
    const auto ell = opts.ell == 0 ? default_block_length(array.periods()) : opts.ell;
    const auto sub = subseries_estimates(array, est, ell);
    const auto weights = est.weights_for(array.slots());
    return gb2_variance(rows.row_variances, sub, weights, opts.policy);
}

VarianceEstimate gap_bootstrap_two(const DataArray& array, const EstimatorSpec& est,
                                   const GapBootstrapTwoOptions& opts) {
    return gap_bootstrap_two(array, est, bootstrap_rows(array, est, opts.bootstrap), opts);
}

}  // namespace gapboot
