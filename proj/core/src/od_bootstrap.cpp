#include "gapboot/od_bootstrap.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gapboot/errors.hpp"
#include "gapboot/gap_bootstrap_one.hpp"
#include "gapboot/parallel.hpp"

namespace gapboot {

namespace {

double roundoff(double scale) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300); }

std::vector<Matrix> slot_gammas(const ODDataset& data) {
    std::vector<Matrix> out(data.slots());
    parallel_for(data.slots(), [&](std::size_t j) {
        ODMoments mom;
        for (auto t : data.slot_set(j)) mom.add(data.records()[t].origins, data.records()[t].destinations);
        out[j] = mom.gamma();
    });
    return out;
}

}  // namespace

double projected_gb2_variance(const Vector& row_sd, const Matrix& projections, DegeneratePolicy policy,
                              double scale) {
    const auto slots = projections.rows();
    const double windows = static_cast<double>(projections.cols());
    const double tol = roundoff(scale);
    Eigen::VectorXd combined = Eigen::VectorXd::Zero(projections.cols());
    double isolated = 0.0;
    for (Eigen::Index k = 0; k < slots; ++k) {
        const double rms = std::sqrt(projections.row(k).squaredNorm() / windows);
        if (!(rms > tol)) {
            if (policy == DegeneratePolicy::error && row_sd(k) > tol) {
                throw DegenerateCorrelationError("slot " + std::to_string(k + 1) +
                                                     ": window estimates do not vary around the full-data estimate",
                                                 static_cast<std::size_t>(k));
            }
            isolated += row_sd(k) * row_sd(k);
            continue;
        }
        combined += (row_sd(k) / rms) * projections.row(k).transpose();
    }
    // sum_k sum_l s_k s_l rho(k,l) = I^-1 || sum_k s_k z_k / rms_k ||^2.
    return combined.squaredNorm() / windows + isolated;
}

ODAnalysis analyze_od(const ODDataset& data, const ODOptions& opts) {
    const auto days = data.days();
    const auto slots = data.slots();
    ODAnalysis out;
    out.ell = opts.ell == 0 ? default_block_length(days) : opts.ell;
    if (days < out.ell + 1) {
        throw InsufficientDataError("OD analysis needs more than ell = " + std::to_string(out.ell) + " days");
    }

    const auto full = ls_estimate(data, data.all_records(), "all records", opts.ridge);
    out.theta_hat = full.theta;
    out.condition = full.condition;
    const auto gammas = slot_gammas(data);
    out.weights = od_weights(full.gamma, gammas);

    const DataArray array = data.as_array();
    const EstimatorSpec est = od_estimator(opts.ridge);
    const RowEstimates rows = bootstrap_rows(array, est, opts.bootstrap);
    out.se_gb1 = gb1_variance(rows).standard_errors();

    const SubseriesEstimates sub = subseries_estimates(array, est, out.ell);
    const double scale = std::max(out.theta_hat.cwiseAbs().maxCoeff(), 1.0);
    out.se_gb2.resize(od_params);
    std::vector<Matrix> deviations(slots);
    for (std::size_t k = 0; k < slots; ++k) deviations[k] = sub.by_row[k].colwise() - sub.full_estimate;

    std::vector<double> variances(od_params);
    parallel_for(od_params, [&](std::size_t a) {
        Vector sd(static_cast<Eigen::Index>(slots));
        Matrix proj(static_cast<Eigen::Index>(slots), deviations.front().cols());
        for (std::size_t k = 0; k < slots; ++k) {
            const Vector w = out.weights[k].row(static_cast<Eigen::Index>(a)).transpose();
            sd(static_cast<Eigen::Index>(k)) = std::sqrt(std::max(0.0, w.dot(rows.row_variances[k] * w)));
            proj.row(static_cast<Eigen::Index>(k)) = w.transpose() * deviations[k];
        }
        variances[a] = projected_gb2_variance(sd, proj, opts.policy, scale);
    });
    for (int a = 0; a < od_params; ++a) out.se_gb2(a) = std::sqrt(std::max(0.0, variances[static_cast<std::size_t>(a)]));
    return out;
}

Vector od_gb2_standard_errors(const ODDataset& data, std::size_t ell, const BootstrapConfig& cfg,
                              DegeneratePolicy policy) {
    ODOptions opts;
    opts.ell = ell;
    opts.bootstrap = cfg;
    opts.policy = policy;
    return analyze_od(data, opts).se_gb2;
}

Vector od_gb1_standard_errors(const ODDataset& data, const BootstrapConfig& cfg) {
    const EstimatorSpec est = od_estimator();
    return gb1_variance(bootstrap_rows(data.as_array(), est, cfg)).standard_errors();
}

}  // namespace gapboot
