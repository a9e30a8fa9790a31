#include "gapboot/baselines.hpp"

#include <algorithm>
#include <string>

#include "gapboot/errors.hpp"
#include "gapboot/parallel.hpp"
#include "gapboot/random.hpp"

namespace gapboot {

namespace {

constexpr std::uint64_t block_bootstrap_stream = 0xb10c;

}  // namespace

VarianceEstimate subsampling_variance(const DataArray& array, const EstimatorSpec& est,
                                      std::size_t ell) {
    const auto m = array.periods();
    if (ell <= 1 || ell >= m) {
        throw BoundsError("window length must satisfy 1 < ell < m = " + std::to_string(m) +
                          ", got " + std::to_string(ell));
    }
    const auto windows = m - ell + 1;
    const Vector full = est.evaluate(array.series(), {"full data"});
    Matrix dev(est.dim(), static_cast<Eigen::Index>(windows));
    parallel_for(windows, [&](std::size_t i) {
        dev.col(static_cast<Eigen::Index>(i)) =
            est.evaluate(array.period_window(i, ell), {"window", static_cast<long>(i)}) - full;
    });
    const double scale = static_cast<double>(ell) / static_cast<double>(m);
    return VarianceEstimate::from_matrix(symmetrize(scale * dev * dev.transpose() /
                                                    static_cast<double>(windows)));
}

VarianceEstimate block_bootstrap_variance(const DataArray& array, const EstimatorSpec& est,
                                          std::size_t ell, const BootstrapConfig& cfg) {
    const auto m = array.periods();
    if (ell < 1 || ell >= m) {
        throw BoundsError("block length must satisfy 1 <= ell < m = " + std::to_string(m) +
                          ", got " + std::to_string(ell));
    }
    if (cfg.replicates < 2) throw DomainError("block bootstrap needs at least 2 replicates");
    const auto p = static_cast<Eigen::Index>(array.slots());
    const auto starts = m - ell + 1;
    const auto blocks = (m + ell - 1) / ell;
    const auto d = array.dim();
    const Matrix& series = array.series();

    Matrix replicates(est.dim(), static_cast<Eigen::Index>(cfg.replicates));
    parallel_for(cfg.replicates, [&](std::size_t b) {
        CounterRng rng(derive_key(cfg.seed, {block_bootstrap_stream, b}));
        Matrix pseudo(d, static_cast<Eigen::Index>(m) * p);
        Eigen::Index filled = 0;
        for (std::size_t k = 0; k < blocks; ++k) {
            const auto start = static_cast<Eigen::Index>(uniform_index(rng, starts));
            const auto take = std::min<Eigen::Index>(static_cast<Eigen::Index>(ell) * p, pseudo.cols() - filled);
            pseudo.middleCols(filled, take) = series.middleCols(start * p, take);
            filled += take;
        }
        replicates.col(static_cast<Eigen::Index>(b)) =
            est.evaluate(pseudo, {"block bootstrap replicate", static_cast<long>(b)});
    });
    return VarianceEstimate::from_matrix(replicate_covariance(replicates));
}

NaiveColumnResult naive_column_variance(const DataArray& array, const EstimatorSpec& est) {
    const auto m = array.periods();
    if (m < 2) throw InsufficientDataError("naive column variance needs m >= 2 periods");
    Matrix cols(est.dim(), static_cast<Eigen::Index>(m));
    parallel_for(m, [&](std::size_t i) {
        cols.col(static_cast<Eigen::Index>(i)) = est.evaluate(array.period(i), {"column", static_cast<long>(i)});
    });
    const Vector mean = cols.rowwise().mean();
    const Matrix centred = cols.colwise() - mean;
    const double md = static_cast<double>(m);
    const Matrix cov = centred * centred.transpose() / ((md - 1.0) * md);
    const Vector full = est.evaluate(array.series(), {"full data"});
    return {VarianceEstimate::from_matrix(symmetrize(cov)), full - mean};
}

}  // namespace gapboot
