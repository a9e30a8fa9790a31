#include "gapboot/iid_bootstrap.hpp"

#include <string>

#include "gapboot/errors.hpp"
#include "gapboot/parallel.hpp"
#include "gapboot/random.hpp"

namespace gapboot {

namespace {

std::uint64_t resample_count(std::size_t m) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < m; ++i) {
        total *= m;
        if (total > BootstrapConfig::max_exhaustive) return BootstrapConfig::max_exhaustive + 1;
    }
    return total;
}

constexpr std::size_t kChunk = 256;

}  // namespace

Matrix replicate_covariance(const Matrix& replicates) {
    const auto count = replicates.cols();
    if (count == 0) throw InsufficientDataError("no replicates to summarize");
    // Extended-precision accumulation keeps small exhaustive cases on the correctly rounded value.
    using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const Wide wide = replicates.cast<long double>();
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> mean = wide.rowwise().sum() / static_cast<long double>(count);
    const Wide centered = wide.colwise() - mean;
    const Wide cov = (centered * centered.transpose()) / static_cast<long double>(count);
    return cov.cast<double>();
}

Matrix iid_bootstrap_replicates(const ObsView& row, const EstimatorSpec& est,
                                const BootstrapConfig& cfg, std::uint64_t stream) {
    const auto m = static_cast<std::size_t>(row.cols());
    if (m < 2) {
        throw InsufficientDataError("i.i.d. bootstrap needs a row of length m >= 2, got " +
                                    std::to_string(m));
    }
    const auto d = row.rows();
    const auto r = est.dim();

    if (cfg.mode == BootstrapMode::exhaustive) {
        const auto total = resample_count(m);
        if (total > BootstrapConfig::max_exhaustive) {
            throw DomainError("exhaustive bootstrap needs m^m <= 1e6; m = " + std::to_string(m) +
                              " is too large");
        }
        Matrix reps(r, static_cast<Eigen::Index>(total));
        const std::size_t chunks = (total + kChunk - 1) / kChunk;
        parallel_for(chunks, [&](std::size_t c) {
            Matrix buffer(d, static_cast<Eigen::Index>(m));
            std::vector<std::size_t> idx(m);
            const std::uint64_t begin = c * kChunk;
            const std::uint64_t end = std::min<std::uint64_t>(total, begin + kChunk);
            // Decode the starting odometer position, least significant digit last.
            std::uint64_t code = begin;
            for (std::size_t pos = m; pos-- > 0;) {
                idx[pos] = code % m;
                code /= m;
            }
            for (std::uint64_t b = begin; b < end; ++b) {
                for (std::size_t i = 0; i < m; ++i) buffer.col(static_cast<Eigen::Index>(i)) = row.col(static_cast<Eigen::Index>(idx[i]));
                reps.col(static_cast<Eigen::Index>(b)) = est.evaluate(buffer, {"exhaustive resample", static_cast<long>(b)});
                for (std::size_t pos = m; pos-- > 0;) {
                    if (++idx[pos] < m) break;
                    idx[pos] = 0;
                }
            }
        });
        return reps;
    }

    if (cfg.replicates < 2) throw DomainError("bootstrap needs B >= 2 replicates");
    const auto total = cfg.replicates;
    Matrix reps(r, static_cast<Eigen::Index>(total));
    const std::size_t chunks = (total + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        Matrix buffer(d, static_cast<Eigen::Index>(m));
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(total, begin + kChunk);
        for (std::size_t b = begin; b < end; ++b) {
            CounterRng rng(derive_key(cfg.seed, {stream, b}));
            for (std::size_t i = 0; i < m; ++i) {
                buffer.col(static_cast<Eigen::Index>(i)) = row.col(static_cast<Eigen::Index>(uniform_index(rng, m)));
            }
            reps.col(static_cast<Eigen::Index>(b)) = est.evaluate(buffer, {"bootstrap replicate", static_cast<long>(b)});
        }
    });
    return reps;
}

VarianceEstimate iid_bootstrap_variance(const ObsView& row, const EstimatorSpec& est,
                                        const BootstrapConfig& cfg, std::uint64_t stream) {
    return VarianceEstimate::from_matrix(replicate_covariance(iid_bootstrap_replicates(row, est, cfg, stream)));
}

}  // namespace gapboot
