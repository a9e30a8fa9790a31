#include "gapboot/models.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gapboot/errors.hpp"
#include "gapboot/parallel.hpp"
#include "gapboot/random.hpp"

namespace gapboot {

namespace {

constexpr std::uint64_t phi_seed = 0x5eed'f1f2'2011ULL;

Matrix toeplitz_covariance(double rho) {
    Matrix s(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) s(i, j) = std::pow(-rho, std::abs(i - j));
    }
    return s;
}

Matrix lower_with_random_entries(const Eigen::Vector4d& diagonal, double scale, std::uint64_t which) {
    CounterRng rng(derive_key(phi_seed, {which}));
    Matrix out = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        out(i, i) = diagonal(i);
        for (int j = 0; j < i; ++j) out(i, j) = uniform01(rng);
    }
    return scale * out;
}

class InnovationSource {
public:
    InnovationSource(Innovation kind, std::uint64_t key) : kind_(kind), rng_(key) {}

    double operator()() {
        if (kind_ == Innovation::normal) return normal_(rng_);
        return exponential_(rng_) - 1.0;
    }

private:
    Innovation kind_;
    CounterRng rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::exponential_distribution<double> exponential_{1.0};
};

double periodic_mean(double mu, std::size_t t, std::size_t p) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(p);
    return mu + std::cos(angle) + std::sin(angle);
}

}  // namespace

std::string_view to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::ar2: return "ar2";
        case ModelFamily::ma2: return "ma2";
        case ModelFamily::periodic: return "periodic";
        case ModelFamily::mar: return "mar";
        case ModelFamily::mma: return "mma";
        case ModelFamily::mperiodic: return "mperiodic";
    }
    return "?";
}

std::string_view to_string(Innovation i) {
    return i == Innovation::normal ? "normal" : "exponential";
}

std::string_view to_string(CovarianceChoice c) {
    return c == CovarianceChoice::identity ? "identity" : "toeplitz";
}

std::optional<ModelFamily> parse_model_family(std::string_view s) {
    for (auto f : {ModelFamily::ar2, ModelFamily::ma2, ModelFamily::periodic, ModelFamily::mar,
                   ModelFamily::mma, ModelFamily::mperiodic}) {
        if (s == to_string(f)) return f;
    }
    return std::nullopt;
}

std::optional<Innovation> parse_innovation(std::string_view s) {
    if (s == "normal") return Innovation::normal;
    if (s == "exponential" || s == "centered_exponential") return Innovation::centered_exponential;
    return std::nullopt;
}

std::optional<CovarianceChoice> parse_covariance_choice(std::string_view s) {
    if (s == "identity") return CovarianceChoice::identity;
    if (s == "toeplitz") return CovarianceChoice::toeplitz;
    return std::nullopt;
}

bool is_multivariate(ModelFamily f) {
    return f == ModelFamily::mar || f == ModelFamily::mma || f == ModelFamily::mperiodic;
}

Matrix ModelSpec::innovation_covariance() const {
    if (covariance == CovarianceChoice::identity) return Matrix::Identity(4, 4);
    return toeplitz_covariance(rho);
}

void ModelSpec::validate() const {
    if (p == 0 || n == 0) throw DimensionError("model needs n >= 1 and p >= 1");
    if (n % p != 0) {
        throw DimensionError("n = " + std::to_string(n) + " is not a multiple of p = " + std::to_string(p));
    }
    if (n / p < 2) throw DimensionError("model needs at least two periods");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("innovation scale must be finite and >= 0");
    if (family == ModelFamily::ar2) {
        // Roots of 1 - a1 z - a2 z^2 outside the unit circle.
        if (!(alpha1 + alpha2 < 1.0 && alpha2 - alpha1 < 1.0 && std::abs(alpha2) < 1.0)) {
            throw DomainError("AR(2) coefficients are not stationary");
        }
    }
    if (!is_multivariate(family)) return;
    if (mean_vector.size() != 4) throw DimensionError("multivariate mean must have 4 components");
    if (covariance == CovarianceChoice::toeplitz && !(std::abs(rho) < 1.0)) {
        throw DomainError("Toeplitz innovation covariance needs |rho| < 1");
    }
    if (family == ModelFamily::mar) {
        if (psi.rows() != 4 || psi.cols() != 4) throw DimensionError("Psi must be 4 x 4");
        const double radius = Eigen::EigenSolver<Matrix>(psi, false).eigenvalues().cwiseAbs().maxCoeff();
        if (!(radius < 1.0)) throw DomainError("VAR(1) coefficient matrix is not stationary");
    }
    if (family == ModelFamily::mma) {
        if (phi1.rows() != 4 || phi1.cols() != 4 || phi2.rows() != 4 || phi2.cols() != 4) {
            throw DimensionError("MA coefficient matrices must be 4 x 4");
        }
    }
}

Matrix preset_phi1() { return lower_with_random_entries({1.0, 2.0, 2.0, 2.0}, 1.0, 1); }

Matrix preset_phi2() { return lower_with_random_entries({1.0, 1.0, 1.0, 1.0}, 0.125, 2); }

ModelSpec model_preset(ModelFamily family, Innovation innovation, std::size_t n, std::size_t p,
                       CovarianceChoice covariance) {
    ModelSpec s;
    s.family = family;
    s.innovation = innovation;
    s.n = n;
    s.p = p;
    s.gap_q = 500;
    s.covariance = covariance;
    s.sigma = innovation == Innovation::normal ? 0.04 : 0.2;
    switch (family) {
        case ModelFamily::ar2:
        case ModelFamily::ma2: s.mu = 0.1; break;
        case ModelFamily::periodic: s.mu = 1.0; break;
        case ModelFamily::mar:
            s.psi.resize(4, 4);
            s.psi << 0.5, 0, 0, 0,
                     0.1, 0.6, 0, 0,
                     0, 0, -0.2, 0,
                     0, 0.1, 0, 0.4;
            break;
        case ModelFamily::mma:
            s.phi1 = preset_phi1();
            s.phi2 = preset_phi2();
            break;
        case ModelFamily::mperiodic: break;
    }
    if (is_multivariate(family)) {
        s.mean_vector = Eigen::Vector4d(0.2, 0.3, 0.4, 0.5);
        s.sigma = 1.0;
    }
    s.validate();
    return s;
}

DataArray generate_series(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t p = spec.p;
    const std::size_t m = spec.periods();
    const std::size_t stride = p + spec.gap_q;
    const std::size_t parent_len = (m - 1) * stride + p;
    const std::size_t total = spec.burn_in + parent_len;
    const Eigen::Index d = spec.dim();
    InnovationSource draw(spec.innovation, derive_key(seed, {0}));

    Matrix parent(d, static_cast<Eigen::Index>(parent_len));
    if (!is_multivariate(spec.family)) {
        double y1 = 0.0, y2 = 0.0, w1 = 0.0, w2 = 0.0;
        for (std::size_t s = 0; s < total; ++s) {
            const double w = spec.sigma * draw();
            double y = w;
            if (spec.family == ModelFamily::ar2) y = spec.alpha1 * y1 + spec.alpha2 * y2 + w;
            if (spec.family == ModelFamily::ma2) y = spec.beta1 * w1 + spec.beta2 * w2 + w;
            y2 = y1;
            y1 = y;
            w2 = w1;
            w1 = w;
            if (s >= spec.burn_in) parent(0, static_cast<Eigen::Index>(s - spec.burn_in)) = y;
        }
    } else {
        const Matrix chol = spec.innovation_covariance().llt().matrixL();
        const Matrix scaled = spec.sigma * chol;
        Eigen::Vector4d z = Eigen::Vector4d::Zero(), e1 = Eigen::Vector4d::Zero(), e2 = Eigen::Vector4d::Zero();
        Eigen::Vector4d raw;
        for (std::size_t s = 0; s < total; ++s) {
            for (int c = 0; c < 4; ++c) raw(c) = draw();
            const Eigen::Vector4d e = scaled * raw;
            switch (spec.family) {
                case ModelFamily::mar: z = spec.psi * z + e; break;
                case ModelFamily::mma: z = spec.phi1 * e1 + spec.phi2 * e2 + e; break;
                default: z = e; break;
            }
            e2 = e1;
            e1 = e;
            if (s >= spec.burn_in) parent.col(static_cast<Eigen::Index>(s - spec.burn_in)) = z;
        }
    }

    Matrix series(d, static_cast<Eigen::Index>(spec.n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const auto t = static_cast<Eigen::Index>(i * p + j);
            series.col(t) = parent.col(static_cast<Eigen::Index>(i * stride + j));
            switch (spec.family) {
                case ModelFamily::ar2:
                case ModelFamily::ma2: series(0, t) += spec.mu; break;
                case ModelFamily::periodic: series(0, t) += periodic_mean(spec.mu, i * p + j + 1, p); break;
                case ModelFamily::mar:
                case ModelFamily::mma: series.col(t) += spec.mean_vector; break;
                case ModelFamily::mperiodic:
                    series.col(t).array() += spec.mean_vector.array() + (periodic_mean(0.0, i * p + j + 1, p));
                    break;
            }
        }
    }
    return DataArray(std::move(series), p, m, spec.gap_q);
}

EstimatorSpec study_estimator(const ModelSpec& spec) {
    if (is_multivariate(spec.family)) return mean_of_component_means(4);
    return sample_mean(1);
}

Vector monte_carlo_true_se(const ModelSpec& spec, const EstimatorSpec& est, std::size_t runs,
                           std::uint64_t seed) {
    if (runs < 100) throw DomainError("Monte Carlo standard error needs at least 100 runs, got " + std::to_string(runs));
    spec.validate();
    Matrix estimates(est.dim(), static_cast<Eigen::Index>(runs));
    parallel_for(runs, [&](std::size_t k) {
        const DataArray data = generate_series(spec, derive_key(seed, {k}));
        estimates.col(static_cast<Eigen::Index>(k)) = est.evaluate(data.series(), {"Monte Carlo run", static_cast<long>(k)});
    });
    const Vector mean = estimates.rowwise().mean();
    const Matrix centred = estimates.colwise() - mean;
    return (centred.rowwise().squaredNorm() / static_cast<double>(runs - 1)).cwiseSqrt();
}

}  // namespace gapboot
