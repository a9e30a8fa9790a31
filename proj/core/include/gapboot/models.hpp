#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "gapboot/data_array.hpp"
#include "gapboot/estimator.hpp"
#include "gapboot/types.hpp"

namespace gapboot {

enum class ModelFamily { ar2, ma2, periodic, mar, mma, mperiodic };
enum class Innovation { normal, centered_exponential };
/// Innovation covariance for the four-dimensional families: the identity or
/// the Toeplitz matrix with entries (-rho)^|i-j|.
enum class CovarianceChoice { identity, toeplitz };

std::string_view to_string(ModelFamily f);
std::string_view to_string(Innovation i);
std::string_view to_string(CovarianceChoice c);
std::optional<ModelFamily> parse_model_family(std::string_view s);
std::optional<Innovation> parse_innovation(std::string_view s);
std::optional<CovarianceChoice> parse_covariance_choice(std::string_view s);

bool is_multivariate(ModelFamily f);

/// A fully specified data-generating process plus the sampling design (n, p, gap).
struct ModelSpec {
    ModelFamily family = ModelFamily::ar2;
    Innovation innovation = Innovation::normal;
    std::size_t n = 200;
    std::size_t p = 5;
    /// Unobserved parent steps between consecutive periods.
    std::size_t gap_q = 0;
    std::size_t burn_in = 500;

    // Univariate parameters.
    double mu = 0.1;
    double sigma = 0.2;
    double alpha1 = 0.8;
    double alpha2 = 0.1;
    double beta1 = 0.3;
    double beta2 = 0.5;

    // Four-dimensional parameters.
    Vector mean_vector;
    Matrix psi;
    Matrix phi1;
    Matrix phi2;
    CovarianceChoice covariance = CovarianceChoice::toeplitz;
    double rho = 0.55;

    std::size_t periods() const { return p == 0 ? 0 : n / p; }
    Eigen::Index dim() const { return is_multivariate(family) ? 4 : 1; }
    Matrix innovation_covariance() const;

    /// Throws DimensionError (n not a multiple of p, bad matrix shapes) or
    /// DomainError (non-stationary autoregression, negative scale).
    void validate() const;
};

/// Named presets with the published coefficient values.
///
/// Two calibration choices are baked in (see README): periods are separated
/// by a gap of 500 unobserved steps, and for the univariate families the
/// normal innovations are scaled by sigma^2 = 0.04 while the centred
/// exponential ones are scaled by sigma = 0.2.  Together these reproduce the
/// published Monte Carlo standard errors.  The starred entries of Phi1 and
/// Phi2 come from a fixed seed and never change.
ModelSpec model_preset(ModelFamily family, Innovation innovation, std::size_t n, std::size_t p,
                       CovarianceChoice covariance = CovarianceChoice::toeplitz);

/// The two MA coefficient matrices with their Uniform(0,1) entries filled in.
Matrix preset_phi1();
Matrix preset_phi2();

/// Simulates one p x (n/p) array.  Observation t of the array is parent step
/// floor(t/p)*(p + gap_q) + t mod p, after burn_in discarded steps.
DataArray generate_series(const ModelSpec& spec, std::uint64_t seed);

/// The estimator used in studies: the sample mean for univariate families,
/// the mean of component means otherwise.
EstimatorSpec study_estimator(const ModelSpec& spec);

/// Componentwise sample standard deviation (divisor R - 1) of theta_hat over
/// R independent simulated arrays; run k uses derive_key(seed, {k}).
Vector monte_carlo_true_se(const ModelSpec& spec, const EstimatorSpec& est, std::size_t runs,
                           std::uint64_t seed);

}  // namespace gapboot
