#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gapboot/data_array.hpp"
#include "gapboot/estimator.hpp"
#include "gapboot/types.hpp"

namespace gapboot {

/// Ramps on the linear freeway segment and free split proportions p_ij, i <= j <= 6.
inline constexpr int od_ramps = 7;
inline constexpr int od_params = 21;

/// One five-minute interval: day and slot labels (1-based, positional) and ramp volumes.
struct ODRecord {
    std::size_t day = 0;
    std::size_t slot = 0;
    std::array<double, od_ramps> origins{};
    std::array<double, od_ramps> destinations{};
};

/// Complete day-major, slot-minor volume records.
class ODDataset {
public:
    /// Throws DimensionError when the record count is not a multiple of
    /// `slots` or labels do not cycle 1..S within each day, and DataError on
    /// negative or non-finite volumes.
    ODDataset(std::vector<ODRecord> records, std::size_t slots);

    std::size_t slots() const noexcept { return slots_; }
    std::size_t days() const noexcept { return records_.size() / slots_; }
    std::size_t size() const noexcept { return records_.size(); }
    const std::vector<ODRecord>& records() const noexcept { return records_; }
    const ODRecord& at(std::size_t day, std::size_t slot) const { return records_[day * slots_ + slot]; }

    /// Record positions of slot j (0-based): {j, j + S, j + 2S, ...}.
    std::vector<std::size_t> slot_set(std::size_t j) const;
    /// Every record position, the union of all slot sets.
    std::vector<std::size_t> all_records() const;

    /// 14 x n observations (origins then destinations) arranged as S rows by D periods.
    DataArray as_array() const;

private:
    std::vector<ODRecord> records_;
    std::size_t slots_;
};

/// Position of p_ki (0-based, i >= k, both < 6) in the 21-vector.
int od_param_index(int k, int i);
/// Label such as "p11" for parameter a.
std::string od_param_name(int a);

/// The stacked design O_t (7 x 21) and response D_t for one interval.  The last
/// response entry is d_7 minus the total origin volume.
std::pair<Matrix, Vector> build_design(std::span<const double> origins, std::span<const double> destinations);

/// Sufficient statistics of the least-squares problem over a set of intervals:
/// M = sum o o' over origins 1..6 and N(k,i) = sum o_k (D_i - D_7).
struct ODMoments {
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> n = Eigen::Matrix<double, 6, 6>::Zero();

    void add(std::span<const double> origins, std::span<const double> destinations);
    ODMoments& operator+=(const ODMoments& other);
    /// Gamma = sum O_t'O_t, whose entry for (p_ki, p_k'i') is M(k,k') (1 + [i = i']).
    Matrix gamma() const;
    /// sum O_t'D_t.
    Vector rhs() const;
};

struct LsFit {
    Vector theta;
    Matrix gamma;
    /// Reciprocal of the LDLT condition estimate of Gamma (plus ridge).
    double condition = 0.0;
};

/// Solves Gamma theta = sum O'D through an LDLT factorisation.  Throws
/// RankError naming `label` when the condition estimate exceeds 1e12.
LsFit solve_moments(const ODMoments& moments, const std::string& label, double ridge = 0.0);

LsFit ls_estimate(const ODDataset& data, std::span<const std::size_t> positions,
                  const std::string& label = "slot set", double ridge = 0.0);

/// The least-squares split estimator on 14-component observations, for use
/// with the generic row and window machinery.
EstimatorSpec od_estimator(double ridge = 0.0);

/// W_j = Gamma_0^-1 Gamma_j.  Throws ConsistencyError when the Gamma_j do not
/// add up to Gamma_0 (1e-8 relative) or the W_j do not add up to the identity.
std::vector<Matrix> od_weights(const Matrix& gamma_full, std::span<const Matrix> gammas);

struct SplitMatrix {
    Matrix p;  ///< 7 x 7, upper triangular, rows summing to one.
    bool feasible = true;
    /// (row, column) pairs, 0-based, whose value falls outside [0, 1].
    std::vector<std::pair<int, int>> out_of_range;
};

SplitMatrix recover_split_matrix(const Vector& theta);

/// The published point estimates, used as the surrogate truth.
Vector reference_split_theta();

/// Synthetic volumes for a freeway with known split proportions.
///
/// Each origin ramp has a lognormal day level, shared by every slot of the
/// day and following AR(1) across days with coefficient day_phi, times a mild
/// within-day profile and small interval noise.  Destination errors combine
/// a slot term and a per-ramp day term shared across slots, each AR(1) across
/// days with day_phi, both
/// scaled by the square root of the expected volume.  noise_scale = 0 gives
/// exact destinations.
struct SurrogateConfig {
    std::size_t days = 575;
    std::size_t slots = 36;
    Vector theta = reference_split_theta();
    double day_phi = 0.0;
    /// Relative swing of the within-day volume profile across slots.
    double profile_amplitude = 0.0;
    double origin_day_sd = 0.4;
    double origin_interval_sd = 0.05;
    double noise_scale = 1.0;
    double day_error_sd = 2.0;
    std::uint64_t seed = 0;
};

ODDataset generate_od_surrogate(const SurrogateConfig& cfg);

}  // namespace gapboot
