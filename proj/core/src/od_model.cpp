#include "gapboot/od_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gapboot/errors.hpp"
#include "gapboot/random.hpp"

namespace gapboot {

namespace {

constexpr double max_condition = 1e12;

// Eigen's rcond() skips exactly zero pivots, so the pivot spread is checked as well.
double ldlt_condition(const Eigen::LDLT<Matrix>& ldlt) {
    if (ldlt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Vector d = ldlt.vectorD().cwiseAbs();
    const double rcond = std::min(ldlt.rcond(), d.minCoeff() / std::max(d.maxCoeff(), 1e-300));
    return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

void check_volumes(const std::array<double, od_ramps>& v, std::size_t position, const char* kind) {
    for (int i = 0; i < od_ramps; ++i) {
        if (!std::isfinite(v[i]) || v[i] < 0.0) {
            throw DataError("record " + std::to_string(position) + ": " + kind + " " + std::to_string(i + 1) +
                            " must be a finite nonnegative volume");
        }
    }
}

}  // namespace

ODDataset::ODDataset(std::vector<ODRecord> records, std::size_t slots)
    : records_(std::move(records)), slots_(slots) {
    if (slots_ == 0) throw DimensionError("OD data needs at least one slot per day");
    if (records_.empty() || records_.size() % slots_ != 0) {
        throw DimensionError("OD data holds " + std::to_string(records_.size()) +
                             " records, not a positive multiple of " + std::to_string(slots_) + " slots");
    }
    for (std::size_t t = 0; t < records_.size(); ++t) {
        const auto& r = records_[t];
        if (r.slot != t % slots_ + 1) {
            throw DimensionError("record " + std::to_string(t) + " has slot " + std::to_string(r.slot) +
                                 ", expected " + std::to_string(t % slots_ + 1));
        }
        if (t % slots_ != 0 && r.day != records_[t - 1].day) {
            throw DimensionError("record " + std::to_string(t) + " changes day label in the middle of a day");
        }
        check_volumes(r.origins, t, "origin");
        check_volumes(r.destinations, t, "destination");
    }
}

std::vector<std::size_t> ODDataset::slot_set(std::size_t j) const {
    if (j >= slots_) throw BoundsError("slot " + std::to_string(j) + " out of range");
    std::vector<std::size_t> out;
    out.reserve(days());
    for (std::size_t t = j; t < records_.size(); t += slots_) out.push_back(t);
    return out;
}

std::vector<std::size_t> ODDataset::all_records() const {
    std::vector<std::size_t> out(records_.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = t;
    return out;
}

DataArray ODDataset::as_array() const {
    Matrix series(2 * od_ramps, static_cast<Eigen::Index>(records_.size()));
    for (std::size_t t = 0; t < records_.size(); ++t) {
        for (int i = 0; i < od_ramps; ++i) {
            series(i, static_cast<Eigen::Index>(t)) = records_[t].origins[i];
            series(od_ramps + i, static_cast<Eigen::Index>(t)) = records_[t].destinations[i];
        }
    }
    return DataArray(std::move(series), slots_, days());
}

int od_param_index(int k, int i) {
    if (k < 0 || k > 5 || i < k || i > 5) throw BoundsError("no free split proportion at that position");
    // Block k starts after the widths 6, 5, ..., 6 - k + 1 of earlier blocks.
    return k * 6 - k * (k - 1) / 2 + (i - k);
}

std::string od_param_name(int a) {
    for (int k = 0; k < 6; ++k) {
        for (int i = k; i < 6; ++i) {
            if (od_param_index(k, i) == a) return "p" + std::to_string(k + 1) + std::to_string(i + 1);
        }
    }
    throw BoundsError("parameter index " + std::to_string(a) + " out of range");
}

std::pair<Matrix, Vector> build_design(std::span<const double> origins, std::span<const double> destinations) {
    if (origins.size() != od_ramps || destinations.size() != od_ramps) {
        throw DimensionError("an OD interval needs 7 origin and 7 destination volumes");
    }
    Matrix o = Matrix::Zero(od_ramps, od_params);
    for (int k = 0; k < 6; ++k) {
        for (int i = k; i < 6; ++i) {
            const int a = od_param_index(k, i);
            o(i, a) = origins[k];
            o(6, a) = -origins[k];
        }
    }
    Vector d(od_ramps);
    double total = 0.0;
    for (int i = 0; i < od_ramps; ++i) {
        if (!std::isfinite(origins[i]) || !std::isfinite(destinations[i])) {
            throw DataError("OD volumes must be finite");
        }
        total += origins[i];
        d(i) = destinations[i];
    }
    d(6) -= total;
    return {std::move(o), std::move(d)};
}

void ODMoments::add(std::span<const double> origins, std::span<const double> destinations) {
    double total = 0.0;
    for (int i = 0; i < od_ramps; ++i) total += origins[i];
    const double last = destinations[6] - total;
    for (int k = 0; k < 6; ++k) {
        const double ok = origins[k];
        for (int l = 0; l < 6; ++l) m(k, l) += ok * origins[l];
        for (int i = 0; i < 6; ++i) n(k, i) += ok * (destinations[i] - last);
    }
}

ODMoments& ODMoments::operator+=(const ODMoments& other) {
    m += other.m;
    n += other.n;
    return *this;
}

Matrix ODMoments::gamma() const {
    Matrix g(od_params, od_params);
    for (int k = 0; k < 6; ++k) {
        for (int i = k; i < 6; ++i) {
            const int a = od_param_index(k, i);
            for (int l = 0; l < 6; ++l) {
                for (int j = l; j < 6; ++j) g(a, od_param_index(l, j)) = m(k, l) * (i == j ? 2.0 : 1.0);
            }
        }
    }
    return g;
}

Vector ODMoments::rhs() const {
    Vector h(od_params);
    for (int k = 0; k < 6; ++k) {
        for (int i = k; i < 6; ++i) h(od_param_index(k, i)) = n(k, i);
    }
    return h;
}

LsFit solve_moments(const ODMoments& moments, const std::string& label, double ridge) {
    if (!(ridge >= 0.0)) throw DomainError("ridge must be nonnegative");
    LsFit fit;
    fit.gamma = moments.gamma();
    Matrix system = fit.gamma;
    system.diagonal().array() += ridge;
    Eigen::LDLT<Matrix> ldlt(system);
    fit.condition = ldlt_condition(ldlt);
    if (!(fit.condition <= max_condition) || !ldlt.isPositive()) {
        throw RankError("least-squares system for " + label + " is singular or ill-conditioned (condition " +
                        std::to_string(fit.condition) + ")");
    }
    fit.theta = ldlt.solve(moments.rhs());
    return fit;
}

LsFit ls_estimate(const ODDataset& data, std::span<const std::size_t> positions, const std::string& label,
                  double ridge) {
    ODMoments mom;
    for (auto t : positions) {
        if (t >= data.size()) throw BoundsError("record position " + std::to_string(t) + " out of range");
        const auto& r = data.records()[t];
        mom.add(r.origins, r.destinations);
    }
    return solve_moments(mom, label, ridge);
}

EstimatorSpec od_estimator(double ridge) {
    return EstimatorSpec("od least squares", od_params, [ridge](const ObsView& obs) -> Vector {
        if (obs.rows() != 2 * od_ramps) throw DimensionError("OD observations need 14 components");
        ODMoments mom;
        for (Eigen::Index t = 0; t < obs.cols(); ++t) {
            const double* col = obs.col(t).data();
            mom.add({col, od_ramps}, {col + od_ramps, od_ramps});
        }
        return solve_moments(mom, "subset", ridge).theta;
    });
}

std::vector<Matrix> od_weights(const Matrix& gamma_full, std::span<const Matrix> gammas) {
    if (gammas.empty()) throw DimensionError("od_weights needs at least one slot");
    const auto r = gamma_full.rows();
    Matrix sum = Matrix::Zero(r, gamma_full.cols());
    for (const auto& g : gammas) {
        if (g.rows() != r || g.cols() != gamma_full.cols()) throw DimensionError("Gamma shapes differ");
        sum += g;
    }
    const double scale = std::max(gamma_full.cwiseAbs().maxCoeff(), 1e-300);
    if ((sum - gamma_full).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw ConsistencyError("slot Gammas do not add up to the full-data Gamma; slot sets must partition the data");
    }
    Eigen::LDLT<Matrix> ldlt(gamma_full);
    if (!(ldlt_condition(ldlt) <= max_condition)) {
        throw RankError("full-data Gamma is singular or ill-conditioned");
    }
    std::vector<Matrix> out;
    out.reserve(gammas.size());
    Matrix total = Matrix::Zero(r, r);
    for (const auto& g : gammas) {
        out.push_back(ldlt.solve(g));
        total += out.back();
    }
    if ((total - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8) {
        throw ConsistencyError("weights W_j do not add up to the identity");
    }
    return out;
}

SplitMatrix recover_split_matrix(const Vector& theta) {
    if (theta.size() != od_params) throw DimensionError("split proportions need 21 parameters");
    SplitMatrix out;
    out.p = Matrix::Zero(od_ramps, od_ramps);
    for (int k = 0; k < 6; ++k) {
        double row = 0.0;
        for (int i = k; i < 6; ++i) {
            out.p(k, i) = theta(od_param_index(k, i));
            row += out.p(k, i);
        }
        out.p(k, 6) = 1.0 - row;
    }
    out.p(6, 6) = 1.0;
    for (int k = 0; k < od_ramps; ++k) {
        for (int i = k; i < od_ramps; ++i) {
            const double v = out.p(k, i);
            if (!(v >= 0.0 && v <= 1.0)) out.out_of_range.emplace_back(k, i);
        }
    }
    out.feasible = out.out_of_range.empty();
    return out;
}

Vector reference_split_theta() {
    Vector t(od_params);
    t << 0.355, 0.104, 0.011, 0.064, 0.047, 0.022,
         0.385, 0.083, 0.242, 0.112, 0.064,
         0.046, 0.232, 0.106, 0.039,
         0.436, 0.240, 0.105,
         0.233, 0.109,
         0.537;
    return t;
}

ODDataset generate_od_surrogate(const SurrogateConfig& cfg) {
    if (cfg.days < 2 || cfg.slots < 1) throw DimensionError("surrogate needs at least 2 days and 1 slot");
    if (!(std::abs(cfg.day_phi) < 1.0)) throw DomainError("day AR(1) coefficient must satisfy |phi| < 1");
    if (cfg.theta.size() != od_params) throw DimensionError("surrogate truth needs 21 parameters");
    const Matrix split = recover_split_matrix(cfg.theta).p;

    static constexpr std::array<double, od_ramps> base{420.0, 160.0, 130.0, 210.0, 110.0, 150.0, 90.0};
    CounterRng rng(derive_key(cfg.seed, {0x0d}));
    std::normal_distribution<double> normal;
    const double innovation = std::sqrt(1.0 - cfg.day_phi * cfg.day_phi);

    // Day-level states per ramp, shared by every slot of the day.
    std::array<double, od_ramps> origin_level{};
    std::array<double, od_ramps> day_error{};
    for (auto& g : origin_level) g = normal(rng);
    for (auto& u : day_error) u = normal(rng);
    // Slot-specific destination errors, persistent from one day to the next.
    std::vector<std::array<double, od_ramps>> slot_error(cfg.slots);
    for (auto& row : slot_error) {
        for (auto& e : row) e = normal(rng);
    }

    std::vector<ODRecord> records;
    records.reserve(cfg.days * cfg.slots);
    for (std::size_t day = 0; day < cfg.days; ++day) {
        if (day > 0) {
            for (auto& g : origin_level) g = cfg.day_phi * g + innovation * normal(rng);
            for (auto& u : day_error) u = cfg.day_phi * u + innovation * normal(rng);
            for (auto& row : slot_error) {
                for (auto& e : row) e = cfg.day_phi * e + innovation * normal(rng);
            }
        }
        for (std::size_t s = 0; s < cfg.slots; ++s) {
            ODRecord r;
            r.day = day + 1;
            r.slot = s + 1;
            const double phase = std::numbers::pi * (static_cast<double>(s) + 0.5) / static_cast<double>(cfg.slots);
            const double profile = 1.0 + cfg.profile_amplitude * (std::sin(phase) - 0.5);
            for (int k = 0; k < od_ramps; ++k) {
                const double log_level = cfg.origin_day_sd * origin_level[k] + cfg.origin_interval_sd * normal(rng);
                r.origins[k] = base[k] * profile * std::exp(log_level);
            }
            for (int i = 0; i < od_ramps; ++i) {
                double expected = 0.0;
                for (int k = 0; k <= i; ++k) expected += r.origins[k] * split(k, i);
                const double err = slot_error[s][i] + cfg.day_error_sd * day_error[i];
                const double value = expected + cfg.noise_scale * std::sqrt(std::max(expected, 1.0)) * err;
                r.destinations[i] = std::max(value, 0.0);
            }
            records.push_back(r);
        }
    }
    return ODDataset(std::move(records), cfg.slots);
}

}  // namespace gapboot
