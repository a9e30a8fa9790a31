#include "gapboot/self_check.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "gapboot/gap_bootstrap_one.hpp"
#include "gapboot/gap_bootstrap_two.hpp"
#include "gapboot/iid_bootstrap.hpp"
#include "gapboot/models.hpp"
#include "gapboot/od_model.hpp"
#include "gapboot/random.hpp"

namespace gapboot {

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t key) {
    CounterRng rng(key);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = 2.0 * uniform01(rng) - 1.0;
    }
    return m;
}

CheckOutcome gb1_identical_rows() {
    const Matrix a = random_matrix(3, 3, 11);
    const Matrix sigma = a * a.transpose();
    RowEstimates rows;
    for (int j = 0; j < 6; ++j) {
        rows.estimates.push_back(Eigen::Vector3d(0.25, -1.5, 3.0));
        rows.row_variances.push_back(sigma);
    }
    const Matrix out = gb1_variance(rows).matrix();
    const double diff = (out - sigma).cwiseAbs().maxCoeff();
    return {"Gap Bootstrap I on identical rows returns the row variance", diff == 0.0, "max |diff| = " + fmt(diff)};
}

CheckOutcome correlation_diagonal() {
    const DataArray array(random_matrix(2, 6 * 30, 12), 6, 30);
    const auto sub = subseries_estimates(array, sample_mean(2), 5);
    double worst = 0.0;
    for (std::size_t j = 0; j < array.slots(); ++j) {
        worst = std::max(worst, (correlation_matrix(sub, j, j) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff());
    }
    return {"window correlation matrix of a row with itself is the identity", worst <= 1e-8,
            "max |R(j,j) - I| = " + fmt(worst)};
}

CheckOutcome mean_linearity() {
    // Small integers on a power-of-two grid keep every partial sum exact.
    Matrix values(1, 4 * 8);
    for (Eigen::Index t = 0; t < values.cols(); ++t) values(0, t) = static_cast<double>((t * 7) % 13) - 6.0;
    const DataArray array(values, 4, 8);
    const double residual = verify_linearity(array, sample_mean(1));
    return {"sample mean equals the weighted row means exactly", residual == 0.0, "residual = " + fmt(residual)};
}

CheckOutcome od_identities() {
    SurrogateConfig cfg;
    cfg.days = 40;
    cfg.seed = 3;
    const auto data = generate_od_surrogate(cfg);
    const auto full = ls_estimate(data, data.all_records(), "all records");
    std::vector<Matrix> gammas;
    Vector combined = Vector::Zero(od_params);
    std::vector<Vector> slot_thetas;
    for (std::size_t j = 0; j < data.slots(); ++j) {
        const auto fit = ls_estimate(data, data.slot_set(j), "slot " + std::to_string(j + 1));
        gammas.push_back(fit.gamma);
        slot_thetas.push_back(fit.theta);
    }
    const auto weights = od_weights(full.gamma, gammas);
    Matrix total = Matrix::Zero(od_params, od_params);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        total += weights[j];
        combined += weights[j] * slot_thetas[j];
    }
    const double sum_err = (total - Matrix::Identity(od_params, od_params)).cwiseAbs().maxCoeff();
    const double lin_err = (combined - full.theta).cwiseAbs().maxCoeff();
    const bool ok = sum_err <= 1e-8 && lin_err <= 1e-8;
    return {"OD weights sum to the identity and reproduce the full estimate", ok,
            "max |sum W - I| = " + fmt(sum_err) + ", linearity residual = " + fmt(lin_err)};
}

CheckOutcome exhaustive_small_rows() {
    BootstrapConfig cfg;
    cfg.mode = BootstrapMode::exhaustive;
    Matrix a(1, 3);
    a << 1, 2, 3;
    Matrix b(1, 2);
    b << 0, 2;
    const double va = iid_bootstrap_variance(a, sample_mean(1), cfg).matrix()(0, 0);
    const double vb = iid_bootstrap_variance(b, sample_mean(1), cfg).matrix()(0, 0);
    const double err = std::max(std::abs(va - 2.0 / 9.0), std::abs(vb - 0.5));
    return {"exhaustive bootstrap of the mean equals the plug-in variance over m", va == 2.0 / 9.0 && vb == 0.5,
            "max error = " + fmt(err)};
}

CheckOutcome gb2_single_row() {
    const DataArray array(random_matrix(2, 30, 13), 1, 30);
    const auto est = sample_mean(2);
    BootstrapConfig cfg;
    cfg.replicates = 200;
    const auto rows = bootstrap_rows(array, est, cfg);
    const auto sub = subseries_estimates(array, est, 4);
    const std::vector<double> w{1.0};
    const Matrix out = gb2_variance(rows.row_variances, sub, w).matrix();
    const double diff = (out - rows.row_variances[0]).cwiseAbs().maxCoeff();
    return {"Gap Bootstrap II with one row returns the row variance", diff <= 1e-15, "max |diff| = " + fmt(diff)};
}

CheckOutcome inverse_root() {
    Matrix m(2, 2);
    m << 2, 1, 1, 2;
    const Matrix r = sym_inverse_sqrt(m);
    const double err = (r * r * m - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
    return {"symmetric inverse square root inverts its square", err <= 1e-12, "max error = " + fmt(err)};
}

}  // namespace

std::vector<CheckOutcome> run_self_checks() {
    const std::vector<std::pair<const char*, std::function<CheckOutcome()>>> checks{
        {"gb1 identical rows", gb1_identical_rows},
        {"correlation diagonal", correlation_diagonal},
        {"mean linearity", mean_linearity},
        {"od identities", od_identities},
        {"exhaustive bootstrap", exhaustive_small_rows},
        {"gb2 single row", gb2_single_row},
        {"inverse root", inverse_root},
    };
    std::vector<CheckOutcome> out;
    for (const auto& [name, fn] : checks) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    }
    return out;
}

}  // namespace gapboot
