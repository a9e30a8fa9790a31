// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gapboot/baselines.hpp>
#include <gapboot/diagnostics.hpp>
#include <gapboot/gap_bootstrap_one.hpp>
#include <gapboot/gap_bootstrap_two.hpp>
#include <gapboot/iid_bootstrap.hpp>
#include <gapboot/od_bootstrap.hpp>
#include <gapboot/od_io.hpp>
#include <gapboot/od_model.hpp>
#include <gapboot/random.hpp>
#include <gapboot/self_check.hpp>
#include <gapboot/study.hpp>

using namespace gapboot;

namespace {

struct Outcome {
    bool passed = true;
    std::vector<std::string> lines;

    void require(bool ok, const std::string& what) {
        lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        passed = passed && ok;
    }
    void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

const MethodResult& method(const CellResult& cell, Method m) {
    for (const auto& r : cell.methods) {
        if (r.method == m) return r;
    }
    throw std::logic_error("method missing from study result");
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t key) {
    CounterRng rng(key);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    }
    return m;
}

// 1. Monte Carlo bootstrap against exhaustive enumeration.
Outcome oracle_equivalence() {
    Outcome out;
    constexpr int rows = 120;
    BootstrapConfig exhaustive;
    exhaustive.mode = BootstrapMode::exhaustive;
    int within = 0;
    for (int t = 0; t < rows; ++t) {
        CounterRng pick(derive_key(101, {static_cast<std::uint64_t>(t)}));
        const auto m = static_cast<Eigen::Index>(2 + uniform_index(pick, 5));
        const Matrix row = normal_matrix(1, m, derive_key(102, {static_cast<std::uint64_t>(t)}));
        const double exact = iid_bootstrap_variance(row, sample_mean(1), exhaustive).matrix()(0, 0);

        BootstrapConfig mc;
        mc.replicates = 100000;
        mc.seed = derive_key(103, {static_cast<std::uint64_t>(t)});
        const Matrix reps = iid_bootstrap_replicates(row, sample_mean(1), mc);
        const Eigen::ArrayXd sq = (reps.row(0).array() - reps.mean()).square().transpose();
        const double estimate = sq.mean();
        const double se = std::sqrt((sq - estimate).square().mean() / static_cast<double>(sq.size()));
        if (std::abs(estimate - exact) <= 3.0 * se) ++within;
    }
    out.require(within >= 95 * rows / 100,
                std::to_string(within) + "/" + std::to_string(rows) + " rows within 3 MC standard errors (need 95%)");

    const double a = iid_bootstrap_variance(Matrix{{1.0, 2.0, 3.0}}, sample_mean(1), exhaustive).matrix()(0, 0);
    const double b = iid_bootstrap_variance(Matrix{{0.0, 2.0}}, sample_mean(1), exhaustive).matrix()(0, 0);
    out.require(a == 2.0 / 9.0, "(1,2,3) gives " + fmt(a, 17) + ", expected 2/9");
    out.require(b == 0.5, "(0,2) gives " + fmt(b, 17) + ", expected 0.5");
    return out;
}

// 2. Algebraic identities, as asserted by the self-check command.
Outcome algebraic_identities() {
    Outcome out;
    for (const auto& c : run_self_checks()) out.require(c.passed, c.name + " (" + c.detail + ")");
    return out;
}

StudyConfig study(std::vector<ModelSpec> cells, std::vector<Method> methods, std::size_t runs,
                  std::size_t truth_runs, std::uint64_t seed) {
    StudyConfig cfg;
    cfg.cells = std::move(cells);
    cfg.methods = std::move(methods);
    cfg.runs = runs;
    cfg.truth_runs = truth_runs;
    cfg.seed = seed;
    return cfg;
}

void require_clean(Outcome& out, const StudyResult& result) {
    const auto failures = result.failures();
    out.require(failures.empty(), failures.empty() ? "no failed runs" : failures.front());
}

// 3. Univariate AR(2) cell at (n, p) = (200, 5).
Outcome univariate_cell() {
    Outcome out;
    const auto result = run_study(study({model_preset(ModelFamily::ar2, Innovation::normal, 200, 5)},
                                        {Method::gb1, Method::gb2}, 500, 5000, 42));
    require_clean(out, result);
    const auto& cell = result.cells.front();
    const auto& gb1 = method(cell, Method::gb1);
    const auto& gb2 = method(cell, Method::gb2);
    out.require(std::abs(cell.true_se / 0.013 - 1.0) <= 0.10, "true se " + fmt(cell.true_se) + " vs 0.013 (10%)");
    out.require(gb1.bias < 0.0, "GB-I bias " + fmt(gb1.bias) + " < 0");
    const double ratio = gb1.mse / gb2.mse;
    out.require(ratio > 5.0, "MSE ratio GB-I/GB-II " + fmt(ratio) + " > 5 (GB-I " + fmt(gb1.mse) + ", GB-II " +
                                 fmt(gb2.mse) + ")");
    out.note("GB-II bias " + fmt(gb2.bias) + ", ell " + std::to_string(cell.ell));
    return out;
}

// 4. Multivariate ordering for the VAR(1) (200, 5) and VMA(2) (500, 10) cells.
Outcome multivariate_ordering() {
    Outcome out;
    const auto result = run_study(
        study({model_preset(ModelFamily::mar, Innovation::normal, 200, 5, CovarianceChoice::toeplitz),
               model_preset(ModelFamily::mma, Innovation::normal, 500, 10, CovarianceChoice::toeplitz)},
              {Method::gb1, Method::gb2, Method::ss, Method::bb}, 500, 5000, 42));
    require_clean(out, result);
    const double published[] = {0.634e-4, 1.19e-4};
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& cell = result.cells[c];
        const std::string label = std::string(to_string(cell.model.family)) + " (" + std::to_string(cell.model.n) +
                                  "," + std::to_string(cell.model.p) + ")";
        const double gb1 = method(cell, Method::gb1).mse;
        const double gb2 = method(cell, Method::gb2).mse;
        const double ss = method(cell, Method::ss).mse;
        const double bb = method(cell, Method::bb).mse;
        out.note(label + ": true se " + fmt(cell.true_se) + ", MSE GB-I " + fmt(gb1) + ", GB-II " + fmt(gb2) +
                 ", SS " + fmt(ss) + ", BB " + fmt(bb) + ", ell " + std::to_string(cell.ell));
        out.require(gb2 < ss, label + ": GB-II below SS");
        out.require(gb2 < bb, label + ": GB-II below BB");
        out.require(gb1 > 3.0 * gb2, label + ": GB-I above 3x GB-II");
        const double factor = gb2 / published[c];
        out.require(factor >= 0.5 && factor <= 2.0,
                    label + ": GB-II MSE " + fmt(gb2) + " within a factor 2 of " + fmt(published[c]));
    }
    return out;
}

// Variance of the mean when periods are independent: m Var(p consecutive values) / n^2.
double ar2_mean_variance(const ModelSpec& s) {
    const double a1 = s.alpha1, a2 = s.alpha2;
    const double gamma0 = s.sigma * s.sigma * (1 - a2) / ((1 + a2) * ((1 - a2) * (1 - a2) - a1 * a1));
    std::vector<double> rho(s.p, 1.0);
    if (s.p > 1) rho[1] = a1 / (1 - a2);
    for (std::size_t h = 2; h < s.p; ++h) rho[h] = a1 * rho[h - 1] + a2 * rho[h - 2];
    double block = static_cast<double>(s.p);
    for (std::size_t h = 1; h < s.p; ++h) block += 2.0 * static_cast<double>(s.p - h) * rho[h];
    const double n = static_cast<double>(s.n);
    return static_cast<double>(s.periods()) * gamma0 * block / (n * n);
}

// 5. Median relative variance error shrinking along n.
Outcome consistency_trend() {
    Outcome out;
    std::vector<ModelSpec> cells;
    for (std::size_t n : {200u, 1800u, 10000u}) cells.push_back(model_preset(ModelFamily::ar2, Innovation::normal, n, 5));
    const auto result = run_study(study(cells, {Method::gb1, Method::gb2}, 100, 5000, 42));
    require_clean(out, result);
    for (Method m : {Method::gb1, Method::gb2}) {
        std::vector<double> medians;
        std::string trail;
        for (const auto& cell : result.cells) {
            const double t = cell.true_se;
            std::vector<double> rel;
            for (double d : method(cell, m).differences) rel.push_back(std::abs((t + d) * (t + d) - t * t) / (t * t));
            std::nth_element(rel.begin(), rel.begin() + static_cast<long>(rel.size() / 2), rel.end());
            const double lower = *std::max_element(rel.begin(), rel.begin() + static_cast<long>(rel.size() / 2));
            medians.push_back(0.5 * (lower + rel[rel.size() / 2]));
            trail += (trail.empty() ? "" : " > ") + fmt(medians.back(), 3);
        }
        const bool decreasing = medians[0] > medians[1] && medians[1] > medians[2];
        out.require(decreasing, std::string(m == Method::gb1 ? "GB-I" : "GB-II") + " median |V-Var|/Var: " + trail);
    }
    for (const auto& cell : result.cells) {
        out.note("n=" + std::to_string(cell.model.n) + ": MC true se " + fmt(cell.true_se) + ", closed form " +
                 fmt(std::sqrt(ar2_mean_variance(cell.model))));
    }
    return out;
}

// 6. Column-average discrepancy for the plug-in variance.
Outcome column_discrepancy() {
    Outcome out;
    constexpr int runs = 50;
    double total = 0.0;
    for (int r = 0; r < runs; ++r) {
        const DataArray a(normal_matrix(1, 100000, derive_key(606, {static_cast<std::uint64_t>(r)})), 5, 20000);
        total += naive_column_variance(a, plugin_variance()).discrepancy(0);
    }
    const double mean = total / runs;
    out.require(std::abs(mean / 0.2 - 1.0) <= 0.05, "mean discrepancy " + fmt(mean) + " vs 0.2 (5%)");
    return out;
}

// 7. OD pipeline on the surrogate.
Outcome od_pipeline() {
    Outcome out;
    {
        SurrogateConfig cfg;
        cfg.noise_scale = 0.0;
        cfg.seed = 1;
        const auto data = generate_od_surrogate(cfg);
        const double err = (ls_estimate(data, data.all_records()).theta - cfg.theta).cwiseAbs().maxCoeff();
        out.require(err <= 1e-8, "noise-free recovery error " + fmt(err, 3));
    }
    {
        SurrogateConfig cfg;
        cfg.days = 1000;
        constexpr int truth_reps = 200;
        Matrix est(od_params, truth_reps);
        for (int r = 0; r < truth_reps; ++r) {
            cfg.seed = 1000 + static_cast<std::uint64_t>(r);
            const auto data = generate_od_surrogate(cfg);
            est.col(r) = ls_estimate(data, data.all_records()).theta;
        }
        const Vector centre = est.rowwise().mean();
        const Vector truth = ((est.colwise() - centre).rowwise().squaredNorm() / (truth_reps - 1.0)).cwiseSqrt();

        constexpr int datasets = 8;
        Vector mean_gb2 = Vector::Zero(od_params);
        for (int k = 0; k < datasets; ++k) {
            cfg.seed = 7 + static_cast<std::uint64_t>(k);
            ODOptions opts;
            opts.bootstrap.seed = static_cast<std::uint64_t>(k);
            mean_gb2 += analyze_od(generate_od_surrogate(cfg), opts).se_gb2 / datasets;
        }
        const Eigen::ArrayXd rel = (mean_gb2.array() / truth.array() - 1.0).abs();
        Eigen::Index worst = 0;
        rel.maxCoeff(&worst);
        out.require(rel.maxCoeff() <= 0.15, "GB-II SE averaged over " + std::to_string(datasets) +
                                                " datasets vs 200-rep MC: worst " + od_param_name(static_cast<int>(worst)) +
                                                " off by " + fmt(100 * rel.maxCoeff(), 3) + "% (15%)");
    }
    {
        SurrogateConfig cfg;
        cfg.day_phi = 0.5;
        cfg.seed = 7;
        const auto res = analyze_od(generate_od_surrogate(cfg), ODOptions{});
        int below = 0;
        for (int a = 0; a < od_params; ++a) below += res.se_gb1(a) < res.se_gb2(a);
        out.require(below >= 17, "serially correlated surrogate: GB-I < GB-II on " + std::to_string(below) +
                                     "/21 components (need 17)");

        std::ostringstream csv;
        write_od_results(res, csv);
        const std::string text = csv.str();
        const auto lines = std::count(text.begin(), text.end(), '\n');
        out.require(text.rfind("param,estimate,std_gb1,std_gb2\np11,", 0) == 0 && lines == 22,
                    "result schema: header plus " + std::to_string(lines - 1) + " parameter rows");
    }
    return out;
}

// 8. Randomised invariants, 1000 instances each.
Outcome invariant_fuzz() {
    Outcome out;
    constexpr int trials = 1000;
    auto min_eig = [](const Matrix& m) {
        return m.rows() == 1 ? m(0, 0) : Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff();
    };
    auto psd = [&](const Matrix& m) {
        return is_symmetric(m, 0.0) && min_eig(m) >= -1e-12 * std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    };
    auto rel = [](const Matrix& a, const Matrix& b) {
        return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    };
    int bad_rho = 0, bad_psd = 0, bad_perm = 0, bad_rho_scale = 0, bad_scale = 0;
    for (int t = 0; t < trials; ++t) {
        CounterRng rng(derive_key(808, {static_cast<std::uint64_t>(t)}));
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 3));
        const std::size_t p = 2 + uniform_index(rng, 7);
        const std::size_t m = 4 + uniform_index(rng, 20);
        const std::size_t ell = 2 + uniform_index(rng, m - 2);
        const double c = (t % 2 ? -1.0 : 1.0) * std::exp(4.0 * uniform01(rng) - 2.0);
        const DataArray a(normal_matrix(d, static_cast<Eigen::Index>(p * m), derive_key(809, {static_cast<std::uint64_t>(t)})), p, m);
        const DataArray scaled(c * a.series(), p, m);
        const auto est = sample_mean(d);
        BootstrapConfig cfg;
        cfg.replicates = 30;
        cfg.seed = static_cast<std::uint64_t>(t);

        const auto sub = subseries_estimates(a, est, ell);
        const auto sub_c = subseries_estimates(scaled, est, ell);
        for (std::size_t j = 0; j < p; ++j) {
            const std::size_t k = (j + 1) % p;
            const auto cj = static_cast<Eigen::Index>(j % static_cast<std::size_t>(d));
            const double rho = sampling_window_correlation(sub, j, k, cj, 0);
            if (!(std::abs(rho) <= 1.0)) ++bad_rho;
            if (std::abs(rho - sampling_window_correlation(sub_c, j, k, cj, 0)) > 1e-10) ++bad_rho_scale;
        }

        const auto rows = bootstrap_rows(a, est, cfg);
        const auto rows_c = bootstrap_rows(scaled, est, cfg);
        const Matrix gb1 = gb1_variance(rows).matrix();
        const GapBootstrapTwoOptions opts{ell, cfg, DegeneratePolicy::zero};
        const Matrix gb2 = gap_bootstrap_two(a, est, rows, opts).matrix();
        const Matrix ss = subsampling_variance(a, est, ell).matrix();
        const Matrix bb = block_bootstrap_variance(a, est, ell - 1, cfg).matrix();
        if (!psd(gb1) || !psd(gb2) || !psd(ss) || !psd(bb)) ++bad_psd;

        std::vector<std::size_t> perm(p);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        RowEstimates shuffled;
        for (auto j : perm) {
            shuffled.estimates.push_back(rows.estimates[j]);
            shuffled.row_variances.push_back(rows.row_variances[j]);
        }
        if (gb1_variance(shuffled).matrix() != gb1) ++bad_perm;

        const double c2 = c * c;
        if (rel(gb1_variance(rows_c).matrix(), c2 * gb1) > 1e-9 ||
            rel(gap_bootstrap_two(scaled, est, rows_c, opts).matrix(), c2 * gb2) > 1e-9 ||
            rel(subsampling_variance(scaled, est, ell).matrix(), c2 * ss) > 1e-10 ||
            rel(rows_c.row_variances[0], c2 * rows.row_variances[0]) > 1e-10) {
            ++bad_scale;
        }
    }
    out.require(bad_rho == 0, "|rho| <= 1: " + std::to_string(bad_rho) + " violations");
    out.require(bad_psd == 0, "PSD outputs (GB-I, GB-II, SS, BB): " + std::to_string(bad_psd) + " violations");
    out.require(bad_perm == 0, "GB-I row permutation symmetry: " + std::to_string(bad_perm) + " violations");
    out.require(bad_rho_scale == 0, "rho scale invariance: " + std::to_string(bad_rho_scale) + " violations");
    out.require(bad_scale == 0, "variance scale equivariance: " + std::to_string(bad_scale) + " violations");
    return out;
}

}  // namespace

int main() {
    set_warning_handler([](const std::string&) {});
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 bootstrap oracle equivalence", oracle_equivalence},
        {"2 algebraic identities", algebraic_identities},
        {"3 univariate AR(2) cell", univariate_cell},
        {"4 multivariate method ordering", multivariate_ordering},
        {"5 consistency trend", consistency_trend},
        {"6 column-average discrepancy", column_discrepancy},
        {"7 OD pipeline", od_pipeline},
        {"8 invariant fuzz", invariant_fuzz},
    };
    bool all = true;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", name.c_str(), secs);
        for (const auto& line : o.lines) std::printf("    %s\n", line.c_str());
        std::fflush(stdout);
        all = all && o.passed;
    }
    return all ? 0 : 1;
}
