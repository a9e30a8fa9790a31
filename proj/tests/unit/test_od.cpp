#include <catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include <gapboot/errors.hpp>
#include <gapboot/od_bootstrap.hpp>
#include <gapboot/od_io.hpp>
#include <gapboot/od_model.hpp>

using namespace gapboot;
using Catch::Approx;

namespace {

SurrogateConfig small_surrogate(std::uint64_t seed) {
    SurrogateConfig cfg;
    cfg.days = 40;
    cfg.slots = 6;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("parameter indexing covers the upper triangle once") {
    CHECK(od_param_index(0, 0) == 0);
    CHECK(od_param_index(0, 5) == 5);
    CHECK(od_param_index(1, 1) == 6);
    CHECK(od_param_index(2, 2) == 11);
    CHECK(od_param_index(5, 5) == 20);
    std::set<int> seen;
    for (int k = 0; k < 6; ++k) {
        for (int i = k; i < 6; ++i) seen.insert(od_param_index(k, i));
    }
    CHECK(seen.size() == 21);
    CHECK(*seen.rbegin() == 20);
    CHECK(od_param_name(0) == "p11");
    CHECK(od_param_name(6) == "p22");
    CHECK(od_param_name(20) == "p66");
    CHECK_THROWS_AS(od_param_index(2, 1), BoundsError);
    CHECK_THROWS_AS(od_param_name(21), BoundsError);
}

TEST_CASE("moment accumulation equals the stacked design normal equations") {
    const auto data = generate_od_surrogate(small_surrogate(1));
    Matrix gamma = Matrix::Zero(21, 21);
    Vector h = Vector::Zero(21);
    ODMoments mom;
    for (const auto& r : data.records()) {
        const auto [o, d] = build_design(r.origins, r.destinations);
        gamma += o.transpose() * o;
        h += o.transpose() * d;
        mom.add(r.origins, r.destinations);
    }
    const double scale = gamma.cwiseAbs().maxCoeff();
    CHECK((mom.gamma() - gamma).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK((mom.rhs() - h).cwiseAbs().maxCoeff() <= 1e-12 * h.cwiseAbs().maxCoeff());
}

TEST_CASE("design rows reproduce the flow balance") {
    std::array<double, 7> o{10, 20, 30, 40, 50, 60, 70};
    const Vector theta = reference_split_theta();
    const Matrix p = recover_split_matrix(theta).p;
    std::array<double, 7> d{};
    for (int i = 0; i < 7; ++i) {
        for (int k = 0; k <= i; ++k) d[i] += o[k] * p(k, i);
    }
    const auto [x, y] = build_design(o, d);
    CHECK((x * theta - y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noise-free data recovers the split proportions") {
    auto cfg = small_surrogate(2);
    cfg.noise_scale = 0.0;
    const auto data = generate_od_surrogate(cfg);
    const auto fit = ls_estimate(data, data.all_records());
    CHECK((fit.theta - reference_split_theta()).cwiseAbs().maxCoeff() <= 1e-8);
    for (std::size_t j = 0; j < data.slots(); ++j) {
        const auto slot_fit = ls_estimate(data, data.slot_set(j));
        CHECK((slot_fit.theta - reference_split_theta()).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("slot weights sum to identity and recombine the full fit") {
    const auto data = generate_od_surrogate(small_surrogate(3));
    const auto full = ls_estimate(data, data.all_records());
    std::vector<Matrix> gammas;
    Vector combined = Vector::Zero(21);
    std::vector<Vector> slot_theta;
    for (std::size_t j = 0; j < data.slots(); ++j) {
        const auto f = ls_estimate(data, data.slot_set(j));
        gammas.push_back(f.gamma);
        slot_theta.push_back(f.theta);
    }
    const auto w = od_weights(full.gamma, gammas);
    Matrix total = Matrix::Zero(21, 21);
    for (std::size_t j = 0; j < w.size(); ++j) {
        total += w[j];
        combined += w[j] * slot_theta[j];
    }
    CHECK((total - Matrix::Identity(21, 21)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((combined - full.theta).cwiseAbs().maxCoeff() <= 1e-8);

    gammas.pop_back();
    CHECK_THROWS_AS(od_weights(full.gamma, gammas), ConsistencyError);
}

TEST_CASE("constant origins leave the system singular") {
    std::vector<ODRecord> records;
    for (std::size_t t = 0; t < 8; ++t) {
        ODRecord r;
        r.day = t / 2 + 1;
        r.slot = t % 2 + 1;
        r.origins.fill(100.0);
        r.destinations.fill(100.0);
        records.push_back(r);
    }
    const ODDataset data(records, 2);
    CHECK_THROWS_AS(ls_estimate(data, data.all_records()), RankError);
    CHECK_NOTHROW(ls_estimate(data, data.all_records(), "ridge", 1.0));
    CHECK_THROWS_AS(ls_estimate(data, data.all_records(), "bad", -1.0), DomainError);
}

TEST_CASE("split matrix recovery flags infeasible entries") {
    const auto ok = recover_split_matrix(reference_split_theta());
    CHECK(ok.feasible);
    for (int k = 0; k < 7; ++k) CHECK(ok.p.row(k).sum() == Approx(1.0));
    CHECK(ok.p(0, 6) == Approx(1.0 - 0.603));
    Vector bad = reference_split_theta();
    bad(0) = 0.95;
    const auto infeasible = recover_split_matrix(bad);
    CHECK_FALSE(infeasible.feasible);
    REQUIRE(infeasible.out_of_range.size() == 1);
    CHECK(infeasible.out_of_range[0] == std::pair<int, int>(0, 6));
}

TEST_CASE("dataset validation") {
    auto records = generate_od_surrogate(small_surrogate(4)).records();
    {
        auto r = records;
        r[3].slot = 9;
        CHECK_THROWS_AS(ODDataset(r, 6), DimensionError);
    }
    {
        auto r = records;
        r[2].day = 99;
        CHECK_THROWS_AS(ODDataset(r, 6), DimensionError);
    }
    {
        auto r = records;
        r[5].origins[2] = -1.0;
        CHECK_THROWS_AS(ODDataset(r, 6), DataError);
    }
    records.pop_back();
    CHECK_THROWS_AS(ODDataset(records, 6), DimensionError);
}

TEST_CASE("surrogate layout") {
    const auto data = generate_od_surrogate(small_surrogate(5));
    CHECK(data.days() == 40);
    CHECK(data.slots() == 6);
    CHECK(data.at(3, 2).day == 4);
    CHECK(data.at(3, 2).slot == 3);
    const auto array = data.as_array();
    CHECK(array.dim() == 14);
    CHECK(array.series()(8, 7) == data.records()[7].destinations[1]);
    CHECK(generate_od_surrogate(small_surrogate(5)).records()[100].origins ==
          data.records()[100].origins);
}

TEST_CASE("csv round trip and parse errors") {
    const auto data = generate_od_surrogate(small_surrogate(6));
    std::stringstream buf;
    write_od_csv(data, buf);
    const auto back = read_od_csv(buf, 6);
    REQUIRE(back.size() == data.size());
    for (std::size_t t = 0; t < data.size(); ++t) {
        CHECK(back.records()[t].origins == data.records()[t].origins);
        CHECK(back.records()[t].destinations == data.records()[t].destinations);
    }

    std::istringstream wrong_header("day,slot,o1\n");
    CHECK_THROWS_AS(read_od_csv(wrong_header, 1), DataError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_od_csv(empty, 1), DataError);
    std::istringstream short_row("day,slot,o1,o2,o3,o4,o5,o6,o7,d1,d2,d3,d4,d5,d6,d7\n1,1,2\n");
    try {
        read_od_csv(short_row, 1);
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream bad_number(
        "day,slot,o1,o2,o3,o4,o5,o6,o7,d1,d2,d3,d4,d5,d6,d7\n1,1,1,2,x,4,5,6,7,1,2,3,4,5,6,7\n");
    CHECK_THROWS_AS(read_od_csv(bad_number, 1), DataError);
}

TEST_CASE("analysis reports finite standard errors for all parameters") {
    auto cfg = small_surrogate(7);
    cfg.days = 60;
    const auto data = generate_od_surrogate(cfg);
    ODOptions opts;
    opts.bootstrap.replicates = 100;
    const auto res = analyze_od(data, opts);
    CHECK(res.ell == default_block_length(60));
    CHECK(res.theta_hat.size() == 21);
    CHECK(res.se_gb1.size() == 21);
    CHECK(res.se_gb2.size() == 21);
    CHECK(res.se_gb2.allFinite());
    CHECK(res.se_gb2.minCoeff() > 0.0);
    CHECK(res.weights.size() == 6);

    std::ostringstream out;
    write_od_results(res, out);
    const std::string text = out.str();
    CHECK(text.rfind("param,estimate,std_gb1,std_gb2\np11,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 22);

    CHECK(od_gb2_standard_errors(data, res.ell, opts.bootstrap) == res.se_gb2);
    CHECK(od_gb1_standard_errors(data, opts.bootstrap) == res.se_gb1);
}

TEST_CASE("noise-free analysis gives zero standard errors") {
    auto cfg = small_surrogate(8);
    cfg.noise_scale = 0.0;
    const auto data = generate_od_surrogate(cfg);
    ODOptions opts;
    opts.bootstrap.replicates = 50;
    const auto res = analyze_od(data, opts);
    CHECK(res.se_gb2.maxCoeff() < 1e-6);
    CHECK(res.se_gb1.maxCoeff() < 1e-6);
}

TEST_CASE("projected variance combines correlated slots") {
    Vector sd(2);
    sd << 1.0, 2.0;
    Matrix z(2, 4);
    z << 1, -1, 1, -1,
         2, -2, 2, -2;
    // Perfect correlation: (1 + 2)^2.
    CHECK(projected_gb2_variance(sd, z, DegeneratePolicy::error, 1.0) == Approx(9.0));
    z.row(1) << 1, 1, -1, -1;
    // Orthogonal rows: 1 + 4.
    CHECK(projected_gb2_variance(sd, z, DegeneratePolicy::error, 1.0) == Approx(5.0));
    z.row(1).setZero();
    CHECK_THROWS_AS(projected_gb2_variance(sd, z, DegeneratePolicy::error, 1.0), DegenerateCorrelationError);
    CHECK(projected_gb2_variance(sd, z, DegeneratePolicy::zero, 1.0) == Approx(5.0));
}
