#include <benchmark/benchmark.h>

#include <gapboot/baselines.hpp>
#include <gapboot/diagnostics.hpp>
#include <gapboot/gap_bootstrap_one.hpp>
#include <gapboot/gap_bootstrap_two.hpp>
#include <gapboot/models.hpp>
#include <gapboot/od_bootstrap.hpp>
#include <gapboot/od_model.hpp>
#include <gapboot/parallel.hpp>

namespace {

using namespace gapboot;

// Multivariate VAR(1) cell; range(0) is n, p is fixed at 10.
DataArray var_data(std::size_t n) {
    return generate_series(model_preset(ModelFamily::mar, Innovation::normal, n, 10), 1);
}

BootstrapConfig boot(std::size_t b) {
    BootstrapConfig cfg;
    cfg.replicates = b;
    return cfg;
}

void BM_BootstrapRows(benchmark::State& state) {
    const auto data = var_data(static_cast<std::size_t>(state.range(0)));
    const auto est = mean_of_component_means(4);
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_rows(data, est, boot(1000)));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_BootstrapRows)->Arg(500)->Arg(1800)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GapBootstrapOneCombine(benchmark::State& state) {
    const auto data = var_data(1800);
    const auto rows = bootstrap_rows(data, sample_mean(4), boot(200));
    for (auto _ : state) benchmark::DoNotOptimize(gb1_variance(rows));
}
BENCHMARK(BM_GapBootstrapOneCombine);

void BM_GapBootstrapTwoCombine(benchmark::State& state) {
    const auto data = var_data(static_cast<std::size_t>(state.range(0)));
    const auto est = sample_mean(4);
    const auto rows = bootstrap_rows(data, est, boot(200));
    const auto sub = subseries_estimates(data, est, default_block_length(data.periods()));
    const auto w = est.weights_for(data.slots());
    for (auto _ : state) benchmark::DoNotOptimize(gb2_variance(rows.row_variances, sub, w));
}
BENCHMARK(BM_GapBootstrapTwoCombine)->Arg(500)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_SubseriesEstimates(benchmark::State& state) {
    const auto data = var_data(static_cast<std::size_t>(state.range(0)));
    const auto est = sample_mean(4);
    const auto ell = default_block_length(data.periods());
    for (auto _ : state) benchmark::DoNotOptimize(subseries_estimates(data, est, ell));
}
BENCHMARK(BM_SubseriesEstimates)->Arg(500)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_Subsampling(benchmark::State& state) {
    const auto data = var_data(static_cast<std::size_t>(state.range(0)));
    const auto ell = default_block_length(data.periods());
    for (auto _ : state) benchmark::DoNotOptimize(subsampling_variance(data, sample_mean(4), ell));
}
BENCHMARK(BM_Subsampling)->Arg(500)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_BlockBootstrap(benchmark::State& state) {
    const auto data = var_data(static_cast<std::size_t>(state.range(0)));
    const auto ell = default_block_length(data.periods());
    for (auto _ : state) benchmark::DoNotOptimize(block_bootstrap_variance(data, sample_mean(4), ell, boot(1000)));
}
BENCHMARK(BM_BlockBootstrap)->Arg(500)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_OdLeastSquares(benchmark::State& state) {
    SurrogateConfig cfg;
    cfg.days = static_cast<std::size_t>(state.range(0));
    const auto data = generate_od_surrogate(cfg);
    const auto all = data.all_records();
    for (auto _ : state) benchmark::DoNotOptimize(ls_estimate(data, all));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_OdLeastSquares)->Arg(100)->Arg(575)->Unit(benchmark::kMicrosecond);

void BM_OdAnalysis(benchmark::State& state) {
    SurrogateConfig cfg;
    cfg.days = 120;
    const auto data = generate_od_surrogate(cfg);
    ODOptions opts;
    opts.bootstrap = boot(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(analyze_od(data, opts));
}
BENCHMARK(BM_OdAnalysis)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
    gapboot::set_warning_handler([](const std::string&) {});
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
