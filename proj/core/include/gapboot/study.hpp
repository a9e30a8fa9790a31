#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapboot/gap_bootstrap_two.hpp"
#include "gapboot/models.hpp"

namespace gapboot {

enum class Method { gb1, gb2, ss, bb, naive };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

struct StudyConfig {
    std::vector<ModelSpec> cells;
    std::vector<Method> methods;
    std::size_t runs = 500;
    /// Simulations behind the Monte Carlo true standard error of each cell.
    std::size_t truth_runs = 5000;
    std::uint64_t seed = 0;
    /// Window / block length in periods; 0 picks default_block_length(m, block_c).
    std::size_t block_len = 0;
    double block_c = 2.0;
    std::size_t boot_b = 1000;
    DegeneratePolicy policy = DegeneratePolicy::error;
};

struct MethodResult {
    Method method = Method::gb1;
    /// Averages of (estimated se - true se) and its square over successful runs.
    double bias = 0.0;
    double mse = 0.0;
    /// Per-run estimated se minus true se, in run order (failed runs omitted).
    std::vector<double> differences;
    std::size_t failures = 0;
    std::string first_error;
    double runtime_ms = 0.0;
};

struct CellResult {
    ModelSpec model;
    std::size_t ell = 0;
    double true_se = 0.0;
    std::vector<MethodResult> methods;
    /// Non-empty when the whole cell could not run.
    std::string error;
};

struct StudyResult {
    StudyConfig config;
    std::vector<CellResult> cells;

    /// One line per failed cell or method with failed runs.
    std::vector<std::string> failures() const;
};

/// Runs every cell of the grid.  Data for run k of cell c comes from
/// derive_key(seed, {c, k, 0}) and its bootstraps from derive_key(seed, {c, k, 1}),
/// so results do not depend on the worker count.  Cell failures are recorded,
/// never thrown.
StudyResult run_study(const StudyConfig& config);

/// CSV with columns model,dist,n,p,method,true_se,bias,mse,runs (and
/// runtime_ms when timing is set), one line per cell and method.
void write_study_csv(const StudyResult& result, std::ostream& out, bool timing = false);

/// JSON carrying the configuration, every cell summary and per-run differences.
void write_study_json(const StudyResult& result, std::ostream& out, bool timing = false);

/// Parses a JSON study definition; throws ConfigError on malformed input.
StudyConfig study_config_from_json(std::string_view text);

}  // namespace gapboot
