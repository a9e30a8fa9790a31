#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gapboot/errors.hpp"
#include "gapboot/od_io.hpp"
#include "gapboot/parallel.hpp"
#include "gapboot/self_check.hpp"
#include "gapboot/study.hpp"

namespace gapboot::cli {

namespace {

struct SimulateArgs {
    std::string config_path;
    std::string model;
    std::string dist = "normal";
    std::string sigma0 = "toeplitz";
    std::optional<std::size_t> n, p, gap, runs, truth_runs, block_len, boot_b;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> methods;
    std::optional<std::string> degenerate;
    std::string out;
    std::string json_out;
    bool timing = false;
};

struct OdArgs {
    std::string data;
    bool surrogate = false;
    std::size_t slots = 36;
    std::size_t days = 575;
    double day_phi = 0.0;
    double noise = 1.0;
    std::size_t block_len = 0;
    std::size_t boot_b = 1000;
    std::uint64_t seed = 0;
    double ridge = 0.0;
    std::string degenerate = "error";
    std::string out;
    std::string write_data;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto m = parse_method(item);
        if (!m) throw ConfigError("unknown method '" + item + "' (expected gb1, gb2, ss, bb, naive)");
        out.push_back(*m);
    }
    return out;
}

DegeneratePolicy parse_policy(const std::string& s) {
    if (s == "error") return DegeneratePolicy::error;
    if (s == "zero") return DegeneratePolicy::zero;
    throw ConfigError("--degenerate-corr must be 'error' or 'zero'");
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot write '" + path + "'");
    write(file);
    if (!file) throw Error("failed while writing '" + path + "'");
}

StudyConfig build_study(const SimulateArgs& a) {
    StudyConfig cfg;
    if (!a.config_path.empty()) cfg = study_config_from_json(read_file(a.config_path));
    if (a.runs) cfg.runs = *a.runs;
    if (a.truth_runs) cfg.truth_runs = *a.truth_runs;
    if (a.seed) cfg.seed = *a.seed;
    if (a.block_len) cfg.block_len = *a.block_len;
    if (a.boot_b) cfg.boot_b = *a.boot_b;
    if (a.methods) cfg.methods = parse_methods(*a.methods);
    if (a.degenerate) cfg.policy = parse_policy(*a.degenerate);
    if (!a.model.empty()) {
        if (!a.n || !a.p) throw ConfigError("--model needs --n and --p");
        const auto family = parse_model_family(a.model);
        const auto dist = parse_innovation(a.dist);
        const auto cov = parse_covariance_choice(a.sigma0);
        if (!family || !dist || !cov) throw ConfigError("unknown --model, --dist or --sigma0 value");
        ModelSpec spec;
        try {
            spec = model_preset(*family, *dist, *a.n, *a.p, *cov);
            if (a.gap) spec.gap_q = *a.gap;
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        cfg.cells = {spec};
    } else if (a.config_path.empty()) {
        throw ConfigError("simulate needs --model or --config");
    }
    if (cfg.boot_b < 2) throw ConfigError("--boot-b must be at least 2");
    if (cfg.truth_runs < 100) throw ConfigError("truth runs must be at least 100");
    return cfg;
}

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const StudyConfig cfg = build_study(a);
    const StudyResult result = run_study(cfg);
    emit(a.out, out, [&](std::ostream& s) { write_study_csv(result, s, a.timing); });
    if (!a.json_out.empty()) emit(a.json_out, out, [&](std::ostream& s) { write_study_json(result, s, a.timing); });
    const auto failures = result.failures();
    for (const auto& f : failures) err << "gapboot: " << f << '\n';
    const bool any_cell_failed = std::any_of(result.cells.begin(), result.cells.end(),
                                             [](const CellResult& c) { return !c.error.empty(); });
    return any_cell_failed ? exit_runtime : exit_ok;
}

int od(const OdArgs& a, std::ostream& out) {
    if (a.surrogate == !a.data.empty()) throw ConfigError("od needs exactly one of --data or --surrogate");
    std::optional<ODDataset> data;
    if (a.surrogate) {
        SurrogateConfig sc;
        sc.days = a.days;
        sc.slots = a.slots;
        sc.day_phi = a.day_phi;
        sc.noise_scale = a.noise;
        sc.seed = a.seed;
        try {
            data = generate_od_surrogate(sc);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        if (!a.write_data.empty()) emit(a.write_data, out, [&](std::ostream& s) { write_od_csv(*data, s); });
    } else {
        std::ifstream in(a.data);
        if (!in) throw ConfigError("cannot open '" + a.data + "'");
        data = read_od_csv(in, a.slots);
    }
    ODOptions opts;
    opts.ell = a.block_len;
    opts.bootstrap.replicates = a.boot_b;
    opts.bootstrap.seed = a.seed;
    opts.policy = parse_policy(a.degenerate);
    opts.ridge = a.ridge;
    const ODAnalysis analysis = analyze_od(*data, opts);
    emit(a.out, out, [&](std::ostream& s) { write_od_results(analysis, s); });
    return exit_ok;
}

int check(std::ostream& out) {
    bool ok = true;
    for (const auto& c : run_self_checks()) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        ok = ok && c.passed;
    }
    return ok ? exit_ok : exit_runtime;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gap bootstrap variance estimation for periodically sampled series", "gapboot"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker cap (0 = all cores)");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a simulation study grid");
    simulate_cmd->add_option("--config", sim.config_path, "JSON study definition");
    simulate_cmd->add_option("--model", sim.model, "ar2, ma2, periodic, mar, mma or mperiodic");
    simulate_cmd->add_option("--dist", sim.dist, "normal or exponential");
    simulate_cmd->add_option("--sigma0", sim.sigma0, "Innovation covariance: identity or toeplitz");
    simulate_cmd->add_option("--n", sim.n, "Series length");
    simulate_cmd->add_option("--p", sim.p, "Slots per period");
    simulate_cmd->add_option("--gap", sim.gap, "Unobserved steps between periods");
    simulate_cmd->add_option("--runs", sim.runs, "Simulation runs per cell");
    simulate_cmd->add_option("--truth-runs", sim.truth_runs, "Runs behind the Monte Carlo true standard error");
    simulate_cmd->add_option("--methods", sim.methods, "Comma list of gb1, gb2, ss, bb, naive");
    simulate_cmd->add_option("--seed", sim.seed, "Master seed");
    simulate_cmd->add_option("--block-len", sim.block_len, "Window length in periods (default 2 m^(1/3))");
    simulate_cmd->add_option("--boot-b", sim.boot_b, "Bootstrap replicates");
    simulate_cmd->add_option("--degenerate-corr", sim.degenerate, "error or zero");
    simulate_cmd->add_option("--out", sim.out, "CSV summary path (stdout if omitted)");
    simulate_cmd->add_option("--json", sim.json_out, "Full JSON result path");
    simulate_cmd->add_flag("--timing", sim.timing, "Add runtime_ms to the outputs");

    OdArgs oda;
    auto* od_cmd = app.add_subcommand("od", "Estimate split proportions and their standard errors");
    od_cmd->add_option("--data", oda.data, "CSV with day,slot,o1..o7,d1..d7");
    od_cmd->add_flag("--surrogate", oda.surrogate, "Generate synthetic volumes instead of reading --data");
    od_cmd->add_option("--slots", oda.slots, "Slots per day");
    od_cmd->add_option("--days", oda.days, "Surrogate days");
    od_cmd->add_option("--day-phi", oda.day_phi, "Surrogate day-to-day AR(1) coefficient");
    od_cmd->add_option("--noise", oda.noise, "Surrogate noise scale");
    od_cmd->add_option("--block-len", oda.block_len, "Window length in days (default 2 D^(1/3))");
    od_cmd->add_option("--boot-b", oda.boot_b, "Bootstrap replicates per slot");
    od_cmd->add_option("--seed", oda.seed, "Master seed");
    od_cmd->add_option("--ridge", oda.ridge, "Ridge added to every least-squares system");
    od_cmd->add_option("--degenerate-corr", oda.degenerate, "error or zero");
    od_cmd->add_option("--out", oda.out, "Result CSV path (stdout if omitted)");
    od_cmd->add_option("--write-data", oda.write_data, "Also save the surrogate volumes");

    app.add_subcommand("check", "Run the algebraic self-checks");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "gapboot: " << e.what() << "\n\n" << app.help();
        return exit_config;
    }

    try {
        set_max_threads(threads);
        if (simulate_cmd->parsed()) return simulate(sim, out, err);
        if (od_cmd->parsed()) return od(oda, out);
        return check(out);
    } catch (const ConfigError& e) {
        err << "gapboot: " << e.what() << "\n\n" << app.help();
        return exit_config;
    } catch (const std::exception& e) {
        err << "gapboot: error: " << e.what() << '\n';
        return exit_runtime;
    }
}

}  // namespace gapboot::cli
