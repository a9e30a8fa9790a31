#include "gapboot/study.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>

#include <nlohmann/json.hpp>

#include "gapboot/baselines.hpp"
#include "gapboot/errors.hpp"
#include "gapboot/gap_bootstrap_one.hpp"
#include "gapboot/parallel.hpp"
#include "gapboot/random.hpp"

namespace gapboot {

namespace {

constexpr std::uint64_t truth_stream = 0x7472'7574'6800ULL;

using Clock = std::chrono::steady_clock;

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool needs_window(const std::vector<Method>& methods) {
    for (auto m : methods) {
        if (m == Method::gb2 || m == Method::ss || m == Method::bb) return true;
    }
    return false;
}

struct RunOutcome {
    std::vector<double> se;
    std::vector<std::string> errors;
    std::vector<double> elapsed_ms;
};

RunOutcome run_once(const StudyConfig& cfg, const ModelSpec& model, const EstimatorSpec& est,
                    std::size_t ell, std::size_t cell, std::size_t run) {
    const auto count = cfg.methods.size();
    RunOutcome out{std::vector<double>(count, 0.0), std::vector<std::string>(count),
                   std::vector<double>(count, 0.0)};
    const DataArray data = generate_series(model, derive_key(cfg.seed, {cell, run, 0}));
    BootstrapConfig boot;
    boot.replicates = cfg.boot_b;
    boot.seed = derive_key(cfg.seed, {cell, run, 1});

    std::optional<RowEstimates> rows;
    auto shared_rows = [&]() -> const RowEstimates& {
        if (!rows) rows = bootstrap_rows(data, est, boot);
        return *rows;
    };

    for (std::size_t i = 0; i < count; ++i) {
        const auto start = Clock::now();
        try {
            switch (cfg.methods[i]) {
                case Method::gb1: out.se[i] = gb1_variance(shared_rows()).standard_error(); break;
                case Method::gb2:
                    out.se[i] = gap_bootstrap_two(data, est, shared_rows(), {ell, boot, cfg.policy}).standard_error();
                    break;
                case Method::ss: out.se[i] = subsampling_variance(data, est, ell).standard_error(); break;
                case Method::bb: out.se[i] = block_bootstrap_variance(data, est, ell, boot).standard_error(); break;
                case Method::naive: out.se[i] = naive_column_variance(data, est).variance.standard_error(); break;
            }
        } catch (const std::exception& e) {
            out.errors[i] = e.what();
        }
        out.elapsed_ms[i] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    return out;
}

CellResult run_cell(const StudyConfig& cfg, const ModelSpec& model, std::size_t cell) {
    CellResult result;
    result.model = model;
    if (cfg.methods.empty()) return result;
    try {
        model.validate();
        const EstimatorSpec est = study_estimator(model);
        if (needs_window(cfg.methods)) {
            result.ell = cfg.block_len != 0 ? cfg.block_len : default_block_length(model.periods(), cfg.block_c);
        }
        result.true_se = monte_carlo_true_se(model, est, cfg.truth_runs, derive_key(cfg.seed, {cell, truth_stream}))(0);

        std::vector<RunOutcome> runs(cfg.runs);
        parallel_for(cfg.runs, [&](std::size_t k) { runs[k] = run_once(cfg, model, est, result.ell, cell, k); });

        for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
            MethodResult mr;
            mr.method = cfg.methods[i];
            double sum = 0.0, sum_sq = 0.0;
            for (const auto& run : runs) {
                mr.runtime_ms += run.elapsed_ms[i];
                if (!run.errors[i].empty()) {
                    if (mr.failures++ == 0) mr.first_error = run.errors[i];
                    continue;
                }
                const double diff = run.se[i] - result.true_se;
                mr.differences.push_back(diff);
                sum += diff;
                sum_sq += diff * diff;
            }
            if (!mr.differences.empty()) {
                const auto ok = static_cast<double>(mr.differences.size());
                mr.bias = sum / ok;
                mr.mse = sum_sq / ok;
            } else {
                mr.bias = mr.mse = std::nan("");
            }
            result.methods.push_back(std::move(mr));
        }
    } catch (const std::exception& e) {
        result.error = e.what();
        result.methods.clear();
    }
    return result;
}

std::string cell_label(const ModelSpec& m) {
    return std::string(to_string(m.family)) + "/" + std::string(to_string(m.innovation)) + " n=" +
           std::to_string(m.n) + " p=" + std::to_string(m.p);
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::gb1: return "gb1";
        case Method::gb2: return "gb2";
        case Method::ss: return "ss";
        case Method::bb: return "bb";
        case Method::naive: return "naive";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view s) {
    for (auto m : {Method::gb1, Method::gb2, Method::ss, Method::bb, Method::naive}) {
        if (s == to_string(m)) return m;
    }
    return std::nullopt;
}

std::vector<std::string> StudyResult::failures() const {
    std::vector<std::string> out;
    for (const auto& cell : cells) {
        if (!cell.error.empty()) {
            out.push_back(cell_label(cell.model) + ": " + cell.error);
            continue;
        }
        for (const auto& m : cell.methods) {
            if (m.failures == 0) continue;
            out.push_back(cell_label(cell.model) + " " + std::string(to_string(m.method)) + ": " +
                          std::to_string(m.failures) + " failed runs, first: " + m.first_error);
        }
    }
    return out;
}

StudyResult run_study(const StudyConfig& config) {
    if (config.runs == 0 && !config.methods.empty()) throw ConfigError("study needs at least one run");
    StudyResult result;
    result.config = config;
    result.cells.reserve(config.cells.size());
    for (std::size_t c = 0; c < config.cells.size(); ++c) result.cells.push_back(run_cell(config, config.cells[c], c));
    return result;
}

void write_study_csv(const StudyResult& result, std::ostream& out, bool timing) {
    out << "model,dist,n,p,method,true_se,bias,mse,runs";
    if (timing) out << ",runtime_ms";
    out << '\n';
    for (const auto& cell : result.cells) {
        for (const auto& m : cell.methods) {
            out << to_string(cell.model.family) << ',' << to_string(cell.model.innovation) << ',' << cell.model.n
                << ',' << cell.model.p << ',' << to_string(m.method) << ',' << format_number(cell.true_se) << ','
                << format_number(m.bias) << ',' << format_number(m.mse) << ',' << m.differences.size();
            if (timing) out << ',' << format_number(std::round(m.runtime_ms * 1000.0) / 1000.0);
            out << '\n';
        }
    }
}

void write_study_json(const StudyResult& result, std::ostream& out, bool timing) {
    using nlohmann::json;
    const auto& cfg = result.config;
    json methods = json::array();
    for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
    json doc;
    doc["config"] = {{"seed", cfg.seed},         {"runs", cfg.runs},         {"truth_runs", cfg.truth_runs},
                     {"block_len", cfg.block_len}, {"block_c", cfg.block_c}, {"boot_b", cfg.boot_b},
                     {"methods", methods},
                     {"degenerate_corr", cfg.policy == DegeneratePolicy::error ? "error" : "zero"}};
    json cells = json::array();
    for (const auto& cell : result.cells) {
        json c;
        c["model"] = std::string(to_string(cell.model.family));
        c["dist"] = std::string(to_string(cell.model.innovation));
        c["n"] = cell.model.n;
        c["p"] = cell.model.p;
        c["gap"] = cell.model.gap_q;
        if (is_multivariate(cell.model.family)) c["sigma0"] = std::string(to_string(cell.model.covariance));
        c["ell"] = cell.ell;
        c["true_se"] = cell.true_se;
        if (!cell.error.empty()) c["error"] = cell.error;
        json ms = json::array();
        for (const auto& m : cell.methods) {
            json mj = {{"method", std::string(to_string(m.method))},
                       {"bias", m.bias},
                       {"mse", m.mse},
                       {"runs", m.differences.size()},
                       {"failures", m.failures},
                       {"differences", m.differences}};
            if (!m.first_error.empty()) mj["first_error"] = m.first_error;
            if (timing) mj["runtime_ms"] = m.runtime_ms;
            ms.push_back(std::move(mj));
        }
        c["methods"] = std::move(ms);
        cells.push_back(std::move(c));
    }
    doc["cells"] = std::move(cells);
    out << doc.dump(2) << '\n';
}

StudyConfig study_config_from_json(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("study config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("study config must be a JSON object");
    StudyConfig cfg;
    cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
    cfg.runs = get_or<std::size_t>(doc, "runs", cfg.runs);
    cfg.truth_runs = get_or<std::size_t>(doc, "truth_runs", cfg.truth_runs);
    cfg.block_len = get_or<std::size_t>(doc, "block_len", cfg.block_len);
    cfg.block_c = get_or<double>(doc, "block_c", cfg.block_c);
    cfg.boot_b = get_or<std::size_t>(doc, "boot_b", cfg.boot_b);
    const auto policy = get_or<std::string>(doc, "degenerate_corr", "error");
    if (policy == "error") cfg.policy = DegeneratePolicy::error;
    else if (policy == "zero") cfg.policy = DegeneratePolicy::zero;
    else throw ConfigError("degenerate_corr must be 'error' or 'zero'");

    for (const auto& name : get_or<std::vector<std::string>>(doc, "methods", {})) {
        const auto m = parse_method(name);
        if (!m) throw ConfigError("unknown method '" + name + "'");
        cfg.methods.push_back(*m);
    }
    if (doc.contains("cells") && !doc.at("cells").is_array()) throw ConfigError("'cells' must be an array");
    for (const auto& c : doc.value("cells", json::array())) {
        if (!c.is_object()) throw ConfigError("each cell must be a JSON object");
        const auto family = parse_model_family(get_or<std::string>(c, "model", ""));
        if (!family) throw ConfigError("cell has a missing or unknown 'model'");
        const auto dist = parse_innovation(get_or<std::string>(c, "dist", "normal"));
        if (!dist) throw ConfigError("cell has an unknown 'dist'");
        const auto cov = parse_covariance_choice(get_or<std::string>(c, "sigma0", "toeplitz"));
        if (!cov) throw ConfigError("cell has an unknown 'sigma0'");
        const auto n = get_or<std::size_t>(c, "n", 0);
        const auto p = get_or<std::size_t>(c, "p", 0);
        ModelSpec spec;
        try {
            spec = model_preset(*family, *dist, n, p, *cov);
            spec.gap_q = get_or<std::size_t>(c, "gap", spec.gap_q);
            spec.burn_in = get_or<std::size_t>(c, "burn_in", spec.burn_in);
            spec.sigma = get_or<double>(c, "sigma", spec.sigma);
            spec.mu = get_or<double>(c, "mu", spec.mu);
            spec.validate();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("invalid cell: ") + e.what());
        }
        cfg.cells.push_back(std::move(spec));
    }
    return cfg;
}

}  // namespace gapboot
