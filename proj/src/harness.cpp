#include "thermolimit/harness.hpp"

#include "thermolimit/error.hpp"
#include "thermolimit/numerics.hpp"
#include "thermolimit/regularization.hpp"
#include "thermolimit/spin_boson.hpp"
#include "thermolimit/spin_ensemble.hpp"
#include "thermolimit/zurek_bath.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <numbers>
#include <set>
#include <thread>

namespace thermolimit::harness {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void config_error(const std::string& detail) {
    throw Error(ErrorKind::InvalidArgument, detail);
}

// Keys accepted by an experiment beyond its defaults.
std::set<std::string> optional_keys(Experiment e) {
    if (e == Experiment::SpinBoson || e == Experiment::Zurek) return {"t"};
    return {};
}

bool known_key(Experiment e, const std::string& key) {
    return default_parameters(e).contains(key) || optional_keys(e).count(key) > 0;
}

double get_double(const json& p, const char* key) {
    const json& v = p.at(key);
    if (!v.is_number()) config_error(std::string("parameter '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error(std::string("parameter '") + key + "' must be finite");
    return d;
}

std::size_t get_size(const json& p, const char* key) {
    const json& v = p.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        config_error(std::string("parameter '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

bool get_bool(const json& p, const char* key) {
    const json& v = p.at(key);
    if (!v.is_boolean()) config_error(std::string("parameter '") + key + "' must be true or false");
    return v.get<bool>();
}

std::vector<double> get_double_list(const json& p, const char* key) {
    const json& v = p.at(key);
    if (!v.is_array() || v.empty()) config_error(std::string("parameter '") + key + "' must be a non-empty array");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
            config_error(std::string("parameter '") + key + "' must hold finite numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::size_t> get_size_list(const json& p, const char* key) {
    const json& v = p.at(key);
    if (!v.is_array() || v.empty()) config_error(std::string("parameter '") + key + "' must be a non-empty array");
    std::vector<std::size_t> out;
    for (const json& x : v) {
        if (!x.is_number_integer() || x.get<std::int64_t>() < 1) {
            config_error(std::string("parameter '") + key + "' must hold positive integers");
        }
        out.push_back(x.get<std::size_t>());
    }
    return out;
}

// Either the single time "t" or a grid of t_points samples up to t_max.
// The grid includes t_max when `closed` and stops one step short otherwise.
std::vector<double> time_grid(const json& p, bool closed) {
    if (p.contains("t")) return {get_double(p, "t")};
    const double t_max = get_double(p, "t_max");
    const std::size_t points = get_size(p, "t_points");
    if (t_max < 0.0) config_error("t_max must be >= 0");
    if (points < 1 || (closed && points < 2 && t_max > 0.0)) config_error("t_points too small");
    std::vector<double> grid;
    const double denom = closed ? static_cast<double>(std::max<std::size_t>(points - 1, 1))
                                : static_cast<double>(points);
    for (std::size_t j = 0; j < points; ++j) grid.push_back(t_max * static_cast<double>(j) / denom);
    return grid;
}

void validate_parameters(Experiment e, const json& p, const std::optional<std::uint64_t>& seed) {
    switch (e) {
    case Experiment::Scaling: {
        if (!seed) config_error("scaling needs a seed");
        get_size_list(p, "n_list");
        ensemble::SiteSampler::uniform(get_double(p, "magnetization_lo"), get_double(p, "magnetization_hi"))
            .validate();
        ensemble::EnsembleConfig{2, get_double(p, "lambda")}.validate();
        break;
    }
    case Experiment::SpinBoson: {
        spinboson::SpinBosonConfig{get_size(p, "n"), get_double(p, "delta"), get_double(p, "omega"),
                                   get_double(p, "g"), get_size(p, "fock_dim")}
            .validate();
        time_grid(p, true);
        break;
    }
    case Experiment::Zurek: {
        zurek::BathConfig{get_size(p, "n"), get_double(p, "lambda"), get_bool(p, "thermodynamic_limit")}
            .validate();
        if (!(get_double(p, "window") > 0.0)) config_error("window must be > 0");
        time_grid(p, false);
        break;
    }
    case Experiment::Regularize: {
        const json& probe = p.at("probe");
        if (!probe.is_string() || (probe != "cos" && probe != "sin" && probe != "constant")) {
            config_error("probe must be one of cos, sin, constant");
        }
        get_double(p, "constant");
        regularization::RegularizationSchedule(get_double_list(p, "epsilons"), get_double_list(p, "windows"));
        break;
    }
    }
}

Artifact json_artifact(std::string name, const json& doc) { return {std::move(name), doc.dump(2) + "\n"}; }

Artifact data_artifact(const std::string& stem, Format format, const Table& table) {
    if (format == Format::Json) return json_artifact(stem + ".json", render_json(table));
    return {stem + ".csv", render_csv(table)};
}

std::string format_double(double d) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, res.ptr);
}

Cell cell_from_json(const json& v) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number()) return v.get<double>();
    return v.dump();
}

json cell_to_json(const Cell& c) {
    return std::visit([](const auto& v) { return json(v); }, c);
}

// ---- experiments -----------------------------------------------------------

RunOutput run_scaling(const json& p, std::uint64_t seed, Format format) {
    const auto n_list = get_size_list(p, "n_list");
    const auto sampler =
        ensemble::SiteSampler::uniform(get_double(p, "magnetization_lo"), get_double(p, "magnetization_hi"));
    const ensemble::ScalingTable result = ensemble::scaling_experiment(sampler, n_list, seed, get_double(p, "lambda"));

    RunOutput out;
    out.table.columns = {"n", "mean_energy", "delta_h", "ratio"};
    for (const auto& row : result.rows) {
        out.table.rows.push_back({static_cast<std::int64_t>(row.n), row.mean_energy, row.delta_h, row.ratio});
    }
    out.artifacts.push_back(data_artifact("scaling", format, out.table));
    out.artifacts.push_back(
        json_artifact("scaling_fit.json", {{"slope", result.fit.slope}, {"intercept", result.fit.intercept}}));
    return out;
}

RunOutput run_spinboson(const json& p, Format format) {
    const spinboson::SpinBosonConfig cfg{get_size(p, "n"), get_double(p, "delta"), get_double(p, "omega"),
                                         get_double(p, "g"), get_size(p, "fock_dim")};
    cfg.validate();
    const spinboson::ExactEvolver evolver(cfg);
    const numerics::StateVector psi0 = spinboson::initial_state(cfg);
    const std::vector<std::size_t> dims = cfg.factor_dims();
    const std::size_t keep[] = {0};

    RunOutput out;
    out.table.columns = {"n", "t", "quantity", "value"};
    const auto n = static_cast<std::int64_t>(cfg.n_spins);
    for (double t : time_grid(p, true)) {
        const numerics::StateVector psi = evolver.evolve(psi0, t);
        const numerics::ComplexMatrix rho = numerics::partial_trace(psi, dims, keep);
        const spinboson::FieldDiagnostics diag = spinboson::field_diagnostics(rho);
        const spinboson::FieldDensity leading = spinboson::leading_order_field_density(cfg, t);
        const auto pops = spinboson::field_populations(psi, cfg);

        auto emit = [&](const char* quantity, double value) { out.table.rows.push_back({n, t, quantity, value}); };
        emit("mean_n", diag.mean_n);
        emit("mandel_q", diag.mandel_q);
        emit("re_mean_a", diag.mean_a.real());
        emit("im_mean_a", diag.mean_a.imag());
        emit("leakage", spinboson::fock_leakage(pops));
        emit("trace_distance_leading", numerics::trace_distance(rho, leading.rho));
        if (cfg.delta != 0.0) {
            emit("residual_norm", (psi - spinboson::leading_order_state(cfg, t)).norm());
            emit("correction_norm", spinboson::first_order_correction(cfg, t).norm);
        }
    }
    out.artifacts.push_back(data_artifact("spinboson", format, out.table));
    return out;
}

RunOutput run_zurek(const json& p, Format format) {
    const zurek::BathConfig cfg{get_size(p, "n"), get_double(p, "lambda"), get_bool(p, "thermodynamic_limit")};
    const double window = get_double(p, "window");
    const std::vector<double> grid = time_grid(p, false);

    RunOutput out;
    out.table.columns = {"t", "rho_uu", "rho_dd", "re_rho_ud", "im_rho_ud"};
    for (const auto& row : zurek::trajectory(cfg, grid)) {
        out.table.rows.push_back({row.t, row.rho_uu, row.rho_dd, row.re_rho_ud, row.im_rho_ud});
    }
    const zurek::LimitReport report = zurek::limit_report(cfg, window);
    json limit = {{"n", nullptr},
                  {"window", report.window},
                  {"offdiag_bound", report.offdiag_bound},
                  {"offdiag_max", report.offdiag_max}};
    if (report.n) limit["n"] = *report.n;
    out.artifacts.push_back(data_artifact("zurek", format, out.table));
    out.artifacts.push_back(json_artifact("zurek_limit.json", limit));
    return out;
}

RunOutput run_regularize(const json& p, Format format) {
    const std::string name = p.at("probe").get<std::string>();
    const regularization::Probe probe = name == "cos"   ? regularization::Probe::Cos
                                        : name == "sin" ? regularization::Probe::Sin
                                                        : regularization::Probe::Constant;
    const regularization::RegularizationSchedule schedule(get_double_list(p, "epsilons"),
                                                          get_double_list(p, "windows"));
    const regularization::EquivalenceReport report =
        regularization::equivalence_report(probe, schedule, get_double(p, "constant"));

    RunOutput out;
    out.table.columns = {"regularizer", "parameter", "value"};
    for (const auto& row : report.rows) out.table.rows.push_back({row.regularizer, row.parameter, row.value});
    out.artifacts.push_back(data_artifact("regularize", format, out.table));
    out.artifacts.push_back(json_artifact("regularize_summary.json",
                                          {{"probe", name},
                                           {"limit", report.limit},
                                           {"abel_endpoint", report.abel_endpoint},
                                           {"time_average_endpoint", report.time_average_endpoint},
                                           {"cesaro_endpoint", report.cesaro_endpoint},
                                           {"max_endpoint_gap", report.max_endpoint_gap},
                                           {"converged", report.converged}}));
    return out;
}

std::vector<double> parse_range(const std::string& name, const json& spec) {
    std::vector<double> values;
    if (spec.is_array()) {
        for (const json& v : spec) {
            if (!v.is_number() || !std::isfinite(v.get<double>())) {
                config_error("range '" + name + "' must hold finite numbers");
            }
            values.push_back(v.get<double>());
        }
    } else if (spec.is_object()) {
        for (const auto& [key, _] : spec.items()) {
            if (key != "start" && key != "stop" && key != "count") {
                config_error("range '" + name + "' has unknown key '" + key + "'");
            }
        }
        if (!spec.contains("start") || !spec.contains("stop") || !spec.contains("count")) {
            config_error("range '" + name + "' needs start, stop and count");
        }
        const double start = get_double(spec, "start");
        const double stop = get_double(spec, "stop");
        const std::size_t count = get_size(spec, "count");
        for (std::size_t i = 0; i < count; ++i) {
            const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
            values.push_back(start + (stop - start) * frac);
        }
    } else {
        config_error("range '" + name + "' must be an array or {start, stop, count}");
    }
    if (values.empty()) config_error("range '" + name + "' is empty");
    std::sort(values.begin(), values.end());
    return values;
}

json point_value(const json& default_value, const std::string& name, double v) {
    if (default_value.is_number_integer()) {
        if (v != std::floor(v) || v < 0.0) config_error("range '" + name + "' must hold non-negative integers");
        return static_cast<std::int64_t>(v);
    }
    if (!default_value.is_number() && !default_value.is_null()) {
        config_error("parameter '" + name + "' cannot be swept");
    }
    return v;
}

} // namespace

const char* to_string(Experiment e) {
    switch (e) {
    case Experiment::Scaling: return "scaling";
    case Experiment::SpinBoson: return "spinboson";
    case Experiment::Zurek: return "zurek";
    case Experiment::Regularize: return "regularize";
    }
    return "?";
}

Experiment parse_experiment(const std::string& name) {
    if (name == "scaling") return Experiment::Scaling;
    if (name == "spinboson") return Experiment::SpinBoson;
    if (name == "zurek") return Experiment::Zurek;
    if (name == "regularize") return Experiment::Regularize;
    config_error("unknown experiment '" + name + "' (scaling, spinboson, zurek, regularize)");
}

Format parse_format(const std::string& name) {
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    config_error("unknown format '" + name + "' (csv, json)");
}

json default_parameters(Experiment e) {
    switch (e) {
    case Experiment::Scaling:
        return {{"n_list", {10, 100, 1000, 10000, 100000, 1000000}},
                {"magnetization_lo", 0.3},
                {"magnetization_hi", 0.9},
                {"lambda", 1.0}};
    case Experiment::SpinBoson:
        return {{"n", 2}, {"delta", 0.0}, {"omega", 1.0}, {"g", 0.5}, {"fock_dim", 0},
                {"t_max", 2.0 * kTwoPi}, {"t_points", 16}};
    case Experiment::Zurek:
        return {{"n", 10}, {"lambda", 1.0}, {"thermodynamic_limit", false},
                {"t_max", kTwoPi}, {"t_points", 50}, {"window", 100.0}};
    case Experiment::Regularize:
        return {{"probe", "cos"},
                {"constant", 1.0},
                {"epsilons", {1e-1, 1e-2, 1e-3, 1e-4}},
                {"windows", {1e1, 1e2, 1e3, 1e4}}};
    }
    return json::object();
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) config_error("config must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        static const std::set<std::string> allowed = {"experiment", "parameters", "seed",
                                                      "output_path", "format", "sweep"};
        if (!allowed.count(key)) config_error("unknown config key '" + key + "'");
    }
    if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
        config_error("config needs an 'experiment' string");
    }

    ExperimentConfig cfg;
    cfg.experiment = parse_experiment(doc["experiment"].get<std::string>());
    cfg.parameters = default_parameters(cfg.experiment);
    if (doc.contains("parameters")) {
        const json& given = doc["parameters"];
        if (!given.is_object()) config_error("'parameters' must be an object");
        for (const auto& [key, value] : given.items()) {
            if (!known_key(cfg.experiment, key)) {
                config_error("unknown parameter '" + key + "' for experiment " + to_string(cfg.experiment));
            }
            cfg.parameters[key] = value;
        }
    }
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
            config_error("'seed' must be a non-negative integer");
        }
        cfg.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("output_path")) {
        if (!doc["output_path"].is_string()) config_error("'output_path' must be a string");
        cfg.output_path = doc["output_path"].get<std::string>();
    }
    if (doc.contains("format")) {
        if (!doc["format"].is_string()) config_error("'format' must be a string");
        cfg.format = parse_format(doc["format"].get<std::string>());
    }
    validate_parameters(cfg.experiment, cfg.parameters, cfg.seed);
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json doc = {{"experiment", to_string(cfg.experiment)},
                {"parameters", cfg.parameters},
                {"output_path", cfg.output_path},
                {"format", cfg.format == Format::Csv ? "csv" : "json"}};
    doc["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    return doc;
}

std::string render_csv(const Table& table) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += quote(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const auto* d = std::get_if<double>(&row[i])) out += format_double(*d);
            else if (const auto* n = std::get_if<std::int64_t>(&row[i])) out += std::to_string(*n);
            else out += quote(std::get<std::string>(row[i]));
        }
        out += '\n';
    }
    return out;
}

json render_json(const Table& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_to_json(row[i]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

RunOutput run(const ExperimentConfig& cfg) {
    validate_parameters(cfg.experiment, cfg.parameters, cfg.seed);
    switch (cfg.experiment) {
    case Experiment::Scaling: return run_scaling(cfg.parameters, *cfg.seed, cfg.format);
    case Experiment::SpinBoson: return run_spinboson(cfg.parameters, cfg.format);
    case Experiment::Zurek: return run_zurek(cfg.parameters, cfg.format);
    case Experiment::Regularize: return run_regularize(cfg.parameters, cfg.format);
    }
    config_error("unknown experiment");
}

SweepConfig parse_sweep_config(const json& doc) {
    SweepConfig cfg;
    cfg.base = parse_config(doc);
    if (!doc.contains("sweep") || !doc["sweep"].is_object()) config_error("config needs a 'sweep' object");
    const json& sweep = doc["sweep"];
    for (const auto& [key, _] : sweep.items()) {
        if (key != "ranges" && key != "max_points") config_error("unknown sweep key '" + key + "'");
    }
    if (sweep.contains("max_points")) cfg.max_points = get_size(sweep, "max_points");
    if (!sweep.contains("ranges") || !sweep["ranges"].is_object() || sweep["ranges"].empty()) {
        config_error("'sweep.ranges' must be a non-empty object");
    }
    const json defaults = default_parameters(cfg.base.experiment);
    for (const auto& [name, spec] : sweep["ranges"].items()) {
        if (!known_key(cfg.base.experiment, name)) {
            config_error("unknown parameter '" + name + "' in sweep ranges");
        }
        SweepRange range{name, parse_range(name, spec)};
        const json def = defaults.contains(name) ? defaults[name] : json(nullptr);
        for (double v : range.values) point_value(def, name, v);
        cfg.ranges.push_back(std::move(range));
    }
    std::size_t total = 1;
    for (const auto& r : cfg.ranges) {
        if (total > cfg.max_points / r.values.size() + 1) config_error("sweep exceeds max_points");
        total *= r.values.size();
    }
    if (total > cfg.max_points) {
        config_error("sweep has " + std::to_string(total) + " points, above max_points " +
                     std::to_string(cfg.max_points));
    }
    return cfg;
}

json to_json(const SweepConfig& cfg) {
    json doc = to_json(cfg.base);
    json ranges = json::object();
    for (const auto& r : cfg.ranges) ranges[r.name] = r.values;
    doc["sweep"] = {{"ranges", ranges}, {"max_points", cfg.max_points}};
    return doc;
}

RunOutput sweep(const SweepConfig& cfg, unsigned jobs) {
    if (cfg.ranges.empty()) config_error("sweep has no ranges");
    const json defaults = default_parameters(cfg.base.experiment);

    // Odometer over sorted ranges (sorted by name) gives the canonical order.
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> idx(cfg.ranges.size(), 0);
    for (bool done = false; !done;) {
        std::vector<double> point;
        for (std::size_t k = 0; k < cfg.ranges.size(); ++k) point.push_back(cfg.ranges[k].values[idx[k]]);
        points.push_back(std::move(point));
        if (points.size() > cfg.max_points) config_error("sweep exceeds max_points");
        for (std::size_t k = cfg.ranges.size();;) {
            if (k == 0) {
                done = true;
                break;
            }
            --k;
            if (++idx[k] < cfg.ranges[k].values.size()) break;
            idx[k] = 0;
        }
    }

    std::vector<ExperimentConfig> configs;
    for (const auto& point : points) {
        ExperimentConfig pc = cfg.base;
        pc.format = Format::Csv;
        for (std::size_t k = 0; k < cfg.ranges.size(); ++k) {
            const std::string& name = cfg.ranges[k].name;
            const json def = defaults.contains(name) ? defaults[name] : json(nullptr);
            pc.parameters[name] = point_value(def, name, point[k]);
        }
        validate_parameters(pc.experiment, pc.parameters, pc.seed);
        configs.push_back(std::move(pc));
    }

    std::vector<Table> tables(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                tables[i] = run(configs[i]).table;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    RunOutput out;
    std::vector<std::size_t> prefix; // swept columns not already in the table
    for (std::size_t k = 0; k < cfg.ranges.size(); ++k) {
        const auto& cols = tables.front().columns;
        if (std::find(cols.begin(), cols.end(), cfg.ranges[k].name) == cols.end()) {
            prefix.push_back(k);
            out.table.columns.push_back(cfg.ranges[k].name);
        }
    }
    out.table.columns.insert(out.table.columns.end(), tables.front().columns.begin(),
                             tables.front().columns.end());
    for (std::size_t i = 0; i < tables.size(); ++i) {
        for (const auto& row : tables[i].rows) {
            std::vector<Cell> full;
            for (std::size_t k : prefix) full.push_back(cell_from_json(configs[i].parameters[cfg.ranges[k].name]));
            full.insert(full.end(), row.begin(), row.end());
            out.table.rows.push_back(std::move(full));
        }
    }
    out.artifacts.push_back(
        data_artifact(std::string(to_string(cfg.base.experiment)) + "_sweep", cfg.base.format, out.table));
    return out;
}

void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts,
                     const json& manifest) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& contents) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        f << contents;
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    };
    for (const auto& a : artifacts) write(a.filename, a.contents);
    write("manifest.json", manifest.dump(2) + "\n");
}

json make_manifest(const std::string& command, const json& config, double wall_time_seconds,
                   const std::vector<Artifact>& artifacts) {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json files = json::array();
    for (const auto& a : artifacts) files.push_back(a.filename);
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"command", command},
            {"config", config},
            {"files", files},
            {"wall_time_seconds", wall_time_seconds},
            {"timestamp", stamp}};
}

} // namespace thermolimit::harness
