// thermolimit: batch front end for the four experiments and the acceptance suite.
//
//   thermolimit run zurek --n 10 --lambda 1 --out out/zurek
//   thermolimit run --config configs/scaling.json
//   thermolimit sweep --config configs/zurek_sweep.json --jobs 4
//   thermolimit verify
//
// Exit codes: 0 success, 1 numerical or acceptance failure, 2 usage or config error.

#include "thermolimit/acceptance.hpp"
#include "thermolimit/error.hpp"
#include "thermolimit/harness.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;
namespace harness = thermolimit::harness;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string format;
};

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw UsageError("malformed JSON in '" + path + "': " + e.what());
    }
}

void apply_common(json& doc, const CommonOptions& opts) {
    if (opts.seed) doc["seed"] = *opts.seed;
    if (!opts.format.empty()) doc["format"] = opts.format;
    if (!opts.out.empty()) doc["output_path"] = opts.out;
}

// key=value with value read as JSON when it parses, as a string otherwise.
void apply_set(json& params, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    params[key] = value.is_discarded() ? json(raw) : value;
}

std::string output_dir(const std::string& configured, const std::string& fallback) {
    return configured.empty() ? fallback : configured;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments on thermodynamic limits and decoherence"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(harness::kToolVersion));

    CommonOptions run_opts;
    std::string run_experiment;
    std::vector<std::string> run_sets;
    std::optional<std::int64_t> run_n;
    std::optional<double> run_lambda;
    std::optional<std::int64_t> run_fock_dim;
    CLI::App* run = app.add_subcommand("run", "Run one experiment and write its data files");
    run->add_option("experiment", run_experiment, "scaling, spinboson, zurek or regularize");
    run->add_option("--config", run_opts.config_path, "JSON config file");
    run->add_option("--out", run_opts.out, "Output directory (default out/<experiment>)");
    run->add_option("--seed", run_opts.seed, "Random seed");
    run->add_option("--format", run_opts.format, "Data format")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--n", run_n, "Number of spins");
    run->add_option("--lambda", run_lambda, "Coupling lambda");
    run->add_option("--fock-dim", run_fock_dim, "Fock dimension (0 = leakage-sized)");
    run->add_option("--set", run_sets, "Parameter override key=value (repeatable)");

    CommonOptions sweep_opts;
    unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
    CLI::App* sweep = app.add_subcommand("sweep", "Run the cross product of parameter ranges");
    sweep->add_option("--config", sweep_opts.config_path, "JSON config file with a 'sweep' object")->required();
    sweep->add_option("--out", sweep_opts.out, "Output directory (default out/<experiment>_sweep)");
    sweep->add_option("--seed", sweep_opts.seed, "Random seed");
    sweep->add_option("--format", sweep_opts.format, "Data format")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::string verify_out;
    std::size_t verify_fock_dim = 0;
    CLI::App* verify = app.add_subcommand("verify", "Run the acceptance suite");
    verify->add_option("--out", verify_out, "Also write acceptance.csv and manifest.json here");
    verify->add_option("--fock-dim", verify_fock_dim, "Force the spin-boson Fock dimension");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (*run) {
            json doc = run_opts.config_path.empty() ? json::object() : load_config(run_opts.config_path);
            if (!doc.is_object()) throw UsageError("config must be a JSON object");
            if (!run_experiment.empty()) {
                if (doc.contains("experiment") && doc["experiment"] != run_experiment) {
                    throw UsageError("experiment '" + run_experiment + "' conflicts with the config");
                }
                doc["experiment"] = run_experiment;
            }
            if (!doc.contains("experiment")) throw UsageError("name an experiment or pass --config");
            if (!doc.contains("parameters")) doc["parameters"] = json::object();
            json& params = doc["parameters"];
            if (!params.is_object()) throw UsageError("'parameters' must be an object");
            if (run_n) params["n"] = *run_n;
            if (run_lambda) params["lambda"] = *run_lambda;
            if (run_fock_dim) params["fock_dim"] = *run_fock_dim;
            for (const auto& s : run_sets) apply_set(params, s);
            apply_common(doc, run_opts);

            const harness::ExperimentConfig cfg = harness::parse_config(doc);
            const harness::RunOutput out = harness::run(cfg);
            const std::string dir =
                output_dir(cfg.output_path, std::string("out/") + harness::to_string(cfg.experiment));
            harness::write_artifacts(dir, out.artifacts,
                                     harness::make_manifest("run", harness::to_json(cfg), seconds_since(start),
                                                            out.artifacts));
            std::cout << "wrote " << out.artifacts.size() << " data files and manifest.json to " << dir << '\n';
            return kExitOk;
        }

        if (*sweep) {
            json doc = load_config(sweep_opts.config_path);
            if (!doc.is_object()) throw UsageError("config must be a JSON object");
            apply_common(doc, sweep_opts);
            const harness::SweepConfig cfg = harness::parse_sweep_config(doc);
            const harness::RunOutput out = harness::sweep(cfg, jobs);
            const std::string dir = output_dir(
                cfg.base.output_path, std::string("out/") + harness::to_string(cfg.base.experiment) + "_sweep");
            json config = harness::to_json(cfg);
            config["jobs"] = jobs;
            harness::write_artifacts(dir, out.artifacts,
                                     harness::make_manifest("sweep", config, seconds_since(start), out.artifacts));
            std::cout << "wrote " << out.table.rows.size() << " rows to " << dir << '\n';
            return kExitOk;
        }

        thermolimit::acceptance::Options options;
        options.fock_dim = verify_fock_dim;
        const auto results = thermolimit::acceptance::run_suite(options);
        int failed = 0;
        for (const auto& r : results) {
            std::cout << thermolimit::acceptance::format_line(r) << '\n';
            if (!r.passed) ++failed;
            if (r.error) std::cerr << "criterion " << r.id << " failed with " << *r.error << '\n';
        }
        std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
        if (!verify_out.empty()) {
            const harness::Table table = thermolimit::acceptance::results_table(results);
            const std::vector<harness::Artifact> artifacts = {{"acceptance.csv", harness::render_csv(table)}};
            harness::write_artifacts(
                verify_out, artifacts,
                harness::make_manifest("verify", {{"fock_dim", verify_fock_dim}}, seconds_since(start), artifacts));
        }
        return failed == 0 ? kExitOk : kExitFailure;
    } catch (const UsageError& e) {
        std::cerr << "thermolimit: " << e.what() << '\n';
        return kExitUsage;
    } catch (const thermolimit::Error& e) {
        std::cerr << "thermolimit: " << e.what() << '\n';
        return thermolimit::is_numerical_failure(e.kind()) ? kExitFailure : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "thermolimit: " << e.what() << '\n';
        return kExitUsage;
    }
}
