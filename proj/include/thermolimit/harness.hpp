// harness.hpp: experiment configs, long-format tables and artifact files
//
// A config names one of four experiments and a flat parameter map:
//
//   {"experiment": "zurek", "parameters": {"n": 10, "lambda": 1.0},
//    "seed": 42, "output_path": "out/zurek", "format": "csv"}
//
// Missing parameters take the defaults listed by default_parameters; unknown
// keys are rejected. Every run is a pure function of (config, seed), so the
// data files it produces are byte-identical across executions.

#pragma once

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace thermolimit::harness {

inline constexpr const char* kToolName = "thermolimit";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Experiment { Scaling, SpinBoson, Zurek, Regularize };
enum class Format { Csv, Json };

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& name);
Format parse_format(const std::string& name);

nlohmann::json default_parameters(Experiment e);

struct ExperimentConfig {
    Experiment experiment = Experiment::Zurek;
    nlohmann::json parameters = nlohmann::json::object(); // complete after parse_config
    std::optional<std::uint64_t> seed;
    std::string output_path;
    Format format = Format::Csv;
};

// Validates names, merges defaults and checks every parameter's type and range.
// Throws Error(InvalidArgument) on any problem.
ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// RFC 4180 CSV: ',' delimiter, '.' decimal point, header row, LF endings.
// Doubles use the shortest round-trip representation.
std::string render_csv(const Table& table);
// An array of row objects keyed by column name.
nlohmann::json render_json(const Table& table);

struct Artifact {
    std::string filename;
    std::string contents;
};

struct RunOutput {
    Table table;
    std::vector<Artifact> artifacts; // data file first, then sidecars
};

// Runs one experiment. Throws the originating module's Error on failure.
RunOutput run(const ExperimentConfig& cfg);

// A swept parameter: an explicit list, or `count` evenly spaced values from
// `start` to `stop` inclusive.
struct SweepRange {
    std::string name;
    std::vector<double> values;
};

inline constexpr std::size_t kDefaultMaxPoints = 10000;

struct SweepConfig {
    ExperimentConfig base;
    std::vector<SweepRange> ranges; // sorted by name
    std::size_t max_points = kDefaultMaxPoints;
};

// Reads the "sweep" object of a config document:
//   "sweep": {"ranges": {"n": [1, 2, 3], "t": {"start": 0, "stop": 6, "count": 4}},
//             "max_points": 1000}
SweepConfig parse_sweep_config(const nlohmann::json& doc);
nlohmann::json to_json(const SweepConfig& cfg);

// Executes the cross product of ranges on up to `jobs` threads. Rows are
// ordered by parameter tuple, then by the experiment's own row order.
RunOutput sweep(const SweepConfig& cfg, unsigned jobs);

// Writes the artifacts and a manifest.json into `dir`, creating it if needed.
void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts,
                     const nlohmann::json& manifest);

// Manifest fields shared by every command. Only `timestamp` and
// `wall_time_seconds` vary between identical runs.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             double wall_time_seconds, const std::vector<Artifact>& artifacts);

} // namespace thermolimit::harness
