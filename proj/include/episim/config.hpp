#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "episim/graph.hpp"
#include "episim/model.hpp"

namespace episim {

struct GraphConfig {
    enum class Kind { ring, complete, random, file };
    Kind kind = Kind::ring;
    std::size_t n = 0;
    double p = 0.0;            // random
    std::uint64_t seed = 0;    // random
    std::string path;          // file (edge list)
};

struct InitConfig {
    enum class Kind { constant, vector };
    Kind kind = Kind::constant;
    double value = 0.5;
    std::vector<double> vec;
};

struct RunSection {
    double t_end = 0.0;
    std::optional<double> dt;              // per-scheme default when absent
    std::optional<std::size_t> save_every; // 10 single-path, 100 ensemble
    std::uint64_t seed = 0;
    std::optional<std::size_t> paths;      // ensemble size (default 100)
};

struct OutputConfig {
    std::string csv;     // empty: subcommand default under --out
    std::string summary; // empty: subcommand default under --out
    bool plot = false;   // also emit a gnuplot script
};

struct RunConfig {
    GraphConfig graph;
    double beta = 0.0;
    double delta = 0.0;
    NoiseSpec noise;
    InitConfig init;
    RunSection run;
    OutputConfig outputs;
};

// Parses and fully validates a JSON run configuration, applying
// defaults (init constant 0.5; noise model linear with m_i = cap).
// Malformed JSON or schema violations raise parse_error naming the
// field; physically invalid values raise validation_error.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical JSON form; parse_config(serialize_config(c)) is equivalent
// to c.
std::string serialize_config(const RunConfig& config);

ContactGraph build_graph(const GraphConfig& graph);
ModelParams make_params(const RunConfig& config);
StateVector make_init(const InitConfig& init, std::size_t n);

} // namespace episim
