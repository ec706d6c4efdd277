#include "episim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "episim/errors.hpp"

namespace episim {
namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why)
{
    throw parse_error("config field '" + field + "': " + why);
}

const json& require_object(const json& j, const std::string& field)
{
    if (!j.is_object())
        bad_field(field, "expected an object");
    return j;
}

void reject_unknown_keys(const json& j, const std::string& section,
                         std::initializer_list<const char*> known)
{
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            bad_field(section.empty() ? key : section + "." + key, "unknown field");
    }
}

const json* find(const json& j, const char* key)
{
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& field)
{
    if (!j.is_number())
        bad_field(field, "expected a number");
    return j.get<double>();
}

std::uint64_t get_uint(const json& j, const std::string& field)
{
    if (!j.is_number_unsigned())
        bad_field(field, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& field)
{
    if (!j.is_string())
        bad_field(field, "expected a string");
    return j.get<std::string>();
}

GraphConfig parse_graph(const json& j)
{
    require_object(j, "graph");
    reject_unknown_keys(j, "graph", {"kind", "n", "p", "seed", "path"});
    GraphConfig g;
    const json* kind = find(j, "kind");
    if (!kind)
        bad_field("graph.kind", "missing");
    const std::string k = get_string(*kind, "graph.kind");
    if (k == "ring")
        g.kind = GraphConfig::Kind::ring;
    else if (k == "complete")
        g.kind = GraphConfig::Kind::complete;
    else if (k == "random")
        g.kind = GraphConfig::Kind::random;
    else if (k == "file")
        g.kind = GraphConfig::Kind::file;
    else
        bad_field("graph.kind", "must be ring|complete|random|file");

    const json* n = find(j, "n");
    if (!n)
        bad_field("graph.n", "missing");
    g.n = static_cast<std::size_t>(get_uint(*n, "graph.n"));

    if (const json* p = find(j, "p"))
        g.p = get_number(*p, "graph.p");
    else if (g.kind == GraphConfig::Kind::random)
        bad_field("graph.p", "missing (required for random graphs)");

    if (const json* seed = find(j, "seed"))
        g.seed = get_uint(*seed, "graph.seed");

    if (const json* path = find(j, "path"))
        g.path = get_string(*path, "graph.path");
    else if (g.kind == GraphConfig::Kind::file)
        bad_field("graph.path", "missing (required for file graphs)");

    if (g.kind == GraphConfig::Kind::random && !(g.p >= 0.0 && g.p <= 1.0))
        throw validation_error("graph.p must lie in [0, 1]");
    if (g.kind == GraphConfig::Kind::file && !std::filesystem::exists(g.path))
        throw validation_error("graph.path '" + g.path + "' does not exist");
    return g;
}

NoiseSpec parse_noise(const json* j)
{
    if (!j)
        return NoiseSpec{}; // no noise section: deterministic model (M = 0)
    require_object(*j, "params.noise");
    reject_unknown_keys(*j, "params.noise", {"model", "m", "cap"});

    const json* cap = find(*j, "cap");
    if (!cap)
        bad_field("params.noise.cap", "missing");
    const double cap_value = get_number(*cap, "params.noise.cap");

    auto model = NoiseSpec::Model::linear;
    if (const json* m = find(*j, "model")) {
        const std::string name = get_string(*m, "params.noise.model");
        if (name == "linear")
            model = NoiseSpec::Model::linear;
        else if (name == "logistic")
            model = NoiseSpec::Model::logistic;
        else
            bad_field("params.noise.model", "must be linear|logistic");
    }

    std::vector<double> levels{cap_value}; // default m_i = cap
    if (const json* m = find(*j, "m")) {
        if (m->is_number()) {
            levels = {m->get<double>()};
        } else if (m->is_array()) {
            levels.clear();
            for (const auto& v : *m)
                levels.push_back(get_number(v, "params.noise.m[]"));
            if (levels.empty())
                bad_field("params.noise.m", "array must not be empty");
        } else {
            bad_field("params.noise.m", "expected a number or an array of numbers");
        }
    }
    return {model, std::move(levels), cap_value};
}

InitConfig parse_init(const json* j)
{
    InitConfig init; // default: constant 0.5
    if (!j)
        return init;
    require_object(*j, "init");
    reject_unknown_keys(*j, "init", {"kind", "value"});
    const json* kind = find(*j, "kind");
    if (!kind)
        bad_field("init.kind", "missing");
    const std::string k = get_string(*kind, "init.kind");
    const json* value = find(*j, "value");
    if (!value)
        bad_field("init.value", "missing");
    if (k == "constant") {
        init.kind = InitConfig::Kind::constant;
        init.value = get_number(*value, "init.value");
        if (!(init.value >= 0.0 && init.value <= 1.0))
            throw validation_error("init.value must lie in [0, 1]");
    } else if (k == "vector") {
        init.kind = InitConfig::Kind::vector;
        if (!value->is_array())
            bad_field("init.value", "expected an array for init.kind=vector");
        for (const auto& v : *value) {
            const double e = get_number(v, "init.value[]");
            if (!(e >= 0.0 && e <= 1.0))
                throw validation_error("init.value entries must lie in [0, 1]");
            init.vec.push_back(e);
        }
    } else {
        bad_field("init.kind", "must be constant|vector");
    }
    return init;
}

RunSection parse_run(const json& j)
{
    require_object(j, "run");
    reject_unknown_keys(j, "run", {"t_end", "dt", "save_every", "seed", "paths"});
    RunSection run;
    const json* t_end = find(j, "t_end");
    if (!t_end)
        bad_field("run.t_end", "missing");
    run.t_end = get_number(*t_end, "run.t_end");
    if (!(run.t_end > 0.0))
        throw validation_error("run.t_end must be positive");

    const json* seed = find(j, "seed");
    if (!seed)
        bad_field("run.seed", "missing");
    run.seed = get_uint(*seed, "run.seed");

    if (const json* dt = find(j, "dt")) {
        run.dt = get_number(*dt, "run.dt");
        if (!(*run.dt > 0.0))
            throw validation_error("run.dt must be positive");
    }
    if (const json* save = find(j, "save_every")) {
        run.save_every = static_cast<std::size_t>(get_uint(*save, "run.save_every"));
        if (*run.save_every == 0)
            throw validation_error("run.save_every must be at least 1");
    }
    if (const json* paths = find(j, "paths")) {
        run.paths = static_cast<std::size_t>(get_uint(*paths, "run.paths"));
        if (*run.paths == 0)
            throw validation_error("run.paths must be at least 1");
    }
    return run;
}

OutputConfig parse_outputs(const json* j)
{
    OutputConfig out;
    if (!j)
        return out;
    require_object(*j, "outputs");
    reject_unknown_keys(*j, "outputs", {"csv", "summary", "plot"});
    if (const json* csv = find(*j, "csv"))
        out.csv = get_string(*csv, "outputs.csv");
    if (const json* summary = find(*j, "summary"))
        out.summary = get_string(*summary, "outputs.summary");
    if (const json* plot = find(*j, "plot")) {
        if (!plot->is_boolean())
            bad_field("outputs.plot", "expected a boolean");
        out.plot = plot->get<bool>();
    }
    return out;
}

} // namespace

RunConfig parse_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("config is not valid JSON: ") + e.what());
    }
    require_object(root, "config");
    reject_unknown_keys(root, "", {"graph", "params", "init", "run", "outputs"});

    const json* graph = find(root, "graph");
    if (!graph)
        bad_field("graph", "missing");
    const json* params = find(root, "params");
    if (!params)
        bad_field("params", "missing");
    require_object(*params, "params");
    reject_unknown_keys(*params, "params", {"beta", "delta", "noise"});
    const json* run = find(root, "run");
    if (!run)
        bad_field("run", "missing");

    RunConfig config;
    config.graph = parse_graph(*graph);

    const json* beta = find(*params, "beta");
    if (!beta)
        bad_field("params.beta", "missing");
    config.beta = get_number(*beta, "params.beta");
    const json* delta = find(*params, "delta");
    if (!delta)
        bad_field("params.delta", "missing");
    config.delta = get_number(*delta, "params.delta");

    config.noise = parse_noise(find(*params, "noise"));
    config.init = parse_init(find(root, "init"));
    config.run = parse_run(*run);
    config.outputs = parse_outputs(find(root, "outputs"));

    // Trigger the remaining physical validations (positivity, level/cap
    // consistency, shape agreement with the graph).
    make_params(config);
    if (config.noise.levels.size() != 1 &&
        config.noise.levels.size() != config.graph.n)
        throw validation_error("params.noise.m has " +
                               std::to_string(config.noise.levels.size()) +
                               " entries but graph.n is " +
                               std::to_string(config.graph.n));
    if (config.init.kind == InitConfig::Kind::vector &&
        config.init.vec.size() != config.graph.n)
        throw validation_error("init.value has " +
                               std::to_string(config.init.vec.size()) +
                               " entries but graph.n is " +
                               std::to_string(config.graph.n));
    return config;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const RunConfig& config)
{
    json root;
    json& graph = root["graph"];
    switch (config.graph.kind) {
    case GraphConfig::Kind::ring: graph["kind"] = "ring"; break;
    case GraphConfig::Kind::complete: graph["kind"] = "complete"; break;
    case GraphConfig::Kind::random: graph["kind"] = "random"; break;
    case GraphConfig::Kind::file: graph["kind"] = "file"; break;
    }
    graph["n"] = config.graph.n;
    if (config.graph.kind == GraphConfig::Kind::random) {
        graph["p"] = config.graph.p;
        graph["seed"] = config.graph.seed;
    }
    if (config.graph.kind == GraphConfig::Kind::file)
        graph["path"] = config.graph.path;

    json& params = root["params"];
    params["beta"] = config.beta;
    params["delta"] = config.delta;
    params["noise"]["model"] = to_string(config.noise.model);
    params["noise"]["cap"] = config.noise.cap;
    params["noise"]["m"] = config.noise.levels.size() == 1
                               ? json(config.noise.levels.front())
                               : json(config.noise.levels);

    json& init = root["init"];
    if (config.init.kind == InitConfig::Kind::constant) {
        init["kind"] = "constant";
        init["value"] = config.init.value;
    } else {
        init["kind"] = "vector";
        init["value"] = config.init.vec;
    }

    json& run = root["run"];
    run["t_end"] = config.run.t_end;
    run["seed"] = config.run.seed;
    if (config.run.dt)
        run["dt"] = *config.run.dt;
    if (config.run.save_every)
        run["save_every"] = *config.run.save_every;
    if (config.run.paths)
        run["paths"] = *config.run.paths;

    json& outputs = root["outputs"];
    if (!config.outputs.csv.empty())
        outputs["csv"] = config.outputs.csv;
    if (!config.outputs.summary.empty())
        outputs["summary"] = config.outputs.summary;
    outputs["plot"] = config.outputs.plot;

    return root.dump(2) + "\n";
}

ContactGraph build_graph(const GraphConfig& graph)
{
    switch (graph.kind) {
    case GraphConfig::Kind::ring:
        return build_ring(graph.n);
    case GraphConfig::Kind::complete:
        return build_complete(graph.n);
    case GraphConfig::Kind::random:
        return build_random(graph.n, graph.p, graph.seed);
    case GraphConfig::Kind::file: {
        std::ifstream in(graph.path);
        if (!in)
            throw io_error("cannot open edge list '" + graph.path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        return load_edge_list(text.str(), graph.n);
    }
    }
    throw validation_error("unknown graph kind");
}

ModelParams make_params(const RunConfig& config)
{
    return {config.beta, config.delta, config.noise};
}

StateVector make_init(const InitConfig& init, std::size_t n)
{
    if (init.kind == InitConfig::Kind::constant)
        return StateVector(n, init.value);
    if (init.vec.size() != n)
        throw validation_error("init vector has " + std::to_string(init.vec.size()) +
                               " entries but the graph has " + std::to_string(n) +
                               " nodes");
    return init.vec;
}

} // namespace episim
