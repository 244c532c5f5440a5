#include "gsp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace gsp {

std::string library_version() { return "gspurify 1.0.0"; }

Graph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
        throw InvalidArgument("graph JSON needs 'vertices' and 'edges'");
    uint32_t n = j.at("vertices").get<uint32_t>();
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw InvalidArgument("each edge must be a [u, v] pair");
        edges.push_back({e[0].get<uint32_t>(), e[1].get<uint32_t>()});
    }
    return build_graph(edges, n);
}

nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["vertices"] = g.vertex_count;
    auto edges = nlohmann::json::array();
    for (auto [u, v] : g.edges) edges.push_back({u, v});
    j["edges"] = edges;
    return j;
}

Graph load_graph_ref(const std::string& ref) {
    if (ref.find(':') != std::string::npos) return parse_standard(ref);
    std::ifstream in(ref);
    if (!in) throw InvalidArgument("cannot open graph file '" + ref + "'");
    nlohmann::json j;
    in >> j;
    return graph_from_json(j);
}

std::vector<double> GridSpec::values() const {
    if (!(step > 0.0) || hi < lo) throw InvalidArgument("grid wants lo <= hi and step > 0");
    std::vector<double> out;
    for (double v = lo; v <= hi + step * 1e-9; v += step) out.push_back(v);
    return out;
}

GridSpec parse_grid(const std::string& spec) {
    GridSpec g;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &g.lo, &g.hi, &g.step) != 3)
        throw InvalidArgument("grid spec must be lo:hi:step, got '" + spec + "'");
    return g;
}

namespace {

const std::set<std::string> kCommands = {"recurse",      "fixed-point", "threshold", "mc",
                                         "dense-verify", "tradeoff",    "creation"};

double get_unit(const nlohmann::json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    double v = j.at(key).get<double>();
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must be in [0,1]");
    return v;
}

}  // namespace

RunConfig validate_config(const nlohmann::json& raw) {
    if (!raw.is_object()) throw ConfigError("$", "config must be a JSON object");
    RunConfig c;
    if (!raw.contains("command")) throw ConfigError("command", "required");
    c.command = raw.at("command").get<std::string>();
    if (!kCommands.count(c.command)) throw ConfigError("command", "unknown command '" + c.command + "'");

    c.out_dir = raw.value("out", std::string("out/") + c.command);
    c.graph_ref = raw.value("graph", std::string());
    c.map_spec = raw.value("map", std::string());
    c.protocol = raw.value("protocol", std::string("three-copy"));
    c.stage = raw.value("stage", std::string("full"));
    c.degree = raw.value("degree", 2);
    if (c.degree < 1) throw ConfigError("degree", "must be >= 1");
    c.q = get_unit(raw, "q", 0.05);
    if (raw.contains("noise") && raw.at("noise").is_object()) {
        const auto& n = raw.at("noise");
        c.p1 = get_unit(n, "p1", 0.0);
        if (n.contains("p2")) {
            double v = n.at("p2").get<double>();
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("noise.p2", "must be in [0,1]");
            c.p2 = v;
        }
        if (n.contains("measurement_noise"))
            c.measurement_noise = n.at("measurement_noise").get<bool>();
    } else {
        c.p1 = get_unit(raw, "p1", 0.0);
        c.p2 = get_unit(raw, "p2", 0.0);
        if (raw.contains("measurement_noise"))
            c.measurement_noise = raw.at("measurement_noise").get<bool>();
    }
    c.xb = get_unit(raw, "xb", 1.0);
    if (raw.contains("samples")) {
        c.samples = raw.at("samples").get<uint64_t>();
        if (c.samples < 1) throw ConfigError("samples", "must be >= 1");
    }
    if (raw.contains("seed")) c.seed = raw.at("seed").get<uint64_t>();
    c.workers = raw.value("workers", 0);
    if (raw.contains("x")) c.x_single = raw.at("x").get<double>();
    if (raw.contains("grid")) c.x_grid = parse_grid(raw.at("grid").get<std::string>());
    if (raw.contains("p1_grid")) c.p1_grid = parse_grid(raw.at("p1_grid").get<std::string>());
    if (raw.contains("p2_grid")) c.p2_grid = parse_grid(raw.at("p2_grid").get<std::string>());
    c.bandaid_source = raw.value("source", std::string("linear"));
    if (c.bandaid_source != "linear" && c.bandaid_source != "mc")
        throw ConfigError("source", "must be 'linear' or 'mc'");
    c.postselect_rounds = raw.value("rounds", 4);
    if (c.postselect_rounds < 1) throw ConfigError("rounds", "must be >= 1");

    // Per-command requirements. Reproducibility is opt-out-impossible:
    // randomized commands reject configs without a seed.
    bool needs_seed = c.command == "mc" || c.command == "creation" ||
                      c.command == "dense-verify" ||
                      (c.command == "tradeoff" && c.bandaid_source == "mc");
    if (needs_seed && !c.seed) throw ConfigError("seed", "required (no wall-clock seeding)");
    if ((c.command == "recurse" || c.command == "fixed-point") && c.map_spec.empty())
        throw ConfigError("map", "required");
    if ((c.command == "mc" || c.command == "creation") && c.graph_ref.empty())
        throw ConfigError("graph", "required");
    if (c.command == "mc") {
        static const std::set<std::string> kProtocols = {"three-copy", "postselect", "bandaid",
                                                         "conditional"};
        if (!kProtocols.count(c.protocol))
            throw ConfigError("protocol", "unknown protocol '" + c.protocol + "'");
    }
    if (c.x_single && !(*c.x_single >= 0.0 && *c.x_single <= 1.0))
        throw ConfigError("x", "must be in [0,1]");
    return c;
}

RunConfig validate_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("$", std::string("config is not valid JSON: ") + e.what());
    }
    return validate_config(j);
}

nlohmann::json RunConfig::normalized() const {
    nlohmann::json j;
    j["command"] = command;
    j["out"] = out_dir;
    if (!graph_ref.empty()) j["graph"] = graph_ref;
    if (!map_spec.empty()) j["map"] = map_spec;
    j["protocol"] = protocol;
    j["stage"] = stage;
    j["degree"] = degree;
    j["q"] = q;
    j["noise"] = {{"p1", p1}, {"p2", p2}};
    if (measurement_noise) j["noise"]["measurement_noise"] = *measurement_noise;
    j["xb"] = xb;
    j["samples"] = samples;
    if (seed) j["seed"] = *seed;
    j["workers"] = workers;
    if (x_single) j["x"] = *x_single;
    auto grid_str = [](const GridSpec& g) {
        return format_double(g.lo) + ":" + format_double(g.hi) + ":" + format_double(g.step);
    };
    j["grid"] = grid_str(x_grid);
    j["p1_grid"] = grid_str(p1_grid);
    j["p2_grid"] = grid_str(p2_grid);
    j["source"] = bandaid_source;
    j["rounds"] = postselect_rounds;
    j["_version"] = library_version();
    return j;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

}  // namespace gsp
