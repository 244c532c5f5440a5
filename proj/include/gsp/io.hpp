#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsp/graph.hpp"

namespace gsp {

std::string library_version();

// Graph JSON: {"vertices": n, "edges": [[u, v], ...]}.
Graph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const Graph& g);

// Standard-name reference ("ring:6", "torus:4x4", "star:4", "path:2") or a
// path to a graph JSON file.
Graph load_graph_ref(const std::string& ref);

struct GridSpec {
    double lo = 0.0, hi = 1.0, step = 0.01;
    std::vector<double> values() const;
};

GridSpec parse_grid(const std::string& spec);  // "lo:hi:step"

// Normalized run configuration. Fields are interpreted per command; the
// normalized JSON echo is written next to every output for provenance.
struct RunConfig {
    std::string command;
    std::string out_dir;

    std::string graph_ref;
    std::string map_spec;
    std::string protocol;  // three-copy | postselect | bandaid | conditional
    std::string stage = "full";
    int degree = 2;
    double q = 0.05;
    double p1 = 0.0;
    double p2 = 0.0;
    double xb = 1.0;
    std::optional<bool> measurement_noise;  // default decided per protocol

    uint64_t samples = 100000;
    std::optional<uint64_t> seed;
    int workers = 0;

    std::optional<double> x_single;
    GridSpec x_grid{0.0, 1.0, 0.01};
    GridSpec p1_grid{0.0, 0.4, 0.02};
    GridSpec p2_grid{0.0, 0.04, 0.002};
    std::string bandaid_source = "linear";  // linear | mc
    int postselect_rounds = 4;

    nlohmann::json normalized() const;
};

// Parses + validates, filling defaults. Throws ConfigError naming the field.
RunConfig validate_config(const nlohmann::json& raw);
RunConfig validate_config_file(const std::string& path);

std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace gsp
