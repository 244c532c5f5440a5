#include "gsp/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gsp/analysis.hpp"
#include "gsp/dense.hpp"
#include "gsp/estimator.hpp"
#include "gsp/io.hpp"
#include "gsp/table_evolve.hpp"

namespace gsp::cli {

namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string config_path;
    nlohmann::json overrides = nlohmann::json::object();
};

void add_common_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
    auto opt_str = [cmd, &f](const char* flag, const char* key, const char* help) {
        std::string k = key;
        cmd->add_option_function<std::string>(
            flag, [&f, k](const std::string& v) { f.overrides[k] = v; }, help);
    };
    auto opt_num = [cmd, &f](const char* flag, const char* key, const char* help) {
        std::string k = key;
        cmd->add_option_function<double>(
            flag, [&f, k](double v) { f.overrides[k] = v; }, help);
    };
    auto opt_u64 = [cmd, &f](const char* flag, const char* key, const char* help) {
        std::string k = key;
        cmd->add_option_function<uint64_t>(
            flag, [&f, k](uint64_t v) { f.overrides[k] = v; }, help);
    };
    auto opt_int = [cmd, &f](const char* flag, const char* key, const char* help) {
        std::string k = key;
        cmd->add_option_function<int>(
            flag, [&f, k](int v) { f.overrides[k] = v; }, help);
    };
    opt_str("--out", "out", "output directory");
    opt_str("--graph", "graph", "graph ref: ring:6, torus:4x4, star:4, path:2, or JSON file");
    opt_str("--map", "map", "map spec kind:stage:branch, e.g. three-copy:full:A");
    opt_str("--protocol", "protocol", "three-copy | postselect | bandaid | conditional");
    opt_str("--stage", "stage", "P1 | P2 | full");
    opt_int("--degree", "degree", "graph degree d");
    opt_num("--q", "q", "input syndrome flip probability");
    opt_num("--p1", "p1", "transmission depolarizing probability");
    opt_num("--p2", "p2", "gate/measurement depolarizing probability");
    opt_num("--xb", "xb", "bandaid purity");
    opt_num("--x", "x", "single map input");
    opt_str("--grid", "grid", "x grid lo:hi:step");
    opt_str("--p1-grid", "p1_grid", "p1 grid lo:hi:step");
    opt_str("--p2-grid", "p2_grid", "p2 grid lo:hi:step");
    opt_u64("--samples", "samples", "MC sample count");
    opt_u64("--seed", "seed", "RNG seed (mandatory for randomized commands)");
    opt_int("--workers", "workers", "worker thread count (speed only, not results)");
    opt_str("--source", "source", "bandaid source: linear | mc");
    opt_int("--rounds", "rounds", "post-selection rounds for the mc bandaid source");
    cmd->add_option_function<std::string>(
        "--measurement-noise",
        [&f](const std::string& v) {
            f.overrides["measurement_noise"] = (v == "on" || v == "true" || v == "1");
        },
        "override measurement noise (on/off)");
}

struct OutputSink {
    fs::path dir;
    std::ofstream log;

    explicit OutputSink(const RunConfig& cfg) : dir(cfg.out_dir) {
        fs::create_directories(dir);
        std::ofstream cfg_out(dir / "config.json");
        cfg_out << cfg.normalized().dump(2) << '\n';
        log.open(dir / "log.txt");
        log << library_version() << '\n';
    }

    void csv(const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
        write_csv((dir / "data.csv").string(), header, rows);
    }
};

NoiseModel noise_for(const RunConfig& cfg) {
    NoiseModel n;
    n.p1 = cfg.p1;
    n.p2 = cfg.p2;
    bool default_meas = cfg.protocol == "bandaid" || cfg.protocol == "conditional";
    n.measurement_noise = cfg.measurement_noise.value_or(default_meas);
    n.validate();
    return n;
}

Stage stage_for(const RunConfig& cfg) {
    if (cfg.stage == "P1") return Stage::P1;
    if (cfg.stage == "P2") return Stage::P2;
    if (cfg.stage == "full") return Stage::full;
    throw ConfigError("stage", "must be P1, P2 or full");
}

std::vector<std::vector<std::string>> estimate_rows(const EstimateReport& rep) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
        rows.push_back({r.label, format_double(r.mean), format_double(r.stderr_),
                        std::to_string(r.samples)});
    return rows;
}

int run_recurse(const RunConfig& cfg) {
    OnePointMap map = parse_map_spec(cfg.map_spec, cfg.degree, cfg.p2, cfg.xb);
    OutputSink out(cfg);
    std::vector<double> xs =
        cfg.x_single ? std::vector<double>{*cfg.x_single} : cfg.x_grid.values();
    std::vector<std::vector<std::string>> rows;
    for (double x : xs) rows.push_back({format_double(x), format_double(map(x))});
    out.csv({"x", "fx"}, rows);
    if (cfg.x_single) std::cout << format_double(map(*cfg.x_single)) << '\n';
    out.log << "map " << map.spec_string() << " evaluated at " << xs.size() << " points\n";
    return 0;
}

int run_fixed_point(const RunConfig& cfg) {
    OnePointMap map = parse_map_spec(cfg.map_spec, cfg.degree, cfg.p2, cfg.xb);
    OutputSink out(cfg);
    auto report = find_fixed_points([&](double x) { return map(x); });
    std::vector<std::vector<std::string>> rows;
    for (const auto& fp : report.points)
        rows.push_back({format_double(fp.location), stability_name(fp.stability)});
    out.csv({"location", "stability"}, rows);
    nlohmann::json j;
    j["map"] = map.spec_string();
    auto arr = nlohmann::json::array();
    for (const auto& fp : report.points)
        arr.push_back({{"location", fp.location}, {"stability", stability_name(fp.stability)}});
    j["fixed_points"] = arr;
    std::cout << j.dump() << '\n';
    return 0;
}

int run_threshold(const RunConfig& cfg) {
    if (cfg.protocol != "three-copy")
        throw ConfigError("protocol", "threshold scan supports protocol three-copy");
    int d = cfg.degree;
    auto family = [d](double p2) -> ScalarMap {
        OnePointMap m{MapKind::three_copy, VertexColor::A, Stage::full, d, p2, 1.0};
        return [m](double x) { return m(x); };
    };
    ThresholdResult r = threshold_scan(family, d);
    OutputSink out(cfg);
    nlohmann::json j;
    j["protocol"] = cfg.protocol;
    j["degree"] = d;
    j["branch"] = "A";
    j["p_th"] = r.p_th;
    j["alpha_th"] = r.alpha_th;
    std::cout << j.dump() << '\n';
    out.csv({"p_th", "alpha_th", "degree"},
            {{format_double(r.p_th), format_double(r.alpha_th), std::to_string(d)}});
    return 0;
}

int run_mc(const RunConfig& cfg) {
    Graph g = load_graph_ref(cfg.graph_ref);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    NoiseModel noise = noise_for(cfg);
    Stage stage = stage_for(cfg);
    DiagonalStateSampler sampler = DiagonalStateSampler::independent(g.vertex_count, cfg.q);
    BandaidSpec bandaid;
    bandaid.purity = cfg.xb;

    ProtocolRun run;
    if (cfg.protocol == "three-copy") {
        run = [&](RngStream& rng) -> std::optional<Bits> {
            return run_three_copy_round(ctx, sampler, noise, rng, stage);
        };
    } else if (cfg.protocol == "bandaid") {
        run = [&](RngStream& rng) -> std::optional<Bits> {
            return run_bandaid_round(ctx, sampler, bandaid, noise, rng, stage);
        };
    } else if (cfg.protocol == "conditional") {
        run = [&](RngStream& rng) -> std::optional<Bits> {
            return run_conditional_bandaid_round(ctx, sampler, bandaid, noise, rng, stage);
        };
    } else {
        run = [&, stage](RngStream& rng) -> std::optional<Bits> {
            if (stage != Stage::full) {
                VertexColor c = stage == Stage::P1 ? VertexColor::A : VertexColor::B;
                return run_postselection_round(ctx, c, sampler, noise, rng);
            }
            // Full round: two accepted P1 survivors feed one P2 attempt.
            auto accepted_p1 = [&]() -> std::optional<Bits> {
                for (int tries = 0; tries < 1000000; ++tries) {
                    auto s = run_postselection_round(ctx, VertexColor::A, sampler, noise, rng);
                    if (s) return s;
                }
                return std::nullopt;
            };
            auto a = accepted_p1();
            auto b = accepted_p1();
            if (!a || !b) throw NumericalFailure("post-selection acceptance vanished");
            apply_mcnot(ctx, VertexColor::B, *a, *b);
            for (uint32_t v = 0; v < g.vertex_count; ++v)
                apply_gate_noise(ctx, v, *a, *b, noise.p2, rng);
            Bits sigma = measure_syndrome(ctx, *b, VertexColor::B, noise, rng);
            if (sigma.any()) return std::nullopt;
            return *a;
        };
    }

    if (!ctx.degree_regular && cfg.protocol != "postselect")
        std::cerr << "{\"warning\":\"graph is not degree-regular; closed-form comparisons assume "
                     "regularity\"}\n";

    auto [corrs, labels] = vertex_correlators(g, col);
    EstimateReport rep =
        estimate_correlators(g, col, run, corrs, labels, cfg.samples, *cfg.seed, cfg.workers);
    OutputSink out(cfg);
    out.csv({"correlator", "mean", "stderr", "samples"}, estimate_rows(rep));
    out.log << "protocol " << cfg.protocol << " stage " << cfg.stage << " acceptance "
            << format_double(rep.acceptance_rate) << '\n';
    std::cout << "{\"samples\":" << rep.samples
              << ",\"acceptance\":" << format_double(rep.acceptance_rate) << "}\n";
    return 0;
}

int run_creation(const RunConfig& cfg) {
    Graph g = load_graph_ref(cfg.graph_ref);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    EdgeColoring ec = edge_color(g);
    CreationSchedule sched(g, ec);
    NoiseModel noise;
    noise.p1 = cfg.p1;
    noise.p2 = cfg.p2;
    noise.validate();
    ProtocolRun run = [&](RngStream& rng) -> std::optional<Bits> {
        return simulate_creation_transmission(ctx, sched, noise, rng);
    };
    auto [corrs, labels] = vertex_correlators(g, col);
    EstimateReport rep =
        estimate_correlators(g, col, run, corrs, labels, cfg.samples, *cfg.seed, cfg.workers);
    OutputSink out(cfg);
    out.csv({"correlator", "mean", "stderr", "samples"}, estimate_rows(rep));
    if (ec.used_extra_color)
        out.log << "edge coloring needed d+1 colors; closed forms assume d steps\n";
    if (ctx.degree_regular)
        out.log << "closed-form creation purity "
                << format_double(creation_purity(ctx.max_degree, cfg.p1, cfg.p2)) << '\n';
    std::cout << "{\"samples\":" << rep.samples << ",\"steps\":" << ec.step_count << "}\n";
    return 0;
}

int run_dense_verify(const RunConfig& cfg) {
    Graph g = cfg.graph_ref.empty() ? make_path(2) : load_graph_ref(cfg.graph_ref);
    Bicoloring col = bicolor(g);
    uint32_t n = g.vertex_count;
    if (3 * n > dense::kP1QubitCap) throw ConfigError("graph", "dense-verify needs 3|V| <= 10");
    uint32_t states = static_cast<uint32_t>(std::min<uint64_t>(cfg.samples, 50));

    // MCNOT graph-basis label permutation, exhausted over all label pairs.
    double max_mcnot = 0.0;
    {
        dense::Matrix u = dense::mcnot_unitary(g, col, VertexColor::A, 2, 0, 1);
        for (uint32_t mu = 0; mu < (1u << n); ++mu) {
            for (uint32_t nu = 0; nu < (1u << n); ++nu) {
                Bits bm(n), bn(n);
                for (uint32_t v = 0; v < n; ++v) {
                    if ((mu >> v) & 1) bm.set(v);
                    if ((nu >> v) & 1) bn.set(v);
                }
                dense::Vector va = dense::graph_state_vector(g, bm);
                dense::Vector vb = dense::graph_state_vector(g, bn);
                dense::Vector joint(va.size() * vb.size());
                for (Eigen::Index i = 0; i < vb.size(); ++i)
                    joint.segment(i * va.size(), va.size()) = vb(i) * va;
                dense::Vector moved = u * joint;
                // Expected labels per the graph-basis MCNOT action.
                uint32_t mu2 = mu, nu2 = nu;
                for (uint32_t v = 0; v < n; ++v) {
                    if (col.color_of[v] == VertexColor::A)
                        nu2 ^= (mu >> v & 1) << v;
                    else
                        mu2 ^= (nu >> v & 1) << v;
                }
                Bits bm2(n), bn2(n);
                for (uint32_t v = 0; v < n; ++v) {
                    if ((mu2 >> v) & 1) bm2.set(v);
                    if ((nu2 >> v) & 1) bn2.set(v);
                }
                dense::Vector va2 = dense::graph_state_vector(g, bm2);
                dense::Vector vb2 = dense::graph_state_vector(g, bn2);
                dense::Vector expect(va2.size() * vb2.size());
                for (Eigen::Index i = 0; i < vb2.size(); ++i)
                    expect.segment(i * va2.size(), va2.size()) = vb2(i) * va2;
                double overlap = std::abs(expect.dot(moved));
                max_mcnot = std::max(max_mcnot, std::abs(1.0 - overlap));
            }
        }
    }

    RngStream rng(*cfg.seed, 0);
    double max_idem = 0.0, max_expect = 0.0, max_comm = 0.0, max_p1 = 0.0;
    NoiseModel noise;
    noise.p2 = cfg.p2;
    auto [corrs, labels] = vertex_correlators(g, col);
    for (uint32_t s = 0; s < states; ++s) {
        dense::Matrix rho = dense::random_density(n, rng);
        dense::Matrix rho_d = dense::depolarize_D(g, col, rho);
        max_idem = std::max(max_idem,
                            dense::max_abs_diff(dense::depolarize_D(g, col, rho_d), rho_d));
        for (size_t c = 0; c < corrs.size(); ++c) {
            dense::Matrix k = dense::correlator_operator(g, col, corrs[c]);
            max_expect = std::max(max_expect, std::abs(dense::expectation(rho, k) -
                                                       dense::expectation(rho_d, k)));
        }
        max_comm = std::max(max_comm, dense::check_commutation(g, col, rho, noise));
        dense::Matrix out = dense::run_P1_dense(g, col, dense::kron3(rho), noise);
        for (uint32_t v = 0; v < n; ++v) {
            uint32_t vs[1] = {v};
            dense::Matrix k = dense::correlator_operator(g, col, make_correlator(g, col, vs));
            double in_x = dense::expectation(rho, k);
            double got = dense::expectation(out, k);
            int dv = static_cast<int>(g.degree(v));
            double want = col.color_of[v] == VertexColor::A
                              ? three_copy_purify(dv, cfg.p2, std::abs(in_x)) *
                                    (in_x < 0 ? -1.0 : 1.0)
                              : three_copy_pollute(dv, cfg.p2, std::abs(in_x)) *
                                    (in_x < 0 ? -1.0 : 1.0);
            max_p1 = std::max(max_p1, std::abs(got - want));
        }
    }

    OutputSink out(cfg);
    std::vector<std::vector<std::string>> rows = {
        {"mcnot_label_permutation", format_double(max_mcnot)},
        {"depolarize_idempotence", format_double(max_idem)},
        {"depolarize_expectation_preservation", format_double(max_expect)},
        {"commutation", format_double(max_comm)},
        {"p1_closed_form_residual", format_double(max_p1)},
    };
    out.csv({"check", "max_deviation"}, rows);
    nlohmann::json j;
    for (const auto& r : rows) j[r[0]] = std::stod(r[1]);
    bool ok = max_mcnot <= 1e-10 && max_idem <= 1e-10 && max_expect <= 1e-10 &&
              max_comm <= 1e-10 && max_p1 <= 1e-10;
    j["pass"] = ok;
    std::cout << j.dump() << '\n';
    if (!ok) throw NumericalFailure("dense verification exceeded 1e-10");
    return 0;
}

int run_tradeoff(const RunConfig& cfg) {
    TradeoffProtocol proto;
    if (cfg.protocol == "bandaid" || cfg.protocol == "three-copy")
        proto = TradeoffProtocol::bandaid;
    else if (cfg.protocol == "conditional")
        proto = TradeoffProtocol::conditional_bandaid;
    else
        throw ConfigError("protocol", "tradeoff supports bandaid or conditional");
    BandaidSource source = cfg.bandaid_source == "mc" ? BandaidSource::mc_postselection
                                                      : BandaidSource::linear_eq25;
    TradeoffMcParams mc;
    mc.postselect_rounds = cfg.postselect_rounds;
    mc.samples = cfg.samples;
    mc.seed = cfg.seed.value_or(0);
    mc.workers = cfg.workers;
    auto p1s = cfg.p1_grid.values();
    auto p2s = cfg.p2_grid.values();
    TradeoffCurve curve = tradeoff_region(proto, cfg.degree, p1s, p2s, source, mc);
    OutputSink out(cfg);
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : curve.points)
        rows.push_back({format_double(p.p1), format_double(p.p2), format_double(p.unpurified),
                        format_double(p.purified), p.in_region ? "1" : "0"});
    out.csv({"p1", "p2", "unpurified", "purified", "in_region"}, rows);
    out.log << "region cells " << curve.region_cells() << " area "
            << format_double(curve.region_area()) << '\n';
    nlohmann::json j;
    j["region_cells"] = curve.region_cells();
    j["region_area"] = curve.region_area();
    std::cout << j.dump() << '\n';
    return 0;
}

int dispatch(const RunConfig& cfg) {
    if (cfg.command == "recurse") return run_recurse(cfg);
    if (cfg.command == "fixed-point") return run_fixed_point(cfg);
    if (cfg.command == "threshold") return run_threshold(cfg);
    if (cfg.command == "mc") return run_mc(cfg);
    if (cfg.command == "creation") return run_creation(cfg);
    if (cfg.command == "dense-verify") return run_dense_verify(cfg);
    if (cfg.command == "tradeoff") return run_tradeoff(cfg);
    throw ConfigError("command", "unknown command");
}

void error_json(const std::string& kind, const std::string& message, const std::string& field) {
    nlohmann::json j;
    j["error"] = message;
    j["kind"] = kind;
    if (!field.empty()) j["field"] = field;
    std::cerr << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Simulator and numerical analysis toolkit for purification of bicolorable "
                 "graph states"};
    app.require_subcommand(1);
    std::vector<std::string> commands = {"recurse", "fixed-point", "threshold",  "mc",
                                         "creation", "dense-verify", "tradeoff"};
    std::vector<Flags> flags(commands.size());
    std::vector<CLI::App*> subs;
    for (size_t i = 0; i < commands.size(); ++i) {
        auto* sub = app.add_subcommand(commands[i]);
        add_common_options(sub, flags[i]);
        subs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_json("usage", e.what(), "");
        return 2;
    }

    for (size_t i = 0; i < commands.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            nlohmann::json raw = nlohmann::json::object();
            if (!flags[i].config_path.empty()) {
                std::ifstream in(flags[i].config_path);
                if (!in) throw ConfigError("$", "cannot open config '" + flags[i].config_path + "'");
                try {
                    in >> raw;
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
                }
            }
            raw["command"] = commands[i];
            for (auto& [k, v] : flags[i].overrides.items()) raw[k] = v;
            RunConfig cfg = validate_config(raw);
            return dispatch(cfg);
        } catch (const ConfigError& e) {
            error_json("config", e.what(), e.field);
            return 2;
        } catch (const InvalidArgument& e) {
            error_json("config", e.what(), "");
            return 2;
        } catch (const NumericalFailure& e) {
            error_json("numerical", e.what(), "");
            return 1;
        } catch (const Error& e) {
            error_json("error", e.what(), "");
            return 1;
        } catch (const std::exception& e) {
            error_json("internal", e.what(), "");
            return 1;
        }
    }
    error_json("usage", "missing subcommand", "");
    return 2;
}

}  // namespace gsp::cli
