#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsp/estimator.hpp"
#include "gsp/protocols.hpp"
#include "gsp/recursion.hpp"

using namespace gsp;

namespace {

Bits bits_of(std::initializer_list<int> vals) {
    Bits b(static_cast<uint32_t>(vals.size()));
    uint32_t i = 0;
    for (int v : vals) {
        if (v) b.set(i);
        ++i;
    }
    return b;
}

struct MeanCheck {
    double mean, stderr_;
    bool within(double want, double nsigma = 3.0) const {
        return std::abs(mean - want) <= nsigma * stderr_ + 1e-12;
    }
};

MeanCheck estimate_vertex(const Graph& g, const Bicoloring& col, const ProtocolRun& run,
                          uint32_t vertex, uint64_t samples, uint64_t seed) {
    uint32_t vs[1] = {vertex};
    std::vector<CorrelatorIndex> corrs = {make_correlator(g, col, vs)};
    std::vector<std::string> labels = {"K"};
    auto rep = estimate_correlators(g, col, run, corrs, labels, samples, seed, 2);
    return {rep.rows[0].mean, rep.rows[0].stderr_};
}

// Independent anticommutation oracle for the toggle sets: bit j toggles
// exactly when the single-site error anticommutes with K_j.
Bits toggle_oracle(const Graph& g, const Bicoloring& col, uint32_t site, Pauli p) {
    PauliOp err;
    err.x = Bits(g.vertex_count);
    err.z = Bits(g.vertex_count);
    if (p == Pauli::X || p == Pauli::Y) err.x.set(site);
    if (p == Pauli::Z || p == Pauli::Y) err.z.set(site);
    Bits out(g.vertex_count);
    for (uint32_t j = 0; j < g.vertex_count; ++j) {
        uint32_t vs[1] = {j};
        PauliOp kj = pauli_support(g, col, make_correlator(g, col, vs));
        if (pauli_anticommutes(err, kj)) out.set(j);
    }
    return out;
}

}  // namespace

TEST_CASE("mcnot bit flow matches the graph-basis action") {
    Graph path = make_path(2);
    Bicoloring col = bicolor(path);
    ProtocolContext ctx(path, col);

    Bits source = bits_of({1, 0});
    Bits target = bits_of({0, 1});
    apply_mcnot(ctx, VertexColor::A, source, target);
    CHECK(source == bits_of({1, 1}));
    CHECK(target == bits_of({1, 1}));

    Bits z1(2), z2(2);
    apply_mcnot(ctx, VertexColor::A, z1, z2);
    CHECK(!z1.any());
    CHECK(!z2.any());
}

TEST_CASE("mcnot is an involution") {
    Graph g = make_torus(4, 4);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    RngStream rng(3, 0);
    for (int t = 0; t < 100; ++t) {
        Bits a(g.vertex_count), b(g.vertex_count);
        for (uint32_t v = 0; v < g.vertex_count; ++v) {
            if (rng.bernoulli(0.5)) a.set(v);
            if (rng.bernoulli(0.5)) b.set(v);
        }
        Bits a0 = a, b0 = b;
        VertexColor c = rng.bernoulli(0.5) ? VertexColor::A : VertexColor::B;
        apply_mcnot(ctx, c, a, b);
        apply_mcnot(ctx, c, a, b);
        CHECK(a == a0);
        CHECK(b == b0);
    }
}

TEST_CASE("pauli toggles on the 4-cycle") {
    Graph cyc = build_graph(std::vector<std::pair<uint32_t, uint32_t>>{{0, 1}, {1, 2}, {2, 3}, {3, 0}}, 4);
    Bicoloring col = bicolor(cyc);
    ProtocolContext ctx(cyc, col);
    auto toggles = [&](Pauli p) {
        Bits s(4);
        apply_pauli_toggle(ctx, s, 0, p);
        return s;
    };
    CHECK(toggles(Pauli::Z) == toggle_oracle(cyc, col, 0, Pauli::Z));
    CHECK(toggles(Pauli::X) == toggle_oracle(cyc, col, 0, Pauli::X));
    CHECK(toggles(Pauli::Y) == toggle_oracle(cyc, col, 0, Pauli::Y));
    CHECK(toggles(Pauli::Z) == bits_of({1, 0, 0, 0}));
    CHECK(toggles(Pauli::X) == bits_of({0, 1, 0, 1}));
    CHECK(toggles(Pauli::Y) == bits_of({1, 1, 0, 1}));
}

TEST_CASE("pauli toggles match the anticommutation oracle on the torus") {
    Graph g = make_torus(4, 4);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    for (uint32_t site = 0; site < g.vertex_count; ++site) {
        for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
            Bits s(g.vertex_count);
            apply_pauli_toggle(ctx, s, site, p);
            CHECK(s == toggle_oracle(g, col, site, p));
        }
    }
}

TEST_CASE("gate noise: p2 = 0 is the identity, p2 = 1 has uniform marginals") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    RngStream rng(7, 0);
    Bits a(6), b(6);
    for (int t = 0; t < 100; ++t) {
        apply_gate_noise(ctx, 0, a, b, 0.0, rng);
        CHECK(!a.any());
        CHECK(!b.any());
    }
    // p2 = 1: each side of the pair is a uniform Pauli; the copy-a marginal
    // toggle pattern at site 0 should hit {none, Z, X, Y} each 1/4.
    int counts[4] = {0, 0, 0, 0};
    int n = 40000;
    for (int t = 0; t < n; ++t) {
        Bits s(6), u(6);
        apply_gate_noise(ctx, 0, s, u, 1.0, rng);
        bool z = s.get(0);
        bool x = s.get(1) && s.get(5);
        counts[(x ? 2 : 0) + (z ? 1 : 0)]++;
    }
    for (int k = 0; k < 4; ++k) CHECK(std::abs(counts[k] / double(n) - 0.25) < 0.01);
}

TEST_CASE("single gate-noise channel reduces <K_j> by exactly (1-p2)") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    double p2 = 0.3;
    for (uint32_t site : {0u, 1u, 3u}) {
        ProtocolRun run = [&, site](RngStream& rng) -> std::optional<Bits> {
            Bits c0(6), c1(6);
            apply_gate_noise(ctx, site, c0, c1, p2, rng);
            return c0;
        };
        for (uint32_t j = 0; j < 6; ++j) {
            auto m = estimate_vertex(g, col, run, j, 200000, 17 + site);
            bool touching = (j == site) || ctx.nbr_mask[j].get(site);
            CHECK(m.within(touching ? 1.0 - p2 : 1.0));
        }
    }
}

TEST_CASE("syndrome measurement, ideal and noisy") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    NoiseModel quiet;
    RngStream rng(1, 0);

    Bits zero(6);
    Bits s = measure_syndrome(ctx, zero, VertexColor::A, quiet, rng);
    CHECK(!s.any());

    Bits one(6);
    one.set(2);
    s = measure_syndrome(ctx, one, VertexColor::A, quiet, rng);
    CHECK(s.get(2));
    CHECK(s.popcount() == 1);

    // Noisy readout: P(sigma_j != mu_j) = (1 - (1-p2)^{d+1}) / 2 by the
    // parity-of-independent-flips identity.
    NoiseModel noisy;
    noisy.p2 = 0.2;
    noisy.measurement_noise = true;
    double want = 0.5 * (1.0 - std::pow(1.0 - noisy.p2, 3));
    int flips = 0, n = 200000;
    for (int t = 0; t < n; ++t) {
        Bits m = measure_syndrome(ctx, zero, VertexColor::A, noisy, rng);
        if (m.get(0)) ++flips;
    }
    double rate = flips / double(n);
    double sigma = std::sqrt(want * (1.0 - want) / n);
    CHECK(std::abs(rate - want) < 3 * sigma + 1e-12);
}

TEST_CASE("three-copy round on perfect inputs is exact") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    auto sampler = DiagonalStateSampler::independent(6, 0.0);
    NoiseModel quiet;
    RngStream rng(2, 0);
    for (int t = 0; t < 50; ++t) {
        Bits out = run_three_copy_round(ctx, sampler, quiet, rng, Stage::full);
        CHECK(!out.any());
    }
}

TEST_CASE("three-copy means match the ideal closed forms on ring(6)") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    auto sampler = DiagonalStateSampler::independent(6, 0.05);  // <j> = 0.9
    NoiseModel quiet;

    ProtocolRun p1 = [&](RngStream& rng) -> std::optional<Bits> {
        return run_three_copy_round(ctx, sampler, quiet, rng, Stage::P1);
    };
    auto a1 = estimate_vertex(g, col, p1, 0, 200000, 5);
    CHECK(a1.within(0.9855));  // purified color after P1
    auto b1 = estimate_vertex(g, col, p1, 1, 200000, 6);
    CHECK(b1.within(0.729));  // polluted color after P1

    ProtocolRun full = [&](RngStream& rng) -> std::optional<Bits> {
        return run_three_copy_round(ctx, sampler, quiet, rng, Stage::full);
    };
    auto af = estimate_vertex(g, col, full, 0, 200000, 7);
    CHECK(af.within(0.957128));
    auto bf = estimate_vertex(g, col, full, 1, 200000, 8);
    CHECK(bf.within(0.899790));
}

TEST_CASE("three-copy with gate noise matches the noisy closed forms") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    auto sampler = DiagonalStateSampler::independent(6, 0.05);
    NoiseModel noise;
    noise.p2 = 0.01;  // large enough to resolve the noise terms at 2e5 samples

    ProtocolRun full = [&](RngStream& rng) -> std::optional<Bits> {
        return run_three_copy_round(ctx, sampler, noise, rng, Stage::full);
    };
    OnePointMap fa{MapKind::three_copy, VertexColor::A, Stage::full, 2, noise.p2, 1.0};
    OnePointMap fb{MapKind::three_copy, VertexColor::B, Stage::full, 2, noise.p2, 1.0};
    auto af = estimate_vertex(g, col, full, 0, 400000, 9);
    CHECK(af.within(fa(0.9)));
    auto bf = estimate_vertex(g, col, full, 1, 400000, 10);
    CHECK(bf.within(fb(0.9)));
}

TEST_CASE("post-selection accepts perfect inputs and matches Z-flip recursions") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    NoiseModel quiet;
    {
        auto sampler = DiagonalStateSampler::independent(6, 0.0);
        RngStream rng(4, 0);
        for (int t = 0; t < 20; ++t) {
            auto out = run_postselection_round(ctx, VertexColor::A, sampler, quiet, rng);
            REQUIRE(out.has_value());
            CHECK(!out->any());
        }
    }
    // Independent per-qubit flips are exactly the independent-Z-flip model.
    double q = 0.1, x = 1.0 - 2.0 * q;
    auto sampler = DiagonalStateSampler::independent(6, q);
    ProtocolRun run = [&](RngStream& rng) -> std::optional<Bits> {
        return run_postselection_round(ctx, VertexColor::A, sampler, quiet, rng);
    };
    auto a = estimate_vertex(g, col, run, 0, 200000, 11);
    CHECK(a.within(2.0 * x / (1.0 + x * x)));
    auto b = estimate_vertex(g, col, run, 1, 200000, 12);
    CHECK(b.within(x * x));
}

TEST_CASE("post-selection acceptance equals the exhaustive sum on star(2)") {
    Graph g = make_star(2);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    NoiseModel quiet;
    double q = 0.1;
    auto sampler = DiagonalStateSampler::independent(3, q);

    // Brute force over all syndrome configurations of both copies.
    double accept = 0.0;
    for (uint32_t mu = 0; mu < 8; ++mu) {
        for (uint32_t nu = 0; nu < 8; ++nu) {
            double p = 1.0;
            for (uint32_t v = 0; v < 3; ++v) {
                p *= ((mu >> v) & 1) ? q : 1 - q;
                p *= ((nu >> v) & 1) ? q : 1 - q;
            }
            // P1 measures the center (color A); sigma_0 = mu_0 ^ nu_0.
            if (((mu ^ nu) & 1) == 0) accept += p;
        }
    }
    RngStream rng(13, 0);
    int ok = 0, n = 200000;
    for (int t = 0; t < n; ++t)
        if (run_postselection_round(ctx, VertexColor::A, sampler, quiet, rng)) ++ok;
    double rate = ok / double(n);
    double sigma = std::sqrt(accept * (1 - accept) / n);
    CHECK(std::abs(rate - accept) < 3 * sigma + 1e-12);
}

TEST_CASE("bandaid round: purity transfer and pollution") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    NoiseModel quiet;  // p2 = 0; measurement noise moot
    {
        // p2 = 0, <b> = 1: perfect output regardless of input.
        auto sampler = DiagonalStateSampler::independent(6, 0.3);
        BandaidSpec spec;
        spec.purity = 1.0;
        RngStream rng(14, 0);
        for (int t = 0; t < 30; ++t) {
            Bits out = run_bandaid_round(ctx, sampler, spec, quiet, rng, Stage::full);
            CHECK(!out.any());
        }
    }
    {
        // p2 = 0, <b> = 0.99, input 0.9: B qubits after P1 at 0.9 * 0.99^2.
        auto sampler = DiagonalStateSampler::independent(6, 0.05);
        BandaidSpec spec;
        spec.purity = 0.99;
        ProtocolRun run = [&](RngStream& rng) -> std::optional<Bits> {
            return run_bandaid_round(ctx, sampler, spec, quiet, rng, Stage::P1);
        };
        auto b = estimate_vertex(g, col, run, 1, 200000, 15);
        CHECK(b.within(0.9 * 0.99 * 0.99));
        auto a = estimate_vertex(g, col, run, 0, 200000, 16);
        CHECK(a.within(0.99));  // ideal transfer
    }
}

TEST_CASE("bandaid round with noise matches the closed forms to first order") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    int d = 2;
    double p2 = 0.001, xb = 0.99;
    NoiseModel noise;
    noise.p2 = p2;
    noise.measurement_noise = true;
    auto sampler = DiagonalStateSampler::independent(6, 0.05);
    BandaidSpec spec;
    spec.purity = xb;
    ProtocolRun p1 = [&](RngStream& rng) -> std::optional<Bits> {
        return run_bandaid_round(ctx, sampler, spec, noise, rng, Stage::P1);
    };
    double slack = 5 * p2 * p2;
    auto a = estimate_vertex(g, col, p1, 0, 400000, 18);
    CHECK(std::abs(a.mean - bandaid_transfer(d, p2, xb)) <= 3 * a.stderr_ + slack);
    auto b = estimate_vertex(g, col, p1, 1, 400000, 19);
    // Eq.-20 pollution is exact, no first-order slack needed.
    CHECK(b.within(bandaid_pollute(d, p2, xb, 0.9)));
}

TEST_CASE("conditional bandaid round, ideal cases") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    NoiseModel quiet;
    BandaidSpec spec;
    spec.purity = 1.0;
    {
        auto sampler = DiagonalStateSampler::independent(6, 0.0);
        RngStream rng(20, 0);
        for (int t = 0; t < 30; ++t) {
            Bits out = run_conditional_bandaid_round(ctx, sampler, spec, quiet, rng, Stage::full);
            CHECK(!out.any());
        }
    }
    {
        auto sampler = DiagonalStateSampler::independent(6, 0.05);
        ProtocolRun p1 = [&](RngStream& rng) -> std::optional<Bits> {
            return run_conditional_bandaid_round(ctx, sampler, spec, quiet, rng, Stage::P1);
        };
        auto a = estimate_vertex(g, col, p1, 0, 200000, 21);
        CHECK(a.within(0.995));  // x + (1 - x^2)/2 at x = 0.9
    }
}

TEST_CASE("creation and transmission") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    EdgeColoring ec = edge_color(g);
    CreationSchedule sched(g, ec);
    {
        NoiseModel quiet;
        RngStream rng(22, 0);
        for (int t = 0; t < 20; ++t) CHECK(!simulate_creation_transmission(ctx, sched, quiet, rng).any());
    }
    NoiseModel noise;
    noise.p2 = 0.01;
    ProtocolRun run = [&](RngStream& rng) -> std::optional<Bits> {
        return simulate_creation_transmission(ctx, sched, noise, rng);
    };
    auto m = estimate_vertex(g, col, run, 0, 300000, 23);
    CHECK(m.within(std::pow(0.99, 3)));

    NoiseModel both;
    both.p1 = 0.1;
    both.p2 = 0.01;
    ProtocolRun run2 = [&](RngStream& rng) -> std::optional<Bits> {
        return simulate_creation_transmission(ctx, sched, both, rng);
    };
    auto m2 = estimate_vertex(g, col, run2, 2, 300000, 24);
    CHECK(m2.within(creation_purity(2, 0.1, 0.01)));
}

TEST_CASE("estimator determinism and exact identities") {
    Graph g = make_ring(6);
    Bicoloring col = bicolor(g);
    ProtocolContext ctx(g, col);
    auto sampler = DiagonalStateSampler::independent(6, 0.05);
    ProtocolRun run = [&](RngStream& rng) -> std::optional<Bits> { return sampler.sample(rng); };

    auto [corrs, labels] = vertex_correlators(g, col);
    corrs.push_back(empty_correlator(col));
    labels.push_back("identity");
    uint32_t pair[2] = {0, 3};
    corrs.push_back(make_correlator(g, col, pair));
    labels.push_back("K0K3");

    auto r1 = estimate_correlators(g, col, run, corrs, labels, 100000, 42, 1);
    auto r2 = estimate_correlators(g, col, run, corrs, labels, 100000, 42, 2);
    for (size_t i = 0; i < r1.rows.size(); ++i) {
        CHECK(r1.rows[i].mean == r2.rows[i].mean);  // bit-identical reduction
        CHECK(r1.rows[i].stderr_ == r2.rows[i].stderr_);
    }
    CHECK(r1.rows[6].mean == 1.0);  // identity correlator is exactly 1
    CHECK(r1.rows[6].stderr_ == 0.0);
    for (const auto& row : r1.rows) {
        CHECK(row.mean <= 1.0);
        CHECK(row.mean >= -1.0);
    }
    // Independent sampler: <K_j> = 0.9, <K_i K_j> = 0.81 for i != j.
    MeanCheck k0{r1.rows[0].mean, r1.rows[0].stderr_};
    CHECK(k0.within(0.9));
    MeanCheck k03{r1.rows[7].mean, r1.rows[7].stderr_};
    CHECK(k03.within(0.81));
}

TEST_CASE("perfect-state estimates are exactly one") {
    Graph g = make_path(2);
    Bicoloring col = bicolor(g);
    ProtocolRun run = [&](RngStream&) -> std::optional<Bits> { return Bits(2); };
    auto [corrs, labels] = vertex_correlators(g, col);
    auto rep = estimate_correlators(g, col, run, corrs, labels, 1000, 1, 1);
    for (const auto& row : rep.rows) CHECK(row.mean == 1.0);
}

TEST_CASE("table sampler agrees with its distribution") {
    std::vector<double> probs = {0.5, 0.25, 0.125, 0.125};
    auto s = DiagonalStateSampler::table(2, probs);
    RngStream rng(31, 0);
    std::vector<int> counts(4, 0);
    int n = 100000;
    for (int t = 0; t < n; ++t) {
        Bits b = s.sample(rng);
        counts[(b.get(1) << 1) | b.get(0)]++;
    }
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(counts[k] / double(n) - probs[k]) <
              3 * std::sqrt(probs[k] * (1 - probs[k]) / n) + 1e-3);
    CHECK_THROWS_AS(DiagonalStateSampler::table(2, {0.5, 0.6, 0.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(DiagonalStateSampler::table(21, std::vector<double>(1 << 21, 0.0)),
                    SizeCapExceeded);
}
