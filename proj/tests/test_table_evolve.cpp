#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsp/recursion.hpp"
#include "gsp/table_evolve.hpp"

using namespace gsp;

namespace {

std::vector<std::pair<uint32_t, uint32_t>> cycle4() { return {{0, 1}, {1, 2}, {2, 3}, {3, 0}}; }

Bits vertex_mask(uint32_t n, std::initializer_list<uint32_t> vs) {
    Bits b(n);
    for (uint32_t v : vs) b.set(v);
    return b;
}

}  // namespace

TEST_CASE("independent distribution normalizes and reproduces moments") {
    std::vector<double> q = {0.1, 0.2};
    auto dist = independent_distribution(2, q);
    double sum = 0.0;
    for (double p : dist) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(distribution_expectation(dist, vertex_mask(2, {0})) == doctest::Approx(0.8));
    CHECK(distribution_expectation(dist, vertex_mask(2, {1})) == doctest::Approx(0.6));
    CHECK(distribution_expectation(dist, vertex_mask(2, {0, 1})) == doctest::Approx(0.48));
}

TEST_CASE("exhaustive P1 reproduces the ideal weight-1 maps on the 2-path") {
    Graph g = make_path(2);
    Bicoloring col = bicolor(g);
    for (double x : {0.6, 0.8, 0.9, 0.95}) {
        double q = (1.0 - x) / 2.0;
        auto in = independent_distribution(2, std::vector<double>{q, q});
        auto out = evolve_three_copy_subprotocol(g, col, VertexColor::A, in, 0.0);
        double sum = 0.0;
        for (double p : out) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        double a = distribution_expectation(out, vertex_mask(2, {0}));
        double b = distribution_expectation(out, vertex_mask(2, {1}));
        CHECK(a == doctest::Approx(0.5 * (3 - x * x) * x).epsilon(1e-13));
        CHECK(b == doctest::Approx(x * x * x).epsilon(1e-13));
    }
}

TEST_CASE("exhaustive P1 reproduces the noisy weight-1 maps") {
    Graph g = make_path(2);
    Bicoloring col = bicolor(g);
    int d = 1;
    for (double p2 : {0.001, 0.01, 0.1}) {
        double x = 0.9, q = (1.0 - x) / 2.0;
        auto in = independent_distribution(2, std::vector<double>{q, q});
        auto out = evolve_three_copy_subprotocol(g, col, VertexColor::A, in, p2);
        double a = distribution_expectation(out, vertex_mask(2, {0}));
        double b = distribution_expectation(out, vertex_mask(2, {1}));
        CHECK(a == doctest::Approx(three_copy_purify(d, p2, x)).epsilon(1e-12));
        CHECK(b == doctest::Approx(three_copy_pollute(d, p2, x)).epsilon(1e-12));
    }
    // Degree-2 case on the 4-cycle.
    Graph cyc = build_graph(cycle4(), 4);
    Bicoloring c4 = bicolor(cyc);
    double x = 0.9, q = (1.0 - x) / 2.0;
    auto in = independent_distribution(4, std::vector<double>(4, q));
    auto out = evolve_three_copy_subprotocol(cyc, c4, VertexColor::A, in, 0.01);
    CHECK(distribution_expectation(out, vertex_mask(4, {0})) ==
          doctest::Approx(three_copy_purify(2, 0.01, x)).epsilon(1e-12));
    CHECK(distribution_expectation(out, vertex_mask(4, {1})) ==
          doctest::Approx(three_copy_pollute(2, 0.01, x)).epsilon(1e-12));
}

TEST_CASE("generalized update matches exhaustive evolution for weight <= 2") {
    struct Case {
        Graph g;
        Bicoloring col;
    };
    std::vector<Case> cases;
    {
        Graph g = make_path(2);
        Bicoloring col = bicolor(g);
        cases.push_back({std::move(g), std::move(col)});
    }
    {
        Graph g = build_graph(cycle4(), 4);
        Bicoloring col = bicolor(g);
        cases.push_back({std::move(g), std::move(col)});
    }
    for (const auto& cs : cases) {
        const Graph& g = cs.g;
        const Bicoloring& col = cs.col;
        uint32_t n = g.vertex_count;
        // Nonuniform marginals so correlator products are distinguishable.
        std::vector<double> q(n);
        for (uint32_t v = 0; v < n; ++v) q[v] = 0.02 + 0.015 * v;
        auto in = independent_distribution(n, q);

        // Build the full input expectation table (all masks; products of the
        // independent marginals).
        ExpectationTable table;
        auto vm_of = [&](uint64_t am, uint64_t bm) {
            CorrelatorIndex ci;
            ci.a_mask = u64_to_mask(am, col.count(VertexColor::A));
            ci.b_mask = u64_to_mask(bm, col.count(VertexColor::B));
            return correlator_vertex_mask(g, col, ci);
        };
        uint32_t na = col.count(VertexColor::A), nb = col.count(VertexColor::B);
        for (uint64_t am = 0; am < (uint64_t{1} << na); ++am)
            for (uint64_t bm = 0; bm < (uint64_t{1} << nb); ++bm)
                table.set(am, bm, distribution_expectation(in, vm_of(am, bm)));

        for (double p2 : {0.0, 0.001, 0.01}) {
            auto out = evolve_three_copy_subprotocol(g, col, VertexColor::A, in, p2);
            for (uint64_t am = 0; am < (uint64_t{1} << na); ++am) {
                for (uint64_t bm = 0; bm < (uint64_t{1} << nb); ++bm) {
                    if (std::popcount(am) + std::popcount(bm) > 2) continue;
                    CorrelatorIndex target;
                    target.a_mask = u64_to_mask(am, na);
                    target.b_mask = u64_to_mask(bm, nb);
                    double predicted =
                        generalized_p1_update(g, col, table, target, p2, VertexColor::A);
                    double exact = distribution_expectation(out, vm_of(am, bm));
                    CHECK(predicted == doctest::Approx(exact).epsilon(5e-13));
                }
            }
        }
    }
}

TEST_CASE("weight never grows in the generalized update") {
    Graph g = build_graph(cycle4(), 4);
    Bicoloring col = bicolor(g);
    ExpectationTable table;
    for (uint64_t am = 0; am < 4; ++am)
        for (uint64_t bm = 0; bm < 4; ++bm) table.set(am, bm, 0.9);
    uint32_t pair[2] = {0, 2};
    CorrelatorIndex t = make_correlator(g, col, pair);
    uint32_t max_read = 0;
    generalized_p1_update_traced(g, col, table, t, 0.01, VertexColor::A, &max_read);
    CHECK(max_read <= t.weight());
}
