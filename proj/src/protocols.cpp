#include "gsp/protocols.hpp"

#include <algorithm>
#include <numeric>

namespace gsp {

ProtocolContext::ProtocolContext(const Graph& graph, const Bicoloring& coloring)
    : g(&graph), col(&coloring) {
    color_mask[0] = Bits(graph.vertex_count);
    color_mask[1] = Bits(graph.vertex_count);
    for (uint32_t v = 0; v < graph.vertex_count; ++v)
        color_mask[static_cast<int>(coloring.color_of[v])].set(v);
    nbr_mask.reserve(graph.vertex_count);
    for (uint32_t v = 0; v < graph.vertex_count; ++v) {
        Bits m(graph.vertex_count);
        for (uint32_t u : graph.adjacency[v]) m.set(u);
        nbr_mask.push_back(std::move(m));
    }
    max_degree = graph.max_degree();
    degree_regular = graph.degree_regular();
}

void apply_pauli_toggle(const ProtocolContext& ctx, Bits& state, uint32_t site, Pauli p) {
    switch (p) {
        case Pauli::I:
            break;
        case Pauli::Z:
            state.flip(site);
            break;
        case Pauli::X:
            state.xor_with(ctx.nbr_mask[site]);
            break;
        case Pauli::Y:
            state.flip(site);
            state.xor_with(ctx.nbr_mask[site]);
            break;
    }
}

void apply_mcnot(const ProtocolContext& ctx, VertexColor purify_color, Bits& source,
                 Bits& target) {
    if (source.n != ctx.g->vertex_count || target.n != ctx.g->vertex_count)
        throw InvalidArgument("syndrome vector size mismatch");
    const Bits& pm = ctx.mask(purify_color);
    const Bits& om = ctx.mask(other_color(purify_color));
    target.xor_masked(source, pm);
    source.xor_masked(target, om);
}

void apply_gate_noise(const ProtocolContext& ctx, uint32_t site, Bits& copy_a, Bits& copy_b,
                      double p2, RngStream& rng) {
    if (!rng.bernoulli(p2)) return;
    uint32_t pair = rng.uniform_u32(16);
    apply_pauli_toggle(ctx, copy_a, site, static_cast<Pauli>(pair & 3));
    apply_pauli_toggle(ctx, copy_b, site, static_cast<Pauli>(pair >> 2));
}

Bits measure_syndrome(const ProtocolContext& ctx, const Bits& state, VertexColor measured_color,
                      const NoiseModel& noise, RngStream& rng) {
    if (state.n != ctx.g->vertex_count) throw InvalidArgument("syndrome vector size mismatch");
    Bits sigma = state & ctx.mask(measured_color);
    if (noise.measurement_noise && noise.p2 > 0.0) {
        Bits flips(state.n);
        for (uint32_t v = 0; v < state.n; ++v)
            if (rng.bernoulli(noise.p2 / 2.0)) flips.set(v);
        for (uint32_t j : ctx.col->vertices(measured_color)) {
            bool f = flips.get(j) ^ flips.parity_and(ctx.nbr_mask[j]);
            if (f) sigma.flip(j);
        }
    }
    return sigma;
}

void three_copy_subprotocol(const ProtocolContext& ctx, VertexColor purify_color, Bits& copy0,
                            Bits& copy1, Bits& copy2, const NoiseModel& noise, RngStream& rng) {
    apply_mcnot(ctx, purify_color, copy0, copy1);
    for (uint32_t v = 0; v < ctx.g->vertex_count; ++v)
        apply_gate_noise(ctx, v, copy0, copy1, noise.p2, rng);
    apply_mcnot(ctx, purify_color, copy0, copy2);
    for (uint32_t v = 0; v < ctx.g->vertex_count; ++v)
        apply_gate_noise(ctx, v, copy0, copy2, noise.p2, rng);
    NoiseModel meas_off = noise;
    meas_off.measurement_noise = false;
    Bits s1 = measure_syndrome(ctx, copy1, purify_color, meas_off, rng);
    Bits s2 = measure_syndrome(ctx, copy2, purify_color, meas_off, rng);
    s1.and_with(s2);
    copy0.xor_with(s1);
}

Bits run_three_copy_round(const ProtocolContext& ctx, const DiagonalStateSampler& sampler,
                          const NoiseModel& noise, RngStream& rng, Stage stage) {
    auto run_sub = [&](VertexColor c, Bits in0, Bits in1, Bits in2) {
        three_copy_subprotocol(ctx, c, in0, in1, in2, noise, rng);
        return in0;
    };
    auto p1 = [&] {
        return run_sub(VertexColor::A, sampler.sample(rng), sampler.sample(rng),
                       sampler.sample(rng));
    };
    switch (stage) {
        case Stage::P1:
            return p1();
        case Stage::P2:
            return run_sub(VertexColor::B, sampler.sample(rng), sampler.sample(rng),
                           sampler.sample(rng));
        case Stage::full:
            return run_sub(VertexColor::B, p1(), p1(), p1());
    }
    throw InvalidArgument("bad stage");
}

std::optional<Bits> run_postselection_round(const ProtocolContext& ctx, VertexColor purify_color,
                                            const DiagonalStateSampler& sampler,
                                            const NoiseModel& noise, RngStream& rng) {
    Bits copy0 = sampler.sample(rng);
    Bits copy1 = sampler.sample(rng);
    apply_mcnot(ctx, purify_color, copy0, copy1);
    for (uint32_t v = 0; v < ctx.g->vertex_count; ++v)
        apply_gate_noise(ctx, v, copy0, copy1, noise.p2, rng);
    Bits sigma = measure_syndrome(ctx, copy1, purify_color, noise, rng);
    if (sigma.any()) return std::nullopt;
    return copy0;
}

void apply_bandaid(const ProtocolContext& ctx, Bits& state, uint32_t target, double bandaid_purity,
                   const NoiseModel& noise, RngStream& rng) {
    const auto& leaves = ctx.g->adjacency[target];
    uint32_t d = static_cast<uint32_t>(leaves.size());
    double q = (1.0 - bandaid_purity) / 2.0;

    // Fresh star(d) bandaid in its own graph basis: one center bit, d leaf
    // bits, each flipped with probability (1-<b>)/2.
    bool center = rng.bernoulli(q);
    uint64_t leaf_bits = 0;
    for (uint32_t i = 0; i < d; ++i)
        if (rng.bernoulli(q)) leaf_bits |= uint64_t{1} << i;

    // Ideal CNOT flows (all pairs disjoint): center absorbs mu_target, each
    // graph neighbor absorbs the matching leaf bit.
    center ^= state.get(target);
    for (uint32_t i = 0; i < d; ++i)
        if ((leaf_bits >> i) & 1) state.flip(leaves[i]);

    // Per-pair gate noise. Graph-side Paulis toggle graph syndromes; star-
    // side Paulis toggle the star's own syndrome bits (X on a leaf flips the
    // center bit, X on the center flips every leaf bit).
    auto star_toggle = [&](bool on_center, uint32_t leaf_idx, Pauli p) {
        if (p == Pauli::I) return;
        bool zpart = (p == Pauli::Z || p == Pauli::Y);
        bool xpart = (p == Pauli::X || p == Pauli::Y);
        if (on_center) {
            if (zpart) center = !center;
            if (xpart) leaf_bits ^= (uint64_t{1} << d) - 1;
        } else {
            if (zpart) leaf_bits ^= uint64_t{1} << leaf_idx;
            if (xpart) center = !center;
        }
    };
    auto pair_noise = [&](uint32_t graph_site, bool on_center, uint32_t leaf_idx) {
        if (!rng.bernoulli(noise.p2)) return;
        uint32_t pair = rng.uniform_u32(16);
        apply_pauli_toggle(ctx, state, graph_site, static_cast<Pauli>(pair & 3));
        star_toggle(on_center, leaf_idx, static_cast<Pauli>(pair >> 2));
    };
    pair_noise(target, true, 0);
    for (uint32_t i = 0; i < d; ++i) pair_noise(leaves[i], false, i);

    // Parity measurement of the star (X on center, Z on leaves) yields the
    // center bit; with measurement noise each of the d+1 outcomes flips
    // independently with probability p2/2.
    bool sigma = center;
    if (noise.measurement_noise && noise.p2 > 0.0) {
        for (uint32_t i = 0; i < d + 1; ++i)
            if (rng.bernoulli(noise.p2 / 2.0)) sigma = !sigma;
    }
    if (sigma) state.flip(target);
}

namespace {

std::vector<uint32_t> bandaid_schedule(const ProtocolContext& ctx, VertexColor color,
                                       const BandaidSpec& spec, RngStream& rng) {
    std::vector<uint32_t> order;
    if (!spec.uniform_random_schedule && !spec.fixed_order.empty()) {
        for (uint32_t v : spec.fixed_order)
            if (ctx.col->color_of[v] == color) order.push_back(v);
        if (order.size() != ctx.col->vertices(color).size())
            throw InvalidArgument("fixed bandaid schedule must cover each target exactly once");
        return order;
    }
    order = ctx.col->vertices(color);
    if (spec.uniform_random_schedule) rng.shuffle(order.data(), order.size());
    return order;
}

}  // namespace

Bits run_bandaid_round(const ProtocolContext& ctx, const DiagonalStateSampler& sampler,
                       const BandaidSpec& bandaid, const NoiseModel& noise, RngStream& rng,
                       Stage stage) {
    bandaid.validate();
    Bits state = sampler.sample(rng);
    auto sub = [&](VertexColor c) {
        for (uint32_t j : bandaid_schedule(ctx, c, bandaid, rng))
            apply_bandaid(ctx, state, j, bandaid.purity, noise, rng);
    };
    switch (stage) {
        case Stage::P1:
            sub(VertexColor::A);
            break;
        case Stage::P2:
            sub(VertexColor::B);
            break;
        case Stage::full:
            sub(VertexColor::A);
            sub(VertexColor::B);
            break;
    }
    return state;
}

namespace {

Bits conditional_subprotocol(const ProtocolContext& ctx, VertexColor purify_color, Bits copy0,
                             Bits copy1, const BandaidSpec& bandaid, const NoiseModel& noise,
                             RngStream& rng) {
    apply_mcnot(ctx, purify_color, copy0, copy1);
    for (uint32_t v = 0; v < ctx.g->vertex_count; ++v)
        apply_gate_noise(ctx, v, copy0, copy1, noise.p2, rng);
    Bits sigma = measure_syndrome(ctx, copy1, purify_color, noise, rng);
    for (uint32_t j : bandaid_schedule(ctx, purify_color, bandaid, rng))
        if (sigma.get(j)) apply_bandaid(ctx, copy0, j, bandaid.purity, noise, rng);
    return copy0;
}

}  // namespace

Bits run_conditional_bandaid_round(const ProtocolContext& ctx, const DiagonalStateSampler& sampler,
                                   const BandaidSpec& bandaid, const NoiseModel& noise,
                                   RngStream& rng, Stage stage) {
    bandaid.validate();
    auto p1 = [&] {
        return conditional_subprotocol(ctx, VertexColor::A, sampler.sample(rng),
                                       sampler.sample(rng), bandaid, noise, rng);
    };
    switch (stage) {
        case Stage::P1:
            return p1();
        case Stage::P2:
            return conditional_subprotocol(ctx, VertexColor::B, sampler.sample(rng),
                                           sampler.sample(rng), bandaid, noise, rng);
        case Stage::full:
            return conditional_subprotocol(ctx, VertexColor::B, p1(), p1(), bandaid, noise, rng);
    }
    throw InvalidArgument("bad stage");
}

CreationSchedule::CreationSchedule(const Graph& g, const EdgeColoring& coloring) {
    if (coloring.color_of_edge.size() != g.edges.size())
        throw InvalidArgument("edge coloring does not match graph");
    for (size_t i = 0; i < g.edges.size(); ++i)
        for (size_t j = i + 1; j < g.edges.size(); ++j) {
            if (coloring.color_of_edge[i] != coloring.color_of_edge[j]) continue;
            auto [a, b] = g.edges[i];
            auto [c, d] = g.edges[j];
            if (a == c || a == d || b == c || b == d)
                throw InvalidArgument("improper edge coloring");
        }
    step_edges.assign(coloring.step_count, {});
    for (size_t e = 0; e < g.edges.size(); ++e)
        step_edges[coloring.color_of_edge[e]].push_back(g.edges[e]);
    std::vector<Bits> applied(g.vertex_count, Bits(g.vertex_count));
    applied_after.reserve(coloring.step_count);
    for (uint32_t step = 0; step < coloring.step_count; ++step) {
        for (auto [u, v] : step_edges[step]) {
            applied[u].set(v);
            applied[v].set(u);
        }
        applied_after.push_back(applied);
    }
}

Bits simulate_creation_transmission(const ProtocolContext& ctx, const CreationSchedule& schedule,
                                    const NoiseModel& noise, RngStream& rng) {
    const Graph& g = *ctx.g;
    Bits state(g.vertex_count);
    for (uint32_t step = 0; step < schedule.step_edges.size(); ++step) {
        const auto& applied = schedule.applied_after[step];
        auto partial_toggle = [&](uint32_t site, Pauli p) {
            bool zpart = (p == Pauli::Z || p == Pauli::Y);
            bool xpart = (p == Pauli::X || p == Pauli::Y);
            if (zpart) state.flip(site);
            if (xpart) state.xor_with(applied[site]);
        };
        for (auto [u, v] : schedule.step_edges[step]) {
            if (!rng.bernoulli(noise.p2)) continue;
            uint32_t pair = rng.uniform_u32(16);
            partial_toggle(u, static_cast<Pauli>(pair & 3));
            partial_toggle(v, static_cast<Pauli>(pair >> 2));
        }
    }
    // Transmission: single-qubit depolarizing on the finished graph state.
    for (uint32_t v = 0; v < g.vertex_count; ++v)
        if (rng.bernoulli(noise.p1))
            apply_pauli_toggle(ctx, state, v, static_cast<Pauli>(rng.uniform_u32(4)));
    return state;
}

}  // namespace gsp
