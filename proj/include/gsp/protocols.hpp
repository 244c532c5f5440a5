#pragma once

#include <optional>
#include <vector>

#include "gsp/bits.hpp"
#include "gsp/graph.hpp"
#include "gsp/noise.hpp"
#include "gsp/rng.hpp"
#include "gsp/sampler.hpp"

namespace gsp {

enum class Stage { P1, P2, full };

// Precomputed per-graph machinery shared by all protocol runs: color masks,
// neighbor masks for Pauli toggles, schedules.
struct ProtocolContext {
    const Graph* g = nullptr;
    const Bicoloring* col = nullptr;
    Bits color_mask[2];
    std::vector<Bits> nbr_mask;  // per vertex: mask of its neighbors
    uint32_t max_degree = 0;
    bool degree_regular = false;

    ProtocolContext(const Graph& graph, const Bicoloring& coloring);

    const Bits& mask(VertexColor c) const { return color_mask[static_cast<int>(c)]; }
};

// Toggle set of a single-site Pauli error: Z at k flips bit k, X at k flips
// the bits of N(k), Y flips both.
void apply_pauli_toggle(const ProtocolContext& ctx, Bits& state, uint32_t site, Pauli p);

// Bitwise MCNOT action in the graph basis. With purify_color = A:
// target.A ^= source.A and source.B ^= target.B (and color-swapped for B).
void apply_mcnot(const ProtocolContext& ctx, VertexColor purify_color, Bits& source, Bits& target);

// Exact two-qubit depolarizing channel of a transversal CNOT at `site`: with
// probability p2 a uniformly random Pauli pair hits (copy_a, copy_b).
void apply_gate_noise(const ProtocolContext& ctx, uint32_t site, Bits& copy_a, Bits& copy_b,
                      double p2, RngStream& rng);

// Syndrome extraction for the measured color. The ideal outcome for K_j is
// bit mu_j; with measurement noise each of the deg(j)+1 single-qubit
// outcomes entering K_j flips independently with probability p2/2.
Bits measure_syndrome(const ProtocolContext& ctx, const Bits& state, VertexColor measured_color,
                      const NoiseModel& noise, RngStream& rng);

// One three-copy subprotocol purifying `purify_color`; copies 1 and 2 are
// consumed, copy 0 is corrected in place and returned.
void three_copy_subprotocol(const ProtocolContext& ctx, VertexColor purify_color, Bits& copy0,
                            Bits& copy1, Bits& copy2, const NoiseModel& noise, RngStream& rng);

// Full round P2 ∘ P1 (stage full: nine fresh samples) or a single stage.
// Measurement noise is forced off (the analysis assumes noiseless syndrome
// readout for this protocol).
Bits run_three_copy_round(const ProtocolContext& ctx, const DiagonalStateSampler& sampler,
                          const NoiseModel& noise, RngStream& rng, Stage stage = Stage::full);

// Two-copy post-selection subprotocol; nullopt means Discard.
std::optional<Bits> run_postselection_round(const ProtocolContext& ctx, VertexColor purify_color,
                                            const DiagonalStateSampler& sampler,
                                            const NoiseModel& noise, RngStream& rng);

// Applies one star(d_j) bandaid of the given purity at vertex j: syndrome
// flow center ^= mu_j, mu_neighbor ^= leaf; gate noise per CNOT pair;
// noisy parity measurement of the star; correction bit onto mu_j.
void apply_bandaid(const ProtocolContext& ctx, Bits& state, uint32_t target, double bandaid_purity,
                   const NoiseModel& noise, RngStream& rng);

Bits run_bandaid_round(const ProtocolContext& ctx, const DiagonalStateSampler& sampler,
                       const BandaidSpec& bandaid, const NoiseModel& noise, RngStream& rng,
                       Stage stage = Stage::full);

Bits run_conditional_bandaid_round(const ProtocolContext& ctx, const DiagonalStateSampler& sampler,
                                   const BandaidSpec& bandaid, const NoiseModel& noise,
                                   RngStream& rng, Stage stage = Stage::full);

// Precomputed creation circuit: per-step edge lists plus, for every vertex,
// the mask of neighbors whose CPHASE is already applied at each step.
// Construction validates that the coloring is proper.
struct CreationSchedule {
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> step_edges;
    std::vector<std::vector<Bits>> applied_after;  // [step][vertex]

    CreationSchedule(const Graph& g, const EdgeColoring& coloring);
};

// Noisy creation in edge-coloring time steps followed by per-qubit
// transmission depolarizing. X-type error components propagate only across
// edges whose CPHASE was already applied.
Bits simulate_creation_transmission(const ProtocolContext& ctx, const CreationSchedule& schedule,
                                    const NoiseModel& noise, RngStream& rng);

inline Bits simulate_creation_transmission(const ProtocolContext& ctx,
                                           const EdgeColoring& coloring, const NoiseModel& noise,
                                           RngStream& rng) {
    CreationSchedule schedule(*ctx.g, coloring);
    return simulate_creation_transmission(ctx, schedule, noise, rng);
}

}  // namespace gsp
