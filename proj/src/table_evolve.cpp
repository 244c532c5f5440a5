#include "gsp/table_evolve.hpp"

#include <bit>

#include "gsp/errors.hpp"

namespace gsp {

std::vector<double> independent_distribution(uint32_t vertex_count, std::span<const double> q) {
    if (vertex_count > kEvolveVertexCap)
        throw SizeCapExceeded("exhaustive evolution capped at 5 vertices");
    if (q.size() != vertex_count) throw InvalidArgument("one flip probability per vertex");
    size_t dim = size_t{1} << vertex_count;
    std::vector<double> dist(dim);
    for (size_t s = 0; s < dim; ++s) {
        double p = 1.0;
        for (uint32_t v = 0; v < vertex_count; ++v) p *= ((s >> v) & 1) ? q[v] : 1.0 - q[v];
        dist[s] = p;
    }
    return dist;
}

namespace {

uint32_t low_mask_of(const Bits& b) {
    uint32_t m = 0;
    for (uint32_t v = 0; v < b.n; ++v)
        if (b.get(v)) m |= 1u << v;
    return m;
}

// Toggle word of a single-site Pauli within one copy.
uint32_t pauli_mask(const Graph& g, uint32_t site, uint32_t pauli) {
    uint32_t nbr = 0;
    for (uint32_t u : g.adjacency[site]) nbr |= 1u << u;
    switch (pauli) {
        case 0: return 0;            // I
        case 1: return nbr;          // X
        case 2: return nbr | (1u << site);  // Y
        default: return 1u << site;  // Z
    }
}

// dist <- (1-p2) dist + (p2/16) sum over 16 Pauli pairs of the shifted dist.
void apply_pair_channel(std::vector<double>& dist, const Graph& g, uint32_t site, uint32_t copy_a,
                        uint32_t copy_b, uint32_t n, double p2) {
    if (p2 <= 0.0) return;
    std::vector<double> out(dist.size());
    for (uint32_t pa = 0; pa < 4; ++pa) {
        for (uint32_t pb = 0; pb < 4; ++pb) {
            size_t mask = (static_cast<size_t>(pauli_mask(g, site, pa)) << (copy_a * n)) |
                          (static_cast<size_t>(pauli_mask(g, site, pb)) << (copy_b * n));
            for (size_t s = 0; s < dist.size(); ++s) out[s ^ mask] += dist[s];
        }
    }
    for (size_t s = 0; s < dist.size(); ++s) dist[s] = (1.0 - p2) * dist[s] + (p2 / 16.0) * out[s];
}

}  // namespace

std::vector<double> evolve_three_copy_subprotocol(const Graph& g, const Bicoloring& col,
                                                  VertexColor purify_color,
                                                  const std::vector<double>& single_copy_dist,
                                                  double p2) {
    uint32_t n = g.vertex_count;
    if (n > kEvolveVertexCap) throw SizeCapExceeded("exhaustive evolution capped at 5 vertices");
    size_t dim1 = size_t{1} << n;
    if (single_copy_dist.size() != dim1)
        throw InvalidArgument("distribution size must be 2^vertex_count");
    size_t dim3 = size_t{1} << (3 * n);

    Bits pm_bits(n), om_bits(n);
    for (uint32_t v = 0; v < n; ++v) {
        if (col.color_of[v] == purify_color)
            pm_bits.set(v);
        else
            om_bits.set(v);
    }
    uint32_t pm = low_mask_of(pm_bits), om = low_mask_of(om_bits);

    std::vector<double> dist(dim3);
    for (size_t s = 0; s < dim3; ++s) {
        uint32_t m0 = s & (dim1 - 1), m1 = (s >> n) & (dim1 - 1), m2 = (s >> (2 * n)) & (dim1 - 1);
        dist[s] = single_copy_dist[m0] * single_copy_dist[m1] * single_copy_dist[m2];
    }

    auto mcnot_perm = [&](uint32_t target_copy) {
        std::vector<double> out(dim3, 0.0);
        for (size_t s = 0; s < dim3; ++s) {
            uint32_t m0 = s & (dim1 - 1);
            uint32_t mt = (s >> (target_copy * n)) & (dim1 - 1);
            uint32_t new_mt = mt ^ (m0 & pm);
            uint32_t new_m0 = m0 ^ (mt & om);
            size_t ns = (s & ~((dim1 - 1) | ((dim1 - 1) << (target_copy * n)))) | new_m0 |
                        (static_cast<size_t>(new_mt) << (target_copy * n));
            out[ns] += dist[s];
        }
        dist = std::move(out);
    };

    mcnot_perm(1);
    for (uint32_t v = 0; v < n; ++v) apply_pair_channel(dist, g, v, 0, 1, n, p2);
    mcnot_perm(2);
    for (uint32_t v = 0; v < n; ++v) apply_pair_channel(dist, g, v, 0, 2, n, p2);

    // Noiseless measurement of the purify-color syndromes on copies 1 and 2,
    // correction on copy 0, partial trace.
    std::vector<double> marginal(dim1, 0.0);
    for (size_t s = 0; s < dim3; ++s) {
        if (dist[s] == 0.0) continue;
        uint32_t m0 = s & (dim1 - 1), m1 = (s >> n) & (dim1 - 1), m2 = (s >> (2 * n)) & (dim1 - 1);
        uint32_t corr = m1 & m2 & pm;
        marginal[m0 ^ corr] += dist[s];
    }
    return marginal;
}

double distribution_expectation(const std::vector<double>& dist, const Bits& vertex_mask) {
    uint32_t mask = low_mask_of(vertex_mask);
    double acc = 0.0;
    for (size_t s = 0; s < dist.size(); ++s)
        acc += (std::popcount(s & static_cast<size_t>(mask)) & 1) ? -dist[s] : dist[s];
    return acc;
}

}  // namespace gsp
