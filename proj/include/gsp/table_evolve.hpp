#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsp/bits.hpp"
#include "gsp/graph.hpp"

namespace gsp {

// Exact distribution arithmetic over syndrome vectors for tiny graphs.
// Index bit v of a basis state is syndrome bit mu_v. Vertex cap 5 keeps the
// three-copy joint space at 2^15.

inline constexpr uint32_t kEvolveVertexCap = 5;

std::vector<double> independent_distribution(uint32_t vertex_count, std::span<const double> q);

// Exhaustive evolution of one three-copy subprotocol purifying
// `purify_color` on three i.i.d. copies of `single_copy_dist`, with the
// exact 16-Pauli-pair gate channel at probability p2 after each MCNOT and
// noiseless syndrome measurement. Returns the exact copy-0 marginal.
std::vector<double> evolve_three_copy_subprotocol(const Graph& g, const Bicoloring& col,
                                                  VertexColor purify_color,
                                                  const std::vector<double>& single_copy_dist,
                                                  double p2);

double distribution_expectation(const std::vector<double>& dist, const Bits& vertex_mask);

}  // namespace gsp
