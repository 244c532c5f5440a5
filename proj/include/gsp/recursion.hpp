#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "gsp/graph.hpp"
#include "gsp/protocols.hpp"

namespace gsp {

enum class MapKind { three_copy, postselect_zflip, bandaid, conditional_bandaid_bound };

// One-point recursion map <j>' = f(<j>) for a protocol stage and color
// branch. `full` composes P2 after P1. xb is the bandaid purity where
// applicable, ignored otherwise.
struct OnePointMap {
    MapKind kind = MapKind::three_copy;
    VertexColor branch = VertexColor::A;
    Stage stage = Stage::full;
    int d = 2;
    double p2 = 0.0;
    double xb = 1.0;

    double operator()(double x) const;
    std::string spec_string() const;
};

// Parses "three-copy:full:A", "postselect:P1:B", "bandaid:...",
// "conditional-bound:...".
OnePointMap parse_map_spec(const std::string& spec, int d = 2, double p2 = 0.0, double xb = 1.0);

// ---- three-copy / post-selection stage maps -------------------------------

// Purification map of the color being acted on, with gate noise:
// a^2 x + (a/2) x (1 - a x^2), a = (1-p2)^{d+1}. Reduces to (3 - x^2) x / 2.
double three_copy_purify(int d, double p2, double x);
// Pollution map a^2 x^3, reducing to x^3.
double three_copy_pollute(int d, double p2, double x);

double postselect_purify(double x);  // 2x / (1 + x^2), Z-flip input model only
double postselect_pollute(double x);  // x^2

// ---- bandaid stage maps ---------------------------------------------------

// Purity transfer onto the purified color: (1-p2)^{(d(d+3)+4)/2} xb.
double bandaid_transfer(int d, double p2, double xb);
// Pollution of the other color: (1-p2)^{2d} x xb^d.
double bandaid_pollute(int d, double p2, double xb, double x);

// Post-selected bandaid quality to leading order: max(0, 1 - (d+1) p2).
double postselection_bandaid_quality(int d, double p2);

// First-order full-round bandaid purity with post-selected bandaids:
// 1 - ((3d^2 + 11d + 6)/2) p2. The coefficient is fixed by expanding the
// full A-branch with xb = 1 - (d+1) p2; exponent (d(d+7)+4)/2 plus (d+1)^2.
double bandaid_linear_fixed_point(int d, double p2);

// ---- conditional bandaid maps ---------------------------------------------

// The cited closed form for subprotocol P1 on the purified color:
// (a/2)(2 a x + xb - a xb x^2).
double conditional_p1_cited(int d, double p2, double xb, double x);

// Exact single-subprotocol purify map from enumerating the two-copy
// detect-then-bandaid step with gate noise and noiseless syndrome readout:
// a x + (xb a / 2)(1 - a x^2); the xb a factor carries the replacing
// bandaid's own CNOT noise. The cited form differs from this at O(p2); the
// leading-order fixed point 1 - 2(d+1) p2 requires this version, so the
// composed bound map uses it.
double conditional_purify_exact(int d, double p2, double xb, double x);

// Step one of the polluting subprotocol: a x^2.
double conditional_step_one(int d, double p2, double x);

// Lower bound on the polluting subprotocol including conditional bandaids
// on the neighbors: a (1 - (d/2)(1 - b^d)(1 - neighbor_purity)) x^2 with
// b = (1-p2)^2 xb. Clamped below at -1.
double conditional_p2_lower_bound(int d, double p2, double xb, double x, double neighbor_purity);

// ---- generalized stabilizer recursion -------------------------------------

struct ExpectationTable {
    // Keys are (a_mask, b_mask) in the compacted per-color order.
    std::map<std::pair<uint64_t, uint64_t>, double> values;

    void set(uint64_t a_mask, uint64_t b_mask, double value);
    double get(uint64_t a_mask, uint64_t b_mask) const;  // throws MissingEntry
    bool contains(uint64_t a_mask, uint64_t b_mask) const;
};

uint64_t mask_to_u64(const Bits& b);
Bits u64_to_mask(uint64_t m, uint32_t n);

// Generalized one-subprotocol update of <K_{a,b}> under the purifying
// subprotocol for `purify_color`:
//   2^{-|a|} sum_{a1,a2 << a} (-1)^{a1.a2} eta(a1,a2)
//            <a+a1+a2, b><a1, b><a2, b>,
// where eta multiplies (1-p2) once per site at which either operator hit by
// that noise channel is non-identity; the first channel acts on the
// post-MCNOT(0,1) kets (a+a2, b), (a1, 0) and the second on the
// post-MCNOT(0,2) kets (a, b), (a2, 0).
double generalized_p1_update(const Graph& g, const Bicoloring& col, const ExpectationTable& table,
                             const CorrelatorIndex& target, double p2,
                             VertexColor purify_color = VertexColor::A);

// Same update but reporting the maximum weight of any table entry read
// (structural check that weight never grows).
double generalized_p1_update_traced(const Graph& g, const Bicoloring& col,
                                    const ExpectationTable& table, const CorrelatorIndex& target,
                                    double p2, VertexColor purify_color, uint32_t* max_weight_read);

// ---- creation and efficiency ----------------------------------------------

// (1-p2)^{d(d+1)/2} (1-p1)^{d+1}.
double creation_purity(int d, double p1, double p2);

// (P0/Pth)^{2^k}; throws when P0 >= Pth (bound inapplicable).
double efficiency_bound(double p0, double p_th, int k);

// Copies consumed by k-fold concatenation of the three-copy protocol: 3^{2k}.
uint64_t concatenation_copies(int k);

}  // namespace gsp
