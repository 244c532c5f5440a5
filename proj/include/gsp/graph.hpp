#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsp/bits.hpp"
#include "gsp/errors.hpp"

namespace gsp {

enum class VertexColor : uint8_t { A = 0, B = 1 };

inline VertexColor other_color(VertexColor c) {
    return c == VertexColor::A ? VertexColor::B : VertexColor::A;
}
inline const char* color_name(VertexColor c) { return c == VertexColor::A ? "A" : "B"; }

struct Graph {
    uint32_t vertex_count = 0;
    std::vector<std::pair<uint32_t, uint32_t>> edges;   // u < v, sorted, no duplicates
    std::vector<std::vector<uint32_t>> adjacency;

    uint32_t degree(uint32_t v) const { return static_cast<uint32_t>(adjacency[v].size()); }
    uint32_t max_degree() const;
    bool degree_regular() const;
};

Graph build_graph(std::span<const std::pair<uint32_t, uint32_t>> edge_list, uint32_t vertex_count);

struct Bicoloring {
    std::vector<VertexColor> color_of;
    // Vertices of each color in ascending order; mask indices follow this order.
    std::vector<uint32_t> vertices_of[2];
    // Per-vertex index within its own color class.
    std::vector<uint32_t> color_index;

    uint32_t count(VertexColor c) const {
        return static_cast<uint32_t>(vertices_of[static_cast<int>(c)].size());
    }
    const std::vector<uint32_t>& vertices(VertexColor c) const {
        return vertices_of[static_cast<int>(c)];
    }
};

// Canonical proper 2-coloring: the lowest-index vertex of each connected
// component gets color A. Throws NotBicolorable on odd cycles.
Bicoloring bicolor(const Graph& g);

struct EdgeColoring {
    std::vector<uint32_t> color_of_edge;  // parallel to Graph::edges
    uint32_t step_count = 0;
    // Set when only max_degree + 1 colors were achievable; creation then
    // takes d + 1 time steps while the closed forms assume d.
    bool used_extra_color = false;
};

// Proper edge coloring with at most max_degree colors when the search finds
// one, max_degree + 1 otherwise (flagged).
EdgeColoring edge_color(const Graph& g);

enum class StandardKind { ring, torus, path, star };

Graph make_ring(uint32_t n);
Graph make_torus(uint32_t w, uint32_t h);
Graph make_path(uint32_t n);
Graph make_star(uint32_t d);

// Parses "ring:6", "torus:4x4", "path:2", "star:4".
Graph parse_standard(const std::string& name);

// Stabilizer element selector: a_mask over color-A vertices (ascending
// order), b_mask over color-B vertices.
struct CorrelatorIndex {
    Bits a_mask;
    Bits b_mask;

    uint32_t weight() const { return a_mask.popcount() + b_mask.popcount(); }
};

CorrelatorIndex make_correlator(const Graph& g, const Bicoloring& col,
                                std::span<const uint32_t> vertices);
CorrelatorIndex empty_correlator(const Bicoloring& col);

// Mask over all vertices whose syndrome-bit parity gives <K_{a,b}>.
Bits correlator_vertex_mask(const Graph& g, const Bicoloring& col, const CorrelatorIndex& c);

enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

// Pauli operator in the X-block/Z-block convention:
//   op = sign * prod_v X_v^{x.get(v)} * prod_v Z_v^{z.get(v)}.
// Products of commuting stabilizer elements keep sign real.
struct PauliOp {
    Bits x;
    Bits z;
    int sign = 1;

    Pauli site(uint32_t v) const {
        bool xv = x.get(v), zv = z.get(v);
        if (xv && zv) return Pauli::Y;
        if (xv) return Pauli::X;
        if (zv) return Pauli::Z;
        return Pauli::I;
    }
    Bits non_identity_mask() const { return x | z; }
};

// Site-wise Pauli decomposition of K_{a,b} = prod K_i^{a_i} prod K_j^{b_j},
// built by multiplying generators in ascending vertex order.
PauliOp pauli_support(const Graph& g, const Bicoloring& col, const CorrelatorIndex& c);

// (sign-tracked) product of two Pauli operators in the same convention.
PauliOp pauli_multiply(const PauliOp& p, const PauliOp& q);

bool pauli_anticommutes(const PauliOp& p, const PauliOp& q);

std::vector<Pauli> site_paulis(const PauliOp& op, uint32_t vertex_count);

}  // namespace gsp
