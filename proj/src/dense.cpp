#include "gsp/dense.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>

namespace gsp::dense {

namespace {

using cplx = std::complex<double>;

uint64_t low_mask(const Bits& b) {
    uint64_t m = 0;
    for (uint32_t v = 0; v < b.n; ++v)
        if (b.get(v)) m |= uint64_t{1} << v;
    return m;
}

// Signed permutation action of an X-block/Z-block Pauli: basis index b maps
// to b ^ xmask with sign (-1)^{popcount(b & zmask)} (phases drop out of
// conjugation, so Y's i factors are omitted).
struct SignedPerm {
    uint64_t xmask = 0;
    uint64_t zmask = 0;
    int sign = 1;

    double amp(uint64_t b) const {
        return (std::popcount(b & zmask) & 1) ? -sign : sign;
    }
};

Matrix signed_perm_matrix(const SignedPerm& sp, uint32_t qubits) {
    size_t dim = size_t{1} << qubits;
    Matrix m = Matrix::Zero(dim, dim);
    for (size_t b = 0; b < dim; ++b) m(b ^ sp.xmask, b) = sp.amp(b);
    return m;
}

Matrix conjugate_by_signed_perm(const Matrix& rho, const SignedPerm& sp) {
    size_t dim = rho.rows();
    Matrix out(dim, dim);
    for (size_t a = 0; a < dim; ++a) {
        double sa = sp.amp(a);
        size_t pa = a ^ sp.xmask;
        for (size_t b = 0; b < dim; ++b)
            out(pa, b ^ sp.xmask) = sa * sp.amp(b) * rho(a, b);
    }
    return out;
}

SignedPerm pauli_word(uint32_t qubit, Pauli p);

// rho -> (I + s K)/2 rho (I + s K)/2 for a Hermitian signed-perm K with
// K^2 = I, in O(dim^2): (rho + s(K rho + rho K) + K rho K)/4.
Matrix apply_sym_projector(const Matrix& rho, const SignedPerm& k, double s) {
    size_t dim = rho.rows();
    Matrix out(dim, dim);
    for (size_t a = 0; a < dim; ++a) {
        size_t ka = a ^ k.xmask;
        double amp_ka = k.amp(ka);
        for (size_t b = 0; b < dim; ++b) {
            size_t kb = b ^ k.xmask;
            double amp_b = k.amp(b);
            cplx v = rho(a, b) + s * (amp_ka * rho(ka, b) + amp_b * rho(a, kb)) +
                     amp_ka * amp_b * rho(ka, kb);
            out(a, b) = 0.25 * v;
        }
    }
    return out;
}

Matrix conjugate_by_perm(const Matrix& rho, const std::vector<size_t>& perm) {
    size_t dim = rho.rows();
    Matrix out(dim, dim);
    for (size_t a = 0; a < dim; ++a)
        for (size_t b = 0; b < dim; ++b) out(perm[a], perm[b]) = rho(a, b);
    return out;
}

// Exact 16-Pauli-pair depolarizing conjugation in O(16 dim^2).
Matrix apply_pair_depolarizing(const Matrix& rho, uint32_t q1, uint32_t q2, double p2) {
    if (p2 <= 0.0) return rho;
    size_t dim = rho.rows();
    Matrix acc = Matrix::Zero(dim, dim);
    for (uint32_t i = 0; i < 4; ++i) {
        for (uint32_t j = 0; j < 4; ++j) {
            SignedPerm a = pauli_word(q1, static_cast<Pauli>(i));
            SignedPerm b = pauli_word(q2, static_cast<Pauli>(j));
            SignedPerm both;
            both.xmask = a.xmask | b.xmask;
            both.zmask = a.zmask | b.zmask;
            acc += conjugate_by_signed_perm(rho, both);
        }
    }
    return (1.0 - p2) * rho + (p2 / 16.0) * acc;
}

SignedPerm pauli_word(uint32_t qubit, Pauli p) {
    SignedPerm sp;
    switch (p) {
        case Pauli::I: break;
        case Pauli::X: sp.xmask = uint64_t{1} << qubit; break;
        case Pauli::Z: sp.zmask = uint64_t{1} << qubit; break;
        case Pauli::Y:
            sp.xmask = uint64_t{1} << qubit;
            sp.zmask = uint64_t{1} << qubit;
            break;
    }
    return sp;
}

}  // namespace

Vector graph_state_vector(const Graph& g, const Bits& mu) {
    uint32_t n = g.vertex_count;
    if (n > kStateQubitCap) throw SizeCapExceeded("graph_state capped at 10 qubits");
    if (mu.n != n) throw InvalidArgument("syndrome vector size mismatch");
    size_t dim = size_t{1} << n;
    uint64_t frame = low_mask(mu);
    Vector psi(dim);
    double norm = std::pow(2.0, -0.5 * n);
    for (size_t b = 0; b < dim; ++b) {
        int parity = std::popcount(b & frame) & 1;
        for (auto [u, v] : g.edges) parity ^= ((b >> u) & (b >> v)) & 1;
        psi(b) = parity ? -norm : norm;
    }
    return psi;
}

Matrix graph_state(const Graph& g, const Bits& mu) {
    Vector psi = graph_state_vector(g, mu);
    return psi * psi.adjoint();
}

Matrix pauli_operator(const PauliOp& op, uint32_t qubits, uint32_t copy, uint32_t vertex_count) {
    if (qubits > kStateQubitCap) throw SizeCapExceeded("dense operator capped at 10 qubits");
    SignedPerm sp;
    sp.xmask = low_mask(op.x) << (copy * vertex_count);
    sp.zmask = low_mask(op.z) << (copy * vertex_count);
    sp.sign = op.sign;
    return signed_perm_matrix(sp, qubits);
}

Matrix correlator_operator(const Graph& g, const Bicoloring& col, const CorrelatorIndex& c) {
    return pauli_operator(pauli_support(g, col, c), g.vertex_count, 0, g.vertex_count);
}

void KrausChannel::validate() const {
    double sum = 0.0;
    for (const auto& [w, u] : terms) {
        if (w < 0.0) throw InvalidArgument("channel weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InvalidArgument("channel weights must sum to 1 within 1e-12");
}

Matrix apply_channel(const Matrix& rho, const KrausChannel& ch) {
    ch.validate();
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& [w, u] : ch.terms) {
        if (u.rows() != rho.rows()) throw InvalidArgument("channel dimension mismatch");
        if (w == 0.0) continue;
        out += w * (u * rho * u.adjoint());
    }
    return out;
}

KrausChannel two_qubit_depolarizing(uint32_t qubits, uint32_t q1, uint32_t q2, double p2) {
    KrausChannel ch;
    size_t dim = size_t{1} << qubits;
    ch.terms.push_back({1.0 - p2, Matrix::Identity(dim, dim)});
    for (uint32_t i = 0; i < 4; ++i) {
        for (uint32_t j = 0; j < 4; ++j) {
            SignedPerm a = pauli_word(q1, static_cast<Pauli>(i));
            SignedPerm b = pauli_word(q2, static_cast<Pauli>(j));
            SignedPerm both;
            both.xmask = a.xmask | b.xmask;
            both.zmask = a.zmask | b.zmask;
            ch.terms.push_back({p2 / 16.0, signed_perm_matrix(both, qubits)});
        }
    }
    return ch;
}

Matrix mcnot_unitary(const Graph& g, const Bicoloring& col, VertexColor purify_color,
                     uint32_t total_copies, uint32_t source_copy, uint32_t target_copy) {
    uint32_t n = g.vertex_count;
    uint32_t m = total_copies * n;
    if (m > kStateQubitCap) throw SizeCapExceeded("dense MCNOT capped at 10 qubits");
    size_t dim = size_t{1} << m;
    // Syndrome flow per the graph-basis action: for purify-color sites the
    // physical CNOT control sits on the target copy, for the other color on
    // the source copy.
    Matrix u = Matrix::Zero(dim, dim);
    for (size_t b = 0; b < dim; ++b) {
        size_t out = b;
        for (uint32_t v = 0; v < n; ++v) {
            uint32_t qs = source_copy * n + v, qt = target_copy * n + v;
            uint32_t qc = (col.color_of[v] == purify_color) ? qt : qs;
            uint32_t qx = (col.color_of[v] == purify_color) ? qs : qt;
            if ((b >> qc) & 1) out ^= size_t{1} << qx;
        }
        u(out, b) = 1.0;
    }
    return u;
}

Matrix depolarize_D(const Graph& g, const Bicoloring& col, const Matrix& rho) {
    uint32_t n = g.vertex_count;
    if (n > kDepolarizeCap) throw SizeCapExceeded("depolarize_D capped at 5 qubits");
    if (rho.rows() != (1 << n)) throw InvalidArgument("density matrix dimension mismatch");
    Matrix out = rho;
    for (uint32_t v = 0; v < n; ++v) {
        uint32_t vs[1] = {v};
        PauliOp k = pauli_support(g, col, make_correlator(g, col, vs));
        SignedPerm sp{low_mask(k.x), low_mask(k.z), k.sign};
        out = 0.5 * (out + conjugate_by_signed_perm(out, sp));
    }
    return out;
}

Matrix kron3(const Matrix& rho) {
    size_t d = rho.rows();
    Matrix r2(d * d, d * d);
    for (size_t a = 0; a < d; ++a)
        for (size_t b = 0; b < d; ++b)
            r2.block(a * d, b * d, d, d) = rho(a, b) * rho;
    // Bit layout: copy index grows with significance, so copy 0 occupies the
    // least significant bits and kron order is rho_2 (x) rho_1 (x) rho_0.
    Matrix r3(d * d * d, d * d * d);
    for (size_t a = 0; a < d; ++a)
        for (size_t b = 0; b < d; ++b)
            r3.block(a * d * d, b * d * d, d * d, d * d) = rho(a, b) * r2;
    return r3;
}

namespace {

Matrix partial_trace_to_copy0(const Matrix& rho3, uint32_t n) {
    size_t d0 = size_t{1} << n;
    size_t rest = rho3.rows() / d0;
    Matrix out = Matrix::Zero(d0, d0);
    for (size_t r = 0; r < rest; ++r)
        for (size_t a = 0; a < d0; ++a)
            for (size_t b = 0; b < d0; ++b) out(a, b) += rho3(a + r * d0, b + r * d0);
    return out;
}

}  // namespace

Matrix run_P1_dense(const Graph& g, const Bicoloring& col, const Matrix& rho_triplet,
                    const NoiseModel& noise) {
    uint32_t n = g.vertex_count;
    uint32_t m = 3 * n;
    if (m > kP1QubitCap) throw SizeCapExceeded("run_P1_dense capped at 10 total qubits");
    if (rho_triplet.rows() != (1 << m)) throw InvalidArgument("triplet dimension mismatch");

    // MCNOTs as basis permutations, channels as signed-perm conjugations.
    size_t dim = size_t{1} << m;
    auto perm_of_unitary = [&](VertexColor purify, uint32_t src, uint32_t tgt) {
        std::vector<size_t> perm(dim);
        for (size_t b = 0; b < dim; ++b) {
            size_t out = b;
            for (uint32_t v = 0; v < n; ++v) {
                uint32_t qs = src * n + v, qt = tgt * n + v;
                uint32_t qc = (col.color_of[v] == purify) ? qt : qs;
                uint32_t qx = (col.color_of[v] == purify) ? qs : qt;
                if ((b >> qc) & 1) out ^= size_t{1} << qx;
            }
            perm[b] = out;
        }
        return perm;
    };
    Matrix rho = conjugate_by_perm(rho_triplet, perm_of_unitary(VertexColor::A, 0, 1));
    for (uint32_t v = 0; v < n; ++v) rho = apply_pair_depolarizing(rho, v, n + v, noise.p2);
    rho = conjugate_by_perm(rho, perm_of_unitary(VertexColor::A, 0, 2));
    for (uint32_t v = 0; v < n; ++v) rho = apply_pair_depolarizing(rho, v, 2 * n + v, noise.p2);

    // Measurement of the color-A syndromes on copies 1 and 2, summed over
    // outcomes with the classically controlled Z correction on copy 0.
    const auto& a_vertices = col.vertices(VertexColor::A);
    uint32_t na = static_cast<uint32_t>(a_vertices.size());
    std::vector<SignedPerm> k_ops;
    for (uint32_t j : a_vertices) {
        uint32_t vs[1] = {j};
        PauliOp k = pauli_support(g, col, make_correlator(g, col, vs));
        k_ops.push_back({low_mask(k.x), low_mask(k.z), k.sign});
    }
    Matrix acc = Matrix::Zero(1 << n, 1 << n);
    for (uint32_t s1 = 0; s1 < (1u << na); ++s1) {
        for (uint32_t s2 = 0; s2 < (1u << na); ++s2) {
            Matrix term = rho;
            for (uint32_t idx = 0; idx < na; ++idx) {
                SignedPerm k1{k_ops[idx].xmask << n, k_ops[idx].zmask << n, k_ops[idx].sign};
                SignedPerm k2{k_ops[idx].xmask << (2 * n), k_ops[idx].zmask << (2 * n),
                              k_ops[idx].sign};
                term = apply_sym_projector(term, k1, ((s1 >> idx) & 1) ? -1.0 : 1.0);
                term = apply_sym_projector(term, k2, ((s2 >> idx) & 1) ? -1.0 : 1.0);
            }
            // Correction Z_j on copy 0 wherever both syndromes fired.
            SignedPerm corr;
            for (uint32_t idx = 0; idx < na; ++idx)
                if (((s1 >> idx) & 1) && ((s2 >> idx) & 1))
                    corr.zmask |= uint64_t{1} << a_vertices[idx];
            term = conjugate_by_signed_perm(term, corr);
            acc += partial_trace_to_copy0(term, n);
        }
    }
    return acc;
}

double check_commutation(const Graph& g, const Bicoloring& col, const Matrix& rho,
                         const NoiseModel& noise) {
    Matrix lhs = run_P1_dense(g, col, kron3(depolarize_D(g, col, rho)), noise);
    Matrix rhs = depolarize_D(g, col, run_P1_dense(g, col, kron3(rho), noise));
    return max_abs_diff(lhs, rhs);
}

double expectation(const Matrix& rho, const Matrix& op) {
    return (op * rho).trace().real();
}

void validate_density(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols()) throw InvalidArgument("density matrix must be square");
    if (max_abs_diff(rho, rho.adjoint()) > tol)
        throw InvalidArgument("density matrix not Hermitian within tolerance");
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        throw InvalidArgument("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    if (es.eigenvalues().minCoeff() < -tol)
        throw InvalidArgument("density matrix has negative eigenvalues");
}

Matrix random_density(uint32_t qubits, RngStream& rng, uint32_t rank) {
    size_t dim = size_t{1} << qubits;
    if (rank == 0) rank = static_cast<uint32_t>(dim);
    auto gauss = [&rng]() {
        double u1 = std::max(rng.uniform(), 1e-300);
        double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    Matrix a(dim, rank);
    for (size_t i = 0; i < dim; ++i)
        for (uint32_t j = 0; j < rank; ++j) a(i, j) = cplx(gauss(), gauss());
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    return rho;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace gsp::dense
