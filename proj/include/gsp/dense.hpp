#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gsp/graph.hpp"
#include "gsp/noise.hpp"
#include "gsp/rng.hpp"

namespace gsp::dense {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Hard size caps; the dense verifier exists for tiny exact checks only.
inline constexpr uint32_t kStateQubitCap = 10;   // graph_state / channels
inline constexpr uint32_t kDepolarizeCap = 5;    // depolarize_D projector product
inline constexpr uint32_t kP1QubitCap = 10;      // 3 copies, so |V| <= 3

// Pure graph-basis state |mu>: CPHASE circuit on |+>^n with Z-frame flips.
Vector graph_state_vector(const Graph& g, const Bits& mu);
Matrix graph_state(const Graph& g, const Bits& mu);

// Dense K_{a,b} (or any X-block/Z-block Pauli) on `qubits` total qubits with
// vertex v of copy c at bit c*n + v.
Matrix pauli_operator(const PauliOp& op, uint32_t qubits, uint32_t copy, uint32_t vertex_count);
Matrix correlator_operator(const Graph& g, const Bicoloring& col, const CorrelatorIndex& c);

struct KrausChannel {
    // (weight, unitary) pairs of a probabilistic unitary channel.
    std::vector<std::pair<double, Matrix>> terms;
    void validate() const;  // weights nonnegative, sum to 1 within 1e-12
};

Matrix apply_channel(const Matrix& rho, const KrausChannel& ch);

// Two-qubit depolarizing channel on qubits (q1, q2) of an m-qubit space.
KrausChannel two_qubit_depolarizing(uint32_t qubits, uint32_t q1, uint32_t q2, double p2);

// MCNOT between two copies with the Eq.-3 syndrome flow (purify color's
// info flows source -> target, other color's target -> source).
Matrix mcnot_unitary(const Graph& g, const Bicoloring& col, VertexColor purify_color,
                     uint32_t total_copies, uint32_t source_copy, uint32_t target_copy);

// Graph-basis dephasing: product over all generators of ([I] + [K_v])/2.
Matrix depolarize_D(const Graph& g, const Bicoloring& col, const Matrix& rho);

// Full subprotocol P1 on a 3-copy input: transversal CNOTs with per-site
// two-qubit depolarizing after each MCNOT, projective syndrome measurement
// summed over outcomes with the classically-controlled correction, partial
// trace to the kept copy.
Matrix run_P1_dense(const Graph& g, const Bicoloring& col, const Matrix& rho_triplet,
                    const NoiseModel& noise);

Matrix kron3(const Matrix& rho);

// max-norm of R((D rho)^{x3}) - D(R(rho^{x3})).
double check_commutation(const Graph& g, const Bicoloring& col, const Matrix& rho,
                         const NoiseModel& noise);

double expectation(const Matrix& rho, const Matrix& op);

// Density-matrix sanity: Hermitian and unit trace within tol, eigenvalues
// >= -tol. Throws InvalidArgument on violation.
void validate_density(const Matrix& rho, double tol = 1e-10);

// Random mixed state (Wishart) for property checks.
Matrix random_density(uint32_t qubits, RngStream& rng, uint32_t rank = 0);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace gsp::dense
