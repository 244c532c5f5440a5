#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsp/recursion.hpp"

namespace gsp {

enum class Stability { attractive, repulsive, marginal };

const char* stability_name(Stability s);

struct FixedPoint {
    double location = 0.0;
    Stability stability = Stability::marginal;
    double derivative = 0.0;
};

struct FixedPointReport {
    std::vector<FixedPoint> points;  // sorted by location
    std::string map_spec;
};

using ScalarMap = std::function<double(double)>;

// Dense grid scan for sign changes of f(x) - x followed by bisection;
// stability from a centered finite-difference derivative.
FixedPointReport find_fixed_points(const ScalarMap& map, double lo = 0.0, double hi = 1.0,
                                   double tol = 1e-10, int grid_points = 10000);

// Iterates [x0, f(x0), f(f(x0)), ...], k+1 values.
std::vector<double> concatenation_trace(const ScalarMap& map, double x0, int k);

struct ThresholdResult {
    double p_th = 0.0;
    double alpha_th = 0.0;  // (1 - p_th)^{d+1}
    int degree = 0;
};

// Largest p2 (bisection to 1e-6) for which the family still has a
// nontrivial attractive fixed point. Throws NumericalFailure when the
// family has none at p2 = 0.
ThresholdResult threshold_scan(const std::function<ScalarMap(double)>& family_of_p2, int d,
                               double p2_hi = 0.05, double tol = 1e-6);

// Number of sign changes among nonzero coefficients (descending degree):
// an upper bound on the positive real roots, tight modulo an even gap.
int descartes_sign_count(std::span<const double> coefficients);

struct UniquenessEntry {
    std::string label;
    int positive_fixed_points = 0;
    int attractive_count = 0;
    std::optional<double> attractive_location;
    bool interval_ok = true;       // weight-2 point inside [2<a>_fp - 1, 1]
    double factorization_gap = 0;  // |z* - product of weight-1 fixed points|
};

struct UniquenessReport {
    int d = 0;
    double p2 = 0.0;
    std::vector<UniquenessEntry> entries;
    bool all_within_bounds = true;
};

// Appendix-B style audit of the three-copy protocol at a given degree and
// gate noise: weight-1 composed maps plus weight-2 composed maps (pure
// two-generator and mixed-color) with weight-1 values frozen at their
// operating fixed points. Uses ring(8) for d=2 and torus(4,4) for d=4.
UniquenessReport uniqueness_audit(int d, double p2);

enum class TradeoffProtocol { bandaid, conditional_bandaid };
enum class BandaidSource { linear_eq25, mc_postselection };

struct TradeoffPoint {
    double p1 = 0.0, p2 = 0.0;
    double unpurified = 0.0;
    double bandaid_purity = 0.0;
    double purified = 0.0;
    bool bandaid_ok = false;
    bool in_region = false;
};

struct TradeoffCurve {
    TradeoffProtocol protocol;
    BandaidSource source;
    int d = 0;
    std::vector<double> p1_grid, p2_grid;
    std::vector<TradeoffPoint> points;  // p1-major order

    const TradeoffPoint& at(size_t i1, size_t i2) const {
        return points[i1 * p2_grid.size() + i2];
    }
    // Largest in-region p2 in the first p1 column / largest in-region p1 in
    // the first p2 row; NaN when the region misses the axis strip.
    double p2_axis_intercept() const;
    double p1_axis_intercept() const;
    // Same extents for the bandaid-viability (breakdown) boundary.
    double p2_axis_breakdown() const;
    double p1_axis_breakdown() const;
    double region_area() const;  // grid-cell measure
    int region_cells() const;
};

struct TradeoffMcParams {
    int postselect_rounds = 4;
    uint64_t samples = 4000;
    uint64_t seed = 1;
    int workers = 0;
};

// Region computation per grid point: unpurified creation purity, bandaid
// purity from the chosen source, purified fixed point from the protocol's
// composed map (bound map for the conditional protocol, iterated from the
// unpurified starting purity).
TradeoffCurve tradeoff_region(TradeoffProtocol protocol, int d, std::span<const double> p1_grid,
                              std::span<const double> p2_grid, BandaidSource source,
                              const TradeoffMcParams& mc = {});

// Post-selection purification of a star(d) bandaid created and transmitted
// with the given noise: `rounds` alternating-color post-selection stages,
// recursively pairing copies. Returns per-qubit purities before and after,
// plus whether purification raised the minimum purity.
struct BandaidPostselectionResult {
    std::vector<double> initial_purity;
    std::vector<double> final_purity;
    double min_initial = 0.0;
    double min_final = 0.0;
    bool converged = false;  // min purity increased and acceptance stayed sane
    double acceptance = 0.0;
};

BandaidPostselectionResult postselect_bandaid_mc(int d, double p1, double p2, int rounds,
                                                 uint64_t samples, uint64_t seed, int workers = 0);

}  // namespace gsp
