#include "gsp/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gsp/estimator.hpp"
#include "gsp/table_evolve.hpp"

namespace gsp {

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::attractive: return "attractive";
        case Stability::repulsive: return "repulsive";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

namespace {
constexpr double kNodeZero = 1e-13;
constexpr double kMarginalBand = 1e-6;
}  // namespace

FixedPointReport find_fixed_points(const ScalarMap& map, double lo, double hi, double tol,
                                   int grid_points) {
    if (!(lo < hi)) throw InvalidArgument("empty interval");
    if (grid_points < 2) throw InvalidArgument("grid too coarse");
    FixedPointReport report;
    double step = (hi - lo) / grid_points;

    auto g = [&](double x) { return map(x) - x; };

    std::vector<double> roots;
    double prev_x = lo, prev_g = g(lo);
    if (std::abs(prev_g) <= kNodeZero) roots.push_back(lo);
    for (int i = 1; i <= grid_points; ++i) {
        double x = lo + i * step;
        if (i == grid_points) x = hi;
        double gx = g(x);
        if (std::abs(gx) <= kNodeZero) {
            roots.push_back(x);
        } else if (std::abs(prev_g) > kNodeZero && ((prev_g < 0) != (gx < 0))) {
            double a = prev_x, b = x, ga = prev_g;
            while (b - a > tol) {
                double m = 0.5 * (a + b);
                double gm = g(m);
                if (gm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((ga < 0) != (gm < 0))
                    b = m;
                else {
                    a = m;
                    ga = gm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_g = gx;
    }
    std::sort(roots.begin(), roots.end());
    double merge_gap = std::max(tol * 4, 1e-9);
    for (double r : roots) {
        if (!report.points.empty() && r - report.points.back().location < merge_gap) continue;
        FixedPoint fp;
        fp.location = r;
        double h = 1e-6;
        double xl = std::max(lo, r - h), xr = std::min(hi, r + h);
        fp.derivative = (map(xr) - map(xl)) / (xr - xl);
        double mag = std::abs(fp.derivative);
        if (mag < 1.0 - kMarginalBand)
            fp.stability = Stability::attractive;
        else if (mag > 1.0 + kMarginalBand)
            fp.stability = Stability::repulsive;
        else
            fp.stability = Stability::marginal;
        report.points.push_back(fp);
    }
    return report;
}

std::vector<double> concatenation_trace(const ScalarMap& map, double x0, int k) {
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw InvalidArgument("x0 must be in [0,1]");
    std::vector<double> trace{x0};
    double x = x0;
    for (int i = 0; i < k; ++i) {
        x = map(x);
        trace.push_back(x);
    }
    return trace;
}

namespace {

bool has_nontrivial_attractive(const ScalarMap& map) {
    auto rep = find_fixed_points(map);
    for (const auto& fp : rep.points)
        if (fp.location > 0.1 && fp.stability == Stability::attractive) return true;
    return false;
}

}  // namespace

ThresholdResult threshold_scan(const std::function<ScalarMap(double)>& family_of_p2, int d,
                               double p2_hi, double tol) {
    if (!has_nontrivial_attractive(family_of_p2(0.0)))
        throw NumericalFailure("invalid family: no nontrivial attractive fixed point at p2 = 0");
    double lo = 0.0, hi = p2_hi;
    while (has_nontrivial_attractive(family_of_p2(hi))) {
        hi *= 2.0;
        if (hi > 0.5) throw NumericalFailure("family never loses its attractive fixed point");
    }
    // Monotonicity spot check along the scan.
    bool seen_false = false;
    for (int i = 0; i <= 8; ++i) {
        bool ok = has_nontrivial_attractive(family_of_p2(hi * i / 8.0));
        if (!ok) seen_false = true;
        if (seen_false && ok)
            throw NumericalFailure("family is not monotone in p2 on the scanned range");
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (has_nontrivial_attractive(family_of_p2(mid)))
            lo = mid;
        else
            hi = mid;
    }
    ThresholdResult r;
    r.p_th = 0.5 * (lo + hi);
    r.alpha_th = std::pow(1.0 - r.p_th, d + 1);
    r.degree = d;
    return r;
}

int descartes_sign_count(std::span<const double> coefficients) {
    if (coefficients.empty()) throw InvalidArgument("empty coefficient list");
    if (coefficients[0] == 0.0) throw InvalidArgument("leading coefficient must be nonzero");
    int changes = 0;
    int prev = 0;
    for (double c : coefficients) {
        if (c == 0.0) continue;
        int s = c > 0 ? 1 : -1;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

namespace {

struct AuditSetup {
    Graph g;
    Bicoloring col;
    uint32_t pure_j, pure_k;   // disjoint same-color (A) pair
    uint32_t mixed_j, mixed_i; // disjoint mixed pair (A, B)
};

AuditSetup audit_setup(int d) {
    AuditSetup s;
    if (d == 2) {
        s.g = make_ring(8);
        s.pure_j = 0;
        s.pure_k = 4;
        s.mixed_j = 0;
        s.mixed_i = 5;
    } else if (d == 4) {
        s.g = make_torus(4, 4);
        s.pure_j = 0;
        s.pure_k = 10;
        s.mixed_j = 0;
        s.mixed_i = 9;
    } else {
        throw InvalidArgument("uniqueness audit supports d in {2, 4}");
    }
    s.col = bicolor(s.g);
    return s;
}

UniquenessEntry summarize_fixed_points(const std::string& label, const FixedPointReport& rep) {
    UniquenessEntry e;
    e.label = label;
    for (const auto& fp : rep.points) {
        if (fp.location <= 1e-6) continue;
        ++e.positive_fixed_points;
        if (fp.stability == Stability::attractive) {
            ++e.attractive_count;
            if (!e.attractive_location || fp.location > *e.attractive_location)
                e.attractive_location = fp.location;
        }
    }
    return e;
}

}  // namespace

UniquenessReport uniqueness_audit(int d, double p2) {
    AuditSetup setup = audit_setup(d);
    const Graph& g = setup.g;
    const Bicoloring& col = setup.col;

    UniquenessReport report;
    report.d = d;
    report.p2 = p2;

    OnePointMap full_a{MapKind::three_copy, VertexColor::A, Stage::full, d, p2, 1.0};
    OnePointMap full_b{MapKind::three_copy, VertexColor::B, Stage::full, d, p2, 1.0};
    auto rep_a = find_fixed_points([&](double x) { return full_a(x); });
    auto rep_b = find_fixed_points([&](double x) { return full_b(x); });
    auto e_a = summarize_fixed_points("weight1-A", rep_a);
    auto e_b = summarize_fixed_points("weight1-B", rep_b);
    report.entries.push_back(e_a);
    report.entries.push_back(e_b);
    if (!e_a.attractive_location || !e_b.attractive_location) {
        report.all_within_bounds = false;
        return report;
    }
    double ca = *e_a.attractive_location;  // round-start A purity operating point
    double cb = *e_b.attractive_location;

    auto ci_of = [&](std::initializer_list<uint32_t> vs) {
        std::vector<uint32_t> v(vs);
        return make_correlator(g, col, v);
    };

    // Pure two-A-generator correlator: P1 via the generalized update with the
    // weight-1 entries frozen at the round-start operating point, P2 is the
    // polluting cube for a fully polluted-color correlator.
    uint32_t j = setup.pure_j, k = setup.pure_k;
    CorrelatorIndex t_jk = ci_of({j, k});
    CorrelatorIndex t_j = ci_of({j}), t_k = ci_of({k});
    uint64_t aj = mask_to_u64(t_j.a_mask), ak = mask_to_u64(t_k.a_mask);
    auto pure_map = [&](double z) {
        ExpectationTable tab;
        tab.set(aj, 0, ca);
        tab.set(ak, 0, ca);
        tab.set(aj | ak, 0, z);
        double z1 = generalized_p1_update(g, col, tab, t_jk, p2, VertexColor::A);
        z1 = std::clamp(z1, -1.0, 1.0);
        ExpectationTable tab2;
        tab2.set(aj | ak, 0, z1);
        double z2 = generalized_p1_update(g, col, tab2, t_jk, p2, VertexColor::B);
        return std::clamp(z2, -1.0, 1.0);
    };
    auto rep_jk = find_fixed_points(pure_map);
    auto e_jk = summarize_fixed_points("weight2-AA", rep_jk);
    if (e_jk.attractive_location) {
        double z = *e_jk.attractive_location;
        e_jk.interval_ok = z >= 2.0 * ca - 1.0 - 1e-9 && z <= 1.0 + 1e-9;
        e_jk.factorization_gap = std::abs(z - ca * ca);
    }
    report.entries.push_back(e_jk);

    // Mixed-color correlator (one A and one B generator, disjoint supports).
    uint32_t mj = setup.mixed_j, mi = setup.mixed_i;
    CorrelatorIndex t_mix = ci_of({mj, mi});
    uint64_t am = mask_to_u64(ci_of({mj}).a_mask);
    uint64_t bm = mask_to_u64(ci_of({mi}).b_mask);
    double ca_after_p1 = three_copy_purify(d, p2, ca);
    auto mixed_map = [&](double z) {
        ExpectationTable tab;
        tab.set(0, bm, cb);
        tab.set(am, bm, z);
        double z1 = generalized_p1_update(g, col, tab, t_mix, p2, VertexColor::A);
        z1 = std::clamp(z1, -1.0, 1.0);
        ExpectationTable tab2;
        tab2.set(am, 0, ca_after_p1);
        tab2.set(am, bm, z1);
        double z2 = generalized_p1_update(g, col, tab2, t_mix, p2, VertexColor::B);
        return std::clamp(z2, -1.0, 1.0);
    };
    auto rep_mix = find_fixed_points(mixed_map);
    auto e_mix = summarize_fixed_points("weight2-AB", rep_mix);
    if (e_mix.attractive_location) {
        double z = *e_mix.attractive_location;
        e_mix.interval_ok = z >= ca + cb - 1.0 - 1e-9 && z <= 1.0 + 1e-9;
        e_mix.factorization_gap = std::abs(z - ca * cb);
    }
    report.entries.push_back(e_mix);

    for (const auto& e : report.entries) {
        if (e.positive_fixed_points > 2 || e.attractive_count > 1 || !e.interval_ok)
            report.all_within_bounds = false;
    }
    return report;
}

// ---- bandaid post-selection MC ---------------------------------------------

namespace {
struct BudgetExhausted {};
}  // namespace

BandaidPostselectionResult postselect_bandaid_mc(int d, double p1, double p2, int rounds,
                                                 uint64_t samples, uint64_t seed, int workers) {
    (void)workers;  // serial; callers parallelize across grid points
    Graph star = make_star(d);
    Bicoloring col = bicolor(star);
    ProtocolContext ctx(star, col);
    EdgeColoring ec = edge_color(star);
    CreationSchedule sched(star, ec);
    NoiseModel noise{p1, p2, true};
    noise.validate();

    uint32_t n = star.vertex_count;
    std::vector<int64_t> init_sum(n, 0), final_sum(n, 0);
    uint64_t creations = 0;
    bool exhausted = false;

    for (uint64_t s = 0; s < samples && !exhausted; ++s) {
        RngStream rng(seed, s);
        uint64_t budget = 100000;
        auto create = [&]() {
            if (budget-- == 0) throw BudgetExhausted{};
            ++creations;
            return simulate_creation_transmission(ctx, sched, noise, rng);
        };
        // Stage k pairs two stage-(k-1) states; odd stages purify A
        // (the center), even stages purify B.
        std::function<Bits(int)> make_stage = [&](int k) -> Bits {
            if (k == 0) return create();
            VertexColor c = (k % 2 == 1) ? VertexColor::A : VertexColor::B;
            for (;;) {
                Bits a = make_stage(k - 1);
                Bits b = make_stage(k - 1);
                apply_mcnot(ctx, c, a, b);
                for (uint32_t v = 0; v < n; ++v) apply_gate_noise(ctx, v, a, b, p2, rng);
                Bits sigma = measure_syndrome(ctx, b, c, noise, rng);
                if (!sigma.any()) return a;
            }
        };
        try {
            Bits before = create();
            for (uint32_t v = 0; v < n; ++v) init_sum[v] += before.get(v) ? -1 : 1;
            Bits after = make_stage(rounds);
            for (uint32_t v = 0; v < n; ++v) final_sum[v] += after.get(v) ? -1 : 1;
        } catch (const BudgetExhausted&) {
            exhausted = true;
        }
    }

    BandaidPostselectionResult res;
    res.initial_purity.resize(n);
    res.final_purity.resize(n);
    if (exhausted) {
        res.converged = false;
        res.min_initial = 0.0;
        res.min_final = 0.0;
        res.acceptance = 0.0;
        return res;
    }
    for (uint32_t v = 0; v < n; ++v) {
        res.initial_purity[v] = static_cast<double>(init_sum[v]) / samples;
        res.final_purity[v] = static_cast<double>(final_sum[v]) / samples;
    }
    res.min_initial = *std::min_element(res.initial_purity.begin(), res.initial_purity.end());
    res.min_final = *std::min_element(res.final_purity.begin(), res.final_purity.end());
    uint64_t ideal = samples * ((uint64_t{1} << rounds) + 1);
    res.acceptance = creations ? static_cast<double>(ideal) / creations : 1.0;
    res.converged = res.min_final >= res.min_initial;
    return res;
}

// ---- trade-off region -------------------------------------------------------

namespace {

// Z-flip post-selection operating floors used by the linear bandaid source
// as a closed-form viability proxy for the created star.
constexpr double kPostselectFloorA = 0.2956;
constexpr double kPostselectFloorB = 0.5437;

uint64_t mix_seed(uint64_t seed, uint64_t idx) {
    return seed + 0x9E3779B97F4A7C15ull * (idx + 1);
}

}  // namespace

double TradeoffCurve::p2_axis_intercept() const {
    double best = std::nan("");
    for (size_t i2 = 0; i2 < p2_grid.size(); ++i2)
        if (at(0, i2).in_region) best = p2_grid[i2];
    return best;
}

double TradeoffCurve::p1_axis_intercept() const {
    double best = std::nan("");
    for (size_t i1 = 0; i1 < p1_grid.size(); ++i1)
        if (at(i1, 0).in_region) best = p1_grid[i1];
    return best;
}

double TradeoffCurve::p2_axis_breakdown() const {
    double best = std::nan("");
    for (size_t i2 = 0; i2 < p2_grid.size(); ++i2)
        if (at(0, i2).bandaid_ok) best = p2_grid[i2];
    return best;
}

double TradeoffCurve::p1_axis_breakdown() const {
    double best = std::nan("");
    for (size_t i1 = 0; i1 < p1_grid.size(); ++i1)
        if (at(i1, 0).bandaid_ok) best = p1_grid[i1];
    return best;
}

int TradeoffCurve::region_cells() const {
    int c = 0;
    for (const auto& p : points) c += p.in_region ? 1 : 0;
    return c;
}

double TradeoffCurve::region_area() const {
    if (p1_grid.size() < 2 || p2_grid.size() < 2) return 0.0;
    double cell = (p1_grid[1] - p1_grid[0]) * (p2_grid[1] - p2_grid[0]);
    return region_cells() * cell;
}

TradeoffCurve tradeoff_region(TradeoffProtocol protocol, int d, std::span<const double> p1_grid,
                              std::span<const double> p2_grid, BandaidSource source,
                              const TradeoffMcParams& mc) {
    if (p1_grid.empty() || p2_grid.empty()) throw InvalidArgument("empty trade-off grid");
    for (size_t i = 1; i < p1_grid.size(); ++i)
        if (p1_grid[i] <= p1_grid[i - 1]) throw InvalidArgument("p1 grid must ascend");
    for (size_t i = 1; i < p2_grid.size(); ++i)
        if (p2_grid[i] <= p2_grid[i - 1]) throw InvalidArgument("p2 grid must ascend");

    TradeoffCurve curve;
    curve.protocol = protocol;
    curve.source = source;
    curve.d = d;
    curve.p1_grid.assign(p1_grid.begin(), p1_grid.end());
    curve.p2_grid.assign(p2_grid.begin(), p2_grid.end());
    curve.points.resize(p1_grid.size() * p2_grid.size());

    auto compute_point = [&](size_t i1, size_t i2) {
        TradeoffPoint pt;
        pt.p1 = p1_grid[i1];
        pt.p2 = p2_grid[i2];
        pt.unpurified = creation_purity(d, pt.p1, pt.p2);
        if (source == BandaidSource::linear_eq25) {
            pt.bandaid_purity = postselection_bandaid_quality(d, pt.p2);
            double center = std::pow(1.0 - pt.p2, d) * std::pow(1.0 - pt.p1, d + 1);
            double leaf_min = std::pow(1.0 - pt.p2, d) * (1.0 - pt.p1) * (1.0 - pt.p1);
            pt.bandaid_ok = pt.bandaid_purity > kPostselectFloorB &&
                            center > kPostselectFloorA && leaf_min > kPostselectFloorB;
        } else {
            size_t idx = i1 * p2_grid.size() + i2;
            auto res = postselect_bandaid_mc(d, pt.p1, pt.p2, mc.postselect_rounds, mc.samples,
                                             mix_seed(mc.seed, idx), 1);
            pt.bandaid_purity = std::max(0.0, res.min_final);
            pt.bandaid_ok = res.converged && res.min_final > 0.0;
        }
        if (pt.bandaid_ok) {
            if (protocol == TradeoffProtocol::bandaid) {
                pt.purified = bandaid_pollute(d, pt.p2, pt.bandaid_purity,
                                              bandaid_transfer(d, pt.p2, pt.bandaid_purity));
            } else {
                OnePointMap bound{MapKind::conditional_bandaid_bound, VertexColor::A, Stage::full,
                                  d, pt.p2, pt.bandaid_purity};
                auto rep = find_fixed_points([&](double x) { return bound(x); });
                double best = -1.0;
                for (const auto& fp : rep.points)
                    if (fp.stability == Stability::attractive) best = std::max(best, fp.location);
                pt.purified = std::max(0.0, best);
            }
        }
        pt.in_region = pt.bandaid_ok && pt.purified > pt.unpurified;
        curve.points[i1 * p2_grid.size() + i2] = pt;
    };

    size_t total = p1_grid.size() * p2_grid.size();
    std::atomic<size_t> next{0};
    int workers = mc.workers > 0 ? mc.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= total) return;
            compute_point(i / p2_grid.size(), i % p2_grid.size());
        }
    };
    if (workers == 1 || total == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return curve;
}

}  // namespace gsp
