#include "gsp/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gsp {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(name) + " must be in [0,1]");
}

void check_x(double x) {
    if (!(x >= -1e-9 && x <= 1.0 + 1e-9)) throw InvalidArgument("map input x must be in [0,1]");
}

double clamp_unit(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double three_copy_purify(int d, double p2, double x) {
    check_x(x);
    check_unit(p2, "p2");
    if (d < 1) throw InvalidArgument("degree must be >= 1");
    x = clamp_unit(x);
    double a = std::pow(1.0 - p2, d + 1);
    return a * a * x + 0.5 * a * x * (1.0 - a * x * x);
}

double three_copy_pollute(int d, double p2, double x) {
    check_x(x);
    check_unit(p2, "p2");
    if (d < 1) throw InvalidArgument("degree must be >= 1");
    x = clamp_unit(x);
    double a = std::pow(1.0 - p2, d + 1);
    return a * a * x * x * x;
}

double postselect_purify(double x) {
    check_x(x);
    x = clamp_unit(x);
    return 2.0 * x / (1.0 + x * x);
}

double postselect_pollute(double x) {
    check_x(x);
    x = clamp_unit(x);
    return x * x;
}

double bandaid_transfer(int d, double p2, double xb) {
    check_unit(p2, "p2");
    check_unit(xb, "bandaid purity");
    if (d < 1) throw InvalidArgument("degree must be >= 1");
    return std::pow(1.0 - p2, (d * (d + 3) + 4) / 2.0) * xb;
}

double bandaid_pollute(int d, double p2, double xb, double x) {
    check_x(x);
    check_unit(p2, "p2");
    check_unit(xb, "bandaid purity");
    if (d < 1) throw InvalidArgument("degree must be >= 1");
    x = clamp_unit(x);
    return std::pow(1.0 - p2, 2.0 * d) * x * std::pow(xb, d);
}

double postselection_bandaid_quality(int d, double p2) {
    check_unit(p2, "p2");
    if (d < 1) throw InvalidArgument("degree must be >= 1");
    return std::max(0.0, 1.0 - (d + 1) * p2);
}

double bandaid_linear_fixed_point(int d, double p2) {
    check_unit(p2, "p2");
    if (d < 1) throw InvalidArgument("degree must be >= 1");
    return 1.0 - (3.0 * d * d + 11.0 * d + 6.0) / 2.0 * p2;
}

double conditional_p1_cited(int d, double p2, double xb, double x) {
    check_x(x);
    check_unit(p2, "p2");
    check_unit(xb, "bandaid purity");
    x = clamp_unit(x);
    double a = std::pow(1.0 - p2, d + 1);
    return 0.5 * a * (2.0 * a * x + xb - a * xb * x * x);
}

double conditional_purify_exact(int d, double p2, double xb, double x) {
    check_x(x);
    check_unit(p2, "p2");
    check_unit(xb, "bandaid purity");
    x = clamp_unit(x);
    double a = std::pow(1.0 - p2, d + 1);
    return a * x + 0.5 * xb * a * (1.0 - a * x * x);
}

double conditional_step_one(int d, double p2, double x) {
    check_x(x);
    check_unit(p2, "p2");
    x = clamp_unit(x);
    return std::pow(1.0 - p2, d + 1) * x * x;
}

double conditional_p2_lower_bound(int d, double p2, double xb, double x, double neighbor_purity) {
    check_x(x);
    check_x(neighbor_purity);
    check_unit(p2, "p2");
    check_unit(xb, "bandaid purity");
    x = clamp_unit(x);
    neighbor_purity = clamp_unit(neighbor_purity);
    double a = std::pow(1.0 - p2, d + 1);
    double b = (1.0 - p2) * (1.0 - p2) * xb;
    double bracket = 1.0 - 0.5 * d * (1.0 - std::pow(b, d)) * (1.0 - neighbor_purity);
    return std::max(-1.0, a * bracket * x * x);
}

double OnePointMap::operator()(double x) const {
    check_x(x);
    auto purify = [&](double v) -> double {
        switch (kind) {
            case MapKind::three_copy: return three_copy_purify(d, p2, v);
            case MapKind::postselect_zflip: return postselect_purify(v);
            case MapKind::bandaid: return bandaid_transfer(d, p2, xb);
            case MapKind::conditional_bandaid_bound: return conditional_purify_exact(d, p2, xb, v);
        }
        throw InvalidArgument("bad map kind");
    };
    auto pollute = [&](double v) -> double {
        switch (kind) {
            case MapKind::three_copy: return three_copy_pollute(d, p2, v);
            case MapKind::postselect_zflip: return postselect_pollute(v);
            case MapKind::bandaid: return bandaid_pollute(d, p2, xb, v);
            case MapKind::conditional_bandaid_bound:
                // Neighbor purity enters as the other color's round-start
                // value; at the symmetric operating point that equals x.
                return conditional_p2_lower_bound(d, p2, xb, v, x);
        }
        throw InvalidArgument("bad map kind");
    };
    bool purified_in_p1 = (branch == VertexColor::A);
    switch (stage) {
        case Stage::P1:
            return purified_in_p1 ? purify(x) : pollute(x);
        case Stage::P2:
            return purified_in_p1 ? pollute(x) : purify(x);
        case Stage::full:
            return purified_in_p1 ? pollute(purify(x)) : purify(std::max(0.0, pollute(x)));
    }
    throw InvalidArgument("bad stage");
}

std::string OnePointMap::spec_string() const {
    std::ostringstream os;
    switch (kind) {
        case MapKind::three_copy: os << "three-copy"; break;
        case MapKind::postselect_zflip: os << "postselect"; break;
        case MapKind::bandaid: os << "bandaid"; break;
        case MapKind::conditional_bandaid_bound: os << "conditional-bound"; break;
    }
    os << ':' << (stage == Stage::P1 ? "P1" : stage == Stage::P2 ? "P2" : "full");
    os << ':' << color_name(branch);
    return os.str();
}

OnePointMap parse_map_spec(const std::string& spec, int d, double p2, double xb) {
    auto c1 = spec.find(':');
    auto c2 = spec.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw InvalidArgument("map spec must be kind:stage:branch, got '" + spec + "'");
    std::string kind = spec.substr(0, c1);
    std::string stage = spec.substr(c1 + 1, c2 - c1 - 1);
    std::string branch = spec.substr(c2 + 1);
    OnePointMap m;
    if (kind == "three-copy")
        m.kind = MapKind::three_copy;
    else if (kind == "postselect")
        m.kind = MapKind::postselect_zflip;
    else if (kind == "bandaid")
        m.kind = MapKind::bandaid;
    else if (kind == "conditional-bound")
        m.kind = MapKind::conditional_bandaid_bound;
    else
        throw InvalidArgument("unknown map kind '" + kind + "'");
    if (stage == "P1")
        m.stage = Stage::P1;
    else if (stage == "P2")
        m.stage = Stage::P2;
    else if (stage == "full")
        m.stage = Stage::full;
    else
        throw InvalidArgument("unknown map stage '" + stage + "'");
    if (branch == "A")
        m.branch = VertexColor::A;
    else if (branch == "B")
        m.branch = VertexColor::B;
    else
        throw InvalidArgument("unknown map branch '" + branch + "'");
    m.d = d;
    m.p2 = p2;
    m.xb = xb;
    return m;
}

void ExpectationTable::set(uint64_t a_mask, uint64_t b_mask, double value) {
    if (!(value >= -1.0 && value <= 1.0))
        throw InvalidArgument("expectation values must lie in [-1,1]");
    values[{a_mask, b_mask}] = value;
}

namespace {
std::string mask_name(uint64_t a, uint64_t b) {
    std::ostringstream os;
    os << "(a=0x" << std::hex << a << ",b=0x" << b << ")";
    return os.str();
}
}  // namespace

double ExpectationTable::get(uint64_t a_mask, uint64_t b_mask) const {
    if (a_mask == 0 && b_mask == 0) return 1.0;
    auto it = values.find({a_mask, b_mask});
    if (it == values.end()) throw MissingEntry(mask_name(a_mask, b_mask));
    return it->second;
}

bool ExpectationTable::contains(uint64_t a_mask, uint64_t b_mask) const {
    return (a_mask == 0 && b_mask == 0) || values.count({a_mask, b_mask}) > 0;
}

uint64_t mask_to_u64(const Bits& b) {
    if (b.n > 64) throw InvalidArgument("mask too wide for 64-bit form");
    return b.w.empty() ? 0 : b.w[0];
}

Bits u64_to_mask(uint64_t m, uint32_t n) {
    Bits b(n);
    if (!b.w.empty()) b.w[0] = m;
    if (n < 64 && (m >> n) != 0) throw InvalidArgument("mask has bits beyond its width");
    return b;
}

namespace {

struct UpdateContext {
    const Graph* g;
    const Bicoloring* col;
    VertexColor purify;
    uint32_t np, no;  // purified / other color class sizes
    std::vector<double> pow_q;

    CorrelatorIndex make_ci(uint64_t pmask, uint64_t omask) const {
        CorrelatorIndex ci;
        Bits p = u64_to_mask(pmask, np), o = u64_to_mask(omask, no);
        if (purify == VertexColor::A) {
            ci.a_mask = std::move(p);
            ci.b_mask = std::move(o);
        } else {
            ci.a_mask = std::move(o);
            ci.b_mask = std::move(p);
        }
        return ci;
    }

    uint32_t non_identity_count(uint64_t pm1, uint64_t om1, uint64_t pm2, uint64_t om2) const {
        Bits u = pauli_support(*g, *col, make_ci(pm1, om1)).non_identity_mask() |
                 pauli_support(*g, *col, make_ci(pm2, om2)).non_identity_mask();
        return u.popcount();
    }
};

}  // namespace

double generalized_p1_update_traced(const Graph& g, const Bicoloring& col,
                                    const ExpectationTable& table, const CorrelatorIndex& target,
                                    double p2, VertexColor purify_color,
                                    uint32_t* max_weight_read) {
    check_unit(p2, "p2");
    if (col.count(VertexColor::A) > 64 || col.count(VertexColor::B) > 64)
        throw InvalidArgument("generalized update supports up to 64 vertices per color");
    UpdateContext ctx;
    ctx.g = &g;
    ctx.col = &col;
    ctx.purify = purify_color;
    ctx.np = col.count(purify_color);
    ctx.no = col.count(other_color(purify_color));
    ctx.pow_q.resize(g.vertex_count + 1);
    ctx.pow_q[0] = 1.0;
    for (uint32_t i = 1; i <= g.vertex_count; ++i) ctx.pow_q[i] = ctx.pow_q[i - 1] * (1.0 - p2);

    uint64_t pfull = purify_color == VertexColor::A ? mask_to_u64(target.a_mask)
                                                    : mask_to_u64(target.b_mask);
    uint64_t ofull = purify_color == VertexColor::A ? mask_to_u64(target.b_mask)
                                                    : mask_to_u64(target.a_mask);

    auto lookup = [&](uint64_t pm, uint64_t om) {
        if (max_weight_read) {
            uint32_t w = static_cast<uint32_t>(std::popcount(pm) + std::popcount(om));
            *max_weight_read = std::max(*max_weight_read, w);
        }
        if (purify_color == VertexColor::A) return table.get(pm, om);
        return table.get(om, pm);
    };

    int w = std::popcount(pfull);
    double norm = std::ldexp(1.0, -w);  // 2^{-|a|}
    double total = 0.0;
    uint64_t sub1 = pfull;
    for (;;) {
        uint64_t sub2 = pfull;
        for (;;) {
            double sign = (std::popcount(sub1 & sub2) & 1) ? -1.0 : 1.0;
            double term = lookup(pfull ^ sub1 ^ sub2, ofull) * lookup(sub1, ofull) *
                          lookup(sub2, ofull);
            if (p2 > 0.0 && term != 0.0) {
                // E01 sees the post-MCNOT(0,1) kets, E02 the final ones.
                double e01 = ctx.pow_q[ctx.non_identity_count(pfull ^ sub2, ofull, sub1, 0)];
                double e02 = ctx.pow_q[ctx.non_identity_count(pfull, ofull, sub2, 0)];
                term *= e01 * e02;
            }
            total += sign * term;
            if (sub2 == 0) break;
            sub2 = (sub2 - 1) & pfull;
        }
        if (sub1 == 0) break;
        sub1 = (sub1 - 1) & pfull;
    }
    return norm * total;
}

double generalized_p1_update(const Graph& g, const Bicoloring& col, const ExpectationTable& table,
                             const CorrelatorIndex& target, double p2, VertexColor purify_color) {
    return generalized_p1_update_traced(g, col, table, target, p2, purify_color, nullptr);
}

double creation_purity(int d, double p1, double p2) {
    check_unit(p1, "p1");
    check_unit(p2, "p2");
    if (d < 1) throw InvalidArgument("degree must be >= 1");
    return std::pow(1.0 - p2, d * (d + 1) / 2.0) * std::pow(1.0 - p1, d + 1);
}

double efficiency_bound(double p0, double p_th, int k) {
    if (k < 0) throw InvalidArgument("k must be >= 0");
    if (!(p0 >= 0.0 && p_th <= 1.0 && p0 < p_th))
        throw NumericalFailure("efficiency bound needs 0 <= P0 < Pth <= 1");
    return std::pow(p0 / p_th, std::ldexp(1.0, k));
}

uint64_t concatenation_copies(int k) {
    if (k < 0 || k > 19) throw InvalidArgument("k must be in [0, 19]");
    uint64_t c = 1;
    for (int i = 0; i < k; ++i) c *= 9;
    return c;
}

}  // namespace gsp
