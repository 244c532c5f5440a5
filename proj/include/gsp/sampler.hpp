#pragma once

#include <cstdint>
#include <vector>

#include "gsp/bits.hpp"
#include "gsp/errors.hpp"
#include "gsp/graph.hpp"
#include "gsp/rng.hpp"

namespace gsp {

// Draws syndrome vectors for diagonal (graph-basis) input mixtures.
// independent mode: bit v flips with probability q_v, so <K_v> = 1 - 2 q_v.
// table mode: explicit distribution over all 2^n syndromes (tiny graphs).
class DiagonalStateSampler {
  public:
    static constexpr uint32_t kTableVertexCap = 20;

    static DiagonalStateSampler independent(uint32_t vertex_count, double q) {
        return independent(std::vector<double>(vertex_count, q));
    }

    static DiagonalStateSampler independent(std::vector<double> q_per_vertex) {
        DiagonalStateSampler s;
        s.n_ = static_cast<uint32_t>(q_per_vertex.size());
        for (double q : q_per_vertex)
            if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("flip probability must be in [0,1]");
        s.q_ = std::move(q_per_vertex);
        return s;
    }

    static DiagonalStateSampler table(uint32_t vertex_count, std::vector<double> probs) {
        if (vertex_count > kTableVertexCap)
            throw SizeCapExceeded("table sampler capped at 20 vertices");
        if (probs.size() != (size_t{1} << vertex_count))
            throw InvalidArgument("table size must be 2^vertex_count");
        double sum = 0.0;
        for (double p : probs) {
            if (p < 0.0) throw InvalidArgument("table probabilities must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidArgument("table probabilities must sum to 1 within 1e-12");
        DiagonalStateSampler s;
        s.n_ = vertex_count;
        s.cdf_.resize(probs.size());
        double acc = 0.0;
        for (size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            s.cdf_[i] = acc;
        }
        s.cdf_.back() = 1.0;
        s.table_ = std::move(probs);
        return s;
    }

    uint32_t vertex_count() const { return n_; }
    bool is_table() const { return !table_.empty(); }
    const std::vector<double>& table_probs() const { return table_; }

    Bits sample(RngStream& rng) const {
        Bits out(n_);
        if (is_table()) {
            double u = rng.uniform();
            size_t lo = 0, hi = cdf_.size() - 1;
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (cdf_[mid] > u)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            for (uint32_t v = 0; v < n_; ++v)
                if ((lo >> v) & 1) out.set(v);
            return out;
        }
        for (uint32_t v = 0; v < n_; ++v)
            if (rng.bernoulli(q_[v])) out.set(v);
        return out;
    }

    // Exact <K_{a,b}> of the sampled mixture for a vertex mask.
    double expectation(const Bits& vertex_mask) const {
        if (is_table()) {
            double acc = 0.0;
            for (size_t s = 0; s < table_.size(); ++s) {
                uint32_t par = 0;
                for (uint32_t v = 0; v < n_; ++v)
                    if (vertex_mask.get(v)) par ^= (s >> v) & 1;
                acc += par ? -table_[s] : table_[s];
            }
            return acc;
        }
        double acc = 1.0;
        for (uint32_t v = 0; v < n_; ++v)
            if (vertex_mask.get(v)) acc *= 1.0 - 2.0 * q_[v];
        return acc;
    }

  private:
    uint32_t n_ = 0;
    std::vector<double> q_;
    std::vector<double> table_;
    std::vector<double> cdf_;
};

// Bandaid configuration: all star qubits share purity <b>; the schedule
// fixes the per-subprotocol order in which target vertices get bandaids.
struct BandaidSpec {
    double purity = 1.0;
    bool uniform_random_schedule = true;
    std::vector<uint32_t> fixed_order;  // used when uniform_random_schedule is false

    void validate() const {
        if (!(purity >= 0.0 && purity <= 1.0))
            throw InvalidArgument("bandaid purity must be in [0,1]");
    }
};

}  // namespace gsp
