#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gsp/bits.hpp"
#include "gsp/graph.hpp"
#include "gsp/rng.hpp"

namespace gsp {

struct EstimateRow {
    std::string label;
    double mean = 0.0;
    double stderr_ = 0.0;
    uint64_t samples = 0;
};

struct EstimateReport {
    std::vector<EstimateRow> rows;
    uint64_t samples = 0;
    uint64_t attempts = 0;  // includes discarded post-selection runs
    double acceptance_rate = 1.0;
    uint64_t seed = 0;
};

// One protocol execution producing an output syndrome vector; nullopt means
// the run was discarded (post-selection) and must be retried.
using ProtocolRun = std::function<std::optional<Bits>(RngStream&)>;

// Sample-mean estimator of (-1)^{parity of masked bits} for each correlator.
// Work is split into fixed-size batches, batch i drawing from stream
// (seed, i); per-batch sums are exact integers and the reduction runs in
// batch order, so the report is bit-identical for a given seed regardless
// of worker count.
EstimateReport estimate_correlators(const Graph& g, const Bicoloring& col, const ProtocolRun& run,
                                    const std::vector<CorrelatorIndex>& correlators,
                                    const std::vector<std::string>& labels, uint64_t samples,
                                    uint64_t seed, int workers = 0);

// Convenience: per-vertex K_j correlators labelled "K<j>".
std::pair<std::vector<CorrelatorIndex>, std::vector<std::string>> vertex_correlators(
    const Graph& g, const Bicoloring& col);

}  // namespace gsp
