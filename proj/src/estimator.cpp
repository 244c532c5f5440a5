#include "gsp/estimator.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "gsp/errors.hpp"

namespace gsp {

namespace {
constexpr uint64_t kBatchSize = 1 << 14;
constexpr uint64_t kMaxDiscardFactor = 20000;  // per-batch attempt cap multiplier
}  // namespace

EstimateReport estimate_correlators(const Graph& g, const Bicoloring& col, const ProtocolRun& run,
                                    const std::vector<CorrelatorIndex>& correlators,
                                    const std::vector<std::string>& labels, uint64_t samples,
                                    uint64_t seed, int workers) {
    if (samples < 1) throw InvalidArgument("samples must be >= 1");
    if (labels.size() != correlators.size())
        throw InvalidArgument("labels and correlators must align");
    std::vector<Bits> masks;
    masks.reserve(correlators.size());
    for (const auto& c : correlators) masks.push_back(correlator_vertex_mask(g, col, c));

    uint64_t nbatch = (samples + kBatchSize - 1) / kBatchSize;
    size_t ncorr = masks.size();
    // Per-batch exact integer sums of the +/-1 parities.
    std::vector<int64_t> batch_sums(nbatch * ncorr, 0);
    std::vector<uint64_t> batch_attempts(nbatch, 0);

    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(std::min<uint64_t>(workers, nbatch));

    std::atomic<uint64_t> next_batch{0};
    std::atomic<bool> failed{false};
    auto worker_fn = [&] {
        for (;;) {
            uint64_t b = next_batch.fetch_add(1);
            if (b >= nbatch || failed.load()) return;
            uint64_t count = std::min(kBatchSize, samples - b * kBatchSize);
            RngStream rng(seed, b);
            int64_t* sums = &batch_sums[b * ncorr];
            uint64_t attempts = 0;
            uint64_t attempt_cap = count * kMaxDiscardFactor;
            for (uint64_t s = 0; s < count; ++s) {
                std::optional<Bits> out;
                do {
                    if (attempts++ > attempt_cap) {
                        failed.store(true);
                        return;
                    }
                    out = run(rng);
                } while (!out);
                for (size_t c = 0; c < ncorr; ++c)
                    sums[c] += out->parity_and(masks[c]) ? -1 : 1;
            }
            batch_attempts[b] = attempts;
        }
    };
    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }
    if (failed.load())
        throw NumericalFailure("post-selection acceptance rate too low to estimate");

    EstimateReport report;
    report.samples = samples;
    report.seed = seed;
    uint64_t attempts = 0;
    for (uint64_t b = 0; b < nbatch; ++b) attempts += batch_attempts[b];
    report.attempts = attempts;
    report.acceptance_rate = attempts ? static_cast<double>(samples) / attempts : 1.0;
    for (size_t c = 0; c < ncorr; ++c) {
        int64_t total = 0;
        for (uint64_t b = 0; b < nbatch; ++b) total += batch_sums[b * ncorr + c];
        double mean = static_cast<double>(total) / static_cast<double>(samples);
        double stderr_ = 0.0;
        if (samples > 1) {
            // Sample variance of +/-1 data: N (1 - mean^2) / (N-1).
            double var = static_cast<double>(samples) * (1.0 - mean * mean) /
                         static_cast<double>(samples - 1);
            stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(samples));
        }
        report.rows.push_back({labels[c], mean, stderr_, samples});
    }
    return report;
}

std::pair<std::vector<CorrelatorIndex>, std::vector<std::string>> vertex_correlators(
    const Graph& g, const Bicoloring& col) {
    std::vector<CorrelatorIndex> corrs;
    std::vector<std::string> labels;
    for (uint32_t v = 0; v < g.vertex_count; ++v) {
        uint32_t vs[1] = {v};
        corrs.push_back(make_correlator(g, col, vs));
        labels.push_back("K" + std::to_string(v));
    }
    return {corrs, labels};
}

}  // namespace gsp
