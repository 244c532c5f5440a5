#pragma once

#include <cmath>

#include "gsp/errors.hpp"

namespace gsp {

// Error model parameters: p1 is the per-qubit transmission depolarizing
// probability, p2 the two-qubit gate / measurement depolarizing probability.
// measurement_noise is off for the three-copy protocol and on for the
// bandaid-style protocols.
struct NoiseModel {
    double p1 = 0.0;
    double p2 = 0.0;
    bool measurement_noise = false;

    void validate() const {
        if (!(p1 >= 0.0 && p1 <= 1.0)) throw InvalidArgument("p1 must be in [0,1]");
        if (!(p2 >= 0.0 && p2 <= 1.0)) throw InvalidArgument("p2 must be in [0,1]");
    }

    // alpha = (1-p2)^{d+1}; computed on demand, never stored.
    double alpha(int d) const { return std::pow(1.0 - p2, d + 1); }
    // beta = (1-p2)^2 <b>.
    double beta(double bandaid_purity) const {
        return (1.0 - p2) * (1.0 - p2) * bandaid_purity;
    }
};

}  // namespace gsp
