#pragma once
#include <cstdint>
#include <vector>

#include "sbm/model.hpp"

namespace sbm {

struct SampledPath {
    double step = 0.0;
    double start_time = 0.0;
    std::vector<double> values;
};

// discretely observed pairs (R_i, A_i) at step delta_big.
// x_tau is the deterministic part of the first cumulant (pre-history overlap),
// phi0 the sentiment level anchoring the first-observation density and s1 the
// stochastic span of the first window; loglik needs all three.
struct ReturnSample {
    double delta_big = 0.0;
    std::vector<double> returns;
    std::vector<double> cumulants;
    double x_tau = 0.0;
    double phi0 = 0.0;
    double s1 = 0.0;
    double tau = 0.0;
};

struct Measure {
    bool risk_neutral = false;
    double rate = 0.0;
};

struct PathPair {
    SampledPath sentiment;
    SampledPath price;
};

// exact lognormal steps for P; log S advanced with the left-point rule for the
// integral of P_{t-tau}. Under the risk-neutral measure the price drift becomes
// the rate while the sentiment drift is unchanged. Deterministic given seed;
// path k always uses the stream (seed, k).
std::vector<PathPair> simulate_paths(const ModelParams& params, double s0, double horizon,
                                     double step, int n_paths, std::uint64_t seed,
                                     const Measure& measure = {});

// R_i = log S_{i Delta} - log S_{(i-1) Delta}; A_i = delta * sum of the k
// sentiment samples ending at i*Delta - tau. Samples at or before the series
// start count as the constant pre-history when the two paths start together;
// windows that would need data from before the sentiment series are dropped,
// as are leading windows that are fully deterministic.
ReturnSample build_return_sample(const SampledPath& price, const SampledPath& sentiment,
                                 double delta_big, double tau);

// pair returns with already-aggregated sentiment observations, lagging the
// returns by lag_steps observation slots
ReturnSample ingest_preaggregated(const std::vector<double>& returns,
                                  const std::vector<double>& sentiment_obs, double delta_big,
                                  int lag_steps);

}  // namespace sbm
