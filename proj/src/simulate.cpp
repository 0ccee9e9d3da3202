#include "sbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbm/rng.hpp"

namespace sbm {

namespace {
long to_integer_multiple(double value, double step, const char* what) {
    const long m = std::lround(value / step);
    if (std::fabs(value - static_cast<double>(m) * step) > 1e-9 * std::max(1.0, std::fabs(value)))
        throw std::invalid_argument(std::string(what) + " must be an integer multiple of the step");
    return m;
}
}  // namespace

std::vector<PathPair> simulate_paths(const ModelParams& params, double s0, double horizon,
                                     double step, int n_paths, std::uint64_t seed,
                                     const Measure& measure) {
    params.validate();
    if (!(s0 > 0.0)) throw std::invalid_argument("simulate_paths: s0 must be > 0");
    if (!(step > 0.0)) throw std::invalid_argument("simulate_paths: step must be > 0");
    if (!(horizon >= step)) throw std::invalid_argument("simulate_paths: horizon < step");
    if (n_paths < 1) throw std::invalid_argument("simulate_paths: n_paths must be >= 1");
    const long r = to_integer_multiple(params.tau, step, "simulate_paths: delay");
    const long m = static_cast<long>(std::floor(horizon / step + 1e-9));

    const double sqdt = std::sqrt(step);
    const double p_drift = (params.mu_P - 0.5 * params.sigma_P * params.sigma_P) * step;
    const double half_s2 = 0.5 * params.sigma_S * params.sigma_S;

    std::vector<PathPair> out(n_paths);
    for (int path = 0; path < n_paths; ++path) {
        PathRng rng(seed, static_cast<std::uint64_t>(path));
        auto& sp = out[path].sentiment;
        auto& pp = out[path].price;
        sp.step = pp.step = step;
        sp.start_time = pp.start_time = 0.0;
        sp.values.resize(m + 1);
        pp.values.resize(m + 1);
        sp.values[0] = params.phi0;
        pp.values[0] = s0;
        for (long t = 1; t <= m; ++t) {
            const double zp = rng.normal();
            sp.values[t] = sp.values[t - 1] * std::exp(p_drift + params.sigma_P * sqdt * zp);
            const double lagged = (t - 1 >= r) ? sp.values[t - 1 - r] : params.phi0;
            const double zs = rng.normal();
            const double drift = measure.risk_neutral ? measure.rate - half_s2 * lagged
                                                      : (params.mu_S - half_s2) * lagged;
            pp.values[t] =
                pp.values[t - 1] *
                std::exp(drift * step + params.sigma_S * std::sqrt(lagged * step) * zs);
        }
    }
    return out;
}

ReturnSample build_return_sample(const SampledPath& price, const SampledPath& sentiment,
                                 double delta_big, double tau) {
    if (price.values.size() < 2 || sentiment.values.empty())
        throw std::invalid_argument("build_return_sample: empty input series");
    if (std::fabs(price.step - sentiment.step) > 1e-12)
        throw std::invalid_argument("build_return_sample: price and sentiment steps differ");
    const double step = price.step;
    if (!(step > 0.0)) throw std::invalid_argument("build_return_sample: step must be > 0");
    if (!(tau >= 0.0)) throw std::invalid_argument("build_return_sample: tau must be >= 0");
    const long k = to_integer_multiple(delta_big, step, "build_return_sample: delta_big");
    if (k < 1) throw std::invalid_argument("build_return_sample: delta_big must be >= step");
    const long r = to_integer_multiple(tau, step, "build_return_sample: delay");
    const double off = (price.start_time - sentiment.start_time) / step;
    const long e = std::lround(off);
    if (std::fabs(off - static_cast<double>(e)) > 1e-6)
        throw std::invalid_argument("build_return_sample: series starts are not grid-aligned");

    for (double v : sentiment.values)
        if (!(v > 0.0))
            throw std::invalid_argument("build_return_sample: sentiment values must be positive");

    const long np = static_cast<long>(price.values.size());
    const long ns = static_cast<long>(sentiment.values.size());
    const long n_total = (np - 1) / k;
    if (n_total < 1) throw std::invalid_argument("build_return_sample: price series too short");
    const double base = sentiment.values[0];

    struct Obs {
        double a = 0;
        long det = 0;
        bool valid = false;
    };
    std::vector<Obs> obs(n_total);
    for (long i = 1; i <= n_total; ++i) {
        double sum = 0.0;
        bool valid = true;
        long det = 0;
        for (long j = (i - 1) * k - r + 1; j <= i * k - r; ++j) {
            if (e == 0 && j <= 0) {
                sum += base;  // constant pre-history P = phi0
                ++det;
            } else {
                const long sj = j + e;
                if (sj < 0 || sj >= ns) {
                    valid = false;
                    break;
                }
                sum += sentiment.values[sj];
            }
        }
        obs[i - 1] = {sum * step, det, valid};
    }

    long first = 0;
    while (first < n_total && (!obs[first].valid || obs[first].det == k)) ++first;
    long last = first;
    while (last < n_total && obs[last].valid) ++last;  // one past the end
    if (first >= last)
        throw std::invalid_argument("build_return_sample: no usable observation windows");

    ReturnSample out;
    out.delta_big = delta_big;
    out.tau = tau;
    out.x_tau = static_cast<double>(obs[first].det) * step * base;
    out.s1 = static_cast<double>(k - obs[first].det) * step;
    if (e == 0) {
        out.phi0 = base;
    } else {
        const long anchor = first * k - r + e;
        out.phi0 = sentiment.values[std::clamp<long>(anchor, 0, ns - 1)];
    }
    for (long i = first; i < last; ++i) {
        out.returns.push_back(std::log(price.values[(i + 1) * k]) -
                              std::log(price.values[i * k]));
        out.cumulants.push_back(obs[i].a);
    }
    return out;
}

ReturnSample ingest_preaggregated(const std::vector<double>& returns,
                                  const std::vector<double>& sentiment_obs, double delta_big,
                                  int lag_steps) {
    if (lag_steps < 0) throw std::invalid_argument("ingest_preaggregated: lag must be >= 0");
    if (!(delta_big > 0.0))
        throw std::invalid_argument("ingest_preaggregated: delta_big must be > 0");
    for (double a : sentiment_obs)
        if (!(a > 0.0))
            throw std::invalid_argument("ingest_preaggregated: observations must be positive");
    const long n = std::min<long>(static_cast<long>(returns.size()) - lag_steps,
                                  static_cast<long>(sentiment_obs.size()));
    if (n < 1)
        throw std::invalid_argument("ingest_preaggregated: length mismatch after lag alignment");
    ReturnSample out;
    out.delta_big = delta_big;
    out.tau = static_cast<double>(lag_steps) * delta_big;
    out.x_tau = 0.0;
    out.s1 = delta_big;
    out.phi0 = sentiment_obs[0] / delta_big;  // implied level at the sample start
    out.returns.assign(returns.begin() + lag_steps, returns.begin() + lag_steps + n);
    out.cumulants.assign(sentiment_obs.begin(), sentiment_obs.begin() + n);
    return out;
}

}  // namespace sbm
