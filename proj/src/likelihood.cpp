#include "sbm/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbm/math.hpp"
#include "sbm/rng.hpp"

namespace sbm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kSigmaLo = 1e-6, kSigmaHi = 1e2, kMuBox = 1e2;
constexpr double kSimplexTol = 1e-9;
constexpr long kMaxEvals = 100000;

double lognormal_logpdf(double y, double alpha, double nu2) {
    return -std::log(y) - 0.5 * std::log(kTwoPi * nu2) -
           (std::log(y) - alpha) * (std::log(y) - alpha) / (2.0 * nu2);
}

void check_sample(const ReturnSample& s) {
    if (s.returns.empty() || s.returns.size() != s.cumulants.size())
        throw std::invalid_argument("loglik: returns and cumulants must be non-empty and paired");
    for (double a : s.cumulants)
        if (!(a > 0.0)) throw std::domain_error("loglik: cumulants must be positive");
}

// maximize a 2-d block in (mu, log sigma) coordinates with box penalties
struct BlockFit {
    double mu = 0, sigma = 0, value = 0;
    bool converged = false;
};

BlockFit maximize_block(const std::function<double(double, double)>& block, double mu0,
                        double sigma0) {
    auto wrapped = [&](const std::vector<double>& v) {
        double mu = v[0], ls = v[1];
        double pen = 0.0;
        const double lo = std::log(kSigmaLo), hi = std::log(kSigmaHi);
        if (mu > kMuBox) { pen += (mu - kMuBox) * (mu - kMuBox); mu = kMuBox; }
        if (mu < -kMuBox) { pen += (mu + kMuBox) * (mu + kMuBox); mu = -kMuBox; }
        if (ls > hi) { pen += (ls - hi) * (ls - hi); ls = hi; }
        if (ls < lo) { pen += (ls - lo) * (ls - lo); ls = lo; }
        try {
            return block(mu, std::exp(ls)) - 1e8 * pen;
        } catch (const std::exception&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    mu0 = std::clamp(mu0, -kMuBox + 1e-6, kMuBox - 1e-6);
    sigma0 = std::clamp(sigma0, 2.0 * kSigmaLo, 0.99 * kSigmaHi);
    const std::vector<double> base{mu0, std::log(sigma0)};

    BlockFit best;
    best.value = -std::numeric_limits<double>::infinity();
    PathRng rng(0xb10cf17ULL, 0);
    for (int start = 0; start < 5; ++start) {
        std::vector<double> x0 = base;
        if (start > 0) {
            x0[0] += rng.normal() * std::max(0.25, 0.25 * std::fabs(base[0]));
            x0[1] += rng.normal() * 0.35;
        }
        const SimplexResult res = nelder_mead_max(wrapped, x0, 0.25, kSimplexTol, kMaxEvals);
        if (res.fmax > best.value) {
            best.value = res.fmax;
            best.mu = res.x[0];
            best.sigma = std::exp(std::clamp(res.x[1], std::log(kSigmaLo), std::log(kSigmaHi)));
            best.converged = res.converged;
        }
    }
    best.mu = std::clamp(best.mu, -kMuBox, kMuBox);
    return best;
}

// closed-form maximizer of the Gaussian block (also used as the search start)
void gaussian_block_argmax(const ReturnSample& s, double& mu_S, double& sigma_S) {
    double sa = 0, sr = 0;
    for (size_t i = 0; i < s.returns.size(); ++i) {
        sa += s.cumulants[i];
        sr += s.returns[i];
    }
    const double q = sr / sa;
    double s2 = 0;
    for (size_t i = 0; i < s.returns.size(); ++i) {
        const double d = s.returns[i] - q * s.cumulants[i];
        s2 += d * d / s.cumulants[i];
    }
    s2 /= static_cast<double>(s.returns.size());
    sigma_S = std::sqrt(s2);
    mu_S = q + 0.5 * s2;
}

std::array<double, 4> hessian_std_errors(const std::function<double(const std::array<double, 4>&)>& f,
                                         const std::array<double, 4>& theta) {
    std::array<double, 4> se;
    se.fill(std::numeric_limits<double>::quiet_NaN());
    std::array<double, 4> h;
    for (int i = 0; i < 4; ++i) h[i] = 1e-4 * std::max(std::fabs(theta[i]), 1e-2);
    std::vector<double> H(16, 0.0);
    try {
        const double f0 = f(theta);
        for (int a = 0; a < 4; ++a) {
            auto tp = theta, tm = theta;
            tp[a] += h[a];
            tm[a] -= h[a];
            H[a * 4 + a] = (f(tp) - 2.0 * f0 + f(tm)) / (h[a] * h[a]);
            for (int b = a + 1; b < 4; ++b) {
                auto tpp = theta, tpm = theta, tmp = theta, tmm = theta;
                tpp[a] += h[a]; tpp[b] += h[b];
                tpm[a] += h[a]; tpm[b] -= h[b];
                tmp[a] -= h[a]; tmp[b] += h[b];
                tmm[a] -= h[a]; tmm[b] -= h[b];
                const double v = (f(tpp) - f(tpm) - f(tmp) + f(tmm)) / (4.0 * h[a] * h[b]);
                H[a * 4 + b] = H[b * 4 + a] = v;
            }
        }
    } catch (const std::exception&) {
        return se;
    }
    for (double& v : H) v = -v;  // observed information
    if (!invert_matrix(H, 4)) return se;
    for (int i = 0; i < 4; ++i)
        if (H[i * 4 + i] > 0.0) se[i] = std::sqrt(H[i * 4 + i]);
    return se;
}

}  // namespace

double loglik_gaussian_block(double mu_S, double sigma_S, const ReturnSample& sample) {
    if (!(sigma_S > 0.0)) throw std::domain_error("loglik: sigma_S must be > 0");
    check_sample(sample);
    const double q = mu_S - 0.5 * sigma_S * sigma_S;
    const double s2 = sigma_S * sigma_S;
    double ll = 0.0;
    for (size_t i = 0; i < sample.returns.size(); ++i) {
        const double a = sample.cumulants[i];
        const double d = sample.returns[i] - q * a;
        ll += -0.5 * std::log(kTwoPi * s2 * a) - d * d / (2.0 * s2 * a);
    }
    return ll;
}

double loglik_sentiment_block(double mu_P, double sigma_P, const ReturnSample& sample) {
    if (!(sigma_P > 0.0)) throw std::domain_error("loglik: sigma_P must be > 0");
    check_sample(sample);
    const double y = sample.cumulants[0] - sample.x_tau;
    if (!(y > 0.0))
        throw std::domain_error("loglik: first cumulant must exceed its deterministic window");
    if (!(sample.s1 > 0.0)) throw std::domain_error("loglik: first-window span must be > 0");
    ModelParams p;
    p.mu_P = mu_P;
    p.sigma_P = sigma_P;
    p.phi0 = sample.phi0;
    p.L = p.tau = 0.0;
    const auto [m1, m2] = ip_moments(p, sample.s1);
    const LevyLogNormal l = levy_params(m1, m2);
    double ll = lognormal_logpdf(y, l.alpha, l.nu2);

    const double nu2 = sigma_P * sigma_P * sample.delta_big;
    const double drift = (mu_P - 0.5 * sigma_P * sigma_P) * sample.delta_big;
    for (size_t i = 1; i < sample.cumulants.size(); ++i)
        ll += lognormal_logpdf(sample.cumulants[i],
                               std::log(sample.cumulants[i - 1]) + drift, nu2);
    return ll;
}

double loglik(double mu_P, double mu_S, double sigma_P, double sigma_S,
              const ReturnSample& sample) {
    return loglik_gaussian_block(mu_S, sigma_S, sample) +
           loglik_sentiment_block(mu_P, sigma_P, sample);
}

FitResult fit_qml(const ReturnSample& sample, const std::vector<double>& init) {
    check_sample(sample);
    if (sample.returns.size() < 8)
        throw std::invalid_argument("fit_qml: need at least 8 observations");
    if (!init.empty() && init.size() != 4)
        throw std::invalid_argument("fit_qml: init must hold mu_P, sigma_P, mu_S, sigma_S");

    double mu_S0, sigma_S0;
    gaussian_block_argmax(sample, mu_S0, sigma_S0);
    double mu_P0, sigma_P0;
    {
        std::vector<double> d;
        for (size_t i = 1; i < sample.cumulants.size(); ++i)
            d.push_back(std::log(sample.cumulants[i] / sample.cumulants[i - 1]));
        const double v = d.size() > 1 ? variance(d) : 0.01;
        sigma_P0 = std::sqrt(std::max(v / sample.delta_big, 1e-8));
        mu_P0 = (d.empty() ? 0.0 : mean(d)) / sample.delta_big + 0.5 * sigma_P0 * sigma_P0;
    }
    if (!init.empty()) {
        mu_P0 = init[0];
        sigma_P0 = init[1];
        mu_S0 = init[2];
        sigma_S0 = init[3];
    }

    const BlockFit sfit = maximize_block(
        [&](double mu, double sg) { return loglik_gaussian_block(mu, sg, sample); }, mu_S0,
        sigma_S0);
    const BlockFit pfit = maximize_block(
        [&](double mu, double sg) { return loglik_sentiment_block(mu, sg, sample); }, mu_P0,
        sigma_P0);

    FitResult out;
    out.method = "qml";
    out.mu_P = pfit.mu;
    out.sigma_P = pfit.sigma;
    out.mu_S = sfit.mu;
    out.sigma_S = sfit.sigma;
    out.loglik = sfit.value + pfit.value;
    out.converged = sfit.converged && pfit.converged;
    out.tau_hat = sample.tau;
    out.std_errors = hessian_std_errors(
        [&](const std::array<double, 4>& th) {
            return loglik(th[0], th[2], th[1], th[3], sample);
        },
        {out.mu_P, out.sigma_P, out.mu_S, out.sigma_S});
    return out;
}

FitResult fit_two_step(const SampledPath& fine_sentiment, const ReturnSample& sample) {
    if (fine_sentiment.values.size() < 30)
        throw std::invalid_argument("fit_two_step: need at least 30 fine observations");
    if (!(fine_sentiment.step > 0.0))
        throw std::invalid_argument("fit_two_step: fine step must be > 0");
    check_sample(sample);
    std::vector<double> x;
    x.reserve(fine_sentiment.values.size() - 1);
    for (size_t i = 1; i < fine_sentiment.values.size(); ++i) {
        if (!(fine_sentiment.values[i] > 0.0))
            throw std::invalid_argument("fit_two_step: sentiment values must be positive");
        x.push_back(std::log(fine_sentiment.values[i] / fine_sentiment.values[i - 1]));
    }
    const double delta = fine_sentiment.step;
    const double s2 = variance(x) / delta;

    FitResult out;
    out.method = "two_step_moments";
    out.sigma_P = std::sqrt(s2);
    out.mu_P = mean(x) / delta + 0.5 * s2;
    out.tau_hat = sample.tau;

    double mu_S0, sigma_S0;
    gaussian_block_argmax(sample, mu_S0, sigma_S0);
    const BlockFit sfit = maximize_block(
        [&](double mu, double sg) { return loglik_gaussian_block(mu, sg, sample); }, mu_S0,
        sigma_S0);
    out.mu_S = sfit.mu;
    out.sigma_S = sfit.sigma;
    out.converged = sfit.converged;
    out.loglik = sfit.value;
    if (out.sigma_P > 0.0) {
        try {
            out.loglik += loglik_sentiment_block(out.mu_P, out.sigma_P, sample);
        } catch (const std::exception&) {
        }
    }

    const double nx = static_cast<double>(x.size());
    out.std_errors.fill(std::numeric_limits<double>::quiet_NaN());
    if (nx > 1) {
        out.std_errors[0] = std::sqrt(s2 / (nx * delta) + s2 * s2 / (2.0 * (nx - 1.0)));
        out.std_errors[1] = out.sigma_P / std::sqrt(2.0 * (nx - 1.0));
    }
    const auto se4 = hessian_std_errors(
        [&](const std::array<double, 4>& th) {
            return loglik_gaussian_block(th[2], th[3], sample);
        },
        {std::max(out.mu_P, 0.1), std::max(out.sigma_P, 0.1), out.mu_S, out.sigma_S});
    out.std_errors[2] = se4[2];
    out.std_errors[3] = se4[3];
    return out;
}

namespace {

FitResult profile_generic(const std::vector<double>& tau_values,
                          const std::function<ReturnSample(size_t)>& sample_at, double alpha,
                          std::vector<double>* failed_grid) {
    if (tau_values.empty()) throw std::invalid_argument("profile_tau: empty grid");
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("profile_tau: alpha must be in (0, 0.5)");
    std::vector<std::pair<double, FitResult>> fits;  // (tau, fit)
    for (size_t j = 0; j < tau_values.size(); ++j) {
        try {
            FitResult f = fit_qml(sample_at(j));
            if (!std::isfinite(f.loglik)) throw std::runtime_error("non-finite profile value");
            fits.emplace_back(tau_values[j], f);
        } catch (const std::exception&) {
            if (failed_grid) failed_grid->push_back(tau_values[j]);
        }
    }
    if (fits.empty()) throw std::runtime_error("profile_tau: every grid point failed");
    size_t best = 0;
    for (size_t j = 1; j < fits.size(); ++j)
        if (fits[j].second.loglik > fits[best].second.loglik) best = j;
    const double threshold =
        fits[best].second.loglik - 0.5 * chi2_quantile_1(1.0 - 2.0 * alpha);
    FitResult out = fits[best].second;
    out.tau_hat = fits[best].first;
    out.tau_confidence_set.clear();
    for (const auto& [tau, fit] : fits)
        if (fit.loglik >= threshold - 1e-12) out.tau_confidence_set.push_back(tau);
    return out;
}

}  // namespace

FitResult profile_tau(const SampledPath& price, const SampledPath& sentiment, double delta_big,
                      const std::vector<double>& tau_grid, double alpha,
                      std::vector<double>* failed_grid) {
    return profile_generic(
        tau_grid,
        [&](size_t j) { return build_return_sample(price, sentiment, delta_big, tau_grid[j]); },
        alpha, failed_grid);
}

FitResult profile_tau_preaggregated(const std::vector<double>& returns,
                                    const std::vector<double>& sentiment_obs, double delta_big,
                                    const std::vector<int>& lag_grid, double alpha,
                                    std::vector<double>* failed_grid) {
    std::vector<double> taus;
    taus.reserve(lag_grid.size());
    for (int c : lag_grid) taus.push_back(static_cast<double>(c) * delta_big);
    return profile_generic(
        taus,
        [&](size_t j) {
            return ingest_preaggregated(returns, sentiment_obs, delta_big, lag_grid[j]);
        },
        alpha, failed_grid);
}

}  // namespace sbm
