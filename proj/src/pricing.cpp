#include "sbm/pricing.hpp"

#include <cmath>
#include <stdexcept>

#include "sbm/math.hpp"
#include "sbm/rng.hpp"

namespace sbm {

void OptionSpec::validate() const {
    if (!(maturity > 0.0)) throw std::invalid_argument("OptionSpec: maturity must be > 0");
    if (!(strike >= 0.0)) throw std::invalid_argument("OptionSpec: strike must be >= 0");
    if (kind == OptionKind::binary_cash_call && !(cash > 0.0))
        throw std::invalid_argument("OptionSpec: binary payout must be > 0");
}

double bs_kernel(double t, double s, double x, const OptionSpec& spec, double sigma_S) {
    if (!(s > 0.0)) throw std::domain_error("bs_kernel: spot must be > 0");
    if (!(t < spec.maturity)) throw std::domain_error("bs_kernel: need t < maturity");
    const double df = std::exp(-spec.rate * (spec.maturity - t));
    if (spec.strike <= 0.0) {
        switch (spec.kind) {
            case OptionKind::call: return s;
            case OptionKind::put: return 0.0;
            case OptionKind::binary_cash_call: return spec.cash * df;
        }
    }
    if (!(x > 0.0)) throw std::domain_error("bs_kernel: variance carrier must be > 0");
    const double v = sigma_S * std::sqrt(x);
    const double d1 =
        (std::log(s / spec.strike) + spec.rate * (spec.maturity - t) + 0.5 * sigma_S * sigma_S * x) /
        v;
    const double d2 = d1 - v;
    switch (spec.kind) {
        case OptionKind::call: return s * norm_cdf(d1) - spec.strike * df * norm_cdf(d2);
        case OptionKind::put: return spec.strike * df * norm_cdf(-d2) - s * norm_cdf(-d1);
        case OptionKind::binary_cash_call: return spec.cash * df * norm_cdf(d2);
    }
    throw std::logic_error("bs_kernel: unknown option kind");
}

namespace {

// degenerate carrier: S_T = s0 * exp(r T) with certainty
double zero_variance_price(double s0, const OptionSpec& spec) {
    const double df = std::exp(-spec.rate * spec.maturity);
    const double forward_gap = s0 - spec.strike * df;
    switch (spec.kind) {
        case OptionKind::call: return std::max(forward_gap, 0.0);
        case OptionKind::put: return std::max(-forward_gap, 0.0);
        case OptionKind::binary_cash_call:
            return forward_gap > 0.0 ? spec.cash * df : 0.0;
    }
    throw std::logic_error("zero_variance_price: unknown option kind");
}

}  // namespace

PriceResult price_quadrature(const ModelParams& params, double s0, const OptionSpec& spec,
                             bool include_initial_window, int nodes) {
    params.validate();
    spec.validate();
    if (!(s0 > 0.0)) throw std::invalid_argument("price_quadrature: s0 must be > 0");
    if (nodes < 2) throw std::invalid_argument("price_quadrature: need at least 2 nodes");

    PriceResult out;
    out.method = "quadrature";
    out.diagnostics = nodes;
    if (spec.strike <= 0.0 && spec.kind == OptionKind::call) {
        out.price = s0;  // kernel identity: every mixture component equals the spot
        return out;
    }

    const double T = spec.maturity;
    const double x0 = include_initial_window ? params.phi0 * std::min(params.tau, T) : 0.0;
    if (T <= params.tau) {
        // carrier fully deterministic
        const double x = x0;
        out.price = x > 0.0 ? bs_kernel(0.0, s0, x, spec, params.sigma_S)
                            : zero_variance_price(s0, spec);
        return out;
    }

    const auto [m1, m2] = ip_moments(params, T - params.tau);
    const LevyLogNormal law = levy_params(m1, m2);
    if (law.nu2 < 1e-14) {  // point mass at the mean
        out.price = bs_kernel(0.0, s0, x0 + m1, spec, params.sigma_S);
        return out;
    }
    const double nu = std::sqrt(law.nu2);
    const Quadrature& gl = gauss_legendre(nodes);
    const double a = 1e-8, b = 1.0 - 1e-8;
    double price = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double u = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
        const double x = x0 + std::exp(law.alpha + nu * norm_ppf(u));
        price += 0.5 * (b - a) * gl.weights[i] * bs_kernel(0.0, s0, x, spec, params.sigma_S);
    }
    out.price = price;
    return out;
}

PriceResult price_mc(const ModelParams& params, double s0, const OptionSpec& spec, long n_paths,
                     double step, std::uint64_t seed, bool include_initial_window) {
    params.validate();
    spec.validate();
    if (!(s0 > 0.0)) throw std::invalid_argument("price_mc: s0 must be > 0");
    if (!(step > 0.0)) throw std::invalid_argument("price_mc: step must be > 0");
    if (n_paths < 2) throw std::invalid_argument("price_mc: need at least 2 paths");

    const double T = spec.maturity;
    const double r = spec.rate;
    const double span = std::max(T - params.tau, 0.0);  // stochastic part of the carrier
    const long full = static_cast<long>(std::floor(span / step + 1e-12));
    const double tail = span - static_cast<double>(full) * step;
    const double x0 = include_initial_window ? params.phi0 * std::min(params.tau, T) : 0.0;

    const double p_drift = (params.mu_P - 0.5 * params.sigma_P * params.sigma_P) * step;
    const double p_vol = params.sigma_P * std::sqrt(step);
    const double df = std::exp(-r * T);

    double sum = 0.0, sumsq = 0.0;
    for (long path = 0; path < n_paths; ++path) {
        PathRng rng(seed, static_cast<std::uint64_t>(path));
        double p = params.phi0;
        double x = x0;
        for (long t = 0; t < full; ++t) {
            x += p * step;
            p *= std::exp(p_drift + p_vol * rng.normal());
        }
        if (tail > 1e-15) x += p * tail;

        double st;
        if (x > 0.0) {
            const double z = rng.normal();
            st = s0 * std::exp(r * T - 0.5 * params.sigma_S * params.sigma_S * x +
                               params.sigma_S * std::sqrt(x) * z);
        } else {
            st = s0 * std::exp(r * T);
        }
        double payoff = 0.0;
        switch (spec.kind) {
            case OptionKind::call: payoff = std::max(st - spec.strike, 0.0); break;
            case OptionKind::put: payoff = std::max(spec.strike - st, 0.0); break;
            case OptionKind::binary_cash_call: payoff = st > spec.strike ? spec.cash : 0.0; break;
        }
        sum += payoff;
        sumsq += payoff * payoff;
    }
    const double n = static_cast<double>(n_paths);
    const double m = sum / n;
    const double var = std::max(sumsq / n - m * m, 0.0) * n / (n - 1.0);

    PriceResult out;
    out.method = "monte_carlo";
    out.diagnostics = n_paths;
    out.price = df * m;
    out.std_error = df * std::sqrt(var / n);
    return out;
}

std::vector<std::vector<double>> table_report(const ModelParams& base, double s0,
                                              const std::vector<double>& strikes,
                                              const std::vector<double>& maturities,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& p0s, OptionKind kind,
                                              double cash, double rate,
                                              bool include_initial_window, int nodes) {
    if (strikes.empty() || maturities.empty() || taus.empty() || p0s.empty())
        throw std::invalid_argument("table_report: empty grid");
    std::vector<std::vector<double>> rows;
    for (double T : maturities)
        for (double tau : taus)
            for (double p0 : p0s) {
                ModelParams p = base;
                p.tau = tau;
                p.L = std::max(p.L, tau);
                p.phi0 = p0;
                std::vector<double> row;
                for (double K : strikes) {
                    OptionSpec spec{kind, K, T, cash, rate};
                    row.push_back(
                        price_quadrature(p, s0, spec, include_initial_window, nodes).price);
                }
                rows.push_back(std::move(row));
            }
    return rows;
}

}  // namespace sbm
