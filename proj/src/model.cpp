#include "sbm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace sbm {

namespace {
constexpr double kDegenerateTol = 1e-10;

void check_denominators(const ModelParams& p) {
    const double a = p.mu_P + p.sigma_P * p.sigma_P;
    const double b = 2.0 * p.mu_P + p.sigma_P * p.sigma_P;
    if (std::fabs(p.mu_P) < kDegenerateTol || std::fabs(a) < kDegenerateTol ||
        std::fabs(b) < kDegenerateTol)
        throw std::domain_error(
            "ip_moments: degenerate denominator (mu_P, mu_P+sigma_P^2 or 2mu_P+sigma_P^2 near 0)");
}
}  // namespace

void ModelParams::validate() const {
    if (!(sigma_P >= 0.0)) throw std::invalid_argument("ModelParams: sigma_P must be >= 0");
    if (!(sigma_S >= 0.0)) throw std::invalid_argument("ModelParams: sigma_S must be >= 0");
    if (!(tau >= 0.0 && tau <= L)) throw std::invalid_argument("ModelParams: need 0 <= tau <= L");
    if (!(phi0 > 0.0)) throw std::invalid_argument("ModelParams: phi0 must be > 0");
    if (std::fabs(mu_P) < kDegenerateTol)
        throw std::invalid_argument("ModelParams: mu_P must be nonzero");
}

std::pair<double, double> ip_moments(const ModelParams& p, double s) {
    if (!(s > 0.0)) throw std::domain_error("ip_moments: s must be > 0");
    check_denominators(p);
    const double a = p.mu_P + p.sigma_P * p.sigma_P;
    const double b = 2.0 * p.mu_P + p.sigma_P * p.sigma_P;
    const double g = (std::exp(p.mu_P * s) - 1.0) / p.mu_P;
    const double m1 = p.phi0 * g;
    const double m2 = 2.0 * p.phi0 * p.phi0 / a * ((std::exp(b * s) - 1.0) / b - g);
    return {m1, m2};
}

double x_tau_deterministic(const ModelParams& p) { return p.phi0 * p.tau; }

MomentPair integrated_info_moments(const ModelParams& p, double t) {
    if (!(t >= 0.0)) throw std::domain_error("integrated_info_moments: t must be >= 0");
    if (t <= p.tau) return {p.phi0 * t, 0.0};
    const auto [m1, m2] = ip_moments(p, t - p.tau);
    return {x_tau_deterministic(p) + m1, m2 - m1 * m1};
}

MomentPair integrated_info_moments(const ModelParams& p, double t, double T) {
    if (!(t >= 0.0)) throw std::domain_error("integrated_info_moments: t must be >= 0");
    if (!(T > t)) throw std::domain_error("integrated_info_moments: need t < T");
    if (T <= p.tau) return {p.phi0 * (T - t), 0.0};
    if (t <= p.tau) {
        // deterministic stub on [t, tau] plus IP(T - tau)
        const auto [m1, m2] = ip_moments(p, T - p.tau);
        return {p.phi0 * (p.tau - t) + m1, m2 - m1 * m1};
    }
    // increment over [t - tau, T - tau]: the GBM restarts from P_{t-tau}, so the
    // IP(T - t) moments pick up factors e^{mu_P (t-tau)} and e^{(2 mu_P + sigma_P^2)(t-tau)}
    check_denominators(p);
    const auto [m1, m2] = ip_moments(p, T - t);
    const double b = 2.0 * p.mu_P + p.sigma_P * p.sigma_P;
    const double mean = std::exp(p.mu_P * (t - p.tau)) * m1;
    const double ex2 = std::exp(b * (t - p.tau)) * m2;
    return {mean, ex2 - mean * mean};
}

LevyLogNormal levy_params(double m1, double m2) {
    if (!(m1 > 0.0)) throw std::invalid_argument("levy_params: m1 must be > 0");
    if (m2 < m1 * m1 * (1.0 - 1e-12))
        throw std::invalid_argument("levy_params: need m2 >= m1^2");
    LevyLogNormal out;
    out.alpha = 2.0 * std::log(m1) - 0.5 * std::log(m2);
    out.nu2 = std::log(m2) - 2.0 * std::log(m1);
    if (out.nu2 < 0.0) out.nu2 = 0.0;
    return out;
}

MomentPair log_price_moments(const ModelParams& p, double s0, double t) {
    if (!(s0 > 0.0)) throw std::domain_error("log_price_moments: s0 must be > 0");
    if (!(t > 0.0)) throw std::domain_error("log_price_moments: t must be > 0");
    const MomentPair x = integrated_info_moments(p, t);
    const double q = p.mu_S - 0.5 * p.sigma_S * p.sigma_S;
    return {std::log(s0) + q * x.mean, q * q * x.variance + p.sigma_S * p.sigma_S * x.mean};
}

}  // namespace sbm
