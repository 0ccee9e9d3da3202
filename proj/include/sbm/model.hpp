#pragma once
#include <utility>

namespace sbm {

// Bivariate sentiment/price model. The sentiment factor P follows a GBM
// dP = mu_P P dt + sigma_P P dZ with constant pre-history P_u = phi0 on [-L,0];
// the log price gains drift (mu_S - sigma_S^2/2) P_{t-tau} dt and
// variance sigma_S^2 P_{t-tau} dt. All times are in years.
struct ModelParams {
    double mu_P = 0.0;
    double sigma_P = 0.0;
    double mu_S = 0.0;
    double sigma_S = 0.0;
    double tau = 0.0;
    double phi0 = 1.0;
    double L = 0.0;

    void validate() const;  // throws std::invalid_argument
};

// moment-matched lognormal: if Y ~ LN(alpha, nu2) then E Y = e^{alpha+nu2/2}
struct LevyLogNormal {
    double alpha = 0.0;
    double nu2 = 0.0;
};

struct MomentPair {
    double mean = 0.0;
    double variance = 0.0;
};

// first and second raw moments of IP(s) = int_0^s P_u du given P_0 = phi0
std::pair<double, double> ip_moments(const ModelParams& p, double s);

// X_tau^tau = integral of the constant pre-history over [-tau, 0]
double x_tau_deterministic(const ModelParams& p);

// mean/variance of X_t^tau = int_0^t P_{u-tau} du
MomentPair integrated_info_moments(const ModelParams& p, double t);
// mean/variance of the increment X_{t,T}^tau = X_T^tau - X_t^tau
MomentPair integrated_info_moments(const ModelParams& p, double t, double T);

// match (m1, m2) = (E Y, E Y^2) exactly
LevyLogNormal levy_params(double m1, double m2);

// mean/variance of log S_t
MomentPair log_price_moments(const ModelParams& p, double s0, double t);

}  // namespace sbm
