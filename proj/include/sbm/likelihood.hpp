#pragma once
#include <array>
#include <string>
#include <vector>

#include "sbm/simulate.hpp"

namespace sbm {

struct FitResult {
    double mu_P = 0.0;
    double sigma_P = 0.0;
    double mu_S = 0.0;
    double sigma_S = 0.0;
    std::array<double, 4> std_errors{};  // order: mu_P, sigma_P, mu_S, sigma_S
    double loglik = 0.0;
    double tau_hat = 0.0;
    std::vector<double> tau_confidence_set;
    std::string method = "qml";
    bool converged = false;
};

// Gaussian return block: sum of log N(r_i; (mu_S - sigma_S^2/2) a_i, sigma_S^2 a_i)
double loglik_gaussian_block(double mu_S, double sigma_S, const ReturnSample& sample);
// sentiment block: lognormal density of a_1 - x_tau from the moment-matched
// integral law, then the one-step lognormal recursion for a_i given a_{i-1}
double loglik_sentiment_block(double mu_P, double sigma_P, const ReturnSample& sample);
// full approximated log likelihood; additively separable in the two blocks
double loglik(double mu_P, double mu_S, double sigma_P, double sigma_S,
              const ReturnSample& sample);

// derivative-free block maximization with multi-start; std errors from the
// numerical observed information. init order: mu_P, sigma_P, mu_S, sigma_S.
FitResult fit_qml(const ReturnSample& sample, const std::vector<double>& init = {});

// moments of the fine-step sentiment log returns for (mu_P, sigma_P);
// Gaussian-block maximization (identical to fit_qml's) for (mu_S, sigma_S)
FitResult fit_two_step(const SampledPath& fine_sentiment, const ReturnSample& sample);

// refit over a delay grid; confidence set by the likelihood-ratio threshold
// with the chi-square(1) quantile at level 1 - 2*alpha
FitResult profile_tau(const SampledPath& price, const SampledPath& sentiment, double delta_big,
                      const std::vector<double>& tau_grid, double alpha = 0.05,
                      std::vector<double>* failed_grid = nullptr);

// same over integer observation lags for pre-aggregated sentiment
FitResult profile_tau_preaggregated(const std::vector<double>& returns,
                                    const std::vector<double>& sentiment_obs, double delta_big,
                                    const std::vector<int>& lag_grid, double alpha = 0.05,
                                    std::vector<double>* failed_grid = nullptr);

}  // namespace sbm
