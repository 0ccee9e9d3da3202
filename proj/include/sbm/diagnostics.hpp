#pragma once
#include <map>
#include <vector>

namespace sbm {

struct TestReport {
    double statistic = 0.0;
    // exact tests report p_lo == p_hi; the unit-root test brackets the
    // p-value between the embedded critical-value levels
    double p_lo = 0.0;
    double p_hi = 1.0;
    std::map<double, bool> reject_at;  // levels 0.01, 0.05, 0.10
    long n = 0;                        // observations used by the test
};

// augmented Dickey-Fuller regression with constant, no trend:
// dy_t = c + rho y_{t-1} + sum_{i<=lag} b_i dy_{t-i} + e_t; statistic = t(rho)
TestReport adf_test(const std::vector<double>& series, int lag_order = 1);

// sup distance of a standardized sample against the standard normal CDF
double ks_statistic(std::vector<double> standardized);

// standardizes by sample mean/SD and applies the one-sample KS test with the
// asymptotic Kolmogorov p-value; estimating the parameters makes the test
// conservative under the null
TestReport ks_normal_test(const std::vector<double>& sample);

// lognormality of a positive series via normality of its log-returns
TestReport ks_lognormal_test(const std::vector<double>& series);

}  // namespace sbm
