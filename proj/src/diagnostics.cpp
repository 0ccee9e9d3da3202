#include "sbm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbm/math.hpp"

namespace sbm {

namespace {

constexpr double kLevels[3] = {0.01, 0.05, 0.10};

// Fuller's tau_mu critical values (regression with constant, no trend)
// for n in {25, 50, 100, 250, 500, inf}
constexpr double kTableN[6] = {25.0, 50.0, 100.0, 250.0, 500.0, 1e300};
constexpr double kCritical[3][6] = {
    {-3.75, -3.58, -3.51, -3.46, -3.44, -3.43},
    {-3.00, -2.93, -2.89, -2.88, -2.87, -2.86},
    {-2.63, -2.60, -2.58, -2.57, -2.57, -2.57},
};

}  // namespace

TestReport adf_test(const std::vector<double>& series, int lag_order) {
    if (lag_order < 0) throw std::invalid_argument("adf_test: lag_order must be >= 0");
    const long m = static_cast<long>(series.size());
    if (m < 20 + lag_order)
        throw std::invalid_argument("adf_test: need at least 20 + lag_order observations");

    std::vector<double> dy(m - 1);
    for (long t = 1; t < m; ++t) dy[t - 1] = series[t] - series[t - 1];

    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    rows.reserve(m - 1 - lag_order);
    for (long j = lag_order; j <= m - 2; ++j) {  // dy[j] regressed on level y_j
        std::vector<double> row;
        row.reserve(lag_order + 2);
        row.push_back(series[j]);
        for (int i = 1; i <= lag_order; ++i) row.push_back(dy[j - i]);
        row.push_back(1.0);
        rows.push_back(std::move(row));
        y.push_back(dy[j]);
    }

    const OlsFit fit = ols(rows, y);  // singular on constant series
    const double stat = fit.beta[0] / fit.se[0];
    const long nobs = static_cast<long>(y.size());

    int col = 0;
    for (int c = 1; c < 6; ++c)
        if (static_cast<double>(nobs) >= kTableN[c]) col = c;

    TestReport rep;
    rep.statistic = stat;
    rep.n = nobs;
    for (int li = 0; li < 3; ++li) rep.reject_at[kLevels[li]] = stat < kCritical[li][col];
    if (stat < kCritical[0][col]) {
        rep.p_lo = 0.0;
        rep.p_hi = 0.01;
    } else if (stat < kCritical[1][col]) {
        rep.p_lo = 0.01;
        rep.p_hi = 0.05;
    } else if (stat < kCritical[2][col]) {
        rep.p_lo = 0.05;
        rep.p_hi = 0.10;
    } else {
        rep.p_lo = 0.10;
        rep.p_hi = 1.0;
    }
    return rep;
}

double ks_statistic(std::vector<double> standardized) {
    const long n = static_cast<long>(standardized.size());
    if (n < 1) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(standardized.begin(), standardized.end());
    double d = 0.0;
    for (long i = 0; i < n; ++i) {
        const double f = norm_cdf(standardized[i]);
        d = std::max(d, (i + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

TestReport ks_normal_test(const std::vector<double>& sample) {
    const long n = static_cast<long>(sample.size());
    if (n < 2) throw std::invalid_argument("ks_normal_test: need at least 2 observations");
    const double mu = mean(sample);
    const double sd = std::sqrt(variance(sample));
    if (!(sd > 0.0)) throw std::runtime_error("ks_normal_test: degenerate sample");

    std::vector<double> z(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) z[i] = (sample[i] - mu) / sd;

    TestReport rep;
    rep.statistic = ks_statistic(std::move(z));
    rep.n = n;
    const double root = std::sqrt(static_cast<double>(n));
    const double lambda = (root + 0.12 + 0.11 / root) * rep.statistic;
    const double p = std::clamp(kolmogorov_q(lambda), 0.0, 1.0);
    rep.p_lo = rep.p_hi = p;
    for (double level : kLevels) rep.reject_at[level] = p < level;
    return rep;
}

TestReport ks_lognormal_test(const std::vector<double>& series) {
    if (series.size() < 20)
        throw std::invalid_argument("ks_lognormal_test: need at least 20 observations");
    for (double v : series)
        if (!(v > 0.0)) throw std::invalid_argument("ks_lognormal_test: values must be > 0");
    std::vector<double> r;
    r.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i)
        r.push_back(std::log(series[i] / series[i - 1]));
    return ks_normal_test(r);
}

}  // namespace sbm
