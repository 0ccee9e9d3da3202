#pragma once
#include <functional>
#include <vector>

namespace sbm {

double norm_pdf(double x);
double norm_cdf(double x);
// inverse standard normal CDF (Wichura's PPND16), |error| < 1e-15 on (0,1)
double norm_ppf(double p);
// quantile of the chi-square law with one degree of freedom
double chi2_quantile_1(double q);
// asymptotic Kolmogorov tail Q(lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2)
double kolmogorov_q(double lambda);

// nodes/weights on [-1,1]; exact for polynomials of degree 2n-1
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const Quadrature& gauss_legendre(int n);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased (n-1)

struct SimplexResult {
    std::vector<double> x;
    double fmax = 0;
    bool converged = false;
    long evals = 0;
};
// maximizes f; stops when the simplex f-spread drops below tol
SimplexResult nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& start, double step_scale,
                              double tol, long max_evals);

struct OlsFit {
    std::vector<double> beta;
    std::vector<double> se;
    double s2 = 0;
    long n = 0;
    int k = 0;
};
// rows[i] holds the regressors of observation i
OlsFit ols(const std::vector<std::vector<double>>& rows, const std::vector<double>& y);

// in-place Gauss-Jordan inverse of a row-major n x n matrix; false if singular
bool invert_matrix(std::vector<double>& a, int n);

}  // namespace sbm
