#include "sbm/math.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace sbm {

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_ppf: p outside (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -v : v;
}

double chi2_quantile_1(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("chi2_quantile_1: q outside (0,1)");
    const double z = norm_ppf(0.5 * (1.0 + q));
    return z * z;
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // theta-function form; the alternating series stalls for small lambda
        const double t = M_PI * M_PI / (8.0 * lambda * lambda);
        double s = 0.0;
        for (int k = 1; k <= 19; k += 2) {
            const double term = std::exp(-t * k * k);
            s += term;
            if (term < 1e-300) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

static Quadrature make_gauss_legendre(int n) {
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        q.nodes[i] = -x;
        q.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        q.weights[i] = w;
        q.weights[n - 1 - i] = w;
    }
    return q;
}

const Quadrature& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    static std::map<int, Quadrature> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("variance: need at least 2 points");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

SimplexResult nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& start, double step_scale,
                              double tol, long max_evals) {
    const int n = static_cast<int>(start.size());
    if (n < 1) throw std::invalid_argument("nelder_mead_max: empty start");
    long evals = 0;
    auto neg = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? -v : 1e300;
    };

    std::vector<std::vector<double>> sx(n + 1, start);
    std::vector<double> sf(n + 1);
    for (int i = 0; i < n; ++i)
        sx[i + 1][i] += step_scale * std::max(std::fabs(start[i]), 0.1);
    for (int i = 0; i <= n; ++i) sf[i] = neg(sx[i]);

    bool converged = false;
    while (evals < max_evals) {
        std::vector<int> ord(n + 1);
        for (int i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return sf[a] < sf[b]; });
        const int best = ord[0], worst = ord[n], second = ord[n - 1];
        if (sf[worst] - sf[best] < tol) {
            converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i <= n; ++i)
            if (i != worst)
                for (int j = 0; j < n; ++j) centroid[j] += sx[i][j] / n;

        auto blend = [&](double c) {
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j) x[j] = centroid[j] + c * (centroid[j] - sx[worst][j]);
            return x;
        };
        std::vector<double> xr = blend(1.0);
        const double fr = neg(xr);
        if (fr < sf[best]) {
            std::vector<double> xe = blend(2.0);
            const double fe = neg(xe);
            if (fe < fr) {
                sx[worst] = xe;
                sf[worst] = fe;
            } else {
                sx[worst] = xr;
                sf[worst] = fr;
            }
        } else if (fr < sf[second]) {
            sx[worst] = xr;
            sf[worst] = fr;
        } else {
            std::vector<double> xc = blend(fr < sf[worst] ? 0.5 : -0.5);
            const double fc = neg(xc);
            if (fc < std::min(fr, sf[worst])) {
                sx[worst] = xc;
                sf[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (int j = 0; j < n; ++j)
                        sx[i][j] = sx[best][j] + 0.5 * (sx[i][j] - sx[best][j]);
                    sf[i] = neg(sx[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (sf[i] < sf[best]) best = i;
    return {sx[best], -sf[best], converged, evals};
}

OlsFit ols(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
    const long n = static_cast<long>(rows.size());
    if (n == 0 || rows.size() != y.size()) throw std::invalid_argument("ols: bad dimensions");
    const int k = static_cast<int>(rows[0].size());
    if (n <= k) throw std::invalid_argument("ols: not enough observations");
    std::vector<double> xtx(k * k, 0.0), xty(k, 0.0);
    for (long i = 0; i < n; ++i) {
        for (int a = 0; a < k; ++a) {
            xty[a] += rows[i][a] * y[i];
            for (int b = 0; b < k; ++b) xtx[a * k + b] += rows[i][a] * rows[i][b];
        }
    }
    std::vector<double> xtx_inv = xtx;
    if (!invert_matrix(xtx_inv, k)) throw std::runtime_error("ols: singular regressor matrix");
    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.beta.assign(k, 0.0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) fit.beta[a] += xtx_inv[a * k + b] * xty[b];
    double rss = 0.0;
    for (long i = 0; i < n; ++i) {
        double fitv = 0.0;
        for (int a = 0; a < k; ++a) fitv += rows[i][a] * fit.beta[a];
        rss += (y[i] - fitv) * (y[i] - fitv);
    }
    fit.s2 = rss / static_cast<double>(n - k);
    fit.se.assign(k, 0.0);
    for (int a = 0; a < k; ++a) fit.se[a] = std::sqrt(fit.s2 * xtx_inv[a * k + a]);
    return fit;
}

bool invert_matrix(std::vector<double>& a, int n) {
    std::vector<double> inv(n * n, 0.0);
    for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (std::fabs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col)
            for (int c = 0; c < n; ++c) {
                std::swap(a[piv * n + c], a[col * n + c]);
                std::swap(inv[piv * n + c], inv[col * n + c]);
            }
        const double d = a[col * n + col];
        for (int c = 0; c < n; ++c) {
            a[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double m = a[r * n + col];
            if (m == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                a[r * n + c] -= m * a[col * n + c];
                inv[r * n + c] -= m * inv[col * n + c];
            }
        }
    }
    a = inv;
    return true;
}

}  // namespace sbm
