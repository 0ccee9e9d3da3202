#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sbm/model.hpp"

namespace sbm {

enum class OptionKind { call, put, binary_cash_call };

struct OptionSpec {
    OptionKind kind = OptionKind::call;
    double strike = 0.0;
    double maturity = 0.0;
    double cash = 0.0;  // binary payout
    double rate = 0.0;

    void validate() const;
};

struct PriceResult {
    double price = 0.0;
    std::string method;     // "quadrature" | "monte_carlo"
    double std_error = 0.0;  // 0 for quadrature
    long diagnostics = 0;    // node count or path count
};

// Black-Scholes price at time t with total log variance sigma_S^2 * x and
// discounting over [t, T]; put via parity, binary pays cash on S_T > K
double bs_kernel(double t, double s, double x, const OptionSpec& spec, double sigma_S);

// integrates the kernel against the moment-matched lognormal law of the
// integrated sentiment over [tau, T]; with include_initial_window the
// deterministic pre-history variance phi0*tau is added to the carrier
PriceResult price_quadrature(const ModelParams& params, double s0, const OptionSpec& spec,
                             bool include_initial_window = true, int nodes = 256);

// risk-neutral Monte Carlo: the sentiment path is simulated on the fine grid
// and the terminal price drawn from its exact conditional lognormal law
PriceResult price_mc(const ModelParams& params, double s0, const OptionSpec& spec, long n_paths,
                     double step, std::uint64_t seed, bool include_initial_window = true);

// quadrature prices laid out one row per (maturity, tau, p0) combination and
// one column per strike
std::vector<std::vector<double>> table_report(const ModelParams& base, double s0,
                                              const std::vector<double>& strikes,
                                              const std::vector<double>& maturities,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& p0s, OptionKind kind,
                                              double cash, double rate,
                                              bool include_initial_window = true,
                                              int nodes = 256);

}  // namespace sbm
