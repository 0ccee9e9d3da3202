#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbm/likelihood.hpp"
#include "sbm/simulate.hpp"

namespace sbm {

struct QuoteRow {
    std::string quote_date;  // ISO-8601
    std::string expiry;
    double strike = 0.0;
    double bid = 0.0;  // fraction of the underlying
    double ask = 0.0;
    double underlying = 0.0;
};

enum class Baseline { model, black_scholes };

// deviations are measured in fraction-of-underlying units against the bid/ask
// mid; an aggregate is the square root of the summed squared deviations, so
// the moneyness buckets decompose the overall figure
struct RmseReport {
    double overall = 0.0;
    std::map<std::string, double> by_expiry;
    std::map<std::string, double> by_moneyness;  // ITM / ATM / OTM
    std::map<std::string, long> n_options;       // counts per moneyness bucket
    long total = 0;
    long excluded = 0;  // rows dropped on pricing failure
};

// days since 1970-01-01 (proleptic Gregorian)
std::int64_t days_from_civil(int y, int m, int d);
std::int64_t parse_date(const std::string& iso);    // throws on malformed input
std::string format_date(std::int64_t days);

// CSV with header `date,value`, ISO dates, strictly increasing, uniformly
// daily (step 1/365) or weekly (step 7/365); positive values. start_time is
// days-since-epoch / 365 so two loaded series share a clock.
SampledPath load_series(const std::string& path, std::string* first_date = nullptr);

// scale so the maximum equals 100 exactly
SampledPath normalize_max100(const SampledPath& series);

// CSV with header `quote_date,expiry,strike,bid,ask,underlying`; rows quoted
// bid=ask=0 (no transactions) are dropped and counted in *dropped
std::vector<QuoteRow> load_quotes(const std::string& path, long* dropped = nullptr);

// model mid prices per quote via quadrature at r=0, divided by the underlying
// to match quote units; baseline=black_scholes prices with a constant
// volatility bs_sigma instead. Moneyness: |K/S-1| <= 0.05 ATM, K/S < 0.95 ITM,
// else OTM. Rows whose pricing fails are excluded and counted.
RmseReport evaluate_rmse(const std::vector<QuoteRow>& quotes, const FitResult& fitted,
                         const ModelParams& params_base, Baseline baseline,
                         double bs_sigma = 0.0, bool include_initial_window = false,
                         int nodes = 256);

// flat key=value file; '#' comments and blank lines skipped
std::map<std::string, std::string> load_config(const std::string& path);

// `date,value` rows at the series step, values printed with %.17g so a
// load_series round-trip is bit exact
void write_series(const std::string& path, const SampledPath& series,
                  const std::string& start_date);

}  // namespace sbm
