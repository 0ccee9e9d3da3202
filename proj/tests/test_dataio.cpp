#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "sbm/dataio.hpp"
#include "sbm/likelihood.hpp"
#include "sbm/pricing.hpp"
#include "sbm/simulate.hpp"

using namespace sbm;

namespace {

std::string fixture(const std::string& name) {
    return std::string(SBM_FIXTURE_DIR) + "/" + name;
}

std::string write_tmp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

template <typename F>
std::string thrown_message(F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

ModelParams study_params() {
    ModelParams p;
    p.mu_P = 2.0;
    p.sigma_P = 0.5;
    p.mu_S = 0.05;
    p.sigma_S = 0.3;
    p.tau = 2.0 / 365.0;
    p.L = p.tau;
    p.phi0 = 1.0;
    return p;
}

}  // namespace

TEST_CASE("civil date arithmetic and formatting") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2015, 1, 1) == 16436);
    CHECK(format_date(16436) == "2015-01-01");
    CHECK(parse_date("2016-02-29") == days_from_civil(2016, 2, 29));
    CHECK(format_date(parse_date("2016-02-29")) == "2016-02-29");
    CHECK(parse_date("2017-08-25") - parse_date("2017-07-28") == 28);

    CHECK_THROWS_AS(parse_date("2015-02-29"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("2015-13-01"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("2015-1-01"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("2015/01/01"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("garbage"), std::invalid_argument);
}

TEST_CASE("load_series reads the daily and weekly fixtures") {
    std::string first;
    const SampledPath daily = load_series(fixture("daily_price729.csv"), &first);
    CHECK(first == "2015-01-01");
    CHECK(daily.step == doctest::Approx(1.0 / 365.0).epsilon(1e-15));
    CHECK(daily.start_time == doctest::Approx(16436.0 / 365.0).epsilon(1e-15));
    REQUIRE(daily.values.size() == 729);
    CHECK(daily.values[0] == 450.0);

    const SampledPath weekly = load_series(fixture("weekly_price119.csv"));
    CHECK(weekly.step == doctest::Approx(7.0 / 365.0).epsilon(1e-15));
    REQUIRE(weekly.values.size() == 119);
    const SampledPath wsent = load_series(fixture("weekly_sent118.csv"));
    REQUIRE(wsent.values.size() == 118);
    CHECK(wsent.values[0] == 2.0);
}

TEST_CASE("load_series rejects malformed input") {
    const std::string good = "date,value\n2015-01-01,1.0\n2015-01-02,2.0\n2015-01-03,3.0\n";
    const SampledPath ok = load_series(write_tmp("sbm_ok.csv", good));
    CHECK(ok.values == std::vector<double>{1.0, 2.0, 3.0});

    CHECK(contains(thrown_message([] {
              load_series(write_tmp(
                  "sbm_gap.csv",
                  "date,value\n2015-01-01,1\n2015-01-02,2\n2015-01-04,3\n"));
          }),
                   "gap after 2015-01-02"));
    CHECK(contains(thrown_message([] {
              load_series(write_tmp(
                  "sbm_spacing.csv",
                  "date,value\n2015-01-01,1\n2015-01-03,2\n2015-01-05,3\n"));
          }),
                   "unsupported spacing"));
    CHECK(contains(thrown_message([] {
              load_series(write_tmp(
                  "sbm_nonpos.csv", "date,value\n2015-01-01,1\n2015-01-02,0.0\n"));
          }),
                   "nonpositive value at line 3"));
    CHECK(contains(thrown_message([] {
              load_series(write_tmp(
                  "sbm_order.csv", "date,value\n2015-01-02,1\n2015-01-01,2\n"));
          }),
                   "not strictly increasing"));
    CHECK(contains(thrown_message([] {
              load_series(write_tmp("sbm_header.csv", "time,value\n2015-01-01,1\n"));
          }),
                   "expected header"));
    CHECK(contains(thrown_message([] {
              load_series(write_tmp(
                  "sbm_badnum.csv", "date,value\n2015-01-01,1\n2015-01-02,12x\n"));
          }),
                   "at line 3"));
    CHECK_THROWS_AS(load_series(write_tmp("sbm_short.csv", "date,value\n2015-01-01,1\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(load_series("/nonexistent/sbm_none.csv"), std::invalid_argument);
}

TEST_CASE("normalize_max100 rescales to a hard ceiling of 100") {
    SampledPath s;
    s.step = 7.0 / 365.0;
    s.start_time = 1.0;
    s.values = {1.0, 2.0, 4.0};
    const SampledPath n = normalize_max100(s);
    CHECK(n.values == std::vector<double>{25.0, 50.0, 100.0});
    CHECK(n.step == s.step);
    CHECK(n.start_time == s.start_time);
    CHECK(normalize_max100(n).values[2] == 100.0);

    SampledPath bad = s;
    bad.values[1] = 0.0;
    CHECK_THROWS_AS(normalize_max100(bad), std::invalid_argument);
    CHECK_THROWS_AS(normalize_max100(SampledPath{}), std::invalid_argument);
}

TEST_CASE("normalization leaves the two-step sentiment estimates unchanged") {
    const ModelParams p = study_params();
    const auto paths = simulate_paths(p, 450.0, 364.0 / 365.0, 1.0 / 365.0, 1, 321);
    const ReturnSample sample =
        build_return_sample(paths[0].price, paths[0].sentiment, 7.0 / 365.0, p.tau);
    const FitResult raw = fit_two_step(paths[0].sentiment, sample);
    const FitResult scaled = fit_two_step(normalize_max100(paths[0].sentiment), sample);
    CHECK(scaled.mu_P == doctest::Approx(raw.mu_P).epsilon(1e-10));
    CHECK(scaled.sigma_P == doctest::Approx(raw.sigma_P).epsilon(1e-10));
}

TEST_CASE("write_series round trip is bit exact") {
    const ModelParams p = study_params();
    const auto paths = simulate_paths(p, 450.0, 84.0 / 365.0, 1.0 / 365.0, 1, 2025);
    const std::string fprice = write_tmp("sbm_rt_price.csv", "");
    const std::string fsent = write_tmp("sbm_rt_sent.csv", "");
    write_series(fprice, paths[0].price, "2015-01-05");
    write_series(fsent, paths[0].sentiment, "2015-01-05");

    std::string d0;
    const SampledPath price = load_series(fprice, &d0);
    const SampledPath sent = load_series(fsent);
    CHECK(d0 == "2015-01-05");
    REQUIRE(price.values.size() == paths[0].price.values.size());
    for (std::size_t i = 0; i < price.values.size(); ++i) {
        CHECK(price.values[i] == paths[0].price.values[i]);
        CHECK(sent.values[i] == paths[0].sentiment.values[i]);
    }

    // the loaded clock is shifted but the sample built from it is identical
    const ReturnSample a =
        build_return_sample(paths[0].price, paths[0].sentiment, 7.0 / 365.0, p.tau);
    const ReturnSample b = build_return_sample(price, sent, 7.0 / 365.0, p.tau);
    REQUIRE(a.returns.size() == b.returns.size());
    for (std::size_t i = 0; i < a.returns.size(); ++i) {
        CHECK(a.returns[i] == b.returns[i]);
        CHECK(a.cumulants[i] == doctest::Approx(b.cumulants[i]).epsilon(1e-14));
    }
    CHECK(a.x_tau == doctest::Approx(b.x_tau).epsilon(1e-14));
    CHECK(a.phi0 == b.phi0);
    CHECK(a.s1 == doctest::Approx(b.s1).epsilon(1e-12));

    SampledPath bad = paths[0].price;
    bad.step = 2.0 / 365.0;
    CHECK_THROWS_AS(write_series(write_tmp("sbm_rt_bad.csv", ""), bad, "2015-01-05"),
                    std::invalid_argument);
}

TEST_CASE("load_quotes reads the option fixture") {
    long dropped = -1;
    const auto rows = load_quotes(fixture("table8_quotes.csv"), &dropped);
    REQUIRE(rows.size() == 8);
    CHECK(dropped == 0);
    CHECK(rows[0].quote_date == "2017-07-28");
    CHECK(rows[0].expiry == "2017-08-25");
    CHECK(rows[0].strike == 2200.0);
    CHECK(rows[0].bid == 0.2200);
    CHECK(rows[0].ask == 0.2455);
    CHECK(rows[0].underlying == 2817.78);
    CHECK(rows[7].strike == 2900.0);
}

TEST_CASE("load_quotes drops zero quotes and rejects bad rows") {
    const std::string head = "quote_date,expiry,strike,bid,ask,underlying\n";
    long dropped = 0;
    const auto rows = load_quotes(
        write_tmp("sbm_q_drop.csv", head +
                                        "2017-07-28,2017-08-25,2200,0.0,0.0,2817.78\n"
                                        "2017-07-28,2017-08-25,2300,0.1,0.2,2817.78\n"),
        &dropped);
    REQUIRE(rows.size() == 1);
    CHECK(dropped == 1);
    CHECK(rows[0].strike == 2300.0);

    CHECK(contains(thrown_message([&] {
              load_quotes(write_tmp("sbm_q_cross.csv",
                                    head + "2017-07-28,2017-08-25,2200,0.3,0.2,2817.78\n"));
          }),
                   "need 0 <= bid <= ask at line 2"));
    CHECK(contains(thrown_message([&] {
              load_quotes(write_tmp("sbm_q_exp.csv",
                                    head + "2017-07-28,2017-07-28,2200,0.1,0.2,2817.78\n"));
          }),
                   "expiry not after quote date"));
    CHECK_THROWS_AS(load_quotes(write_tmp("sbm_q_strike.csv",
                                          head + "2017-07-28,2017-08-25,0,0.1,0.2,2817.78\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(load_quotes(write_tmp("sbm_q_fields.csv",
                                          head + "2017-07-28,2017-08-25,2200,0.1,0.2\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(load_quotes(write_tmp("sbm_q_head.csv", "a,b,c,d,e,f\n")),
                    std::invalid_argument);
}

namespace {

FitResult table8_fit() {
    FitResult f;
    f.mu_P = 1.0404;
    f.sigma_P = 1.1092;
    f.mu_S = 0.0;
    f.sigma_S = 0.0830;
    f.tau_hat = 5.0 / 365.0;
    return f;
}

ModelParams table8_base() {
    ModelParams p;
    p.mu_P = 1.0;
    p.sigma_P = 1.0;
    p.sigma_S = 1.0;
    p.tau = 5.0 / 365.0;
    p.L = 5.0 / 365.0;
    p.phi0 = 56.39;
    return p;
}

}  // namespace

TEST_CASE("rmse evaluation against the quote fixture") {
    const auto quotes = load_quotes(fixture("table8_quotes.csv"));
    const RmseReport rep =
        evaluate_rmse(quotes, table8_fit(), table8_base(), Baseline::model);
    CHECK(rep.overall == doctest::Approx(0.06739116823391855).epsilon(1e-6));
    CHECK(rep.total == 8);
    CHECK(rep.excluded == 0);
    CHECK(rep.n_options.at("ITM") == 5);
    CHECK(rep.n_options.at("ATM") == 3);
    CHECK(rep.n_options.count("OTM") == 0);
    REQUIRE(rep.by_expiry.size() == 1);
    CHECK(rep.by_expiry.at("2017-08-25") == doctest::Approx(rep.overall).epsilon(1e-14));

    // buckets decompose the overall root sum of squares
    double sq = 0.0;
    for (const auto& [bucket, v] : rep.by_moneyness) sq += v * v;
    CHECK(std::sqrt(sq) == doctest::Approx(rep.overall).epsilon(1e-12));

    // order of the quotes does not matter
    std::vector<QuoteRow> rev(quotes.rbegin(), quotes.rend());
    CHECK(evaluate_rmse(rev, table8_fit(), table8_base(), Baseline::model).overall ==
          doctest::Approx(rep.overall).epsilon(1e-14));
}

TEST_CASE("rmse is zero when quotes sit on the model price") {
    const FitResult f = table8_fit();
    const ModelParams base = table8_base();
    ModelParams p = base;
    p.mu_P = f.mu_P;
    p.sigma_P = f.sigma_P;
    p.mu_S = f.mu_S;
    p.sigma_S = f.sigma_S;
    p.tau = f.tau_hat;
    QuoteRow q;
    q.quote_date = "2017-07-28";
    q.expiry = "2017-08-25";
    q.strike = 2500.0;
    q.underlying = 2817.78;
    const OptionSpec spec{OptionKind::call, q.strike, 28.0 / 365.0, 0.0, 0.0};
    const double mid = price_quadrature(p, q.underlying, spec, false).price / q.underlying;
    q.bid = mid;
    q.ask = mid;
    const RmseReport rep = evaluate_rmse({q}, f, base, Baseline::model);
    CHECK(rep.overall == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(rep.n_options.at("ITM") == 1);

    // far strike lands in the OTM bucket
    QuoteRow far = q;
    far.strike = 1.2 * q.underlying;
    far.bid = 0.01;
    far.ask = 0.02;
    const RmseReport rep2 = evaluate_rmse({far}, f, base, Baseline::model);
    CHECK(rep2.n_options.at("OTM") == 1);
    CHECK(rep2.by_moneyness.at("OTM") == doctest::Approx(rep2.overall).epsilon(1e-14));
}

TEST_CASE("constant volatility baseline prices with the kernel") {
    QuoteRow q;
    q.quote_date = "2017-07-28";
    q.expiry = "2017-08-25";
    q.strike = 2500.0;
    q.underlying = 2817.78;
    q.bid = 0.10;
    q.ask = 0.12;
    const double T = 28.0 / 365.0;
    const OptionSpec spec{OptionKind::call, q.strike, T, 0.0, 0.0};
    const double sigma = 0.55;
    const double want =
        std::fabs(bs_kernel(0.0, q.underlying, T, spec, sigma) / q.underlying - 0.11);
    const RmseReport rep =
        evaluate_rmse({q}, table8_fit(), table8_base(), Baseline::black_scholes, sigma);
    CHECK(rep.overall == doctest::Approx(want).epsilon(1e-13));
    CHECK_THROWS_AS(evaluate_rmse({q}, table8_fit(), table8_base(), Baseline::black_scholes, 0.0),
                    std::invalid_argument);
}

TEST_CASE("config files parse as trimmed key=value pairs") {
    const std::string path = write_tmp("sbm_cfg.ini",
                                       "# comment\n"
                                       "\n"
                                       "mu_P = 0.03\n"
                                       "  phi0=100\n"
                                       "label = weekly run \n");
    const auto cfg = load_config(path);
    REQUIRE(cfg.size() == 3);
    CHECK(cfg.at("mu_P") == "0.03");
    CHECK(cfg.at("phi0") == "100");
    CHECK(cfg.at("label") == "weekly run");

    CHECK_THROWS_AS(load_config(write_tmp("sbm_cfg_bad.ini", "mu_P 0.03\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(load_config(write_tmp("sbm_cfg_key.ini", "=0.03\n")), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/sbm.ini"), std::invalid_argument);
}
