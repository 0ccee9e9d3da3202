#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbm/dataio.hpp"
#include "sbm/diagnostics.hpp"
#include "sbm/likelihood.hpp"
#include "sbm/model.hpp"
#include "sbm/pricing.hpp"
#include "sbm/simulate.hpp"

#ifndef SBM_NO_FETCH
#include "httplib.h"
#endif

using nlohmann::json;

namespace {

double cfg_num(const std::map<std::string, std::string>& cfg, const std::string& key,
               double fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (it->second.empty() || end != it->second.c_str() + it->second.size())
        throw std::invalid_argument("config: bad number for " + key + ": '" + it->second + "'");
    return v;
}

bool cfg_bool(const std::map<std::string, std::string>& cfg, const std::string& key,
              bool fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad flag for " + key + ": '" + v + "'");
}

json fit_to_json(const sbm::FitResult& f) {
    return json{{"mu_P", f.mu_P},
                {"sigma_P", f.sigma_P},
                {"mu_S", f.mu_S},
                {"sigma_S", f.sigma_S},
                {"std_errors", f.std_errors},
                {"loglik", f.loglik},
                {"tau_hat", f.tau_hat},
                {"tau_confidence_set", f.tau_confidence_set},
                {"method", f.method},
                {"converged", f.converged}};
}

sbm::FitResult fit_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open fit file " + path);
    json j;
    try {
        in >> j;
        sbm::FitResult f;
        f.mu_P = j.at("mu_P").get<double>();
        f.sigma_P = j.at("sigma_P").get<double>();
        f.mu_S = j.at("mu_S").get<double>();
        f.sigma_S = j.at("sigma_S").get<double>();
        f.loglik = j.value("loglik", 0.0);
        f.tau_hat = j.value("tau_hat", 0.0);
        f.method = j.value("method", "qml");
        f.converged = j.value("converged", false);
        if (j.contains("tau_confidence_set"))
            f.tau_confidence_set = j["tau_confidence_set"].get<std::vector<double>>();
        return f;
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad fit file " + path + ": " + e.what());
    }
}

json report_to_json(const sbm::TestReport& r) {
    json rej = json::object();
    for (const auto& [level, flag] : r.reject_at) {
        char key[8];
        std::snprintf(key, sizeof key, "%.2f", level);
        rej[key] = flag;
    }
    return json{
        {"statistic", r.statistic}, {"p_lo", r.p_lo}, {"p_hi", r.p_hi}, {"reject_at", rej},
        {"n", r.n}};
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file " + out_path);
    out << j.dump(2) << "\n";
}

std::vector<double> log_returns(const std::vector<double>& values) {
    std::vector<double> r;
    r.reserve(values.size() > 0 ? values.size() - 1 : 0);
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !(values[i - 1] > 0.0))
            throw std::invalid_argument("log returns need positive values");
        r.push_back(std::log(values[i] / values[i - 1]));
    }
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentiment-driven bivariate model: simulation, estimation, pricing"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::uint64_t seed = 12345;
    int nodes = 256;
    long paths = 100000;
    bool include_window = true;
    app.add_option("--config", config_path, "flat key=value file with model parameters");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--nodes", nodes, "quadrature nodes");
    app.add_option("--paths", paths, "Monte Carlo paths");
    auto* include_opt = app.add_option("--include-initial-window", include_window,
                                       "add the deterministic pre-history variance phi0*tau "
                                       "to the pricing carrier (tables/evaluate default false)");

    auto* sim = app.add_subcommand("simulate", "simulate one path pair and write CSVs");
    std::string sim_out_price, sim_out_sent, sim_start = "2015-01-01";
    double sim_horizon = 1.0, sim_s0 = 0.0, sim_rate_flag = std::nan("");
    int sim_step_days = 1;
    bool sim_rn = false;
    sim->add_option("--out-price", sim_out_price, "price CSV path")->required();
    sim->add_option("--out-sentiment", sim_out_sent, "sentiment CSV path")->required();
    sim->add_option("--horizon", sim_horizon, "horizon in years")->required();
    sim->add_option("--step-days", sim_step_days, "grid step in days (1 or 7)");
    sim->add_option("--start-date", sim_start, "date of the first sample");
    sim->add_option("--s0", sim_s0, "initial price (overrides config)");
    sim->add_flag("--risk-neutral", sim_rn, "simulate under the pricing measure");
    sim->add_option("--rate", sim_rate_flag, "risk-free rate (overrides config)");

    auto* fit = app.add_subcommand("fit", "estimate parameters from price/sentiment CSVs");
    std::string fit_price, fit_sent, fit_method = "qml", fit_out;
    double fit_delta = 7.0 / 365.0, fit_tau = 0.0, fit_alpha = 0.05;
    int fit_profile_lags = -1;
    bool fit_normalize = false;
    fit->add_option("--price", fit_price, "price series CSV")->required();
    fit->add_option("--sentiment", fit_sent, "sentiment series CSV")->required();
    fit->add_option("--method", fit_method, "qml or two-step")
        ->check(CLI::IsMember({"qml", "two-step"}));
    fit->add_option("--delta-big", fit_delta, "observation step in years (default 7/365)");
    fit->add_option("--tau", fit_tau, "delay in years (default 0)");
    fit->add_option("--profile", fit_profile_lags,
                    "profile the delay over {0..N} sentiment steps, pick the maximizer");
    fit->add_option("--alpha", fit_alpha, "confidence-set level parameter (set is 1-2*alpha)");
    fit->add_flag("--normalize", fit_normalize, "rescale the sentiment series to max 100");
    fit->add_option("--out", fit_out, "write the fit JSON here instead of stdout");

    auto* price = app.add_subcommand("price", "price a single European option");
    std::string price_kind = "call", price_method = "quadrature";
    double price_strike = 0.0, price_maturity = 0.0, price_cash = 100.0, price_s0 = 0.0;
    double price_rate_flag = std::nan(""), price_step = 1.0 / 730.0;
    price->add_option("--kind", price_kind, "call, put or binary")
        ->check(CLI::IsMember({"call", "put", "binary"}));
    price->add_option("--strike", price_strike, "strike")->required();
    price->add_option("--maturity", price_maturity, "maturity in years")->required();
    price->add_option("--cash", price_cash, "binary payout");
    price->add_option("--s0", price_s0, "spot (overrides config)");
    price->add_option("--rate", price_rate_flag, "risk-free rate (overrides config)");
    price->add_option("--method", price_method, "quadrature or mc")
        ->check(CLI::IsMember({"quadrature", "mc"}));
    price->add_option("--step", price_step, "MC grid step in years");

    auto* tables = app.add_subcommand("tables", "emit a pricing table preset as CSV");
    std::string tables_preset, tables_out;
    tables->add_option("--preset", tables_preset, "table3, table4, table5 or table6")
        ->required()
        ->check(CLI::IsMember({"table3", "table4", "table5", "table6"}));
    tables->add_option("--out", tables_out, "write CSV here instead of stdout");

    auto* proxy = app.add_subcommand("proxy-test", "stationarity and lognormality diagnostics");
    std::string proxy_series, proxy_out;
    int proxy_lag = 1;
    bool proxy_normalize = false;
    proxy->add_option("--series", proxy_series, "candidate sentiment series CSV")->required();
    proxy->add_option("--lag", proxy_lag, "ADF lag order");
    proxy->add_flag("--normalize", proxy_normalize, "rescale the series to max 100");
    proxy->add_option("--out", proxy_out, "write the report JSON here instead of stdout");

    auto* eval = app.add_subcommand("evaluate", "RMSE of model prices against option quotes");
    std::string eval_quotes, eval_fit, eval_baseline = "model", eval_out, eval_out_csv;
    double eval_bs_sigma = 0.0;
    eval->add_option("--quotes", eval_quotes, "option quotes CSV")->required();
    eval->add_option("--fit", eval_fit, "FitResult JSON produced by fit")->required();
    eval->add_option("--baseline", eval_baseline, "model or black_scholes")
        ->check(CLI::IsMember({"model", "black_scholes"}));
    eval->add_option("--bs-sigma", eval_bs_sigma, "constant volatility for the BS baseline");
    eval->add_option("--out", eval_out, "write the report JSON here instead of stdout");
    eval->add_option("--out-csv", eval_out_csv, "also write the report as CSV");

#ifndef SBM_NO_FETCH
    auto* fetch = app.add_subcommand("fetch", "download a CSV over plain http");
    std::string fetch_url, fetch_out;
    fetch->add_option("--url", fetch_url, "http://host[:port]/path")->required();
    fetch->add_option("--out", fetch_out, "output file")->required();
    fetch->fallthrough();
#endif
    for (CLI::App* sub : {sim, fit, price, tables, proxy, eval}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        std::map<std::string, std::string> cfg;
        if (!config_path.empty()) cfg = sbm::load_config(config_path);
        sbm::ModelParams params;  // defaults: the Table 3 base setting
        params.mu_P = 0.03;
        params.sigma_P = 0.35;
        params.sigma_S = 0.04;
        params.tau = 5.0 / 252.0;
        params.L = params.tau;
        params.phi0 = 100.0;
        params.mu_P = cfg_num(cfg, "mu_P", params.mu_P);
        params.sigma_P = cfg_num(cfg, "sigma_P", params.sigma_P);
        params.mu_S = cfg_num(cfg, "mu_S", params.mu_S);
        params.sigma_S = cfg_num(cfg, "sigma_S", params.sigma_S);
        params.tau = cfg_num(cfg, "tau", params.tau);
        params.phi0 = cfg_num(cfg, "phi0", params.phi0);
        params.L = cfg_num(cfg, "L", params.tau);
        double s0 = cfg_num(cfg, "s0", 450.0);
        double rate = cfg_num(cfg, "rate", 0.0);
        seed = static_cast<std::uint64_t>(cfg_num(cfg, "seed", static_cast<double>(seed)));
        nodes = static_cast<int>(cfg_num(cfg, "nodes", nodes));
        paths = static_cast<long>(cfg_num(cfg, "paths", static_cast<double>(paths)));
        include_window = cfg_bool(cfg, "include_initial_window", include_window);
        // reproduction presets price without the initial window unless asked
        const bool include_explicit = include_opt->count() > 0;

        if (sim->parsed()) {
            if (sim_step_days != 1 && sim_step_days != 7)
                throw std::invalid_argument("simulate: --step-days must be 1 or 7");
            if (sim_s0 > 0.0) s0 = sim_s0;
            if (!std::isnan(sim_rate_flag)) rate = sim_rate_flag;
            sbm::Measure measure{sim_rn, rate};
            const double step = sim_step_days / 365.0;
            auto pairs = sbm::simulate_paths(params, s0, sim_horizon, step, 1, seed, measure);
            sbm::write_series(sim_out_price, pairs[0].price, sim_start);
            sbm::write_series(sim_out_sent, pairs[0].sentiment, sim_start);
        } else if (fit->parsed()) {
            sbm::SampledPath price_path = sbm::load_series(fit_price);
            sbm::SampledPath sent_path = sbm::load_series(fit_sent);
            if (fit_normalize) sent_path = sbm::normalize_max100(sent_path);
            sbm::FitResult result;
            if (fit_profile_lags >= 0) {
                std::vector<double> grid;
                for (int c = 0; c <= fit_profile_lags; ++c) grid.push_back(c * sent_path.step);
                result = sbm::profile_tau(price_path, sent_path, fit_delta, grid, fit_alpha);
            } else {
                sbm::ReturnSample sample =
                    sbm::build_return_sample(price_path, sent_path, fit_delta, fit_tau);
                result = fit_method == "two-step" ? sbm::fit_two_step(sent_path, sample)
                                                  : sbm::fit_qml(sample);
            }
            emit(fit_to_json(result), fit_out);
        } else if (price->parsed()) {
            if (price_s0 > 0.0) s0 = price_s0;
            if (!std::isnan(price_rate_flag)) rate = price_rate_flag;
            sbm::OptionKind kind = price_kind == "call" ? sbm::OptionKind::call
                                   : price_kind == "put" ? sbm::OptionKind::put
                                                         : sbm::OptionKind::binary_cash_call;
            sbm::OptionSpec spec{kind, price_strike, price_maturity, price_cash, rate};
            sbm::PriceResult res =
                price_method == "mc"
                    ? sbm::price_mc(params, s0, spec, paths, price_step, seed, include_window)
                    : sbm::price_quadrature(params, s0, spec, include_window, nodes);
            emit(json{{"price", res.price},
                      {"method", res.method},
                      {"std_error", res.std_error},
                      {"diagnostics", res.diagnostics}},
                 "");
        } else if (tables->parsed()) {
            sbm::ModelParams base;
            base.mu_P = 0.03;
            base.sigma_P = 0.35;
            base.mu_S = 0.0;
            base.sigma_S = 0.04;
            base.phi0 = 100.0;
            const double w1 = 5.0 / 252.0, w2 = 10.0 / 252.0;
            const double m1 = 21.0 / 252.0, m3 = 63.0 / 252.0;
            const std::vector<double> strikes{400, 425, 450, 475, 500};
            std::vector<double> maturities, taus, p0s;
            sbm::OptionKind kind = sbm::OptionKind::call;
            if (tables_preset == "table3" || tables_preset == "table5") {
                maturities = {m3};
                taus = {w1};
                p0s = {10, 100, 1000};
            } else {
                maturities = {m1, m3};
                taus = {w1, w2};
                p0s = {100};
            }
            if (tables_preset == "table5" || tables_preset == "table6")
                kind = sbm::OptionKind::binary_cash_call;
            const bool include_here = include_explicit ? include_window : false;
            auto rows = sbm::table_report(base, 450.0, strikes, maturities, taus, p0s, kind,
                                          100.0, 0.01, include_here, nodes);
            std::ostringstream csv;
            csv << "maturity,tau,p0";
            for (double k : strikes) csv << ',' << k;
            csv << '\n';
            std::size_t idx = 0;
            char buf[40];
            for (double T : maturities)
                for (double tau : taus)
                    for (double p0 : p0s) {
                        csv << T << ',' << tau << ',' << p0;
                        for (double cell : rows[idx]) {
                            std::snprintf(buf, sizeof buf, "%.10g", cell);
                            csv << ',' << buf;
                        }
                        csv << '\n';
                        ++idx;
                    }
            if (tables_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(tables_out);
                if (!out) throw std::invalid_argument("cannot open output file " + tables_out);
                out << csv.str();
            }
        } else if (proxy->parsed()) {
            sbm::SampledPath series = sbm::load_series(proxy_series);
            if (proxy_normalize) series = sbm::normalize_max100(series);
            const sbm::TestReport adf = sbm::adf_test(log_returns(series.values), proxy_lag);
            const sbm::TestReport ks = sbm::ks_lognormal_test(series.values);
            emit(json{{"adf", report_to_json(adf)}, {"ks", report_to_json(ks)}}, proxy_out);
        } else if (eval->parsed()) {
            long dropped = 0;
            const auto quotes = sbm::load_quotes(eval_quotes, &dropped);
            const sbm::FitResult fitted = fit_from_json(eval_fit);
            const sbm::Baseline baseline = eval_baseline == "black_scholes"
                                               ? sbm::Baseline::black_scholes
                                               : sbm::Baseline::model;
            const bool include_here = include_explicit ? include_window : false;
            const sbm::RmseReport rep = sbm::evaluate_rmse(quotes, fitted, params, baseline,
                                                           eval_bs_sigma, include_here, nodes);
            json j{{"overall", rep.overall},     {"by_expiry", rep.by_expiry},
                   {"by_moneyness", rep.by_moneyness}, {"n_options", rep.n_options},
                   {"total", rep.total},         {"excluded", rep.excluded},
                   {"dropped_zero_quotes", dropped}};
            emit(j, eval_out);
            if (!eval_out_csv.empty()) {
                std::ofstream out(eval_out_csv);
                if (!out) throw std::invalid_argument("cannot open output file " + eval_out_csv);
                out << "scope,key,rmse,n\n";
                out << "overall,," << rep.overall << ',' << rep.total << '\n';
                for (const auto& [k, v] : rep.by_expiry) out << "expiry," << k << ',' << v << ",\n";
                for (const auto& [k, v] : rep.by_moneyness)
                    out << "moneyness," << k << ',' << v << ',' << rep.n_options.at(k) << '\n';
            }
        }
#ifndef SBM_NO_FETCH
        else if (fetch->parsed()) {
            std::string url = fetch_url;
            const std::string scheme = "http://";
            if (url.rfind(scheme, 0) != 0)
                throw std::invalid_argument("fetch: only plain http URLs are supported");
            url = url.substr(scheme.size());
            const std::size_t slash = url.find('/');
            const std::string host = slash == std::string::npos ? url : url.substr(0, slash);
            const std::string target = slash == std::string::npos ? "/" : url.substr(slash);
            httplib::Client client(("http://" + host).c_str());
            auto res = client.Get(target.c_str());
            if (!res || res->status != 200)
                throw std::runtime_error("fetch: request failed for " + fetch_url);
            std::ofstream out(fetch_out, std::ios::binary);
            if (!out) throw std::invalid_argument("cannot open output file " + fetch_out);
            out << res->body;
        }
#endif
        else {
            std::cout << app.help();
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
