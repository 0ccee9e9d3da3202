#include "sbm/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "sbm/pricing.hpp"

namespace sbm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& s, const std::string& what, long line) {
    const char* c = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(c, &end);
    if (s.empty() || end != c + s.size() || !std::isfinite(v))
        throw std::invalid_argument(what + ": bad number '" + s + "' at line " +
                                    std::to_string(line));
    return v;
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string format_date(std::int64_t days) {
    std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y + (m <= 2)), m, d);
    return buf;
}

std::int64_t parse_date(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw std::invalid_argument("bad date '" + iso + "', want YYYY-MM-DD");
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (iso[i] < '0' || iso[i] > '9')
            throw std::invalid_argument("bad date '" + iso + "', want YYYY-MM-DD");
    const int y = std::stoi(iso.substr(0, 4));
    const int m = std::stoi(iso.substr(5, 2));
    const int d = std::stoi(iso.substr(8, 2));
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw std::invalid_argument("bad date '" + iso + "'");
    const std::int64_t days = days_from_civil(y, m, d);
    if (format_date(days) != iso) throw std::invalid_argument("bad calendar date '" + iso + "'");
    return days;
}

SampledPath load_series(const std::string& path, std::string* first_date) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_series: cannot open " + path);
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw std::invalid_argument("load_series: empty file " + path);
    ++line_no;
    if (trim(line) != "date,value")
        throw std::invalid_argument("load_series: expected header 'date,value' in " + path);

    std::vector<std::int64_t> days;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 2)
            throw std::invalid_argument("load_series: expected 2 fields at line " +
                                        std::to_string(line_no));
        std::int64_t day;
        try {
            day = parse_date(fields[0]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("load_series: " + std::string(e.what()) + " at line " +
                                        std::to_string(line_no));
        }
        const double value = parse_number(fields[1], "load_series", line_no);
        if (!days.empty() && day <= days.back())
            throw std::invalid_argument("load_series: dates not strictly increasing at line " +
                                        std::to_string(line_no));
        if (!(value > 0.0))
            throw std::invalid_argument("load_series: nonpositive value at line " +
                                        std::to_string(line_no));
        days.push_back(day);
        values.push_back(value);
    }
    if (days.size() < 2) throw std::invalid_argument("load_series: need at least 2 rows in " + path);

    const std::int64_t gap = days[1] - days[0];
    if (gap != 1 && gap != 7)
        throw std::invalid_argument("load_series: unsupported spacing of " + std::to_string(gap) +
                                    " days in " + path);
    for (std::size_t i = 1; i + 1 < days.size(); ++i)
        if (days[i + 1] - days[i] != gap)
            throw std::invalid_argument("load_series: gap after " + format_date(days[i]) + " in " +
                                        path);

    SampledPath out;
    out.step = gap == 1 ? 1.0 / 365.0 : 7.0 / 365.0;
    out.start_time = static_cast<double>(days[0]) / 365.0;
    out.values = std::move(values);
    if (first_date) *first_date = format_date(days[0]);
    return out;
}

SampledPath normalize_max100(const SampledPath& series) {
    if (series.values.empty()) throw std::invalid_argument("normalize_max100: empty series");
    for (double v : series.values)
        if (!(v > 0.0)) throw std::invalid_argument("normalize_max100: values must be > 0");
    const double mx = *std::max_element(series.values.begin(), series.values.end());
    SampledPath out = series;
    const double scale = 100.0 / mx;
    for (double& v : out.values) v = v == mx ? 100.0 : v * scale;
    return out;
}

std::vector<QuoteRow> load_quotes(const std::string& path, long* dropped) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_quotes: cannot open " + path);
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw std::invalid_argument("load_quotes: empty file " + path);
    ++line_no;
    if (trim(line) != "quote_date,expiry,strike,bid,ask,underlying")
        throw std::invalid_argument(
            "load_quotes: expected header 'quote_date,expiry,strike,bid,ask,underlying' in " +
            path);

    std::vector<QuoteRow> rows;
    long drop = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 6)
            throw std::invalid_argument("load_quotes: expected 6 fields at line " +
                                        std::to_string(line_no));
        QuoteRow q;
        std::int64_t qd, xd;
        try {
            qd = parse_date(fields[0]);
            xd = parse_date(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("load_quotes: " + std::string(e.what()) + " at line " +
                                        std::to_string(line_no));
        }
        q.quote_date = format_date(qd);
        q.expiry = format_date(xd);
        q.strike = parse_number(fields[2], "load_quotes", line_no);
        q.bid = parse_number(fields[3], "load_quotes", line_no);
        q.ask = parse_number(fields[4], "load_quotes", line_no);
        q.underlying = parse_number(fields[5], "load_quotes", line_no);
        if (q.bid == 0.0 && q.ask == 0.0) {  // no transactions
            ++drop;
            continue;
        }
        const std::string at = " at line " + std::to_string(line_no);
        if (xd <= qd) throw std::invalid_argument("load_quotes: expiry not after quote date" + at);
        if (!(q.underlying > 0.0))
            throw std::invalid_argument("load_quotes: underlying must be > 0" + at);
        if (!(q.strike > 0.0)) throw std::invalid_argument("load_quotes: strike must be > 0" + at);
        if (q.bid < 0.0 || q.bid > q.ask)
            throw std::invalid_argument("load_quotes: need 0 <= bid <= ask" + at);
        rows.push_back(std::move(q));
    }
    if (dropped) *dropped = drop;
    return rows;
}

RmseReport evaluate_rmse(const std::vector<QuoteRow>& quotes, const FitResult& fitted,
                         const ModelParams& params_base, Baseline baseline, double bs_sigma,
                         bool include_initial_window, int nodes) {
    if (baseline == Baseline::black_scholes && !(bs_sigma > 0.0))
        throw std::invalid_argument("evaluate_rmse: bs_sigma must be > 0");
    ModelParams p = params_base;
    p.mu_P = fitted.mu_P;
    p.sigma_P = fitted.sigma_P;
    p.mu_S = fitted.mu_S;
    p.sigma_S = fitted.sigma_S;
    p.tau = fitted.tau_hat;
    p.L = std::max(p.L, p.tau);
    if (baseline == Baseline::model) p.validate();

    RmseReport rep;
    double sq_all = 0.0;
    std::map<std::string, double> sq_expiry, sq_bucket;
    for (const QuoteRow& q : quotes) {
        const double T =
            static_cast<double>(parse_date(q.expiry) - parse_date(q.quote_date)) / 365.0;
        if (!(T > 0.0))
            throw std::invalid_argument("evaluate_rmse: nonpositive time to expiry for strike " +
                                        std::to_string(q.strike));
        const OptionSpec spec{OptionKind::call, q.strike, T, 0.0, 0.0};  // r = 0 convention
        double model;
        try {
            model = baseline == Baseline::model
                        ? price_quadrature(p, q.underlying, spec, include_initial_window, nodes)
                                  .price /
                              q.underlying
                        : bs_kernel(0.0, q.underlying, T, spec, bs_sigma) / q.underlying;
        } catch (const std::exception&) {
            ++rep.excluded;
            continue;
        }
        const double err = model - 0.5 * (q.bid + q.ask);
        const double moneyness = q.strike / q.underlying;
        const std::string bucket =
            std::fabs(moneyness - 1.0) <= 0.05 ? "ATM" : (moneyness < 0.95 ? "ITM" : "OTM");
        sq_all += err * err;
        sq_expiry[q.expiry] += err * err;
        sq_bucket[bucket] += err * err;
        ++rep.n_options[bucket];
        ++rep.total;
    }
    rep.overall = std::sqrt(sq_all);
    for (const auto& [k, v] : sq_expiry) rep.by_expiry[k] = std::sqrt(v);
    for (const auto& [k, v] : sq_bucket) rep.by_moneyness[k] = std::sqrt(v);
    return rep;
}

std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_config: cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("load_config: expected key=value at line " +
                                        std::to_string(line_no));
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("load_config: empty key at line " +
                                        std::to_string(line_no));
        out[key] = trim(t.substr(eq + 1));
    }
    return out;
}

void write_series(const std::string& path, const SampledPath& series,
                  const std::string& start_date) {
    const std::int64_t d0 = parse_date(start_date);
    const long gap = std::lround(series.step * 365.0);
    if ((gap != 1 && gap != 7) || std::fabs(series.step * 365.0 - gap) > 1e-9)
        throw std::invalid_argument("write_series: step must be 1/365 or 7/365");
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_series: cannot open " + path);
    out << "date,value\n";
    char buf[40];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
        out << format_date(d0 + gap * static_cast<std::int64_t>(i)) << ',' << buf << '\n';
    }
    if (!out) throw std::runtime_error("write_series: write failed for " + path);
}

}  // namespace sbm
