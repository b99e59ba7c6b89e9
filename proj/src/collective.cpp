#include "jumplab/collective.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"

namespace jumplab {

IndicatorPanel indicator_panel(const std::vector<PanelEvent>& jumps, size_t n_stocks,
                               int64_t total_bins, int bins_per_day) {
    IndicatorPanel ind;
    ind.n_stocks = n_stocks;
    ind.total_bins = total_bins;
    ind.bins_per_day = bins_per_day;
    ind.theta.assign(n_stocks * size_t(total_bins), 0);
    for (const auto& e : jumps) {
        int64_t g = int64_t(e.at.day) * bins_per_day + e.at.bin;
        ind.theta[size_t(e.stock) * size_t(total_bins) + size_t(g)] = 1;
    }
    ind.p.assign(n_stocks, 0.0);
    for (size_t s = 0; s < n_stocks; ++s) {
        int64_t c = 0;
        for (int64_t t = 0; t < total_bins; ++t)
            c += ind.theta[s * size_t(total_bins) + size_t(t)];
        ind.p[s] = double(c) / double(total_bins);
    }
    return ind;
}

std::vector<double> CoJumpDecomposition::leading_full(size_t n_stocks_full) const {
    std::vector<double> v(n_stocks_full, 0.0);
    for (size_t i = 0; i < n; ++i) v[kept[i]] = eigenvectors[i];
    return v;
}

CoJumpDecomposition cojump_matrix(const IndicatorPanel& ind, std::vector<uint32_t>* excluded) {
    CoJumpDecomposition dec;
    dec.T = ind.total_bins;
    for (size_t s = 0; s < ind.n_stocks; ++s) {
        if (ind.p[s] > 0.0 && ind.p[s] < 1.0) dec.kept.push_back(uint32_t(s));
        else if (excluded) excluded->push_back(uint32_t(s));
    }
    size_t n = dec.kept.size();
    dec.n = n;
    if (n < 2) throw refusal("cojump_matrix: fewer than 2 stocks with jumps");
    int64_t T = ind.total_bins;
    dec.mp_reliable = int64_t(n) < T;

    // exact integer pair co-counts via per-bin jumping lists (theta is sparse)
    std::vector<int64_t> cocount(n * n, 0);
    std::vector<int32_t> kept_of(ind.n_stocks, -1);
    for (size_t i = 0; i < n; ++i) kept_of[dec.kept[i]] = int32_t(i);
    std::vector<uint32_t> bin_stocks;
    for (int64_t t = 0; t < T; ++t) {
        bin_stocks.clear();
        for (size_t s = 0; s < ind.n_stocks; ++s)
            if (ind.at(s, t) && kept_of[s] >= 0) bin_stocks.push_back(uint32_t(kept_of[s]));
        for (size_t a = 0; a < bin_stocks.size(); ++a)
            for (size_t b = a; b < bin_stocks.size(); ++b) {
                ++cocount[bin_stocks[a] * n + bin_stocks[b]];
                if (a != b) ++cocount[bin_stocks[b] * n + bin_stocks[a]];
            }
    }

    dec.c.assign(n * n, 0.0);
    dec.corr.assign(n * n, 0.0);
    std::vector<double> sd(n);
    for (size_t i = 0; i < n; ++i) {
        double p = ind.p[dec.kept[i]];
        sd[i] = std::sqrt(p * (1.0 - p));
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            double pi = ind.p[dec.kept[i]], pj = ind.p[dec.kept[j]];
            double c = double(cocount[i * n + j]) / double(T) - pi * pj;
            dec.c[i * n + j] = c;
            dec.corr[i * n + j] = c / (sd[i] * sd[j]);
        }

    Eigen::MatrixXd corr(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) corr(long(i), long(j)) = dec.corr[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    if (solver.info() != Eigen::Success)
        throw refusal("cojump_matrix: eigen-decomposition failed");

    // Eigen returns ascending eigenvalues; store descending, sign-fix columns
    dec.eigenvalues.resize(n);
    dec.eigenvectors.resize(n * n);
    for (size_t k = 0; k < n; ++k) {
        size_t src = n - 1 - k;
        dec.eigenvalues[k] = solver.eigenvalues()(long(src));
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i) sum += solver.eigenvectors()(long(i), long(src));
        double flip = 1.0;
        if (sum < 0.0) flip = -1.0;
        else if (sum == 0.0) {
            for (size_t i = 0; i < n; ++i) {
                double v = solver.eigenvectors()(long(i), long(src));
                if (v != 0.0) { flip = v > 0.0 ? 1.0 : -1.0; break; }
            }
        }
        for (size_t i = 0; i < n; ++i)
            dec.eigenvectors[k * n + i] = flip * solver.eigenvectors()(long(i), long(src));
    }

    double q = std::sqrt(double(n) / double(T));
    dec.mp_lo = (1.0 - q) * (1.0 - q);
    dec.mp_hi = (1.0 + q) * (1.0 + q);
    for (double ev : dec.eigenvalues)
        if (ev < dec.mp_lo || ev > dec.mp_hi) ++dec.n_outside_band;
    return dec;
}

MarketJumpSeries chi_series(const IndicatorPanel& ind, const std::vector<double>& v1,
                            double s_prime) {
    if (v1.size() != ind.n_stocks)
        throw input_error("chi_series: eigenvector length does not match panel");
    double vsum = 0.0;
    for (double v : v1) vsum += v;
    if (vsum <= 0.0) throw input_error("chi_series: eigenvector must be sign-fixed (sum > 0)");
    MarketJumpSeries out;
    out.threshold = s_prime;
    out.chi.assign(size_t(ind.total_bins), 0.0);
    double prefactor = 1.0 / std::sqrt(double(ind.n_stocks));
    for (size_t s = 0; s < ind.n_stocks; ++s) {
        if (v1[s] == 0.0) continue;
        const uint8_t* row = ind.theta.data() + s * size_t(ind.total_bins);
        for (int64_t t = 0; t < ind.total_bins; ++t)
            if (row[size_t(t)]) out.chi[size_t(t)] += prefactor * v1[s];
    }
    for (int64_t t = 0; t < ind.total_bins; ++t)
        if (out.chi[size_t(t)] > s_prime) out.events.push_back(t);
    return out;
}

MarketJumpSeries chi_uniform(const IndicatorPanel& ind, double s_prime) {
    std::vector<double> v1(ind.n_stocks, 1.0 / std::sqrt(double(ind.n_stocks)));
    return chi_series(ind, v1, s_prime);
}

ExplainedFraction explained_fraction(const std::vector<PanelEvent>& jumps,
                                     const std::vector<int64_t>& market_bins,
                                     int half_window, int bins_per_day) {
    if (jumps.empty()) throw refusal("explained_fraction: zero jumps");
    if (half_window < 0) throw input_error("explained_fraction: negative window");
    std::vector<int64_t> bins = market_bins;
    std::sort(bins.begin(), bins.end());
    ExplainedFraction out;
    out.n_jumps = jumps.size();
    for (const auto& j : jumps) {
        int64_t g = int64_t(j.at.day) * bins_per_day + j.at.bin;
        int64_t day_lo = int64_t(j.at.day) * bins_per_day;
        int64_t day_hi = day_lo + bins_per_day - 1;  // window never leaves the session
        int64_t lo = std::max(day_lo, g - half_window);
        int64_t hi = std::min(day_hi, g + half_window);
        auto it = std::lower_bound(bins.begin(), bins.end(), lo);
        if (it != bins.end() && *it <= hi) ++out.n_explained;
    }
    out.fraction = double(out.n_explained) / double(out.n_jumps);
    return out;
}

std::vector<SectorSeries> sector_jumps(const IndicatorPanel& ind,
                                       const std::vector<std::string>& sector_of_stock,
                                       double s_prime, size_t min_members,
                                       std::vector<std::string>* skipped) {
    if (sector_of_stock.size() != ind.n_stocks)
        throw input_error("sector_jumps: need one sector label per stock");
    std::map<std::string, std::vector<size_t>> groups;
    for (size_t s = 0; s < ind.n_stocks; ++s) {
        if (sector_of_stock[s].empty())
            throw input_error("sector_jumps: stock " + std::to_string(s) + " unlabeled");
        groups[sector_of_stock[s]].push_back(s);
    }
    std::vector<SectorSeries> out;
    for (const auto& [label, members] : groups) {
        if (members.size() < min_members) {
            if (skipped) skipped->push_back(label);
            continue;
        }
        SectorSeries sec;
        sec.label = label;
        sec.n_members = members.size();
        sec.series.threshold = s_prime;
        sec.series.chi.assign(size_t(ind.total_bins), 0.0);
        double inv = 1.0 / double(members.size());
        for (size_t s : members) {
            const uint8_t* row = ind.theta.data() + s * size_t(ind.total_bins);
            for (int64_t t = 0; t < ind.total_bins; ++t)
                if (row[size_t(t)]) sec.series.chi[size_t(t)] += inv;
        }
        for (int64_t t = 0; t < ind.total_bins; ++t)
            if (sec.series.chi[size_t(t)] > s_prime) sec.series.events.push_back(t);
        out.push_back(std::move(sec));
    }
    return out;
}

void write_chi_csv(const std::string& path, const MarketJumpSeries& series,
                   const TradingCalendar& cal) {
    std::string out = "date,time,chi\n";
    int bpd = cal.bins_per_day();
    for (int64_t t = 0; t < int64_t(series.chi.size()); ++t) {
        double chi = series.chi[size_t(t)];
        if (chi == 0.0) continue;  // sparse output: zero bins carry no information
        BinStamp st{int32_t(t / bpd), int32_t(t % bpd)};
        out += format_date(cal.date_of(st.day));
        out += ',';
        out += format_hhmm(cal.minute_of_bin(st.bin));
        out += ',';
        out += csv::format_double(chi);
        out += '\n';
    }
    csv::write_file(path, out);
}

std::vector<std::string> read_sector_csv(const std::string& path,
                                         const std::vector<std::string>& tickers) {
    std::string text = csv::read_file(path);
    std::map<std::string, std::string> by_ticker;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (lineno == 1) {
            if (line != "ticker,sector")
                throw input_error(path + ": expected header ticker,sector");
            return;
        }
        if (line.empty()) return;
        auto f = csv::split_line(line);
        if (f.size() != 2)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected 2 fields");
        by_ticker[f[0]] = f[1];
    });
    std::vector<std::string> out(tickers.size());
    for (size_t i = 0; i < tickers.size(); ++i) {
        auto it = by_ticker.find(tickers[i]);
        if (it == by_ticker.end())
            throw input_error(path + ": no sector for ticker " + tickers[i]);
        out[i] = it->second;
    }
    return out;
}

void write_sector_csv(const std::string& path, const std::vector<std::string>& tickers,
                      const std::vector<std::string>& sector_of_stock) {
    std::string out = "ticker,sector\n";
    for (size_t i = 0; i < tickers.size(); ++i) {
        out += csv::quote(tickers[i]);
        out += ',';
        out += csv::quote(sector_of_stock[i]);
        out += '\n';
    }
    csv::write_file(path, out);
}

} // namespace jumplab
