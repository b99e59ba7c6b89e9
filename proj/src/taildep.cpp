#include "jumplab/taildep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"
#include "jumplab/stats.hpp"

namespace jumplab {

PairedSample trade_pairs(std::vector<TradeRecord> trades) {
    std::map<std::string, std::vector<const TradeRecord*>> by_ticker;
    for (const auto& t : trades) {
        if (!(t.price > 0.0))
            throw input_error("trade_pairs: non-positive price for " + t.ticker);
        by_ticker[t.ticker].push_back(&t);
    }
    PairedSample out;
    out.resolution = PairedSample::Resolution::Trade;
    for (auto& [ticker, list] : by_ticker) {
        std::stable_sort(list.begin(), list.end(), [](const TradeRecord* a, const TradeRecord* b) {
            if (a->date != b->date) return a->date < b->date;
            return a->second < b->second;
        });
        size_t i = 0;
        while (i < list.size()) {
            size_t j = i;
            while (j < list.size() && list[j]->date == list[i]->date) ++j;
            if (j - i < 2) {
                ++out.n_skipped;  // a session needs at least two trades
            } else {
                for (size_t a = i + 1; a < j; ++a) {
                    out.x.push_back(std::fabs(std::log(list[a]->price / list[a - 1]->price)));
                    out.v.push_back(double(list[a]->size));
                }
            }
            i = j;
        }
    }
    return out;
}

PairedSample bar_pairs(const BarPanel& panel, bool standardize) {
    PairedSample out;
    out.resolution = PairedSample::Resolution::Bar;
    auto median = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + long(mid), v.end());
        double hi = v[mid];
        if (v.size() % 2 == 1) return hi;
        std::nth_element(v.begin(), v.begin() + long(mid) - 1, v.end());
        return 0.5 * (v[mid - 1] + hi);
    };
    for (size_t s = 0; s < panel.n_stocks(); ++s) {
        std::vector<double> xs, vs;
        for (int64_t t = 0; t < panel.total_bins(); ++t) {
            if (!panel.ret_valid(s, t)) continue;
            xs.push_back(std::fabs(panel.ret(s, t)));
            vs.push_back(double(panel.volume(s, t)));
        }
        if (xs.empty()) { ++out.n_skipped; continue; }
        double sx = 1.0, sv = 1.0;
        if (standardize) {
            sx = median(xs);
            sv = median(vs);
            // degenerate medians fall back to means; a fully zero stock is dropped
            if (sx == 0.0) sx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
            if (sv == 0.0) sv = std::accumulate(vs.begin(), vs.end(), 0.0) / double(vs.size());
            if (sx == 0.0 || sv == 0.0) { ++out.n_skipped; continue; }
        }
        for (size_t i = 0; i < xs.size(); ++i) {
            out.x.push_back(xs[i] / sx);
            out.v.push_back(vs[i] / sv);
        }
    }
    return out;
}

TailCurve tail_curve(const PairedSample& sample, std::vector<double> grid) {
    size_t n = sample.x.size();
    if (n != sample.v.size()) throw input_error("tail_curve: length mismatch");
    if (n < 100) throw refusal("tail_curve: need at least 100 pairs, have " + std::to_string(n));
    if (grid.empty()) {
        grid.push_back(0.5);
        for (int m = 2;; ++m) {
            double p = std::pow(10.0, -double(m) / 4.0);
            if (p * double(n) < 10.0) break;
            grid.push_back(p);
        }
    }

    // rank by descending value; stable tie rule = ascending input index
    auto ranks_desc = [n](const std::vector<double>& vals) {
        std::vector<uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](uint32_t a, uint32_t b) { return vals[a] > vals[b]; });
        std::vector<uint32_t> rank(n);
        for (uint32_t pos = 0; pos < n; ++pos) rank[order[pos]] = pos;
        return std::pair(order, rank);
    };
    auto [xorder, xrank] = ranks_desc(sample.x);
    auto [vorder, vrank] = ranks_desc(sample.v);

    TailCurve curve;
    curve.n = n;
    for (double p : grid) {
        size_t k = size_t(std::ceil(p * double(n)));
        if (k < 10 || k > n) continue;
        size_t hits = 0;
        for (size_t i = 0; i < k; ++i)
            if (vrank[xorder[i]] < k) ++hits;
        curve.p.push_back(p);
        curve.k.push_back(k);
        curve.c.push_back(double(hits) / double(k));
        curve.ci.push_back(wilson_halfwidth95(hits, k));
        if (k < n && (sample.x[xorder[k - 1]] == sample.x[xorder[k]] ||
                      sample.v[vorder[k - 1]] == sample.v[vorder[k]]))
            curve.tie_warning = true;
    }
    return curve;
}

// ------------------------------------------------------------------- I/O ----

static bool parse_second_stamp(std::string_view s, Date& d, int& second) {
    // "YYYY-MM-DDTHH:MM:SS"
    if (s.size() != 19 || s[10] != 'T' || s[16] != ':') return false;
    int minute = 0;
    if (!parse_date(s.substr(0, 10), d) || !parse_hhmm(s.substr(11, 5), minute)) return false;
    int sec;
    if (!csv::parse_int(s.substr(17, 2), sec) || sec < 0 || sec > 59) return false;
    second = minute * 60 + sec;
    return true;
}

std::vector<TradeRecord> read_trade_csv(const std::string& path) {
    std::string text = csv::read_file(path);
    std::vector<TradeRecord> out;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (lineno == 1) {
            if (line != "timestamp,ticker,price,size")
                throw input_error(path + ": expected header timestamp,ticker,price,size");
            return;
        }
        if (line.empty()) return;
        auto f = csv::split_line(line);
        TradeRecord r;
        if (f.size() != 4 || !parse_second_stamp(f[0], r.date, r.second) ||
            !csv::parse_double(f[2], r.price) || !csv::parse_i64(f[3], r.size))
            throw input_error(path + ":" + std::to_string(lineno) + ": malformed trade");
        r.ticker = f[1];
        out.push_back(std::move(r));
    });
    return out;
}

void write_trade_csv(const std::string& path, const std::vector<TradeRecord>& trades) {
    std::string out = "timestamp,ticker,price,size\n";
    char buf[96];
    for (const auto& t : trades) {
        std::snprintf(buf, sizeof buf, "%sT%s:%02d,%s,", format_date(t.date).c_str(),
                      format_hhmm(t.second / 60).c_str(), t.second % 60,
                      csv::quote(t.ticker).c_str());
        out += buf;
        out += csv::format_double(t.price);
        out += ',';
        out += std::to_string(t.size);
        out += '\n';
    }
    csv::write_file(path, out);
}

void write_tail_csv(const std::string& path, const TailCurve& curve) {
    std::string out = "p,c,k,ci\n";
    for (size_t i = 0; i < curve.p.size(); ++i) {
        out += csv::format_double(curve.p[i]);
        out += ',';
        out += csv::format_double(curve.c[i]);
        out += ',';
        out += std::to_string(curve.k[i]);
        out += ',';
        out += csv::format_double(curve.ci[i]);
        out += '\n';
    }
    csv::write_file(path, out);
}

} // namespace jumplab
