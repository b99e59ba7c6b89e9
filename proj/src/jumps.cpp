#include "jumplab/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"
#include "jumplab/parallel.hpp"
#include "jumplab/stats.hpp"

namespace jumplab {

BaselineSeries baseline(const BarPanel& panel, int window, int min_history, bool span_days) {
    if (window < min_history || min_history < 1)
        throw input_error("baseline: need window >= min_history >= 1");
    BaselineSeries out;
    out.n_stocks = panel.n_stocks();
    out.total_bins = panel.total_bins();
    out.window = window;
    out.min_history = min_history;
    out.span_days = span_days;
    out.m.assign(out.n_stocks * size_t(out.total_bins), 0.0);
    out.valid.assign(out.n_stocks * size_t(out.total_bins), 0);

    int bpd = panel.calendar().bins_per_day();
    parallel_for(out.n_stocks, [&](size_t s) {
        std::vector<double> ring(size_t(window), 0.0);
        size_t head = 0, count = 0;
        double sum = 0.0;
        for (int64_t t = 0; t < out.total_bins; ++t) {
            if (!span_days && t % bpd == 0) { head = 0; count = 0; sum = 0.0; }
            if (count >= size_t(min_history)) {
                size_t i = s * size_t(out.total_bins) + size_t(t);
                out.m[i] = sum / double(count);
                out.valid[i] = 1;
            }
            if (panel.ret_valid(s, t)) {
                double a = std::fabs(panel.ret(s, t));
                if (count == size_t(window)) sum -= ring[head];
                else ++count;
                ring[head] = a;
                sum += a;
                head = (head + 1) % size_t(window);
                // periodic exact refresh keeps the running sum from drifting
                if (t % bpd == bpd - 1) {
                    sum = 0.0;
                    for (size_t j = 0; j < count; ++j) sum += ring[j];
                }
            }
        }
    });
    return out;
}

std::vector<PanelEvent> to_panel_events(const std::vector<JumpEvent>& jumps) {
    std::vector<PanelEvent> out;
    out.reserve(jumps.size());
    for (const auto& j : jumps) out.push_back(to_panel_event(j));
    return out;
}

std::vector<JumpEvent> detect_jumps(const BarPanel& panel, const BaselineSeries& base,
                                    double s, DetectReport* report) {
    if (!(s > 1.0)) throw input_error("detect_jumps: threshold s must exceed 1");
    if (base.n_stocks != panel.n_stocks() || base.total_bins != panel.total_bins())
        throw input_error("detect_jumps: baseline does not match panel");
    std::vector<std::vector<JumpEvent>> per_stock(panel.n_stocks());
    std::vector<size_t> degenerate(panel.n_stocks(), 0);
    const auto& cal = panel.calendar();
    parallel_for(panel.n_stocks(), [&](size_t st) {
        auto& mine = per_stock[st];
        for (int64_t t = 0; t < panel.total_bins(); ++t) {
            if (!panel.ret_valid(st, t) || !base.ok(st, t)) continue;
            double r = panel.ret(st, t), a = std::fabs(r), m = base.at(st, t);
            if (m <= 0.0) {
                if (a > 0.0) ++degenerate[st];
                continue;
            }
            if (a > s * m)
                mine.push_back({int32_t(st), cal.stamp(t), a / m,
                                int8_t(r > 0 ? 1 : -1)});
        }
    });
    std::vector<JumpEvent> out;
    size_t dg = 0;
    for (size_t st = 0; st < per_stock.size(); ++st) {
        out.insert(out.end(), per_stock[st].begin(), per_stock[st].end());
        dg += degenerate[st];
    }
    if (report) report->n_degenerate = dg;
    return out;
}

TailFit fit_tail(std::vector<double> values, double tail_fraction, size_t min_tail) {
    TailFit fit;
    std::erase_if(values, [](double v) { return !(v > 0.0); });
    std::sort(values.begin(), values.end(), std::greater<>());
    size_t n = values.size();
    if (n < min_tail) {
        fit.refusal_reason = "insufficient tail: " + std::to_string(n) + " positive values, need " +
                             std::to_string(min_tail);
        return fit;
    }
    size_t k0 = std::max(min_tail, size_t(std::ceil(tail_fraction * double(n))));
    k0 = std::min(k0, n);
    HillPoint ref = hill_at(values, k0);
    if (ref.alpha <= 0.0) {
        fit.refusal_reason = "zero Hill spread: top-" + std::to_string(k0) +
                             " values are degenerate";
        return fit;
    }
    size_t k = k0;
    for (;;) {
        size_t next = std::min(n, size_t(std::ceil(double(k) * 1.25)));
        if (next == k) break;
        HillPoint h = hill_at(values, next);
        if (h.alpha <= 0.0 || std::fabs(h.alpha - ref.alpha) > ref.stderr_) break;
        k = next;
    }
    HillPoint h = hill_at(values, k);
    fit.exponent = h.alpha;
    fit.stderr_ = h.stderr_;
    fit.n_tail = k;
    fit.lower = values[k - 1];
    fit.upper = values[0];
    fit.ok = true;
    return fit;
}

TailFit fit_tail_above(const std::vector<double>& values, double edge, size_t min_tail) {
    TailFit fit;
    if (!(edge > 0.0)) throw input_error("fit_tail_above: edge must be positive");
    double sum = 0.0, top = 0.0;
    size_t k = 0;
    for (double v : values)
        if (v > edge) {
            sum += std::log(v / edge);
            top = std::max(top, v);
            ++k;
        }
    if (k < min_tail) {
        fit.refusal_reason = "insufficient tail: " + std::to_string(k) + " values above edge, need " +
                             std::to_string(min_tail);
        return fit;
    }
    double gamma = sum / double(k);
    if (!(gamma > 0.0)) {
        fit.refusal_reason = "zero Hill spread: values above edge are degenerate";
        return fit;
    }
    fit.exponent = 1.0 / gamma;
    fit.stderr_ = fit.exponent / std::sqrt(double(k));
    fit.n_tail = k;
    fit.lower = edge;
    fit.upper = top;
    fit.ok = true;
    return fit;
}

std::vector<CcdfPoint> score_ccdf(const std::vector<double>& values, int points_per_decade) {
    std::vector<double> xs(values);
    std::erase_if(xs, [](double v) { return !(v > 0.0); });
    if (xs.empty()) throw refusal("score_ccdf: no positive values");
    std::sort(xs.begin(), xs.end());
    double lo = xs.front(), hi = xs.back();
    int j0 = int(std::floor(std::log10(lo) * points_per_decade));
    int j1 = int(std::ceil(std::log10(hi) * points_per_decade));
    std::vector<CcdfPoint> out;
    double n = double(xs.size());
    for (int j = j0; j <= j1; ++j) {
        double x = std::pow(10.0, double(j) / points_per_decade);
        size_t above = xs.end() - std::upper_bound(xs.begin(), xs.end(), x);
        if (above == 0) break;
        if (x < lo) continue;
        out.push_back({x, double(above) / n});
    }
    return out;
}

JumpPartition classify_news_jumps(const std::vector<JumpEvent>& jumps,
                                  const std::vector<PanelEvent>& news,
                                  int assoc_window, int bins_per_day) {
    if (assoc_window < 0) throw input_error("classify_news_jumps: negative window");
    std::unordered_set<int64_t> slots;
    slots.reserve(news.size() * 2);
    auto key = [bins_per_day](int32_t stock, int32_t day, int32_t bin) {
        return (int64_t(stock) << 40) | (int64_t(day) * bins_per_day + bin);
    };
    for (const auto& e : news) slots.insert(key(e.stock, e.at.day, e.at.bin));
    JumpPartition part;
    for (const auto& j : jumps) {
        bool hit = false;
        for (int d = 0; d <= assoc_window && !hit; ++d) {
            int b = j.at.bin - d;
            if (b < 0) break;  // same session only
            hit = slots.count(key(j.stock, j.at.day, b)) != 0;
        }
        (hit ? part.news_jumps : part.endogenous).push_back(j);
    }
    return part;
}

void write_jump_csv(const std::string& path, const std::vector<JumpEvent>& jumps,
                    const TradingCalendar& cal, const std::vector<std::string>& tickers) {
    std::string out = "ticker,date,time,score,sign\n";
    char buf[64];
    for (const auto& j : jumps) {
        out += csv::quote(tickers[size_t(j.stock)]);
        out += ',';
        out += format_date(cal.date_of(j.at.day));
        out += ',';
        out += format_hhmm(cal.minute_of_bin(j.at.bin));
        out += ',';
        out += csv::format_double(j.score);
        out += ',';
        out += j.sign >= 0 ? '+' : '-';
        out += '\n';
    }
    csv::write_file(path, out);
}

std::vector<JumpEvent> read_jump_csv(const std::string& path, const TradingCalendar& cal,
                                     const std::vector<std::string>& tickers) {
    std::unordered_map<std::string, int32_t> index;
    for (size_t i = 0; i < tickers.size(); ++i) index[tickers[i]] = int32_t(i);
    std::string text = csv::read_file(path);
    std::vector<JumpEvent> out;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (lineno == 1) {
            if (line != "ticker,date,time,score,sign")
                throw input_error(path + ": expected header ticker,date,time,score,sign");
            return;
        }
        if (line.empty()) return;
        auto f = csv::split_line(line);
        if (f.size() != 5)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected 5 fields");
        auto it = index.find(f[0]);
        Date d;
        int minute;
        double score;
        if (it == index.end() || !parse_date(f[1], d) || !parse_hhmm(f[2], minute) ||
            !csv::parse_double(f[3], score) || f[4].size() != 1 ||
            (f[4][0] != '+' && f[4][0] != '-'))
            throw input_error(path + ":" + std::to_string(lineno) + ": malformed jump record");
        auto day = cal.day_index(d);
        auto bin = cal.bin_of_minute(minute);
        if (!day || !bin)
            throw input_error(path + ":" + std::to_string(lineno) + ": stamp outside calendar");
        out.push_back({it->second, {*day, *bin}, score, int8_t(f[4][0] == '+' ? 1 : -1)});
    });
    return out;
}

void write_ccdf_csv(const std::string& path, const std::vector<CcdfPoint>& points) {
    std::string out = "score,ccdf\n";
    for (const auto& p : points) {
        out += csv::format_double(p.score);
        out += ',';
        out += csv::format_double(p.ccdf);
        out += '\n';
    }
    csv::write_file(path, out);
}

} // namespace jumplab
