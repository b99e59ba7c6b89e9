#include "jumplab/timebase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"

namespace jumplab {

// ---------------------------------------------------------------- dates ----

int to_serial(Date dt) {
    // Howard Hinnant's days_from_civil.
    int y = dt.y, m = dt.m, d = dt.d;
    y -= m <= 2;
    int era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = unsigned(y - era * 400);
    unsigned doy = (153u * unsigned(m + (m > 2 ? -3 : 9)) + 2) / 5 + unsigned(d) - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + int(doe) - 719468;
}

Date from_serial(int serial) {
    int z = serial + 719468;
    int era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned doe = unsigned(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int y = int(yoe) + era * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    unsigned d = doy - (153 * mp + 2) / 5 + 1;
    unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{y + (m <= 2), int(m), int(d)};
}

int weekday(Date d) {
    // serial 0 = 1970-01-01, a Thursday (index 3 with Monday = 0).
    int s = to_serial(d);
    return ((s % 7) + 7 + 3) % 7;
}

static bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

static int days_in_month(int y, int m) {
    static const int n[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && leap(y) ? 29 : n[m - 1];
}

static bool all_digits(std::string_view s) {
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return !s.empty();
}

bool parse_date(std::string_view s, Date& out) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2), ds = s.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return false;
    int y, m, d;
    csv::parse_int(ys, y);
    csv::parse_int(ms, m);
    csv::parse_int(ds, d);
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return false;
    out = Date{y, m, d};
    return true;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.y, d.m, d.d);
    return buf;
}

bool parse_hhmm(std::string_view s, int& minute) {
    if (s.size() != 5 || s[2] != ':') return false;
    std::string_view hs = s.substr(0, 2), ms = s.substr(3, 2);
    if (!all_digits(hs) || !all_digits(ms)) return false;
    int h, m;
    csv::parse_int(hs, h);
    csv::parse_int(ms, m);
    if (h > 23 || m > 59) return false;
    minute = h * 60 + m;
    return true;
}

std::string format_hhmm(int minute) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

// ------------------------------------------------------------- calendar ----

TradingCalendar::TradingCalendar(std::vector<Date> days, int open_minute, int close_minute)
    : days_(std::move(days)), open_(open_minute), close_(close_minute) {
    if (close_ <= open_) throw input_error("calendar: session_close must exceed session_open");
    if (days_.empty()) throw input_error("calendar: no trading days");
    for (size_t i = 0; i < days_.size(); ++i) {
        if (i > 0 && !(days_[i - 1] < days_[i]))
            throw input_error("calendar: trading days not strictly increasing at " +
                              format_date(days_[i]));
        index_[to_serial(days_[i])] = int(i);
    }
}

TradingCalendar TradingCalendar::weekdays(Date start, int n_days, int open_minute,
                                          int close_minute) {
    if (n_days <= 0) throw input_error("calendar: n_days must be positive");
    std::vector<Date> days;
    days.reserve(size_t(n_days));
    int s = to_serial(start);
    while (int(days.size()) < n_days) {
        Date d = from_serial(s);
        if (weekday(d) < 5) days.push_back(d);
        ++s;
    }
    return TradingCalendar(std::move(days), open_minute, close_minute);
}

std::optional<int> TradingCalendar::day_index(Date d) const {
    auto it = index_.find(to_serial(d));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> TradingCalendar::bin_of_minute(int minute_of_day) const {
    if (minute_of_day < open_ || minute_of_day >= close_) return std::nullopt;
    return minute_of_day - open_;
}

// ---------------------------------------------------------------- panel ----

BarPanel::BarPanel(TradingCalendar cal, std::vector<std::string> tickers)
    : cal_(std::move(cal)), tickers_(std::move(tickers)) {
    if (tickers_.empty()) throw input_error("panel: empty ticker universe");
    size_t total = tickers_.size() * size_t(cal_.total_bins());
    close_.assign(total, 0.0);
    ret_.assign(total, 0.0);
    volume_.assign(total, 0);
    present_.assign(total, 0);
    rvalid_.assign(total, 0);
    for (size_t i = 0; i < tickers_.size(); ++i) {
        if (!tick_index_.emplace(tickers_[i], i).second)
            throw input_error("panel: duplicate ticker " + tickers_[i]);
    }
}

std::optional<size_t> BarPanel::stock_index(std::string_view ticker) const {
    auto it = tick_index_.find(std::string(ticker));
    if (it == tick_index_.end()) return std::nullopt;
    return it->second;
}

void BarPanel::set_bar(size_t s, int64_t t, double close, int64_t volume) {
    size_t i = idx(s, t);
    close_[i] = close;
    volume_[i] = volume;
    present_[i] = 1;
}

void BarPanel::finalize() {
    int bpd = cal_.bins_per_day();
    for (size_t s = 0; s < n_stocks(); ++s) {
        for (int day = 0; day < cal_.n_days(); ++day) {
            int64_t base = int64_t(day) * bpd;
            // first bin of each day stays masked: overnight change excluded
            for (int b = 1; b < bpd; ++b) {
                size_t i = idx(s, base + b), prev = idx(s, base + b - 1);
                if (present_[i] && present_[prev]) {
                    ret_[i] = close_[i] / close_[prev] - 1.0;
                    rvalid_[i] = 1;
                }
            }
        }
    }
    finalized_ = true;
}

bool BarPanel::same_contents(const BarPanel& other) const {
    return tickers_ == other.tickers_ && cal_.days() == other.cal_.days() &&
           cal_.open_minute() == other.cal_.open_minute() &&
           cal_.close_minute() == other.cal_.close_minute() &&
           present_ == other.present_ && close_ == other.close_ &&
           volume_ == other.volume_ && rvalid_ == other.rvalid_ && ret_ == other.ret_;
}

BarPanel build_panel(const std::vector<BarRecord>& bars, const TradingCalendar& cal,
                     PanelBuildReport* report, const std::vector<std::string>* universe) {
    std::vector<std::string> tickers;
    if (universe) {
        tickers = *universe;
    } else {
        std::set<std::string> seen;
        for (const auto& b : bars) seen.insert(b.ticker);
        tickers.assign(seen.begin(), seen.end());  // sorted: record order must not matter
    }
    BarPanel panel(cal, std::move(tickers));
    PanelBuildReport rep;
    rep.n_records = bars.size();
    for (const auto& b : bars) {
        auto day = cal.day_index(b.date);
        if (!day) { ++rep.n_unknown_date; continue; }
        auto bin = cal.bin_of_minute(b.minute);
        if (!bin) { ++rep.n_bad_time; continue; }
        if (!(b.close > 0.0)) { ++rep.n_bad_price; continue; }
        auto s = panel.stock_index(b.ticker);
        if (!s) { ++rep.n_unknown_ticker; continue; }
        int64_t t = cal.global_bin({*day, *bin});
        if (panel.has_bar(*s, t)) {
            if (panel.close(*s, t) == b.close && panel.volume(*s, t) == b.volume) {
                ++rep.n_duplicates;
                continue;
            }
            throw input_error("panel: conflicting duplicate bar for " + b.ticker + " " +
                              format_date(b.date) + " " + format_hhmm(b.minute));
        }
        panel.set_bar(*s, t, b.close, b.volume);
    }
    panel.finalize();
    if (report) *report = rep;
    return panel;
}

std::vector<BarRecord> emit_records(const BarPanel& panel) {
    std::vector<BarRecord> out;
    const auto& cal = panel.calendar();
    for (size_t s = 0; s < panel.n_stocks(); ++s) {
        for (int64_t t = 0; t < panel.total_bins(); ++t) {
            if (!panel.has_bar(s, t)) continue;
            BinStamp st = cal.stamp(t);
            out.push_back({panel.tickers()[s], cal.date_of(st.day),
                           cal.minute_of_bin(st.bin), panel.close(s, t), panel.volume(s, t)});
        }
    }
    return out;
}

std::vector<BarRecord> read_bar_csv(const std::string& path) {
    std::string text = csv::read_file(path);
    std::vector<BarRecord> out;
    bool header_ok = false;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (lineno == 1) {
            if (line != "date,time,ticker,close,volume")
                throw input_error(path + ": expected header date,time,ticker,close,volume");
            header_ok = true;
            return;
        }
        if (line.empty()) return;
        auto f = csv::split_line(line);
        if (f.size() != 5)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected 5 fields");
        BarRecord r;
        int64_t vol;
        if (!parse_date(f[0], r.date) || !parse_hhmm(f[1], r.minute) ||
            !csv::parse_double(f[3], r.close) || !csv::parse_i64(f[4], vol))
            throw input_error(path + ":" + std::to_string(lineno) + ": malformed bar record");
        r.ticker = f[2];
        r.volume = vol;
        out.push_back(std::move(r));
    });
    if (!header_ok) throw input_error(path + ": empty bar file");
    return out;
}

void write_bar_csv(const std::string& path, const std::vector<BarRecord>& bars) {
    std::string out = "date,time,ticker,close,volume\n";
    char buf[64];
    for (const auto& b : bars) {
        out += format_date(b.date);
        out += ',';
        out += format_hhmm(b.minute);
        out += ',';
        out += csv::quote(b.ticker);
        out += ',';
        out += csv::format_double(b.close);
        out += ',';
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(b.volume));
        out += buf;
        out += '\n';
    }
    csv::write_file(path, out);
}

// ------------------------------------------------------- seasonal curves ----

SeasonalCurve unit_curve(int bins_per_day) {
    SeasonalCurve c;
    c.v.assign(size_t(bins_per_day), 1.0);
    c.is_unit = true;
    return c;
}

// Normalize to mean exactly 1 (two passes squeeze fp error below 1e-15).
static void normalize_mean1(std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass) {
        double sum = 0.0;
        for (double x : v) sum += x;
        double mean = sum / double(v.size());
        if (!(mean > 0.0)) throw refusal("seasonal curve: zero mean");
        for (double& x : v) x /= mean;
    }
}

SeasonalCurve intraday_abs_return_curve(const BarPanel& panel) {
    int bpd = panel.calendar().bins_per_day();
    std::vector<double> sum(size_t(bpd), 0.0);
    std::vector<int64_t> cnt(size_t(bpd), 0);
    for (size_t s = 0; s < panel.n_stocks(); ++s)
        for (int64_t t = 0; t < panel.total_bins(); ++t)
            if (panel.ret_valid(s, t)) {
                int b = int(t % bpd);
                sum[size_t(b)] += std::fabs(panel.ret(s, t));
                ++cnt[size_t(b)];
            }
    std::vector<double> v(size_t(bpd), 0.0);
    int64_t total = 0;
    for (int b = 0; b < bpd; ++b) {
        total += cnt[size_t(b)];
        v[size_t(b)] = cnt[size_t(b)] ? sum[size_t(b)] / double(cnt[size_t(b)]) : -1.0;
    }
    if (total == 0) throw refusal("empty panel");
    // fill observation-free bins by linear interpolation between neighbors,
    // clamped at the edges
    for (int b = 0; b < bpd; ++b) {
        if (v[size_t(b)] >= 0.0) continue;
        int lo = b - 1, hi = b + 1;
        while (lo >= 0 && v[size_t(lo)] < 0.0) --lo;
        while (hi < bpd && v[size_t(hi)] < 0.0) ++hi;
        if (lo < 0) v[size_t(b)] = v[size_t(hi)];
        else if (hi >= bpd) v[size_t(b)] = v[size_t(lo)];
        else {
            double w = double(b - lo) / double(hi - lo);
            v[size_t(b)] = (1.0 - w) * v[size_t(lo)] + w * v[size_t(hi)];
        }
    }
    SeasonalCurve c;
    c.v = std::move(v);
    normalize_mean1(c.v);
    return c;
}

SeasonalCurve intraday_event_curve(const std::vector<PanelEvent>& events, int bins_per_day) {
    if (events.empty()) throw refusal("no events");
    std::vector<double> v(size_t(bins_per_day), 0.0);
    for (const auto& e : events) v[size_t(e.at.bin)] += 1.0;
    SeasonalCurve c;
    c.v = std::move(v);
    normalize_mean1(c.v);
    return c;
}

} // namespace jumplab
