#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace jumplab {

// ---------------------------------------------------------------- dates ----

struct Date {
    int y = 1970, m = 1, d = 1;
    auto operator<=>(const Date&) const = default;
};

/// Days since 1970-01-01 (proleptic Gregorian).
int to_serial(Date d);
Date from_serial(int serial);
/// 0 = Monday ... 6 = Sunday.
int weekday(Date d);

bool parse_date(std::string_view s, Date& out);       // "YYYY-MM-DD"
std::string format_date(Date d);
bool parse_hhmm(std::string_view s, int& minute);     // "HH:MM" -> minutes from midnight
std::string format_hhmm(int minute);

// ------------------------------------------------------------- calendar ----

struct BinStamp {
    int32_t day = 0;   // index into trading days
    int32_t bin = 0;   // intraday bin, [0, bins_per_day)
    auto operator<=>(const BinStamp&) const = default;
};

class TradingCalendar {
public:
    TradingCalendar(std::vector<Date> days, int open_minute = 570, int close_minute = 960);

    /// Consecutive weekdays starting at `start` (skipping Sat/Sun), n sessions.
    static TradingCalendar weekdays(Date start, int n_days,
                                    int open_minute = 570, int close_minute = 960);

    int open_minute() const { return open_; }
    int close_minute() const { return close_; }
    int bins_per_day() const { return close_ - open_; }
    int n_days() const { return static_cast<int>(days_.size()); }
    int64_t total_bins() const { return int64_t(n_days()) * bins_per_day(); }
    const std::vector<Date>& days() const { return days_; }
    Date date_of(int day) const { return days_[size_t(day)]; }

    std::optional<int> day_index(Date d) const;
    /// Intraday bin for a minutes-from-midnight time; nullopt outside the session.
    std::optional<int> bin_of_minute(int minute_of_day) const;
    int minute_of_bin(int bin) const { return open_ + bin; }

    int64_t global_bin(BinStamp s) const { return int64_t(s.day) * bins_per_day() + s.bin; }
    BinStamp stamp(int64_t global) const {
        int bpd = bins_per_day();
        return {int32_t(global / bpd), int32_t(global % bpd)};
    }

private:
    std::vector<Date> days_;
    std::unordered_map<int, int> index_;  // serial date -> day index
    int open_, close_;
};

/// A (stock, time) point — the common currency between news, jumps and panels.
struct PanelEvent {
    int32_t stock = 0;
    BinStamp at;
    auto operator<=>(const PanelEvent&) const = default;
};

// ---------------------------------------------------------------- panel ----

struct BarRecord {
    std::string ticker;
    Date date;
    int minute = 0;        // minutes from midnight
    double close = 0.0;
    int64_t volume = 0;
};

struct PanelBuildReport {
    size_t n_records = 0;
    size_t n_unknown_date = 0;
    size_t n_bad_time = 0;
    size_t n_bad_price = 0;
    size_t n_unknown_ticker = 0;
    size_t n_duplicates = 0;   // identical-payload duplicates, collapsed
};

/// Dense aligned panel: per stock, one slot per calendar bin. Missing bins are
/// masked; returns are simple relative changes within a session, first bin of
/// each day masked (overnight excluded). Immutable once finalized.
class BarPanel {
public:
    BarPanel(TradingCalendar cal, std::vector<std::string> tickers);

    size_t n_stocks() const { return tickers_.size(); }
    int64_t total_bins() const { return cal_.total_bins(); }
    const TradingCalendar& calendar() const { return cal_; }
    const std::vector<std::string>& tickers() const { return tickers_; }
    std::optional<size_t> stock_index(std::string_view ticker) const;

    bool has_bar(size_t s, int64_t t) const { return present_[idx(s, t)] != 0; }
    double close(size_t s, int64_t t) const { return close_[idx(s, t)]; }
    int64_t volume(size_t s, int64_t t) const { return volume_[idx(s, t)]; }
    bool ret_valid(size_t s, int64_t t) const { return rvalid_[idx(s, t)] != 0; }
    double ret(size_t s, int64_t t) const { return ret_[idx(s, t)]; }

    /// Construction: set bars, then finalize() exactly once to derive returns.
    void set_bar(size_t s, int64_t t, double close, int64_t volume);
    void finalize();
    bool finalized() const { return finalized_; }

    bool same_contents(const BarPanel& other) const;

private:
    size_t idx(size_t s, int64_t t) const { return s * size_t(cal_.total_bins()) + size_t(t); }

    TradingCalendar cal_;
    std::vector<std::string> tickers_;
    std::unordered_map<std::string, size_t> tick_index_;
    std::vector<double> close_, ret_;
    std::vector<int64_t> volume_;
    std::vector<uint8_t> present_, rvalid_;
    bool finalized_ = false;
};

/// Build a panel from parsed records. Rejections are counted in `report`;
/// duplicates with identical payload collapse, conflicting duplicates throw
/// (order-independence would otherwise be lost). If `universe` is given it
/// fixes the stock set; otherwise the universe is the tickers observed.
BarPanel build_panel(const std::vector<BarRecord>& bars, const TradingCalendar& cal,
                     PanelBuildReport* report = nullptr,
                     const std::vector<std::string>* universe = nullptr);

/// Inverse of build_panel: one record per present bar, ordered by (stock, bin).
std::vector<BarRecord> emit_records(const BarPanel& panel);

std::vector<BarRecord> read_bar_csv(const std::string& path);
void write_bar_csv(const std::string& path, const std::vector<BarRecord>& bars);

// ------------------------------------------------------- seasonal curves ----

/// Average intraday pattern, normalized to mean 1 (to 1e-12). Dividing a
/// contribution by curve[bin] removes the time-of-day norm.
struct SeasonalCurve {
    std::vector<double> v;
    bool is_unit = false;
    double at(int bin) const { return v[size_t(bin)]; }
    int bins() const { return int(v.size()); }
};

SeasonalCurve unit_curve(int bins_per_day);

/// Mean |r| per intraday bin over all stocks and days. Bins with no valid
/// return anywhere are linearly interpolated from their neighbors. Throws
/// refusal("empty panel") if nothing is unmasked.
SeasonalCurve intraday_abs_return_curve(const BarPanel& panel);

/// Event counts per intraday bin, normalized to mean 1. Zero-count bins stay
/// zero (absence of events is data, unlike absence of bars).
SeasonalCurve intraday_event_curve(const std::vector<PanelEvent>& events, int bins_per_day);

} // namespace jumplab
