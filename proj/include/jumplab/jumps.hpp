#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jumplab/timebase.hpp"

namespace jumplab {

/// Trailing flat moving average of |r| per stock, aligned with panel bins.
/// m(t) covers the most recent `window` unmasked bins strictly before t and is
/// masked until `min_history` of them exist. With span_days=false the history
/// resets at each session open.
struct BaselineSeries {
    size_t n_stocks = 0;
    int64_t total_bins = 0;
    std::vector<double> m;
    std::vector<uint8_t> valid;
    int window = 120;
    int min_history = 30;
    bool span_days = true;

    double at(size_t s, int64_t t) const { return m[s * size_t(total_bins) + size_t(t)]; }
    bool ok(size_t s, int64_t t) const { return valid[s * size_t(total_bins) + size_t(t)] != 0; }
};

BaselineSeries baseline(const BarPanel& panel, int window = 120, int min_history = 30,
                        bool span_days = true);

struct JumpEvent {
    int32_t stock = 0;
    BinStamp at;
    double score = 0.0;   // |r| / m
    int8_t sign = 0;      // sign of the return
};

inline PanelEvent to_panel_event(const JumpEvent& j) { return {j.stock, j.at}; }
std::vector<PanelEvent> to_panel_events(const std::vector<JumpEvent>& jumps);

struct DetectReport {
    size_t n_degenerate = 0;  // bins with m == 0 but |r| > 0 (score undefined)
};

/// Emit every bin with |r(t)| > s * m(t), valid return and baseline required.
std::vector<JumpEvent> detect_jumps(const BarPanel& panel, const BaselineSeries& base,
                                    double s, DetectReport* report = nullptr);

/// Hill fit of the upper tail. Starts from the top max(min_tail, tail_fraction*n)
/// order statistics and extends the tail geometrically (factor 1.25) while the
/// estimate stays within one reference stderr — a flatness rule for the Hill plot.
struct TailFit {
    double exponent = 0.0;
    double stderr_ = 0.0;
    double lower = 0.0, upper = 0.0;  // score range actually used
    size_t n_tail = 0;
    bool ok = false;
    std::string refusal_reason;
};

TailFit fit_tail(std::vector<double> values, double tail_fraction = 0.05,
                 size_t min_tail = 50);

/// Hill fit over all values strictly above a fixed edge (CCDF exponent of the
/// region x > edge). Used where the tail onset is known, e.g. the chi law
/// above the detection threshold.
TailFit fit_tail_above(const std::vector<double>& values, double edge,
                       size_t min_tail = 10);

struct CcdfPoint { double score = 0.0, ccdf = 0.0; };

/// Empirical CCDF P(X > x) sampled on a logarithmic grid covering the data.
std::vector<CcdfPoint> score_ccdf(const std::vector<double>& values,
                                  int points_per_decade = 24);

/// Exhaustive, disjoint split: a jump is news-driven iff a same-stock news event
/// lies in bins [t - assoc_window, t] of the same session.
struct JumpPartition {
    std::vector<JumpEvent> news_jumps;
    std::vector<JumpEvent> endogenous;
};

JumpPartition classify_news_jumps(const std::vector<JumpEvent>& jumps,
                                  const std::vector<PanelEvent>& news,
                                  int assoc_window, int bins_per_day);

// I/O: CSV `ticker,date,time,score,sign`
void write_jump_csv(const std::string& path, const std::vector<JumpEvent>& jumps,
                    const TradingCalendar& cal, const std::vector<std::string>& tickers);
std::vector<JumpEvent> read_jump_csv(const std::string& path, const TradingCalendar& cal,
                                     const std::vector<std::string>& tickers);

void write_ccdf_csv(const std::string& path, const std::vector<CcdfPoint>& points);

} // namespace jumplab
