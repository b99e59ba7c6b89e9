#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jumplab/timebase.hpp"

namespace jumplab {

struct TradeRecord {
    std::string ticker;
    Date date;
    int second = 0;        // seconds from midnight
    double price = 0.0;
    int64_t size = 0;
};

struct PairedSample {
    enum class Resolution { Trade, Bar };
    std::vector<double> x;  // |return|
    std::vector<double> v;  // volume
    Resolution resolution = Resolution::Trade;
    size_t n_skipped = 0;   // sessions (trade) or stocks (bar) dropped
};

/// Per-stock, per-session trade-to-trade pairs: x_n = |log(p_n / p_{n-1})|,
/// v_n = size_n. Overnight pairs are dropped; sessions with fewer than two
/// trades are skipped and counted.
PairedSample trade_pairs(std::vector<TradeRecord> trades);

/// Pooled one-minute pairs from a panel. With standardize (default) each
/// stock's |r| and V are divided by their per-stock medians before pooling,
/// so cross-sectional scale differences cannot fabricate dependence.
PairedSample bar_pairs(const BarPanel& panel, bool standardize = true);

/// C(p) = |top-k(x) ∩ top-k(v)| / k with k = ceil(p n). Exceedance sets are
/// exact top-k index sets under a stable sort (ties broken by input order),
/// so both conditionals coincide by construction. ci is the Wilson 95%
/// half-width of the binomial proportion. Points with k < 10 are dropped.
struct TailCurve {
    std::vector<double> p;
    std::vector<double> c;
    std::vector<size_t> k;
    std::vector<double> ci;
    size_t n = 0;
    bool tie_warning = false;  // a retained p had a tied boundary value
};

/// Empty grid = default logarithmic grid from 0.5 down to 10/n (4 points per
/// decade, hitting exact powers of ten).
TailCurve tail_curve(const PairedSample& sample, std::vector<double> grid = {});

// I/O: tape CSV `timestamp,ticker,price,size` (ISO-8601 seconds); curve CSV `p,c,k,ci`.
std::vector<TradeRecord> read_trade_csv(const std::string& path);
void write_trade_csv(const std::string& path, const std::vector<TradeRecord>& trades);
void write_tail_csv(const std::string& path, const TailCurve& curve);

} // namespace jumplab
