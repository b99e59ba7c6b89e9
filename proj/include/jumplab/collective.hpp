#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jumplab/timebase.hpp"

namespace jumplab {

/// Dense binary jump-indicator panel theta[stock][bin] with row means p.
struct IndicatorPanel {
    size_t n_stocks = 0;
    int64_t total_bins = 0;
    int bins_per_day = 0;
    std::vector<uint8_t> theta;
    std::vector<double> p;

    bool at(size_t s, int64_t t) const { return theta[s * size_t(total_bins) + size_t(t)] != 0; }
    void set(size_t s, int64_t t) { theta[s * size_t(total_bins) + size_t(t)] = 1; }
};

IndicatorPanel indicator_panel(const std::vector<PanelEvent>& jumps, size_t n_stocks,
                               int64_t total_bins, int bins_per_day);

/// Covariance of jump indicators, its standardized (correlation) form, and the
/// eigen-decomposition against the Marcenko-Pastur noise band.
struct CoJumpDecomposition {
    size_t n = 0;                      // stocks kept (p in (0,1))
    int64_t T = 0;
    std::vector<uint32_t> kept;        // original stock indices, ascending
    std::vector<double> c;             // n*n, row-major
    std::vector<double> corr;          // n*n
    std::vector<double> eigenvalues;   // descending
    std::vector<double> eigenvectors;  // column k at [k*n .. k*n+n), unit norm, sum > 0
    double mp_lo = 0.0, mp_hi = 0.0;
    bool mp_reliable = true;           // false when N >= T
    size_t n_outside_band = 0;

    /// Leading eigenvector scattered back to the full stock set (zeros for
    /// excluded stocks), ready for chi_series.
    std::vector<double> leading_full(size_t n_stocks_full) const;
};

CoJumpDecomposition cojump_matrix(const IndicatorPanel& ind,
                                  std::vector<uint32_t>* excluded = nullptr);

/// chi^t = N^{-1/2} sum_i theta_i^t v1_i with unit-norm v1; for a uniform mode
/// this is exactly the fraction of stocks jumping in the bin.
struct MarketJumpSeries {
    double threshold = 0.0;
    std::vector<double> chi;        // per global bin
    std::vector<int64_t> events;    // bins with chi > threshold, ascending
};

MarketJumpSeries chi_series(const IndicatorPanel& ind, const std::vector<double>& v1,
                            double s_prime);

/// Uniform-mode convenience: v1_i = N^{-1/2}, chi = jumping fraction.
MarketJumpSeries chi_uniform(const IndicatorPanel& ind, double s_prime);

struct ExplainedFraction {
    size_t n_jumps = 0, n_explained = 0;
    double fraction = 0.0;
};

/// Fraction of individual jumps with a market-jump bin within half_window
/// minutes (same session; half_window = 0 means the same bin).
ExplainedFraction explained_fraction(const std::vector<PanelEvent>& jumps,
                                     const std::vector<int64_t>& market_bins,
                                     int half_window, int bins_per_day);

struct SectorSeries {
    std::string label;
    size_t n_members = 0;
    MarketJumpSeries series;
};

/// Per-sector jumping-fraction series; sectors with fewer than min_members
/// stocks are skipped and reported.
std::vector<SectorSeries> sector_jumps(const IndicatorPanel& ind,
                                       const std::vector<std::string>& sector_of_stock,
                                       double s_prime, size_t min_members = 5,
                                       std::vector<std::string>* skipped = nullptr);

// I/O
void write_chi_csv(const std::string& path, const MarketJumpSeries& series,
                   const TradingCalendar& cal);
std::vector<std::string> read_sector_csv(const std::string& path,
                                         const std::vector<std::string>& tickers);
void write_sector_csv(const std::string& path, const std::vector<std::string>& tickers,
                      const std::vector<std::string>& sector_of_stock);

} // namespace jumplab
