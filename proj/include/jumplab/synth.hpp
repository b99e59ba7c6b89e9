#pragma once

#include "jumplab/collective.hpp"
#include "jumplab/newsfeed.hpp"
#include "jumplab/taildep.hpp"
#include "jumplab/timebase.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace jumplab {

// Seeded generators with knowable truth. Identical config (seed included)
// gives identical output on every platform; each stock draws from its own
// derived stream so output is independent of threading and of unrelated
// config changes.

std::vector<std::string> synth_tickers(const std::string& prefix, size_t n);

/// Company name embedded in generated headlines; the scenario alias file maps
/// each ticker to this name.
std::string synth_alias(const std::string& ticker);

struct SynthCalendar {
    Date start{2015, 1, 5};
    int n_days = 60;
    int open_minute = 570;   // 09:30
    int close_minute = 960;  // 16:00
    TradingCalendar make() const;
};

/// A shock planted at one bin: the bar return there is forced to +-size, and
/// |r| over the following `span` bins of the same session is inflated by
/// 1 + amp * tau^{-beta}.
struct PlantedShock {
    int32_t stock = 0;
    BinStamp at;
    double size = 0.0;       // forced |return| at the shock bin
    double amp = 0.0;
    double beta = 0.5;
    int span = 120;
    std::string kind;        // label carried into the truth sidecar
};

struct ReturnGenCfg {
    uint64_t seed = 1;
    size_t n_stocks = 100;
    SynthCalendar cal;
    std::string ticker_prefix = "S";

    // |r| = scale * (U^2 w.p. 1 - tail_prob, else U^{-1/alpha}); fair sign.
    // Pareto-tailed mixture: exact tail index alpha without special functions.
    double scale = 1e-3;
    double alpha = 4.0;
    double tail_prob = 0.1;
    double max_abs_return = 0.5;   // keeps 1 + r positive

    // intraday modulation 1 + season_amp * cos(2 pi b / bins_per_day);
    // the cosine sums to zero over a session, so the factor has mean 1.
    double season_amp = 0.0;

    // volumes: round(vol_base * U^{-1/vol_alpha})
    double vol_base = 100.0;
    double vol_alpha = 1.5;

    // coupled mode: |r| = |couple_lambda * V^couple_gamma + N(0, couple_eps_sd)|
    // with V the raw volume draw. Exclusive of season/shock options.
    bool couple_volume = false;
    double couple_lambda = 1e-4;
    double couple_gamma = 0.5;
    double couple_eps_sd = 5e-4;

    // self-placed shocks: at most one per stock-session, bin uniform in
    // [shock_bin_lo, shock_bin_hi]
    double shock_prob = 0.0;
    int shock_bin_lo = 121;
    int shock_bin_hi = 260;
    double shock_size = 10.0;      // in units of `scale`
    double relax_amp = 0.0;
    double relax_beta = 0.5;
    int relax_span = 120;

    double price0 = 100.0;
};

/// Mean |r| implied by the mixture (no modulation): scale * ((1-p)/3 + p*a/(a-1)).
double expected_abs_return(const ReturnGenCfg& cfg);

/// Bar panel under the configured law. `extra` shocks (e.g. spawned from news)
/// are planted alongside the self-placed ones; `shocks_out`, if non-null,
/// receives every shock actually applied, sorted by (stock, bin).
BarPanel gen_returns(const ReturnGenCfg& cfg, const std::vector<PlantedShock>& extra = {},
                     std::vector<PlantedShock>* shocks_out = nullptr);

struct NewsGenCfg {
    uint64_t seed = 2;
    size_t n_stocks = 100;
    SynthCalendar cal;
    std::string ticker_prefix = "S";

    // Self-exciting cluster process per stock-session, continuous minutes:
    // immigrants Poisson(mu per minute) on [-warmup, bins_per_day); each event
    // spawns Poisson(branching) children at Exp(omega) forward delays. Events
    // in [0, bins_per_day) are emitted at minute bins (floor).
    double mu = 0.002;
    double branching = 0.0;
    double omega = 0.05;
    double warmup = 400.0;

    // a configured fraction of emitted events spawns a price jump 0..spawn_max_lag
    // bins later (clamped to the session)
    double coupled_fraction = 0.0;
    int spawn_max_lag = 2;

    // second feed: echoes of the primary with uniform 0..echo_max_delay bin
    // delay (dropped past the close), plus its own exclusive stories
    double echo_prob = 0.0;
    int echo_max_delay = 3;
    double exclusive_mu = 0.0;
    std::string primary_source = "DJ";
    std::string secondary_source = "RT";
};

struct NewsGenResult {
    std::vector<RawNewsRecord> primary;      // time-ordered
    std::vector<RawNewsRecord> secondary;
    std::vector<NewsEvent> truth;            // primary events, (at, stock) order
    std::vector<PanelEvent> planted_jumps;   // price jumps spawned by events
    std::vector<double> intra_session_times; // continuous event times, for law checks
};

NewsGenResult gen_news(const NewsGenCfg& cfg);

struct MarketGenCfg {
    uint64_t seed = 3;
    size_t n_stocks = 100;
    SynthCalendar cal;

    // idiosyncratic jumps: Bernoulli(idio_p) per (stock, bin), optionally with
    // an imposed intraday shape 1 + idio_shape_amp * cos(2 pi b / bins_per_day)
    double idio_p = 0.01;
    double idio_shape_amp = 0.0;

    // market events: each bin fires with prob market_rate; participation
    // fraction f is Pareto (min(1, f_min * U^{-1/nu})), a fixed f0, or each
    // stock joins independently with prob f0
    double market_rate = 0.0;
    enum class Participation { Pareto, Fixed, Bernoulli };
    Participation mode = Participation::Pareto;
    double f_min = 0.05;
    double nu = 1.5;
    double f0 = 0.5;
};

struct MarketGenResult {
    IndicatorPanel ind;
    std::vector<int64_t> market_bins;   // global bins that fired, ascending
    std::vector<double> fractions;      // intended participation per market bin
};

MarketGenResult gen_market(const MarketGenCfg& cfg);

struct TradeGenCfg {
    uint64_t seed = 4;
    SynthCalendar cal;
    std::string ticker = "SYN";
    size_t n_trades = 1000000;

    double vol_base = 100.0;
    double vol_alpha = 1.5;

    // coupled: |log return| = |lambda * V^gamma + N(0, eps_sd)|;
    // independent (or lambda = 0): |log return| = |N(0, indep_sigma)|
    bool coupled = false;
    double lambda = 1e-4;
    double gamma = 0.5;
    double eps_sd = 5e-4;
    double indep_sigma = 1e-3;

    double price0 = 100.0;
};

std::vector<TradeRecord> gen_trades(const TradeGenCfg& cfg);

} // namespace jumplab
