#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jumplab {

/// Effective parameters of one pipeline run. Keys are dotted `section.name`
/// strings (the config file groups them by [section]); every key is listed in
/// config_keys() with its type and help text. Paths left empty default to the
/// conventional artifact names under paths.out.
struct RunConfig {
    // [paths]
    std::string bars, trades, news_primary, news_secondary;
    std::string sectors, aliases, blocklist, universe;
    std::string out = "out";

    // [calendar] n_days = 0 derives the session list from the bar file
    std::string cal_start = "2015-01-05";
    int64_t cal_days = 0;
    std::string cal_open = "09:30";
    std::string cal_close = "16:00";

    // [ingest]
    int64_t merge_window = 15;
    int64_t merge_silence = 30;

    // [detect-jumps]
    double s = 4.0;
    int64_t baseline_window = 120;
    int64_t min_history = 30;
    bool baseline_span_days = true;
    int64_t assoc_window = 2;
    double tail_fraction = 0.01;
    int64_t ccdf_ppd = 24;

    // [event-study]
    int64_t vol_max_lag = 120;
    int64_t rate_max_lag = 40;
    int64_t fit_tau_max = 120;
    int64_t prepost_inner = 30;

    // [collective]
    double s_prime = 0.1;
    std::string chi_mode = "eigen";   // eigen | uniform
    int64_t half_window = 3;
    int64_t min_members = 5;

    // [taildep]
    std::string tail_grid;            // comma-separated probabilities; empty = default
    bool tail_standardize = true;

    // [synth] — the default oracle scenario
    uint64_t seed = 42;
    int64_t n_stocks = 100;
    int64_t n_days = 60;
    double alpha_r = 4.0;
    double ret_scale = 1e-3;
    double ret_tail_prob = 0.1;
    double season_amp = 0.3;
    double vol_base = 100.0;
    double vol_alpha = 1.5;
    double shock_prob = 0.2;          // endogenous shocks, per stock-session
    double shock_size = 10.0;         // minimum |return|, units of ret_scale
    double relax_amp = 3.0;
    double relax_beta = 0.5;
    int64_t relax_span = 120;
    double news_mu = 0.002;
    double news_branching = 0.3;
    double news_omega = 0.05;
    double coupled_fraction = 0.3;
    double news_jump_size = 8.0;
    double news_relax_amp = 3.0;
    double news_relax_beta = 1.0;
    double echo_prob = 0.4;
    int64_t echo_max_delay = 3;
    double exclusive_mu = 0.0005;
    double market_rate = 0.001;
    double market_fmin = 0.05;
    double market_nu = 1.5;
    double market_jump_size = 6.0;
    int64_t n_trades = 500000;
    bool trades_coupled = true;
    double trade_lambda = 1e-4;
    double trade_gamma = 0.5;
    double trade_eps_sd = 5e-4;
    double trade_sigma = 1e-3;
    int64_t n_sectors = 5;
};

struct ConfigKeyInfo {
    std::string key;    // dotted name, e.g. "detect-jumps.s"
    std::string type;   // string | int | uint | float | bool
    std::string help;
};

const std::vector<ConfigKeyInfo>& config_keys();

/// Set/get one parameter by dotted key. Unknown key or unparseable value
/// throws input_error naming the key.
void config_set(RunConfig& cfg, const std::string& key, const std::string& value);
std::string config_get(const RunConfig& cfg, const std::string& key);

/// Sectioned key-value file: `[section]` headers, `key = value` lines,
/// '#'/';' comments, UTF-8. Values land in the matching dotted keys.
void load_config_file(RunConfig& cfg, const std::string& path);

/// `key=value` override (same dotted names), as given on the command line.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Execute one subcommand (ingest | detect-jumps | event-study | collective |
/// taildep | synth | report). Writes the command's artifacts plus
/// manifest_<command>.json under paths.out and returns the paths written.
/// Throws input_error (bad input/parameter) or refusal (analysis refused).
std::vector<std::string> run_command(const std::string& command, const RunConfig& cfg);

const char* version_string();

} // namespace jumplab
