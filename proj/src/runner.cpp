#include "jumplab/runner.hpp"

#include "jumplab/collective.hpp"
#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"
#include "jumplab/eventstudy.hpp"
#include "jumplab/jumps.hpp"
#include "jumplab/newsfeed.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/sha256.hpp"
#include "jumplab/synth.hpp"
#include "jumplab/taildep.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <type_traits>
#include <variant>

namespace jumplab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const char* version_string() { return "0.1.0"; }

// ------------------------------------------------------------- config ----

namespace {

using Field = std::variant<std::string RunConfig::*, int64_t RunConfig::*,
                           uint64_t RunConfig::*, double RunConfig::*, bool RunConfig::*>;

struct Entry {
    const char* key;
    Field field;
    const char* help;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> t = {
        {"paths.bars", &RunConfig::bars, "minute bar CSV (default <out>/bars.csv)"},
        {"paths.trades", &RunConfig::trades, "trade tape CSV (default <out>/trades.csv)"},
        {"paths.news_primary", &RunConfig::news_primary, "primary news CSV (default <out>/news_dj.csv)"},
        {"paths.news_secondary", &RunConfig::news_secondary, "secondary news CSV (default <out>/news_rt.csv)"},
        {"paths.sectors", &RunConfig::sectors, "ticker,sector CSV (default <out>/sectors.csv)"},
        {"paths.aliases", &RunConfig::aliases, "TICKER=name|name alias file (default <out>/aliases.txt)"},
        {"paths.blocklist", &RunConfig::blocklist, "headline blocklist, one substring per line (default <out>/blocklist.txt)"},
        {"paths.universe", &RunConfig::universe, "universe file, one ticker per line (default: tickers observed in bars)"},
        {"paths.out", &RunConfig::out, "output directory for all artifacts"},
        {"calendar.start", &RunConfig::cal_start, "first session date YYYY-MM-DD (used when n_days > 0 and by synth)"},
        {"calendar.n_days", &RunConfig::cal_days, "number of weekday sessions; 0 = derive sessions from the bar file"},
        {"calendar.open", &RunConfig::cal_open, "session open HH:MM"},
        {"calendar.close", &RunConfig::cal_close, "session close HH:MM"},
        {"ingest.merge_window", &RunConfig::merge_window, "max |delay| in minutes for cross-feed story matching"},
        {"ingest.merge_silence", &RunConfig::merge_silence, "quiet minutes required before a pair enters the delay histogram"},
        {"detect-jumps.s", &RunConfig::s, "jump threshold: |r| > s * baseline"},
        {"detect-jumps.baseline_window", &RunConfig::baseline_window, "trailing |r| bins averaged for the baseline"},
        {"detect-jumps.min_history", &RunConfig::min_history, "bins of history before the baseline is usable"},
        {"detect-jumps.baseline_span_days", &RunConfig::baseline_span_days, "carry baseline history across sessions"},
        {"detect-jumps.assoc_window", &RunConfig::assoc_window, "a jump is news-driven if news precedes it by <= this many bins"},
        {"detect-jumps.tail_fraction", &RunConfig::tail_fraction,
         "starting tail fraction of the Hill fit; the fit extends deeper while the estimate stays flat"},
        {"detect-jumps.ccdf_ppd", &RunConfig::ccdf_ppd, "CCDF grid points per decade"},
        {"event-study.vol_max_lag", &RunConfig::vol_max_lag, "volatility profile half-width in bins"},
        {"event-study.rate_max_lag", &RunConfig::rate_max_lag, "rate profile half-width in bins"},
        {"event-study.fit_tau_max", &RunConfig::fit_tau_max, "largest lag entering the relaxation fit"},
        {"event-study.prepost_inner", &RunConfig::prepost_inner, "inner lag excluded from the pre/post means"},
        {"collective.s_prime", &RunConfig::s_prime, "market-jump threshold on chi"},
        {"collective.chi_mode", &RunConfig::chi_mode, "chi weights: eigen (leading eigenvector) or uniform"},
        {"collective.half_window", &RunConfig::half_window, "largest half-window in the explained-fraction table"},
        {"collective.min_members", &RunConfig::min_members, "smallest sector kept in the sector series"},
        {"taildep.grid", &RunConfig::tail_grid, "comma-separated p grid; empty = log grid 0.5 down to 10/n"},
        {"taildep.standardize", &RunConfig::tail_standardize, "divide bar |r| and V by per-stock medians before pooling"},
        {"synth.seed", &RunConfig::seed, "master seed; every stream derives from it"},
        {"synth.n_stocks", &RunConfig::n_stocks, "stocks in the generated universe"},
        {"synth.n_days", &RunConfig::n_days, "generated weekday sessions"},
        {"synth.alpha_r", &RunConfig::alpha_r, "return tail exponent"},
        {"synth.ret_scale", &RunConfig::ret_scale, "return magnitude scale"},
        {"synth.ret_tail_prob", &RunConfig::ret_tail_prob, "weight of the Pareto component in |r|"},
        {"synth.season_amp", &RunConfig::season_amp, "intraday cosine modulation amplitude"},
        {"synth.vol_base", &RunConfig::vol_base, "volume scale"},
        {"synth.vol_alpha", &RunConfig::vol_alpha, "volume tail exponent"},
        {"synth.shock_prob", &RunConfig::shock_prob, "endogenous shock probability per stock-session"},
        {"synth.shock_size", &RunConfig::shock_size, "minimum endogenous shock |return|, units of ret_scale"},
        {"synth.relax_amp", &RunConfig::relax_amp, "relaxation amplitude after endogenous shocks"},
        {"synth.relax_beta", &RunConfig::relax_beta, "relaxation exponent after endogenous shocks"},
        {"synth.relax_span", &RunConfig::relax_span, "bins the relaxation lasts"},
        {"synth.news_mu", &RunConfig::news_mu, "news immigrant rate per stock-minute"},
        {"synth.news_branching", &RunConfig::news_branching, "news self-excitation branching ratio"},
        {"synth.news_omega", &RunConfig::news_omega, "news kernel decay per minute"},
        {"synth.coupled_fraction", &RunConfig::coupled_fraction, "fraction of news spawning a price jump"},
        {"synth.news_jump_size", &RunConfig::news_jump_size, "minimum news-jump |return|, units of ret_scale"},
        {"synth.news_relax_amp", &RunConfig::news_relax_amp, "relaxation amplitude after news jumps"},
        {"synth.news_relax_beta", &RunConfig::news_relax_beta, "relaxation exponent after news jumps"},
        {"synth.echo_prob", &RunConfig::echo_prob, "probability a primary story echoes in the secondary feed"},
        {"synth.echo_max_delay", &RunConfig::echo_max_delay, "largest echo delay in minutes"},
        {"synth.exclusive_mu", &RunConfig::exclusive_mu, "secondary-only story rate per stock-minute"},
        {"synth.market_rate", &RunConfig::market_rate, "market co-jump probability per bin"},
        {"synth.market_fmin", &RunConfig::market_fmin, "smallest market participation fraction"},
        {"synth.market_nu", &RunConfig::market_nu, "participation fraction tail exponent"},
        {"synth.market_jump_size", &RunConfig::market_jump_size, "minimum market co-jump |return|, units of ret_scale"},
        {"synth.n_trades", &RunConfig::n_trades, "rows in the generated trade tape"},
        {"synth.trades_coupled", &RunConfig::trades_coupled, "couple trade returns to volume"},
        {"synth.trade_lambda", &RunConfig::trade_lambda, "coupling coefficient lambda"},
        {"synth.trade_gamma", &RunConfig::trade_gamma, "coupling exponent on volume"},
        {"synth.trade_eps_sd", &RunConfig::trade_eps_sd, "coupling noise standard deviation"},
        {"synth.trade_sigma", &RunConfig::trade_sigma, "independent-mode |log return| scale"},
        {"synth.n_sectors", &RunConfig::n_sectors, "sectors assigned round-robin"},
    };
    return t;
}

const Entry& find_entry(const std::string& key) {
    for (const Entry& e : entries())
        if (key == e.key) return e;
    throw input_error("unknown parameter: " + key);
}

std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string_view::npos) return {};
    size_t b = s.find_last_not_of(" \t");
    return std::string(s.substr(a, b - a + 1));
}

std::string num(double v) { return csv::format_double(v); }

} // namespace

const std::vector<ConfigKeyInfo>& config_keys() {
    static const std::vector<ConfigKeyInfo> keys = [] {
        std::vector<ConfigKeyInfo> out;
        for (const Entry& e : entries()) {
            const char* type = std::visit(
                [](auto p) {
                    using T = std::remove_cvref_t<decltype(std::declval<RunConfig>().*p)>;
                    if constexpr (std::is_same_v<T, std::string>) return "string";
                    else if constexpr (std::is_same_v<T, int64_t>) return "int";
                    else if constexpr (std::is_same_v<T, uint64_t>) return "uint";
                    else if constexpr (std::is_same_v<T, double>) return "float";
                    else return "bool";
                },
                e.field);
            out.push_back({e.key, type, e.help});
        }
        return out;
    }();
    return keys;
}

void config_set(RunConfig& cfg, const std::string& key, const std::string& value) {
    const Entry& e = find_entry(key);
    auto bad = [&] { return input_error("parameter " + key + ": cannot parse '" + value + "'"); };
    std::visit(
        [&](auto p) {
            using T = std::remove_cvref_t<decltype(cfg.*p)>;
            if constexpr (std::is_same_v<T, std::string>) {
                cfg.*p = value;
            } else if constexpr (std::is_same_v<T, int64_t>) {
                int64_t v;
                if (!csv::parse_i64(value, v)) throw bad();
                cfg.*p = v;
            } else if constexpr (std::is_same_v<T, uint64_t>) {
                uint64_t v;
                if (!csv::parse_u64(value, v)) throw bad();
                cfg.*p = v;
            } else if constexpr (std::is_same_v<T, double>) {
                double v;
                if (!csv::parse_double(value, v)) throw bad();
                cfg.*p = v;
            } else {
                if (value == "true" || value == "1" || value == "yes") cfg.*p = true;
                else if (value == "false" || value == "0" || value == "no") cfg.*p = false;
                else throw bad();
            }
        },
        e.field);
}

std::string config_get(const RunConfig& cfg, const std::string& key) {
    const Entry& e = find_entry(key);
    return std::visit(
        [&](auto p) -> std::string {
            using T = std::remove_cvref_t<decltype(cfg.*p)>;
            if constexpr (std::is_same_v<T, std::string>) return cfg.*p;
            else if constexpr (std::is_same_v<T, int64_t>) return std::to_string(cfg.*p);
            else if constexpr (std::is_same_v<T, uint64_t>) return std::to_string(cfg.*p);
            else if constexpr (std::is_same_v<T, double>) return num(cfg.*p);
            else return cfg.*p ? "true" : "false";
        },
        e.field);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    if (!fs::exists(path)) throw input_error("missing config file: " + path);
    std::string text = csv::read_file(path);
    std::string section;
    csv::for_each_line(text, [&](size_t lineno, std::string_view raw) {
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') return;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw input_error(path + ":" + std::to_string(lineno) + ": unterminated section");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            return;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        config_set(cfg, section.empty() ? key : section + "." + key, value);
    });
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw input_error("override must be key=value: " + assignment);
    config_set(cfg, trim(std::string_view(assignment).substr(0, eq)),
               trim(std::string_view(assignment).substr(eq + 1)));
}

// ------------------------------------------------------------ plumbing ----

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out) / name).string();
}

void write_json(const std::string& path, const ordered_json& j) {
    csv::write_file(path, j.dump(2) + "\n");
}

ordered_json read_json(const std::string& path) {
    try {
        return ordered_json::parse(csv::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path + ": " + e.what());
    }
}

/// Records inputs/outputs and writes manifest_<command>.json: parameters are
/// the effective merged config, files are digested by content.
class Manifest {
public:
    Manifest(std::string command, const RunConfig& cfg)
        : command_(std::move(command)), cfg_(&cfg),
          t0_(std::chrono::steady_clock::now()) {}

    void input(const std::string& path) {
        if (!inputs_.count(path)) inputs_[path] = sha256_file(path);
    }
    void output(const std::string& path) { outputs_.push_back(path); }

    std::string write() {
        ordered_json j;
        j["command"] = command_;
        j["schema_version"] = 1;
        j["software"] = {{"jumplab", version_string()}};
        ordered_json params;
        for (const Entry& e : entries()) params[e.key] = config_get(*cfg_, e.key);
        j["parameters"] = std::move(params);
        ordered_json in;
        for (auto& [p, h] : inputs_) in[p] = h;
        j["inputs"] = std::move(in);
        ordered_json outj;
        for (auto& p : outputs_) outj[p] = sha256_file(p);
        j["outputs"] = std::move(outj);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        j["timing"] = {{"wall_seconds", wall}};
        std::string path = out_path(*cfg_, "manifest_" + command_ + ".json");
        write_json(path, j);
        return path;
    }

private:
    std::string command_;
    const RunConfig* cfg_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point t0_;
};

std::string require_input(const std::string& path) {
    if (!fs::exists(path)) throw input_error("missing input: " + path);
    return path;
}

/// Resolve an optional input: an explicitly configured path must exist; an
/// empty config falls back to the conventional artifact name, used only if
/// present.
bool optional_input(const std::string& configured, const RunConfig& cfg,
                    const std::string& def_name, std::string& path) {
    if (!configured.empty()) {
        path = require_input(configured);
        return true;
    }
    path = out_path(cfg, def_name);
    return fs::exists(path);
}

int parse_minute(const std::string& s, const char* key) {
    int m;
    if (!parse_hhmm(s, m)) throw input_error(std::string("parameter ") + key + ": expected HH:MM");
    return m;
}

Date parse_day(const std::string& s, const char* key) {
    Date d;
    if (!parse_date(s, d)) throw input_error(std::string("parameter ") + key + ": expected YYYY-MM-DD");
    return d;
}

TradingCalendar make_calendar(const RunConfig& cfg, const std::vector<BarRecord>* bars) {
    int open = parse_minute(cfg.cal_open, "calendar.open");
    int close = parse_minute(cfg.cal_close, "calendar.close");
    if (cfg.cal_days > 0)
        return TradingCalendar::weekdays(parse_day(cfg.cal_start, "calendar.start"),
                                         int(cfg.cal_days), open, close);
    if (!bars) throw input_error("parameter calendar.n_days: required for this command");
    std::set<Date> days;
    for (const BarRecord& b : *bars) days.insert(b.date);
    if (days.empty()) throw input_error("bar file has no records");
    return TradingCalendar(std::vector<Date>(days.begin(), days.end()), open, close);
}

std::vector<std::string> read_universe_file(const std::string& path) {
    std::vector<std::string> out;
    std::string text = csv::read_file(path);
    csv::for_each_line(text, [&](size_t, std::string_view raw) {
        std::string line = trim(raw);
        if (!line.empty() && line[0] != '#') out.push_back(line);
    });
    if (out.empty()) throw input_error("universe file has no tickers: " + path);
    return out;
}

BarPanel load_panel(const RunConfig& cfg, Manifest& mf, PanelBuildReport* rep = nullptr) {
    std::string p = require_input(cfg.bars.empty() ? out_path(cfg, "bars.csv") : cfg.bars);
    mf.input(p);
    std::vector<BarRecord> records = read_bar_csv(p);
    TradingCalendar cal = make_calendar(cfg, &records);
    std::vector<std::string> universe;
    if (!cfg.universe.empty()) {
        mf.input(require_input(cfg.universe));
        universe = read_universe_file(cfg.universe);
    }
    return build_panel(records, cal, rep, universe.empty() ? nullptr : &universe);
}

std::vector<JumpEvent> load_jumps(const RunConfig& cfg, Manifest& mf, const TradingCalendar& cal,
                                  const std::vector<std::string>& tickers) {
    std::string p = out_path(cfg, "jumps.csv");
    if (!fs::exists(p)) throw input_error("missing input: " + p + " (run detect-jumps first)");
    mf.input(p);
    return read_jump_csv(p, cal, tickers);
}

ordered_json filter_report_json(const FilterReport& r) {
    return {{"records", r.n_records},
            {"repeat_story_removed", r.n_avalanche_removed},
            {"blocklisted", r.n_blocklisted},
            {"out_of_session", r.n_out_of_session},
            {"unknown_ticker", r.n_unknown_ticker},
            {"no_name_match", r.n_no_name_match},
            {"events", r.n_events}};
}

ordered_json fit_json(const RelaxFit& f) {
    return {{"beta", f.beta},
            {"amplitude", f.amplitude},
            {"sigma_inf", f.sigma_inf},
            {"residual", f.residual},
            {"tau_range", {f.tau_min, f.tau_max}}};
}

// ------------------------------------------------------------ commands ----

std::vector<std::string> cmd_synth(const RunConfig& cfg, Manifest& mf) {
    if (cfg.n_stocks <= 0 || cfg.n_days <= 0)
        throw input_error("parameter synth.n_stocks/n_days: must be positive");
    SynthCalendar scal{parse_day(cfg.cal_start, "calendar.start"), int(cfg.n_days),
                       parse_minute(cfg.cal_open, "calendar.open"),
                       parse_minute(cfg.cal_close, "calendar.close")};
    TradingCalendar cal = scal.make();
    const int bpd = cal.bins_per_day();
    const size_t n = size_t(cfg.n_stocks);
    std::vector<std::string> tickers = synth_tickers("S", n);

    NewsGenCfg ncfg;
    ncfg.seed = cfg.seed + 1;
    ncfg.n_stocks = n;
    ncfg.cal = scal;
    ncfg.mu = cfg.news_mu;
    ncfg.branching = cfg.news_branching;
    ncfg.omega = cfg.news_omega;
    ncfg.coupled_fraction = cfg.coupled_fraction;
    ncfg.echo_prob = cfg.echo_prob;
    ncfg.echo_max_delay = int(cfg.echo_max_delay);
    ncfg.exclusive_mu = cfg.exclusive_mu;
    NewsGenResult news = gen_news(ncfg);

    // planted shocks: Pareto(alpha_r)-sized so the score tail keeps the
    // configured exponent, minimum size per class
    std::vector<PlantedShock> shocks;
    Rng root(cfg.seed);
    Rng srng = root.child(0x73686f636bull);   // endogenous placement + all sizes
    const int lo = bpd / 3, hi = 2 * bpd / 3;
    for (size_t st = 0; st < n; ++st)
        for (int d = 0; d < cal.n_days(); ++d)
            if (srng.bernoulli(cfg.shock_prob))
                shocks.push_back({int32_t(st), {d, lo + int(srng.below(uint64_t(hi - lo + 1)))},
                                  cfg.ret_scale * cfg.shock_size * srng.pareto(cfg.alpha_r),
                                  cfg.relax_amp, cfg.relax_beta, int(cfg.relax_span), "endo"});
    for (const PanelEvent& pj : news.planted_jumps)
        shocks.push_back({pj.stock, pj.at,
                          cfg.ret_scale * cfg.news_jump_size * srng.pareto(cfg.alpha_r),
                          cfg.news_relax_amp, cfg.news_relax_beta, int(cfg.relax_span), "news"});

    std::vector<std::pair<int64_t, double>> market_bins;   // (global bin, fraction)
    if (cfg.market_rate > 0.0) {
        if (!(cfg.market_nu > 1.0))
            throw input_error("parameter synth.market_nu: must exceed 1");
        Rng mrng = root.child(0x6d6b74ull);
        std::vector<uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        for (int64_t t = 0; t < cal.total_bins(); ++t) {
            if (!mrng.bernoulli(cfg.market_rate)) continue;
            double f = std::min(1.0, cfg.market_fmin * std::pow(mrng.uniform(), -1.0 / cfg.market_nu));
            size_t cnt = std::min(n, size_t(std::llround(f * double(n))));
            BinStamp at = cal.stamp(t);
            for (size_t i = 0; i < cnt; ++i) {
                size_t j = i + size_t(mrng.below(uint64_t(n - i)));
                std::swap(idx[i], idx[j]);
                shocks.push_back({int32_t(idx[i]), at,
                                  cfg.ret_scale * cfg.market_jump_size * mrng.pareto(cfg.alpha_r),
                                  0.0, 1.0, 0, "market"});
            }
            market_bins.emplace_back(t, f);
        }
    }

    // one shock per slot: first by (stock, at, kind) wins
    std::sort(shocks.begin(), shocks.end(), [](const PlantedShock& a, const PlantedShock& b) {
        return std::tuple(a.stock, a.at, a.kind, a.size) < std::tuple(b.stock, b.at, b.kind, b.size);
    });
    shocks.erase(std::unique(shocks.begin(), shocks.end(),
                             [](const PlantedShock& a, const PlantedShock& b) {
                                 return a.stock == b.stock && a.at == b.at;
                             }),
                 shocks.end());

    ReturnGenCfg rcfg;
    rcfg.seed = cfg.seed;
    rcfg.n_stocks = n;
    rcfg.cal = scal;
    rcfg.scale = cfg.ret_scale;
    rcfg.alpha = cfg.alpha_r;
    rcfg.tail_prob = cfg.ret_tail_prob;
    rcfg.season_amp = cfg.season_amp;
    rcfg.vol_base = cfg.vol_base;
    rcfg.vol_alpha = cfg.vol_alpha;
    BarPanel panel = gen_returns(rcfg, shocks);

    TradeGenCfg tcfg;
    tcfg.seed = cfg.seed + 3;
    tcfg.cal = scal;
    tcfg.n_trades = size_t(std::max<int64_t>(cfg.n_trades, 0));
    tcfg.vol_base = cfg.vol_base;
    tcfg.vol_alpha = cfg.vol_alpha;
    tcfg.coupled = cfg.trades_coupled;
    tcfg.lambda = cfg.trade_lambda;
    tcfg.gamma = cfg.trade_gamma;
    tcfg.eps_sd = cfg.trade_eps_sd;
    tcfg.indep_sigma = cfg.trade_sigma;
    std::vector<TradeRecord> trades = gen_trades(tcfg);

    std::vector<std::string> sector_of(n);
    for (size_t i = 0; i < n; ++i)
        sector_of[i] = "SEC" + std::to_string(i % size_t(std::max<int64_t>(cfg.n_sectors, 1)));

    std::vector<std::string> written;
    auto put = [&](const std::string& name) {
        written.push_back(out_path(cfg, name));
        mf.output(written.back());
        return written.back();
    };
    write_bar_csv(put("bars.csv"), emit_records(panel));
    write_trade_csv(put("trades.csv"), trades);
    write_news_csv(put("news_dj.csv"), news.primary);
    write_news_csv(put("news_rt.csv"), news.secondary);
    write_sector_csv(put("sectors.csv"), tickers, sector_of);
    {
        std::string text = "# TICKER=company name (matched case-insensitively in headlines)\n";
        for (const std::string& t : tickers) text += t + "=" + synth_alias(t) + "\n";
        csv::write_file(put("aliases.txt"), text);
    }
    csv::write_file(put("blocklist.txt"),
                    "# headlines containing these substrings are dropped\nimbalance\n");
    {
        std::string text;
        for (const std::string& t : tickers) text += t + "\n";
        csv::write_file(put("universe.txt"), text);
    }

    ordered_json truth;
    truth["schema_version"] = 1;
    truth["seed"] = cfg.seed;
    truth["calendar"] = {{"start", cfg.cal_start},
                         {"n_days", cfg.n_days},
                         {"open", cfg.cal_open},
                         {"close", cfg.cal_close}};
    truth["returns"] = {{"tail_exponent", cfg.alpha_r},
                        {"scale", cfg.ret_scale},
                        {"tail_prob", cfg.ret_tail_prob},
                        {"season_amp", cfg.season_amp},
                        {"expected_abs_return", expected_abs_return(rcfg)},
                        {"volume_tail_exponent", cfg.vol_alpha}};
    ordered_json shocks_j = ordered_json::array();
    for (const PlantedShock& sh : shocks)
        shocks_j.push_back({{"ticker", tickers[size_t(sh.stock)]},
                            {"date", format_date(cal.date_of(sh.at.day))},
                            {"time", format_hhmm(cal.minute_of_bin(sh.at.bin))},
                            {"kind", sh.kind},
                            {"size", sh.size},
                            {"relax_amp", sh.amp},
                            {"relax_beta", sh.beta}});
    truth["shocks"] = std::move(shocks_j);
    truth["news"] = {{"mu", cfg.news_mu},
                     {"branching", cfg.news_branching},
                     {"omega", cfg.news_omega},
                     {"coupled_fraction", cfg.coupled_fraction},
                     {"echo_prob", cfg.echo_prob},
                     {"echo_max_delay", cfg.echo_max_delay},
                     {"exclusive_mu", cfg.exclusive_mu},
                     {"n_primary", news.primary.size()},
                     {"n_secondary", news.secondary.size()},
                     {"n_planted_jumps", news.planted_jumps.size()}};
    ordered_json mkt = ordered_json::array();
    for (auto& [t, f] : market_bins) {
        BinStamp at = cal.stamp(t);
        mkt.push_back({{"date", format_date(cal.date_of(at.day))},
                       {"time", format_hhmm(cal.minute_of_bin(at.bin))},
                       {"fraction", f}});
    }
    truth["market"] = {{"rate", cfg.market_rate},
                       {"f_min", cfg.market_fmin},
                       {"nu", cfg.market_nu},
                       {"bins", std::move(mkt)}};
    truth["trades"] = {{"ticker", tcfg.ticker},
                       {"n_trades", cfg.n_trades},
                       {"coupled", cfg.trades_coupled},
                       {"lambda", cfg.trade_lambda},
                       {"gamma", cfg.trade_gamma},
                       {"eps_sd", cfg.trade_eps_sd},
                       {"indep_sigma", cfg.trade_sigma},
                       {"volume_tail_exponent", cfg.vol_alpha}};
    write_json(put("truth.json"), truth);
    return written;
}

std::vector<std::string> cmd_ingest(const RunConfig& cfg, Manifest& mf) {
    PanelBuildReport prep;
    BarPanel panel = load_panel(cfg, mf, &prep);
    const TradingCalendar& cal = panel.calendar();

    std::vector<std::string> written;
    auto put = [&](const std::string& name) {
        written.push_back(out_path(cfg, name));
        mf.output(written.back());
        return written.back();
    };

    SeasonalCurve curve = intraday_abs_return_curve(panel);
    {
        std::string text = "bin,value\n";
        for (int b = 0; b < curve.bins(); ++b)
            text += std::to_string(b) + "," + num(curve.v[size_t(b)]) + "\n";
        csv::write_file(put("curve.csv"), text);
    }

    ordered_json report;
    report["panel"] = {{"records", prep.n_records},
                       {"unknown_date", prep.n_unknown_date},
                       {"bad_time", prep.n_bad_time},
                       {"bad_price", prep.n_bad_price},
                       {"unknown_ticker", prep.n_unknown_ticker},
                       {"duplicates_collapsed", prep.n_duplicates},
                       {"stocks", panel.n_stocks()},
                       {"sessions", cal.n_days()}};

    std::string primary_path;
    if (optional_input(cfg.news_primary, cfg, "news_dj.csv", primary_path)) {
        mf.input(primary_path);
        AliasTable aliases;
        std::string alias_path;
        if (optional_input(cfg.aliases, cfg, "aliases.txt", alias_path)) {
            mf.input(alias_path);
            aliases = read_alias_file(alias_path);
        }
        std::vector<std::string> blocklist;
        std::string block_path;
        if (optional_input(cfg.blocklist, cfg, "blocklist.txt", block_path)) {
            mf.input(block_path);
            blocklist = read_blocklist_file(block_path);
        }
        FilterReport frep;
        std::vector<NewsEvent> events = filter_news(read_news_csv(primary_path), panel.tickers(),
                                                    cal, blocklist, aliases, &frep);
        report["news_primary"] = filter_report_json(frep);

        std::string secondary_path;
        if (optional_input(cfg.news_secondary, cfg, "news_rt.csv", secondary_path)) {
            mf.input(secondary_path);
            FilterReport srep;
            std::vector<NewsEvent> sec = filter_news(read_news_csv(secondary_path),
                                                     panel.tickers(), cal, blocklist, aliases, &srep);
            report["news_secondary"] = filter_report_json(srep);
            MergeResult merged = merge_feeds(events, sec, int(cfg.merge_window),
                                             int(cfg.merge_silence));
            report["merge"] = {{"matched_pairs", merged.delays.n_matched},
                               {"isolated_pairs", merged.delays.n_isolated},
                               {"mean_delay", merged.delays.mean_delay()},
                               {"events", merged.merged.size()}};
            write_delay_csv(put("delay.csv"), merged.delays);
            events = std::move(merged.merged);
        }
        write_event_csv(put("events.csv"), events, cal, panel.tickers());
    }
    write_json(put("ingest_report.json"), report);
    return written;
}

std::vector<std::string> cmd_detect(const RunConfig& cfg, Manifest& mf) {
    if (!(cfg.s > 1.0)) throw input_error("parameter detect-jumps.s: must exceed 1");
    BarPanel panel = load_panel(cfg, mf);
    const TradingCalendar& cal = panel.calendar();

    BaselineSeries base = baseline(panel, int(cfg.baseline_window), int(cfg.min_history),
                                   cfg.baseline_span_days);
    DetectReport drep;
    std::vector<JumpEvent> jumps = detect_jumps(panel, base, cfg.s, &drep);

    std::vector<std::string> written;
    auto put = [&](const std::string& name) {
        written.push_back(out_path(cfg, name));
        mf.output(written.back());
        return written.back();
    };
    write_jump_csv(put("jumps.csv"), jumps, cal, panel.tickers());

    std::vector<double> scores(jumps.size());
    for (size_t i = 0; i < jumps.size(); ++i) scores[i] = jumps[i].score;
    if (!jumps.empty()) write_ccdf_csv(put("ccdf.csv"), score_ccdf(scores, int(cfg.ccdf_ppd)));

    TailFit fit = fit_tail(scores, cfg.tail_fraction);
    if (fit.ok)
        write_json(put("tail_fit.json"), ordered_json{{"exponent", fit.exponent},
                                                      {"stderr", fit.stderr_},
                                                      {"n_tail", fit.n_tail},
                                                      {"n_values", jumps.size()},
                                                      {"range", {fit.lower, fit.upper}}});

    ordered_json report;
    report["s"] = cfg.s;
    report["n_jumps"] = jumps.size();
    report["n_degenerate_baseline"] = drep.n_degenerate;

    std::string events_path;
    if (optional_input("", cfg, "events.csv", events_path)) {
        mf.input(events_path);
        std::vector<NewsEvent> events = read_event_csv(events_path, cal, panel.tickers());
        JumpPartition part = classify_news_jumps(jumps, to_panel_events(events),
                                                 int(cfg.assoc_window), cal.bins_per_day());
        write_jump_csv(put("jumps_news.csv"), part.news_jumps, cal, panel.tickers());
        write_jump_csv(put("jumps_endo.csv"), part.endogenous, cal, panel.tickers());
        report["assoc_window"] = cfg.assoc_window;
        report["n_news_jumps"] = part.news_jumps.size();
        report["n_endogenous"] = part.endogenous.size();
    }
    write_json(put("detect_report.json"), report);
    if (!fit.ok) {
        mf.write();
        throw refusal("tail fit refused: " + fit.refusal_reason);
    }
    return written;
}

std::vector<std::string> cmd_eventstudy(const RunConfig& cfg, Manifest& mf) {
    BarPanel panel = load_panel(cfg, mf);
    const TradingCalendar& cal = panel.calendar();
    std::vector<JumpEvent> jumps = load_jumps(cfg, mf, cal, panel.tickers());
    std::vector<PanelEvent> jevents = to_panel_events(jumps);

    std::vector<std::string> written;
    auto put = [&](const std::string& name) {
        written.push_back(out_path(cfg, name));
        mf.output(written.back());
        return written.back();
    };

    SeasonalCurve jump_curve = intraday_event_curve(jevents, cal.bins_per_day());
    EventProfile jump_rate = conditional_rate(jevents, jevents, int(cfg.rate_max_lag),
                                              jump_curve, cal, panel.n_stocks());
    write_profile_csv(put("profile_jump_rate.csv"), jump_rate);

    std::string events_path;
    if (optional_input("", cfg, "events.csv", events_path)) {
        mf.input(events_path);
        std::vector<PanelEvent> nevents =
            to_panel_events(read_event_csv(events_path, cal, panel.tickers()));
        if (!nevents.empty()) {
            SeasonalCurve news_curve = intraday_event_curve(nevents, cal.bins_per_day());
            EventProfile news_rate = conditional_rate(nevents, nevents, int(cfg.rate_max_lag),
                                                      news_curve, cal, panel.n_stocks());
            write_profile_csv(put("profile_news_rate.csv"), news_rate);
        }
    }

    SeasonalCurve abs_curve = intraday_abs_return_curve(panel);
    EventProfile vol_all = vol_profile(jevents, panel, int(cfg.vol_max_lag), abs_curve);
    write_profile_csv(put("profile_vol_all.csv"), vol_all);
    PrePost pp = pre_post_baseline(vol_all, int(cfg.prepost_inner));
    write_json(put("prepost.json"), ordered_json{{"pre_mean", pp.pre_mean},
                                                 {"pre_stderr", pp.pre_stderr},
                                                 {"post_mean", pp.post_mean},
                                                 {"post_stderr", pp.post_stderr},
                                                 {"diff", pp.diff()},
                                                 {"diff_stderr", pp.diff_stderr()},
                                                 {"inner", cfg.prepost_inner},
                                                 {"max_lag", cfg.vol_max_lag}});

    std::string news_path = out_path(cfg, "jumps_news.csv");
    std::string endo_path = out_path(cfg, "jumps_endo.csv");
    if (fs::exists(news_path) && fs::exists(endo_path)) {
        mf.input(news_path);
        mf.input(endo_path);
        std::vector<PanelEvent> news_j =
            to_panel_events(read_jump_csv(news_path, cal, panel.tickers()));
        std::vector<PanelEvent> endo_j =
            to_panel_events(read_jump_csv(endo_path, cal, panel.tickers()));
        if (!endo_j.empty()) {
            EventProfile prof = vol_profile(endo_j, panel, int(cfg.vol_max_lag), abs_curve);
            write_profile_csv(put("profile_vol_endo.csv"), prof);
            write_json(put("fit_endo.json"), fit_json(fit_relaxation(prof, int(cfg.fit_tau_max))));
        }
        if (!news_j.empty()) {
            EventProfile prof = vol_profile(news_j, panel, int(cfg.vol_max_lag), abs_curve);
            write_profile_csv(put("profile_vol_news.csv"), prof);
            write_json(put("fit_news.json"), fit_json(fit_relaxation(prof, int(cfg.fit_tau_max))));
        }
    }
    return written;
}

std::vector<std::string> cmd_collective(const RunConfig& cfg, Manifest& mf) {
    BarPanel panel = load_panel(cfg, mf);
    const TradingCalendar& cal = panel.calendar();
    std::vector<JumpEvent> jumps = load_jumps(cfg, mf, cal, panel.tickers());

    IndicatorPanel ind = indicator_panel(to_panel_events(jumps), panel.n_stocks(),
                                         panel.total_bins(), cal.bins_per_day());

    std::vector<std::string> written;
    auto put = [&](const std::string& name) {
        written.push_back(out_path(cfg, name));
        mf.output(written.back());
        return written.back();
    };

    std::vector<uint32_t> excluded;
    CoJumpDecomposition dec = cojump_matrix(ind, &excluded);
    {
        ordered_json j;
        j["n_stocks"] = dec.n;
        j["t_bins"] = dec.T;
        j["eigenvalues"] = dec.eigenvalues;
        j["mp_band"] = {dec.mp_lo, dec.mp_hi};
        j["n_outside_band"] = dec.n_outside_band;
        j["mp_reliable"] = dec.mp_reliable;
        ordered_json ex = ordered_json::array();
        for (uint32_t s : excluded) ex.push_back(panel.tickers()[s]);
        j["excluded_stocks"] = std::move(ex);
        write_json(put("decomposition.json"), j);
    }

    MarketJumpSeries chi;
    if (cfg.chi_mode == "eigen")
        chi = chi_series(ind, dec.leading_full(panel.n_stocks()), cfg.s_prime);
    else if (cfg.chi_mode == "uniform")
        chi = chi_uniform(ind, cfg.s_prime);
    else
        throw input_error("parameter collective.chi_mode: expected eigen or uniform");
    write_chi_csv(put("chi.csv"), chi, cal);

    {
        ordered_json entries_j = ordered_json::array();
        std::vector<PanelEvent> jevents = to_panel_events(jumps);
        for (int hw = 0; hw <= int(cfg.half_window); ++hw) {
            ExplainedFraction ef =
                explained_fraction(jevents, chi.events, hw, cal.bins_per_day());
            entries_j.push_back({{"half_window", hw},
                                 {"n_jumps", ef.n_jumps},
                                 {"n_explained", ef.n_explained},
                                 {"fraction", ef.fraction}});
        }
        write_json(put("explained.json"), ordered_json{{"s_prime", cfg.s_prime},
                                                       {"chi_mode", cfg.chi_mode},
                                                       {"n_market_bins", chi.events.size()},
                                                       {"entries", std::move(entries_j)}});
    }

    std::string sector_path;
    std::vector<std::string> skipped;
    if (optional_input(cfg.sectors, cfg, "sectors.csv", sector_path)) {
        mf.input(sector_path);
        std::vector<std::string> sector_of = read_sector_csv(sector_path, panel.tickers());
        std::vector<SectorSeries> sect =
            sector_jumps(ind, sector_of, cfg.s_prime, size_t(cfg.min_members), &skipped);
        std::string text = "sector,date,time,chi\n";
        for (const SectorSeries& ss : sect)
            for (int64_t t = 0; t < int64_t(ss.series.chi.size()); ++t)
                if (ss.series.chi[size_t(t)] > 0.0) {
                    BinStamp at = cal.stamp(t);
                    text += ss.label + "," + format_date(cal.date_of(at.day)) + "," +
                            format_hhmm(cal.minute_of_bin(at.bin)) + "," +
                            num(ss.series.chi[size_t(t)]) + "\n";
                }
        csv::write_file(put("sector_chi.csv"), text);
    }

    write_json(put("collective_report.json"),
               ordered_json{{"n_jumps", jumps.size()},
                            {"n_stocks_kept", dec.n},
                            {"top_eigenvalue", dec.eigenvalues.empty() ? 0.0 : dec.eigenvalues[0]},
                            {"n_outside_band", dec.n_outside_band},
                            {"n_market_bins", chi.events.size()},
                            {"skipped_sectors", skipped}});
    return written;
}

std::vector<std::string> cmd_taildep(const RunConfig& cfg, Manifest& mf) {
    std::vector<double> grid;
    if (!cfg.tail_grid.empty()) {
        for (const std::string& f : csv::split_line(cfg.tail_grid)) {
            double v;
            if (!csv::parse_double(trim(f), v))
                throw input_error("parameter taildep.grid: cannot parse '" + f + "'");
            grid.push_back(v);
        }
    }

    std::vector<std::string> written;
    auto put = [&](const std::string& name) {
        written.push_back(out_path(cfg, name));
        mf.output(written.back());
        return written.back();
    };

    std::string trades_path;
    bool have_trades = optional_input(cfg.trades, cfg, "trades.csv", trades_path);
    if (have_trades) {
        mf.input(trades_path);
        PairedSample pairs = trade_pairs(read_trade_csv(trades_path));
        write_tail_csv(put("tail_trades.csv"), tail_curve(pairs, grid));
    }

    std::string bars_path = cfg.bars.empty() ? out_path(cfg, "bars.csv") : cfg.bars;
    bool have_bars = fs::exists(bars_path);
    if (!cfg.bars.empty() && !have_bars) throw input_error("missing input: " + bars_path);
    if (have_bars) {
        BarPanel panel = load_panel(cfg, mf);
        PairedSample pairs = bar_pairs(panel, cfg.tail_standardize);
        write_tail_csv(put("tail_bars.csv"), tail_curve(pairs, grid));
    }
    if (!have_trades && !have_bars)
        throw input_error("missing input: " + trades_path + " and " + bars_path);
    return written;
}

std::vector<std::string> cmd_report(const RunConfig& cfg, Manifest& mf) {
    const char* required[] = {"ccdf.csv",       "tail_fit.json",
                              "jumps_news.csv", "jumps_endo.csv",
                              "profile_jump_rate.csv", "profile_news_rate.csv",
                              "profile_vol_news.csv",  "profile_vol_endo.csv",
                              "fit_news.json",  "fit_endo.json",
                              "decomposition.json",    "chi.csv",
                              "tail_trades.csv",       "tail_bars.csv"};
    std::string missing;
    for (const char* name : required)
        if (!fs::exists(out_path(cfg, name))) missing += (missing.empty() ? "" : ", ") + out_path(cfg, name);
    if (!missing.empty()) throw refusal("missing artifacts: " + missing);
    for (const char* name : required) mf.input(out_path(cfg, name));

    std::vector<std::string> written;
    auto put = [&](const std::string& name) {
        written.push_back(out_path(cfg, name));
        mf.output(written.back());
        return written.back();
    };
    auto rows_of = [&](const std::string& name) {
        std::vector<std::vector<std::string>> rows;
        csv::for_each_line(csv::read_file(out_path(cfg, name)),
                           [&](size_t lineno, std::string_view line) {
                               if (lineno == 1 || line.empty()) return;
                               rows.push_back(csv::split_line(line));
                           });
        return rows;
    };

    // score CCDF with the fitted power law alongside
    {
        ordered_json fit = read_json(out_path(cfg, "tail_fit.json"));
        double expo = fit.at("exponent").get<double>();
        double lower = fit.at("range")[0].get<double>();
        double level = double(fit.at("n_tail").get<size_t>()) / double(fit.at("n_values").get<size_t>());
        std::string text = "score,ccdf,power_fit\n";
        for (auto& r : rows_of("ccdf.csv")) {
            double sc;
            csv::parse_double(r.at(0), sc);
            text += r.at(0) + "," + r.at(1) + ",";
            if (sc >= lower) text += num(level * std::pow(sc / lower, -expo));
            text += "\n";
        }
        csv::write_file(put("report_score_ccdf.csv"), text);
    }

    // CCDFs of jump scores split by origin
    {
        auto scores_of = [&](const std::string& name) {
            std::vector<double> scores;
            for (auto& r : rows_of(name)) {
                double v;
                if (r.size() >= 4 && csv::parse_double(r.at(3), v)) scores.push_back(v);
            }
            return scores;
        };
        std::string text = "origin,score,ccdf\n";
        for (auto& [origin, name] :
             {std::pair<const char*, const char*>{"news", "jumps_news.csv"},
              std::pair<const char*, const char*>{"endogenous", "jumps_endo.csv"}}) {
            std::vector<double> scores = scores_of(name);
            if (scores.empty()) continue;
            for (const CcdfPoint& pt : score_ccdf(scores, int(cfg.ccdf_ppd)))
                text += std::string(origin) + "," + num(pt.score) + "," + num(pt.ccdf) + "\n";
        }
        csv::write_file(put("report_ccdf_by_origin.csv"), text);
    }

    // self-conditional rates and post-event volatility, long format
    auto concat_profiles = [&](const std::string& out_name,
                               std::vector<std::pair<const char*, const char*>> parts) {
        std::string text = "kind,lag,value,stderr,n_obs\n";
        for (auto& [kind, name] : parts)
            for (auto& r : rows_of(name))
                text += std::string(kind) + "," + r.at(0) + "," + r.at(1) + "," + r.at(2) + "," +
                        r.at(3) + "\n";
        csv::write_file(put(out_name), text);
    };
    concat_profiles("report_event_rates.csv", {{"jump_given_jump", "profile_jump_rate.csv"},
                                               {"news_given_news", "profile_news_rate.csv"}});
    concat_profiles("report_relaxation.csv", {{"after_news_jump", "profile_vol_news.csv"},
                                              {"after_endogenous_jump", "profile_vol_endo.csv"}});

    // CCDF of the market-jump amplitude chi
    {
        std::vector<double> chis;
        for (auto& r : rows_of("chi.csv")) {
            double v;
            if (r.size() >= 3 && csv::parse_double(r.at(2), v)) chis.push_back(v);
        }
        std::string text = "chi,ccdf\n";
        if (!chis.empty())
            for (const CcdfPoint& pt : score_ccdf(chis, int(cfg.ccdf_ppd)))
                text += num(pt.score) + "," + num(pt.ccdf) + "\n";
        csv::write_file(put("report_chi_ccdf.csv"), text);
    }

    // tail dependence, trade and bar resolution side by side
    {
        std::string text = "source,p,c,k,ci\n";
        for (auto& [src, name] : {std::pair<const char*, const char*>{"trades", "tail_trades.csv"},
                                  std::pair<const char*, const char*>{"bars", "tail_bars.csv"}})
            for (auto& r : rows_of(name))
                text += std::string(src) + "," + r.at(0) + "," + r.at(1) + "," + r.at(2) + "," +
                        r.at(3) + "\n";
        csv::write_file(put("report_tail_dependence.csv"), text);
    }

    {
        ordered_json dec = read_json(out_path(cfg, "decomposition.json"));
        ordered_json summary;
        summary["jump_tail"] = read_json(out_path(cfg, "tail_fit.json"));
        summary["relaxation"] = {{"news", read_json(out_path(cfg, "fit_news.json"))},
                                 {"endogenous", read_json(out_path(cfg, "fit_endo.json"))}};
        summary["collective"] = {{"top_eigenvalue", dec.at("eigenvalues").empty()
                                                        ? ordered_json(nullptr)
                                                        : dec.at("eigenvalues")[0]},
                                 {"mp_band", dec.at("mp_band")},
                                 {"n_outside_band", dec.at("n_outside_band")}};
        auto smallest_p = [&](const std::string& name) -> ordered_json {
            auto rows = rows_of(name);
            if (rows.empty()) return nullptr;
            auto& r = rows.back();   // grid is written largest p first
            double p, c, ci;
            csv::parse_double(r.at(0), p);
            csv::parse_double(r.at(1), c);
            csv::parse_double(r.at(3), ci);
            return {{"p", p}, {"c", c}, {"ci", ci}};
        };
        summary["tail_dependence"] = {{"trades_smallest_p", smallest_p("tail_trades.csv")},
                                      {"bars_smallest_p", smallest_p("tail_bars.csv")}};
        write_json(put("report_summary.json"), summary);
    }
    return written;
}

} // namespace

std::vector<std::string> run_command(const std::string& command, const RunConfig& cfg) {
    if (cfg.out.empty()) throw input_error("parameter paths.out: must not be empty");
    fs::create_directories(cfg.out);
    Manifest mf(command, cfg);
    std::vector<std::string> written;
    if (command == "synth") written = cmd_synth(cfg, mf);
    else if (command == "ingest") written = cmd_ingest(cfg, mf);
    else if (command == "detect-jumps") written = cmd_detect(cfg, mf);
    else if (command == "event-study") written = cmd_eventstudy(cfg, mf);
    else if (command == "collective") written = cmd_collective(cfg, mf);
    else if (command == "taildep") written = cmd_taildep(cfg, mf);
    else if (command == "report") written = cmd_report(cfg, mf);
    else throw input_error("unknown command: " + command);
    written.push_back(mf.write());
    return written;
}

} // namespace jumplab
