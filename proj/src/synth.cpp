#include "jumplab/synth.hpp"

#include "jumplab/errors.hpp"
#include "jumplab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace jumplab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
} // namespace

std::string synth_alias(const std::string& ticker) { return "Synthetic Corp " + ticker; }

std::vector<std::string> synth_tickers(const std::string& prefix, size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    char buf[40];
    for (size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%s%03zu", prefix.c_str(), i);
        out.emplace_back(buf);
    }
    return out;
}

TradingCalendar SynthCalendar::make() const {
    return TradingCalendar::weekdays(start, n_days, open_minute, close_minute);
}

double expected_abs_return(const ReturnGenCfg& cfg) {
    return cfg.scale *
           ((1.0 - cfg.tail_prob) / 3.0 + cfg.tail_prob * cfg.alpha / (cfg.alpha - 1.0));
}

// ------------------------------------------------------------- returns ----

BarPanel gen_returns(const ReturnGenCfg& cfg, const std::vector<PlantedShock>& extra,
                     std::vector<PlantedShock>* shocks_out) {
    if (!(cfg.alpha > 1.0)) throw input_error("gen_returns: tail exponent must exceed 1");
    if (!(cfg.scale > 0.0)) throw input_error("gen_returns: scale must be positive");
    if (!(cfg.tail_prob >= 0.0 && cfg.tail_prob <= 1.0))
        throw input_error("gen_returns: tail_prob outside [0, 1]");
    if (!(cfg.vol_alpha > 1.0)) throw input_error("gen_returns: vol_alpha must exceed 1");
    if (cfg.couple_volume && (cfg.season_amp != 0.0 || cfg.shock_prob > 0.0 || !extra.empty()))
        throw input_error("gen_returns: volume coupling excludes season and shock options");

    TradingCalendar cal = cfg.cal.make();
    const int bpd = cal.bins_per_day();
    if (cfg.shock_prob > 0.0 &&
        (cfg.shock_bin_lo < 0 || cfg.shock_bin_hi >= bpd || cfg.shock_bin_lo > cfg.shock_bin_hi))
        throw input_error("gen_returns: shock bin range outside session");

    BarPanel panel(cal, synth_tickers(cfg.ticker_prefix, cfg.n_stocks));

    std::vector<std::vector<PlantedShock>> per_stock(cfg.n_stocks);
    for (const PlantedShock& sh : extra) {
        if (sh.stock < 0 || size_t(sh.stock) >= cfg.n_stocks || sh.at.day < 0 ||
            sh.at.day >= cal.n_days() || sh.at.bin < 0 || sh.at.bin >= bpd)
            throw input_error("gen_returns: planted shock outside panel");
        per_stock[size_t(sh.stock)].push_back(sh);
    }

    std::vector<double> season(size_t(bpd), 1.0);
    if (cfg.season_amp != 0.0)
        for (int b = 0; b < bpd; ++b)
            season[size_t(b)] = 1.0 + cfg.season_amp * std::cos(kTwoPi * b / bpd);

    Rng root(cfg.seed);
    for (size_t s = 0; s < cfg.n_stocks; ++s) {
        Rng rng = root.child(s);
        auto& shocks = per_stock[s];
        if (cfg.shock_prob > 0.0)
            for (int d = 0; d < cal.n_days(); ++d)
                if (rng.bernoulli(cfg.shock_prob)) {
                    int b = cfg.shock_bin_lo +
                            int(rng.below(uint64_t(cfg.shock_bin_hi - cfg.shock_bin_lo + 1)));
                    shocks.push_back({int32_t(s), {d, b}, cfg.shock_size * cfg.scale,
                                      cfg.relax_amp, cfg.relax_beta, cfg.relax_span, "endo"});
                }
        std::sort(shocks.begin(), shocks.end(), [](const PlantedShock& a, const PlantedShock& b) {
            return std::pair(a.at, a.kind) < std::pair(b.at, b.kind);
        });

        double price = cfg.price0;
        size_t next_shock = 0;
        std::vector<const PlantedShock*> active;   // shocks of the current day
        for (int64_t t = 0; t < cal.total_bins(); ++t) {
            auto [d, b] = cal.stamp(t);
            if (b == 0) {
                active.clear();
                while (next_shock < shocks.size() && shocks[next_shock].at.day == d)
                    active.push_back(&shocks[next_shock++]);
            }
            bool positive = (rng.raw() & 1) != 0;
            double r;
            int64_t vol;
            if (cfg.couple_volume) {
                double v = cfg.vol_base * rng.pareto(cfg.vol_alpha);
                r = std::fabs(cfg.couple_lambda * std::pow(v, cfg.couple_gamma) +
                              cfg.couple_eps_sd * rng.normal());
                vol = std::llround(v);
            } else {
                vol = std::llround(cfg.vol_base * rng.pareto(cfg.vol_alpha));
                double u = rng.uniform();
                bool tail = rng.bernoulli(cfg.tail_prob);
                double mag = cfg.scale * (tail ? std::pow(u, -1.0 / cfg.alpha) : u * u);
                const PlantedShock* forced = nullptr;
                double mult = 1.0;
                for (const PlantedShock* sh : active) {
                    if (sh->at.bin == b && !forced) forced = sh;
                    int tau = b - sh->at.bin;
                    if (tau >= 1 && tau <= sh->span)
                        mult += sh->amp * std::pow(double(tau), -sh->beta);
                }
                r = forced ? forced->size : mag * season[size_t(b)] * mult;
            }
            if (!positive) r = -r;
            r = std::clamp(r, -cfg.max_abs_return, cfg.max_abs_return);
            price *= 1.0 + r;
            panel.set_bar(s, t, price, vol);
        }
    }
    panel.finalize();

    if (shocks_out) {
        shocks_out->clear();
        for (auto& v : per_stock)
            shocks_out->insert(shocks_out->end(), v.begin(), v.end());
    }
    return panel;
}

// ---------------------------------------------------------------- news ----

NewsGenResult gen_news(const NewsGenCfg& cfg) {
    if (cfg.mu < 0.0 || cfg.exclusive_mu < 0.0) throw input_error("gen_news: negative rate");
    if (!(cfg.branching >= 0.0 && cfg.branching < 1.0))
        throw input_error("gen_news: branching outside [0, 1)");
    if (cfg.branching > 0.0 && !(cfg.omega > 0.0))
        throw input_error("gen_news: kernel decay must be positive");
    if (!(cfg.coupled_fraction >= 0.0 && cfg.coupled_fraction <= 1.0) ||
        !(cfg.echo_prob >= 0.0 && cfg.echo_prob <= 1.0))
        throw input_error("gen_news: probability outside [0, 1]");
    if (cfg.warmup < 0.0 || cfg.spawn_max_lag < 0 || cfg.echo_max_delay < 0)
        throw input_error("gen_news: negative window");

    TradingCalendar cal = cfg.cal.make();
    const int bpd = cal.bins_per_day();
    std::vector<std::string> tickers = synth_tickers(cfg.ticker_prefix, cfg.n_stocks);

    struct Ev { int32_t stock; int32_t day; int32_t bin; uint32_t seq; double t; };
    std::vector<Ev> prim, seco;
    NewsGenResult out;

    Rng root(cfg.seed);
    for (size_t s = 0; s < cfg.n_stocks; ++s) {
        Rng rng = root.child(s);
        for (int d = 0; d < cal.n_days(); ++d) {
            std::vector<double> evs, stack;
            int n_imm = rng.poisson(cfg.mu * (bpd + cfg.warmup));
            for (int i = 0; i < n_imm; ++i)
                stack.push_back(-cfg.warmup + rng.uniform_co() * (bpd + cfg.warmup));
            while (!stack.empty()) {
                double t = stack.back();
                stack.pop_back();
                if (t >= double(bpd)) continue;
                if (t >= 0.0) evs.push_back(t);
                if (cfg.branching > 0.0) {
                    int kids = rng.poisson(cfg.branching);
                    for (int k = 0; k < kids; ++k)
                        stack.push_back(t + rng.exponential(cfg.omega));
                }
            }
            std::sort(evs.begin(), evs.end());
            uint32_t seq = 0;
            for (double t : evs) {
                int bin = int(t);
                prim.push_back({int32_t(s), d, bin, seq++, t});
                if (cfg.coupled_fraction > 0.0 && rng.bernoulli(cfg.coupled_fraction)) {
                    int jb = std::min(bin + int(rng.below(uint64_t(cfg.spawn_max_lag) + 1)), bpd - 1);
                    out.planted_jumps.push_back({int32_t(s), {d, jb}});
                }
                if (cfg.echo_prob > 0.0 && rng.bernoulli(cfg.echo_prob)) {
                    int eb = bin + int(rng.below(uint64_t(cfg.echo_max_delay) + 1));
                    if (eb < bpd) seco.push_back({int32_t(s), d, eb, seq, t});
                }
            }
            if (cfg.exclusive_mu > 0.0) {
                int nx = rng.poisson(cfg.exclusive_mu * bpd);
                for (int i = 0; i < nx; ++i)   // seq offset keeps ordering collision-free
                    seco.push_back({int32_t(s), d, int(rng.below(uint64_t(bpd))),
                                    1u << 24 | uint32_t(i), -1.0});
            }
        }
    }

    auto order = [](const Ev& a, const Ev& b) {
        return std::tuple(a.day, a.bin, a.stock, a.seq) < std::tuple(b.day, b.bin, b.stock, b.seq);
    };
    std::sort(prim.begin(), prim.end(), order);
    std::sort(seco.begin(), seco.end(), order);

    char id[24];
    out.primary.reserve(prim.size());
    out.truth.reserve(prim.size());
    out.intra_session_times.reserve(prim.size());
    for (size_t i = 0; i < prim.size(); ++i) {
        const Ev& e = prim[i];
        std::snprintf(id, sizeof id, "D%06zu", i);
        const std::string& tick = tickers[size_t(e.stock)];
        out.primary.push_back({cal.date_of(e.day), cal.open_minute() + e.bin, cfg.primary_source,
                               id, {tick}, synth_alias(tick) + " update"});
        out.truth.push_back({e.stock, {e.day, e.bin}, cfg.primary_source, id});
        out.intra_session_times.push_back(e.t);
    }
    out.secondary.reserve(seco.size());
    for (size_t i = 0; i < seco.size(); ++i) {
        const Ev& e = seco[i];
        std::snprintf(id, sizeof id, "R%06zu", i);
        const std::string& tick = tickers[size_t(e.stock)];
        out.secondary.push_back({cal.date_of(e.day), cal.open_minute() + e.bin,
                                 cfg.secondary_source, id, {tick},
                                 synth_alias(tick) + (e.t < 0.0 ? " exclusive" : " update")});
    }
    std::sort(out.planted_jumps.begin(), out.planted_jumps.end());
    return out;
}

// -------------------------------------------------------------- market ----

MarketGenResult gen_market(const MarketGenCfg& cfg) {
    if (!(cfg.idio_p >= 0.0 && cfg.idio_p <= 1.0) ||
        !(cfg.market_rate >= 0.0 && cfg.market_rate <= 1.0))
        throw input_error("gen_market: probability outside [0, 1]");
    if (cfg.idio_p * (1.0 + std::fabs(cfg.idio_shape_amp)) > 1.0)
        throw input_error("gen_market: shaped idio probability exceeds 1");
    if (cfg.mode == MarketGenCfg::Participation::Pareto) {
        if (!(cfg.nu > 1.0)) throw input_error("gen_market: participation exponent must exceed 1");
        if (!(cfg.f_min > 0.0 && cfg.f_min <= 1.0))
            throw input_error("gen_market: f_min outside (0, 1]");
    } else if (!(cfg.f0 >= 0.0 && cfg.f0 <= 1.0)) {
        throw input_error("gen_market: f0 outside [0, 1]");
    }

    TradingCalendar cal = cfg.cal.make();
    const size_t n = cfg.n_stocks;
    const int64_t T = cal.total_bins();
    const int bpd = cal.bins_per_day();

    MarketGenResult out;
    out.ind.n_stocks = n;
    out.ind.total_bins = T;
    out.ind.bins_per_day = bpd;
    out.ind.theta.assign(n * size_t(T), 0);

    Rng root(cfg.seed);
    if (cfg.idio_p > 0.0) {
        std::vector<double> shaped(size_t(bpd), cfg.idio_p);
        if (cfg.idio_shape_amp != 0.0)
            for (int b = 0; b < bpd; ++b)
                shaped[size_t(b)] = cfg.idio_p * (1.0 + cfg.idio_shape_amp * std::cos(kTwoPi * b / bpd));
        for (size_t s = 0; s < n; ++s) {
            Rng rng = root.child(s);
            uint8_t* row = out.ind.theta.data() + s * size_t(T);
            for (int64_t t = 0; t < T; ++t)
                if (rng.bernoulli(shaped[size_t(t % bpd)])) row[t] = 1;
        }
    }

    if (cfg.market_rate > 0.0 && n > 0) {
        Rng mrng = root.child(UINT64_MAX);
        std::vector<uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        for (int64_t t = 0; t < T; ++t) {
            if (!mrng.bernoulli(cfg.market_rate)) continue;
            double f = cfg.f0;
            if (cfg.mode == MarketGenCfg::Participation::Pareto)
                f = std::min(1.0, cfg.f_min * std::pow(mrng.uniform(), -1.0 / cfg.nu));
            if (cfg.mode == MarketGenCfg::Participation::Bernoulli) {
                for (size_t s = 0; s < n; ++s)
                    if (mrng.bernoulli(f)) out.ind.theta[s * size_t(T) + size_t(t)] = 1;
            } else {
                size_t cnt = size_t(std::llround(f * double(n)));
                cnt = std::min(cnt, n);
                for (size_t i = 0; i < cnt; ++i) {
                    size_t j = i + size_t(mrng.below(uint64_t(n - i)));
                    std::swap(idx[i], idx[j]);
                    out.ind.theta[size_t(idx[i]) * size_t(T) + size_t(t)] = 1;
                }
            }
            out.market_bins.push_back(t);
            out.fractions.push_back(f);
        }
    }

    out.ind.p.assign(n, 0.0);
    for (size_t s = 0; s < n; ++s) {
        int64_t c = 0;
        const uint8_t* row = out.ind.theta.data() + s * size_t(T);
        for (int64_t t = 0; t < T; ++t) c += row[t];
        out.ind.p[s] = T > 0 ? double(c) / double(T) : 0.0;
    }
    return out;
}

// -------------------------------------------------------------- trades ----

std::vector<TradeRecord> gen_trades(const TradeGenCfg& cfg) {
    if (!(cfg.vol_alpha > 1.0)) throw input_error("gen_trades: vol_alpha must exceed 1");
    if (cfg.eps_sd < 0.0 || cfg.indep_sigma < 0.0)
        throw input_error("gen_trades: negative noise scale");
    if (!(cfg.price0 > 0.0)) throw input_error("gen_trades: price0 must be positive");

    TradingCalendar cal = cfg.cal.make();
    const int nd = cal.n_days();
    const int64_t spd = int64_t(cal.bins_per_day()) * 60;   // seconds per session
    const int64_t open_sec = int64_t(cal.open_minute()) * 60;

    std::vector<TradeRecord> out;
    out.reserve(cfg.n_trades);
    Rng rng(cfg.seed);
    double logp = std::log(cfg.price0);
    size_t emitted = 0;
    for (int d = 0; d < nd; ++d) {
        size_t k = cfg.n_trades / size_t(nd) + (size_t(d) < cfg.n_trades % size_t(nd) ? 1 : 0);
        for (size_t i = 0; i < k; ++i) {
            double v = cfg.vol_base * rng.pareto(cfg.vol_alpha);
            if (emitted > 0) {
                double mag = cfg.coupled
                                 ? std::fabs(cfg.lambda * std::pow(v, cfg.gamma) +
                                             cfg.eps_sd * rng.normal())
                                 : std::fabs(cfg.indep_sigma * rng.normal());
                logp += (rng.raw() & 1) ? mag : -mag;
            }
            int sec = int(open_sec + int64_t(double(i) * double(spd) / double(k)));
            out.push_back({cfg.ticker, cal.date_of(d), sec, std::exp(logp), std::llround(v)});
            ++emitted;
        }
    }
    return out;
}

} // namespace jumplab
