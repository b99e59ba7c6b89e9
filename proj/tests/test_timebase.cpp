#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/synth.hpp"
#include "jumplab/timebase.hpp"

using namespace jumplab;

static TradingCalendar one_day_cal() {
    return TradingCalendar({Date{2015, 1, 5}}, 570, 960);
}

TEST_CASE("date parsing and arithmetic") {
    Date d;
    CHECK(parse_date("2015-01-05", d));
    CHECK(d == Date{2015, 1, 5});
    CHECK(format_date(d) == "2015-01-05");
    CHECK(weekday(Date{2015, 1, 5}) == 0);   // a Monday
    CHECK(weekday(Date{2015, 1, 10}) == 5);
    CHECK(from_serial(to_serial(Date{2000, 2, 29})) == Date{2000, 2, 29});
    CHECK_FALSE(parse_date("2015-13-05", d));
    CHECK_FALSE(parse_date("2015-1-5", d));

    int m;
    CHECK(parse_hhmm("09:30", m));
    CHECK(m == 570);
    CHECK(format_hhmm(960) == "16:00");
    CHECK_FALSE(parse_hhmm("24:01", m));
}

TEST_CASE("weekday calendar skips weekends") {
    TradingCalendar cal = TradingCalendar::weekdays(Date{2015, 1, 5}, 10);
    CHECK(cal.n_days() == 10);
    CHECK(cal.bins_per_day() == 390);
    CHECK(cal.date_of(4) == Date{2015, 1, 9});    // Fri
    CHECK(cal.date_of(5) == Date{2015, 1, 12});   // next Mon
    CHECK(cal.day_index(Date{2015, 1, 10}) == std::nullopt);
    CHECK(cal.bin_of_minute(570) == 0);
    CHECK(cal.bin_of_minute(959) == 389);
    CHECK(cal.bin_of_minute(960) == std::nullopt);
    CHECK(cal.bin_of_minute(569) == std::nullopt);
    CHECK(cal.global_bin({2, 5}) == 2 * 390 + 5);
    CHECK(cal.stamp(2 * 390 + 5) == BinStamp{2, 5});
}

TEST_CASE("returns are relative close changes within a session") {
    TradingCalendar cal = one_day_cal();
    std::vector<BarRecord> recs = {
        {"AAA", {2015, 1, 5}, 570, 100.0, 10},
        {"AAA", {2015, 1, 5}, 571, 101.0, 10},
        {"AAA", {2015, 1, 5}, 572, 100.0, 10},
    };
    BarPanel p = build_panel(recs, cal);
    CHECK_FALSE(p.ret_valid(0, 0));   // first bin of the day: no previous close
    CHECK(p.ret(0, 1) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(p.ret(0, 2) == doctest::Approx(-1.0 / 101.0).epsilon(1e-12));
}

TEST_CASE("constant closes give exactly zero returns") {
    TradingCalendar cal = one_day_cal();
    std::vector<BarRecord> recs;
    for (int m = 570; m < 960; ++m) recs.push_back({"AAA", {2015, 1, 5}, m, 50.0, 1});
    BarPanel p = build_panel(recs, cal);
    for (int64_t t = 1; t < p.total_bins(); ++t) {
        CHECK(p.ret_valid(0, t));
        CHECK(p.ret(0, t) == 0.0);
    }
}

TEST_CASE("overnight change never appears as a return") {
    TradingCalendar cal({Date{2015, 1, 5}, Date{2015, 1, 6}}, 570, 960);
    std::vector<BarRecord> recs = {
        {"AAA", {2015, 1, 5}, 959, 100.0, 1},
        {"AAA", {2015, 1, 6}, 570, 110.0, 1},
        {"AAA", {2015, 1, 6}, 571, 110.0, 1},
    };
    BarPanel p = build_panel(recs, cal);
    CHECK_FALSE(p.ret_valid(0, 390));         // +10% overnight masked
    CHECK(p.ret(0, 391) == 0.0);
}

TEST_CASE("gaps inside a session break the return chain") {
    TradingCalendar cal = one_day_cal();
    std::vector<BarRecord> recs = {
        {"AAA", {2015, 1, 5}, 570, 100.0, 1},
        {"AAA", {2015, 1, 5}, 572, 105.0, 1},   // bin 571 missing
        {"AAA", {2015, 1, 5}, 573, 105.0, 1},
    };
    BarPanel p = build_panel(recs, cal);
    CHECK_FALSE(p.has_bar(0, 1));
    CHECK_FALSE(p.ret_valid(0, 2));   // previous bin absent
    CHECK(p.ret_valid(0, 3));
}

TEST_CASE("panel build reports rejection classes") {
    TradingCalendar cal = one_day_cal();
    std::vector<BarRecord> recs = {
        {"AAA", {2015, 1, 5}, 570, 100.0, 1},
        {"AAA", {2015, 1, 7}, 570, 100.0, 1},    // not a trading day
        {"AAA", {2015, 1, 5}, 300, 100.0, 1},    // before the open
        {"AAA", {2015, 1, 5}, 571, -3.0, 1},     // bad price
        {"AAA", {2015, 1, 5}, 570, 100.0, 1},    // identical duplicate
    };
    PanelBuildReport rep;
    BarPanel p = build_panel(recs, cal, &rep);
    CHECK(rep.n_records == 5);
    CHECK(rep.n_unknown_date == 1);
    CHECK(rep.n_bad_time == 1);
    CHECK(rep.n_bad_price == 1);
    CHECK(rep.n_duplicates == 1);
    CHECK(p.has_bar(0, 0));

    recs[4].close = 101.0;   // same slot, different payload
    CHECK_THROWS_AS(build_panel(recs, cal), input_error);
}

TEST_CASE("a fixed universe masks unknown tickers") {
    TradingCalendar cal = one_day_cal();
    std::vector<BarRecord> recs = {
        {"AAA", {2015, 1, 5}, 570, 100.0, 1},
        {"ZZZ", {2015, 1, 5}, 570, 100.0, 1},
    };
    std::vector<std::string> universe = {"AAA", "BBB"};
    PanelBuildReport rep;
    BarPanel p = build_panel(recs, cal, &rep, &universe);
    CHECK(p.n_stocks() == 2);
    CHECK(rep.n_unknown_ticker == 1);
    CHECK(p.stock_index("BBB") == size_t(1));
    CHECK_FALSE(p.has_bar(1, 0));
}

TEST_CASE("emit_records round-trips a panel exactly") {
    ReturnGenCfg cfg;
    cfg.n_stocks = 3;
    cfg.cal.n_days = 4;
    cfg.seed = 7;
    BarPanel p = gen_returns(cfg);
    std::vector<BarRecord> recs = emit_records(p);
    BarPanel q = build_panel(recs, p.calendar());
    CHECK(p.same_contents(q));

    // record order must not matter
    std::shuffle(recs.begin(), recs.end(), std::mt19937(3));
    BarPanel r = build_panel(recs, p.calendar());
    CHECK(p.same_contents(r));
}

TEST_CASE("bar csv round-trip") {
    ReturnGenCfg cfg;
    cfg.n_stocks = 2;
    cfg.cal.n_days = 2;
    BarPanel p = gen_returns(cfg);
    std::string path = "tmp_bars_rt.csv";
    write_bar_csv(path, emit_records(p));
    std::vector<BarRecord> back = read_bar_csv(path);
    BarPanel q = build_panel(back, p.calendar());
    CHECK(p.same_contents(q));
    std::remove(path.c_str());
}

TEST_CASE("seasonal curve has mean exactly 1") {
    ReturnGenCfg cfg;
    cfg.n_stocks = 5;
    cfg.cal.n_days = 5;
    cfg.season_amp = 0.5;
    BarPanel p = gen_returns(cfg);
    SeasonalCurve c = intraday_abs_return_curve(p);
    double mean = 0.0;
    for (double v : c.v) mean += v;
    mean /= double(c.bins());
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flat generator gives a flat intraday curve") {
    ReturnGenCfg cfg;
    cfg.n_stocks = 60;
    cfg.cal.n_days = 30;
    cfg.seed = 11;
    BarPanel p = gen_returns(cfg);
    SeasonalCurve c = intraday_abs_return_curve(p);
    // per-bin mean over ~1800 samples; |X| has sd ≈ 1.55 mean, so 3 se ≈ 11%
    size_t n_per_bin = cfg.n_stocks * size_t(cfg.cal.n_days);
    double se = 1.56 / std::sqrt(double(n_per_bin));
    int bad = 0;
    for (int b = 1; b < c.bins(); ++b)
        if (std::fabs(c.v[size_t(b)] - 1.0) > 3.0 * se) ++bad;
    CHECK(bad <= 4);   // 389 bins, 3-se exceedances are ~0.3% events
}

TEST_CASE("imposed cosine modulation is recovered") {
    ReturnGenCfg cfg;
    cfg.n_stocks = 100;
    cfg.cal.n_days = 40;
    cfg.season_amp = 0.5;
    cfg.seed = 13;
    BarPanel p = gen_returns(cfg);
    SeasonalCurve c = intraday_abs_return_curve(p);
    int bpd = p.calendar().bins_per_day();
    size_t n_per_bin = cfg.n_stocks * size_t(cfg.cal.n_days);
    int bad = 0;
    for (int b = 1; b < bpd; ++b) {
        double want = 1.0 + 0.5 * std::cos(2.0 * M_PI * b / bpd);
        double se = 1.56 * want / std::sqrt(double(n_per_bin));
        if (std::fabs(c.v[size_t(b)] - want) > 3.0 * se) ++bad;
    }
    CHECK(bad <= 4);
}

TEST_CASE("event curve normalizes counts and keeps empty bins at zero") {
    std::vector<PanelEvent> ev;
    for (int d = 0; d < 4; ++d) {
        ev.push_back({0, {d, 10}});
        ev.push_back({0, {d, 10}});
        ev.push_back({1, {d, 20}});
    }
    SeasonalCurve c = intraday_event_curve(ev, 390);
    CHECK(c.v[10] == doctest::Approx(8.0 * 390.0 / 12.0));   // 8 of 12 events
    CHECK(c.v[20] == doctest::Approx(4.0 * 390.0 / 12.0));
    CHECK(c.v[0] == 0.0);
    double mean = 0.0;
    for (double v : c.v) mean += v;
    CHECK(mean / 390.0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(intraday_event_curve({}, 390), refusal);
}

TEST_CASE("empty panel refuses a seasonal curve") {
    TradingCalendar cal = one_day_cal();
    BarPanel p(cal, {"AAA"});
    p.finalize();
    CHECK_THROWS_AS(intraday_abs_return_curve(p), refusal);
}
