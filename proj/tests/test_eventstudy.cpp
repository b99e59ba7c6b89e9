#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "jumplab/errors.hpp"
#include "jumplab/eventstudy.hpp"
#include "jumplab/synth.hpp"

using namespace jumplab;

TEST_CASE("independent streams give a flat rate ratio of 1") {
    NewsGenCfg cfg;
    cfg.n_stocks = 200;
    cfg.cal.n_days = 20;
    cfg.mu = 0.01;
    cfg.seed = 1;
    auto a = gen_news(cfg);
    cfg.seed = 2;
    auto b = gen_news(cfg);

    TradingCalendar cal = cfg.cal.make();
    int L = 40;
    EventProfile prof = conditional_rate(to_panel_events(a.truth), to_panel_events(b.truth),
                                         L, unit_curve(cal.bins_per_day()), cal, cfg.n_stocks);
    int n_outside = 0;
    for (int lag = -L; lag <= L; ++lag) {
        REQUIRE(prof.n(lag) > 1000);
        if (std::fabs(prof.at(lag) - 1.0) > 3.0 * prof.se(lag)) ++n_outside;
    }
    CHECK(n_outside <= 3);   // 81 lags at 3 sigma: expect ~0.2 excursions
}

TEST_CASE("self-conditioning peaks exactly at lag zero") {
    NewsGenCfg cfg;
    cfg.n_stocks = 100;
    cfg.cal.n_days = 10;
    cfg.mu = 0.01;
    cfg.seed = 3;
    auto r = gen_news(cfg);
    TradingCalendar cal = cfg.cal.make();
    auto ev = to_panel_events(r.truth);
    EventProfile prof = conditional_rate(ev, ev, 20, unit_curve(cal.bins_per_day()), cal,
                                         cfg.n_stocks);
    // the trigger slot is always occupied, so lag 0 reads 1/base exactly
    CHECK(prof.at(0) == doctest::Approx(1.0 / prof.base_rate).epsilon(1e-9));
    for (int lag = -20; lag <= 20; ++lag)
        if (lag != 0) CHECK(prof.at(lag) < prof.at(0));
}

TEST_CASE("cluster stream matches the exponential-kernel rate law") {
    // immigrants mu, each event spawns Poisson(n) children at Exp(omega) delays;
    // stationary rate R = mu/(1-n) and the event-conditioned excess decays as
    // n*omega*(2-n)/(2*(1-n)) * exp(-omega*(1-n)*tau) above R.
    NewsGenCfg cfg;
    cfg.n_stocks = 600;
    cfg.cal.n_days = 20;
    cfg.mu = 0.01;
    cfg.branching = 0.3;
    cfg.omega = 0.05;
    cfg.seed = 4;
    auto r = gen_news(cfg);
    TradingCalendar cal = cfg.cal.make();
    auto ev = to_panel_events(r.truth);
    int L = 40;
    EventProfile prof = conditional_rate(ev, ev, L, unit_curve(cal.bins_per_day()), cal,
                                         cfg.n_stocks);

    double R = cfg.mu / (1.0 - cfg.branching);
    CHECK(std::fabs(prof.base_rate - R) / R < 0.15);   // slot merging shaves a little

    auto expect = [&](double tau) {
        double coef = cfg.branching * cfg.omega * (2.0 - cfg.branching) /
                      (2.0 * (1.0 - cfg.branching));
        return 1.0 + coef * std::exp(-cfg.omega * (1.0 - cfg.branching) * tau) / R;
    };
    auto pooled = [&](int lo, int hi) {
        double m = 0.0, e = 0.0;
        for (int tau = lo; tau <= hi; ++tau) { m += prof.at(tau); e += expect(tau); }
        return std::pair<double, double>{m / (hi - lo + 1), e / (hi - lo + 1)};
    };
    auto [m1, e1] = pooled(1, 10);
    CHECK(std::fabs(m1 / e1 - 1.0) < 0.10);
    auto [m2, e2] = pooled(30, 40);
    CHECK(std::fabs(m2 / e2 - 1.0) < 0.10);
    // the profile is symmetric by construction of the indicator
    auto [m3, e3] = pooled(-10, -1);
    (void)e3;
    CHECK(std::fabs(m3 / e1 - 1.0) < 0.10);
}

TEST_CASE("conditional_rate input guards") {
    TradingCalendar cal = TradingCalendar::weekdays(Date{2015, 1, 5}, 2);
    std::vector<PanelEvent> ev = {{0, {0, 10}}};
    CHECK_THROWS_AS(conditional_rate({}, ev, 10, unit_curve(390), cal, 1), refusal);
    CHECK_THROWS_AS(conditional_rate(ev, ev, -1, unit_curve(390), cal, 1), input_error);
    CHECK_THROWS_AS(conditional_rate(ev, ev, 10, unit_curve(17), cal, 1), input_error);
}

static BarPanel spiky_panel(const std::vector<int>& spike_bins, double base_ret,
                            double spike_ret) {
    TradingCalendar cal = TradingCalendar::weekdays(Date{2015, 1, 5}, 1);
    BarPanel p(cal, {"AAA"});
    double price = 100.0;
    for (int64_t t = 0; t < cal.total_bins(); ++t) {
        if (t > 0) {
            bool spike = std::find(spike_bins.begin(), spike_bins.end(), int(t)) !=
                         spike_bins.end();
            price *= 1.0 + (spike ? spike_ret : base_ret);
        }
        p.set_bar(0, t, price, 1);
    }
    p.finalize();
    return p;
}

TEST_CASE("vol profile reads the planted spike at lag zero only") {
    BarPanel p = spiky_panel({101, 251}, 0.01, 0.10);
    std::vector<PanelEvent> trig = {{0, {0, 101}}, {0, {0, 251}}};
    EventProfile prof = vol_profile(trig, p, 20, unit_curve(390));
    CHECK(prof.at(0) == doctest::Approx(0.10).epsilon(1e-9));
    for (int lag = -20; lag <= 20; ++lag) {
        if (lag == 0) continue;
        CHECK(prof.at(lag) == doctest::Approx(0.01).epsilon(1e-9));
        CHECK(prof.n(lag) == 2);
    }
    CHECK_THROWS_AS(vol_profile({}, p, 20, unit_curve(390)), refusal);
}

TEST_CASE("noiseless power-law profiles are fit exactly") {
    for (double beta : {0.5, 1.0}) {
        std::vector<double> v(120);
        for (size_t i = 0; i < v.size(); ++i)
            v[i] = 1.0 + 3.0 * std::pow(double(i + 1), -beta);
        RelaxFit fit = fit_relaxation_values(v);
        CHECK(fit.converged);
        CHECK(fit.beta == doctest::Approx(beta).epsilon(1e-6));
        CHECK(fit.amplitude == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(fit.sigma_inf == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(fit.residual < 1e-9);
    }
}

TEST_CASE("relaxation fit wants a vol profile and enough lags") {
    EventProfile prof;
    prof.kind = ProfileKind::RateRatio;
    CHECK_THROWS_AS(fit_relaxation(prof), input_error);

    std::vector<double> three = {4.0, 2.0, 1.5};
    CHECK_THROWS_AS(fit_relaxation_values(three), refusal);
}

static EventProfile hand_profile(int L, double pre, double post, double inner_value,
                                 double se, int inner = 30) {
    EventProfile prof;
    prof.L = L;
    prof.kind = ProfileKind::VolRatio;
    prof.value.assign(size_t(2 * L + 1), 0.0);
    prof.stderr_.assign(size_t(2 * L + 1), se);
    prof.n_obs.assign(size_t(2 * L + 1), 100);
    for (int lag = -L; lag <= L; ++lag) {
        double v = std::abs(lag) < inner ? inner_value : (lag < 0 ? pre : post);
        prof.value[prof.index(lag)] = v;
    }
    return prof;
}

TEST_CASE("pre/post pooling ignores the inner window") {
    EventProfile prof = hand_profile(60, 1.0, 0.9, 7.0, 0.01);
    PrePost pp = pre_post_baseline(prof, 30);
    CHECK(pp.pre_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pp.post_mean == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(pp.diff() == doctest::Approx(-0.1).epsilon(1e-9));
    double se_side = 0.01 / std::sqrt(31.0);   // 31 pooled lags each side
    CHECK(pp.pre_stderr == doctest::Approx(se_side).epsilon(1e-9));
    CHECK(pp.diff_stderr() == doctest::Approx(se_side * std::sqrt(2.0)).epsilon(1e-9));

    EventProfile flat = hand_profile(60, 1.0, 1.0, 1.0, 0.01);
    CHECK(pre_post_baseline(flat, 30).diff() == doctest::Approx(0.0));

    CHECK_THROWS_AS(pre_post_baseline(hand_profile(10, 1, 1, 1, 0.01), 30), input_error);

    EventProfile gap = hand_profile(60, 1.0, 1.0, 1.0, 0.01);
    for (int lag = 30; lag <= 60; ++lag) gap.n_obs[gap.index(lag)] = 0;
    CHECK_THROWS_AS(pre_post_baseline(gap, 30), refusal);
}

TEST_CASE("profile csv round-trip") {
    EventProfile prof = hand_profile(5, 1.25, 0.75, 3.5, 0.02, 3);
    prof.n_obs[0] = 17;
    write_profile_csv("tmp_profile_rt.csv", prof);
    EventProfile back = read_profile_csv("tmp_profile_rt.csv");
    REQUIRE(back.L == prof.L);
    for (int lag = -5; lag <= 5; ++lag) {
        CHECK(back.at(lag) == doctest::Approx(prof.at(lag)).epsilon(1e-9));
        CHECK(back.se(lag) == doctest::Approx(prof.se(lag)).epsilon(1e-9));
        CHECK(back.n(lag) == prof.n(lag));
    }
    std::remove("tmp_profile_rt.csv");
}
