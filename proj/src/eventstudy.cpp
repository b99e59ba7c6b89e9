#include "jumplab/eventstudy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"
#include "jumplab/parallel.hpp"
#include "jumplab/stats.hpp"

namespace jumplab {

namespace {

// Accumulators per lag, merged across fixed-size trigger chunks in chunk order
// so results do not depend on the number of worker threads.
struct LagSums {
    std::vector<double> sum, sumsq;
    std::vector<int64_t> n;
    explicit LagSums(int L)
        : sum(size_t(2 * L + 1), 0.0), sumsq(size_t(2 * L + 1), 0.0),
          n(size_t(2 * L + 1), 0) {}
    void merge(const LagSums& o) {
        for (size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
            n[i] += o.n[i];
        }
    }
};

constexpr size_t kChunk = 4096;

template <class PerTrigger>
LagSums accumulate_chunked(size_t n_triggers, int L, PerTrigger&& per_trigger) {
    size_t n_chunks = (n_triggers + kChunk - 1) / kChunk;
    std::vector<LagSums> partial(n_chunks, LagSums(L));
    parallel_for(n_chunks, [&](size_t c) {
        size_t lo = c * kChunk, hi = std::min(n_triggers, lo + kChunk);
        for (size_t i = lo; i < hi; ++i) per_trigger(i, partial[c]);
    });
    LagSums total(L);
    for (const auto& p : partial) total.merge(p);
    return total;
}

void finish_profile(EventProfile& prof, const LagSums& acc, double scale) {
    int L = prof.L;
    for (int lag = -L; lag <= L; ++lag) {
        size_t i = prof.index(lag);
        int64_t n = acc.n[i];
        prof.n_obs[i] = n;
        if (n == 0) continue;
        double mean = acc.sum[i] / double(n);
        prof.value[i] = mean / scale;
        if (n > 1) {
            double var = (acc.sumsq[i] - double(n) * mean * mean) / double(n - 1);
            prof.stderr_[i] = std::sqrt(std::max(0.0, var) / double(n)) / scale;
        }
    }
}

int64_t slot_key(int32_t stock, int64_t global_bin) {
    return (int64_t(stock) << 40) | global_bin;
}

} // namespace

EventProfile conditional_rate(const std::vector<PanelEvent>& trigger,
                              const std::vector<PanelEvent>& target, int L,
                              const SeasonalCurve& seasonal, const TradingCalendar& cal,
                              size_t n_stocks, ProfileKind kind) {
    if (trigger.empty()) throw refusal("no events");
    if (L < 0) throw input_error("conditional_rate: negative L");
    if (seasonal.bins() != cal.bins_per_day())
        throw input_error("conditional_rate: seasonal curve does not match calendar");

    int bpd = cal.bins_per_day();
    std::unordered_set<int64_t> ind;
    ind.reserve(target.size() * 2);
    for (const auto& e : target) ind.insert(slot_key(e.stock, cal.global_bin(e.at)));

    // Unconditional deseasonalized rate over every (stock, bin) slot; occupied
    // slots counted once, matching the indicator numerator.
    double occupied = 0.0;
    for (int64_t key : ind) {
        int b = int((key & ((int64_t(1) << 40) - 1)) % bpd);
        double c = seasonal.at(b);
        if (c > 0.0) occupied += 1.0 / c;
    }
    double base = occupied / (double(n_stocks) * double(cal.total_bins()));
    if (!(base > 0.0)) throw refusal("no events");

    EventProfile prof;
    prof.L = L;
    prof.kind = kind;
    prof.value.assign(size_t(2 * L + 1), 0.0);
    prof.stderr_.assign(size_t(2 * L + 1), 0.0);
    prof.n_obs.assign(size_t(2 * L + 1), 0);
    prof.base_rate = base;

    LagSums acc = accumulate_chunked(trigger.size(), L, [&](size_t i, LagSums& out) {
        const auto& tr = trigger[i];
        int64_t g0 = cal.global_bin(tr.at);
        for (int lag = -L; lag <= L; ++lag) {
            int b = tr.at.bin + lag;
            if (b < 0 || b >= bpd) continue;  // profiles never leave the session
            double curve = seasonal.at(b);
            if (!(curve > 0.0)) continue;     // no target mass at this intraday bin
            double contrib = ind.count(slot_key(tr.stock, g0 + lag)) ? 1.0 / curve : 0.0;
            size_t k = size_t(lag + L);
            out.sum[k] += contrib;
            out.sumsq[k] += contrib * contrib;
            ++out.n[k];
        }
    });

    double scale = kind == ProfileKind::RateRatio ? base : 1.0;
    finish_profile(prof, acc, scale);
    return prof;
}

EventProfile vol_profile(const std::vector<PanelEvent>& trigger, const BarPanel& panel,
                         int L, const SeasonalCurve& u_curve) {
    if (trigger.empty()) throw refusal("no events");
    if (L < 0) throw input_error("vol_profile: negative L");
    const auto& cal = panel.calendar();
    if (u_curve.bins() != cal.bins_per_day())
        throw input_error("vol_profile: seasonal curve does not match calendar");
    int bpd = cal.bins_per_day();

    EventProfile prof;
    prof.L = L;
    prof.kind = ProfileKind::VolRatio;
    prof.value.assign(size_t(2 * L + 1), 0.0);
    prof.stderr_.assign(size_t(2 * L + 1), 0.0);
    prof.n_obs.assign(size_t(2 * L + 1), 0);

    LagSums acc = accumulate_chunked(trigger.size(), L, [&](size_t i, LagSums& out) {
        const auto& tr = trigger[i];
        int64_t g0 = cal.global_bin(tr.at);
        for (int lag = -L; lag <= L; ++lag) {
            int b = tr.at.bin + lag;
            if (b < 0 || b >= bpd) continue;
            int64_t t = g0 + lag;
            if (!panel.ret_valid(size_t(tr.stock), t)) continue;  // masked bins skipped
            double curve = u_curve.at(b);
            if (!(curve > 0.0)) continue;
            double contrib = std::fabs(panel.ret(size_t(tr.stock), t)) / curve;
            size_t k = size_t(lag + L);
            out.sum[k] += contrib;
            out.sumsq[k] += contrib * contrib;
            ++out.n[k];
        }
    });

    finish_profile(prof, acc, 1.0);
    return prof;
}

namespace {

struct WeightedSeries {
    std::vector<double> tau, v, w;  // w = n_obs (squared sqrt-weights)
};

// Exact weighted LS for (sigma_inf, amplitude) at fixed beta; returns SSE.
double linear_solve(const WeightedSeries& s, double beta, double& sigma_inf,
                    double& amplitude) {
    double sw = 0, sx = 0, sxx = 0, sv = 0, sxv = 0;
    for (size_t i = 0; i < s.tau.size(); ++i) {
        double x = std::pow(s.tau[i], -beta);
        double w = s.w[i];
        sw += w;
        sx += w * x;
        sxx += w * x * x;
        sv += w * s.v[i];
        sxv += w * x * s.v[i];
    }
    double det = sw * sxx - sx * sx;
    if (std::fabs(det) < 1e-30) {
        sigma_inf = sv / sw;
        amplitude = 0.0;
    } else {
        sigma_inf = (sxx * sv - sx * sxv) / det;
        amplitude = (sw * sxv - sx * sv) / det;
    }
    double sse = 0;
    for (size_t i = 0; i < s.tau.size(); ++i) {
        double e = s.v[i] - sigma_inf - amplitude * std::pow(s.tau[i], -beta);
        sse += s.w[i] * e * e;
    }
    return sse;
}

RelaxFit fit_series(const WeightedSeries& s, int tau_max) {
    if (s.tau.size() < 4) throw refusal("relaxation fit: fewer than 4 usable lags");
    RelaxFit fit;
    fit.tau_max = tau_max;
    size_t evals = 0;
    auto objective = [&](double beta) {
        ++evals;
        if (beta <= 0.0 || beta > 3.0) return 1e300;
        double si, am;
        return linear_solve(s, beta, si, am);
    };
    double best_beta = 0.5, best = 1e301;
    for (double b = 0.05; b <= 3.0 + 1e-9; b += 0.05) {
        double sse = objective(b);
        if (sse < best) { best = sse; best_beta = b; }
    }
    auto nm = nelder_mead([&](const std::vector<double>& x) { return objective(x[0]); },
                          {best_beta}, 0.025, 1e-12, 400);
    fit.n_eval = evals;
    fit.converged = nm.converged && evals <= 10000;
    fit.beta = nm.x[0];
    double sw = 0;
    for (double w : s.w) sw += w;
    fit.residual = std::sqrt(linear_solve(s, fit.beta, fit.sigma_inf, fit.amplitude) / sw);
    return fit;
}

} // namespace

RelaxFit fit_relaxation(const EventProfile& profile, int tau_max) {
    if (profile.kind != ProfileKind::VolRatio)
        throw input_error("fit_relaxation: profile kind must be vol-ratio");
    tau_max = std::min(tau_max, profile.L);
    WeightedSeries s;
    for (int tau = 1; tau <= tau_max; ++tau) {
        int64_t n = profile.n(tau);
        if (n <= 0) continue;
        s.tau.push_back(double(tau));
        s.v.push_back(profile.at(tau));
        s.w.push_back(double(n));
    }
    return fit_series(s, tau_max);
}

RelaxFit fit_relaxation_values(const std::vector<double>& values,
                               const std::vector<int64_t>& n_obs) {
    WeightedSeries s;
    for (size_t i = 0; i < values.size(); ++i) {
        s.tau.push_back(double(i + 1));
        s.v.push_back(values[i]);
        s.w.push_back(n_obs.empty() ? 1.0 : double(n_obs[i]));
    }
    return fit_series(s, int(values.size()));
}

double PrePost::diff_stderr() const {
    return std::sqrt(pre_stderr * pre_stderr + post_stderr * post_stderr);
}

PrePost pre_post_baseline(const EventProfile& profile, int inner) {
    if (profile.L < inner)
        throw input_error("pre_post_baseline: profile needs at least " +
                          std::to_string(inner) + " lags each side");
    auto pool = [&](int from, int to) {
        double sum = 0, var = 0;
        int m = 0;
        for (int lag = from; lag <= to; ++lag) {
            if (profile.n(lag) == 0) continue;
            sum += profile.at(lag);
            var += profile.se(lag) * profile.se(lag);
            ++m;
        }
        if (m == 0) throw refusal("pre_post_baseline: empty lag range");
        return std::pair<double, double>(sum / m, std::sqrt(var) / m);
    };
    PrePost pp;
    auto [pm, pse] = pool(-profile.L, -inner);
    auto [qm, qse] = pool(inner, profile.L);
    pp.pre_mean = pm;
    pp.pre_stderr = pse;
    pp.post_mean = qm;
    pp.post_stderr = qse;
    return pp;
}

void write_profile_csv(const std::string& path, const EventProfile& profile) {
    std::string out = "lag,value,stderr,n_obs\n";
    for (int lag = -profile.L; lag <= profile.L; ++lag) {
        out += std::to_string(lag);
        out += ',';
        out += csv::format_double(profile.at(lag));
        out += ',';
        out += csv::format_double(profile.se(lag));
        out += ',';
        out += std::to_string(profile.n(lag));
        out += '\n';
    }
    csv::write_file(path, out);
}

EventProfile read_profile_csv(const std::string& path) {
    std::string text = csv::read_file(path);
    std::vector<int> lags;
    std::vector<double> vals, ses;
    std::vector<int64_t> ns;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (lineno == 1) {
            if (line != "lag,value,stderr,n_obs")
                throw input_error(path + ": expected header lag,value,stderr,n_obs");
            return;
        }
        if (line.empty()) return;
        auto f = csv::split_line(line);
        int lag;
        double v, se;
        int64_t n;
        if (f.size() != 4 || !csv::parse_int(f[0], lag) || !csv::parse_double(f[1], v) ||
            !csv::parse_double(f[2], se) || !csv::parse_i64(f[3], n))
            throw input_error(path + ":" + std::to_string(lineno) + ": malformed profile row");
        lags.push_back(lag);
        vals.push_back(v);
        ses.push_back(se);
        ns.push_back(n);
    });
    if (lags.empty() || lags.front() != -lags.back() || int(lags.size()) != 2 * lags.back() + 1)
        throw input_error(path + ": profile lags must be symmetric around 0");
    EventProfile prof;
    prof.L = lags.back();
    prof.value = std::move(vals);
    prof.stderr_ = std::move(ses);
    prof.n_obs = std::move(ns);
    return prof;
}

} // namespace jumplab
