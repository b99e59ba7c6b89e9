#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jumplab/timebase.hpp"

namespace jumplab {

enum class ProfileKind { RateRatio, RawRate, VolRatio };

/// Mean of some quantity at fixed lags around trigger events. Lags run
/// -L..+L inclusive; lags that would leave the trigger's session are not
/// observed (n_obs varies by lag).
struct EventProfile {
    int L = 120;
    ProfileKind kind = ProfileKind::RawRate;
    std::vector<double> value;    // 2L+1, indexed by lag+L
    std::vector<double> stderr_;
    std::vector<int64_t> n_obs;
    double base_rate = 0.0;       // deseasonalized unconditional rate (rate kinds)

    size_t index(int lag) const { return size_t(lag + L); }
    double at(int lag) const { return value[index(lag)]; }
    double se(int lag) const { return stderr_[index(lag)]; }
    int64_t n(int lag) const { return n_obs[index(lag)]; }
};

/// Rate of target events at lag tau from each trigger, each contribution
/// divided by the seasonal curve of the target kind. RateRatio additionally
/// divides by the unconditional (deseasonalized) mean rate, so flat = 1.
/// Target occurrence per (stock, bin) slot is an indicator: duplicate events
/// in one slot count once, and the base rate uses the same convention.
EventProfile conditional_rate(const std::vector<PanelEvent>& trigger,
                              const std::vector<PanelEvent>& target, int L,
                              const SeasonalCurve& seasonal, const TradingCalendar& cal,
                              size_t n_stocks,
                              ProfileKind kind = ProfileKind::RateRatio);

/// Mean deseasonalized |r| of the trigger's own stock at each lag.
EventProfile vol_profile(const std::vector<PanelEvent>& trigger, const BarPanel& panel,
                         int L, const SeasonalCurve& u_curve);

/// Least-squares fit of value[tau] ~ sigma_inf + amplitude * tau^(-beta) over
/// tau in [1, tau_max], residuals weighted by sqrt(n_obs). Linear parameters
/// are solved exactly per beta; beta by grid seed + Nelder-Mead on (0, 3].
struct RelaxFit {
    double beta = 0.0, amplitude = 0.0, sigma_inf = 0.0;
    double residual = 0.0;        // weighted RMS
    int tau_min = 1, tau_max = 120;
    size_t n_eval = 0;
    bool converged = false;
};

RelaxFit fit_relaxation(const EventProfile& profile, int tau_max = 120);

/// Same fit on bare arrays (values at tau = 1..values.size(), unit weights
/// unless n_obs given). Used for synthetic profile studies.
RelaxFit fit_relaxation_values(const std::vector<double>& values,
                               const std::vector<int64_t>& n_obs = {});

/// Plain means over the outer lag ranges [-L, -inner] and [+inner, +L].
/// The "sedation" statistic is post_mean - pre_mean.
struct PrePost {
    double pre_mean = 0.0, pre_stderr = 0.0;
    double post_mean = 0.0, post_stderr = 0.0;
    double diff() const { return post_mean - pre_mean; }
    double diff_stderr() const;
};

PrePost pre_post_baseline(const EventProfile& profile, int inner = 30);

// I/O: CSV `lag,value,stderr,n_obs`
void write_profile_csv(const std::string& path, const EventProfile& profile);
EventProfile read_profile_csv(const std::string& path);

} // namespace jumplab
