#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace jumplab {

/// Mean and (unbiased) standard error of the mean. n==0 -> {0,0}; n==1 -> stderr 0.
struct MeanErr { double mean = 0.0, stderr_ = 0.0; size_t n = 0; };
MeanErr mean_stderr(const std::vector<double>& xs);

/// Wilson 95% confidence half-width for a binomial proportion (k successes of n).
/// Returns half the interval width; stays positive for k==0 and k==n, unlike Wald.
double wilson_halfwidth95(size_t k, size_t n);

/// Hill tail-exponent fit on the k largest values of xs (xs need not be sorted;
/// non-positive entries are ignored). Returns {alpha, stderr}; requires k >= 2
/// and positive log-spread, else returns {0, 0}.
struct HillPoint { double alpha = 0.0, stderr_ = 0.0; size_t k = 0; };
HillPoint hill_at(const std::vector<double>& xs_desc_sorted, size_t k);

/// One-sample Kolmogorov-Smirnov p-value for "these are i.i.d. Uniform(0,1)".
/// Test any continuous law by passing u_i = F(x_i). Asymptotic Kolmogorov
/// distribution with the Stephens finite-n correction.
double ks_uniform_pvalue(std::vector<double> u);

/// Nelder-Mead minimization in d dimensions (d = x0.size()).
/// Simple adaptive simplex; terminates when the simplex collapses below `tol`
/// in both objective spread and parameter spread, or after max_iter iterations.
struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    size_t n_eval = 0;
    bool converged = false;
};
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, double step, double tol = 1e-10,
                     size_t max_iter = 2000);

} // namespace jumplab
