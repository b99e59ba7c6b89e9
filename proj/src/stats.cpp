#include "jumplab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace jumplab {

MeanErr mean_stderr(const std::vector<double>& xs) {
    MeanErr r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / double(r.n);
    if (r.n == 1) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(ss / double(r.n - 1) / double(r.n));
    return r;
}

double wilson_halfwidth95(size_t k, size_t n) {
    if (n == 0) return 0.0;
    const double z = 1.959963984540054;  // 97.5% normal quantile
    double nn = double(n), p = double(k) / nn, z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return half;
}

HillPoint hill_at(const std::vector<double>& xs_desc, size_t k) {
    HillPoint h;
    if (k < 2 || k > xs_desc.size()) return h;
    double xk = xs_desc[k - 1];
    if (!(xk > 0.0)) return h;
    double s = 0.0;
    for (size_t i = 0; i < k; ++i) s += std::log(xs_desc[i]);
    double gamma = s / double(k) - std::log(xk);
    if (!(gamma > 0.0)) return h;
    h.alpha = 1.0 / gamma;
    h.stderr_ = h.alpha / std::sqrt(double(k));
    h.k = k;
    return h;
}

double ks_uniform_pvalue(std::vector<double> u) {
    size_t n = u.size();
    if (n == 0) return 1.0;
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        d = std::max(d, double(i + 1) / double(n) - u[i]);
        d = std::max(d, u[i] - double(i) / double(n));
    }
    double sn = std::sqrt(double(n));
    double lam = (sn + 0.12 + 0.11 / sn) * d;
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * (j % 2 ? 1.0 : -1.0) * std::exp(-2.0 * double(j) * j * lam * lam);
        p += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, p));
}

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, double step, double tol, size_t max_iter) {
    const size_t d = x0.size();
    struct Vertex { std::vector<double> x; double fx; };
    std::vector<Vertex> simplex(d + 1);
    NmResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.n_eval;
        return f(x);
    };
    simplex[0] = {x0, eval(x0)};
    for (size_t i = 0; i < d; ++i) {
        auto x = x0;
        x[i] += step;
        simplex[i + 1] = {x, eval(x)};
    }
    auto by_fx = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };

    for (size_t it = 0; it < max_iter; ++it) {
        std::sort(simplex.begin(), simplex.end(), by_fx);
        // convergence: objective spread and simplex diameter both below tol
        double fspread = std::fabs(simplex.back().fx - simplex.front().fx);
        double xspread = 0.0;
        for (size_t i = 0; i < d; ++i)
            xspread = std::max(xspread,
                               std::fabs(simplex.back().x[i] - simplex.front().x[i]));
        if (fspread < tol && xspread < tol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(d, 0.0);
        for (size_t v = 0; v < d; ++v)
            for (size_t i = 0; i < d; ++i) centroid[i] += simplex[v].x[i] / double(d);
        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (size_t i = 0; i < d; ++i)
                x[i] = centroid[i] + coef * (simplex.back().x[i] - centroid[i]);
            return x;
        };
        auto xr = blend(-1.0);
        double fr = eval(xr);
        if (fr < simplex[0].fx) {
            auto xe = blend(-2.0);
            double fe = eval(xe);
            if (fe < fr) simplex.back() = {xe, fe};
            else simplex.back() = {xr, fr};
        } else if (fr < simplex[d - 1].fx) {
            simplex.back() = {xr, fr};
        } else {
            auto xc = blend(0.5);
            double fc = eval(xc);
            if (fc < simplex.back().fx) {
                simplex.back() = {xc, fc};
            } else {
                // shrink toward the best vertex
                for (size_t v = 1; v <= d; ++v) {
                    for (size_t i = 0; i < d; ++i)
                        simplex[v].x[i] =
                            simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].fx = eval(simplex[v].x);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_fx);
    res.x = simplex[0].x;
    res.fx = simplex[0].fx;
    return res;
}

} // namespace jumplab
