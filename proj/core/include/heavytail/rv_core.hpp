#pragma once

// Regular-variation calculus: Karamata representation evaluation, Karamata
// integral ratios, Potter bounds, generalized inverses, a Tauberian ratio
// check, distribution-form Karamata ratios, and a Hill-type tail index
// estimator.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "heavytail/common.hpp"
#include "heavytail/quadrature.hpp"

namespace heavytail {

struct SlowlyVaryingSpec {
    double x0 = 1.0;
    double c_limit = 1.0;
    std::function<double(double)> c_fn = [](double) { return 1.0; };
    std::function<double(double)> eps_fn = [](double) { return 0.0; };
};

struct RegVarSpec {
    double index = 0.0;  // rho
    SlowlyVaryingSpec sv;
};

struct TailIndexEstimate {
    double alpha_hat = 0.0;
    std::size_t k_used = 0;
    double stderr_ = 0.0;
};

// L(x) = c(x) exp(int_{x0}^x eps(y)/y dy); the integral is computed in log
// space where the integrand is smooth.
inline double eval_slowly_varying(const SlowlyVaryingSpec& sv, double x) {
    if (x < sv.x0) throw std::domain_error("eval below x0");
    const double I = integrate(
        [&](double s) { return sv.eps_fn(std::exp(s)); }, std::log(sv.x0), std::log(x));
    return sv.c_fn(x) * std::exp(I);
}

inline double eval_rv(const RegVarSpec& spec, double x) {
    return std::pow(x, spec.index) * eval_slowly_varying(spec.sv, x);
}

// Karamata's theorem as a ratio diagnostic; alpha = spec.index.
inline double karamata_integral_ratio(const RegVarSpec& spec, double x0, double x) {
    if (x <= x0) throw std::domain_error("need x > x0");
    const double alpha = spec.index;
    auto f = [&](double t) { return std::pow(t, alpha) * eval_slowly_varying(spec.sv, t); };
    const double Lx = eval_slowly_varying(spec.sv, x);
    if (alpha > -1.0) {
        const double num = integrate(f, x0, x);
        const double den = std::pow(x, alpha + 1.0) * Lx / (alpha + 1.0);
        return num / den;
    }
    if (alpha < -1.0) {
        const double num = integrate_to_inf(f, x);
        const double den = -std::pow(x, alpha + 1.0) * Lx / (alpha + 1.0);
        return num / den;
    }
    return integrate(f, x0, x);  // alpha == -1: slowly varying integral itself
}

struct PotterBounds {
    double lower = 0.0;
    double upper = 0.0;
};

inline PotterBounds potter_bounds(double rho, double eps, double x) {
    return {(1.0 - eps) * std::pow(x, rho - eps), (1.0 + eps) * std::pow(x, rho + eps)};
}

// Smallest grid t0 such that f(tx)/f(t) respects the Potter sandwich for
// all grid t >= t0 and x in x_grid. Returns +inf when no t0 works.
inline double potter_threshold(const RegVarSpec& spec, double eps,
                               const std::vector<double>& t_grid,
                               const std::vector<double>& x_grid) {
    double t0 = std::numeric_limits<double>::infinity();
    for (auto it = t_grid.rbegin(); it != t_grid.rend(); ++it) {
        const double t = *it;
        bool ok = true;
        const double ft = eval_rv(spec, t);
        for (double x : x_grid) {
            const double ratio = eval_rv(spec, t * x) / ft;
            const auto b = potter_bounds(spec.index, eps, x);
            if (ratio < b.lower || ratio > b.upper) {
                ok = false;
                break;
            }
        }
        if (!ok) break;
        t0 = t;
    }
    return t0;
}

// inf{s : f(s) >= y} by bisection; f nondecreasing on [lo, hi].
inline double left_continuous_inverse(const std::function<double(double)>& f, double y,
                                      double lo, double hi, double tol = 1e-12) {
    if (f(hi) < y) throw std::domain_error("bracket error: f(hi) < y");
    if (f(lo) >= y) return lo;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval below 1 ulp
        if (f(mid) >= y)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Karamata Tauberian ratio U(x) Gamma(1+alpha) / Uhat(1/x) on x_grid.
// Uhat(s) = int_0^inf exp(-sx) dU(x), computed as s int exp(-sx) U(x) dx
// (integration by parts, U(0) = 0).
inline RatioReport tauberian_laplace_check(const std::function<double(double)>& U,
                                           double alpha,
                                           const std::vector<double>& x_grid) {
    RatioReport out;
    for (double x : x_grid) {
        const double s = 1.0 / x;
        auto g = [&](double t) { return s * std::exp(-s * t) * U(t); };
        // the integrand decays on scale 1/s = x; split there for accuracy
        const double Uhat = integrate(g, 0.0, x) + integrate_to_inf(g, x);
        if (!std::isfinite(Uhat)) throw std::runtime_error("divergent Laplace integral");
        const double val = U(x) * std::tgamma(1.0 + alpha) / Uhat;
        out.push_back(make_ratio_row(x, val, 1.0));
    }
    return out;
}

// Distribution-form Karamata ratio. For beta >= alpha returns
// x^beta Fbar(x) / int_0^x y^beta F(dy) with target (beta-alpha)/alpha;
// for beta < alpha returns x^beta Fbar(x) / int_x^inf y^beta F(dy) with
// target (alpha-beta)/alpha (the ratio of positives is positive).
struct DfRatio {
    double value = 0.0;
    double target = 0.0;
};

inline DfRatio karamata_df_ratio(const std::function<double(double)>& survival,
                                 const std::function<double(double)>& density,
                                 double left_end, double alpha, double beta, double x) {
    auto integrand = [&](double y) { return std::pow(y, beta) * density(y); };
    DfRatio r;
    if (beta >= alpha) {
        const double den = integrate(integrand, left_end, x);
        r.value = std::pow(x, beta) * survival(x) / den;
        r.target = (beta - alpha) / alpha;
    } else {
        const double den = integrate_to_inf(integrand, x);
        r.value = std::pow(x, beta) * survival(x) / den;
        r.target = (alpha - beta) / alpha;
    }
    return r;
}

inline TailIndexEstimate hill_estimate(std::vector<double> sample, std::size_t k) {
    if (sample.size() <= k || k < 2) throw std::domain_error("need n > k >= 2");
    for (double v : sample)
        if (v <= 0.0) throw std::domain_error("non-positive sample value");
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    double acc = 0.0;
    const double pivot = sample[n - k - 1];
    for (std::size_t i = 0; i < k; ++i) acc += std::log(sample[n - 1 - i] / pivot);
    acc /= static_cast<double>(k);
    if (acc == 0.0) throw std::domain_error("degenerate sample: zero log-spacing");
    TailIndexEstimate e;
    e.alpha_hat = 1.0 / acc;
    e.k_used = k;
    e.stderr_ = e.alpha_hat / std::sqrt(static_cast<double>(k));
    return e;
}

}  // namespace heavytail
