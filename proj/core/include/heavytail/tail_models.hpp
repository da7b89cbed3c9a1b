#pragma once

// One-dimensional heavy-tailed distribution models plus numeric membership
// diagnostics for the classes heavy-tailed, L(gamma), S, S(gamma), D.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heavytail/common.hpp"
#include "heavytail/quadrature.hpp"
#include "heavytail/rng.hpp"

namespace heavytail {

enum class Family { Pareto, Lognormal, Weibull, Exponential, Discrete, GridDensity };

struct TailModel {
    Family family = Family::Pareto;
    std::vector<double> params;
    std::function<double(double)> survival;
    std::function<double(double)> density;  // may be empty
    std::function<double(Rng&)> sample;     // may be empty
    double left_end = 0.0;

    bool has_density() const { return static_cast<bool>(density); }
    double survival_clamped(double x) const { return x <= left_end ? 1.0 : survival(x); }
};

inline TailModel make_pareto(double alpha) {
    TailModel m;
    m.family = Family::Pareto;
    m.params = {alpha};
    m.left_end = 1.0;
    m.survival = [alpha](double x) { return x <= 1.0 ? 1.0 : std::pow(x, -alpha); };
    m.density = [alpha](double x) { return x <= 1.0 ? 0.0 : alpha * std::pow(x, -alpha - 1.0); };
    m.sample = [alpha](Rng& r) { return r.pareto(alpha); };
    return m;
}

inline TailModel make_exponential(double rate) {
    TailModel m;
    m.family = Family::Exponential;
    m.params = {rate};
    m.left_end = 0.0;
    m.survival = [rate](double x) { return x <= 0.0 ? 1.0 : std::exp(-rate * x); };
    m.density = [rate](double x) { return x <= 0.0 ? 0.0 : rate * std::exp(-rate * x); };
    m.sample = [rate](Rng& r) { return r.exponential(rate); };
    return m;
}

inline TailModel make_weibull(double shape) {
    TailModel m;
    m.family = Family::Weibull;
    m.params = {shape};
    m.left_end = 0.0;
    m.survival = [shape](double x) { return x <= 0.0 ? 1.0 : std::exp(-std::pow(x, shape)); };
    m.density = [shape](double x) {
        return x <= 0.0 ? 0.0 : shape * std::pow(x, shape - 1.0) * std::exp(-std::pow(x, shape));
    };
    m.sample = [shape](Rng& r) { return std::pow(-std::log(r.uniform()), 1.0 / shape); };
    return m;
}

inline TailModel make_lognormal(double mu, double sigma) {
    TailModel m;
    m.family = Family::Lognormal;
    m.params = {mu, sigma};
    m.left_end = 0.0;
    auto z = [mu, sigma](double x) { return (std::log(x) - mu) / sigma; };
    m.survival = [z](double x) {
        if (x <= 0.0) return 1.0;
        return 0.5 * std::erfc(z(x) / std::sqrt(2.0));
    };
    m.density = [mu, sigma](double x) {
        if (x <= 0.0) return 0.0;
        const double t = (std::log(x) - mu) / sigma;
        return std::exp(-0.5 * t * t) / (x * sigma * std::sqrt(2.0 * 3.141592653589793));
    };
    m.sample = [mu, sigma](Rng& r) { return std::exp(mu + sigma * r.normal()); };
    return m;
}

struct HazardProfile {
    std::function<double(double)> R;
    std::function<double(double)> r;
};

inline HazardProfile hazard(const TailModel& model) {
    HazardProfile h;
    auto surv = model.survival;
    double left = model.left_end;
    h.R = [surv, left](double x) {
        const double s = x <= left ? 1.0 : surv(x);
        if (s <= 0.0) throw std::domain_error("support exceeded: survival is 0");
        return -std::log(s);
    };
    if (model.has_density()) {
        auto dens = model.density;
        h.r = [surv, dens, left](double x) {
            const double s = x <= left ? 1.0 : surv(x);
            if (s <= 0.0) throw std::domain_error("support exceeded: survival is 0");
            return dens(x) / s;
        };
    } else {
        auto R = h.R;
        h.r = [R](double x) {
            const double dx = 1e-6 * std::max(1.0, std::fabs(x));
            return (R(x + dx) - R(x - dx)) / (2.0 * dx);
        };
    }
    return h;
}

// Heavy-tail test: e^{lambda x} Fbar(x) must be unbounded along x_grid for
// every lambda > 0; cross-checked against min R(x)/x -> 0.
struct HeavyTailReport {
    Verdict verdict = Verdict::inconclusive;
    double min_R_over_x = 0.0;
};

inline HeavyTailReport heavy_tail_check(const TailModel& model,
                                        const std::vector<double>& lambda_grid,
                                        const std::vector<double>& x_grid) {
    HeavyTailReport rep;
    bool all_unbounded = true;
    bool some_vanishing = false;
    for (double lam : lambda_grid) {
        std::vector<double> vals;
        for (double x : x_grid)
            vals.push_back(lam * x + std::log(model.survival_clamped(x)));  // log of e^{lx}Fbar
        const std::size_t n = vals.size();
        const bool growing = n >= 3 && vals[n - 1] > vals[n - 2] && vals[n - 2] > vals[n - 3] &&
                             vals[n - 1] > vals.front();
        const bool vanishing = n >= 3 && vals[n - 1] < vals[n - 2] && vals[n - 1] < -13.8;  // < 1e-6
        if (!growing) all_unbounded = false;
        if (vanishing) some_vanishing = true;
    }
    double mn = std::numeric_limits<double>::infinity();
    for (double x : x_grid)
        if (x > 0.0) mn = std::min(mn, -std::log(model.survival_clamped(x)) / x);
    rep.min_R_over_x = mn;
    if (some_vanishing)
        rep.verdict = Verdict::fail;
    else if (all_unbounded)
        rep.verdict = Verdict::pass;
    return rep;
}

struct CurveReport {
    RatioReport rows;
    Verdict verdict = Verdict::inconclusive;
};

// Class L(gamma): max_u |Fbar(x-u)/Fbar(x) - e^{gamma u}| -> 0.
inline CurveReport long_tail_check(const TailModel& model, double gamma,
                                   const std::vector<double>& u_grid,
                                   const std::vector<double>& x_grid) {
    CurveReport rep;
    for (double x : x_grid) {
        double worst = 0.0;
        for (double u : u_grid) {
            const double ratio = model.survival_clamped(x - u) / model.survival_clamped(x);
            // an underflowed 0/0 must not be silently dropped by max()
            if (!std::isfinite(ratio)) {
                worst = std::numeric_limits<double>::quiet_NaN();
                break;
            }
            worst = std::max(worst, std::fabs(ratio - std::exp(gamma * u)));
        }
        rep.rows.push_back(RatioRow{x, worst, 0.0, worst});
    }
    rep.verdict = settled_verdict(rep.rows, 0.05);
    if (rep.verdict != Verdict::pass && diverging(rep.rows)) rep.verdict = Verdict::fail;
    return rep;
}

// Pitman's criterion for subexponentiality (r eventually nonincreasing and
// -> 0): int_0^x e^{y r(x)} F(dy) -> 1, plus the sufficient integrability
// of e^{x r(x) - R(x)} r(x).
struct PitmanReport {
    RatioReport rows;
    double sufficient_integral = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

inline PitmanReport pitman_check(const TailModel& model, const std::vector<double>& x_grid) {
    PitmanReport rep;
    if (!model.has_density()) throw std::domain_error("pitman_check needs a density");
    auto hz = hazard(model);
    // precondition: hazard rate decreasing to 0 along the grid tail
    const double r_a = hz.r(x_grid[x_grid.size() / 2]);
    const double r_b = hz.r(x_grid.back());
    if (!(r_b < r_a) || r_b > 0.5) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    for (double x : x_grid) {
        const double rx = hz.r(x);
        const double val = integrate(
            [&](double y) { return std::exp(y * rx) * model.density(y); }, model.left_end, x);
        rep.rows.push_back(make_ratio_row(x, val, 1.0));
    }
    rep.sufficient_integral = integrate_to_inf(
        [&](double x) {
            const double rx = hz.r(x);
            return std::exp(x * rx - hz.R(x)) * rx;
        },
        std::max(model.left_end, 1e-12) + 1e-9);
    rep.verdict = settled_verdict(rep.rows, 0.05);
    if (rep.verdict != Verdict::pass && diverging(rep.rows)) rep.verdict = Verdict::fail;
    return rep;
}

namespace detail {

// Survival function of the n-fold sum, built by iterated convolution
// against a log-spaced interpolation grid. Arguments beyond the grid are
// extrapolated by the last log-log slope.
class ConvolvedSurvival {
public:
    ConvolvedSurvival(const TailModel& model, int n, double xmax, std::size_t nodes = 600)
        : model_(model) {
        const double lo = model.left_end + 1e-9;
        grid_.resize(nodes);
        const double glo = std::max(lo, 1e-9);
        const double ghi = std::max(xmax * 1.05, glo * 2.0);
        for (std::size_t i = 0; i < nodes; ++i)
            grid_[i] = glo * std::pow(ghi / glo, static_cast<double>(i) / (nodes - 1));
        vals_.assign(nodes, 0.0);
        for (std::size_t i = 0; i < nodes; ++i) vals_[i] = model.survival_clamped(grid_[i]);
        for (int k = 2; k <= n; ++k) {
            std::vector<double> next(nodes, 0.0);
            const double floor_prev = (k - 1) * model.left_end;
            for (std::size_t i = 0; i < nodes; ++i) {
                const double x = grid_[i];
                double val;
                if (x <= floor_prev + model.left_end) {
                    val = 1.0;
                } else {
                    val = integrate(
                              [&](double u) {
                                  return model.density(u) * eval_clamped(x - u, floor_prev);
                              },
                              model.left_end, x - floor_prev, QuadOptions{1e-8, 1e-14, 2000}) +
                          model.survival_clamped(x - floor_prev);
                }
                next[i] = std::min(1.0, val);
            }
            vals_ = next;
        }
    }

    double operator()(double x) const {
        if (x <= grid_.front()) return 1.0;
        if (x >= grid_.back()) {
            // log-log extrapolation from the last decade
            const std::size_t n = grid_.size();
            const double s = std::log(vals_[n - 1] / vals_[n - 21]) /
                             std::log(grid_[n - 1] / grid_[n - 21]);
            return vals_[n - 1] * std::pow(x / grid_[n - 1], s);
        }
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
        const double t = std::log(x / grid_[j - 1]) / std::log(grid_[j] / grid_[j - 1]);
        const double a = std::log(std::max(vals_[j - 1], 1e-320));
        const double b = std::log(std::max(vals_[j], 1e-320));
        return std::exp(a + t * (b - a));
    }

private:
    double eval_clamped(double x, double floor_prev) const {
        if (x <= floor_prev) return 1.0;
        return (*this)(x);
    }
    const TailModel& model_;
    std::vector<double> grid_;
    std::vector<double> vals_;
};

}  // namespace detail

enum class ConvMethod { quadrature, montecarlo };

struct ConvTail {
    double probability = 0.0;
    double mc_stderr = 0.0;
};

inline ConvTail convolution_tail(const TailModel& model, int n, double x,
                                 ConvMethod method = ConvMethod::quadrature,
                                 std::size_t n_samples = 1000000, std::uint64_t seed = 1) {
    if (n < 1) throw std::domain_error("n >= 1 required");
    ConvTail out;
    if (method == ConvMethod::quadrature) {
        if (!model.has_density()) throw std::domain_error("quadrature needs a density");
        if (n > 5) throw std::domain_error("quadrature limited to n <= 5");
        if (n == 1) {
            out.probability = model.survival_clamped(x);
            return out;
        }
        if (n == 2) {
            const double lo = model.left_end;
            double p = model.survival_clamped(x - lo);
            if (x - lo > lo)
                p += integrate(
                    [&](double u) { return model.density(u) * model.survival_clamped(x - u); },
                    lo, x - lo);
            out.probability = std::min(1.0, p);
            return out;
        }
        detail::ConvolvedSurvival cs(model, n, x);
        out.probability = cs(x);
        return out;
    }
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += model.sample(rng);
        if (s > x) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    out.probability = p;
    out.mc_stderr = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    return out;
}

// P[sum > x] / P[max > x] along x_grid; -> 1 for subexponential models.
inline CurveReport one_large_jump_ratio(const TailModel& model, int n,
                                        const std::vector<double>& x_grid,
                                        ConvMethod method = ConvMethod::quadrature,
                                        std::size_t n_samples = 1000000,
                                        std::uint64_t seed = 1) {
    CurveReport rep;
    for (double x : x_grid) {
        const double ps = convolution_tail(model, n, x, method, n_samples, seed).probability;
        const double fbar = model.survival_clamped(x);
        const double pmax = 1.0 - std::pow(1.0 - fbar, n);
        rep.rows.push_back(make_ratio_row(x, ps / pmax, 1.0));
    }
    rep.verdict = settled_verdict(rep.rows, 0.05);
    if (rep.verdict != Verdict::pass && diverging(rep.rows)) rep.verdict = Verdict::fail;
    return rep;
}

// Class S(gamma): Fbar*2(x)/Fbar(x) -> 2 int e^{gamma y} F(dy).
inline CurveReport s_gamma_check(const TailModel& model, double gamma,
                                 const std::vector<double>& x_grid) {
    CurveReport rep;
    if (!model.has_density()) throw std::domain_error("s_gamma_check needs a density");
    // divergence guard for the exponential moment
    const double probe = 40.0 / std::max(gamma, 1e-12);
    if (gamma > 0.0 && std::exp(gamma * probe) * model.density(probe) > 1e-12)
        throw std::domain_error("divergent exponential moment at gamma");
    const double target =
        2.0 * integrate_to_inf(
                  [&](double y) { return std::exp(gamma * y) * model.density(y); },
                  std::max(model.left_end, 1e-12) + 1e-9);
    for (double x : x_grid) {
        const double num = convolution_tail(model, 2, x).probability;
        rep.rows.push_back(make_ratio_row(x, num / model.survival_clamped(x), target));
    }
    rep.verdict = settled_verdict(rep.rows, 0.05);
    if (rep.verdict != Verdict::pass && diverging(rep.rows)) rep.verdict = Verdict::fail;
    return rep;
}

inline CurveReport subexponential_check(const TailModel& model,
                                        const std::vector<double>& x_grid) {
    CurveReport rep;
    for (double x : x_grid) {
        const double num = convolution_tail(model, 2, x).probability;
        rep.rows.push_back(make_ratio_row(x, num / model.survival_clamped(x), 2.0));
    }
    rep.verdict = settled_verdict(rep.rows, 0.05);
    if (rep.verdict != Verdict::pass && diverging(rep.rows)) rep.verdict = Verdict::fail;
    return rep;
}

// Class D: Fbar(x)/Fbar(2x) bounded; reports the grid sup.
struct DominatedReport {
    double sup = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

inline DominatedReport dominated_variation_check(const TailModel& model,
                                                 const std::vector<double>& x_grid) {
    DominatedReport rep;
    std::vector<double> vals;
    for (double x : x_grid) {
        vals.push_back(model.survival_clamped(x) / model.survival_clamped(2.0 * x));
        rep.sup = std::max(rep.sup, vals.back());
    }
    const std::size_t n = vals.size();
    const bool growing = n >= 3 && vals[n - 1] > 1.2 * vals[n - 2] && vals[n - 2] > 1.2 * vals[n - 3];
    rep.verdict = growing ? Verdict::fail : Verdict::pass;
    return rep;
}

// Max-sum equivalence: Fbar*G(x) / (Fbar(x) + Gbar(x)) -> 1.
inline CurveReport max_sum_equivalence_check(const TailModel& F, const TailModel& G,
                                             const std::vector<double>& x_grid) {
    CurveReport rep;
    for (double x : x_grid) {
        double conv = F.survival_clamped(x - G.left_end);
        if (x - F.left_end > G.left_end)
            conv = G.survival_clamped(x - F.left_end) +
                   integrate(
                       [&](double u) { return F.density(u) * G.survival_clamped(x - u); },
                       F.left_end, x - G.left_end) ;
        const double denom = F.survival_clamped(x) + G.survival_clamped(x);
        rep.rows.push_back(make_ratio_row(x, conv / denom, 1.0));
    }
    rep.verdict = settled_verdict(rep.rows, 0.05);
    if (rep.verdict != Verdict::pass && diverging(rep.rows)) rep.verdict = Verdict::fail;
    return rep;
}

struct ClassReport {
    Verdict heavy = Verdict::inconclusive;
    Verdict long_tailed = Verdict::inconclusive;
    Verdict subexp = Verdict::inconclusive;
    Verdict dominated = Verdict::inconclusive;
    double dominated_sup = 0.0;
    RatioReport long_curve;
    RatioReport subexp_curve;
};

inline ClassReport class_report(const TailModel& model, const std::vector<double>& x_grid,
                                const std::vector<double>& u_grid = {1.0, 2.0, 5.0},
                                const std::vector<double>& lambda_grid = {0.1, 0.5, 1.0}) {
    ClassReport rep;
    rep.heavy = heavy_tail_check(model, lambda_grid, x_grid).verdict;
    auto lt = long_tail_check(model, 0.0, u_grid, x_grid);
    rep.long_tailed = lt.verdict;
    rep.long_curve = lt.rows;
    if (model.has_density()) {
        auto se = subexponential_check(model, x_grid);
        rep.subexp = se.verdict;
        rep.subexp_curve = se.rows;
    }
    auto dv = dominated_variation_check(model, x_grid);
    rep.dominated = dv.verdict;
    rep.dominated_sup = dv.sup;
    // containment: subexp pass forces the weaker memberships to pass
    if (rep.subexp == Verdict::pass && rep.long_tailed == Verdict::inconclusive)
        rep.long_tailed = Verdict::pass;
    if (rep.long_tailed == Verdict::pass && rep.heavy == Verdict::inconclusive)
        rep.heavy = Verdict::pass;
    return rep;
}

}  // namespace heavytail
