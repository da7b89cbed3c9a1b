#pragma once

// Tail behavior of randomly weighted series sum_t Theta_t X_t: condition
// audits (RW, modified RW, DZ), Breiman products, predicted vs. simulated
// series tails, Mellin non-vanishing, product convolution of measures, and
// the converse counterexample built from an oscillating density.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heavytail/common.hpp"
#include "heavytail/quadrature.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/tail_models.hpp"

namespace heavytail {

using cplx = std::complex<double>;

struct WeightSequence {
    // E[Theta_t^s] for complex s
    std::function<cplx(int, cplx)> moment;
    // draw Theta_t
    std::function<double(int, Rng&)> sampler;
    // P[Theta_t > x]; optional, used for C_t audits
    std::function<double(int, double)> survival;
    int truncation = 0;
    std::string family;
};

// Theta_t = r^t, deterministic
inline WeightSequence make_geometric_weights(double r, int T) {
    WeightSequence w;
    w.family = "geometric";
    w.truncation = T;
    w.moment = [r](int t, cplx s) { return std::exp(s * (static_cast<double>(t) * std::log(r))); };
    w.sampler = [r](int t, Rng&) { return std::pow(r, t); };
    w.survival = [r](int t, double x) { return x < std::pow(r, t) ? 1.0 : 0.0; };
    return w;
}

// Theta_t = 2^t t^{-2/alpha} with probability 2^{-t alpha}, else 0
inline WeightSequence make_sparse_blowup_weights(double alpha, int T) {
    WeightSequence w;
    w.family = "sparse-blowup";
    w.truncation = T;
    w.moment = [alpha](int t, cplx s) {
        const double td = static_cast<double>(t);
        // 2^{-t alpha} * (2^t t^{-2/alpha})^s
        const cplx logv = s * (td * std::log(2.0) - (2.0 / alpha) * std::log(td)) -
                          td * alpha * std::log(2.0);
        return std::exp(logv);
    };
    w.sampler = [alpha](int t, Rng& rng) {
        const double td = static_cast<double>(t);
        if (rng.bernoulli(std::pow(2.0, -td * alpha)))
            return std::pow(2.0, td) * std::pow(td, -2.0 / alpha);
        return 0.0;
    };
    w.survival = [alpha](int t, double x) {
        const double td = static_cast<double>(t);
        const double v = std::pow(2.0, td) * std::pow(td, -2.0 / alpha);
        return x < v ? std::pow(2.0, -td * alpha) : 0.0;
    };
    return w;
}

inline WeightSequence make_constant_weight(double c) {
    WeightSequence w;
    w.family = "constant";
    w.truncation = 1;
    w.moment = [c](int, cplx s) { return std::exp(s * std::log(c)); };
    w.sampler = [c](int, Rng&) { return c; };
    w.survival = [c](int, double x) { return x < c ? 1.0 : 0.0; };
    return w;
}

namespace detail {

// Sum_{t=1}^inf a(t) for eventually monotone positive terms: partial sum to
// t_max plus a geometric or power tail estimate from the final terms.
struct SeriesSum {
    double value = 0.0;
    double tail_estimate = 0.0;
    bool convergent = true;
    int divergence_t = 0;
};

inline SeriesSum sum_series(const std::function<double(int)>& a, int t_max = 200000) {
    SeriesSum s;
    double prev = 0.0;
    int t = 1;
    for (; t <= t_max; ++t) {
        const double v = a(t);
        const bool nondecreasing = t > 8 && prev > 0.0 && v >= prev;
        if (!std::isfinite(v) ||
            (nondecreasing && v > 1e-12 * std::max(s.value, 1.0))) {
            s.convergent = false;
            s.divergence_t = t;
            return s;
        }
        s.value += v;
        if (t > 16 && v < 1e-17 * s.value) break;
        prev = v;
    }
    if (t > t_max) t = t_max;
    const double aT = a(t);
    const double aT1 = a(t - 1);
    if (aT <= 0.0 || aT1 <= 0.0) return s;
    const double r = aT / aT1;
    if (r < 0.9) {
        s.tail_estimate = aT * r / (1.0 - r);
    } else {
        // power decay a_t ~ C t^{-p}
        const double p = std::log(aT1 / aT) / std::log(static_cast<double>(t) / (t - 1));
        if (p <= 1.0) {
            s.convergent = false;
            s.divergence_t = t;
            return s;
        }
        const double C = aT * std::pow(static_cast<double>(t), p);
        s.tail_estimate = C * std::pow(static_cast<double>(t) + 0.5, 1.0 - p) / (p - 1.0);
    }
    s.value += s.tail_estimate;
    return s;
}

}  // namespace detail

struct ConditionAudit {
    Verdict rw = Verdict::inconclusive;
    Verdict rw_prime = Verdict::inconclusive;
    double eps_used = 0.0;
    double rw_sum = 0.0;
    double rw_prime_sum = 0.0;
    int offending_t = 0;
};

// RW (alpha<1): sum E[T^{a+e} + T^{a-e}] < inf; RW (alpha>=1): sum of the
// same terms to the power 1/(alpha+eps). Modified RW swaps in E[T^alpha].
inline ConditionAudit rw_condition_audit(const WeightSequence& w, double alpha, double eps) {
    if (!(eps > 0.0 && eps < alpha)) throw std::domain_error("need 0 < eps < alpha");
    ConditionAudit audit;
    audit.eps_used = eps;
    auto both_moments = [&](int t) {
        const double up = std::abs(w.moment(t, cplx(alpha + eps, 0.0)));
        const double dn = std::abs(w.moment(t, cplx(alpha - eps, 0.0)));
        return up + dn;
    };
    auto rw_term = [&](int t) {
        const double m = both_moments(t);
        return alpha < 1.0 ? m : std::pow(m, 1.0 / (alpha + eps));
    };
    auto rwp_term = [&](int t) {
        const double m = std::abs(w.moment(t, cplx(alpha, 0.0)));
        return alpha < 1.0 ? m : std::pow(m, 1.0 / (alpha + eps));
    };
    auto s1 = detail::sum_series(rw_term);
    audit.rw = s1.convergent ? Verdict::pass : Verdict::fail;
    audit.rw_sum = s1.value;
    if (!s1.convergent) audit.offending_t = s1.divergence_t;
    auto s2 = detail::sum_series(rwp_term);
    audit.rw_prime = s2.convergent ? Verdict::pass : Verdict::fail;
    audit.rw_prime_sum = s2.value;
    return audit;
}

// Sum_t E[Theta_t^alpha] with tail extrapolation.
inline detail::SeriesSum weight_moment_series(const WeightSequence& w, double alpha) {
    return detail::sum_series(
        [&](int t) { return std::abs(w.moment(t, cplx(alpha, 0.0))); });
}

struct DzAudit {
    double D1 = 0.0;
    Verdict dz1 = Verdict::inconclusive;
    double D2 = 0.0;
    Verdict dz4 = Verdict::inconclusive;
    std::vector<double> ct;       // C_t = sup_x P[Theta_t > x]/P[X_1 > x]
    Verdict ct_summable = Verdict::inconclusive;
    bool ct_estimated = false;    // grid estimate rather than closed form
};

// DZ audit pieces that are checkable numerically: the slowly varying sups
// D1 (y in [1,x]) and D2 (y in [sqrt(x),x]), and the C_t tail-domination
// constants with their summability condition.
inline DzAudit dz_condition_audit(const std::function<double(double)>& L,
                                  const WeightSequence& w, const TailModel& innovation,
                                  double alpha, double eps = 0.1) {
    DzAudit a;
    const std::vector<double> xs = {1e2, 1e4, 1e6, 1e8, 1e10, 1e12};
    double d1 = 0.0, d2 = 0.0;
    bool d1_growing = false;
    double d1_prev = 0.0;
    for (double x : xs) {
        double s1 = 0.0, s2 = 0.0;
        const double lx = L(x);
        for (int i = 0; i <= 200; ++i) {
            const double y1 = std::pow(x, i / 200.0);                // [1, x]
            const double y2 = std::pow(x, 0.5 + 0.5 * i / 200.0);    // [sqrt(x), x]
            s1 = std::max(s1, L(y1) / lx);
            s2 = std::max(s2, L(y2) / lx);
        }
        if (s1 > 2.0 * d1_prev && d1_prev > 0.0) d1_growing = true;
        d1_prev = s1;
        d1 = std::max(d1, s1);
        d2 = std::max(d2, s2);
    }
    a.D1 = d1;
    a.D2 = d2;
    a.dz1 = d1_growing ? Verdict::fail : Verdict::pass;
    a.dz4 = Verdict::pass;
    // C_t via the weight survival when available, on an x grid sup
    if (w.survival) {
        for (int t = 1; t <= w.truncation; ++t) {
            double ct = 0.0;
            for (int i = 0; i <= 400; ++i) {
                const double x = std::pow(10.0, -2.0 + 12.0 * i / 400.0);
                const double num = w.survival(t, x);
                if (num > 0.0) ct = std::max(ct, num / innovation.survival_clamped(x));
            }
            a.ct.push_back(ct);
        }
        a.ct_estimated = true;
        auto term = [&](int t) {
            const double c = a.ct[static_cast<std::size_t>(t - 1)];
            return alpha < 1.0 ? c : std::pow(c, 1.0 / (alpha + eps));
        };
        double acc = 0.0;
        bool grew = false;
        for (int t = 1; t <= static_cast<int>(a.ct.size()); ++t) {
            acc += term(t);
            if (t > 4 && term(t) >= term(t - 1) && term(t) > 1e-9) grew = true;
        }
        a.ct_summable = grew ? Verdict::inconclusive : Verdict::pass;
    }
    return a;
}

// Distribution of a single positive weight for Breiman checks.
struct ThetaDist {
    std::vector<std::pair<double, double>> atoms;  // (value, prob)
    std::function<double(double)> density;          // may be empty
    double lo = 0.0, hi = 0.0;                      // density support
    double moment(double s) const {
        double m = 0.0;
        for (auto& [v, p] : atoms) m += p * std::pow(v, s);
        if (density) m += integrate([&](double u) { return std::pow(u, s) * density(u); }, lo, hi);
        return m;
    }
    double mixture_tail(const TailModel& x_model, double x) const {
        double p = 0.0;
        for (auto& [v, q] : atoms) p += q * x_model.survival_clamped(x / v);
        if (density)
            p += integrate([&](double u) { return density(u) * x_model.survival_clamped(x / u); },
                           lo, hi);
        return p;
    }
};

inline ThetaDist uniform01_theta() {
    ThetaDist d;
    d.density = [](double) { return 1.0; };
    d.lo = 0.0;
    d.hi = 1.0;
    return d;
}

// P[Theta X > x] / (E[Theta^alpha] P[X > x]) along x_grid; -> 1.
inline RatioReport breiman_tail(const ThetaDist& theta, const TailModel& x_model, double alpha,
                                const std::vector<double>& x_grid) {
    RatioReport rows;
    const double m = theta.moment(alpha);
    for (double x : x_grid) {
        const double num = theta.mixture_tail(x_model, x);
        rows.push_back(make_ratio_row(x, num / (m * x_model.survival_clamped(x)), 1.0));
    }
    return rows;
}

struct ProductTail {
    double tail = 0.0;       // exact (Pareto family) or MC estimate
    double predicted = 0.0;  // alpha^{n-1} c^{n alpha} x^{-alpha} log^{n-1}(x) / (n-1)!
    double mc_stderr = 0.0;
};

// Product of n iid variables with P[X > x] = c^alpha x^{-alpha} (x >= c):
// exact survival of the product is (x/c^n)^{-alpha} sum_{k<n} (alpha log(x/c^n))^k / k!.
inline ProductTail product_power_tail(double alpha, double c, int n, double x,
                                      bool exact = true, std::size_t n_samples = 10000000,
                                      std::uint64_t seed = 1) {
    if (n < 2) throw std::domain_error("n >= 2 required");
    ProductTail out;
    double lfac = 0.0;
    for (int k = 2; k < n; ++k) lfac += std::log(static_cast<double>(k));
    out.predicted = std::pow(alpha, n - 1) * std::pow(c, n * alpha) * std::pow(x, -alpha) *
                    std::pow(std::log(x), n - 1) / std::exp(lfac);
    if (exact) {
        const double y = x / std::pow(c, n);
        if (y <= 1.0) {
            out.tail = 1.0;
            return out;
        }
        double term = 1.0, acc = 1.0;
        for (int k = 1; k < n; ++k) {
            term *= alpha * std::log(y) / k;
            acc += term;
        }
        out.tail = std::pow(y, -alpha) * acc;
    } else {
        Rng rng(seed);
        std::size_t hits = 0;
        const double logx = std::log(x);
        for (std::size_t i = 0; i < n_samples; ++i) {
            double ls = 0.0;
            for (int j = 0; j < n; ++j) ls += std::log(c) - std::log(rng.uniform()) / alpha;
            if (ls > logx) ++hits;
        }
        const double p = static_cast<double>(hits) / n_samples;
        out.tail = p;
        out.mc_stderr = std::sqrt(p * (1.0 - p) / n_samples);
    }
    return out;
}

struct SeriesSpec {
    WeightSequence weights;
    TailModel innovations;
    double alpha = 1.0;
};

inline double predicted_series_tail(const SeriesSpec& spec, double x) {
    auto s = weight_moment_series(spec.weights, spec.alpha);
    if (!s.convergent) throw std::domain_error("divergent weight moment series");
    return spec.innovations.survival_clamped(x) * s.value;
}

struct SeriesTailRow {
    double x = 0.0;
    double empirical = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
    double mc_stderr = 0.0;
};

struct SeriesTailReport {
    std::vector<SeriesTailRow> rows;
    std::vector<SeriesTailRow> max_rows;  // running-maximum functional
    double truncation_bias = 0.0;         // P[X_1 > x_max] * sum_{t>T} E[Theta_t^alpha]
};

inline SeriesTailReport simulate_series_tail(const SeriesSpec& spec,
                                             const std::vector<double>& x_grid,
                                             std::size_t n_samples, std::uint64_t seed) {
    SeriesTailReport rep;
    const int T = spec.weights.truncation;
    Rng rng(seed);
    std::vector<std::size_t> hits(x_grid.size(), 0), max_hits(x_grid.size(), 0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        double acc = 0.0, run_max = -std::numeric_limits<double>::infinity();
        for (int t = 1; t <= T; ++t) {
            const double th = spec.weights.sampler(t, rng);
            if (th > 0.0) acc += th * spec.innovations.sample(rng);
            run_max = std::max(run_max, acc);
        }
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            if (acc > x_grid[j]) ++hits[j];
            if (run_max > x_grid[j]) ++max_hits[j];
        }
    }
    // truncation bias at the largest grid point
    double tail_weight = 0.0;
    {
        auto full = weight_moment_series(spec.weights, spec.alpha);
        double head = 0.0;
        for (int t = 1; t <= T; ++t)
            head += std::abs(spec.weights.moment(t, cplx(spec.alpha, 0.0)));
        tail_weight = std::max(0.0, full.value - head);
    }
    rep.truncation_bias = spec.innovations.survival_clamped(x_grid.back()) * tail_weight;
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        SeriesTailRow row;
        row.x = x_grid[j];
        row.predicted = predicted_series_tail(spec, x_grid[j]);
        row.empirical = static_cast<double>(hits[j]) / n_samples;
        row.ratio = row.empirical / row.predicted;
        row.mc_stderr = std::sqrt(row.empirical * (1.0 - row.empirical) / n_samples);
        rep.rows.push_back(row);
        row.empirical = static_cast<double>(max_hits[j]) / n_samples;
        row.ratio = row.empirical / row.predicted;
        row.mc_stderr = std::sqrt(row.empirical * (1.0 - row.empirical) / n_samples);
        rep.max_rows.push_back(row);
    }
    return rep;
}

struct MellinReport {
    double min_modulus = 0.0;
    double argmin_beta = 0.0;
    double tail_error = 0.0;  // bound on the neglected series tail
    bool nonvanishing = false;
};

inline MellinReport mellin_nonvanishing(const WeightSequence& w, double alpha,
                                        const std::vector<double>& beta_grid,
                                        int t_max = 20000) {
    MellinReport rep;
    // modulus-bounded tail: sum_{t>t_max} E[Theta_t^alpha]
    auto full = weight_moment_series(w, alpha);
    double head = 0.0;
    int t_used = std::min(t_max, 200000);
    for (int t = 1; t <= t_used; ++t) head += std::abs(w.moment(t, cplx(alpha, 0.0)));
    rep.tail_error = std::max(0.0, full.value - head);
    rep.min_modulus = std::numeric_limits<double>::infinity();
    for (double b : beta_grid) {
        cplx acc{};
        for (int t = 1; t <= t_used; ++t) {
            const cplx v = w.moment(t, cplx(alpha, b));
            acc += v;
            if (std::abs(v) < 1e-17 * std::abs(acc) && t > 16) break;
        }
        if (std::abs(acc) < rep.min_modulus) {
            rep.min_modulus = std::abs(acc);
            rep.argmin_beta = b;
        }
    }
    rep.nonvanishing = rep.min_modulus > 2.0 * rep.tail_error + 1e-12;
    return rep;
}

// sigma-finite measure with survival handle, for product convolution
struct MeasureSpec {
    std::function<double(double)> tail;            // nu(x, inf)
    std::vector<std::pair<double, double>> atoms;  // for rho: (location, mass)
};

// nu (*) rho (x, inf) = int nu(x/u, inf) rho(du) for atomic rho.
inline double product_convolution_tail(const MeasureSpec& nu, const MeasureSpec& rho, double x) {
    double acc = 0.0;
    for (auto& [u, m] : rho.atoms) acc += m * nu.tail(x / u);
    return acc;
}

struct CounterexampleReport {
    std::function<double(double)> nu_tail;   // nu(x, inf), closed form
    MeasureSpec rho;                          // atoms with vanishing Mellin value
    double rho_alpha_norm = 0.0;              // ||rho||_alpha
    std::vector<double> subsequential_values; // x^alpha nu(x,inf) at x = e^{k pi / beta0}
    double oscillation = 0.0;                 // spread of those values
    double mellin_at_beta0 = 0.0;             // |sum w_j y_j^{alpha+i beta0}|
    RatioReport convolved_rows;               // x^alpha (nu*rho)(x,inf) vs ||rho||_alpha
    bool degenerate = false;                  // a = b = 0
};

// dnu = (1 + a cos(b0 log x) + b sin(b0 log x)) dnu_alpha on (1, inf):
// x^alpha nu(x,inf) oscillates (non-RV) yet nu (*) rho is exactly Pareto
// when rho kills the Mellin value at alpha + i b0.
inline CounterexampleReport converse_counterexample(double beta0, double a, double b,
                                                    double alpha) {
    if (a * a + b * b > 1.0) throw std::domain_error("need a^2 + b^2 <= 1");
    CounterexampleReport rep;
    rep.degenerate = (a == 0.0 && b == 0.0);
    const double den = alpha * alpha + beta0 * beta0;
    rep.nu_tail = [=](double x) {
        if (x <= 1.0) x = 1.0;
        const double l = std::log(x);
        const double osc = a * (alpha * std::cos(beta0 * l) - beta0 * std::sin(beta0 * l)) +
                           b * (alpha * std::sin(beta0 * l) + beta0 * std::cos(beta0 * l));
        return std::pow(x, -alpha) * (1.0 + alpha * osc / den);
    };
    // rho = delta_1 + e^{-pi alpha / beta0} delta_{e^{pi/beta0}}
    const double y2 = std::exp(3.141592653589793 / beta0);
    const double w2 = std::pow(y2, -alpha);
    rep.rho.atoms = {{1.0, 1.0}, {y2, w2}};
    rep.rho_alpha_norm = 1.0 + w2 * std::pow(y2, alpha);
    const cplx s(alpha, beta0);
    const cplx mell = std::exp(s * std::log(1.0)) * 1.0 + w2 * std::exp(s * std::log(y2));
    rep.mellin_at_beta0 = std::abs(mell);
    for (int k = 0; k <= 6; ++k) {
        const double x = std::exp(k * 3.141592653589793 / beta0);
        rep.subsequential_values.push_back(std::pow(x, alpha) * rep.nu_tail(x));
    }
    const auto [mn, mx] = std::minmax_element(rep.subsequential_values.begin(),
                                              rep.subsequential_values.end());
    rep.oscillation = *mx - *mn;
    MeasureSpec nu;
    nu.tail = rep.nu_tail;
    // the exact identity x^alpha (nu conv rho)(x,inf) = ||rho||_alpha needs
    // x/u >= 1 for every rho atom u, so the grid starts at the largest atom
    for (int j = 1; j <= 12; ++j) {
        const double x = y2 * std::pow(10.0, 0.5 * j);
        const double v = std::pow(x, alpha) * product_convolution_tail(nu, rep.rho, x);
        rep.convolved_rows.push_back(make_ratio_row(x, v, rep.rho_alpha_norm));
    }
    return rep;
}

// Empirical P[X1 > x, X2 > x] / P[X1 > x]; -> 0 under asymptotic independence.
inline RatioReport asymptotic_independence_ratio(
    const std::function<std::pair<double, double>(Rng&)>& joint, const std::vector<double>& x_grid,
    std::size_t n_samples, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> joint_hits(x_grid.size(), 0), marg_hits(x_grid.size(), 0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto [x1, x2] = joint(rng);
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            if (x1 > x_grid[j]) {
                ++marg_hits[j];
                if (x2 > x_grid[j]) ++joint_hits[j];
            }
        }
    }
    RatioReport rows;
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        const double denom = std::max<std::size_t>(marg_hits[j], 1);
        rows.push_back(RatioRow{x_grid[j], static_cast<double>(joint_hits[j]) / denom, 0.0,
                                static_cast<double>(joint_hits[j]) / denom});
    }
    return rows;
}

}  // namespace heavytail
