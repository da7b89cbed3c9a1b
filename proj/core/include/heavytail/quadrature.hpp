#pragma once

// Adaptive Gauss-Kronrod (15-point) quadrature over real intervals.
// Works for real- and complex-valued integrands; infinite upper limits
// are handled by the substitution t = a/u (power tails integrate cleanly
// after the change of variables).

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace heavytail {

struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    std::size_t max_intervals = 20000;
};

namespace detail {

// QK15 nodes/weights on [-1,1] (symmetric; node 0 listed once).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class T>
inline double norm_of(T v) {
    if constexpr (std::is_same_v<T, std::complex<double>>)
        return std::abs(v);
    else
        return std::fabs(v);
}

template <class F, class T>
void gk15(const F& f, double a, double b, T& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T resk{};
    T resg{};
    for (int j = 0; j < 8; ++j) {
        const double x = h * kGK15Nodes[j];
        T fv;
        if (j == 7) {
            fv = f(c);
        } else {
            fv = f(c - x) + f(c + x);
        }
        resk += kGK15WeightsK[j] * fv;
        if (j % 2 == 1) resg += kGK15WeightsG[j / 2] * fv;
    }
    result = resk * h;
    err = norm_of<T>((resk - resg) * h);
}

}  // namespace detail

// Adaptive integral of f over the finite interval [a, b].
template <class T = double, class F>
T integrate(const F& f, double a, double b, const QuadOptions& opt = {}) {
    if (a == b) return T{};
    struct Piece {
        double a, b, err;
        T val;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    T total{};
    double err0;
    Piece first{a, b, 0.0, T{}};
    detail::gk15(f, a, b, first.val, err0);
    first.err = err0;
    total = first.val;
    double total_err = first.err;
    std::priority_queue<Piece> heap;
    heap.push(first);
    std::size_t used = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * detail::norm_of<T>(total)) &&
           used < opt.max_intervals) {
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted in double
        Piece left{worst.a, mid, 0.0, T{}};
        Piece right{mid, worst.b, 0.0, T{}};
        detail::gk15(f, left.a, left.b, left.val, left.err);
        detail::gk15(f, right.a, right.b, right.val, right.err);
        total += left.val + right.val - worst.val;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++used;
    }
    return total;
}

// Integral of f over [a, infinity) for a > 0, via t = a/u, u in (0, 1].
template <class T = double, class F>
T integrate_to_inf(const F& f, double a, const QuadOptions& opt = {}) {
    if (a <= 0.0) {
        T head = integrate<T>(f, a, 1.0, opt);
        return head + integrate_to_inf<T>(f, 1.0, opt);
    }
    auto g = [&](double u) -> T {
        const double t = a / u;
        return f(t) * (a / (u * u));
    };
    return integrate<T>(g, 0.0, 1.0, opt);
}

}  // namespace heavytail
