#pragma once

// Probability measure represented as atoms + piecewise-linear density on a
// node grid + an optional analytic power tail mu(x,inf) = scale * x^{-index}
// beyond the cutoff. All integrals against the body are closed-form per
// segment, so measure arithmetic is exact given the representation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace heavytail {

struct TailDescriptor {
    double cutoff = 1.0;
    double index = 2.0;  // alpha > 0
    double scale = 1.0;  // c
    double mass() const { return scale * std::pow(cutoff, -index); }
    double survival(double x) const {
        return x <= cutoff ? mass() : scale * std::pow(x, -index);
    }
    // int_{max(x,cutoff)}^inf t^k dmu_tail, finite for k < index
    double partial_moment(double k, double x) const {
        const double lo = std::max(x, cutoff);
        if (k >= index) throw std::domain_error("infinite tail moment");
        return scale * index / (index - k) * std::pow(lo, k - index);
    }
};

struct SpectralMeasure {
    std::vector<std::pair<double, double>> atoms;  // (location, weight)
    std::vector<double> grid;                      // strictly increasing nodes
    std::vector<double> density;                   // values at nodes
    std::optional<TailDescriptor> tail;

    bool is_single_atom() const {
        return atoms.size() == 1 && grid.empty() && !tail.has_value();
    }

    double body_mass() const {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            m += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
        return m;
    }

    double total_mass() const {
        double m = body_mass();
        for (auto& [a, w] : atoms) m += w;
        if (tail) m += tail->mass();
        return m;
    }

    // int t^k dmu; k need not be an integer for atom/tail parts, but the
    // body uses the polynomial form so k must be a nonnegative integer there.
    double moment(int k) const {
        double m = 0.0;
        for (auto& [a, w] : atoms) m += w * std::pow(a, k);
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const double t0 = grid[i], t1 = grid[i + 1];
            const double f0 = density[i], f1 = density[i + 1];
            const double c1 = (f1 - f0) / (t1 - t0);
            const double c0 = f0 - c1 * t0;
            // int t^k (c0 + c1 t) dt
            m += c0 * (std::pow(t1, k + 1) - std::pow(t0, k + 1)) / (k + 1) +
                 c1 * (std::pow(t1, k + 2) - std::pow(t0, k + 2)) / (k + 2);
        }
        if (tail) m += tail->partial_moment(static_cast<double>(k), tail->cutoff);
        return m;
    }

    double survival(double x) const {
        double s = 0.0;
        for (auto& [a, w] : atoms)
            if (a > x) s += w;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const double t0 = grid[i], t1 = grid[i + 1];
            if (t1 <= x) continue;
            const double f0 = density[i], f1 = density[i + 1];
            if (t0 >= x) {
                s += 0.5 * (f0 + f1) * (t1 - t0);
            } else {
                const double fx = f0 + (f1 - f0) * (x - t0) / (t1 - t0);
                s += 0.5 * (fx + f1) * (t1 - x);
            }
        }
        if (tail) s += tail->survival(std::max(x, tail->cutoff));
        return s;
    }

    double cdf(double x) const { return total_mass() - survival(x); }

    double support_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (auto& [a, w] : atoms) m = std::min(m, a);
        if (!grid.empty()) m = std::min(m, grid.front());
        if (tail) m = std::min(m, tail->cutoff);
        return m;
    }

    double support_max() const {
        double m = -std::numeric_limits<double>::infinity();
        for (auto& [a, w] : atoms) m = std::max(m, a);
        if (!grid.empty()) m = std::max(m, grid.back());
        if (tail) m = std::numeric_limits<double>::infinity();
        return m;
    }

    SpectralMeasure translated(double shift) const {
        SpectralMeasure out = *this;
        for (auto& [a, w] : out.atoms) a += shift;
        for (auto& g : out.grid) g += shift;
        if (out.tail) {
            // a shifted power tail is no longer an exact power law; keep it
            // only for zero shift
            if (shift != 0.0) throw std::domain_error("cannot translate analytic tail");
        }
        return out;
    }

    void renormalize() {
        const double m = total_mass();
        if (m <= 0.0) throw std::domain_error("non-positive mass");
        for (auto& [a, w] : atoms) w /= m;
        for (auto& d : density) d /= m;
        if (tail) tail->scale /= m;
    }
};

inline SpectralMeasure make_atom(double location, double weight = 1.0) {
    SpectralMeasure m;
    m.atoms = {{location, weight}};
    return m;
}

inline SpectralMeasure make_two_atoms(double a, double b, double wa = 0.5, double wb = 0.5) {
    SpectralMeasure m;
    m.atoms = {{a, wa}, {b, wb}};
    return m;
}

// Pareto(alpha) hybrid: pure analytic tail with cutoff 1, scale 1.
inline SpectralMeasure make_pareto_spectral(double alpha) {
    SpectralMeasure m;
    m.tail = TailDescriptor{1.0, alpha, 1.0};
    return m;
}

// Semicircle with mean 0 and variance v (radius 2 sqrt(v)).
inline SpectralMeasure make_semicircle(double variance, std::size_t nodes = 801) {
    SpectralMeasure m;
    const double r = 2.0 * std::sqrt(variance);
    m.grid.resize(nodes);
    m.density.resize(nodes);
    // Chebyshev-clustered nodes: a uniform grid under-resolves the sqrt
    // edges of the density enough to bias the variance of the stored
    // piecewise-linear fit at the 1e-4 level.
    for (std::size_t i = 0; i < nodes; ++i) {
        const double theta = 3.141592653589793 * static_cast<double>(i) / (nodes - 1);
        const double x = -r * std::cos(theta);
        m.grid[i] = x;
        const double d = r * r - x * x;
        m.density[i] = d > 0.0 ? std::sqrt(d) / (3.141592653589793 * 2.0 * variance) : 0.0;
    }
    m.renormalize();
    return m;
}

}  // namespace heavytail
