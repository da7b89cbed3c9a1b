#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace heavytail {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

// One row of a convergence/ratio report: value at x against its target.
struct RatioRow {
    double x = 0.0;
    double value = 0.0;
    double target = 0.0;
    double relative_error = 0.0;
};

using RatioReport = std::vector<RatioRow>;

inline RatioRow make_ratio_row(double x, double value, double target) {
    double rel = target != 0.0 ? (value - target) / target : value;
    return RatioRow{x, value, target, rel};
}

// Convergence is declared when three successive report values sit within
// tol of the target.
inline Verdict settled_verdict(const RatioReport& rows, double tol) {
    int run = 0;
    bool ever = false;
    for (const auto& r : rows) {
        if (std::abs(r.relative_error) < tol) {
            if (++run >= 3) ever = true;
        } else {
            run = 0;
            ever = false;
        }
    }
    if (ever) return Verdict::pass;
    // A limit claim cannot be refuted at finite x: callers downgrade to
    // fail only on explicit divergence evidence.
    return Verdict::inconclusive;
}

// True when |relative_error| grows strictly over the last `window` rows.
inline bool diverging(const RatioReport& rows, int window = 3) {
    if (static_cast<int>(rows.size()) < window + 1) return false;
    for (std::size_t i = rows.size() - window; i < rows.size(); ++i) {
        if (std::abs(rows[i].relative_error) <= std::abs(rows[i - 1].relative_error))
            return false;
    }
    return std::abs(rows.back().relative_error) > 0.5;
}

}  // namespace heavytail
