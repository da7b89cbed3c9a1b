#include <doctest.h>

#include <cmath>
#include <vector>

#include "heavytail/tail_models.hpp"

using namespace heavytail;

namespace {
std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}
}  // namespace

TEST_SUITE("tail_models") {

TEST_CASE("built-in families evaluate their closed forms") {
    const auto pareto = make_pareto(2.0);
    CHECK(pareto.survival(2.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(pareto.survival_clamped(0.5) == doctest::Approx(1.0));
    CHECK(pareto.density(2.0) == doctest::Approx(0.25).epsilon(1e-14));

    const auto expo = make_exponential(1.0);
    CHECK(expo.survival(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    const auto weib = make_weibull(0.5);
    CHECK(weib.survival(4.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

    const auto ln = make_lognormal(0.0, 1.0);
    CHECK(ln.survival(1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hazard of the exponential is linear with unit rate") {
    const auto h = hazard(make_exponential(1.0));
    CHECK(h.R(2.0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(h.r(3.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("heavy-tail verdicts separate Pareto from exponential") {
    // keep the grid below the exp underflow threshold so e^{lambda x} Fbar(x)
    // stays representable and the vanishing evidence is explicit
    const auto grid = log_grid(2.0, 600.0, 24);
    const std::vector<double> lambdas = {0.1, 0.5, 1.0};
    CHECK(heavy_tail_check(make_pareto(1.5), lambdas, log_grid(2.0, 1e5, 24)).verdict ==
          Verdict::pass);
    CHECK(heavy_tail_check(make_exponential(1.0), lambdas, grid).verdict == Verdict::fail);
}

TEST_CASE("long-tail check passes Pareto and rejects the exponential") {
    const std::vector<double> us = {1.0, 2.0, 5.0};
    CHECK(long_tail_check(make_pareto(1.5), 0.0, us, log_grid(2.0, 1e5, 24)).verdict ==
          Verdict::pass);
    CHECK(long_tail_check(make_exponential(1.0), 0.0, us, log_grid(2.0, 600.0, 24)).verdict !=
          Verdict::pass);
    // regression: an underflowed 0/0 ratio must not read as convergence
    CHECK(long_tail_check(make_exponential(1.0), 0.0, us, log_grid(2.0, 1e5, 24)).verdict !=
          Verdict::pass);
}

TEST_CASE("two-fold convolution tail: quadrature agrees with Monte Carlo") {
    const auto model = make_pareto(2.0);
    const double x = 10.0;
    const auto q = convolution_tail(model, 2, x, ConvMethod::quadrature);
    const auto mc = convolution_tail(model, 2, x, ConvMethod::montecarlo, 400000, 3);
    CHECK(mc.mc_stderr > 0.0);
    CHECK(std::fabs(q.probability - mc.probability) < 5.0 * mc.mc_stderr);
}

TEST_CASE("convolution tail degenerate and invalid cases") {
    const auto model = make_pareto(2.0);
    CHECK(convolution_tail(model, 1, 3.0).probability == doctest::Approx(1.0 / 9.0));
    CHECK_THROWS_AS(convolution_tail(model, 0, 3.0), std::domain_error);
    CHECK_THROWS_AS(convolution_tail(model, 6, 3.0, ConvMethod::quadrature),
                    std::domain_error);
}

TEST_CASE("dominated variation sup for Pareto equals 2^alpha") {
    const auto rep = dominated_variation_check(make_pareto(1.5), log_grid(2.0, 1e5, 24));
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.sup == doctest::Approx(std::pow(2.0, 1.5)).epsilon(0.01));
}

TEST_CASE("class containment is never violated across built-in models") {
    const auto grid = log_grid(2.0, 1e5, 24);
    const std::vector<TailModel> models = {make_pareto(1.5), make_pareto(2.5),
                                           make_exponential(1.0), make_weibull(0.5),
                                           make_lognormal(0.0, 1.0)};
    for (const auto& m : models) {
        const auto rep = class_report(m, grid);
        // subexp implies long-tailed implies heavy
        if (rep.subexp == Verdict::pass) CHECK(rep.long_tailed == Verdict::pass);
        if (rep.long_tailed == Verdict::pass) CHECK(rep.heavy == Verdict::pass);
        // and a failed weaker class forbids a passing stronger one
        if (rep.heavy == Verdict::fail) CHECK(rep.long_tailed != Verdict::pass);
        if (rep.long_tailed == Verdict::fail) CHECK(rep.subexp != Verdict::pass);
    }
}

TEST_CASE("Pareto(1.5) is certified in every class") {
    const auto rep = class_report(make_pareto(1.5), log_grid(2.0, 1e5, 24));
    CHECK(rep.heavy == Verdict::pass);
    CHECK(rep.long_tailed == Verdict::pass);
    CHECK(rep.subexp == Verdict::pass);
    CHECK(rep.dominated == Verdict::pass);
}

}  // TEST_SUITE
