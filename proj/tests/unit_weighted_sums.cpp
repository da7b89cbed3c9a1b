#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "heavytail/tail_models.hpp"
#include "heavytail/weighted_sums.hpp"

using namespace heavytail;

TEST_SUITE("weighted_sums") {

TEST_CASE("geometric weight moments and their alpha-series") {
    const auto w = make_geometric_weights(0.5, 14);
    CHECK(std::abs(w.moment(1, cplx(0.5, 0.0))) ==
          doctest::Approx(std::pow(0.5, 0.5)).epsilon(1e-14));
    CHECK(std::abs(w.moment(3, cplx(2.0, 0.0))) ==
          doctest::Approx(std::pow(0.5, 6.0)).epsilon(1e-14));
    // the moment sequence is analytic in t, so the extrapolated series is the
    // full geometric sum: sum_{t>=1} 2^{-t/2} = sqrt(2)+1
    const auto s = weight_moment_series(w, 0.5);
    CHECK(s.convergent);
    CHECK(s.value == doctest::Approx(std::sqrt(2.0) + 1.0).epsilon(1e-9));
}

TEST_CASE("sparse blow-up weights fail RW but satisfy the modified condition") {
    const auto w = make_sparse_blowup_weights(0.5, 61);
    for (double eps : {0.01, 0.05, 0.1, 0.2}) {
        const auto audit = rw_condition_audit(w, 0.5, eps);
        CHECK(audit.rw == Verdict::fail);
        CHECK(audit.rw_prime == Verdict::pass);
        CHECK(audit.rw_prime_sum ==
              doctest::Approx(std::pow(3.141592653589793, 2) / 6.0).epsilon(1e-6));
    }
    CHECK_THROWS_AS(rw_condition_audit(w, 0.5, 0.7), std::domain_error);
}

TEST_CASE("Mellin transform of geometric weights never vanishes") {
    const auto w = make_geometric_weights(0.5, 14);
    std::vector<double> betas;
    for (int i = 0; i <= 20; ++i) betas.push_back(-5.0 + 0.5 * i);
    const auto rep = mellin_nonvanishing(w, 0.5, betas);
    CHECK(rep.nonvanishing);
    CHECK(rep.min_modulus > 0.0);
}

TEST_CASE("Breiman ratio for Uniform(0,1) scaling of a Pareto(1) tail") {
    // mixture tail is exactly 1/(2x) and E[Theta] = 1/2, so the ratio is 1
    const auto rows = breiman_tail(uniform01_theta(), make_pareto(1.0), 1.0,
                                   {10.0, 100.0, 1000.0, 10000.0});
    for (const auto& r : rows) CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("product of two Pareto(1) variables: exact over predicted tail") {
    // exact/predicted = 1 + 1/log(x), so 1.1 exactly at x = e^10
    const auto pt = product_power_tail(1.0, 1.0, 2, std::exp(10.0));
    CHECK(pt.tail / pt.predicted == doctest::Approx(1.1).epsilon(1e-12));
    CHECK_THROWS_AS(product_power_tail(1.0, 1.0, 1, 10.0), std::domain_error);
}

TEST_CASE("predicted series tail factors into innovation tail and weight series") {
    SeriesSpec spec;
    spec.weights = make_geometric_weights(0.5, 14);
    spec.innovations = make_pareto(0.5);
    spec.alpha = 0.5;
    const double x = 1e4;
    const double series = weight_moment_series(spec.weights, 0.5).value;
    CHECK(predicted_series_tail(spec, x) ==
          doctest::Approx(std::pow(x, -0.5) * series).epsilon(1e-12));
}

TEST_CASE("converse counterexample: oscillating tail, exactly Pareto after mixing") {
    const auto rep = converse_counterexample(1.0, 1.0, 0.0, 1.0);
    CHECK(!rep.degenerate);
    CHECK(rep.oscillation >= 0.5);
    // rho is built to kill the Mellin value at alpha + i beta0
    CHECK(rep.mellin_at_beta0 < 1e-12);
    for (const auto& r : rep.convolved_rows)
        CHECK(std::fabs(r.value / r.target - 1.0) < 0.01);
    CHECK_THROWS_AS(converse_counterexample(1.0, 1.0, 0.5, 1.0), std::domain_error);
}

TEST_CASE("degenerate counterexample reduces to a plain Pareto tail") {
    const auto rep = converse_counterexample(1.0, 0.0, 0.0, 1.0);
    CHECK(rep.degenerate);
    CHECK(rep.oscillation == doctest::Approx(0.0));
}

}  // TEST_SUITE
