#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "heavytail/free_prob.hpp"
#include "heavytail/spectral_measure.hpp"

using namespace heavytail;

namespace {
// principal-branch-correct square root of z^2 - r^2 for z in the upper half plane
cplx edge_sqrt(cplx z, double r) { return std::sqrt(z - r) * std::sqrt(z + r); }
}  // namespace

TEST_SUITE("free_prob") {

TEST_CASE("Cauchy transform of a point mass") {
    const auto mu = make_atom(1.0);
    const cplx z(0.0, 1.0);
    CHECK(std::abs(cauchy_transform(mu, z) - 1.0 / (z - 1.0)) < 1e-14);
}

TEST_CASE("Cauchy transform of the semicircle matches the closed form") {
    const auto mu = make_semicircle(1.0);
    for (cplx z : {cplx(0.0, 2.0), cplx(1.0, 1.0), cplx(-0.5, 0.3)}) {
        const cplx exact = (z - edge_sqrt(z, 2.0)) / 2.0;
        CHECK(std::abs(cauchy_transform(mu, z) - exact) < 1e-4);
    }
}

TEST_CASE("Herglotz property and normalization on a cone") {
    const auto mu = make_pareto_spectral(1.5);
    for (double y : {1.0, 5.0, 50.0}) {
        const cplx g = cauchy_transform(mu, cplx(0.3 * y, y));
        CHECK(g.imag() < 0.0);
    }
    for (double y : {500.0, 2000.0}) {
        const cplx z(0.2 * y, y);
        CHECK(std::abs(z * cauchy_transform(mu, z) - 1.0) < 0.01);
    }
}

TEST_CASE("free cumulants from moments: worked sequences") {
    // m = (1, 1, 2, 6) has free cumulants (1, 1, 2)
    const auto k1 = cumulants_from_moments({1.0, 1.0, 2.0, 6.0});
    REQUIRE(k1.size() == 3);
    CHECK(k1[0] == doctest::Approx(1.0));
    CHECK(k1[1] == doctest::Approx(1.0));
    CHECK(k1[2] == doctest::Approx(2.0));
    // standard semicircle moments (1, 0, 1, 0, 2) have cumulants (0, 1, 0, 0)
    const auto k2 = cumulants_from_moments({1.0, 0.0, 1.0, 0.0, 2.0});
    REQUIRE(k2.size() == 4);
    CHECK(k2[0] == doctest::Approx(0.0));
    CHECK(k2[1] == doctest::Approx(1.0));
    CHECK(k2[2] == doctest::Approx(0.0));
    CHECK(k2[3] == doctest::Approx(0.0));
}

TEST_CASE("moments and cumulants of the discretized semicircle") {
    const auto md = moments_and_cumulants(make_semicircle(1.0), 4);
    CHECK(std::fabs(md.moments[1]) < 1e-3);
    CHECK(md.moments[2] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(md.moments[4] == doctest::Approx(2.0).epsilon(1e-2));
    CHECK(std::fabs(md.cumulants[1] - 1.0) < 1e-3);
    CHECK(std::fabs(md.cumulants[3]) < 1e-2);
}

TEST_CASE("infinite moments are rejected") {
    CHECK_THROWS_AS(moments_and_cumulants(make_pareto_spectral(1.5), 2),
                    std::domain_error);
}

TEST_CASE("Voiculescu transform of a point mass is the constant shift") {
    const ConeSpec cone{1.0, 2.0};
    const cplx phi = voiculescu_transform(make_atom(1.0), cplx(0.0, 5.0), cone);
    CHECK(std::abs(phi - 1.0) < 1e-9);
    CHECK_THROWS_AS(voiculescu_transform(make_atom(1.0), cplx(0.0, 0.5), cone),
                    std::domain_error);
}

TEST_CASE("subordination of two point masses gives the shifted F transform") {
    const auto conv = convolve_f_handles(f_handle(make_atom(1.0)), f_handle(make_atom(2.0)));
    for (cplx z : {cplx(0.0, 2.0), cplx(1.0, 0.5)})
        CHECK(std::abs(conv(z) - (z - 3.0)) < 1e-9);
}

TEST_CASE("symmetric Bernoulli convolved with itself near the real axis") {
    // the arcsine law on [-2, 2] has F(z) = sqrt(z^2 - 4) -> 2i as z -> 0;
    // regression for the degenerate subordination region where plain
    // iteration crawls and only the Newton path converges
    const auto b = make_two_atoms(-1.0, 1.0);
    const auto conv = convolve_f_handles(f_handle(b), f_handle(b));
    const cplx z(0.0, 1e-3);
    CHECK(std::abs(conv(z) - edge_sqrt(z, 2.0)) < 1e-3);
}

TEST_CASE("phi additivity for semicircle plus Bernoulli") {
    const auto mu = make_semicircle(1.0, 201);
    const auto nu = make_two_atoms(-1.0, 1.0);
    const auto conv = convolve_f_handles(f_handle(mu), f_handle(nu));
    const ConeSpec ca = calibrate_cone(mu);
    const ConeSpec cb = calibrate_cone(nu);
    ConeSpec cone{std::min(ca.eta, cb.eta), 2.0 * std::max(ca.bound, cb.bound)};
    const cplx z(0.0, 3.0 * cone.bound);
    const cplx lhs = voiculescu_from_handle(conv, z);
    const cplx rhs = voiculescu_transform(mu, z, cone) + voiculescu_transform(nu, z, cone);
    CHECK(std::abs(lhs - rhs) < 1e-8);
}

TEST_CASE("remainder r_G: definition and integral routes agree") {
    const auto mu = make_pareto_spectral(1.5);
    for (double y : {30.0, 100.0, 1000.0}) {
        const auto rv = remainder_rG(mu, 1, cplx(0.0, y));
        CHECK(std::abs(rv.definition_route - rv.integral_route) <
              1e-6 * std::abs(rv.integral_route));
    }
}

TEST_CASE("rederived asymptotic constants") {
    const auto c = corrected_asymptotic_constants(1.5, 1);
    constexpr double pi = 3.14159265358979323846;
    REQUIRE(c.imag_const.has_value());
    REQUIRE(c.real_const.has_value());
    CHECK(*c.imag_const ==
          doctest::Approx(-(pi * 0.75) / std::cos(pi / 4.0)).epsilon(1e-12));
    CHECK(*c.real_const ==
          doctest::Approx(-(pi * 0.75) / std::sin(pi / 4.0)).epsilon(1e-12));
    CHECK_THROWS_AS(corrected_asymptotic_constants(3.5, 1), std::domain_error);
}

TEST_CASE("remainders of a point mass at 1 have rational closed forms") {
    // H(z) = z/(1-z) gives r_H(z) = z/(1-z); its inverse L = z/(1+z) gives
    // r_L(z) = z/(1+z); the reciprocal chain zK = z^2/L = z(1+z) is a
    // polynomial, so r_zK vanishes identically
    const auto mu = make_atom(1.0);
    const std::vector<cplx> zs = {cplx(0.0, -0.01), cplx(0.005, -0.01)};
    const auto rows = reciprocal_inverse_remainder_check(mu, 1, zs);
    for (const auto& row : rows) {
        CHECK(std::abs(row.r_H - row.z / (1.0 - row.z)) < 1e-8);
        CHECK(std::abs(row.r_L - row.z / (1.0 + row.z)) < 1e-8);
        CHECK(std::abs(row.r_zK) < 1e-8);
        CHECK(std::abs(row.inverse_ratio - 1.0) < 0.03);
    }
}

TEST_CASE("Stieltjes-Karamata proposition: Lebesgue case is exact") {
    RhoSpec rho;
    rho.density = [](double) { return 1.0; };
    rho.mass_below = [](double y) { return y; };
    const auto rows = stieltjes_karamata(rho, 1.0, {1.0, 10.0, 100.0},
                                         StieltjesProp::prop51);
    for (const auto& r : rows) CHECK(std::fabs(r.ratio - 1.0) < 1e-10);
}

TEST_CASE("free max convolution power of a Pareto spectral CDF") {
    const auto mu = make_pareto_spectral(2.5);
    auto cdf = [&](double x) { return mu.cdf(x); };
    const double x = 30.0;
    // F boxdot F = max(2F - 1, 0)
    CHECK(free_max_power(cdf, 2, x) ==
          doctest::Approx(std::max(2.0 * mu.cdf(x) - 1.0, 0.0)).epsilon(1e-12));
}

TEST_CASE("free subexponential report for n = 1 is trivial") {
    const auto rep = free_subexp_report(make_pareto_spectral(2.5), 1, {10.0, 20.0});
    REQUIRE(rep.rows.size() == 2);
    for (const auto& r : rep.rows) {
        CHECK(r.sum_ratio == doctest::Approx(1.0));
        CHECK(r.max_power_ratio == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(free_subexp_report(make_pareto_spectral(2.5), 5, {10.0}),
                    std::domain_error);
}

TEST_CASE("spectral measure bookkeeping") {
    const auto semi = make_semicircle(1.0);
    CHECK(semi.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(semi.moment(2) == doctest::Approx(1.0).epsilon(1e-4));
    const auto par = make_pareto_spectral(2.0);
    CHECK(par.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(par.survival(10.0) > 0.0);
    auto shifted = make_two_atoms(-1.0, 1.0).translated(2.0);
    CHECK(shifted.atoms[0].first == doctest::Approx(1.0));
    CHECK_THROWS_AS(par.translated(1.0), std::domain_error);
}

}  // TEST_SUITE
