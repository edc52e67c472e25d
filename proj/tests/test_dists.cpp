#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "batchrisk/dists.hpp"

using namespace batchrisk;

TEST_CASE("normal cdf matches reference values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(normal_cdf(-1.96) ==
          doctest::Approx(1.0 - 0.9750021048517795).epsilon(1e-12));
    // symmetry
    for (double x : {0.3, 1.1, 2.7, 4.0})
        CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0));
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK(normal_quantile(1.0 / 6.0) ==
          doctest::Approx(-0.967421566101701).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    for (double x = -5.0; x <= 5.0; x += 0.25)
        CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
}

TEST_CASE("binomial cdf equals exhaustive outcome enumeration for n <= 10") {
    for (std::int64_t n = 1; n <= 10; ++n) {
        for (double p : {0.0, 0.1, 0.3, 0.5, 0.77, 0.9, 1.0}) {
            for (std::int64_t c = 0; c <= n; ++c) {
                // enumerate all 2^n outcome vectors
                double expect = 0.0;
                for (std::int64_t mask = 0; mask < (std::int64_t(1) << n);
                     ++mask) {
                    const int k = __builtin_popcountll(std::uint64_t(mask));
                    if (k > c) continue;
                    expect += std::pow(p, k) * std::pow(1.0 - p, double(n - k));
                }
                CHECK(binomial_cdf(c, n, p) ==
                      doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("binomial cdf exact special cases") {
    CHECK(binomial_cdf(1, 5, 0.5) == 0.1875);  // 6/32, powers of two exact
    CHECK(binomial_cdf(5, 5, 0.9) == 1.0);
    CHECK(binomial_cdf(7, 5, 0.9) == 1.0);
    CHECK(binomial_cdf(-1, 5, 0.1) == 0.0);
}

TEST_CASE("log densities match Boost.Math") {
    boost::math::normal_distribution<double> nd(1.3, 2.1);
    CHECK(log_normal_pdf(0.4, 1.3, 2.1) ==
          doctest::Approx(std::log(boost::math::pdf(nd, 0.4))).epsilon(1e-12));

    boost::math::beta_distribution<double> bd(85.0, 2.0);
    CHECK(log_beta_pdf(0.97, 85.0, 2.0) ==
          doctest::Approx(std::log(boost::math::pdf(bd, 0.97))).epsilon(1e-12));

    boost::math::gamma_distribution<double> gd(1.5, 1.0 / 0.7);  // shape,scale
    CHECK(log_gamma_pdf(2.2, 1.5, 0.7) ==
          doctest::Approx(std::log(boost::math::pdf(gd, 2.2))).epsilon(1e-12));
}

TEST_CASE("log densities reject off-support points") {
    CHECK(log_beta_pdf(0.0, 2.0, 2.0) == kNegInf);
    CHECK(log_beta_pdf(1.0, 2.0, 2.0) == kNegInf);
    CHECK(log_gamma_pdf(-1.0, 1.0, 1.0) == kNegInf);
    CHECK(log_gamma_pdf(1.0, -1.0, 1.0) == kNegInf);
    CHECK(log_normal_pdf(0.0, 0.0, 0.0) == kNegInf);
    CHECK(log_binomial_pmf(3, 2, 0.5) == kNegInf);
    CHECK(log_binomial_pmf(1, 2, 1.5) == kNegInf);
}

TEST_CASE("log_choose satisfies the Pascal identity") {
    for (std::int64_t n = 1; n < 40; n += 3) {
        for (std::int64_t k = 1; k < n; k += 2) {
            const double lhs = std::exp(log_choose(n, k));
            const double rhs = std::exp(log_choose(n - 1, k)) +
                               std::exp(log_choose(n - 1, k - 1));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("type-7 quantiles interpolate linearly") {
    const double v[] = {1.0, 2.0, 3.0, 4.0};
    CHECK(quantile_type7_sorted(v, 4, 0.0) == 1.0);
    CHECK(quantile_type7_sorted(v, 4, 1.0) == 4.0);
    CHECK(quantile_type7_sorted(v, 4, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_type7_sorted(v, 4, 1.0 / 3.0) == doctest::Approx(2.0));
    const double single[] = {7.0};
    CHECK(quantile_type7_sorted(single, 1, 0.4) == 7.0);
}
