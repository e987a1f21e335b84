#include <cmath>
#include <vector>

#include "doctest.h"
#include "gna/errors.hpp"
#include "gna/rng.hpp"
#include "gna/stats.hpp"

TEST_CASE("normal survival function reference values") {
    CHECK(gna::normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gna::normal_sf(1.0) ==
          doctest::Approx(0.15865525393145705).epsilon(1e-12));
    CHECK(gna::normal_sf(1.959963984540054) ==
          doctest::Approx(0.025).epsilon(1e-9));
    CHECK(gna::normal_sf(-2.3) ==
          doctest::Approx(0.98927588997832419).epsilon(1e-12));
}

TEST_CASE("normal survival function symmetry") {
    for (double z : {0.1, 0.7, 1.3, 2.9}) {
        CHECK(gna::normal_sf(-z) + gna::normal_sf(z) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("upper incomplete gamma reference values") {
    CHECK(gna::gamma_q(1.0, 2.0) ==
          doctest::Approx(0.13533528323661269).epsilon(1e-12));
    CHECK(gna::gamma_q(0.5, 1.3) ==
          doctest::Approx(0.10686371499337946).epsilon(1e-12));
    CHECK(gna::gamma_q(3.0, 2.5) ==
          doctest::Approx(0.54381311588332952).epsilon(1e-12));
    CHECK(gna::gamma_q(2.0, 0.0) == 1.0);
}

TEST_CASE("gamma_q with shape 1 is exp(-x)") {
    for (double x : {0.25, 1.0, 3.5, 8.0})
        CHECK(gna::gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
}

TEST_CASE("gamma_q rejects bad arguments") {
    CHECK_THROWS_AS((void)gna::gamma_q(0.0, 1.0), gna::DomainError);
    CHECK_THROWS_AS((void)gna::gamma_q(-1.0, 1.0), gna::DomainError);
    CHECK_THROWS_AS((void)gna::gamma_q(1.0, -0.1), gna::DomainError);
}

TEST_CASE("chi-squared survival reference values") {
    CHECK(gna::chi_squared_sf(3.84, 1.0) ==
          doctest::Approx(0.050043521248705103).epsilon(1e-10));
    CHECK(gna::chi_squared_sf(5.99, 2.0) ==
          doctest::Approx(0.050036627086586283).epsilon(1e-10));
    CHECK(gna::chi_squared_sf(7.81, 3.0) ==
          doctest::Approx(0.050106056350005941).epsilon(1e-10));
    CHECK(gna::chi_squared_sf(1.0, 4.0) ==
          doctest::Approx(0.90979598956895014).epsilon(1e-10));
    CHECK(gna::chi_squared_sf(0.0, 3.0) == 1.0);
    CHECK(gna::chi_squared_sf(-1.0, 3.0) == 1.0);
}

TEST_CASE("chi-squared with 2 df is exp(-x/2)") {
    for (double x : {0.5, 2.0, 6.0})
        CHECK(gna::chi_squared_sf(x, 2.0) ==
              doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
}

TEST_CASE("goodness-of-fit p-value on a small table") {
    std::vector<double> obs{12.0, 8.0, 10.0, 14.0};
    std::vector<double> exp{11.0, 11.0, 11.0, 11.0};
    CHECK(gna::chi_squared_gof_pvalue(obs, exp) ==
          doctest::Approx(0.61098638382018466).epsilon(1e-10));
}

TEST_CASE("goodness-of-fit on a perfect match is 1") {
    std::vector<double> obs{5.0, 5.0, 5.0};
    CHECK(gna::chi_squared_gof_pvalue(obs, obs) == doctest::Approx(1.0));
}

TEST_CASE("goodness-of-fit input validation") {
    std::vector<double> obs{1.0, 2.0};
    std::vector<double> bad_len{1.0};
    std::vector<double> bad_exp{1.0, 0.0};
    CHECK_THROWS_AS((void)gna::chi_squared_gof_pvalue(obs, bad_len),
                    gna::DomainError);
    CHECK_THROWS_AS((void)gna::chi_squared_gof_pvalue(obs, bad_exp),
                    gna::DomainError);
}

TEST_CASE("rank-sum p-value matches reference implementation") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 10.0};
    std::vector<double> b{5.0, 6.0, 7.0, 8.0, 9.0};
    CHECK(gna::rank_sum_p_less(a, b) ==
          doctest::Approx(0.07183604090348011).epsilon(1e-10));
}

TEST_CASE("rank-sum handles ties with mid-ranks") {
    std::vector<double> a{1.0, 2.0, 2.0, 3.0};
    std::vector<double> b{2.0, 3.0, 3.0, 5.0, 6.0};
    CHECK(gna::rank_sum_p_less(a, b) ==
          doctest::Approx(0.04967112392673264).epsilon(1e-10));
}

TEST_CASE("rank-sum detects clear separation") {
    std::vector<double> low, high;
    for (int i = 0; i < 30; ++i) {
        low.push_back(double(i));
        high.push_back(double(i) + 100.0);
    }
    CHECK(gna::rank_sum_p_less(low, high) < 1e-6);
    CHECK(gna::rank_sum_p_less(high, low) > 0.999);
}

TEST_CASE("rank-sum on fully tied data returns 1") {
    std::vector<double> a{2.0, 2.0};
    std::vector<double> b{2.0, 2.0, 2.0};
    CHECK(gna::rank_sum_p_less(a, b) == 1.0);
}

TEST_CASE("rank-sum rejects empty samples") {
    std::vector<double> a{1.0};
    std::vector<double> empty;
    CHECK_THROWS_AS((void)gna::rank_sum_p_less(a, empty), gna::DomainError);
    CHECK_THROWS_AS((void)gna::rank_sum_p_less(empty, a), gna::DomainError);
}

TEST_CASE("mean and median basics") {
    std::vector<double> xs{3.0, 1.0, 2.0};
    CHECK(gna::mean(xs) == doctest::Approx(2.0));
    CHECK(gna::median(xs) == 2.0);
    std::vector<double> even{4.0, 1.0, 3.0, 2.0};
    CHECK(gna::median(even) == doctest::Approx(2.5));
    std::vector<double> empty;
    CHECK_THROWS_AS((void)gna::mean(empty), gna::DomainError);
    CHECK_THROWS_AS((void)gna::median(empty), gna::DomainError);
}
