#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "gna/errors.hpp"
#include "gna/rng.hpp"
#include "gna/stats.hpp"

using gna::Rng;

TEST_CASE("same seed reproduces the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("derive gives draw-order-independent streams") {
    Rng direct = Rng::derive(7, 3);
    // Deriving again must not depend on any other stream's consumption.
    Rng other = Rng::derive(7, 2);
    for (int i = 0; i < 100; ++i) other.next_u64();
    Rng again = Rng::derive(7, 3);
    for (int i = 0; i < 100; ++i) CHECK(direct.next_u64() == again.next_u64());

    Rng s0 = Rng::derive(7, 0);
    Rng s1 = Rng::derive(7, 1);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (s0.next_u64() == s1.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("split child differs from parent continuation") {
    Rng parent(99);
    Rng child = parent.split();
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (parent.next_u64() == child.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("uniform01 stays in [0,1) and looks uniform") {
    Rng rng(5);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double x = rng.uniform01();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("below covers the range without bias") {
    Rng rng(11);
    const std::uint64_t bound = 7;
    std::vector<double> counts(bound, 0.0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        std::uint64_t x = rng.below(bound);
        REQUIRE(x < bound);
        counts[x] += 1.0;
    }
    std::vector<double> expected(bound, double(n) / double(bound));
    CHECK(gna::chi_squared_gof_pvalue(counts, expected) > 1e-4);
}

TEST_CASE("int_in hits both inclusive endpoints") {
    Rng rng(13);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        std::int64_t x = rng.int_in(-3, 3);
        REQUIRE(x >= -3);
        REQUIRE(x <= 3);
        seen.insert(x);
    }
    CHECK(seen.count(-3) == 1);
    CHECK(seen.count(3) == 1);
    CHECK(seen.size() == 7);
}

TEST_CASE("int_in with equal endpoints is constant") {
    Rng rng(17);
    for (int i = 0; i < 10; ++i) CHECK(rng.int_in(5, 5) == 5);
}

TEST_CASE("real_in respects bounds") {
    Rng rng(19);
    for (int i = 0; i < 10000; ++i) {
        double x = rng.real_in(-2.5, 4.0);
        REQUIRE(x >= -2.5);
        REQUIRE(x < 4.0);
    }
}

TEST_CASE("chance at the extremes is deterministic") {
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(rng.chance(0.0));
        CHECK(rng.chance(1.0));
    }
}

TEST_CASE("chance matches its probability") {
    Rng rng(29);
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        if (rng.chance(0.3)) ++hits;
    CHECK(std::abs(double(hits) / n - 0.3) < 0.01);
}

TEST_CASE("normal matches requested moments") {
    Rng rng(31);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal(2.0, 3.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean - 2.0) < 0.05);
    CHECK(std::abs(std::sqrt(var) - 3.0) < 0.05);
}

TEST_CASE("weighted follows the weights") {
    Rng rng(37);
    std::vector<double> weights{1.0, 0.0, 3.0, 6.0};
    std::vector<double> counts(4, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        std::size_t k = rng.weighted(weights);
        REQUIRE(k < 4);
        counts[k] += 1.0;
    }
    CHECK(counts[1] == 0.0);
    std::vector<double> observed{counts[0], counts[2], counts[3]};
    std::vector<double> expected{n * 0.1, n * 0.3, n * 0.6};
    CHECK(gna::chi_squared_gof_pvalue(observed, expected) > 1e-4);
}

TEST_CASE("weighted rejects unusable weight vectors") {
    Rng rng(41);
    std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS((void)rng.weighted(zeros), gna::DomainError);
    std::vector<double> negative{1.0, -0.5};
    CHECK_THROWS_AS((void)rng.weighted(negative), gna::DomainError);
    std::vector<double> empty;
    CHECK_THROWS_AS((void)rng.weighted(empty), gna::DomainError);
}

TEST_CASE("below rejects a zero bound") {
    Rng rng(43);
    CHECK_THROWS_AS((void)rng.below(0), gna::DomainError);
}

TEST_CASE("splitmix64 expands deterministically") {
    std::uint64_t s1 = 1234, s2 = 1234;
    CHECK(gna::splitmix64(s1) == gna::splitmix64(s2));
    CHECK(s1 == s2);
    CHECK(s1 != 1234);  // state advanced
}
