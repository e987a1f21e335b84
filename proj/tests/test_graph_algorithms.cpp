#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "gna/config.hpp"
#include "gna/errors.hpp"
#include "gna/graph_algorithms.hpp"
#include "gna/rng.hpp"
#include "helpers.hpp"

using gna::SimpleGraph;

TEST_CASE("simple graph deduplicates edges and drops loops") {
    SimpleGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 0);  // duplicate
    g.add_edge(2, 2);  // loop
    CHECK(g.edge_count() == 1);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 0));
    CHECK_FALSE(g.has_edge(2, 2));
    CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("undirected view compacts ids and merges directions") {
    gna::GnaConfig c;
    gna::NodeId a = c.add_node("x");
    c.add_node("y");
    gna::NodeId d = c.add_node("z");
    c.remove_node(1);  // leave a gap in the id space
    c.add_link(a, d);
    c.add_link(d, a);  // same undirected edge
    std::vector<gna::NodeId> order;
    SimpleGraph g = gna::undirected_view(c, &order);
    CHECK(g.n == 2);
    CHECK(g.edge_count() == 1);
    REQUIRE(order.size() == 2);
    CHECK(order[0] == a);
    CHECK(order[1] == d);
}

TEST_CASE("closeness on a path matches hand values") {
    // P4: 0-1-2-3.  Classic closeness of node 0: 3 / (1+2+3) = 0.5.
    SimpleGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    auto c = gna::closeness_centrality(g);
    CHECK(c[0] == doctest::Approx(3.0 / 6.0));
    CHECK(c[1] == doctest::Approx(3.0 / 4.0));
    CHECK(c[2] == doctest::Approx(3.0 / 4.0));
    CHECK(c[3] == doctest::Approx(3.0 / 6.0));

    auto h = gna::closeness_centrality(g, true);
    CHECK(h[0] == doctest::Approx(1.0 + 0.5 + 1.0 / 3.0));
    CHECK(h[1] == doctest::Approx(1.0 + 1.0 + 0.5));
}

TEST_CASE("harmonic closeness stays finite on disconnected graphs") {
    SimpleGraph g(4);
    g.add_edge(0, 1);  // component {0,1}; nodes 2, 3 isolated
    auto h = gna::closeness_centrality(g, true);
    CHECK(h[0] == doctest::Approx(1.0));
    CHECK(h[2] == 0.0);
    auto c = gna::closeness_centrality(g);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[3] == 0.0);
}

TEST_CASE("edge betweenness on a path counts crossing pairs") {
    SimpleGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    auto eb = gna::edge_betweenness(g);
    CHECK(eb[{0, 1}] == doctest::Approx(3.0));
    CHECK(eb[{1, 2}] == doctest::Approx(4.0));
    CHECK(eb[{2, 3}] == doctest::Approx(3.0));
}

TEST_CASE("edge betweenness splits across equal shortest paths") {
    // C4: every pair of opposite nodes has two shortest paths, each edge
    // carries 1 (direct pair) + 0.5 + 0.5 (the two diagonal pairs) = 2.
    SimpleGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    g.add_edge(3, 0);
    auto eb = gna::edge_betweenness(g);
    for (const auto& [edge, value] : eb) {
        (void)edge;
        CHECK(value == doctest::Approx(2.0));
    }
}

TEST_CASE("betweenness, closeness and components match brute force on random graphs") {
    gna::Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.below(9);  // 2..10
        const double p = rng.real_in(0.1, 0.9);
        SimpleGraph g = testutil::random_graph(n, p, rng);

        auto eb = gna::edge_betweenness(g);
        auto eb_ref = testutil::brute_edge_betweenness(g);
        REQUIRE(eb.size() == eb_ref.size());
        for (const auto& [edge, value] : eb_ref)
            CHECK(eb[edge] == doctest::Approx(value).epsilon(1e-9));

        for (bool harmonic : {false, true}) {
            auto cc = gna::closeness_centrality(g, harmonic);
            auto cc_ref = testutil::brute_closeness(g, harmonic);
            for (std::size_t v = 0; v < g.n; ++v)
                CHECK(cc[v] == doctest::Approx(cc_ref[v]).epsilon(1e-9));
        }

        CHECK(gna::connected_components(g) == testutil::brute_components(g));
    }
}

TEST_CASE("component labels are ordered by smallest member") {
    SimpleGraph g(5);
    g.add_edge(3, 4);
    g.add_edge(0, 2);
    auto labels = gna::connected_components(g);
    CHECK(labels[0] == 0);
    CHECK(labels[2] == 0);
    CHECK(labels[1] == 1);
    CHECK(labels[3] == 2);
    CHECK(labels[4] == 2);
}

TEST_CASE("largest component breaks ties toward the smallest node") {
    SimpleGraph g(6);
    g.add_edge(0, 1);  // component {0,1}
    g.add_edge(2, 3);  // component {2,3}
    g.add_edge(4, 5);  // component {4,5}
    auto comp = gna::largest_component(g);
    REQUIRE(comp.size() == 2);
    CHECK(comp[0] == 0);
    CHECK(comp[1] == 1);

    g.add_edge(3, 4);  // {2,3,4,5} now largest
    comp = gna::largest_component(g);
    REQUIRE(comp.size() == 4);
    CHECK(comp[0] == 2);
}

TEST_CASE("degree histogram counts neighbor multiplicities") {
    SimpleGraph g(5);
    g.add_edge(0, 1);
    g.add_edge(0, 2);
    g.add_edge(0, 3);
    auto hist = gna::degree_histogram(g);
    CHECK(hist[0] == 1);  // node 4
    CHECK(hist[1] == 3);  // nodes 1..3
    CHECK(hist[3] == 1);  // node 0
}

TEST_CASE("power-law exponent estimator matches its closed form") {
    // gamma = 1 + n / sum(ln(x / (x_min - 0.5)))
    std::vector<std::size_t> xs{1, 1, 2, 3, 5, 8};
    const std::size_t x_min = 1;
    double denom = 0.0;
    for (std::size_t x : xs) denom += std::log(double(x) / (double(x_min) - 0.5));
    const double expected = 1.0 + double(xs.size()) / denom;
    CHECK(gna::powerlaw_exponent_mle(xs, x_min) ==
          doctest::Approx(expected).epsilon(1e-12));

    // Samples below x_min are excluded.
    std::vector<std::size_t> mixed{1, 1, 1, 2, 4, 8};
    double d2 = std::log(2.0 / 1.5) + std::log(4.0 / 1.5) + std::log(8.0 / 1.5);
    CHECK(gna::powerlaw_exponent_mle(mixed, 2) ==
          doctest::Approx(1.0 + 3.0 / d2).epsilon(1e-12));
}

TEST_CASE("power-law estimator needs at least two usable samples") {
    std::vector<std::size_t> xs{1, 1, 5};
    CHECK_THROWS_AS((void)gna::powerlaw_exponent_mle(xs, 6), gna::DomainError);
    std::vector<std::size_t> one{9};
    CHECK_THROWS_AS((void)gna::powerlaw_exponent_mle(one, 2), gna::DomainError);
    std::vector<std::size_t> empty;
    CHECK_THROWS_AS((void)gna::powerlaw_exponent_mle(empty, 1), gna::DomainError);
}

TEST_CASE("estimator recovers the exponent of synthetic power-law samples") {
    // Discrete x^-3 tail sampled on 5..10000.  The estimator's asymptotic
    // value for this truncated discrete law at x_min = 5 is 2.9608686...
    // (continuous-approximation bias included); 20000 samples put the
    // sampling error near 0.014.
    gna::Rng rng(777);
    const std::size_t x_min = 5;
    std::vector<double> weights;
    for (std::size_t x = x_min; x <= 10000; ++x)
        weights.push_back(std::pow(double(x), -3.0));
    std::vector<std::size_t> xs;
    for (int i = 0; i < 20000; ++i)
        xs.push_back(x_min + rng.weighted(weights));
    const double est = gna::powerlaw_exponent_mle(xs, x_min);
    CHECK(std::abs(est - 2.960868639719896) < 0.05);
    CHECK(std::abs(est - 3.0) < 0.2);
}
