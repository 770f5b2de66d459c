#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include <gibbs/sampling.hpp>

#include "oracles/enumerate.hpp"

using namespace gibbs;

namespace
{

SpeciesExpr forests()
{
    return SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::named("cayley_tree"));
}

std::string size_type(const Structure &s)
{
    auto sizes = component_sizes(s);
    std::sort(sizes.rbegin(), sizes.rend());
    std::string k;
    for (const auto x : sizes) {
        k += std::to_string(x) + ".";
    }
    return k;
}

oracle::Graph to_graph(const Structure &s)
{
    oracle::Graph g;
    g.n = static_cast<int>(s.size());
    for (const auto &[u, v] : s.edges) {
        g.edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    return g;
}

// Exact law of component-size types of forests on n vertices.
std::map<std::string, double> forest_type_law(int n)
{
    std::map<std::string, double> law;
    double total = 0;
    for (const auto &g : oracle::all_graphs(n)) {
        if (oracle::is_acyclic(g)) {
            law[size_type(oracle::as_composite(g))] += 1;
            total += 1;
        }
    }
    for (auto &[k, p] : law) {
        p /= total;
    }
    return law;
}

// Every empirical frequency within z standard errors of its probability.
void check_frequencies(const std::map<std::string, std::size_t> &counts, const std::map<std::string, double> &law,
                       std::size_t m, double z)
{
    for (const auto &[k, p] : law) {
        const auto it = counts.find(k);
        const double f = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(m);
        const double se = std::sqrt(p * (1 - p) / static_cast<double>(m));
        CAPTURE(k);
        CHECK(std::abs(f - p) <= z * se);
    }
    for (const auto &[k, c] : counts) {
        CAPTURE(k);
        CHECK(law.count(k) == 1);
    }
}

} // namespace

TEST_CASE("rng streams are reproducible and distinct")
{
    RngState a(7, 0), b(7, 0), c(7, 1), d(8, 0);
    bool differ_stream = false, differ_seed = false;
    for (int i = 0; i < 16; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differ_stream = differ_stream || x != c.next();
        differ_seed = differ_seed || x != d.next();
    }
    CHECK(differ_stream);
    CHECK(differ_seed);
    RngState r(1, 2);
    for (int i = 0; i < 1000; ++i) {
        const auto u = r.uniform();
        CHECK((u >= 0 && u < 1));
        CHECK(r.below(5) < 5);
    }
    CHECK_THROWS(r.below(0));
    const auto s1 = RngState(3, 0).split(4);
    const auto s2 = RngState(3, 0).split(4);
    CHECK(s1.stream() == s2.stream());
}

TEST_CASE("rng poisson and pick match their laws")
{
    RngState r(11, 0);
    const int m = 20000;
    double sum = 0;
    for (int i = 0; i < m; ++i) {
        sum += static_cast<double>(r.poisson(3.5));
    }
    CHECK(std::abs(sum / m - 3.5) < 4 * std::sqrt(3.5 / m));
    const std::vector<double> cdf{1, 1, 4};
    std::size_t hits[3] = {0, 0, 0};
    for (int i = 0; i < m; ++i) {
        ++hits[r.pick(cdf)];
    }
    CHECK(hits[1] == 0);
    CHECK(std::abs(hits[0] / double(m) - 0.25) < 4 * std::sqrt(0.25 * 0.75 / m));
}

TEST_CASE("Boltzmann SET size is Poisson")
{
    RngState r(5, 0);
    const int m = 20000;
    std::size_t empty = 0;
    for (int i = 0; i < m; ++i) {
        empty += boltzmann_sample(SpeciesExpr::set(), Real(1.5), r).size() == 0 ? 1 : 0;
    }
    const double p = std::exp(-1.5);
    CHECK(std::abs(empty / double(m) - p) < 4 * std::sqrt(p * (1 - p) / m));
}

TEST_CASE("Boltzmann sampling checks its parameter")
{
    RngState r(5, 0);
    const auto tree = SpeciesExpr::named("cayley_tree");
    CHECK_THROWS_AS(boltzmann_sample(tree, Real(0.5), r), precondition_error);
    CHECK_THROWS_AS(boltzmann_sample(SpeciesExpr::set(), Real(20000), r, 1000), resource_cap_error);
}

TEST_CASE("labels are a permutation of 1..n")
{
    RngState r(9, 0);
    for (int i = 0; i < 200; ++i) {
        const auto s = boltzmann_sample(forests(), exp(Real(-1)), r);
        auto labels = all_labels(s);
        std::sort(labels.begin(), labels.end());
        for (std::size_t k = 0; k < labels.size(); ++k) {
            CHECK(labels[k] == k + 1);
        }
        for (const auto &c : s.components) {
            CHECK(c.edges.size() + 1 == c.size());
            CHECK(oracle::is_acyclic(to_graph(compact_labels(c))));
        }
    }
}

TEST_CASE("uniform relabelling moves every label")
{
    Structure path;
    path.kind = Structure::Kind::graph;
    path.labels = {1, 2, 3};
    path.edges = {{1, 2}, {2, 3}};
    RngState r(13, 0);
    const int m = 30000;
    std::map<std::string, std::size_t> middle;
    for (int i = 0; i < m; ++i) {
        const auto t = relabel_uniform(path, r);
        std::map<Label, int> deg;
        for (const auto &[u, v] : t.edges) {
            ++deg[u];
            ++deg[v];
        }
        for (const auto &[l, d] : deg) {
            if (d == 2) {
                ++middle[std::to_string(l)];
            }
        }
    }
    check_frequencies(middle, {{"1", 1.0 / 3}, {"2", 1.0 / 3}, {"3", 1.0 / 3}}, m, 4);
}

TEST_CASE("conditioned forests of size 3")
{
    RngState r(42, 0);
    const std::size_t m = 20000;
    std::map<std::string, std::size_t> counts;
    std::size_t attempts = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto c = conditioned_sample(forests(), 3, exp(Real(-1)), r);
        CHECK(c.structure.size() == 3);
        attempts += c.attempts;
        ++counts[size_type(c.structure)];
    }
    CHECK(attempts > m);
    check_frequencies(counts, {{"1.1.1.", 1.0 / 7}, {"2.1.", 3.0 / 7}, {"3.", 3.0 / 7}}, m, 4);
}

TEST_CASE("conditioned sampling errors")
{
    RngState r(1, 0);
    const auto tree = SpeciesExpr::named("cayley_tree");
    CHECK_THROWS_AS(conditioned_sample(tree, 0, exp(Real(-1)), r), precondition_error);
    CHECK_THROWS_AS(conditioned_sample(tree, 60, exp(Real(-1)) / 4, r, 10), resource_cap_error);
    const ExactSampler ex(tree);
    CHECK_THROWS_AS(ex.sample(0, r), precondition_error);
}

TEST_CASE("exact sampler matches the enumerated forest law")
{
    const ExactSampler ex(forests());
    RngState r(3, 0);
    for (const int n : {4, 5}) {
        const auto law = forest_type_law(n);
        const std::size_t m = 20000;
        std::map<std::string, std::size_t> counts;
        for (std::size_t i = 0; i < m; ++i) {
            const auto s = ex.sample(static_cast<std::size_t>(n), r);
            CHECK(s.size() == static_cast<std::size_t>(n));
            ++counts[size_type(s)];
        }
        check_frequencies(counts, law, m, 4.5);
    }
}

TEST_CASE("component sizes from the exact sampler")
{
    const ExactSampler ex(forests());
    RngState r(4, 0);
    const auto law = forest_type_law(5);
    const std::size_t m = 20000;
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < m; ++i) {
        auto sizes = ex.sample_component_sizes(5, r);
        std::sort(sizes.rbegin(), sizes.rend());
        std::string k;
        for (const auto x : sizes) {
            k += std::to_string(x) + ".";
        }
        ++counts[k];
    }
    check_frequencies(counts, law, m, 4.5);
}

TEST_CASE("exact cactus samples are cactus graphs")
{
    const auto cacti = SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::named("triangle_cactus"));
    const ExactSampler ex(cacti);
    RngState r(8, 0);
    for (int i = 0; i < 200; ++i) {
        const auto s = ex.sample(9, r);
        CHECK(s.size() == 9);
        for (const auto &c : s.components) {
            CHECK(c.size() % 2 == 1);
            const auto g = to_graph(compact_labels(c));
            CHECK(oracle::is_connected(g));
            CHECK(oracle::blocks_all(g, [](int v, int e) { return v == 3 && e == 3; }));
        }
    }
}

TEST_CASE("Galton-Watson trees")
{
    const auto phi = Series::exponential(30);
    const GaltonWatson gw(phi, Real(1));
    CHECK(std::abs(gw.mean() - 1) < 1e-9);
    CHECK_THROWS_AS(GaltonWatson(phi, Real(2)), precondition_error);
    CHECK_THROWS_AS(GaltonWatson(Series({0, 1}), Real(1)), precondition_error);
    RngState r(21, 0);
    // Conditioned on 4 nodes the code law is proportional to prod 1/d_i!.
    std::map<std::string, double> law;
    double total = 0;
    for (const auto &code : oracle::forest_codes(4, 1)) {
        double w = 1;
        std::string k;
        for (const auto d : code) {
            w /= std::tgamma(d + 1.0);
            k += std::to_string(d);
        }
        law[k] += w;
        total += w;
    }
    for (auto &[k, p] : law) {
        p /= total;
    }
    std::map<std::string, std::size_t> counts;
    std::size_t m = 0;
    while (m < 20000) {
        Structure t;
        try {
            t = gw.sample(r, 64);
        } catch (const resource_cap_error &) {
            continue;
        }
        CHECK(is_valid_dfs_sequence(t.outdegrees));
        if (t.size() != 4) {
            continue;
        }
        std::string k;
        for (const auto d : t.outdegrees) {
            k += std::to_string(d);
        }
        ++counts[k];
        ++m;
    }
    check_frequencies(counts, law, m, 4.5);
    bool capped = false;
    for (int i = 0; i < 50 && !capped; ++i) {
        try {
            gw.sample(r, 1);
        } catch (const resource_cap_error &) {
            capped = true;
        }
    }
    CHECK(capped);
}

TEST_CASE("Galton-Watson forests")
{
    RngState r(2, 0);
    const Series psi({0, Rational(1, 2), Rational(1, 2)});
    for (int i = 0; i < 100; ++i) {
        const auto f = gw_forest_sample(psi, Series::exponential(20), Real(1), r);
        CHECK((f.components.size() == 1 || f.components.size() == 2));
        CHECK(f.outer == "sequence");
    }
    CHECK_THROWS_AS(gw_forest_sample(Series({0, Rational(1, 2)}), Series::exponential(20), Real(1), r),
                    precondition_error);
    CHECK_THROWS_AS(gw_forest_sample(Series({Rational(3, 2), Rational(-1, 2)}), Series::exponential(20), Real(1), r),
                    precondition_error);
}

TEST_CASE("fragment removes a largest component")
{
    Structure s;
    s.kind = Structure::Kind::composite;
    s.outer = "set";
    for (const std::vector<Label> &ls : {std::vector<Label>{2, 5}, {1}, {3, 4, 6}}) {
        Structure c;
        c.kind = Structure::Kind::set;
        c.labels = ls;
        s.components.push_back(c);
    }
    RngState r(1, 0);
    const auto f = fragment(s, r);
    CHECK(f.removed_size == 3);
    CHECK(f.rest.size() == 3);
    auto labels = all_labels(f.rest);
    std::sort(labels.begin(), labels.end());
    CHECK(labels == std::vector<Label>{1, 2, 3});
    // Order is kept: {2, 5} becomes {2, 3}.
    CHECK(f.rest.components[0].labels == std::vector<Label>{2, 3});
    CHECK_THROWS_AS(fragment(Structure::empty_set(), r), precondition_error);
}

TEST_CASE("limit fragment of forests is empty with probability e^(-1/2)")
{
    RngState r(17, 0);
    const int m = 20000;
    std::size_t empty = 0;
    for (int i = 0; i < m; ++i) {
        const auto s = limit_fragment_sample(SpeciesExpr::set(), SpeciesExpr::named("cayley_tree"), exp(Real(-1)), r);
        empty += s.size() == 0 ? 1 : 0;
    }
    const double p = std::exp(-0.5);
    CHECK(std::abs(empty / double(m) - p) < 4 * std::sqrt(p * (1 - p) / m));
}

TEST_CASE("small exact samples")
{
    RngState r(6, 0);
    const auto s = exact_sample_small(SpeciesExpr::set(), 4, r);
    CHECK(s.size() == 4);
    const auto odd = SpeciesExpr::restricted(SpeciesExpr::set(), 1, 2);
    CHECK_THROWS_AS(exact_sample_small(odd, 4, r), precondition_error);
}
