#include <doctest.h>

#include <map>

#include <gibbs/graphclass.hpp>

#include "oracles/enumerate.hpp"

using namespace gibbs;

namespace
{

bool edge_or_triangle_block(int v, int e)
{
    return (v == 2 && e == 1) || (v == 3 && e == 3);
}

bool edge_or_k4_block(int v, int e)
{
    return (v == 2 && e == 1) || (v == 4 && e == 6);
}

template <class Keep>
std::pair<unsigned long, unsigned long> count_class(int n, Keep keep)
{
    unsigned long connected = 0, all = 0;
    for (const auto &g : oracle::all_graphs(n)) {
        if (oracle::blocks_all(g, keep)) {
            ++all;
            connected += oracle::is_connected(g) ? 1 : 0;
        }
    }
    return {connected, all};
}

oracle::Graph to_graph(const Structure &s)
{
    std::map<Label, int> index;
    for (const auto l : s.labels) {
        index.emplace(l, static_cast<int>(index.size()) + 1);
    }
    oracle::Graph g;
    g.n = static_cast<int>(index.size());
    for (const auto &[u, v] : s.edges) {
        g.edges.emplace_back(index.at(u), index.at(v));
    }
    return g;
}

} // namespace

TEST_CASE("forest model")
{
    const auto m = build_class(BlockWeights::edge(), 60);
    CHECK(m.d == 1);
    CHECK(m.smooth);
    CHECK(abs(m.rho - exp(Real(-1))) < Real(1e-40));
    CHECK(abs(m.tau - 1) < Real(1e-40));
    CHECK(abs(m.C_at_rho - Real(0.5)) < Real(1e-30));
    const long forests[] = {1, 1, 2, 7, 38, 291, 2932};
    for (int n = 0; n <= 6; ++n) {
        CHECK(m.A[n] * factorial(n) == forests[n]);
    }
    for (std::size_t n = 1; n <= 12; ++n) {
        Rational p = 1;
        for (std::size_t i = 1; i < n; ++i) {
            p *= static_cast<unsigned long>(n);
        }
        CHECK(m.T[n] == p / factorial(n));
    }
    CHECK(abs(m.C_value(m.rho) - Real(0.5)) < Real(1e-30));
    CHECK(abs(m.T_value(m.rho) - 1) < Real(1e-30));
    const auto r = smoothness_verdict(m);
    CHECK(r.verdict("smooth").pass);
    CHECK(r.verdict("root_of_unity_identity").pass);
}

TEST_CASE("triangle cacti are periodic")
{
    const auto m = build_class(BlockWeights::triangle(), 64);
    CHECK(m.d == 2);
    CHECK_FALSE(m.smooth);
    for (std::size_t n = 0; n <= 64; n += 2) {
        CHECK(m.C[n] == 0);
    }
    CHECK(m.C[3] * factorial(3) == 1);
    CHECK(m.C[5] * factorial(5) == 15);
    const auto r = smoothness_verdict(m);
    CHECK_FALSE(r.verdict("smooth").pass);
    CHECK(r.verdict("smooth").detail.find("not smooth, span d = 2") == 0);
    CHECK(r.verdict("C0_minus_C1_identity").pass);
    CHECK(r.verdict("root_of_unity_identity").pass);
    const Real c0 = m.C_a[0].value, c1 = m.C_a[1].value;
    CHECK(abs(c0 - cosh(m.C_at_rho)) < Real(1e-30));
    CHECK(abs(c1 - sinh(m.C_at_rho)) < Real(1e-30));
}

TEST_CASE("block class counts against enumeration")
{
    const auto m = build_class(BlockWeights::edge() + BlockWeights::triangle(), 8);
    const auto k4 = build_class(BlockWeights::from_json(nlohmann::json::parse(R"(["edge", "clique4"])")), 8);
    for (int n = 1; n <= 6; ++n) {
        CAPTURE(n);
        const auto [c, a] = count_class(n, edge_or_triangle_block);
        CHECK(m.C[n] * factorial(n) == c);
        CHECK(m.A[n] * factorial(n) == a);
        const auto [c4, a4] = count_class(n, edge_or_k4_block);
        CHECK(k4.C[n] * factorial(n) == c4);
        CHECK(k4.A[n] * factorial(n) == a4);
    }
}

TEST_CASE("block weight presets")
{
    CHECK(BlockWeights::clique(3).bprime() == BlockWeights::triangle().bprime());
    CHECK(BlockWeights::clique(2).bprime() == BlockWeights::edge().bprime());
    CHECK(BlockWeights::triangle().renderable());
    CHECK_FALSE(BlockWeights::from_coeffs({0, 1, 1}).renderable());
    const auto w = BlockWeights::from_json(nlohmann::json::parse(R"({"bprime_coeffs": [0, 1, "1/2"]})"));
    CHECK(w.bprime()[2] == Rational(1, 2));
    CHECK_THROWS_AS(BlockWeights::from_json(nlohmann::json::parse(R"("pentagon")")), spec_error);
    CHECK_THROWS_AS(BlockWeights::from_json(nlohmann::json::parse(R"({"bprime_coeffs": [1, 1]})")),
                    precondition_error);
    CHECK_THROWS_AS(BlockWeights::from_json(nlohmann::json::parse("[]")), precondition_error);
    CHECK_THROWS_AS(build_class_from_json(nlohmann::json::parse(R"({"truncation": 5})"), 10), spec_error);
    CHECK(build_class_from_json(nlohmann::json::parse(R"({"blocks": "edge", "truncation": 7})"), 10).truncation == 7);
}

TEST_CASE("asymptotic ratio for forests")
{
    const auto m = build_class(BlockWeights::edge(), 120);
    const auto r = asymptotic_check(m, {20, 118});
    CHECK(r.verdict("ratio_to_one_residue_0").pass);
    CHECK(r.verdict("c_ratio_to_rho_d").pass);
    const auto *row = r.table("ratio_residue_0").row(118);
    REQUIRE(row != nullptr);
    CHECK(abs(row->values[1] - 1) < Real(0.03));
    CHECK_THROWS_AS(asymptotic_check(m, {20, 200}), precondition_error);
}

TEST_CASE("asymptotic ratio per residue for cacti")
{
    const auto m = build_class(BlockWeights::triangle(), 128);
    const auto r = asymptotic_check(m, {20, 126});
    CHECK(r.verdict("ratio_to_one_residue_0").pass);
    CHECK(r.verdict("ratio_to_one_residue_1").pass);
}

TEST_CASE("fragment experiment on cacti")
{
    const auto m = build_class(BlockWeights::triangle(), 90);
    const auto r = frag_experiment(m, {20, 21, 40, 41, 80, 81});
    // Reference values from tests/oracles/fragment_tv.py.
    CHECK(to_double(r.table("tv_residue_0").row(40)->values[0]) == doctest::Approx(0.03671625).epsilon(1e-6));
    CHECK(to_double(r.table("tv_residue_1").row(81)->values[0]) == doctest::Approx(0.01523755).epsilon(1e-6));
    CHECK(r.verdict("tv_decreasing_residue_0").pass);
    CHECK(r.verdict("tv_decreasing_residue_1").pass);
}

TEST_CASE("Boltzmann limit graphs")
{
    const auto m = build_class(BlockWeights::triangle(), 64);
    RngState rng(11, 0);
    std::size_t empty = 0;
    const std::size_t trials = 4000;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto s = boltzmann_graph_sample(m, 1, rng, true);
        // a = 1: the number of components is even.
        CHECK(s.components.size() % 2 == 0);
        empty += s.components.empty() ? 1 : 0;
        for (const auto &c : s.components) {
            const auto g = to_graph(c);
            CHECK(oracle::is_connected(g));
            CHECK(oracle::blocks_all(g, [](int v, int e) { return v == 3 && e == 3; }));
        }
    }
    // Pr{K = 0 | K even} = 1 / cosh(c).
    const double c = to_double(m.C_at_rho);
    const double p = 1 / std::cosh(c);
    const double se = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(static_cast<double>(empty) / trials - p) < 4 * se);
    CHECK_THROWS_AS(boltzmann_graph_sample(m, 2, rng), precondition_error);
    const auto custom = build_class(BlockWeights::from_coeffs({0, 1, 1}), 20);
    CHECK_THROWS_AS(boltzmann_graph_sample(custom, 0, rng, true), precondition_error);
}
