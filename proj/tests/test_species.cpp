#include <doctest.h>

#include <gibbs/species.hpp>

#include "oracles/corpus.hpp"
#include "oracles/enumerate.hpp"

using namespace gibbs;

namespace
{

SpeciesExpr forests()
{
    return SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::named("cayley_tree"));
}

std::size_t count_graphs(int n, bool (*keep)(const oracle::Graph &))
{
    std::size_t c = 0;
    for (const auto &g : oracle::all_graphs(n)) {
        c += keep(g) ? 1 : 0;
    }
    return c;
}

} // namespace

TEST_CASE("SET has coefficients 1/n!")
{
    const auto s = egf(SpeciesExpr::set(), 10);
    for (std::size_t n = 0; n <= 10; ++n) {
        CHECK(s[n] == Rational(1) / factorial(n));
    }
}

TEST_CASE("forest counts against acyclic graph enumeration")
{
    const auto a = egf(forests(), 6);
    const long expected[] = {1, 1, 2, 7, 38, 291, 2932};
    for (int n = 0; n <= 6; ++n) {
        CHECK(a[n] * factorial(n) == expected[n]);
        CHECK(a[n] * factorial(n) == static_cast<unsigned long>(count_graphs(n, oracle::is_acyclic)));
    }
}

TEST_CASE("restricted sets and their derivatives")
{
    const auto odd = SpeciesExpr::restricted(SpeciesExpr::set(), 1, 2);
    const auto s = egf(odd, 9);
    for (std::size_t n = 0; n <= 9; ++n) {
        CHECK(s[n] == (n % 2 == 1 ? Rational(1) / factorial(n) : Rational(0)));
    }
    const auto d = simplify_derive(SpeciesExpr::derive(odd));
    REQUIRE(d.kind() == SpeciesExpr::Kind::restricted);
    CHECK(d.residue() == 0);
    CHECK(d.modulus() == 2);
    CHECK(simplify_derive(SpeciesExpr::derive(SpeciesExpr::set())).kind() == SpeciesExpr::Kind::set);
    CHECK_THROWS_AS(SpeciesExpr::restricted(SpeciesExpr::set(), 2, 2), precondition_error);
    CHECK_THROWS_AS(SpeciesExpr::restricted(SpeciesExpr::set(), 0, 0), precondition_error);
}

TEST_CASE("derivative of a weighted atom")
{
    const auto w = SpeciesExpr::atom(Series({0, 1, Rational(1, 2), Rational(1, 3)}));
    const auto d = egf(SpeciesExpr::derive(w), 4);
    CHECK(d[0] == 1);
    CHECK(d[1] == 1);
    CHECK(d[2] == 1);
    CHECK(d[3] == 0);
    CHECK_THROWS_AS(SpeciesExpr::atom(Series({0, -1})), precondition_error);
}

TEST_CASE("derivative of a composition is F'(G) G'")
{
    const auto f = forests();
    const auto direct = egf(SpeciesExpr::derive(f), 8);
    const auto shifted = derive(egf(f, 9));
    CHECK(direct == shifted);
}

TEST_CASE("composition with a constant inner term is rejected")
{
    const auto bad = SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::set());
    CHECK_THROWS_AS(egf(bad, 4), precondition_error);
}

TEST_CASE("values at a point")
{
    const auto v = egf_value(SpeciesExpr::set(), Real(1));
    CHECK(abs(v.value - real_e()) <= v.error + Real(1e-40));
    const auto odd = egf_value(SpeciesExpr::restricted(SpeciesExpr::set(), 1, 2), Real(1));
    CHECK(abs(odd.value - sinh(Real(1))) <= odd.error + Real(1e-40));
    // Forests at the radius: exp(C(rho)) = e^(1/2).
    const auto f = egf_value(forests(), exp(Real(-1)));
    CHECK(abs(f.value - exp(Real(0.5))) < Real(1e-30));
}

TEST_CASE("Boltzmann size law sums to one")
{
    const auto law = size_law(SpeciesExpr::set(), Real(2), 40);
    Real sum = law.tail_mass;
    for (const auto &p : law.prob) {
        sum += p;
    }
    CHECK(abs(sum - 1) < Real(1e-20));
    CHECK(abs(law.prob[0] - exp(Real(-2))) < Real(1e-30));
}

TEST_CASE("JSON specs")
{
    const auto j = nlohmann::json::parse(R"({"kind": "compose", "outer": "set",
        "inner": {"kind": "named", "id": "cayley_tree"}})");
    const auto e = species_from_json(j);
    CHECK(egf(e, 6) == egf(forests(), 6));
    CHECK(species_from_json(to_json(e)).describe() == e.describe());
    CHECK(egf(species_from_json(nlohmann::json::parse(R"({"kind": "atom", "weights": [0, 1, "1/2"]})")), 3)[2]
          == Rational(1, 2));
    CHECK_THROWS_AS(species_from_json(nlohmann::json::parse(R"({"kind": "cycle"})")), spec_error);
    CHECK_THROWS_AS(species_from_json(nlohmann::json::parse(R"({"kind": "compose", "outer": "set"})")), spec_error);
    CHECK_THROWS_AS(species_from_json(nlohmann::json::parse(R"({"kind": "named", "id": "no_such_class"})")),
                    spec_error);
    CHECK_THROWS_AS(species_from_json(nlohmann::json::parse("42")), spec_error);
}

TEST_CASE("corpus totals and relabelling invariance up to size 5")
{
    for (const auto &entry : oracle::corpus()) {
        for (int n = 1; n <= 5; ++n) {
            CAPTURE(entry.name);
            CAPTURE(n);
            const auto r = oracle::check_relabel_invariance(entry, n);
            CHECK_MESSAGE(r.total_matches, r.detail);
            CHECK(r.labelled_law);
            CHECK(r.type_law);
        }
    }
}
