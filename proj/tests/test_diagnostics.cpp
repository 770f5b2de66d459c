#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include <gibbs/diagnostics.hpp>
#include <gibbs/sampling.hpp>

#include "oracles/enumerate.hpp"

using namespace gibbs;

namespace
{

SpeciesExpr trees()
{
    return SpeciesExpr::named("cayley_tree");
}

Table table_of(std::vector<double> xs)
{
    Table t;
    t.name = "t";
    t.columns = {"v"};
    long i = 0;
    for (const auto x : xs) {
        t.rows.push_back({i++, {Real(x)}, {}});
    }
    return t;
}

// Law of the largest component size of a uniform forest on n vertices.
std::map<std::size_t, Rational> largest_tree_law(int n)
{
    std::map<std::size_t, Rational> law;
    Rational total = 0;
    for (const auto &g : oracle::all_graphs(n)) {
        if (!oracle::is_acyclic(g)) {
            continue;
        }
        const auto sizes = component_sizes(oracle::as_composite(g));
        law[*std::max_element(sizes.begin(), sizes.end())] += 1;
        total += 1;
    }
    for (auto &[k, p] : law) {
        p /= total;
    }
    return law;
}

} // namespace

TEST_CASE("trend and monotonicity verdicts")
{
    const auto down = table_of({1.5, 1.3, 1.2, 1.1, 1.05, 1.02});
    CHECK(trend_verdict("x", down, 0, Real(1)).pass);
    CHECK_FALSE(trend_verdict("x", table_of({1.1, 1.2, 1.3, 1.4, 1.5, 1.6}), 0, Real(1)).pass);
    CHECK_FALSE(trend_verdict("x", table_of({1.1, 1.0}), 0, Real(1)).pass);
    CHECK(decreasing_verdict("d", down, 0, {0, 2, 5}).pass);
    CHECK_FALSE(decreasing_verdict("d", table_of({3, 2, 2}), 0, {0, 1, 2}).pass);
    CHECK_FALSE(decreasing_verdict("d", down, 0, {0, 9}).pass);
}

TEST_CASE("report serialization")
{
    Report r;
    r.name = "demo";
    r.metadata["seed"] = 5;
    r.scalars.push_back({"half", Real(0.5), Real(0), Rational(1, 2), ""});
    auto t = table_of({1, 2});
    t.rows[0].exact = {"1/1"};
    r.tables.push_back(t);
    r.verdicts.push_back({"ok", true, "fine", "t", {0}});
    const auto j = to_json(r);
    CHECK(j["metadata"]["tool"] == tool_version);
    CHECK(j["scalars"][0]["exact"] == "1/2");
    CHECK(j["verdicts"][0]["pass"] == true);
    const auto csv = table_csv(r, r.tables[0]);
    CHECK(csv.find("# tool: " + std::string(tool_version)) != std::string::npos);
    CHECK(csv.find("# seed: 5") != std::string::npos);
    CHECK(csv.find("n,v,v_exact\n0,1,1/1\n1,2,\n") != std::string::npos);
    CHECK(r.all_pass());
    CHECK_THROWS_AS(r.scalar("missing"), precondition_error);
}

TEST_CASE("Stirling numbers of the second kind")
{
    const auto S = stirling2_table(6);
    CHECK(S[4][2] == 7);
    CHECK(S[5][3] == 25);
    CHECK(S[6][6] == 1);
    CHECK(S[6][0] == 0);
    CHECK(S[0][0] == 1);
}

TEST_CASE("largest component law against enumeration")
{
    for (const int n : {3, 4, 5, 6}) {
        const auto law = largest_component_law(SpeciesExpr::set(), trees(), static_cast<std::size_t>(n));
        const auto ref = largest_tree_law(n);
        for (int m = 1; m <= n; ++m) {
            const auto it = ref.find(static_cast<std::size_t>(m));
            CHECK(law[m] == (it == ref.end() ? Rational(0) : it->second));
        }
    }
}

TEST_CASE("component moments")
{
    const auto rho = exp(Real(-1));
    const auto m1 = component_moment(SpeciesExpr::set(), trees(), 3, 1, rho);
    CHECK(m1.exact == Rational(12, 7));
    CHECK(abs(m1.limit - Real(1.5)) < Real(1e-30));
    const auto m0 = component_moment(SpeciesExpr::set(), trees(), 3, 0, rho);
    CHECK(m0.exact == 1);
    CHECK(abs(m0.limit - 1) < Real(1e-30));
    // Second moment at n = 3: types 3 (prob 3/7), 2+1 (3/7), 1+1+1 (1/7).
    const auto m2 = component_moment(SpeciesExpr::set(), trees(), 3, 2, rho);
    CHECK(m2.exact == Rational(1 * 3 + 4 * 3 + 9 * 1, 7));
    // Limit of E[K^2] for K - 1 ~ Poisson(1/2): 1 + 3/2 + 1/4.
    CHECK(abs(m2.limit - Real(2.75)) < Real(1e-30));
}

TEST_CASE("fragment lattice")
{
    const auto g = Series({0, 1, 0, 1, 0, 1, 0});
    const auto lat = fragment_lattice(g, 6);
    CHECK(lat.d == 2);
    CHECK(lat.m == 1);
    CHECK(lat.D == 2);
    CHECK(lat.a == 0);
    CHECK(fragment_lattice(g, 5).a == 1);
    const auto trivial = fragment_lattice(Series({0, 1, 1}), 2);
    CHECK(trivial.D == 1);
    CHECK_THROWS_AS(fragment_lattice(Series({0, 0, 1, 0, 1}), 3), precondition_error);
}

TEST_CASE("forest fragment size TV")
{
    // Reference values from tests/oracles/fragment_tv.py.
    const auto rho = exp(Real(-1));
    const double tv_ref[] = {0.0748451353683345, 0.03863239882962114};
    const std::size_t ns[] = {20, 40};
    for (int i = 0; i < 2; ++i) {
        const auto r = fragment_size_tv(SpeciesExpr::set(), trees(), ns[i], rho);
        CHECK(std::abs(to_double(r.scalar("tv").value) - tv_ref[i]) < 1e-12);
        CHECK(abs(r.scalar("limit_pr_empty").value - exp(Real(-0.5))) < Real(1e-30));
    }
    const auto r20 = fragment_size_tv(SpeciesExpr::set(), trees(), 20, rho);
    const auto law = largest_component_law(SpeciesExpr::set(), trees(), 20);
    CHECK(r20.scalar("exact_pr_empty").exact == law[20]);
}

TEST_CASE("cycle lemma identities for phi = exp")
{
    const auto r = cycle_lemma_check(Series::exponential(12), 12);
    CHECK(r.verdict("single_tree_identity").pass);
    CHECK(r.verdict("two_tree_identity").pass);
    CHECK_THROWS_AS(cycle_lemma_check(Series::exponential(5), 12), precondition_error);
}

TEST_CASE("forest sequence weights against code enumeration")
{
    const auto phi = Series({1, 2, 3, 1, 2, 1, 1, 1});
    for (int n = 1; n <= 6; ++n) {
        for (int r = 1; r <= 3; ++r) {
            Rational ref = 0;
            for (const auto &code : oracle::forest_codes(n, r)) {
                Rational w = 1;
                for (const auto d : code) {
                    w *= phi[d];
                }
                ref += w;
            }
            CHECK(forest_sequence_weight(phi, static_cast<std::size_t>(n), static_cast<std::size_t>(r)) == ref);
        }
    }
    CHECK(forest_sequence_weight(phi, 0, 0) == 1);
    CHECK(forest_sequence_weight(phi, 3, 0) == 0);
}

TEST_CASE("strong ratio")
{
    const auto r = strong_ratio_check(Series::exponential(202), Real(1), {10, 200});
    const auto &t = r.table("ratio");
    // Closed form for phi = exp: e^(-1) ((n+1)/n)^(n-1).
    for (const long n : {10L, 57L, 200L}) {
        const auto *row = t.row(n);
        REQUIRE(row != nullptr);
        const Real closed = exp(Real(-1)) * pow(Real(n + 1) / n, Real(n - 1));
        CHECK(abs(row->values[0] - closed) < Real(1e-30));
    }
    CHECK(r.verdict("ratio_to_one").pass);
    CHECK(r.verdict("last_within_0.01").pass);
    const auto deg = strong_ratio_check(Series({1, 0, 0}), Real(1), {1, 2});
    CHECK(deg.metadata["status"] == "degenerate");
}

TEST_CASE("subexponential probe")
{
    // Geometric coefficients 2^n: ratio is exact, the convolution grows like n.
    std::vector<Rational> pow2{1};
    for (int n = 1; n <= 60; ++n) {
        pow2.push_back(pow2.back() * 2);
    }
    const auto r = subexp_check(Series(pow2), Real(0.5), {5, 59});
    CHECK_FALSE(r.verdict("subexponential").pass);
    CHECK(r.verdict("subexponential").detail.find("not subexponential") == 0);

    // C' for Cayley trees: coefficients (n+1)^(n-1)/n!, convolution ratio -> 2e.
    const std::size_t N = 200;
    std::vector<Rational> cp;
    for (std::size_t n = 0; n <= N; ++n) {
        Rational p = 1;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            p *= Rational(static_cast<unsigned long>(n + 1));
        }
        cp.push_back(n == 0 ? Rational(1) : p / factorial(n));
    }
    const auto s = subexp_check(Series(cp), exp(Real(-1)), {20, 199}, real_e());
    CHECK(s.verdict("subexponential").pass);
    CHECK(s.verdict("convolution_to_target").pass);
    CHECK(s.verdict("ratio_to_one").pass);
}

TEST_CASE("stopped sums")
{
    const std::size_t N = 120;
    std::vector<Rational> c{0};
    for (std::size_t n = 1; n <= N; ++n) {
        Rational p = 1;
        for (std::size_t i = 0; i + 2 < n; ++i) {
            p *= Rational(static_cast<unsigned long>(n));
        }
        c.push_back(n == 1 ? Rational(1) : p / factorial(n));
    }
    const auto r = stopped_sum_check(Series::exponential(N), Series(c), exp(Real(-1)), Real(0.5), {20, N});
    CHECK(r.verdict("ratio_to_f_prime").pass);
    CHECK(abs(r.scalar("f_prime_at_g_rho").value - exp(Real(0.5))) < Real(1e-30));
    CHECK_THROWS_AS(stopped_sum_check(Series({3}), Series(c), exp(Real(-1)), Real(0.5), {20, N}), precondition_error);
}

TEST_CASE("Monte Carlo TV")
{
    MonteCarloOptions opts;
    opts.samples = 20000;
    opts.seed = 3;
    opts.bootstrap = 100;
    const ProjectedSampler same = [](RngState &r) { return static_cast<long>(r.below(4)); };
    const auto r = tv_monte_carlo(same, same, opts);
    CHECK(r.scalar("ci_low").value <= 0.02);
    CHECK(r.scalar("tv_plugin").value < 0.03);
    const ProjectedSampler left = [](RngState &r) { return static_cast<long>(r.below(3)); };
    const ProjectedSampler right = [](RngState &r) { return 10 + static_cast<long>(r.below(3)); };
    const auto d = tv_monte_carlo(left, right, opts);
    CHECK(d.scalar("tv_plugin").value == 1);
    opts.samples = 10;
    CHECK_THROWS_AS(tv_monte_carlo(same, same, opts), precondition_error);

    // Threads and streams do not change the merged result.
    MonteCarloOptions a;
    a.samples = 4000;
    a.streams = 4;
    a.bootstrap = 20;
    auto b = a;
    b.threads = 3;
    const auto ra = tv_monte_carlo(left, same, a);
    const auto rb = tv_monte_carlo(left, same, b);
    CHECK(to_json(ra).dump() == to_json(rb).dump());
}

TEST_CASE("Monte Carlo fragment TV agrees with the exact value")
{
    // Forest fragment sizes at n = 40 against the limit object; the sampled
    // distance should sit near the exact projection TV of about 0.0386.
    const ExactSampler ex(SpeciesExpr::compose(SpeciesExpr::set(), trees()));
    const ProjectedSampler frag = [&](RngState &r) {
        const auto sizes = ex.sample_component_sizes(40, r);
        return 40 - static_cast<long>(*std::max_element(sizes.begin(), sizes.end()));
    };
    const ProjectedSampler limit = [](RngState &r) {
        return static_cast<long>(
            limit_fragment_sample(SpeciesExpr::set(), SpeciesExpr::named("cayley_tree"), exp(Real(-1)), r).size());
    };
    MonteCarloOptions opts;
    opts.samples = 20000;
    opts.seed = 9;
    opts.bootstrap = 100;
    const auto r = tv_monte_carlo(frag, limit, opts);
    const double exact = 0.03863239882962114;
    CHECK(to_double(r.scalar("tv_bias_corrected").value) == doctest::Approx(exact).epsilon(0.6));
}

TEST_CASE("double tail probe")
{
    // For x_n = 2^n every term of the sum is 1, so it counts n - 2 k_n + 1.
    std::vector<Rational> x{1};
    for (int n = 1; n <= 40; ++n) {
        x.push_back(x.back() * 2);
    }
    const auto r = double_tail_probe(Series(x), {10, 40});
    const auto &t = r.table("double_tail");
    CHECK(t.row(16)->values[0] == 4);
    CHECK(t.row(16)->values[1] == 9);
    CHECK(t.row(40)->values[1] == 29);
    CHECK_FALSE(r.verdict("decreasing").pass);
}
