#ifndef GIBBS_DIAGNOSTICS_HPP
#define GIBBS_DIAGNOSTICS_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <gibbs/numeric.hpp>
#include <gibbs/rng.hpp>
#include <gibbs/series.hpp>
#include <gibbs/species.hpp>

namespace gibbs
{

inline constexpr const char *tool_version = "gibbs 0.1.0";

struct Scalar {
    std::string name;
    Real value;
    // Absolute error bound; ignored when exact is set.
    Real error;
    std::optional<Rational> exact;
    std::string note;
};

struct TableRow {
    long index = 0;
    std::vector<Real> values;
    // Exact "p/q" renderings of values, when the entry is exact.
    std::vector<std::string> exact;
};

struct Table {
    std::string name;
    std::string index_name = "n";
    std::vector<std::string> columns;
    std::vector<TableRow> rows;
    // Absolute error bound shared by every value; 0 means exact up to the
    // working precision of Real.
    Real error = 0;
    std::string note;

    const TableRow *row(long index) const;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
    // Table and row indices the verdict was computed from.
    std::string table;
    std::vector<long> rows;
};

struct Report {
    std::string name;
    std::vector<Scalar> scalars;
    std::vector<Table> tables;
    std::vector<Verdict> verdicts;
    nlohmann::json metadata = nlohmann::json::object();

    const Scalar &scalar(const std::string &name) const;
    const Table &table(const std::string &name) const;
    const Verdict &verdict(const std::string &name) const;
    bool all_pass() const;
};

nlohmann::json to_json(const Report &r);
// One table as CSV, preceded by "# key: value" lines with the metadata.
std::string table_csv(const Report &r, const Table &t);

// Index range [first, last], inclusive.
struct Window {
    std::size_t first = 0;
    std::size_t last = 0;
};

// Trend verdict on one column: the mean of |value - target| over the last
// third of the rows must be at most 90% of the mean over the first third.
Verdict trend_verdict(const std::string &name, const Table &t, std::size_t column, const Real &target);
// Strictly decreasing column over the given row indices.
Verdict decreasing_verdict(const std::string &name, const Table &t, std::size_t column,
                           const std::vector<long> &indices);

// Ratio and self-convolution conditions for g in S_d. The series is shifted by
// its offset m first. When g_at_rho is given, the convolution ratio is
// compared against 2 g(rho); otherwise only its growth is judged.
Report subexp_check(const Series &g, const Real &rho, Window window, std::optional<Real> g_at_rho = std::nullopt);

// [z^n] f(g(z)) against f'(g(rho)) [z^n] g(z).
Report stopped_sum_check(const Series &f, const Series &g, const Real &rho, const Real &g_at_rho, Window window);

// Exact law of the largest component size of an F o G object of size n;
// entry m is Pr{max = m}.
std::vector<Rational> largest_component_law(const SpeciesExpr &F, const SpeciesExpr &G, std::size_t n);

// Lattice data for the limit of the fragment of an F o G object of size n:
// D = d / gcd(m, d) and the residue a with a * m = n (mod d).
struct FragmentLattice {
    std::size_t d = 1;
    std::size_t m = 0;
    std::size_t D = 1;
    std::size_t a = 0;
};
FragmentLattice fragment_lattice(const Series &g, std::size_t n);

// Limit fragment species F'_a o G, where F_a keeps outer sizes = a (mod D).
SpeciesExpr limit_fragment_species(const SpeciesExpr &F, const SpeciesExpr &G, const FragmentLattice &lat);

// Total variation between |R_n| and |R|.
Report fragment_size_tv(const SpeciesExpr &F, const SpeciesExpr &G, std::size_t n, const Real &rho);

struct MomentResult {
    Rational exact;
    Real limit;
    Real limit_error;
};

// E[c(S_n)^k] exactly and its limit E[(c(R) + 1)^k].
MomentResult component_moment(const SpeciesExpr &F, const SpeciesExpr &G, std::size_t n, std::size_t k,
                              const Real &rho);

// Pr{S_{n+1} = n-1} / Pr{S_n = n-1} for the tilted offspring law.
Report strong_ratio_check(const Series &phi, const Real &tau, Window window);

// Both cycle-lemma identities as exact rational equalities for n <= n_max.
Report cycle_lemma_check(const Series &phi, std::size_t n_max);

// Number of depth-first outdegree sequences of r concatenated trees with n
// nodes in total, each node of outdegree k weighted by phi_k.
Rational forest_sequence_weight(const Series &phi, std::size_t n, std::size_t r);

using ProjectedSampler = std::function<long(RngState &)>;

struct MonteCarloOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t streams = 1;
    std::size_t threads = 1;
    std::size_t bootstrap = 200;
    double level = 0.95;
};

// Plug-in TV between the projected laws of two samplers, with a bootstrap
// interval. Sample i of each sampler uses stream i mod streams.
Report tv_monte_carlo(const ProjectedSampler &a, const ProjectedSampler &b, const MonteCarloOptions &opts);

// sum_{i, j >= k_n, i + j = n} x_i x_j / x_n with k_n = floor(sqrt(n)).
Report double_tail_probe(const Series &x, Window window);

std::vector<std::vector<Rational>> stirling2_table(std::size_t k);

} // namespace gibbs

#endif
