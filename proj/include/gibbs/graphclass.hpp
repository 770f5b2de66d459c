#ifndef GIBBS_GRAPHCLASS_HPP
#define GIBBS_GRAPHCLASS_HPP

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include <gibbs/diagnostics.hpp>
#include <gibbs/series.hpp>
#include <gibbs/species.hpp>

namespace gibbs
{

// Derived block series B'(z) of a block class, as a polynomial.
class BlockWeights
{
public:
    static BlockWeights edge();
    static BlockWeights triangle();
    // Complete graphs on k >= 2 vertices.
    static BlockWeights clique(std::size_t k);
    // Explicit B' coefficients; b'_0 must be 0 and some b'_j positive.
    static BlockWeights from_coeffs(std::vector<Rational> bprime);
    // "edge", "triangle", "clique<k>", a list of those (summed), or
    // {"bprime_coeffs": [...]}.
    static BlockWeights from_json(const nlohmann::json &j);

    BlockWeights operator+(const BlockWeights &o) const;

    const Series &bprime() const
    {
        return bprime_;
    }
    // True when every block is a complete graph, so sampled components can be
    // drawn as explicit graphs.
    bool renderable() const
    {
        return renderable_;
    }
    const std::string &name() const
    {
        return name_;
    }

private:
    BlockWeights(Series bprime, bool renderable, std::string name);
    Series bprime_;
    bool renderable_;
    std::string name_;
};

struct LatticeConstant {
    Real value;
    Real error;
};

struct ClassModel {
    BlockWeights weights = BlockWeights::edge();
    std::size_t truncation = 0;
    Series bprime = Series::zero(0);
    Series phi = Series::zero(0);
    Series T = Series::zero(0);
    Series C = Series::zero(0);
    Series A = Series::zero(0);
    std::size_t d = 1;
    Real rho;
    Real tau;
    Real C_at_rho;
    Real C_at_rho_error;
    std::vector<LatticeConstant> C_a;
    bool smooth = true;

    // Connected and rooted connected graphs of the class, as species.
    std::shared_ptr<const NamedClass> connected;
    std::shared_ptr<const NamedClass> rooted;

    // T(x) for 0 <= x <= rho by bisection on t exp(-B'(t)) = x.
    Real T_value(const Real &x) const;
    // C(x) = B(t) + t - t B'(t) with t = T(x).
    Real C_value(const Real &x) const;
};

ClassModel build_class(const BlockWeights &w, std::size_t N);
ClassModel build_class_from_json(const nlohmann::json &spec, std::size_t fallback_truncation);

std::vector<LatticeConstant> lattice_constants(const ClassModel &m);
Report smoothness_verdict(const ClassModel &m);
Report asymptotic_check(const ClassModel &m, Window window);

// G_a: a Poisson(C(rho)) number of components conditioned on K = a - 1
// (mod d), each a Boltzmann connected graph at rho.
Structure boltzmann_graph_sample(const ClassModel &m, std::size_t a, RngState &rng, bool require_rendering = false);

Report frag_experiment(const ClassModel &m, const std::vector<std::size_t> &n_list);

} // namespace gibbs

#endif
