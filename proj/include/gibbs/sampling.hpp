#ifndef GIBBS_SAMPLING_HPP
#define GIBBS_SAMPLING_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include <gibbs/numeric.hpp>
#include <gibbs/rng.hpp>
#include <gibbs/series.hpp>
#include <gibbs/species.hpp>
#include <gibbs/structure.hpp>

namespace gibbs
{

inline constexpr std::size_t default_node_cap = 10'000'000;
inline constexpr std::size_t default_max_attempts = 1'000'000;
inline constexpr std::size_t default_exact_bound = 512;

// Boltzmann sample of e at y; labels are uniformly random on [1, size].
// Compose outers must be SET, a restricted SET, a weighted atom or the
// derivative of one of those.
Structure boltzmann_sample(const SpeciesExpr &e, const Real &y, RngState &rng,
                           std::size_t node_cap = default_node_cap);

// As above, but gives up (nullopt) as soon as the size exceeds size_limit.
std::optional<Structure> boltzmann_sample_bounded(const SpeciesExpr &e, const Real &y, RngState &rng,
                                                  std::size_t size_limit, std::size_t node_cap = default_node_cap);

Structure relabel_uniform(const Structure &s, RngState &rng);

// Offspring law Pr{xi = k} = phi_k tau^k / phi(tau) as a sampling table.
class GaltonWatson
{
public:
    GaltonWatson(const Series &phi, const Real &tau);

    // Plane tree, outdegrees in depth-first order.
    Structure sample(RngState &rng, std::size_t node_cap = default_node_cap) const;
    std::size_t offspring(RngState &rng) const;

    double mean() const
    {
        return mean_;
    }
    // Offspring mass beyond the known coefficients (redrawn when hit).
    double tail_mass() const
    {
        return tail_;
    }

private:
    std::vector<double> cdf_;
    double mean_ = 0;
    double tail_ = 0;
};

Structure gw_tree_sample(const Series &phi, const Real &tau, RngState &rng);

struct ConditionedSample {
    Structure structure;
    std::size_t attempts = 0;
};

// Rejection from Boltzmann samples at y until the size is n. Throws
// resource_cap_error with the acceptance statistics when attempts run out.
ConditionedSample conditioned_sample(const SpeciesExpr &e, std::size_t n, const Real &y, RngState &rng,
                                     std::size_t max_attempts = default_max_attempts);

// Recursive-method sampler for objects of a fixed size, driven by exact
// coefficient tables. Same law as conditioned_sample, no rejection. Tables are
// built once per sampler and reused across calls.
class ExactSampler
{
public:
    ExactSampler(SpeciesExpr e, std::size_t bound = default_exact_bound);
    ~ExactSampler();
    ExactSampler(const ExactSampler &) = delete;
    ExactSampler &operator=(const ExactSampler &) = delete;

    Structure sample(std::size_t n, RngState &rng) const;
    // Component sizes only, for compose expressions; skips building the
    // components themselves.
    std::vector<std::size_t> sample_component_sizes(std::size_t n, RngState &rng) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Structure exact_sample_small(const SpeciesExpr &e, std::size_t n, RngState &rng,
                             std::size_t bound = default_exact_bound);

struct Fragment {
    Structure rest;
    std::size_t removed_size = 0;
};

// Removes a uniformly chosen largest component and relabels the rest
// order-preservingly onto [1, n - removed_size].
Fragment fragment(const Structure &s, RngState &rng);

// Boltzmann sample of F'_a o G at rho, the limit of the fragment. Without a
// residue the lattice is taken as trivial.
Structure limit_fragment_sample(const SpeciesExpr &F, const SpeciesExpr &G, const Real &rho, RngState &rng,
                                std::optional<std::pair<std::size_t, std::size_t>> residue = std::nullopt);

// K ~ psi (a probability generating function given exactly), then K
// independent GW trees.
Structure gw_forest_sample(const Series &psi, const Series &phi, const Real &tau, RngState &rng);

} // namespace gibbs

#endif
