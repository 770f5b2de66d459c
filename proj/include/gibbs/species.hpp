#ifndef GIBBS_SPECIES_HPP
#define GIBBS_SPECIES_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <gibbs/numeric.hpp>
#include <gibbs/rng.hpp>
#include <gibbs/series.hpp>
#include <gibbs/structure.hpp>

namespace gibbs
{

// Size and node accounting shared by all Boltzmann generators. A generator
// that would exceed size_limit gives up (the sample is rejected by the
// caller); exceeding node_cap is a resource error.
struct SampleBudget {
    std::size_t size_limit = static_cast<std::size_t>(-1);
    std::size_t node_cap = 10'000'000;
    std::size_t size = 0;
    std::size_t nodes = 0;

    // Accounts for k more atoms; false once the size limit is exceeded.
    bool grow(std::size_t k = 1);
};

// A concrete class bound to a species id, such as the connected graphs of a
// block class. Implementations are immutable and thread-safe.
class NamedClass
{
public:
    virtual ~NamedClass() = default;

    virtual std::string id() const = 0;
    virtual Series egf(std::size_t N) const = 0;
    virtual Real radius() const = 0;
    // F(y) and F'(y) for 0 <= y <= radius.
    virtual EvalResult value(const Real &y) const = 0;
    virtual EvalResult derived_value(const Real &y) const = 0;

    // Boltzmann samples of F and of F' (the pointed objects carry the
    // placeholder label 0). nullopt when the budget's size limit is hit.
    virtual std::optional<Structure> boltzmann(const Real &y, RngState &rng, SampleBudget &budget) const = 0;
    virtual std::optional<Structure> boltzmann_pointed(const Real &y, RngState &rng,
                                                       SampleBudget &budget) const = 0;

    // Object of size n drawn with probability proportional to its weight.
    virtual Structure exact(std::size_t n, RngState &rng) const = 0;
    virtual Structure exact_pointed(std::size_t n, RngState &rng) const = 0;
};

// Resolves a class id. Built-in ids: cayley_tree, rooted_cayley_tree,
// triangle_cactus, rooted_triangle_cactus, and "connected:<blocks>" /
// "rooted:<blocks>" for the presets edge, triangle and clique<k>. When
// blocks is given it defines the block weights (same format as a class spec)
// and id must be "connected" or "rooted".
std::shared_ptr<const NamedClass> find_named_class(const std::string &id,
                                                   const nlohmann::json *blocks = nullptr);

class SpeciesExpr
{
public:
    enum class Kind { atom, set, restricted, derive, compose, named };

    static SpeciesExpr atom(Series weights);
    static SpeciesExpr set();
    static SpeciesExpr restricted(SpeciesExpr child, std::size_t a, std::size_t D);
    static SpeciesExpr derive(SpeciesExpr child);
    static SpeciesExpr compose(SpeciesExpr outer, SpeciesExpr inner);
    static SpeciesExpr named(std::shared_ptr<const NamedClass> cls);
    static SpeciesExpr named(const std::string &id);

    Kind kind() const;
    const Series &weights() const;
    std::size_t residue() const;
    std::size_t modulus() const;
    // Child of restricted/derive, outer of compose.
    const SpeciesExpr &child() const;
    const SpeciesExpr &inner() const;
    const NamedClass &named_class() const;

    // Stable identity of the node, for caches.
    const void *id() const
    {
        return node_.get();
    }

    std::string describe() const;

private:
    struct Node;
    explicit SpeciesExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Wraps e so that only sizes in a + D Z survive.
SpeciesExpr restrict_size(const SpeciesExpr &e, std::size_t a, std::size_t D);

// Pushes derivatives through the constructions where the derived species has
// a direct form: SET' = SET, (SET_a mod D)' = SET_(a-1) mod D, weighted atoms
// differentiate their weight polynomial, restriction shifts its residue.
SpeciesExpr simplify_derive(const SpeciesExpr &e);

Series egf(const SpeciesExpr &e, std::size_t N);

// EGF of e composed with a given inner series (constant term zero).
Series substitute(const SpeciesExpr &outer, const Series &inner);

// F(y) with an error bound.
EvalResult egf_value(const SpeciesExpr &e, const Real &y);

struct SizeLaw {
    std::vector<Real> prob;
    Real tail_mass;
    Real error;
};

SizeLaw size_law(const SpeciesExpr &e, const Real &y, std::size_t N);

SpeciesExpr species_from_json(const nlohmann::json &j);
nlohmann::json to_json(const SpeciesExpr &e);

} // namespace gibbs

#endif
