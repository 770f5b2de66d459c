#ifndef GIBBS_STRUCTURE_HPP
#define GIBBS_STRUCTURE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace gibbs
{

using Label = std::uint32_t;

// Label used for the distinguished placeholder of a pointed (derived) object.
inline constexpr Label placeholder_label = 0;

// A sampled labelled object.
//
//   atom       weighted atom of size labels.size()
//   set        set of labelled atoms
//   tree       plane tree, outdegrees in depth-first order (labels optional)
//   graph      labelled graph; blocks lists the vertex sets of its blocks,
//              edges is empty when the block family has no explicit rendering
//   composite  an outer object whose slots are filled by components
//
// Labels live in [1, n]. A pointed object additionally carries the placeholder
// (label 0 for graphs; an extra empty slot for composites) which does not count
// towards its size.
struct Structure {
    enum class Kind { atom, set, tree, graph, composite };

    Kind kind = Kind::set;
    std::vector<Label> labels;
    std::vector<std::uint32_t> outdegrees;
    std::vector<std::pair<Label, Label>> edges;
    std::vector<std::vector<Label>> blocks;
    bool pointed = false;

    // Composite only: "set", "atom" or "sequence" for the outer object.
    std::string outer;
    std::vector<Structure> components;

    static Structure empty_set();
    static Structure atoms(Kind kind, std::size_t n);

    std::size_t size() const;
    bool operator==(const Structure &) const = default;
};

std::string to_string(Structure::Kind k);

// Sizes of the components of a composite, in stored order.
std::vector<std::size_t> component_sizes(const Structure &s);

// Every label in the structure (placeholder excluded), unsorted.
std::vector<Label> all_labels(const Structure &s);

// Replaces label l by perm[l] throughout; perm[0] must be 0.
Structure apply_permutation(const Structure &s, const std::vector<Label> &perm);

// Relabels onto [1, k] preserving the relative order of labels.
Structure compact_labels(const Structure &s);

// Checks the depth-first prefix condition: sum d = n - 1 and every proper
// prefix of length k has sum >= k.
bool is_valid_dfs_sequence(const std::vector<std::uint32_t> &outdegrees);

nlohmann::json to_json(const Structure &s);

} // namespace gibbs

#endif
