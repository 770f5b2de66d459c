#ifndef GIBBS_TESTS_ENUMERATE_HPP
#define GIBBS_TESTS_ENUMERATE_HPP

// Brute-force enumerators used as independent references by the tests. None
// of this goes through the series code.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gibbs/numeric.hpp>
#include <gibbs/structure.hpp>

namespace oracle
{

using gibbs::Rational;
using gibbs::Structure;

struct Graph {
    int n = 0; // vertices 1..n
    std::vector<std::pair<int, int>> edges;
};

// Every simple graph on vertices 1..n (2^(n(n-1)/2) of them).
std::vector<Graph> all_graphs(int n);

bool is_connected(const Graph &g);
bool is_acyclic(const Graph &g);

// Biconnected components (blocks) as (vertex count, edge count) pairs.
// Isolated vertices contribute nothing.
std::vector<std::pair<int, int>> block_shapes(const Graph &g);

// True when every block has a shape accepted by keep.
bool blocks_all(const Graph &g, const std::function<bool(int vertices, int edges)> &keep);

// Rooted labelled trees on n vertices, counted through parent functions.
std::uint64_t count_rooted_trees(int n);

// Every sequence (d_1..d_n) with sum n - r whose height r + sum (d_i - 1)
// stays >= 1 before the last step and ends at 0: the depth-first codes of
// ordered forests with r trees and n nodes.
std::vector<std::vector<unsigned>> forest_codes(int n, int r);

// Labelled objects with weights, as library structures.
struct Weighted {
    Structure s;
    Rational w;
};

// The connected components of g as a set composite of graph structures.
Structure as_composite(const Graph &g);
Structure as_graph(const Graph &g);

// Set partitions of {1..n} into blocks.
std::vector<std::vector<std::vector<int>>> set_partitions(int n);

// A string that identifies s up to the order of stored lists. rooted keeps
// the first vertex of every graph in place.
std::string normal_form(const Structure &s, bool rooted);

// Isomorphism type: minimum normal form over all relabellings of 1..n.
std::string type_of(const Structure &s, bool rooted);

// Every permutation of 1..n as a label map with perm[0] = 0.
std::vector<std::vector<gibbs::Label>> permutations(int n);

} // namespace oracle

#endif
