#include "corpus.hpp"

#include <map>

namespace oracle
{

using gibbs::Label;
using gibbs::SpeciesExpr;

namespace
{

std::vector<Label> iota_labels(int n)
{
    std::vector<Label> v;
    for (int i = 1; i <= n; ++i) {
        v.push_back(static_cast<Label>(i));
    }
    return v;
}

std::vector<Weighted> graphs_where(int n, const std::function<bool(const Graph &)> &keep, bool composite)
{
    std::vector<Weighted> out;
    for (const auto &g : all_graphs(n)) {
        if (keep(g)) {
            out.push_back({composite ? as_composite(g) : as_graph(g), 1});
        }
    }
    return out;
}

bool is_tree(const Graph &g)
{
    return is_connected(g) && is_acyclic(g);
}

bool is_triangle_cactus(const Graph &g)
{
    return is_connected(g) && blocks_all(g, [](int v, int e) { return v == 3 && e == 3; });
}

bool all_triangle_blocks(const Graph &g)
{
    return blocks_all(g, [](int v, int e) { return v == 3 && e == 3; });
}

void replace_label(Structure &s, Label from, Label to)
{
    for (auto &l : s.labels) {
        l = l == from ? to : l;
    }
    for (auto &[u, v] : s.edges) {
        u = u == from ? to : u;
        v = v == from ? to : v;
    }
    for (auto &c : s.components) {
        replace_label(c, from, to);
    }
}

} // namespace

std::vector<CorpusEntry> corpus()
{
    std::vector<CorpusEntry> out;
    out.push_back({"set", SpeciesExpr::set(), [](int n) {
                       Structure s;
                       s.kind = Structure::Kind::set;
                       s.labels = iota_labels(n);
                       return std::vector<Weighted>{{s, 1}};
                   }});
    out.push_back({"odd_sets", SpeciesExpr::restricted(SpeciesExpr::set(), 1, 2), [](int n) {
                       std::vector<Weighted> v;
                       if (n % 2 == 1) {
                           Structure s;
                           s.kind = Structure::Kind::set;
                           s.labels = iota_labels(n);
                           v.push_back({s, 1});
                       }
                       return v;
                   }});
    // W(z) = z + (3/2) z^2: one atom object of size n with weight n! W_n.
    out.push_back({"weighted_atom",
                   SpeciesExpr::atom(gibbs::Series({0, 1, Rational(3, 2)})), [](int n) {
                       std::vector<Weighted> v;
                       if (n == 1 || n == 2) {
                           Structure s;
                           s.kind = Structure::Kind::atom;
                           s.labels = iota_labels(n);
                           v.push_back({s, n == 1 ? Rational(1) : Rational(3)});
                       }
                       return v;
                   }});
    out.push_back({"cayley_tree", SpeciesExpr::named("cayley_tree"),
                   [](int n) { return graphs_where(n, is_tree, false); }});
    out.push_back({"rooted_cayley_tree", SpeciesExpr::named("rooted_cayley_tree"),
                   [](int n) {
                       std::vector<Weighted> v;
                       for (const auto &g : all_graphs(n)) {
                           if (!is_tree(g)) {
                               continue;
                           }
                           for (int r = 1; r <= n; ++r) {
                               auto s = as_graph(g);
                               std::swap(s.labels[0], s.labels[r - 1]);
                               v.push_back({s, 1});
                           }
                       }
                       return v;
                   },
                   true});
    out.push_back({"forests", SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::named("cayley_tree")),
                   [](int n) { return graphs_where(n, is_acyclic, true); }});
    out.push_back({"triangle_cactus", SpeciesExpr::named("triangle_cactus"),
                   [](int n) { return graphs_where(n, is_triangle_cactus, false); }});
    out.push_back({"cactus_graphs", SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::named("triangle_cactus")),
                   [](int n) { return graphs_where(n, all_triangle_blocks, true); }});
    out.push_back({"pointed_forests",
                   SpeciesExpr::derive(SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::named("cayley_tree"))),
                   [](int n) {
                       std::vector<Weighted> v;
                       for (const auto &g : all_graphs(n + 1)) {
                           if (!is_acyclic(g)) {
                               continue;
                           }
                           auto s = as_composite(g);
                           replace_label(s, static_cast<Label>(n + 1), gibbs::placeholder_label);
                           s.pointed = true;
                           v.push_back({s, 1});
                       }
                       return v;
                   }});
    out.push_back({"perfect_matchings",
                   SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::atom(gibbs::Series({0, 0, Rational(1, 2)}))),
                   [](int n) {
                       std::vector<Weighted> v;
                       for (const auto &p : set_partitions(n)) {
                           bool pairs = true;
                           Structure s;
                           s.kind = Structure::Kind::composite;
                           s.outer = "set";
                           for (const auto &b : p) {
                               pairs = pairs && b.size() == 2;
                               Structure a;
                               a.kind = Structure::Kind::atom;
                               for (const int x : b) {
                                   a.labels.push_back(static_cast<Label>(x));
                               }
                               s.components.push_back(a);
                           }
                           if (pairs) {
                               v.push_back({s, 1});
                           }
                       }
                       return v;
                   }});
    return out;
}

InvarianceResult check_relabel_invariance(const CorpusEntry &e, int n)
{
    InvarianceResult r;
    const auto objs = e.objects(n);
    r.objects = objs.size();
    Rational total = 0;
    std::map<std::string, Rational> law;
    for (const auto &o : objs) {
        total += o.w;
        law[normal_form(o.s, e.rooted)] += o.w;
    }
    const Rational expected = gibbs::egf(e.species, static_cast<std::size_t>(n))[n] * gibbs::factorial(n);
    r.total_matches = total == expected;
    if (!r.total_matches) {
        r.detail = "enumerated weight " + gibbs::rational_to_string(total) + ", series "
                   + gibbs::rational_to_string(expected);
    }
    if (objs.empty()) {
        r.labelled_law = r.type_law = true;
        return r;
    }
    for (auto &[k, w] : law) {
        w /= total;
    }
    r.labelled_law = true;
    std::map<std::string, std::string> type_cache;
    auto type_of_cached = [&](const Structure &s) -> const std::string & {
        const auto key = normal_form(s, e.rooted);
        auto it = type_cache.find(key);
        if (it == type_cache.end()) {
            it = type_cache.emplace(key, type_of(s, e.rooted)).first;
        }
        return it->second;
    };
    std::map<std::string, Rational> before, after;
    for (const auto &o : objs) {
        before[type_of_cached(o.s)] += o.w / total;
    }
    const auto perms = permutations(n);
    const Rational share = Rational(1) / static_cast<unsigned long>(perms.size());
    for (const auto &p : perms) {
        std::map<std::string, Rational> moved;
        for (const auto &o : objs) {
            const auto t = gibbs::apply_permutation(o.s, p);
            moved[normal_form(t, e.rooted)] += o.w / total;
            after[type_of_cached(t)] += o.w / total * share;
        }
        if (moved != law) {
            r.labelled_law = false;
        }
    }
    r.type_law = before == after;
    r.types = before.size();
    return r;
}

} // namespace oracle
