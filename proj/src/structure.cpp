#include <gibbs/structure.hpp>

#include <algorithm>
#include <map>
#include <numeric>

#include <gibbs/numeric.hpp>

namespace gibbs
{

Structure Structure::empty_set()
{
    return Structure{};
}

Structure Structure::atoms(Kind kind, std::size_t n)
{
    Structure s;
    s.kind = kind;
    s.labels.resize(n);
    std::iota(s.labels.begin(), s.labels.end(), Label{1});
    return s;
}

std::size_t Structure::size() const
{
    switch (kind) {
        case Kind::atom:
        case Kind::set:
            return labels.size();
        case Kind::tree:
            return outdegrees.size();
        case Kind::graph: {
            const auto placeholders = std::count(labels.begin(), labels.end(), placeholder_label);
            return labels.size() - static_cast<std::size_t>(placeholders);
        }
        case Kind::composite: {
            std::size_t n = 0;
            for (const auto &c : components) {
                n += c.size();
            }
            return n;
        }
    }
    return 0;
}

std::string to_string(Structure::Kind k)
{
    switch (k) {
        case Structure::Kind::atom:
            return "atom";
        case Structure::Kind::set:
            return "set";
        case Structure::Kind::tree:
            return "tree";
        case Structure::Kind::graph:
            return "graph";
        case Structure::Kind::composite:
            return "composite";
    }
    return "?";
}

std::vector<std::size_t> component_sizes(const Structure &s)
{
    std::vector<std::size_t> out;
    out.reserve(s.components.size());
    for (const auto &c : s.components) {
        out.push_back(c.size());
    }
    return out;
}

namespace
{

void collect_labels(const Structure &s, std::vector<Label> &out)
{
    for (const auto l : s.labels) {
        if (l != placeholder_label) {
            out.push_back(l);
        }
    }
    for (const auto &c : s.components) {
        collect_labels(c, out);
    }
}

Structure map_labels(const Structure &s, const auto &f)
{
    Structure r = s;
    for (auto &l : r.labels) {
        l = f(l);
    }
    for (auto &[u, v] : r.edges) {
        u = f(u);
        v = f(v);
    }
    for (auto &b : r.blocks) {
        for (auto &l : b) {
            l = f(l);
        }
    }
    for (auto &c : r.components) {
        c = map_labels(c, f);
    }
    return r;
}

} // namespace

std::vector<Label> all_labels(const Structure &s)
{
    std::vector<Label> out;
    collect_labels(s, out);
    return out;
}

Structure apply_permutation(const Structure &s, const std::vector<Label> &perm)
{
    if (perm.empty() || perm[0] != placeholder_label) {
        throw precondition_error("apply_permutation: perm[0] must map the placeholder to itself");
    }
    return map_labels(s, [&](Label l) {
        if (l >= perm.size()) {
            throw precondition_error("apply_permutation: label outside the permutation");
        }
        return perm[l];
    });
}

Structure compact_labels(const Structure &s)
{
    auto labels = all_labels(s);
    std::sort(labels.begin(), labels.end());
    std::map<Label, Label> rank;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        rank[labels[i]] = static_cast<Label>(i + 1);
    }
    return map_labels(s, [&](Label l) { return l == placeholder_label ? l : rank.at(l); });
}

bool is_valid_dfs_sequence(const std::vector<std::uint32_t> &outdegrees)
{
    const auto n = outdegrees.size();
    if (n == 0) {
        return false;
    }
    std::uint64_t sum = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        sum += outdegrees[k - 1];
        if (k < n && sum < k) {
            return false;
        }
    }
    return sum == n - 1;
}

nlohmann::json to_json(const Structure &s)
{
    nlohmann::json j;
    j["type"] = to_string(s.kind);
    j["size"] = s.size();
    if (s.pointed) {
        j["pointed"] = true;
    }
    switch (s.kind) {
        case Structure::Kind::atom:
        case Structure::Kind::set:
            j["labels"] = s.labels;
            break;
        case Structure::Kind::tree:
            j["outdegrees"] = s.outdegrees;
            if (!s.labels.empty()) {
                j["labels"] = s.labels;
            }
            break;
        case Structure::Kind::graph: {
            j["vertices"] = s.labels;
            auto edges = nlohmann::json::array();
            for (const auto &[u, v] : s.edges) {
                edges.push_back({u, v});
            }
            j["edges"] = std::move(edges);
            j["blocks"] = s.blocks;
            break;
        }
        case Structure::Kind::composite: {
            j["outer"] = s.outer;
            auto comps = nlohmann::json::array();
            for (const auto &c : s.components) {
                comps.push_back(to_json(c));
            }
            j["components"] = std::move(comps);
            break;
        }
    }
    return j;
}

} // namespace gibbs
