#include <gibbs/sampling.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace gibbs
{

namespace
{

using K = SpeciesExpr::Kind;

Structure shift_labels(Structure s, Label offset)
{
    for (auto &l : s.labels) {
        if (l != placeholder_label) {
            l += offset;
        }
    }
    for (auto &[u, v] : s.edges) {
        u = u == placeholder_label ? u : u + offset;
        v = v == placeholder_label ? v : v + offset;
    }
    for (auto &b : s.blocks) {
        for (auto &l : b) {
            l = l == placeholder_label ? l : l + offset;
        }
    }
    for (auto &c : s.components) {
        c = shift_labels(std::move(c), offset);
    }
    return s;
}

bool is_set_family(const SpeciesExpr &e)
{
    return e.kind() == K::set || (e.kind() == K::restricted && e.child().kind() == K::set);
}

// Outer of a compose node after pushing derivatives through; also reports
// whether the outer object is pointed.
std::pair<SpeciesExpr, bool> resolve_outer(const SpeciesExpr &outer)
{
    const bool pointed = outer.kind() == K::derive;
    const auto s = simplify_derive(outer);
    if (!is_set_family(s) && s.kind() != K::atom) {
        throw precondition_error("sampling supports compose outers SET, restricted SET, weighted atoms and their "
                                 "derivatives; got "
                                 + outer.describe());
    }
    return {s, pointed};
}

// Index k = a (mod D) drawn with weight y^k / k!.
std::size_t restricted_poisson(double y, std::size_t a, std::size_t D, RngState &rng)
{
    std::vector<double> cdf;
    std::vector<std::size_t> ks;
    double acc = 0;
    const double ly = y > 0 ? std::log(y) : -INFINITY;
    for (std::size_t k = a;; k += D) {
        const double term = (k == 0) ? 1.0 : (y > 0 ? std::exp(static_cast<double>(k) * ly - std::lgamma(k + 1.0)) : 0.0);
        acc += term;
        cdf.push_back(acc);
        ks.push_back(k);
        if (static_cast<double>(k) > y && term <= 1e-18 * acc) {
            break;
        }
        if (ks.size() > 100000) {
            break;
        }
    }
    if (acc == 0) {
        throw precondition_error("restricted SET has no mass at y = 0 for a nonzero residue");
    }
    return ks[rng.pick(cdf)];
}

std::optional<Structure> generate(const SpeciesExpr &e, const Real &y, RngState &rng, SampleBudget &budget)
{
    switch (e.kind()) {
        case K::set: {
            const auto k = rng.poisson(to_double(y));
            if (!budget.grow(k)) {
                return std::nullopt;
            }
            return Structure::atoms(Structure::Kind::set, k);
        }
        case K::atom: {
            const auto &w = e.weights();
            std::vector<double> cdf;
            double acc = 0;
            Real yn = 1;
            for (std::size_t n = 0; n <= w.truncation(); ++n) {
                acc += to_double(to_real(w[n]) * yn);
                cdf.push_back(acc);
                yn *= y;
            }
            if (acc <= 0) {
                throw precondition_error("weighted atom has no mass at y");
            }
            const auto n = rng.pick(cdf);
            if (!budget.grow(n)) {
                return std::nullopt;
            }
            return Structure::atoms(Structure::Kind::atom, n);
        }
        case K::restricted: {
            if (e.child().kind() == K::set) {
                const auto k = restricted_poisson(to_double(y), e.residue(), e.modulus(), rng);
                if (!budget.grow(k)) {
                    return std::nullopt;
                }
                return Structure::atoms(Structure::Kind::set, k);
            }
            // Trials run without the size limit: aborting one early would not
            // tell whether it was going to be rejected for its residue.
            for (std::size_t attempt = 0; attempt < default_max_attempts; ++attempt) {
                SampleBudget trial;
                trial.node_cap = budget.node_cap;
                trial.nodes = budget.nodes;
                auto s = generate(e.child(), y, rng, trial);
                budget.nodes = trial.nodes;
                if (s->size() % e.modulus() == e.residue()) {
                    budget.nodes -= s->size();
                    if (!budget.grow(s->size())) {
                        return std::nullopt;
                    }
                    return s;
                }
            }
            throw resource_cap_error("restricted sampler: no sample in the residue class after "
                                     + std::to_string(default_max_attempts) + " attempts");
        }
        case K::derive: {
            const auto s = simplify_derive(e);
            if (s.kind() != K::derive) {
                return generate(s, y, rng, budget);
            }
            if (e.child().kind() == K::named) {
                return e.child().named_class().boltzmann_pointed(y, rng, budget);
            }
            throw precondition_error("no sampler for " + e.describe());
        }
        case K::compose: {
            const auto [outer, pointed] = resolve_outer(e.child());
            const auto inner_value = egf_value(e.inner(), y);
            SampleBudget outer_budget; // outer atoms are slots, not labels
            outer_budget.node_cap = budget.node_cap;
            const auto o = generate(outer, inner_value.value, rng, outer_budget);
            Structure s;
            s.kind = Structure::Kind::composite;
            s.outer = outer.kind() == K::atom ? "atom" : "set";
            s.pointed = pointed;
            Label offset = 0;
            for (std::size_t i = 0; i < o->size(); ++i) {
                auto c = generate(e.inner(), y, rng, budget);
                if (!c) {
                    return std::nullopt;
                }
                const auto sz = static_cast<Label>(c->size());
                s.components.push_back(shift_labels(std::move(*c), offset));
                offset += sz;
            }
            return s;
        }
        case K::named:
            return e.named_class().boltzmann(y, rng, budget);
    }
    throw precondition_error("unknown species kind");
}

void check_normalization(const SpeciesExpr &e, const Real &y)
{
    EvalResult v;
    try {
        v = egf_value(e, y);
    } catch (const precondition_error &err) {
        throw precondition_error(std::string("Boltzmann normalization is not certified: ") + err.what());
    }
    if (!(v.value > 0) || !boost::multiprecision::isfinite(v.value)) {
        throw precondition_error("Boltzmann normalization diverges or vanishes at y = " + real_to_string(y, 12));
    }
}

} // namespace

namespace
{

std::optional<Structure> sample_unchecked(const SpeciesExpr &e, const Real &y, RngState &rng, std::size_t size_limit,
                                          std::size_t node_cap)
{
    SampleBudget budget;
    budget.size_limit = size_limit;
    budget.node_cap = node_cap;
    auto s = generate(e, y, rng, budget);
    if (!s) {
        return std::nullopt;
    }
    return relabel_uniform(*s, rng);
}

} // namespace

std::optional<Structure> boltzmann_sample_bounded(const SpeciesExpr &e, const Real &y, RngState &rng,
                                                  std::size_t size_limit, std::size_t node_cap)
{
    check_normalization(e, y);
    return sample_unchecked(e, y, rng, size_limit, node_cap);
}

Structure boltzmann_sample(const SpeciesExpr &e, const Real &y, RngState &rng, std::size_t node_cap)
{
    return *boltzmann_sample_bounded(e, y, rng, static_cast<std::size_t>(-1), node_cap);
}

Structure relabel_uniform(const Structure &s, RngState &rng)
{
    auto labels = all_labels(s);
    if (labels.empty()) {
        return s;
    }
    std::sort(labels.begin(), labels.end());
    auto shuffled = labels;
    rng.shuffle(shuffled);
    std::vector<Label> perm(labels.back() + 1, placeholder_label);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        perm[labels[i]] = shuffled[i];
    }
    return apply_permutation(s, perm);
}

GaltonWatson::GaltonWatson(const Series &phi, const Real &tau)
{
    if (sgn(phi[0]) <= 0 || !phi.is_nonnegative()) {
        throw precondition_error("offspring weights need phi_0 > 0 and nonnegative coefficients");
    }
    if (tau < 0) {
        throw precondition_error("tilt must be nonnegative");
    }
    Real total;
    try {
        const auto v = eval_at(phi, tau, TailMode::geometric_bound);
        total = v.value + v.error;
    } catch (const precondition_error &) {
        total = eval_polynomial(phi, tau);
    }
    const auto sum = eval_polynomial(phi, tau);
    if (phi.max_index().value_or(0) * 2 <= phi.truncation()) {
        total = sum;
    }
    Real acc = 0, mean = 0, tk = 1;
    for (std::size_t k = 0; k <= phi.truncation(); ++k) {
        const Real p = to_real(phi[k]) * tk / total;
        acc += p;
        mean += p * k;
        cdf_.push_back(to_double(acc));
        tk *= tau;
    }
    tail_ = std::max(0.0, 1.0 - to_double(acc));
    cdf_.push_back(cdf_.back() + tail_);
    mean_ = to_double(mean);
    if (mean > 1 + Real(1e-9)) {
        throw precondition_error("supercritical tilt: mean offspring " + real_to_string(mean, 10) + " > 1");
    }
}

std::size_t GaltonWatson::offspring(RngState &rng) const
{
    for (;;) {
        const auto k = rng.pick(cdf_);
        if (k + 1 < cdf_.size()) {
            return k;
        }
    }
}

Structure GaltonWatson::sample(RngState &rng, std::size_t node_cap) const
{
    Structure t;
    t.kind = Structure::Kind::tree;
    // Depth-first outdegrees are i.i.d. until the walk sum (d_i - 1) first
    // reaches -1.
    long need = 1;
    while (need > 0) {
        if (t.outdegrees.size() >= node_cap) {
            throw resource_cap_error("Galton-Watson tree exceeded the node cap of " + std::to_string(node_cap));
        }
        const auto k = offspring(rng);
        t.outdegrees.push_back(static_cast<std::uint32_t>(k));
        need += static_cast<long>(k) - 1;
    }
    return t;
}

Structure gw_tree_sample(const Series &phi, const Real &tau, RngState &rng)
{
    return GaltonWatson(phi, tau).sample(rng);
}

ConditionedSample conditioned_sample(const SpeciesExpr &e, std::size_t n, const Real &y, RngState &rng,
                                     std::size_t max_attempts)
{
    if (sgn(egf(e, n)[n]) == 0) {
        throw precondition_error("no objects of size " + std::to_string(n));
    }
    check_normalization(e, y);
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        auto s = sample_unchecked(e, y, rng, n, default_node_cap);
        if (s && s->size() == n) {
            return {std::move(*s), attempt};
        }
    }
    throw resource_cap_error("conditioned_sample: no object of size " + std::to_string(n) + " in "
                             + std::to_string(max_attempts) + " attempts (acceptance rate 0/"
                             + std::to_string(max_attempts) + ")");
}

struct ExactSampler::Impl {
    SpeciesExpr root;
    std::size_t bound;

    mutable std::mutex mu;
    // Per compose node: inner series and outer tables.
    struct ComposeTables {
        std::size_t N = 0;
        Series g = Series::zero(0);
        // set family: E_r for r in [0, D); atom outer: powers g^j.
        std::vector<std::vector<Rational>> tab;
    };
    mutable std::map<const void *, ComposeTables> tables;
    mutable std::map<std::tuple<const void *, char, std::size_t, std::size_t>, std::vector<double>> cdfs;

    Impl(SpeciesExpr e, std::size_t b) : root(std::move(e)), bound(b) {}

    const ComposeTables &compose_tables(const SpeciesExpr &e, const SpeciesExpr &outer, std::size_t n) const
    {
        std::lock_guard lock(mu);
        auto &t = tables[e.id()];
        if (t.N >= n && !t.tab.empty()) {
            return t;
        }
        const auto N = std::max(n, std::min(bound, std::max<std::size_t>(2 * t.N, 16)));
        t.N = N;
        t.g = egf(e.inner(), N);
        if (sgn(t.g[0]) != 0) {
            throw precondition_error("compose: inner species has objects of size 0");
        }
        t.tab.clear();
        if (is_set_family(outer)) {
            const auto D = outer.kind() == K::set ? 1 : outer.modulus();
            for (std::size_t r = 0; r < D; ++r) {
                const auto s = multisection_exp(t.g, r, D);
                t.tab.emplace_back(s.coeffs().begin(), s.coeffs().end());
            }
        } else {
            const auto J = outer.weights().max_index().value_or(0);
            Series p = Series::constant(1, N);
            t.tab.emplace_back(p.coeffs().begin(), p.coeffs().end());
            for (std::size_t j = 1; j <= J; ++j) {
                p = p * t.g;
                t.tab.emplace_back(p.coeffs().begin(), p.coeffs().end());
            }
        }
        // Earlier cdfs came from the same exact tables and stay valid.
        return t;
    }

    const std::vector<double> &cdf(const void *id, char kind, std::size_t a, std::size_t b,
                                   const std::vector<Rational> &w) const
    {
        std::lock_guard lock(mu);
        const auto key = std::make_tuple(id, kind, a, b);
        if (const auto it = cdfs.find(key); it != cdfs.end()) {
            return it->second;
        }
        Rational total = 0;
        for (const auto &x : w) {
            total += x;
        }
        if (sgn(total) == 0) {
            throw precondition_error("exact sampler reached a choice with no weight");
        }
        std::vector<double> c;
        Rational acc = 0;
        for (const auto &x : w) {
            acc += x;
            c.push_back(Rational(acc / total).get_d());
        }
        c.back() = 1.0;
        return cdfs.emplace(key, std::move(c)).first->second;
    }

    bool cached(const void *id, char kind, std::size_t a, std::size_t b) const
    {
        std::lock_guard lock(mu);
        return cdfs.count(std::make_tuple(id, kind, a, b)) > 0;
    }

    std::vector<std::size_t> sizes(const SpeciesExpr &e, std::size_t n, RngState &rng) const
    {
        const auto [outer, pointed] = resolve_outer(e.child());
        (void)pointed;
        const auto &t = compose_tables(e, outer, n);
        const auto &g = t.g;
        std::vector<std::size_t> out;
        if (is_set_family(outer)) {
            const auto D = outer.kind() == K::set ? 1 : outer.modulus();
            std::size_t r = outer.kind() == K::set ? 0 : outer.residue();
            if (sgn(t.tab[r][n]) == 0) {
                throw precondition_error("no objects of size " + std::to_string(n) + " for " + e.describe());
            }
            std::size_t m = n;
            // m E_r[m] = sum_k k g_k E_{r-1}[m - k]
            while (m > 0) {
                const auto prev = (r + D - 1) % D;
                const std::vector<double> *c;
                if (cached(e.id(), 'e', r, m)) {
                    c = &cdf(e.id(), 'e', r, m, {});
                } else {
                    std::vector<Rational> w(m);
                    for (std::size_t k = 1; k <= m; ++k) {
                        w[k - 1] = g[k] * t.tab[prev][m - k] * static_cast<unsigned long>(k);
                    }
                    c = &cdf(e.id(), 'e', r, m, w);
                }
                const auto k = 1 + rng.pick(*c);
                out.push_back(k);
                m -= k;
                r = prev;
            }
            return out;
        }
        const auto &W = outer.weights();
        const auto J = t.tab.size() - 1;
        const std::vector<double> *c;
        if (cached(e.id(), 'k', 0, n)) {
            c = &cdf(e.id(), 'k', 0, n, {});
        } else {
            std::vector<Rational> w(J + 1);
            for (std::size_t j = 0; j <= J; ++j) {
                w[j] = (j <= W.truncation() ? W[j] : Rational(0)) * t.tab[j][n];
            }
            c = &cdf(e.id(), 'k', 0, n, w);
        }
        std::size_t j = rng.pick(*c);
        std::size_t rest = n;
        for (; j >= 1; --j) {
            if (j == 1) {
                out.push_back(rest);
                break;
            }
            const std::vector<double> *cc;
            if (cached(e.id(), 'p', j, rest)) {
                cc = &cdf(e.id(), 'p', j, rest, {});
            } else {
                std::vector<Rational> w(rest);
                for (std::size_t i = 1; i <= rest; ++i) {
                    w[i - 1] = g[i] * t.tab[j - 1][rest - i];
                }
                cc = &cdf(e.id(), 'p', j, rest, w);
            }
            const auto s = 1 + rng.pick(*cc);
            out.push_back(s);
            rest -= s;
        }
        return out;
    }

    Structure sample(const SpeciesExpr &e, std::size_t n, RngState &rng) const
    {
        switch (e.kind()) {
            case K::set:
                return Structure::atoms(Structure::Kind::set, n);
            case K::atom:
                if (n > e.weights().truncation() || sgn(e.weights()[n]) == 0) {
                    throw precondition_error("weighted atom has no object of size " + std::to_string(n));
                }
                return Structure::atoms(Structure::Kind::atom, n);
            case K::restricted:
                if (n % e.modulus() != e.residue()) {
                    throw precondition_error("size " + std::to_string(n) + " is outside the restriction lattice");
                }
                return sample(e.child(), n, rng);
            case K::derive: {
                const auto s = simplify_derive(e);
                if (s.kind() != K::derive) {
                    return sample(s, n, rng);
                }
                if (e.child().kind() == K::named) {
                    return e.child().named_class().exact_pointed(n, rng);
                }
                throw precondition_error("no exact sampler for " + e.describe());
            }
            case K::compose: {
                const auto [outer, pointed] = resolve_outer(e.child());
                Structure s;
                s.kind = Structure::Kind::composite;
                s.outer = outer.kind() == K::atom ? "atom" : "set";
                s.pointed = pointed;
                if (n == 0) {
                    const auto &t = compose_tables(e, outer, 0);
                    const bool ok = is_set_family(outer)
                                        ? (outer.kind() == K::set || outer.residue() == 0)
                                        : (sgn(outer.weights()[0]) != 0);
                    (void)t;
                    if (!ok) {
                        throw precondition_error("no objects of size 0 for " + e.describe());
                    }
                    return s;
                }
                Label offset = 0;
                for (const auto k : sizes(e, n, rng)) {
                    auto c = sample(e.inner(), k, rng);
                    s.components.push_back(shift_labels(std::move(c), offset));
                    offset += static_cast<Label>(k);
                }
                return s;
            }
            case K::named:
                return e.named_class().exact(n, rng);
        }
        throw precondition_error("unknown species kind");
    }
};

ExactSampler::ExactSampler(SpeciesExpr e, std::size_t bound) : impl_(std::make_unique<Impl>(std::move(e), bound)) {}

ExactSampler::~ExactSampler() = default;

Structure ExactSampler::sample(std::size_t n, RngState &rng) const
{
    if (n > impl_->bound) {
        throw precondition_error("exact sampler: n = " + std::to_string(n) + " exceeds the bound "
                                 + std::to_string(impl_->bound));
    }
    return relabel_uniform(impl_->sample(impl_->root, n, rng), rng);
}

std::vector<std::size_t> ExactSampler::sample_component_sizes(std::size_t n, RngState &rng) const
{
    if (impl_->root.kind() != K::compose) {
        throw precondition_error("component sizes need a compose expression");
    }
    if (n > impl_->bound) {
        throw precondition_error("exact sampler: n exceeds the bound");
    }
    if (n == 0) {
        return {};
    }
    return impl_->sizes(impl_->root, n, rng);
}

Structure exact_sample_small(const SpeciesExpr &e, std::size_t n, RngState &rng, std::size_t bound)
{
    return ExactSampler(e, bound).sample(n, rng);
}

Fragment fragment(const Structure &s, RngState &rng)
{
    if (s.kind != Structure::Kind::composite || s.components.empty()) {
        throw precondition_error("fragment needs a composite structure with at least one component");
    }
    const auto sizes = component_sizes(s);
    const auto largest = *std::max_element(sizes.begin(), sizes.end());
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == largest) {
            ties.push_back(i);
        }
    }
    const auto drop = ties[rng.below(ties.size())];
    Structure rest = s;
    rest.components.erase(rest.components.begin() + static_cast<std::ptrdiff_t>(drop));
    rest = compact_labels(rest);
    rest.pointed = true;
    return {std::move(rest), largest};
}

Structure limit_fragment_sample(const SpeciesExpr &F, const SpeciesExpr &G, const Real &rho, RngState &rng,
                                std::optional<std::pair<std::size_t, std::size_t>> residue)
{
    const auto Fa = residue ? SpeciesExpr::restricted(F, residue->first, residue->second) : F;
    return boltzmann_sample(SpeciesExpr::compose(SpeciesExpr::derive(Fa), G), rho, rng);
}

Structure gw_forest_sample(const Series &psi, const Series &phi, const Real &tau, RngState &rng)
{
    if (!psi.is_nonnegative()) {
        throw precondition_error("psi is not a probability generating function: negative coefficient");
    }
    Rational total = 0;
    for (const auto &c : psi.coeffs()) {
        total += c;
    }
    if (total != 1) {
        throw precondition_error("psi is not a probability generating function: coefficients sum to "
                                 + rational_to_string(total));
    }
    std::vector<double> cdf;
    Rational acc = 0;
    for (const auto &c : psi.coeffs()) {
        acc += c;
        cdf.push_back(acc.get_d());
    }
    const GaltonWatson gw(phi, tau);
    const auto k = rng.pick(cdf);
    Structure f;
    f.kind = Structure::Kind::composite;
    f.outer = "sequence";
    for (std::size_t i = 0; i < k; ++i) {
        f.components.push_back(gw.sample(rng));
    }
    return f;
}

} // namespace gibbs
