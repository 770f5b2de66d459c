#include <gibbs/species.hpp>

#include <limits>

namespace gibbs
{

bool SampleBudget::grow(std::size_t k)
{
    size += k;
    nodes += k;
    if (nodes > node_cap) {
        throw resource_cap_error("sampler node cap of " + std::to_string(node_cap) + " exceeded");
    }
    return size <= size_limit;
}

struct SpeciesExpr::Node {
    Kind kind;
    std::optional<Series> weights;
    std::size_t a = 0;
    std::size_t D = 1;
    std::vector<SpeciesExpr> children;
    std::shared_ptr<const NamedClass> cls;
};

SpeciesExpr SpeciesExpr::atom(Series weights)
{
    if (!weights.is_nonnegative()) {
        throw precondition_error("atom weights must be nonnegative");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::atom;
    n->weights = std::move(weights);
    return SpeciesExpr(std::move(n));
}

SpeciesExpr SpeciesExpr::set()
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::set;
    return SpeciesExpr(std::move(n));
}

SpeciesExpr SpeciesExpr::restricted(SpeciesExpr child, std::size_t a, std::size_t D)
{
    if (D == 0 || a >= D) {
        throw precondition_error("restriction needs 0 <= a < D");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::restricted;
    n->a = a;
    n->D = D;
    n->children.push_back(std::move(child));
    return SpeciesExpr(std::move(n));
}

SpeciesExpr SpeciesExpr::derive(SpeciesExpr child)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::derive;
    n->children.push_back(std::move(child));
    return SpeciesExpr(std::move(n));
}

SpeciesExpr SpeciesExpr::compose(SpeciesExpr outer, SpeciesExpr inner)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::compose;
    n->children.push_back(std::move(outer));
    n->children.push_back(std::move(inner));
    return SpeciesExpr(std::move(n));
}

SpeciesExpr SpeciesExpr::named(std::shared_ptr<const NamedClass> cls)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::named;
    n->cls = std::move(cls);
    return SpeciesExpr(std::move(n));
}

SpeciesExpr SpeciesExpr::named(const std::string &id)
{
    return named(find_named_class(id));
}

SpeciesExpr::Kind SpeciesExpr::kind() const
{
    return node_->kind;
}

const Series &SpeciesExpr::weights() const
{
    return *node_->weights;
}

std::size_t SpeciesExpr::residue() const
{
    return node_->a;
}

std::size_t SpeciesExpr::modulus() const
{
    return node_->D;
}

const SpeciesExpr &SpeciesExpr::child() const
{
    return node_->children.at(0);
}

const SpeciesExpr &SpeciesExpr::inner() const
{
    return node_->children.at(1);
}

const NamedClass &SpeciesExpr::named_class() const
{
    return *node_->cls;
}

std::string SpeciesExpr::describe() const
{
    switch (kind()) {
        case Kind::atom:
            return "ATOM";
        case Kind::set:
            return "SET";
        case Kind::restricted:
            return "RESTRICT(" + child().describe() + ", " + std::to_string(residue()) + " mod "
                   + std::to_string(modulus()) + ")";
        case Kind::derive:
            return "DERIVE(" + child().describe() + ")";
        case Kind::compose:
            return "COMPOSE(" + child().describe() + ", " + inner().describe() + ")";
        case Kind::named:
            return named_class().id();
    }
    return "?";
}

SpeciesExpr restrict_size(const SpeciesExpr &e, std::size_t a, std::size_t D)
{
    return SpeciesExpr::restricted(e, a, D);
}

SpeciesExpr simplify_derive(const SpeciesExpr &e)
{
    if (e.kind() != SpeciesExpr::Kind::derive) {
        return e;
    }
    const auto c = simplify_derive(e.child());
    switch (c.kind()) {
        case SpeciesExpr::Kind::set:
            return c;
        case SpeciesExpr::Kind::atom:
            return SpeciesExpr::atom(gibbs::derive(c.weights().padded(c.weights().truncation() + 1)));
        case SpeciesExpr::Kind::restricted: {
            const auto D = c.modulus();
            return SpeciesExpr::restricted(simplify_derive(SpeciesExpr::derive(c.child())), (c.residue() + D - 1) % D,
                                           D);
        }
        default:
            return c.id() == e.child().id() ? e : SpeciesExpr::derive(c);
    }
}

namespace
{

Series restrict_coeffs(const Series &s, std::size_t a, std::size_t D)
{
    std::vector<Rational> v(s.coeffs().begin(), s.coeffs().end());
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (n % D != a) {
            v[n] = 0;
        }
    }
    return Series(std::move(v));
}


// sum_{k = a mod D} y^k / k! with a tail bound.
EvalResult restricted_exp_value(const Real &y, std::size_t a, std::size_t D)
{
    Real sum = 0;
    Real term = 1; // y^k / k!
    const Real tiny = Real(1e-55);
    for (std::size_t k = 0;; ++k) {
        if (k > 0) {
            term = term * y / k;
        }
        if (k % D == a) {
            sum += term;
        }
        if (Real(k) > 2 * y + 2 && term <= tiny * (sum + tiny)) {
            // Remaining terms are bounded by a geometric series with ratio 1/2.
            return {sum, 2 * term};
        }
    }
}

} // namespace

Series substitute(const SpeciesExpr &outer, const Series &inner)
{
    using K = SpeciesExpr::Kind;
    const auto N = inner.truncation();
    const auto o = simplify_derive(outer);
    switch (o.kind()) {
        case K::set:
            return exp_series(inner);
        case K::restricted:
            if (o.child().kind() == K::set) {
                return multisection_exp(inner, o.residue(), o.modulus());
            }
            return compose(egf(o, N), inner);
        case K::compose:
            return substitute(o.child(), compose(egf(o.inner(), N), inner));
        default:
            return compose(egf(o, N), inner);
    }
}

Series egf(const SpeciesExpr &e, std::size_t N)
{
    using K = SpeciesExpr::Kind;
    switch (e.kind()) {
        case K::atom:
            return e.weights().padded(N).truncated(N);
        case K::set:
            return Series::exponential(N);
        case K::restricted:
            return restrict_coeffs(egf(e.child(), N), e.residue(), e.modulus());
        case K::derive: {
            const auto s = simplify_derive(e);
            if (s.kind() != K::derive) {
                return egf(s, N);
            }
            return gibbs::derive(egf(e.child(), N + 1));
        }
        case K::compose: {
            const auto g = egf(e.inner(), N);
            if (sgn(g[0]) != 0) {
                throw precondition_error("compose: inner species has objects of size 0");
            }
            return substitute(e.child(), g);
        }
        case K::named:
            return e.named_class().egf(N);
    }
    throw precondition_error("unknown species kind");
}

EvalResult egf_value(const SpeciesExpr &e, const Real &y)
{
    using K = SpeciesExpr::Kind;
    if (y < 0) {
        throw precondition_error("egf_value: y must be nonnegative");
    }
    switch (e.kind()) {
        case K::atom: {
            if (e.weights().max_index().value_or(0) * 2 > e.weights().truncation() && e.weights().truncation() > 16) {
                return eval_at(e.weights(), y, TailMode::geometric_bound);
            }
            return {eval_polynomial(e.weights(), y), Real(0)};
        }
        case K::set:
            return {boost::multiprecision::exp(y), Real(0)};
        case K::restricted:
            if (e.child().kind() == K::set) {
                return restricted_exp_value(y, e.residue(), e.modulus());
            }
            return eval_at(egf(e, default_truncation), y, TailMode::geometric_bound);
        case K::derive: {
            const auto s = simplify_derive(e);
            if (s.kind() != K::derive) {
                return egf_value(s, y);
            }
            if (e.child().kind() == K::named) {
                return e.child().named_class().derived_value(y);
            }
            return eval_at(egf(e, default_truncation), y, TailMode::geometric_bound);
        }
        case K::compose: {
            const auto g = egf_value(e.inner(), y);
            const auto f = egf_value(e.child(), g.value);
            Real err = f.error;
            if (g.error > 0) {
                const auto fp = egf_value(SpeciesExpr::derive(e.child()), g.value + g.error);
                err += fp.value * g.error;
            }
            return {f.value, err};
        }
        case K::named:
            return e.named_class().value(y);
    }
    throw precondition_error("unknown species kind");
}

SizeLaw size_law(const SpeciesExpr &e, const Real &y, std::size_t N)
{
    const auto total = egf_value(e, y);
    if (!(total.value > 0) || !boost::multiprecision::isfinite(total.value)) {
        throw precondition_error("size_law: normalization is not finite and positive at y");
    }
    const auto s = egf(e, N);
    SizeLaw law;
    law.prob.resize(N + 1);
    Real sum = 0;
    Real yn = 1;
    for (std::size_t n = 0; n <= N; ++n) {
        law.prob[n] = to_real(s[n]) * yn / total.value;
        sum += law.prob[n];
        yn *= y;
    }
    law.tail_mass = 1 - sum;
    law.error = total.error / total.value;
    if (law.tail_mass < 0 && -law.tail_mass > law.error + Real(1e-40)) {
        throw precondition_error("size_law: probabilities exceed 1; normalization is wrong");
    }
    if (law.tail_mass < 0) {
        law.tail_mass = 0;
    }
    return law;
}

namespace
{

std::size_t get_size(const nlohmann::json &j, const char *key, std::size_t fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const auto &v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw spec_error(std::string("species field '") + key + "' must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

} // namespace

SpeciesExpr species_from_json(const nlohmann::json &j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "set") {
            return SpeciesExpr::set();
        }
        return SpeciesExpr::named(s);
    }
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw spec_error("species spec must be an object with a string \"kind\"");
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "set") {
        return SpeciesExpr::set();
    }
    if (kind == "atom") {
        if (!j.contains("weights")) {
            return SpeciesExpr::atom(Series::monomial(1, 1, 1));
        }
        const auto &w = j.at("weights");
        if (w.is_array()) {
            return SpeciesExpr::atom(series_from_json({{"coeffs", w}}));
        }
        return SpeciesExpr::atom(series_from_json(w));
    }
    if (kind == "restricted" || kind == "set_restricted" || kind == "restrict") {
        const auto child = j.contains("child") ? species_from_json(j.at("child")) : SpeciesExpr::set();
        const auto a = get_size(j, "a", 0);
        const auto D = get_size(j, "D", 1);
        if (D == 0 || a >= D) {
            throw spec_error("restriction needs 0 <= a < D");
        }
        return SpeciesExpr::restricted(child, a, D);
    }
    if (kind == "derive") {
        if (!j.contains("child")) {
            throw spec_error("derive needs a \"child\"");
        }
        return SpeciesExpr::derive(species_from_json(j.at("child")));
    }
    if (kind == "compose") {
        if (!j.contains("outer") || !j.contains("inner")) {
            throw spec_error("compose needs \"outer\" and \"inner\"");
        }
        return SpeciesExpr::compose(species_from_json(j.at("outer")), species_from_json(j.at("inner")));
    }
    if (kind == "named") {
        if (!j.contains("id") || !j.at("id").is_string()) {
            throw spec_error("named species needs a string \"id\"");
        }
        const auto id = j.at("id").get<std::string>();
        if (j.contains("blocks")) {
            return SpeciesExpr::named(find_named_class(id, &j.at("blocks")));
        }
        return SpeciesExpr::named(id);
    }
    throw spec_error("unknown species kind '" + kind + "'");
}

nlohmann::json to_json(const SpeciesExpr &e)
{
    using K = SpeciesExpr::Kind;
    switch (e.kind()) {
        case K::atom:
            return {{"kind", "atom"}, {"weights", to_json(e.weights())}};
        case K::set:
            return {{"kind", "set"}};
        case K::restricted:
            return {{"kind", "restricted"}, {"child", to_json(e.child())}, {"a", e.residue()}, {"D", e.modulus()}};
        case K::derive:
            return {{"kind", "derive"}, {"child", to_json(e.child())}};
        case K::compose:
            return {{"kind", "compose"}, {"outer", to_json(e.child())}, {"inner", to_json(e.inner())}};
        case K::named:
            return {{"kind", "named"}, {"id", e.named_class().id()}};
    }
    return nullptr;
}

} // namespace gibbs
