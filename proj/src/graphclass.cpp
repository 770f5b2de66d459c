#include <gibbs/graphclass.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include <gibbs/sampling.hpp>

namespace gibbs
{

BlockWeights::BlockWeights(Series bprime, bool renderable, std::string name)
    : bprime_(std::move(bprime)), renderable_(renderable), name_(std::move(name))
{
    if (!bprime_.is_nonnegative()) {
        throw precondition_error("block weights must be nonnegative");
    }
    if (sgn(bprime_[0]) != 0) {
        throw precondition_error("B'(0) must be 0: a block has at least two vertices");
    }
    if (!bprime_.max_index()) {
        throw precondition_error("the block class is empty");
    }
}

BlockWeights BlockWeights::edge()
{
    return clique(2);
}

BlockWeights BlockWeights::triangle()
{
    return clique(3);
}

BlockWeights BlockWeights::clique(std::size_t k)
{
    if (k < 2) {
        throw precondition_error("clique blocks need at least two vertices");
    }
    const std::string name = k == 2 ? "edge" : k == 3 ? "triangle" : "clique" + std::to_string(k);
    return BlockWeights(Series::monomial(k - 1, 1 / factorial(k - 1), k - 1), true, name);
}

BlockWeights BlockWeights::from_coeffs(std::vector<Rational> bprime)
{
    if (bprime.empty()) {
        throw precondition_error("the block class is empty");
    }
    return BlockWeights(Series(std::move(bprime)), false, "bprime");
}

BlockWeights BlockWeights::operator+(const BlockWeights &o) const
{
    const auto n = std::max(bprime_.truncation(), o.bprime_.truncation());
    return BlockWeights(bprime_.padded(n) + o.bprime_.padded(n), renderable_ && o.renderable_,
                        name_ + "+" + o.name_);
}

BlockWeights BlockWeights::from_json(const nlohmann::json &j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "edge") {
            return edge();
        }
        if (s == "triangle") {
            return triangle();
        }
        if (s.rfind("clique", 0) == 0 && s.size() > 6) {
            const auto digits = s.substr(6);
            if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })
                && digits.size() < 4) {
                return clique(std::stoul(digits));
            }
        }
        throw spec_error("unknown block preset '" + s + "'");
    }
    if (j.is_array()) {
        if (j.empty()) {
            throw precondition_error("the block class is empty");
        }
        auto w = from_json(j.at(0));
        for (std::size_t i = 1; i < j.size(); ++i) {
            w = w + from_json(j.at(i));
        }
        return w;
    }
    if (j.is_object() && j.contains("bprime_coeffs") && j.at("bprime_coeffs").is_array()) {
        std::vector<Rational> v;
        for (const auto &c : j.at("bprime_coeffs")) {
            if (c.is_string()) {
                v.push_back(parse_rational(c.get<std::string>()));
            } else if (c.is_number_integer()) {
                v.emplace_back(c.get<long>());
            } else {
                throw spec_error("bprime_coeffs entries must be \"p/q\" strings or integers");
            }
        }
        return from_coeffs(std::move(v));
    }
    throw spec_error("blocks must be a preset name, a list of presets or {\"bprime_coeffs\": [...]}");
}

namespace
{

// Analytic side of a block class: everything follows from the polynomial B'.
struct BlockAnalytics {
    Series bp;   // B'
    Series bpp;  // B''
    Series b;    // B
    Real tau;
    Real rho;
    Real C_rho;

    explicit BlockAnalytics(const Series &bprime)
        : bp(bprime), bpp(derive(bprime.padded(bprime.truncation() + 1))), b(integrate(bprime, 0))
    {
        // tau B''(tau) = 1; the left side increases from 0.
        Real hi = 1;
        while (hi * eval_polynomial(bpp, hi) < 1) {
            hi *= 2;
        }
        Real lo = 0;
        for (int it = 0; it < 220; ++it) {
            const Real mid = (lo + hi) / 2;
            if (mid * eval_polynomial(bpp, mid) < 1) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        tau = (lo + hi) / 2;
        rho = tau * exp(-eval_polynomial(bp, tau));
        C_rho = C_of_t(tau);
    }

    Real Bp(const Real &t) const
    {
        return eval_polynomial(bp, t);
    }
    Real Bpp(const Real &t) const
    {
        return eval_polynomial(bpp, t);
    }

    Real C_of_t(const Real &t) const
    {
        return eval_polynomial(b, t) + t - t * Bp(t);
    }

    // t with t exp(-B'(t)) = x, on [0, tau].
    Real T_of_x(const Real &x) const
    {
        if (x < 0) {
            throw precondition_error("T(x): x must be nonnegative");
        }
        if (x > rho * (1 + Real(1e-40))) {
            throw precondition_error("T(x): x = " + real_to_string(x, 12) + " is beyond the radius "
                                     + real_to_string(rho, 12));
        }
        if (x >= rho) {
            return tau;
        }
        {
            std::lock_guard lock(cache_mu);
            for (const auto &[cx, ct] : cache) {
                if (cx == x) {
                    return ct;
                }
            }
        }
        Real lo = 0, hi = tau;
        for (int it = 0; it < 220; ++it) {
            const Real mid = (lo + hi) / 2;
            if (mid * exp(-Bp(mid)) < x) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const Real t = (lo + hi) / 2;
        std::lock_guard lock(cache_mu);
        if (cache.size() >= 16) {
            cache.erase(cache.begin());
        }
        cache.emplace_back(x, t);
        return t;
    }

    mutable std::mutex cache_mu;
    mutable std::vector<std::pair<Real, Real>> cache;
};

struct SamplingParams {
    double lambda = 0;          // expected number of blocks at a vertex
    std::vector<double> cdf;    // block type j (pointed vertices per block), index j - 1
};

// Shared state of one block class: analytic data, cached series and the exact
// tables for the recursive method.
class BlockCore
{
public:
    explicit BlockCore(BlockWeights w) : weights_(std::move(w)), an_(weights_.bprime())
    {
        J_ = *weights_.bprime().max_index();
    }

    const BlockWeights &weights() const
    {
        return weights_;
    }
    const BlockAnalytics &analytics() const
    {
        return an_;
    }

    // T to order N.
    Series tree_series(std::size_t N) const
    {
        std::lock_guard lock(mu_);
        if (!T_ || T_->truncation() < N) {
            const auto phi = exp_series(weights_.bprime().padded(N).truncated(N));
            T_ = solve_lagrange(phi, N);
        }
        return T_->truncated(N);
    }

    SamplingParams params(const Real &y) const
    {
        const auto key = real_to_string(y, 40);
        {
            std::lock_guard lock(mu_);
            if (const auto it = params_.find(key); it != params_.end()) {
                return it->second;
            }
        }
        const Real t = an_.T_of_x(y);
        SamplingParams p;
        p.lambda = to_double(an_.Bp(t));
        double acc = 0;
        Real tj = 1;
        for (std::size_t j = 1; j <= J_; ++j) {
            tj *= t;
            acc += to_double(to_real(weights_.bprime()[j]) * tj);
            p.cdf.push_back(acc);
        }
        std::lock_guard lock(mu_);
        params_.emplace(key, p);
        return p;
    }

    // Rooted Boltzmann object at y. The root gets label first_label, the other
    // vertices consecutive labels after it.
    std::optional<Structure> boltzmann_rooted(const Real &y, RngState &rng, SampleBudget &budget,
                                              Label first_label) const
    {
        const auto p = params(y);
        Structure g;
        g.kind = Structure::Kind::graph;
        Label next = first_label;
        g.labels.push_back(next++);
        if (!budget.grow(first_label == placeholder_label ? 0 : 1)) {
            return std::nullopt;
        }
        std::vector<Label> stack{g.labels.front()};
        while (!stack.empty()) {
            const Label v = stack.back();
            stack.pop_back();
            const auto blocks = rng.poisson(p.lambda);
            for (std::uint64_t b = 0; b < blocks; ++b) {
                const auto j = rng.pick(p.cdf) + 1;
                if (!budget.grow(j)) {
                    return std::nullopt;
                }
                std::vector<Label> block{v};
                for (std::size_t i = 0; i < j; ++i) {
                    block.push_back(next);
                    g.labels.push_back(next);
                    stack.push_back(next);
                    ++next;
                }
                add_block(g, std::move(block));
            }
        }
        return g;
    }

    // Rooted object with n vertices, drawn with probability proportional to
    // weight.
    Structure exact_rooted(std::size_t n, RngState &rng, Label first_label) const
    {
        if (n == 0) {
            throw precondition_error("rooted objects have at least one vertex");
        }
        ensure_tables(n);
        if (sgn(T_tab_[n]) == 0) {
            throw precondition_error("the class has no rooted object with " + std::to_string(n) + " vertices");
        }
        Structure g;
        g.kind = Structure::Kind::graph;
        Label next = first_label;
        g.labels.push_back(next++);
        // (vertex, size of the set of blocks hanging below it)
        std::vector<std::pair<Label, std::size_t>> stack{{g.labels.front(), n - 1}};
        while (!stack.empty()) {
            auto [v, m] = stack.back();
            stack.pop_back();
            while (m > 0) {
                const auto k = 1 + rng.pick(cdf('e', 0, m));
                const auto j = 1 + rng.pick(cdf('b', 0, k));
                std::vector<Label> block{v};
                std::size_t rest = k;
                for (std::size_t r = j; r >= 1; --r) {
                    const std::size_t s = r == 1 ? rest : 1 + rng.pick(cdf('p', r, rest));
                    block.push_back(next);
                    g.labels.push_back(next);
                    stack.emplace_back(next, s - 1);
                    ++next;
                    rest -= s;
                }
                add_block(g, std::move(block));
                m -= k;
            }
        }
        return g;
    }

private:
    void add_block(Structure &g, std::vector<Label> block) const
    {
        if (weights_.renderable()) {
            for (std::size_t i = 0; i < block.size(); ++i) {
                for (std::size_t k = i + 1; k < block.size(); ++k) {
                    g.edges.emplace_back(block[i], block[k]);
                }
            }
        }
        g.blocks.push_back(std::move(block));
    }

    void ensure_tables(std::size_t n) const
    {
        std::lock_guard lock(mu_);
        if (T_tab_.size() > n) {
            return;
        }
        const auto N = std::max<std::size_t>(n + 1, 2 * T_tab_.size());
        const auto phi = exp_series(weights_.bprime().padded(N).truncated(N));
        const auto T = solve_lagrange(phi, N);
        T_tab_.assign(T.coeffs().begin(), T.coeffs().end());
        pow_.assign(J_ + 1, {});
        pow_[0] = std::vector<Rational>(N + 1);
        pow_[0][0] = 1;
        Series Tj = Series::constant(1, N);
        for (std::size_t j = 1; j <= J_; ++j) {
            Tj = Tj * T;
            pow_[j].assign(Tj.coeffs().begin(), Tj.coeffs().end());
        }
        G_.assign(N + 1, Rational(0));
        for (std::size_t k = 0; k <= N; ++k) {
            for (std::size_t j = 1; j <= J_; ++j) {
                if (sgn(weights_.bprime()[j]) != 0) {
                    G_[k] += weights_.bprime()[j] * pow_[j][k];
                }
            }
        }
        cdfs_.clear();
    }

    // Cumulative tables for the three choices of the recursive method:
    //   'e' m:  size k of the next block group in exp(G) of size m
    //   'b' k:  number j of pointed vertices of a block group of size k
    //   'p' j k: size of the first of j rooted subtrees with k vertices total
    const std::vector<double> &cdf(char kind, std::size_t j, std::size_t k) const
    {
        std::lock_guard lock(mu_);
        const auto key = std::make_tuple(kind, j, k);
        if (const auto it = cdfs_.find(key); it != cdfs_.end()) {
            return it->second;
        }
        std::vector<Rational> w;
        if (kind == 'e') {
            // m E_m = sum_k k G_k E_{m-k} with E_m = T_{m+1}.
            for (std::size_t i = 1; i <= k; ++i) {
                w.push_back(G_[i] * T_tab_[k - i + 1] * static_cast<unsigned long>(i));
            }
        } else if (kind == 'b') {
            for (std::size_t jj = 1; jj <= J_; ++jj) {
                w.push_back(weights_.bprime()[jj] * pow_[jj][k]);
            }
        } else {
            for (std::size_t i = 1; i <= k; ++i) {
                w.push_back(T_tab_[i] * pow_[j - 1][k - i]);
            }
        }
        Rational total = 0;
        for (const auto &x : w) {
            total += x;
        }
        if (sgn(total) == 0) {
            throw precondition_error("recursive sampler reached an empty choice");
        }
        std::vector<double> c;
        Rational acc = 0;
        for (const auto &x : w) {
            acc += x;
            c.push_back(Rational(acc / total).get_d());
        }
        c.back() = 1.0;
        return cdfs_.emplace(key, std::move(c)).first->second;
    }

    BlockWeights weights_;
    BlockAnalytics an_;
    std::size_t J_ = 1;

    mutable std::mutex mu_;
    mutable std::optional<Series> T_;
    mutable std::map<std::string, SamplingParams> params_;
    mutable std::vector<Rational> T_tab_;
    mutable std::vector<std::vector<Rational>> pow_;
    mutable std::vector<Rational> G_;
    mutable std::map<std::tuple<char, std::size_t, std::size_t>, std::vector<double>> cdfs_;
};

std::string core_key(const BlockWeights &w)
{
    return to_json(w.bprime()).dump() + (w.renderable() ? "R" : "");
}

std::shared_ptr<const BlockCore> shared_core(const BlockWeights &w)
{
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const BlockCore>> cores;
    std::lock_guard lock(mu);
    auto &slot = cores[core_key(w)];
    if (!slot) {
        slot = std::make_shared<BlockCore>(w);
    }
    return slot;
}

// Connected graphs of the class (C) or rooted ones (T = z C').
class BlockClassSpecies final : public NamedClass
{
public:
    BlockClassSpecies(std::string id, std::shared_ptr<const BlockCore> core, bool rooted)
        : id_(std::move(id)), core_(std::move(core)), rooted_(rooted)
    {
    }

    std::string id() const override
    {
        return id_;
    }

    Series egf(std::size_t N) const override
    {
        const auto T = core_->tree_series(N);
        if (rooted_) {
            return T;
        }
        if (N == 0) {
            return Series::zero(0);
        }
        return integrate(divide_by_z(T), 0).truncated(N);
    }

    Real radius() const override
    {
        return core_->analytics().rho;
    }

    EvalResult value(const Real &y) const override
    {
        const auto &an = core_->analytics();
        const Real t = an.T_of_x(y);
        return {rooted_ ? t : an.C_of_t(t), Real(1e-40)};
    }

    EvalResult derived_value(const Real &y) const override
    {
        const auto &an = core_->analytics();
        const Real t = an.T_of_x(y);
        if (rooted_) {
            const Real gap = 1 - t * an.Bpp(t);
            if (gap <= 0) {
                return {std::numeric_limits<Real>::infinity(), Real(0)};
            }
            return {exp(an.Bp(t)) / gap, Real(1e-40)};
        }
        return {exp(an.Bp(t)), Real(1e-40)};
    }

    std::optional<Structure> boltzmann(const Real &y, RngState &rng, SampleBudget &budget) const override
    {
        if (rooted_) {
            return core_->boltzmann_rooted(y, rng, budget, 1);
        }
        // Unrooting: accept a rooted sample of size k with probability 1/k,
        // abandoning it as soon as k exceeds 1/U.
        for (;;) {
            const double u = rng.uniform();
            SampleBudget trial = budget;
            trial.size = 0;
            trial.size_limit = u > 0 ? static_cast<std::size_t>(std::min(1.0 / u, 1e18)) : trial.node_cap;
            auto g = core_->boltzmann_rooted(y, rng, trial, 1);
            if (!g) {
                budget.nodes = trial.nodes;
                continue;
            }
            budget.nodes = trial.nodes - g->size();
            if (!budget.grow(g->size())) {
                return std::nullopt;
            }
            return g;
        }
    }

    std::optional<Structure> boltzmann_pointed(const Real &y, RngState &rng, SampleBudget &budget) const override
    {
        if (rooted_) {
            throw precondition_error("derivative of a rooted class is not supported by the sampler");
        }
        auto g = core_->boltzmann_rooted(y, rng, budget, placeholder_label);
        if (g) {
            g->pointed = true;
        }
        return g;
    }

    Structure exact(std::size_t n, RngState &rng) const override
    {
        return core_->exact_rooted(n, rng, 1);
    }

    Structure exact_pointed(std::size_t n, RngState &rng) const override
    {
        if (rooted_) {
            throw precondition_error("derivative of a rooted class is not supported by the sampler");
        }
        auto g = core_->exact_rooted(n + 1, rng, placeholder_label);
        g.pointed = true;
        return g;
    }

private:
    std::string id_;
    std::shared_ptr<const BlockCore> core_;
    bool rooted_;
};

std::shared_ptr<const NamedClass> make_block_species(const BlockWeights &w, bool rooted)
{
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const NamedClass>> made;
    const auto key = core_key(w) + (rooted ? "/rooted" : "/connected");
    std::lock_guard lock(mu);
    auto &slot = made[key];
    if (!slot) {
        slot = std::make_shared<BlockClassSpecies>((rooted ? "rooted:" : "connected:") + w.name(), shared_core(w),
                                                   rooted);
    }
    return slot;
}

} // namespace

std::shared_ptr<const NamedClass> find_named_class(const std::string &id, const nlohmann::json *blocks)
{
    if (blocks) {
        if (id != "connected" && id != "rooted") {
            throw spec_error("a named class with explicit blocks must have id \"connected\" or \"rooted\"");
        }
        return make_block_species(BlockWeights::from_json(*blocks), id == "rooted");
    }
    if (id == "cayley_tree") {
        return make_block_species(BlockWeights::edge(), false);
    }
    if (id == "rooted_cayley_tree") {
        return make_block_species(BlockWeights::edge(), true);
    }
    if (id == "triangle_cactus") {
        return make_block_species(BlockWeights::triangle(), false);
    }
    if (id == "rooted_triangle_cactus") {
        return make_block_species(BlockWeights::triangle(), true);
    }
    for (const std::string prefix : {"connected:", "rooted:"}) {
        if (id.rfind(prefix, 0) == 0) {
            return make_block_species(BlockWeights::from_json(id.substr(prefix.size())), prefix == "rooted:");
        }
    }
    throw spec_error("unknown named class '" + id + "'");
}

Real ClassModel::T_value(const Real &x) const
{
    return shared_core(weights)->analytics().T_of_x(x);
}

Real ClassModel::C_value(const Real &x) const
{
    const auto &an = shared_core(weights)->analytics();
    return an.C_of_t(an.T_of_x(x));
}

ClassModel build_class(const BlockWeights &w, std::size_t N)
{
    const auto deg = *w.bprime().max_index();
    if (N < 2 * deg + 1) {
        throw precondition_error("truncation " + std::to_string(N) + " is too small for blocks of this size");
    }
    ClassModel m;
    m.weights = w;
    m.truncation = N;
    m.bprime = w.bprime().padded(N).truncated(N);
    m.phi = exp_series(m.bprime);
    m.T = solve_lagrange(m.phi, N);
    m.C = integrate(divide_by_z(m.T), 0);
    m.A = exp_series(m.C);
    m.d = support_span(m.phi).d;

    const auto core = shared_core(w);
    const auto &an = core->analytics();
    m.tau = an.tau;
    m.rho = an.rho;
    m.C_at_rho = an.C_rho;
    // C is stationary in t at tau, so the bisection error enters squared.
    m.C_at_rho_error = Real(1e-40);
    m.connected = make_block_species(w, false);
    m.rooted = make_block_species(w, true);
    m.C_a = lattice_constants(m);
    m.smooth = m.d == 1;
    return m;
}

ClassModel build_class_from_json(const nlohmann::json &spec, std::size_t fallback_truncation)
{
    if (!spec.is_object() || !spec.contains("blocks")) {
        throw spec_error("class spec needs \"blocks\"");
    }
    std::size_t N = fallback_truncation;
    if (spec.contains("truncation")) {
        if (!spec.at("truncation").is_number_unsigned()) {
            throw spec_error("\"truncation\" must be a nonnegative integer");
        }
        N = spec.at("truncation").get<std::size_t>();
    }
    return build_class(BlockWeights::from_json(spec.at("blocks")), N);
}

std::vector<LatticeConstant> lattice_constants(const ClassModel &m)
{
    std::vector<LatticeConstant> out;
    const Real total_err = m.C_at_rho_error * exp(m.C_at_rho);
    for (std::size_t a = 0; a < m.d; ++a) {
        const auto v = egf_value(SpeciesExpr::restricted(SpeciesExpr::set(), a, m.d), m.C_at_rho);
        out.push_back({v.value, v.error + total_err});
    }
    return out;
}

Report smoothness_verdict(const ClassModel &m)
{
    Report r;
    r.name = "smoothness";
    r.metadata["truncation"] = m.truncation;
    r.metadata["blocks"] = m.weights.name();
    r.scalars.push_back({"d", Real(m.d), Real(0), Rational(m.d), ""});
    r.scalars.push_back({"rho", m.rho, Real(1e-40), std::nullopt, ""});
    r.scalars.push_back({"C_at_rho", m.C_at_rho, m.C_at_rho_error, std::nullopt, ""});

    Table consts;
    consts.name = "lattice_constants";
    consts.index_name = "a";
    consts.columns = {"C_a", "error"};
    for (std::size_t a = 0; a < m.C_a.size(); ++a) {
        consts.rows.push_back({static_cast<long>(a), {m.C_a[a].value, m.C_a[a].error}, {}});
    }
    r.tables.push_back(consts);

    // sum_a C_a zeta^a = exp(zeta C(rho)) for every d-th root of unity zeta.
    Table roots;
    roots.name = "root_of_unity";
    roots.index_name = "j";
    roots.columns = {"abs_difference"};
    Real worst = 0;
    const Real two_pi = 2 * real_pi();
    for (std::size_t j = 0; j < m.d; ++j) {
        Real re = 0, im = 0;
        for (std::size_t a = 0; a < m.d; ++a) {
            const Real angle = two_pi * Real(j * a) / Real(m.d);
            re += m.C_a[a].value * cos(angle);
            im += m.C_a[a].value * sin(angle);
        }
        const Real angle = two_pi * Real(j) / Real(m.d);
        const Real er = exp(m.C_at_rho * cos(angle)) * cos(m.C_at_rho * sin(angle));
        const Real ei = exp(m.C_at_rho * cos(angle)) * sin(m.C_at_rho * sin(angle));
        const Real diff = sqrt((re - er) * (re - er) + (im - ei) * (im - ei));
        worst = std::max(worst, diff);
        roots.rows.push_back({static_cast<long>(j), {diff}, {}});
    }
    r.tables.push_back(roots);
    r.scalars.push_back({"root_of_unity_max_error", worst, Real(0), std::nullopt, ""});

    Verdict ident{"root_of_unity_identity", worst < Real(1e-9), "max |sum_a C_a zeta^a - exp(zeta C(rho))| = "
                                                                    + real_to_string(worst, 6),
                  "root_of_unity", {}};
    for (std::size_t j = 0; j < m.d; ++j) {
        ident.rows.push_back(static_cast<long>(j));
    }
    r.verdicts.push_back(ident);

    Verdict smooth{"smooth", m.d == 1, m.d == 1 ? "smooth, span d = 1" : "not smooth, span d = " + std::to_string(m.d), "lattice_constants",
                   {}};
    if (m.d >= 2) {
        // Non-smoothness witness: consecutive constants that differ by more
        // than their error bars.
        for (std::size_t a = 0; a < m.d; ++a) {
            const auto b = (a + 1) % m.d;
            const Real gap = abs(m.C_a[a].value - m.C_a[b].value);
            if (gap > m.C_a[a].error + m.C_a[b].error) {
                smooth.detail += "; C_" + std::to_string(a) + " - C_" + std::to_string(b) + " = "
                                 + real_to_string(m.C_a[a].value - m.C_a[b].value, 12);
                smooth.rows = {static_cast<long>(a), static_cast<long>(b)};
                break;
            }
        }
        if (m.d == 2) {
            const Real diff = m.C_a[0].value - m.C_a[1].value;
            const Real expected = exp(-m.C_at_rho);
            r.scalars.push_back({"C0_minus_C1", diff, m.C_a[0].error + m.C_a[1].error, std::nullopt, ""});
            r.scalars.push_back({"exp_minus_C_at_rho", expected, m.C_at_rho_error * expected, std::nullopt, ""});
            r.verdicts.push_back({"C0_minus_C1_identity", abs(diff - expected) < Real(1e-9),
                                  "|C_0 - C_1 - exp(-C(rho))| = " + real_to_string(abs(diff - expected), 6),
                                  "lattice_constants", {0, 1}});
        }
    }
    r.verdicts.push_back(smooth);
    return r;
}

Report asymptotic_check(const ClassModel &m, Window window)
{
    if (window.last < window.first + 1) {
        throw precondition_error("asymptotic_check: window needs at least two indices");
    }
    if (window.last + 1 > m.truncation) {
        throw precondition_error("asymptotic_check: window beyond the truncation order");
    }
    Report r;
    r.name = "asymptotics";
    r.metadata["truncation"] = m.truncation;
    r.metadata["blocks"] = m.weights.name();
    const auto d = m.d;
    std::vector<Table> per(d);
    for (std::size_t a = 0; a < d; ++a) {
        per[a].name = "ratio_residue_" + std::to_string(a);
        per[a].columns = {"a_n", "ratio"};
        per[a].note = "[z^n]A / (rho^(1-a) C_(a-1) [z^(n+1-a)]C) with a in 1..d, a = n mod d";
    }
    for (std::size_t n = window.first; n <= window.last; ++n) {
        // Representative a in 1..d.
        const std::size_t a = (n % d == 0) ? d : n % d;
        if (n + 1 < a) {
            continue;
        }
        const auto &c = m.C[n + 1 - a];
        if (sgn(c) == 0 || sgn(m.A[n]) == 0) {
            continue;
        }
        const auto &Ca = m.C_a[(a + d - 1) % d].value;
        const Real scale = pow(m.rho, Real(1) - Real(a));
        const Real ratio = to_real(m.A[n]) / (scale * Ca * to_real(c));
        per[n % d].rows.push_back({static_cast<long>(n), {to_real(m.A[n]), ratio}, {rational_to_string(m.A[n]), ""}});
    }
    for (std::size_t a = 0; a < d; ++a) {
        if (per[a].rows.size() >= 3) {
            r.verdicts.push_back(trend_verdict("ratio_to_one_residue_" + std::to_string(a), per[a], 1, Real(1)));
        }
        r.tables.push_back(per[a]);
    }

    Table cr;
    cr.name = "c_ratio";
    cr.columns = {"c_n/c_(n+d)", "rho^d"};
    const Real rd = pow(m.rho, Real(d));
    for (std::size_t n = window.first; n + d <= window.last + 1 && n + d <= m.truncation; ++n) {
        if (sgn(m.C[n]) == 0 || sgn(m.C[n + d]) == 0) {
            continue;
        }
        cr.rows.push_back({static_cast<long>(n), {to_real(m.C[n]) / to_real(m.C[n + d]), rd}, {}});
    }
    if (cr.rows.size() >= 3) {
        r.verdicts.push_back(trend_verdict("c_ratio_to_rho_d", cr, 0, rd));
    }
    r.tables.push_back(cr);
    return r;
}

Structure boltzmann_graph_sample(const ClassModel &m, std::size_t a, RngState &rng, bool require_rendering)
{
    if (a >= m.d) {
        throw precondition_error("residue a must lie in [0, d)");
    }
    if (require_rendering && !m.weights.renderable()) {
        throw precondition_error("explicit graphs are only rendered for clique block families");
    }
    // K = a - 1 (mod d), K ~ Poisson(C(rho)) restricted to that class.
    const std::size_t r = (a + m.d - 1) % m.d;
    const double lambda = to_double(m.C_at_rho);
    std::vector<double> cdf;
    double term = std::exp(-lambda), acc = 0;
    for (std::size_t k = 0; k < 200; ++k) {
        if (k > 0) {
            term *= lambda / static_cast<double>(k);
        }
        acc += (k % m.d == r) ? term : 0.0;
        cdf.push_back(acc);
    }
    const auto K = rng.pick(cdf);
    Structure s;
    s.kind = Structure::Kind::composite;
    s.outer = "set";
    s.pointed = true;
    SampleBudget budget;
    Label offset = 0;
    for (std::size_t i = 0; i < K; ++i) {
        auto g = m.connected->boltzmann(m.rho, rng, budget);
        std::vector<Label> perm(g->labels.size() + 1);
        for (std::size_t l = 1; l < perm.size(); ++l) {
            perm[l] = static_cast<Label>(l + offset);
        }
        offset += static_cast<Label>(g->size());
        s.components.push_back(apply_permutation(*g, perm));
    }
    return relabel_uniform(s, rng);
}

Report frag_experiment(const ClassModel &m, const std::vector<std::size_t> &n_list)
{
    Report r;
    r.name = "fragment_experiment";
    r.metadata["truncation"] = m.truncation;
    r.metadata["blocks"] = m.weights.name();
    const auto G = SpeciesExpr::named(m.connected);
    const auto F = SpeciesExpr::set();
    std::vector<Table> per(m.d);
    for (std::size_t a = 0; a < m.d; ++a) {
        per[a].name = "tv_residue_" + std::to_string(a);
        per[a].columns = {"tv", "limit_empty_fragment"};
    }
    std::vector<std::string> skipped;
    for (const auto n : n_list) {
        if (n == 0 || n > m.truncation || sgn(m.A[n]) == 0) {
            skipped.push_back(std::to_string(n));
            continue;
        }
        const auto rep = fragment_size_tv(F, G, n, m.rho);
        per[n % m.d].rows.push_back(
            {static_cast<long>(n), {rep.scalar("tv").value, rep.scalar("limit_pr_empty").value}, {}});
        per[n % m.d].error = std::max(per[n % m.d].error, rep.scalar("tv").error);
    }
    for (std::size_t a = 0; a < m.d; ++a) {
        auto &t = per[a];
        std::sort(t.rows.begin(), t.rows.end(), [](const auto &x, const auto &y) { return x.index < y.index; });
        if (t.rows.size() >= 2) {
            std::vector<long> idx;
            const auto from = t.rows.size() >= 3 ? t.rows.size() - 3 : 0;
            for (auto i = from; i < t.rows.size(); ++i) {
                idx.push_back(t.rows[i].index);
            }
            r.verdicts.push_back(decreasing_verdict("tv_decreasing_residue_" + std::to_string(a), t, 0, idx));
        }
        r.tables.push_back(t);
    }
    if (!skipped.empty()) {
        std::string note = "skipped n (no objects of that size or beyond truncation):";
        for (const auto &s : skipped) {
            note += " " + s;
        }
        r.metadata["notice"] = note;
    }
    return r;
}

} // namespace gibbs
