#include <gibbs/series.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace gibbs
{

namespace
{

// acc += a * b without building an expression temporary per term.
inline void add_product(Rational &acc, const Rational &a, const Rational &b, Rational &tmp)
{
    mpq_mul(tmp.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
    mpq_add(acc.get_mpq_t(), acc.get_mpq_t(), tmp.get_mpq_t());
}

std::vector<std::size_t> nonzero_indices(std::span<const Rational> c, std::size_t upto)
{
    std::vector<std::size_t> out;
    const auto last = std::min(upto, c.size() == 0 ? 0 : c.size() - 1);
    for (std::size_t i = 0; i <= last && i < c.size(); ++i) {
        if (sgn(c[i]) != 0) {
            out.push_back(i);
        }
    }
    return out;
}

Real infinity()
{
    return std::numeric_limits<Real>::infinity();
}

} // namespace

Series::Series(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs))
{
    if (coeffs_.empty()) {
        throw precondition_error("a series needs at least one coefficient");
    }
}

Series Series::zero(std::size_t truncation)
{
    return Series(std::vector<Rational>(truncation + 1));
}

Series Series::constant(const Rational &c, std::size_t truncation)
{
    std::vector<Rational> v(truncation + 1);
    v[0] = c;
    return Series(std::move(v));
}

Series Series::monomial(std::size_t k, const Rational &c, std::size_t truncation)
{
    std::vector<Rational> v(truncation + 1);
    if (k <= truncation) {
        v[k] = c;
    }
    return Series(std::move(v));
}

Series Series::exponential(std::size_t truncation)
{
    std::vector<Rational> v(truncation + 1);
    v[0] = 1;
    for (std::size_t n = 1; n <= truncation; ++n) {
        v[n] = v[n - 1] / n;
    }
    return Series(std::move(v));
}

const Rational &Series::operator[](std::size_t n) const
{
    if (n >= coeffs_.size()) {
        throw precondition_error("coefficient " + std::to_string(n) + " is beyond the truncation order "
                                 + std::to_string(truncation()));
    }
    return coeffs_[n];
}

Series Series::truncated(std::size_t truncation) const
{
    const auto n = std::min(truncation, this->truncation());
    return Series(std::vector<Rational>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n + 1)));
}

Series Series::padded(std::size_t truncation) const
{
    auto v = coeffs_;
    v.resize(std::max(truncation + 1, v.size()));
    return Series(std::move(v));
}

bool Series::is_nonnegative() const
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational &q) { return sgn(q) >= 0; });
}

bool Series::is_zero() const
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational &q) { return sgn(q) == 0; });
}

std::optional<std::size_t> Series::min_index() const
{
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (sgn(coeffs_[i]) != 0) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> Series::max_index() const
{
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        if (sgn(coeffs_[i]) != 0) {
            return i;
        }
    }
    return std::nullopt;
}

Series operator+(const Series &a, const Series &b)
{
    const auto n = std::min(a.truncation(), b.truncation());
    std::vector<Rational> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        v[i] = a[i] + b[i];
    }
    return Series(std::move(v));
}

Series operator-(const Series &a, const Series &b)
{
    const auto n = std::min(a.truncation(), b.truncation());
    std::vector<Rational> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        v[i] = a[i] - b[i];
    }
    return Series(std::move(v));
}

Series operator*(const Series &a, const Series &b)
{
    const auto n = std::min(a.truncation(), b.truncation());
    const auto ia = nonzero_indices(a.coeffs(), n);
    std::vector<Rational> v(n + 1);
    Rational tmp;
    for (std::size_t k = 0; k <= n; ++k) {
        for (const auto i : ia) {
            if (i > k) {
                break;
            }
            if (sgn(b[k - i]) != 0) {
                add_product(v[k], a[i], b[k - i], tmp);
            }
        }
    }
    return Series(std::move(v));
}

Series operator*(const Rational &c, const Series &a)
{
    std::vector<Rational> v(a.coeffs().begin(), a.coeffs().end());
    for (auto &x : v) {
        x *= c;
    }
    return Series(std::move(v));
}

Series series_arith(ArithOp op, const Series &a, const Series &b)
{
    switch (op) {
        case ArithOp::add:
            return a + b;
        case ArithOp::mul:
            return a * b;
        case ArithOp::scale:
            break;
    }
    throw precondition_error("scale takes a rational, not a series");
}

Series series_arith(ArithOp op, const Series &a, const Rational &c)
{
    switch (op) {
        case ArithOp::add:
            return a + Series::constant(c, a.truncation());
        case ArithOp::mul:
        case ArithOp::scale:
            return c * a;
    }
    return a;
}

Rational product_coeff(const Series &a, const Series &b, std::size_t n)
{
    if (n > a.truncation() || n > b.truncation()) {
        throw precondition_error("product coefficient beyond truncation");
    }
    Rational acc, tmp;
    for (std::size_t i = 0; i <= n; ++i) {
        if (sgn(a[i]) != 0 && sgn(b[n - i]) != 0) {
            add_product(acc, a[i], b[n - i], tmp);
        }
    }
    return acc;
}

Series derive(const Series &a)
{
    if (a.truncation() < 1) {
        throw precondition_error("derive needs truncation order at least 1");
    }
    std::vector<Rational> v(a.truncation());
    for (std::size_t n = 0; n < v.size(); ++n) {
        v[n] = a[n + 1] * static_cast<unsigned long>(n + 1);
    }
    return Series(std::move(v));
}

Series integrate(const Series &a, const Rational &constant)
{
    std::vector<Rational> v(a.truncation() + 2);
    v[0] = constant;
    for (std::size_t n = 0; n <= a.truncation(); ++n) {
        v[n + 1] = a[n] / static_cast<unsigned long>(n + 1);
    }
    return Series(std::move(v));
}

Series divide_by_z(const Series &a, std::size_t k)
{
    if (k > a.truncation()) {
        throw precondition_error("cannot divide by a power of z above the truncation order");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (sgn(a[i]) != 0) {
            throw precondition_error("divide_by_z: low-order coefficient is nonzero");
        }
    }
    return Series(std::vector<Rational>(a.coeffs().begin() + static_cast<std::ptrdiff_t>(k), a.coeffs().end()));
}

Series multiply_by_z(const Series &a, std::size_t k)
{
    std::vector<Rational> v(k);
    v.insert(v.end(), a.coeffs().begin(), a.coeffs().end());
    return Series(std::move(v));
}

Series exp_series(const Series &a)
{
    if (sgn(a[0]) != 0) {
        throw precondition_error("exp_series: nonzero constant term (use exp_series_analytic)");
    }
    const auto n_max = a.truncation();
    std::vector<Rational> ka(n_max + 1);
    for (std::size_t k = 1; k <= n_max; ++k) {
        ka[k] = a[k] * static_cast<unsigned long>(k);
    }
    const auto nz = nonzero_indices(ka, n_max);
    std::vector<Rational> b(n_max + 1);
    b[0] = 1;
    Rational tmp;
    for (std::size_t n = 1; n <= n_max; ++n) {
        Rational acc;
        for (const auto k : nz) {
            if (k > n) {
                break;
            }
            if (sgn(b[n - k]) != 0) {
                add_product(acc, ka[k], b[n - k], tmp);
            }
        }
        b[n] = acc / static_cast<unsigned long>(n);
    }
    return Series(std::move(b));
}

ScaledSeries exp_series_analytic(const Series &a)
{
    std::vector<Rational> v(a.coeffs().begin(), a.coeffs().end());
    const Rational a0 = v[0];
    v[0] = 0;
    return {boost::multiprecision::exp(to_real(a0)), exp_series(Series(std::move(v)))};
}

Series log_series(const Series &a)
{
    if (a[0] != 1) {
        throw precondition_error("log_series: constant term must be 1");
    }
    const auto n_max = a.truncation();
    std::vector<Rational> l(n_max + 1);
    Rational tmp;
    // n l_n = n a_n - sum_{k=1}^{n-1} k l_k a_{n-k}
    for (std::size_t n = 1; n <= n_max; ++n) {
        Rational acc = a[n] * static_cast<unsigned long>(n);
        Rational sub;
        for (std::size_t k = 1; k < n; ++k) {
            if (sgn(l[k]) != 0 && sgn(a[n - k]) != 0) {
                Rational kl = l[k] * static_cast<unsigned long>(k);
                add_product(sub, kl, a[n - k], tmp);
            }
        }
        l[n] = (acc - sub) / static_cast<unsigned long>(n);
    }
    return Series(std::move(l));
}

Series power(const Series &a, std::size_t k)
{
    Series result = Series::constant(1, a.truncation());
    Series base = a;
    while (k > 0) {
        if (k & 1U) {
            result = result * base;
        }
        k >>= 1U;
        if (k > 0) {
            base = base * base;
        }
    }
    return result;
}

namespace
{

// outer == c * exp(b z) on every known coefficient.
std::optional<Rational> exponential_rate(const Series &outer)
{
    if (sgn(outer[0]) == 0 || outer.truncation() < 2) {
        return std::nullopt;
    }
    const Rational b = outer[1] / outer[0];
    Rational expected = outer[0];
    for (std::size_t k = 1; k <= outer.truncation(); ++k) {
        expected = expected * b / static_cast<unsigned long>(k);
        if (expected != outer[k]) {
            return std::nullopt;
        }
    }
    return b;
}

} // namespace

Series compose(const Series &outer, const Series &inner)
{
    if (sgn(inner[0]) != 0) {
        throw precondition_error("compose: inner series has a nonzero constant term");
    }
    const auto mu_opt = inner.min_index();
    if (!mu_opt) {
        return Series::constant(outer[0], inner.truncation());
    }
    const auto mu = *mu_opt;
    // Outer coefficients beyond its truncation only reach z^((M+1) mu) and up.
    const auto n_max = std::min(inner.truncation(), (outer.truncation() + 1) * mu - 1);
    const auto in = inner.truncated(n_max);

    if (const auto b = exponential_rate(outer)) {
        return outer[0] * exp_series(*b * in);
    }

    // Horner over the outer coefficients that can still contribute.
    std::size_t top = std::min(outer.truncation(), n_max / mu);
    if (const auto mi = outer.max_index()) {
        top = std::min(top, *mi);
    } else {
        return Series::zero(n_max);
    }
    Series acc = Series::constant(outer[top], n_max);
    for (std::size_t k = top; k-- > 0;) {
        acc = acc * in;
        std::vector<Rational> v(acc.coeffs().begin(), acc.coeffs().end());
        v[0] += outer[k];
        acc = Series(std::move(v));
    }
    return acc;
}

Series multisection_exp(const Series &g, std::size_t a, std::size_t D)
{
    if (D == 0 || a >= D) {
        throw precondition_error("multisection_exp: need 0 <= a < D");
    }
    if (sgn(g[0]) != 0) {
        throw precondition_error("multisection_exp: nonzero constant term");
    }
    if (D == 1) {
        return exp_series(g);
    }
    const auto n_max = g.truncation();
    std::vector<Rational> kg(n_max + 1);
    for (std::size_t k = 1; k <= n_max; ++k) {
        kg[k] = g[k] * static_cast<unsigned long>(k);
    }
    const auto nz = nonzero_indices(kg, n_max);
    // E_r' = g' E_{r-1}, E_r(0) = [r == 0].
    std::vector<std::vector<Rational>> e(D, std::vector<Rational>(n_max + 1));
    e[0][0] = 1;
    Rational tmp;
    for (std::size_t n = 1; n <= n_max; ++n) {
        for (std::size_t r = 0; r < D; ++r) {
            const auto &prev = e[(r + D - 1) % D];
            Rational acc;
            for (const auto k : nz) {
                if (k > n) {
                    break;
                }
                if (sgn(prev[n - k]) != 0) {
                    add_product(acc, kg[k], prev[n - k], tmp);
                }
            }
            e[r][n] = acc / static_cast<unsigned long>(n);
        }
    }
    return Series(std::move(e[a]));
}

bool satisfies_tree_hypotheses(const Series &phi)
{
    if (sgn(phi[0]) <= 0) {
        return false;
    }
    for (std::size_t k = 2; k <= phi.truncation(); ++k) {
        if (sgn(phi[k]) > 0) {
            return true;
        }
    }
    return false;
}

Series solve_lagrange(const Series &phi, std::size_t N)
{
    if (sgn(phi[0]) <= 0) {
        throw precondition_error("solve_lagrange: phi_0 must be positive");
    }
    if (!phi.is_nonnegative()) {
        throw precondition_error("solve_lagrange: phi must have nonnegative coefficients");
    }
    N = std::min(N, phi.truncation() + 1);
    if (N == 0) {
        return Series::zero(0);
    }
    const Rational phi0 = phi[0];
    const auto window = phi.truncated(N - 1);

    // Route selection: Z = z * sum phi_k Z^k, or Z = z * phi0 * exp(H(Z)) with
    // H = log(phi / phi0). Cost is proportional to the degree of whichever
    // outer function is used.
    const Series h = log_series((1 / phi0) * window);
    const auto deg_phi = window.max_index().value_or(0);
    const auto deg_h = h.max_index().value_or(0);
    const bool via_exp = deg_h < deg_phi;
    const auto K = via_exp ? deg_h : deg_phi;

    std::vector<Rational> z(N + 1);
    // pow[j][n] = [z^n] Z^j for j = 1..K; pow[0] is unused.
    std::vector<std::vector<Rational>> pw(K + 1, std::vector<Rational>(N + 1));
    std::vector<Rational> q(N + 1);  // H(Z) on the exp route
    std::vector<Rational> kq(N + 1); // k * q_k
    std::vector<Rational> p(N + 1);  // phi(Z) (direct) or exp(H(Z)) (exp route)
    p[0] = via_exp ? Rational(1) : phi0;
    Rational tmp;
    for (std::size_t n = 1; n <= N; ++n) {
        z[n] = via_exp ? phi0 * p[n - 1] : p[n - 1];
        if (K >= 1) {
            pw[1][n] = z[n];
        }
        for (std::size_t j = 2; j <= K; ++j) {
            Rational acc;
            for (std::size_t i = 1; i < n; ++i) {
                if (sgn(z[i]) != 0 && sgn(pw[j - 1][n - i]) != 0) {
                    add_product(acc, z[i], pw[j - 1][n - i], tmp);
                }
            }
            pw[j][n] = acc;
        }
        if (n == N) {
            break;
        }
        if (via_exp) {
            Rational qn;
            for (std::size_t j = 1; j <= K; ++j) {
                if (sgn(h[j]) != 0 && sgn(pw[j][n]) != 0) {
                    add_product(qn, h[j], pw[j][n], tmp);
                }
            }
            q[n] = qn;
            kq[n] = qn * static_cast<unsigned long>(n);
            Rational acc;
            for (std::size_t k = 1; k <= n; ++k) {
                if (sgn(kq[k]) != 0 && sgn(p[n - k]) != 0) {
                    add_product(acc, kq[k], p[n - k], tmp);
                }
            }
            p[n] = acc / static_cast<unsigned long>(n);
        } else {
            Rational acc;
            for (std::size_t j = 1; j <= K; ++j) {
                if (sgn(window[j]) != 0 && sgn(pw[j][n]) != 0) {
                    add_product(acc, window[j], pw[j][n], tmp);
                }
            }
            p[n] = acc;
        }
    }
    return Series(std::move(z));
}

SupportLattice support_span(const Series &a)
{
    const auto nz = nonzero_indices(a.coeffs(), a.truncation());
    if (nz.size() < 2) {
        throw precondition_error("support_span needs at least two nonzero coefficients");
    }
    std::size_t d = 0;
    for (const auto i : nz) {
        d = std::gcd(d, i - nz.front());
    }
    return {d, nz.front() % d, nz.front()};
}

Real eval_polynomial(const Series &a, const Real &x)
{
    Real acc = 0;
    for (std::size_t k = a.truncation() + 1; k-- > 0;) {
        acc = acc * x + to_real(a[k]);
    }
    return acc;
}

EvalResult eval_at(const Series &a, const Real &x, TailMode mode, std::optional<Real> ratio_bound)
{
    if (x < 0) {
        throw precondition_error("eval_at: x must be nonnegative");
    }
    if (x == 0) {
        return {to_real(a[0]), Real(0)};
    }
    const auto nz = nonzero_indices(a.coeffs(), a.truncation());
    std::vector<Real> terms;
    terms.reserve(nz.size());
    Real sum = 0;
    for (const auto i : nz) {
        terms.push_back(to_real(a[i]) * boost::multiprecision::pow(x, static_cast<long>(i)));
        sum += terms.back();
    }
    if (mode == TailMode::truncate) {
        return {sum, infinity()};
    }

    Real q;
    if (ratio_bound) {
        q = *ratio_bound;
    } else {
        // Term ratios between consecutive nonzero coefficients over the last
        // quarter of the support.
        const std::size_t w = std::max<std::size_t>(4, nz.size() / 4);
        if (nz.size() < w + 1) {
            throw precondition_error("eval_at: too few nonzero coefficients to bound the tail");
        }
        std::vector<Real> r;
        std::vector<std::size_t> at;
        for (std::size_t i = nz.size() - w; i < nz.size(); ++i) {
            r.push_back(abs(terms[i] / terms[i - 1]));
            at.push_back(nz[i]);
        }
        const bool increasing = r.back() > r.front();
        q = r.back();
        if (increasing) {
            // r_n = L + c / n fitted through the first and last ratio.
            const Real n1 = at.front(), n2 = at.back();
            const Real limit = (n2 * r.back() - n1 * r.front()) / (n2 - n1);
            q = std::max(q, limit);
        }
    }
    // Closer to 1 than this and the geometric bound says nothing useful: x is
    // not separated from the radius.
    if (q >= Real(1) - Real(1e-4)) {
        throw precondition_error("eval_at: x is not strictly below the radius of convergence (tail ratio "
                                 + real_to_string(q, 8) + ")");
    }
    const Real last = terms.empty() ? Real(0) : abs(terms.back());
    return {sum, last * q / (1 - q)};
}

std::string to_string(RadiusMethod m)
{
    switch (m) {
        case RadiusMethod::critical_point:
            return "critical_point";
        case RadiusMethod::coefficient_ratio:
            return "coefficient_ratio";
        case RadiusMethod::undetermined:
            break;
    }
    return "undetermined";
}

namespace
{

struct PhiEvaluator {
    const Series &phi;
    // phi is treated as a polynomial when its support ends in the first half
    // of the known window, or when it is too sparse to extrapolate a tail.
    bool polynomial;

    explicit PhiEvaluator(const Series &p)
        : phi(p), polynomial(p.max_index().value_or(0) * 2 <= p.truncation()
                             || nonzero_indices(p.coeffs(), p.truncation()).size() < 8)
    {
    }

    EvalResult value(const Real &t) const
    {
        if (polynomial) {
            return {eval_polynomial(phi, t), Real(0)};
        }
        return eval_at(phi, t, TailMode::geometric_bound);
    }

    // t phi'(t) - phi(t) = sum (k - 1) phi_k t^k
    EvalResult tilt_gap(const Real &t) const
    {
        std::vector<Rational> v(phi.truncation() + 1);
        for (std::size_t k = 0; k <= phi.truncation(); ++k) {
            v[k] = phi[k] * (static_cast<long>(k) - 1);
        }
        const Series s(std::move(v));
        if (polynomial) {
            return {eval_polynomial(s, t), Real(0)};
        }
        // Positive part only has a geometric tail; the -phi_0 term is exact.
        std::vector<Rational> pos(s.coeffs().begin(), s.coeffs().end());
        pos[0] = 0;
        const Series ps(std::move(pos));
        if (!ps.max_index()) {
            return {-to_real(phi[0]), Real(0)};
        }
        auto r = eval_at(ps, t, TailMode::geometric_bound);
        r.value -= to_real(phi[0]);
        return r;
    }

    // Largest t where evaluation is still trustworthy.
    Real reach() const
    {
        if (polynomial) {
            return Real(1e12);
        }
        // Root test on the last nonzero coefficient, halved.
        const auto k = *phi.max_index();
        const Real c = to_real(phi[k]);
        return boost::multiprecision::pow(c, Real(-1) / k) / 2;
    }
};

} // namespace

RadiusInfo radius_and_tau(const Series &phi, const Real &precision)
{
    if (sgn(phi[0]) <= 0 || !phi.is_nonnegative()) {
        throw precondition_error("radius_and_tau: phi must have phi_0 > 0 and nonnegative coefficients");
    }
    const PhiEvaluator ev(phi);
    RadiusInfo info;

    // Critical path: h(t) = t phi'(t) - phi(t) is increasing on t > 0 with
    // h(0) = -phi_0.
    const Real reach = ev.reach();
    Real hi = std::min(Real(1), reach);
    bool bracketed = false;
    try {
        while (hi <= reach) {
            const auto h = ev.tilt_gap(hi);
            if (h.value - h.error > 0) {
                bracketed = true;
                break;
            }
            hi *= 2;
        }
    } catch (const precondition_error &) {
        bracketed = false;
    }
    if (bracketed) {
        Real lo = 0;
        const Real target = std::min(precision * Real(1e-6), Real(1e-30));
        for (int it = 0; it < 400 && hi - lo > target; ++it) {
            const Real mid = (lo + hi) / 2;
            if (ev.tilt_gap(mid).value > 0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        const Real tau = (lo + hi) / 2;
        const auto f_tau = ev.value(tau);
        info.tau = tau;
        info.rho = tau / f_tau.value;
        info.critical = true;
        info.method = RadiusMethod::critical_point;
        info.tau_finite = true;
        // rho(t) = t / phi(t) is stationary at tau, so the bracket enters only
        // to second order; the evaluation error enters linearly.
        const Real r_lo = lo / ev.value(lo).value;
        const Real r_hi = hi / ev.value(hi).value;
        info.precision = abs(r_hi - r_lo) + info.rho * f_tau.error / f_tau.value + Real(1e-45);
        return info;
    }

    // Ratio path: Z_n / Z_{n+d} -> rho^d along n = 1 mod d.
    info.critical = false;
    info.method = RadiusMethod::coefficient_ratio;
    const Series z = ev.polynomial ? solve_lagrange(phi.padded(default_truncation), default_truncation + 1)
                                   : solve_lagrange(phi, phi.truncation() + 1);
    const auto nz = nonzero_indices(z.coeffs(), z.truncation());
    if (nz.size() < 8) {
        info.method = RadiusMethod::undetermined;
        info.precision = infinity();
        info.tau_finite = false;
        return info;
    }
    const auto span = support_span(z);
    const auto d = span.d;
    // Ratios at the last few lattice points.
    std::vector<Real> r;
    std::vector<std::size_t> at;
    for (std::size_t i = nz.size() - 6; i + 1 < nz.size(); ++i) {
        if (nz[i + 1] - nz[i] != d) {
            continue;
        }
        r.push_back(to_real(z[nz[i]]) / to_real(z[nz[i + 1]]));
        at.push_back(nz[i]);
    }
    if (r.size() < 3) {
        info.method = RadiusMethod::undetermined;
        info.precision = infinity();
        info.tau_finite = false;
        return info;
    }
    const auto k = r.size() - 1;
    auto richardson = [&](std::size_t i, std::size_t j) {
        const Real n1 = at[i], n2 = at[j];
        return (n2 * r[j] - n1 * r[i]) / (n2 - n1);
    };
    const Real l1 = richardson(k - 1, k);
    const Real l0 = richardson(k - 2, k - 1);
    const Real step_now = abs(r[k] - r[k - 1]);
    const Real step_before = abs(r[k - 1] - r[k - 2]);
    if (step_now > step_before * Real(1.0001) + Real(1e-40)) {
        info.method = RadiusMethod::undetermined;
        info.precision = infinity();
        info.tau_finite = false;
        return info;
    }
    const Real rho_d = l1;
    info.rho = boost::multiprecision::pow(rho_d, Real(1) / static_cast<long>(d));
    info.precision = abs(l1 - l0) + abs(l1 - r[k]) + Real(1e-45);
    // tau = Z(rho), only meaningful when the terms visibly decay.
    const auto tz = eval_at(z, info.rho, TailMode::truncate);
    const Real last_term =
        to_real(z[nz.back()]) * boost::multiprecision::pow(info.rho, static_cast<long>(nz.back()));
    info.tau = tz.value;
    info.tau_finite = last_term < tz.value * Real(1e-3);
    return info;
}

nlohmann::json to_json(const Series &a)
{
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto &c : a.coeffs()) {
        coeffs.push_back(rational_to_string(c));
    }
    return {{"truncation", a.truncation()}, {"coeffs", std::move(coeffs)}};
}

Series series_from_json(const nlohmann::json &j)
{
    if (!j.is_object() || !j.contains("coeffs") || !j.at("coeffs").is_array()) {
        throw spec_error("series JSON needs a \"coeffs\" array");
    }
    std::vector<Rational> v;
    for (const auto &c : j.at("coeffs")) {
        if (c.is_string()) {
            v.push_back(parse_rational(c.get<std::string>()));
        } else if (c.is_number_integer()) {
            v.emplace_back(c.get<long>());
        } else {
            throw spec_error("series coefficients must be \"p/q\" strings or integers");
        }
    }
    if (v.empty()) {
        throw spec_error("series JSON has no coefficients");
    }
    if (j.contains("truncation")) {
        const auto n = j.at("truncation").get<std::size_t>();
        if (n + 1 != v.size()) {
            throw spec_error("series JSON: truncation " + std::to_string(n) + " does not match "
                             + std::to_string(v.size()) + " coefficients");
        }
    }
    return Series(std::move(v));
}

} // namespace gibbs
