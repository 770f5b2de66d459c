#include <gibbs/diagnostics.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace gibbs
{

const TableRow *Table::row(long index) const
{
    for (const auto &r : rows) {
        if (r.index == index) {
            return &r;
        }
    }
    return nullptr;
}

const Scalar &Report::scalar(const std::string &n) const
{
    for (const auto &s : scalars) {
        if (s.name == n) {
            return s;
        }
    }
    throw precondition_error("report " + name + " has no scalar " + n);
}

const Table &Report::table(const std::string &n) const
{
    for (const auto &t : tables) {
        if (t.name == n) {
            return t;
        }
    }
    throw precondition_error("report " + name + " has no table " + n);
}

const Verdict &Report::verdict(const std::string &n) const
{
    for (const auto &v : verdicts) {
        if (v.name == n) {
            return v;
        }
    }
    throw precondition_error("report " + name + " has no verdict " + n);
}

bool Report::all_pass() const
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict &v) { return v.pass; });
}

namespace
{

nlohmann::json real_json(const Real &x)
{
    if (boost::multiprecision::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (boost::multiprecision::isnan(x)) {
        return "nan";
    }
    return to_double(x);
}

std::string csv_number(const Real &x)
{
    if (boost::multiprecision::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    std::ostringstream os;
    os.precision(17);
    os << to_double(x);
    return os.str();
}

} // namespace

nlohmann::json to_json(const Report &r)
{
    nlohmann::json j;
    j["report"] = r.name;
    j["metadata"] = r.metadata;
    j["metadata"]["tool"] = tool_version;
    auto scalars = nlohmann::json::array();
    for (const auto &s : r.scalars) {
        nlohmann::json e{{"name", s.name}, {"value", real_json(s.value)}};
        if (s.exact) {
            e["exact"] = rational_to_string(*s.exact);
        } else {
            e["error"] = real_json(s.error);
        }
        if (!s.note.empty()) {
            e["note"] = s.note;
        }
        scalars.push_back(std::move(e));
    }
    j["scalars"] = std::move(scalars);
    auto tables = nlohmann::json::array();
    for (const auto &t : r.tables) {
        nlohmann::json e{{"name", t.name}, {"index", t.index_name}, {"columns", t.columns}, {"error", real_json(t.error)}};
        if (!t.note.empty()) {
            e["note"] = t.note;
        }
        auto rows = nlohmann::json::array();
        for (const auto &row : t.rows) {
            nlohmann::json rr{{"index", row.index}};
            auto vals = nlohmann::json::array();
            for (const auto &v : row.values) {
                vals.push_back(real_json(v));
            }
            rr["values"] = std::move(vals);
            if (!row.exact.empty()) {
                rr["exact"] = row.exact;
            }
            rows.push_back(std::move(rr));
        }
        e["rows"] = std::move(rows);
        tables.push_back(std::move(e));
    }
    j["tables"] = std::move(tables);
    auto verdicts = nlohmann::json::array();
    for (const auto &v : r.verdicts) {
        verdicts.push_back(
            {{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}, {"table", v.table}, {"rows", v.rows}});
    }
    j["verdicts"] = std::move(verdicts);
    return j;
}

std::string table_csv(const Report &r, const Table &t)
{
    std::ostringstream os;
    os << "# tool: " << tool_version << "\n";
    os << "# report: " << r.name << "\n";
    os << "# table: " << t.name << "\n";
    for (const auto &[k, v] : r.metadata.items()) {
        if (k == "tool") {
            continue;
        }
        os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    os << "# error_bound: " << csv_number(t.error) << "\n";
    if (!t.note.empty()) {
        os << "# note: " << t.note << "\n";
    }
    os << t.index_name;
    for (const auto &c : t.columns) {
        os << "," << c;
    }
    const bool any_exact = std::any_of(t.rows.begin(), t.rows.end(), [](const TableRow &x) { return !x.exact.empty(); });
    if (any_exact) {
        for (const auto &c : t.columns) {
            os << "," << c << "_exact";
        }
    }
    os << "\n";
    for (const auto &row : t.rows) {
        os << row.index;
        for (const auto &v : row.values) {
            os << "," << csv_number(v);
        }
        if (any_exact) {
            for (std::size_t i = 0; i < t.columns.size(); ++i) {
                os << "," << (i < row.exact.size() ? row.exact[i] : "");
            }
        }
        os << "\n";
    }
    return os.str();
}

Verdict trend_verdict(const std::string &name, const Table &t, std::size_t column, const Real &target)
{
    Verdict v;
    v.name = name;
    v.table = t.name;
    const auto R = t.rows.size();
    if (R < 3) {
        v.detail = "fewer than three rows";
        return v;
    }
    const auto third = std::max<std::size_t>(1, R / 3);
    Real early = 0, late = 0;
    for (std::size_t i = 0; i < third; ++i) {
        early += abs(t.rows[i].values.at(column) - target);
        late += abs(t.rows[R - third + i].values.at(column) - target);
        v.rows.push_back(t.rows[i].index);
    }
    for (std::size_t i = 0; i < third; ++i) {
        v.rows.push_back(t.rows[R - third + i].index);
    }
    early /= third;
    late /= third;
    v.pass = late <= Real(0.9) * early;
    v.detail = "mean |value - " + real_to_string(target, 8) + "|: first third " + real_to_string(early, 6)
               + ", last third " + real_to_string(late, 6);
    return v;
}

Verdict decreasing_verdict(const std::string &name, const Table &t, std::size_t column,
                           const std::vector<long> &indices)
{
    Verdict v;
    v.name = name;
    v.table = t.name;
    v.rows = indices;
    v.pass = indices.size() >= 2;
    std::string values;
    const TableRow *prev = nullptr;
    for (const auto i : indices) {
        const auto *row = t.row(i);
        if (!row) {
            v.pass = false;
            v.detail = "missing row " + std::to_string(i);
            return v;
        }
        if (prev && !(row->values.at(column) < prev->values.at(column))) {
            v.pass = false;
        }
        values += (values.empty() ? "" : ", ") + std::to_string(i) + ": " + real_to_string(row->values.at(column), 8);
        prev = row;
    }
    v.detail = (v.pass ? "strictly decreasing (" : "not strictly decreasing (") + values + ")";
    return v;
}

namespace
{

bool looks_polynomial(const Series &s)
{
    std::size_t nonzero = 0;
    for (const auto &c : s.coeffs()) {
        nonzero += sgn(c) != 0 ? 1 : 0;
    }
    return s.max_index().value_or(0) * 2 <= s.truncation() || nonzero < 8;
}

EvalResult eval_series(const Series &s, const Real &x)
{
    if (looks_polynomial(s)) {
        return {eval_polynomial(s, x), Real(0)};
    }
    return eval_at(s, x, TailMode::geometric_bound);
}

} // namespace

Report subexp_check(const Series &g, const Real &rho, Window window, std::optional<Real> g_at_rho)
{
    const auto span = support_span(g);
    const auto d = span.d;
    const auto m = span.m;
    const auto h = divide_by_z(g, m);
    if (window.last + d > h.truncation()) {
        throw precondition_error("subexp_check: window beyond the truncation order");
    }
    Report r;
    r.name = "subexponential";
    r.metadata["truncation"] = g.truncation();
    r.metadata["d"] = d;
    r.metadata["shift"] = m;
    r.scalars.push_back({"rho", rho, Real(0), std::nullopt, ""});

    Table ratio;
    ratio.name = "ratio";
    ratio.columns = {"g_n/g_(n+d)/rho^d"};
    Table conv;
    conv.name = "convolution";
    conv.columns = {"sum g_i g_(n-i) / g_n"};
    const Real rd = pow(rho, Real(d));
    for (std::size_t n = window.first; n <= window.last; ++n) {
        if (n % d != 0) {
            continue;
        }
        if (sgn(h[n]) == 0 || sgn(h[n + d]) == 0) {
            throw precondition_error("subexp_check: zero coefficient at lattice index " + std::to_string(n));
        }
        ratio.rows.push_back({static_cast<long>(n), {to_real(h[n]) / to_real(h[n + d]) / rd}, {}});
        conv.rows.push_back({static_cast<long>(n), {to_real(product_coeff(h, h, n)) / to_real(h[n])}, {}});
    }
    r.verdicts.push_back(trend_verdict("ratio_to_one", ratio, 0, Real(1)));

    if (g_at_rho) {
        const Real target = 2 * *g_at_rho / pow(rho, Real(m));
        r.scalars.push_back({"convolution_target", target, Real(0), std::nullopt, "2 g(rho) / rho^m"});
        r.verdicts.push_back(trend_verdict("convolution_to_target", conv, 0, target));
        const Real last = conv.rows.back().values[0];
        r.scalars.push_back({"convolution_last_relative_error", abs(last / target - 1), Real(0), std::nullopt, ""});
    }
    // Growth of the convolution ratio: linear growth that does not slow down
    // is the signature of a non-subexponential sequence.
    const auto R = conv.rows.size();
    Verdict growth;
    growth.name = "subexponential";
    growth.table = conv.name;
    if (R >= 6) {
        const auto third = R / 3;
        const Real early = (conv.rows[third].values[0] - conv.rows[0].values[0])
                           / Real(conv.rows[third].index - conv.rows[0].index);
        const Real late = (conv.rows[R - 1].values[0] - conv.rows[R - 1 - third].values[0])
                          / Real(conv.rows[R - 1].index - conv.rows[R - 1 - third].index);
        const bool diverging = late > 0 && late >= Real(0.9) * early;
        growth.pass = !diverging && r.verdict("ratio_to_one").pass;
        growth.detail = std::string(diverging ? "not subexponential" : "subexponential")
                        + ": convolution slope first third " + real_to_string(early, 6) + ", last third "
                        + real_to_string(late, 6);
        growth.rows = {conv.rows[0].index, conv.rows[third].index, conv.rows[R - 1 - third].index,
                       conv.rows[R - 1].index};
    } else {
        growth.detail = "window too short";
    }
    r.verdicts.push_back(growth);
    r.tables.push_back(std::move(ratio));
    r.tables.push_back(std::move(conv));
    return r;
}

Report stopped_sum_check(const Series &f, const Series &g, const Real &rho, const Real &g_at_rho, Window window)
{
    if (!f.max_index() || *f.max_index() == 0) {
        throw precondition_error("stopped_sum_check: f must be nonconstant");
    }
    const auto fp = gibbs::derive(f.truncation() >= 1 ? f : f.padded(1));
    EvalResult fpv;
    try {
        fpv = eval_series(fp, g_at_rho);
    } catch (const precondition_error &e) {
        throw precondition_error(std::string("stopped_sum_check: f is not analytic at g(rho): ") + e.what());
    }
    const auto fg = compose(f, g);
    if (window.last > fg.truncation()) {
        throw precondition_error("stopped_sum_check: window beyond the truncation order");
    }
    Report r;
    r.name = "stopped_sum";
    r.metadata["truncation"] = fg.truncation();
    r.scalars.push_back({"rho", rho, Real(0), std::nullopt, ""});
    r.scalars.push_back({"g_at_rho", g_at_rho, Real(0), std::nullopt, ""});
    r.scalars.push_back({"f_prime_at_g_rho", fpv.value, fpv.error, std::nullopt, ""});
    Table t;
    t.name = "ratio";
    t.columns = {"[z^n]f(g)/[z^n]g", "normalized"};
    for (std::size_t n = window.first; n <= window.last; ++n) {
        if (sgn(g[n]) == 0) {
            continue;
        }
        const Rational q = fg[n] / g[n];
        const Real v = to_real(q);
        t.rows.push_back({static_cast<long>(n), {v, v / fpv.value}, {rational_to_string(q), ""}});
    }
    r.verdicts.push_back(trend_verdict("ratio_to_f_prime", t, 0, fpv.value));
    r.tables.push_back(std::move(t));
    return r;
}

std::vector<Rational> largest_component_law(const SpeciesExpr &F, const SpeciesExpr &G, std::size_t n)
{
    const auto g = egf(G, n);
    if (sgn(g[0]) != 0) {
        throw precondition_error("largest_component_law: G has objects of size 0");
    }
    const Rational total = substitute(F, g)[n];
    if (sgn(total) == 0) {
        throw precondition_error("largest_component_law: no objects of size " + std::to_string(n));
    }
    std::vector<Rational> law(n + 1);
    if (n == 0) {
        law[0] = 1;
        return law;
    }
    std::vector<Rational> partial(n + 1, Rational(0));
    Rational prev = substitute(F, Series::zero(n))[n];
    std::vector<Rational> gm(n + 1);
    for (std::size_t m = 1; m <= n; ++m) {
        if (sgn(g[m]) == 0) {
            law[m] = 0;
            continue;
        }
        gm[m] = g[m];
        const Rational cur = substitute(F, Series(gm))[n];
        law[m] = (cur - prev) / total;
        prev = cur;
    }
    law[0] = substitute(F, Series::zero(n))[n] / total;
    return law;
}

FragmentLattice fragment_lattice(const Series &g, std::size_t n)
{
    FragmentLattice lat;
    try {
        const auto span = support_span(g);
        lat.d = span.d;
        lat.m = span.m;
    } catch (const precondition_error &) {
        return lat;
    }
    const auto gg = std::gcd(lat.m, lat.d);
    lat.D = lat.d / gg;
    if (n % gg != 0) {
        throw precondition_error("no objects of size " + std::to_string(n) + " on the lattice of G");
    }
    if (lat.D == 1) {
        lat.a = 0;
        return lat;
    }
    // a * (m / gg) = n / gg (mod D)
    const auto mm = (lat.m / gg) % lat.D;
    const auto target = (n / gg) % lat.D;
    for (std::size_t a = 0; a < lat.D; ++a) {
        if ((a * mm) % lat.D == target) {
            lat.a = a;
            break;
        }
    }
    return lat;
}

SpeciesExpr limit_fragment_species(const SpeciesExpr &F, const SpeciesExpr &G, const FragmentLattice &lat)
{
    const auto Fa = lat.D > 1 ? SpeciesExpr::restricted(F, lat.a, lat.D) : F;
    return SpeciesExpr::compose(SpeciesExpr::derive(Fa), G);
}

Report fragment_size_tv(const SpeciesExpr &F, const SpeciesExpr &G, std::size_t n, const Real &rho)
{
    const auto law = largest_component_law(F, G, n);
    const auto lat = fragment_lattice(egf(G, n), n);
    const auto L = limit_fragment_species(F, G, lat);
    const auto norm = egf_value(L, rho);
    if (!(norm.value > 0) || !boost::multiprecision::isfinite(norm.value)) {
        throw precondition_error("fragment_size_tv: limit normalization diverges");
    }
    const auto ls = egf(L, n);
    Report r;
    r.name = "fragment_size_tv";
    r.metadata["n"] = n;
    r.metadata["residue_a"] = lat.a;
    r.metadata["modulus_D"] = lat.D;
    Table t;
    t.name = "size_law";
    t.index_name = "s";
    t.columns = {"pr_Rn", "pr_R"};
    Real sum_abs = 0, sum_q = 0;
    Real rs = 1;
    for (std::size_t s = 0; s <= n; ++s) {
        const Rational &p = law[n - s];
        const Real q = to_real(ls[s]) * rs / norm.value;
        rs *= rho;
        sum_abs += abs(to_real(p) - q);
        sum_q += q;
        t.rows.push_back({static_cast<long>(s), {to_real(p), q}, {rational_to_string(p), ""}});
    }
    const Real tail = std::max(Real(0), 1 - sum_q);
    const Real tv = (sum_abs + tail) / 2;
    const Real rel = norm.error / norm.value;
    t.error = rel;
    r.scalars.push_back({"tv", tv, rel * 2 + Real(1e-30), std::nullopt,
                         "size projection; a lower bound on the structure TV"});
    r.scalars.push_back({"limit_pr_empty", to_real(ls[0]) / norm.value, rel, std::nullopt, ""});
    r.scalars.push_back({"exact_pr_empty", to_real(law[n]), Real(0), law[n], ""});
    r.scalars.push_back({"limit_tail_mass", tail, rel, std::nullopt, "Pr{|R| > n}"});
    r.tables.push_back(std::move(t));
    return r;
}

std::vector<std::vector<Rational>> stirling2_table(std::size_t k)
{
    std::vector<std::vector<Rational>> S(k + 1, std::vector<Rational>(k + 1));
    S[0][0] = 1;
    for (std::size_t n = 1; n <= k; ++n) {
        for (std::size_t j = 1; j <= n; ++j) {
            S[n][j] = S[n - 1][j - 1] + Rational(static_cast<unsigned long>(j)) * S[n - 1][j];
        }
    }
    return S;
}

MomentResult component_moment(const SpeciesExpr &F, const SpeciesExpr &G, std::size_t n, std::size_t k,
                              const Real &rho)
{
    const auto S = stirling2_table(k + 1);
    const auto g = egf(G, n);
    const Rational total = substitute(F, g)[n];
    if (sgn(total) == 0) {
        throw precondition_error("component_moment: no objects of size " + std::to_string(n));
    }
    // sum_i i^k f_i z^i = sum_j S(k, j) z^j F^(j)(z)
    Rational num = 0;
    SpeciesExpr Fj = F;
    Series gj = Series::constant(1, n);
    for (std::size_t j = 0; j <= k; ++j) {
        if (j > 0) {
            Fj = simplify_derive(SpeciesExpr::derive(Fj));
            gj = gj * g;
        }
        if (sgn(S[k][j]) != 0) {
            num += S[k][j] * (gj * substitute(Fj, g))[n];
        }
    }
    MomentResult out;
    out.exact = num / total;

    // f'(y) = sum_{j >= 1} S(k+1, j) y^(j-1) F^(j)(y), divided by F'(y).
    const auto y = egf_value(G, rho);
    Real fp = 0, fp_err = 0;
    Fj = F;
    Real yj = 1;
    EvalResult F1{};
    for (std::size_t j = 1; j <= k + 1; ++j) {
        Fj = simplify_derive(SpeciesExpr::derive(Fj));
        const auto v = egf_value(Fj, y.value);
        if (j == 1) {
            F1 = v;
        }
        fp += to_real(S[k + 1][j]) * yj * v.value;
        fp_err += to_real(S[k + 1][j]) * yj * v.error;
        yj *= y.value;
    }
    out.limit = fp / F1.value;
    out.limit_error = fp_err / F1.value + out.limit * F1.error / F1.value + y.error * out.limit;
    return out;
}

Report strong_ratio_check(const Series &phi, const Real &tau, Window window)
{
    Report r;
    r.name = "strong_ratio";
    r.metadata["truncation"] = phi.truncation();
    if (!phi.max_index() || *phi.max_index() == 0) {
        r.metadata["status"] = "degenerate";
        r.verdicts.push_back({"degenerate", false, "offspring law is concentrated at 0: S_n = 0, ratio undefined", "", {}});
        return r;
    }
    const auto N = window.last + 2;
    if (phi.truncation() + 1 < N) {
        throw precondition_error("strong_ratio_check: phi is not known to the window");
    }
    const auto Z = solve_lagrange(phi, N);
    const auto Z2 = Z * Z;
    const auto phit = eval_series(phi, tau);
    r.scalars.push_back({"phi_at_tau", phit.value, phit.error, std::nullopt, ""});
    Table t;
    t.name = "ratio";
    t.columns = {"ratio", "rational_part"};
    t.note = "Pr{S_(n+1) = n-1} / Pr{S_n = n-1} = rational_part / phi(tau)";
    for (std::size_t n = std::max<std::size_t>(window.first, 1); n <= window.last; ++n) {
        if (sgn(Z[n]) == 0 || sgn(Z2[n + 1]) == 0) {
            continue;
        }
        // [w^(n-1)] phi^(n+1) = ((n+1)/2) [z^(n+1)] Z^2 and [w^(n-1)] phi^n = n Z_n
        const Rational q = Rational(static_cast<unsigned long>(n + 1)) * Z2[n + 1]
                           / (Rational(2UL * n) * Z[n]);
        const Real v = to_real(q) / phit.value;
        t.rows.push_back({static_cast<long>(n), {v, to_real(q)}, {"", rational_to_string(q)}});
    }
    t.error = phit.error / phit.value;
    if (t.rows.size() < 3) {
        r.metadata["status"] = "degenerate";
        r.verdicts.push_back({"degenerate", false, "fewer than three lattice points in the window", t.name, {}});
        r.tables.push_back(std::move(t));
        return r;
    }
    r.verdicts.push_back(trend_verdict("ratio_to_one", t, 0, Real(1)));
    const Real last = abs(t.rows.back().values[0] - 1);
    r.scalars.push_back({"last_abs_error", last, t.error, std::nullopt, ""});
    r.verdicts.push_back({"last_within_0.01", last < Real(0.01), "|ratio - 1| = " + real_to_string(last, 6), t.name,
                          {t.rows.back().index}});
    r.tables.push_back(std::move(t));
    return r;
}

Rational forest_sequence_weight(const Series &phi, std::size_t n, std::size_t r)
{
    if (n == 0) {
        return r == 0 ? Rational(1) : Rational(0);
    }
    if (r == 0) {
        return 0;
    }
    // Height h = r + sum (d_i - 1) stays >= 1 before the last step and is 0
    // after it.
    std::vector<Rational> cur(n + r + 1), next(n + r + 1);
    cur[r] = 1;
    const auto maxd = std::min(phi.truncation(), n);
    for (std::size_t k = 1; k <= n; ++k) {
        std::fill(next.begin(), next.end(), Rational(0));
        for (std::size_t h = 1; h < cur.size(); ++h) {
            if (sgn(cur[h]) == 0) {
                continue;
            }
            for (std::size_t dd = 0; dd <= maxd; ++dd) {
                if (sgn(phi[dd]) == 0) {
                    continue;
                }
                const auto nh = h + dd - 1;
                if (nh >= next.size()) {
                    break;
                }
                if (k < n && nh == 0) {
                    continue;
                }
                next[nh] += cur[h] * phi[dd];
            }
        }
        std::swap(cur, next);
    }
    return cur[0];
}

Report cycle_lemma_check(const Series &phi, std::size_t n_max)
{
    if (phi.truncation() + 1 < n_max + 1) {
        throw precondition_error("cycle_lemma_check: phi must be known to order n_max");
    }
    Report r;
    r.name = "cycle_lemma";
    r.metadata["n_max"] = n_max;
    Table one;
    one.name = "single_tree";
    one.columns = {"tree_weight", "walk_weight_over_n"};
    one.note = "weights of Pr{|T| = n} and (1/n) Pr{S_n = n-1} with the common factor tau^(n-1) / phi(tau)^n removed";
    Table two;
    two.name = "two_trees";
    two.columns = {"two_tree_weight", "convolution", "walk_weight_times_2_over_n_plus_1"};
    two.note = "weights of Pr{|T| + |T'| = n+1} and (2/(n+1)) Pr{S_(n+1) = n-1}";
    bool ok1 = true, ok2 = true;
    std::vector<Rational> tree(n_max + 2);
    for (std::size_t n = 1; n <= n_max + 1; ++n) {
        tree[n] = forest_sequence_weight(phi, n, 1);
    }
    for (std::size_t n = 1; n <= n_max; ++n) {
        const Rational walk = power(phi.truncated(n), n)[n - 1];
        const Rational rhs1 = walk / static_cast<unsigned long>(n);
        ok1 = ok1 && tree[n] == rhs1;
        one.rows.push_back({static_cast<long>(n), {to_real(tree[n]), to_real(rhs1)},
                            {rational_to_string(tree[n]), rational_to_string(rhs1)}});

        const Rational lhs2 = forest_sequence_weight(phi, n + 1, 2);
        Rational conv = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            conv += tree[i] * tree[n + 1 - i];
        }
        const Rational walk2 = power(phi.truncated(n), n + 1)[n - 1];
        const Rational rhs2 = walk2 * 2 / static_cast<unsigned long>(n + 1);
        ok2 = ok2 && lhs2 == rhs2 && conv == rhs2;
        two.rows.push_back({static_cast<long>(n), {to_real(lhs2), to_real(conv), to_real(rhs2)},
                            {rational_to_string(lhs2), rational_to_string(conv), rational_to_string(rhs2)}});
    }
    Verdict v1{"single_tree_identity", ok1, ok1 ? "exact equality for all n" : "mismatch", one.name, {}};
    Verdict v2{"two_tree_identity", ok2, ok2 ? "exact equality for all n" : "mismatch", two.name, {}};
    for (std::size_t n = 1; n <= n_max; ++n) {
        v1.rows.push_back(static_cast<long>(n));
        v2.rows.push_back(static_cast<long>(n));
    }
    r.verdicts.push_back(v1);
    r.verdicts.push_back(v2);
    r.tables.push_back(std::move(one));
    r.tables.push_back(std::move(two));
    return r;
}

namespace
{

using Histogram = std::map<long, std::size_t>;

Real plugin_tv(const Histogram &a, std::size_t na, const Histogram &b, std::size_t nb)
{
    Real s = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            s += Real(ia->second) / na;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            s += Real(ib->second) / nb;
            ++ib;
        } else {
            s += abs(Real(ia->second) / na - Real(ib->second) / nb);
            ++ia;
            ++ib;
        }
    }
    return s / 2;
}

Histogram resample(const Histogram &h, std::size_t n, RngState &rng)
{
    std::vector<double> cdf;
    std::vector<long> keys;
    double acc = 0;
    for (const auto &[k, c] : h) {
        acc += static_cast<double>(c);
        cdf.push_back(acc);
        keys.push_back(k);
    }
    Histogram out;
    for (std::size_t i = 0; i < n; ++i) {
        ++out[keys[rng.pick(cdf)]];
    }
    return out;
}

} // namespace

Report tv_monte_carlo(const ProjectedSampler &a, const ProjectedSampler &b, const MonteCarloOptions &opts)
{
    if (opts.samples < 100) {
        throw precondition_error("tv_monte_carlo: at least 100 samples are needed for an interval");
    }
    const auto streams = std::max<std::size_t>(1, opts.streams);
    std::vector<Histogram> ha(streams), hb(streams);
    auto run_stream = [&](std::size_t s) {
        RngState ra(opts.seed, 2 * s);
        RngState rb(opts.seed, 2 * s + 1);
        for (std::size_t i = s; i < opts.samples; i += streams) {
            ++ha[s][a(ra)];
            ++hb[s][b(rb)];
        }
    };
    const auto threads = std::max<std::size_t>(1, std::min(opts.threads, streams));
    if (threads == 1) {
        for (std::size_t s = 0; s < streams; ++s) {
            run_stream(s);
        }
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t s = t; s < streams; s += threads) {
                    run_stream(s);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    Histogram A, B;
    for (std::size_t s = 0; s < streams; ++s) {
        for (const auto &[k, c] : ha[s]) {
            A[k] += c;
        }
        for (const auto &[k, c] : hb[s]) {
            B[k] += c;
        }
    }
    const auto n = opts.samples;
    const Real tv = plugin_tv(A, n, B, n);
    RngState boot(opts.seed, 0xb007'0000'0000ULL);
    std::vector<double> reps;
    for (std::size_t i = 0; i < opts.bootstrap; ++i) {
        reps.push_back(to_double(plugin_tv(resample(A, n, boot), n, resample(B, n, boot), n)));
    }
    std::sort(reps.begin(), reps.end());
    const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / static_cast<double>(reps.size());
    const auto q = [&](double p) {
        const auto idx = static_cast<std::size_t>(std::clamp(p * static_cast<double>(reps.size() - 1), 0.0,
                                                             static_cast<double>(reps.size() - 1)));
        return reps[idx];
    };
    const double alpha = (1 - opts.level) / 2;
    const double t0 = to_double(tv);
    // Basic bootstrap: reflect the replicate quantiles around the estimate.
    const double lo = std::max(0.0, 2 * t0 - q(1 - alpha));
    const double hi = std::min(1.0, 2 * t0 - q(alpha));
    Report r;
    r.name = "tv_monte_carlo";
    r.metadata["samples"] = n;
    r.metadata["seed"] = opts.seed;
    r.metadata["streams"] = streams;
    r.metadata["bootstrap"] = opts.bootstrap;
    r.scalars.push_back({"tv_plugin", tv, Real(hi - lo) / 2, std::nullopt, "plug-in estimate (biased upward)"});
    r.scalars.push_back({"tv_bias_corrected", Real(std::max(0.0, 2 * t0 - mean)), Real(hi - lo) / 2, std::nullopt,
                         ""});
    r.scalars.push_back({"ci_low", Real(lo), Real(0), std::nullopt, ""});
    r.scalars.push_back({"ci_high", Real(hi), Real(0), std::nullopt, ""});
    Table t;
    t.name = "histograms";
    t.index_name = "key";
    t.columns = {"freq_a", "freq_b"};
    std::map<long, std::pair<std::size_t, std::size_t>> joint;
    for (const auto &[k, c] : A) {
        joint[k].first = c;
    }
    for (const auto &[k, c] : B) {
        joint[k].second = c;
    }
    for (const auto &[k, c] : joint) {
        t.rows.push_back({k, {Real(c.first) / n, Real(c.second) / n}, {}});
    }
    r.tables.push_back(std::move(t));
    return r;
}

Report double_tail_probe(const Series &x, Window window)
{
    if (window.last > x.truncation()) {
        throw precondition_error("double_tail_probe: window beyond the truncation order");
    }
    Report r;
    r.name = "double_tail";
    r.metadata["truncation"] = x.truncation();
    Table t;
    t.name = "double_tail";
    t.columns = {"k_n", "tail_sum"};
    for (std::size_t n = window.first; n <= window.last; ++n) {
        if (sgn(x[n]) == 0) {
            continue;
        }
        const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
        Rational s = 0;
        for (std::size_t i = k; i + k <= n; ++i) {
            s += x[i] * x[n - i];
        }
        t.rows.push_back({static_cast<long>(n), {Real(k), to_real(s / x[n])}, {}});
    }
    std::vector<long> idx;
    for (const auto &row : t.rows) {
        idx.push_back(row.index);
    }
    r.verdicts.push_back(decreasing_verdict("decreasing", t, 1, idx));
    r.tables.push_back(std::move(t));
    return r;
}

} // namespace gibbs
