#include <gibbs/cli.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include <gibbs/diagnostics.hpp>
#include <gibbs/graphclass.hpp>
#include <gibbs/sampling.hpp>
#include <gibbs/series.hpp>
#include <gibbs/species.hpp>

namespace gibbs
{

namespace fs = std::filesystem;

nlohmann::json load_spec(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw spec_error("cannot read spec file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        std::size_t line = 1, col = 1;
        const auto stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw spec_error(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
}

namespace
{

constexpr std::size_t default_class_truncation = 256;

enum class InputKind { class_spec, species_spec, series_spec, phi_spec };

struct Input {
    InputKind kind;
    nlohmann::json spec;
    std::size_t truncation = default_truncation;
    std::optional<ClassModel> model;
    std::optional<SpeciesExpr> species;
    std::optional<Series> series;
};

std::size_t spec_size(const nlohmann::json &spec, const char *key, std::optional<std::size_t> fallback)
{
    if (!spec.contains(key)) {
        if (!fallback) {
            throw spec_error(std::string("spec needs \"") + key + "\"");
        }
        return *fallback;
    }
    if (!spec.at(key).is_number_unsigned()) {
        throw spec_error(std::string("\"") + key + "\" must be a nonnegative integer");
    }
    return spec.at(key).get<std::size_t>();
}

Real parse_real(const nlohmann::json &j, const char *what)
{
    if (j.is_number_integer() || j.is_number_unsigned()) {
        return Real(j.get<long long>());
    }
    if (j.is_number_float()) {
        return Real(j.get<double>());
    }
    if (j.is_string()) {
        return to_real(parse_rational(j.get<std::string>()));
    }
    throw spec_error(std::string(what) + " must be a number or a \"p/q\" string");
}

Input read_input(const RunConfig &cfg)
{
    Input in;
    in.spec = load_spec(cfg.spec_path);
    if (!in.spec.is_object()) {
        throw spec_error("spec must be a JSON object");
    }
    const auto &s = in.spec;
    const int kinds = int(s.contains("blocks")) + int(s.contains("species")) + int(s.contains("series"))
                      + int(s.contains("phi"));
    if (kinds != 1) {
        throw spec_error("spec needs exactly one of \"blocks\", \"species\", \"series\", \"phi\"");
    }
    if (s.contains("blocks")) {
        in.kind = InputKind::class_spec;
        in.truncation = cfg.truncation ? *cfg.truncation : spec_size(s, "truncation", default_class_truncation);
        auto spec = s;
        spec["truncation"] = in.truncation;
        in.model = build_class_from_json(spec, in.truncation);
    } else if (s.contains("species")) {
        in.kind = InputKind::species_spec;
        in.truncation = cfg.truncation ? *cfg.truncation : spec_size(s, "truncation", default_truncation);
        in.species = species_from_json(s.at("species"));
    } else {
        in.kind = s.contains("series") ? InputKind::series_spec : InputKind::phi_spec;
        auto series = series_from_json(s.contains("series") ? s.at("series") : s.at("phi"));
        in.truncation = cfg.truncation ? *cfg.truncation : spec_size(s, "truncation", series.truncation());
        if (in.truncation < series.truncation()) {
            series = series.truncated(in.truncation);
        } else if (in.truncation > series.truncation()) {
            if (!s.value("polynomial", false)) {
                throw spec_error("truncation exceeds the known coefficients; set \"polynomial\": true to pad");
            }
            series = series.padded(in.truncation);
        }
        in.series = std::move(series);
    }
    return in;
}

nlohmann::json run_metadata(const RunConfig &cfg, const Input &in)
{
    return {{"tool", tool_version}, {"truncation", in.truncation}, {"seed", cfg.seed}};
}

void ensure_out_dir(const RunConfig &cfg)
{
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw precondition_error("cannot create output directory " + cfg.out_dir + ": " + ec.message());
    }
}

void write_file(const RunConfig &cfg, const std::string &name, const std::string &content)
{
    const auto path = fs::path(cfg.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw precondition_error("cannot write " + path.string());
    }
    f << content;
}

std::string float_string(const Rational &q)
{
    std::ostringstream os;
    os.precision(17);
    os << to_double(to_real(q));
    return os.str();
}

Series coeffs_of(const Input &in)
{
    const auto which = in.spec.value("output", std::string("A"));
    switch (in.kind) {
    case InputKind::class_spec: {
        const auto &m = *in.model;
        if (which == "A") return m.A;
        if (which == "C") return m.C;
        if (which == "T") return m.T;
        if (which == "phi") return m.phi;
        if (which == "bprime") return m.bprime;
        throw spec_error("\"output\" must be one of A, C, T, phi, bprime");
    }
    case InputKind::species_spec:
        return egf(*in.species, in.truncation);
    case InputKind::series_spec:
        return *in.series;
    case InputKind::phi_spec:
        return solve_lagrange(*in.series, in.truncation);
    }
    return *in.series;
}

Real sampling_parameter(const Input &in, const SpeciesExpr &e)
{
    const auto &s = in.spec;
    if (s.contains("y") && !(s.at("y").is_string() && s.at("y") == "radius")) {
        return parse_real(s.at("y"), "\"y\"");
    }
    if (in.model) {
        return in.model->rho;
    }
    const SpeciesExpr *probe = &e;
    while (probe->kind() == SpeciesExpr::Kind::compose) {
        probe = &probe->inner();
    }
    if (probe->kind() == SpeciesExpr::Kind::named) {
        return probe->named_class().radius();
    }
    throw spec_error("sampling needs \"y\" (the species has no known radius)");
}

std::string type_key(const Structure &s)
{
    if (s.kind != Structure::Kind::composite) {
        return std::to_string(s.size());
    }
    auto sizes = component_sizes(s);
    std::sort(sizes.rbegin(), sizes.rend());
    std::string key;
    for (const auto k : sizes) {
        key += (key.empty() ? "" : "+") + std::to_string(k);
    }
    return key.empty() ? "0" : key;
}

struct Drawn {
    Structure structure;
    std::size_t attempts = 1;
};

using Draw = std::function<Drawn(RngState &)>;

Draw make_draw(const Input &in)
{
    const auto &s = in.spec;
    const auto method = s.value("method", std::string(in.kind == InputKind::phi_spec ? "gw_tree" : "exact"));
    if (in.kind == InputKind::series_spec) {
        throw spec_error("a bare series cannot be sampled; use \"species\", \"blocks\" or \"phi\"");
    }
    if (in.kind == InputKind::phi_spec) {
        if (method != "gw_tree") {
            throw spec_error("a \"phi\" spec supports method gw_tree only");
        }
        const auto info = radius_and_tau(*in.series, Real(1e-30));
        if (info.method == RadiusMethod::undetermined || !info.tau_finite) {
            throw precondition_error("no tilt point for this offspring series");
        }
        auto gw = std::make_shared<GaltonWatson>(*in.series, info.tau);
        return [gw](RngState &rng) { return Drawn{gw->sample(rng), 1}; };
    }

    SpeciesExpr e = in.species ? *in.species
                               : SpeciesExpr::compose(SpeciesExpr::set(), SpeciesExpr::named(in.model->connected));
    if (method == "limit_fragment") {
        if (in.model) {
            const auto a = spec_size(s, "residue", std::size_t{0});
            const auto m = std::make_shared<ClassModel>(*in.model);
            return [m, a](RngState &rng) { return Drawn{boltzmann_graph_sample(*m, a, rng), 1}; };
        }
        if (e.kind() != SpeciesExpr::Kind::compose) {
            throw spec_error("limit_fragment needs a composition F o G");
        }
        const auto y = sampling_parameter(in, e);
        std::optional<std::pair<std::size_t, std::size_t>> residue;
        if (s.contains("residue")) {
            residue = std::make_pair(spec_size(s, "residue", std::nullopt), spec_size(s, "modulus", std::nullopt));
        }
        const auto F = e.child();
        const auto G = e.inner();
        return [F, G, y, residue](RngState &rng) { return Drawn{limit_fragment_sample(F, G, y, rng, residue), 1}; };
    }
    if (method == "boltzmann") {
        const auto y = sampling_parameter(in, e);
        return [e, y](RngState &rng) { return Drawn{boltzmann_sample(e, y, rng), 1}; };
    }
    const auto n = spec_size(s, "n", std::nullopt);
    if (method == "conditioned") {
        const auto y = sampling_parameter(in, e);
        const auto cap = spec_size(s, "max_attempts", default_max_attempts);
        if (sgn(egf(e, n)[n]) == 0) {
            throw precondition_error("no objects of size " + std::to_string(n));
        }
        return [e, n, y, cap](RngState &rng) {
            auto c = conditioned_sample(e, n, y, rng, cap);
            return Drawn{std::move(c.structure), c.attempts};
        };
    }
    if (method == "exact") {
        if (sgn(egf(e, n)[n]) == 0) {
            throw precondition_error("no objects of size " + std::to_string(n));
        }
        auto sampler = std::make_shared<ExactSampler>(e, std::max(n, default_exact_bound));
        return [sampler, n](RngState &rng) { return Drawn{sampler->sample(n, rng), 1}; };
    }
    throw spec_error("unknown sampling method \"" + method + "\"");
}

template <class Fn>
void for_each_stream(std::size_t streams, std::size_t threads, Fn fn)
{
    threads = std::max<std::size_t>(1, std::min(threads, streams));
    if (threads == 1) {
        for (std::size_t s = 0; s < streams; ++s) {
            fn(s);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t s = t; s < streams; s += threads) {
                    fn(s);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void emit_report(const RunConfig &cfg, const Report &r, std::ostream &out, nlohmann::json &index)
{
    if (cfg.format == "json") {
        write_file(cfg, r.name + ".json", to_json(r).dump(2) + "\n");
    } else {
        for (const auto &t : r.tables) {
            write_file(cfg, r.name + "." + t.name + ".csv", table_csv(r, t));
        }
    }
    for (const auto &v : r.verdicts) {
        out << (v.pass ? "pass " : "FAIL ") << r.name << "/" << v.name << ": " << v.detail << "\n";
        index.push_back({{"report", r.name}, {"verdict", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    }
}

Window default_window(std::size_t N, std::size_t headroom)
{
    if (N < 8 + headroom) {
        throw precondition_error("truncation too small for the diagnostics window");
    }
    return {std::max<std::size_t>(2, N / 8), N - headroom};
}

std::vector<std::string> requested_checks(const nlohmann::json &spec, std::vector<std::string> defaults)
{
    if (!spec.contains("checks")) {
        return defaults;
    }
    if (!spec.at("checks").is_array()) {
        throw spec_error("\"checks\" must be an array of names");
    }
    std::vector<std::string> out;
    for (const auto &c : spec.at("checks")) {
        if (!c.is_string()) {
            throw spec_error("\"checks\" must be an array of names");
        }
        out.push_back(c.get<std::string>());
    }
    return out;
}

Window spec_window(const nlohmann::json &spec, Window fallback)
{
    if (!spec.contains("window")) {
        return fallback;
    }
    const auto &w = spec.at("window");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number_unsigned() || !w[1].is_number_unsigned()) {
        throw spec_error("\"window\" must be [first, last]");
    }
    return {w[0].get<std::size_t>(), w[1].get<std::size_t>()};
}

Report moment_report(const ClassModel &m, const std::vector<std::size_t> &ns)
{
    Report r;
    r.name = "component_moments";
    Table t;
    t.name = "moments";
    t.columns = {"mean_exact", "mean_limit", "second_exact", "second_limit"};
    const auto F = SpeciesExpr::set();
    const auto G = SpeciesExpr::named(m.connected);
    for (const auto n : ns) {
        if (n == 0 || n > m.truncation || sgn(m.A[n]) == 0) {
            continue;
        }
        const auto k1 = component_moment(F, G, n, 1, m.rho);
        const auto k2 = component_moment(F, G, n, 2, m.rho);
        t.rows.push_back({static_cast<long>(n),
                          {to_real(k1.exact), k1.limit, to_real(k2.exact), k2.limit},
                          {rational_to_string(k1.exact), "", rational_to_string(k2.exact), ""}});
        t.error = std::max(t.error, std::max(k1.limit_error, k2.limit_error));
    }
    if (!t.rows.empty()) {
        r.verdicts.push_back(trend_verdict("mean_to_limit", t, 0, t.rows.front().values[1]));
    }
    r.tables.push_back(std::move(t));
    return r;
}

std::vector<Report> class_diagnostics(const Input &in)
{
    const auto &m = *in.model;
    const auto N = m.truncation;
    std::vector<std::string> defaults{"smoothness", "asymptotics", "fragments", "subexp", "strong_ratio"};
    if (m.d == 1) {
        defaults.insert(defaults.begin() + 3, "stopped_sum");
        defaults.push_back("moments");
    }
    std::vector<Report> out;
    for (const auto &c : requested_checks(in.spec, defaults)) {
        if (c == "smoothness") {
            out.push_back(smoothness_verdict(m));
        } else if (c == "asymptotics") {
            out.push_back(asymptotic_check(m, spec_window(in.spec, default_window(N, 1))));
        } else if (c == "fragments") {
            std::vector<std::size_t> ns;
            for (const std::size_t base : {20, 40, 80}) {
                for (std::size_t r = 0; r < m.d; ++r) {
                    if (base + r <= N) {
                        ns.push_back(base + r);
                    }
                }
            }
            out.push_back(frag_experiment(m, ns));
        } else if (c == "stopped_sum") {
            out.push_back(stopped_sum_check(Series::exponential(N), m.C, m.rho, m.C_at_rho,
                                            spec_window(in.spec, default_window(N, 0))));
        } else if (c == "subexp") {
            const auto cp = gibbs::derive(m.C);
            const Real cp_at_rho = m.tau / m.rho;
            out.push_back(subexp_check(cp, m.rho, spec_window(in.spec, default_window(cp.truncation(), m.d)),
                                       cp_at_rho));
        } else if (c == "strong_ratio") {
            const auto w = default_window(N, 2);
            out.push_back(strong_ratio_check(m.phi, m.tau, spec_window(in.spec, {10, std::min<std::size_t>(200, w.last)})));
        } else if (c == "moments") {
            out.push_back(moment_report(m, {N / 4, N / 2, N}));
        } else {
            throw spec_error("unknown check \"" + c + "\" for a class spec");
        }
    }
    return out;
}

std::vector<Report> series_diagnostics(const Input &in)
{
    const auto &s = in.spec;
    const auto &x = *in.series;
    std::vector<Report> out;
    if (in.kind == InputKind::phi_spec) {
        for (const auto &c : requested_checks(s, {"strong_ratio", "cycle_lemma"})) {
            if (c == "cycle_lemma") {
                out.push_back(cycle_lemma_check(x, spec_size(s, "n_max", std::min<std::size_t>(12, x.truncation()))));
            } else if (c == "strong_ratio") {
                const auto info = radius_and_tau(x, Real(1e-30));
                if (info.method == RadiusMethod::undetermined) {
                    throw precondition_error("radius of the tree series is undetermined");
                }
                const auto w = default_window(x.truncation() + 1, 2);
                out.push_back(strong_ratio_check(x, info.tau, spec_window(s, {10, std::min<std::size_t>(200, w.last)})));
            } else {
                throw spec_error("unknown check \"" + c + "\" for a phi spec");
            }
        }
        return out;
    }
    for (const auto &c : requested_checks(s, {"subexp"})) {
        if (c == "subexp") {
            if (!s.contains("rho")) {
                throw spec_error("subexp check needs \"rho\"");
            }
            std::optional<Real> at_rho;
            if (s.contains("value_at_rho")) {
                at_rho = parse_real(s.at("value_at_rho"), "\"value_at_rho\"");
            }
            const auto d = support_span(x).d;
            out.push_back(subexp_check(x, parse_real(s.at("rho"), "\"rho\""),
                                       spec_window(s, default_window(x.truncation(), d + support_span(x).m)), at_rho));
        } else if (c == "double_tail") {
            out.push_back(double_tail_probe(x, spec_window(s, default_window(x.truncation(), 0))));
        } else {
            throw spec_error("unknown check \"" + c + "\" for a series spec");
        }
    }
    return out;
}

} // namespace

int cmd_coeffs(const RunConfig &cfg, std::ostream &out)
{
    const auto in = read_input(cfg);
    const auto series = coeffs_of(in);
    ensure_out_dir(cfg);
    auto meta = run_metadata(cfg, in);
    meta["output"] = in.spec.value("output", std::string("A"));
    if (cfg.format == "json") {
        nlohmann::json j = meta;
        auto rows = nlohmann::json::array();
        for (std::size_t n = 0; n <= series.truncation(); ++n) {
            rows.push_back({{"n", n},
                            {"coeff", rational_to_string(series[n])},
                            {"weight", rational_to_string(series[n] * factorial(n))},
                            {"float", to_double(to_real(series[n]))}});
        }
        j["coeffs"] = std::move(rows);
        write_file(cfg, "coeffs.json", j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        for (const auto &[k, v] : meta.items()) {
            os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
        os << "n,coeff,weight,float\n";
        for (std::size_t n = 0; n <= series.truncation(); ++n) {
            os << n << "," << rational_to_string(series[n]) << "," << rational_to_string(series[n] * factorial(n))
               << "," << float_string(series[n]) << "\n";
        }
        write_file(cfg, "coeffs.csv", os.str());
    }
    out << "wrote " << series.truncation() + 1 << " coefficients to " << cfg.out_dir << "\n";
    return exit_ok;
}

int cmd_sample(const RunConfig &cfg, std::ostream &out)
{
    if (cfg.samples == 0) {
        throw precondition_error("--samples must be positive");
    }
    const auto in = read_input(cfg);
    const auto draw = make_draw(in);
    const auto streams = std::max<std::size_t>(1, cfg.streams);
    std::vector<std::string> lines(cfg.samples);
    std::vector<std::string> keys(cfg.samples);
    std::vector<std::size_t> sizes(cfg.samples), attempts(cfg.samples);
    for_each_stream(streams, cfg.threads, [&](std::size_t s) {
        RngState rng(cfg.seed, s);
        for (std::size_t i = s; i < cfg.samples; i += streams) {
            auto d = draw(rng);
            sizes[i] = d.structure.size();
            keys[i] = type_key(d.structure);
            attempts[i] = d.attempts;
            nlohmann::json j{{"i", i}, {"stream", s}, {"size", sizes[i]}, {"structure", to_json(d.structure)}};
            lines[i] = j.dump();
        }
    });

    ensure_out_dir(cfg);
    auto meta = run_metadata(cfg, in);
    meta["streams"] = streams;
    meta["samples"] = cfg.samples;
    meta["method"] = in.spec.value("method", std::string(in.kind == InputKind::phi_spec ? "gw_tree" : "exact"));
    std::ostringstream os;
    os << nlohmann::json{{"metadata", meta}}.dump() << "\n";
    for (const auto &l : lines) {
        os << l << "\n";
    }
    write_file(cfg, "samples.jsonl", os.str());

    std::map<std::string, std::size_t> types;
    std::map<std::size_t, std::size_t> size_hist;
    std::size_t total_attempts = 0, empty = 0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        ++types[keys[i]];
        ++size_hist[sizes[i]];
        total_attempts += attempts[i];
        empty += sizes[i] == 0 ? 1 : 0;
    }
    nlohmann::json summary;
    summary["metadata"] = meta;
    const double M = static_cast<double>(cfg.samples);
    for (const auto &[k, c] : types) {
        summary["type_frequencies"][k] = {{"count", c}, {"frequency", static_cast<double>(c) / M}};
    }
    for (const auto &[k, c] : size_hist) {
        summary["size_frequencies"][std::to_string(k)] = {{"count", c}, {"frequency", static_cast<double>(c) / M}};
    }
    summary["empty_frequency"] = static_cast<double>(empty) / M;
    summary["attempts"] = total_attempts;
    summary["acceptance_rate"] = M / static_cast<double>(total_attempts);
    write_file(cfg, "summary.json", summary.dump(2) + "\n");
    out << "wrote " << cfg.samples << " samples to " << cfg.out_dir << "\n";
    return exit_ok;
}

int cmd_diagnose(const RunConfig &cfg, std::ostream &out)
{
    const auto in = read_input(cfg);
    std::vector<Report> reports;
    switch (in.kind) {
    case InputKind::class_spec:
        reports = class_diagnostics(in);
        break;
    case InputKind::series_spec:
    case InputKind::phi_spec:
        reports = series_diagnostics(in);
        break;
    case InputKind::species_spec:
        throw spec_error("diagnose takes a class, series or phi spec");
    }
    ensure_out_dir(cfg);
    auto index = nlohmann::json::array();
    const auto meta = run_metadata(cfg, in);
    for (auto &r : reports) {
        for (const auto &[k, v] : meta.items()) {
            r.metadata[k] = v;
        }
        emit_report(cfg, r, out, index);
    }
    nlohmann::json j = meta;
    j["verdicts"] = std::move(index);
    write_file(cfg, "verdicts.json", j.dump(2) + "\n");
    return exit_ok;
}

int run(const RunConfig &cfg, std::ostream &out, std::ostream &err)
{
    try {
        if (cfg.format != "csv" && cfg.format != "json") {
            throw spec_error("--format must be csv or json");
        }
        if (cfg.subcommand == "coeffs") {
            return cmd_coeffs(cfg, out);
        }
        if (cfg.subcommand == "sample") {
            return cmd_sample(cfg, out);
        }
        if (cfg.subcommand == "diagnose") {
            return cmd_diagnose(cfg, out);
        }
        throw spec_error("unknown subcommand \"" + cfg.subcommand + "\"");
    } catch (const spec_error &e) {
        err << "spec error: " << e.what() << "\n";
        return exit_spec_error;
    } catch (const nlohmann::json::exception &e) {
        err << "spec error: " << e.what() << "\n";
        return exit_spec_error;
    } catch (const precondition_error &e) {
        err << "precondition error: " << e.what() << "\n";
        return exit_precondition;
    } catch (const resource_cap_error &e) {
        err << "resource cap: " << e.what() << "\n";
        return exit_resource_cap;
    }
}

int run_cli(int argc, char **argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Gibbs partitions, Boltzmann samplers and block-class diagnostics"};
    app.require_subcommand(1);
    RunConfig cfg;
    auto add_common = [&cfg](CLI::App *sub) {
        sub->add_option("--spec", cfg.spec_path, "JSON spec file")->required();
        sub->add_option("--trunc", cfg.truncation, "Truncation order N");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--out", cfg.out_dir, "Output directory");
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", cfg.threads, "Worker threads");
    };
    auto *coeffs = app.add_subcommand("coeffs", "Dump EGF coefficients");
    auto *sample = app.add_subcommand("sample", "Draw samples as JSON lines");
    auto *diagnose = app.add_subcommand("diagnose", "Run diagnostics and write reports");
    for (auto *sub : {coeffs, sample, diagnose}) {
        add_common(sub);
    }
    sample->add_option("--samples", cfg.samples, "Number of samples");
    sample->add_option("--streams", cfg.streams, "Independent random streams");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << "\n";
        return exit_spec_error;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return run(cfg, out, err);
}

} // namespace gibbs
