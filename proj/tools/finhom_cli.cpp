// finhom: command-line front end.
//
// Exit codes: 0 success, 1 a verdict failed, 2 usage or input error.

#include "finhom/entropy.hpp"
#include "finhom/experiments.hpp"
#include "finhom/gh.hpp"
#include "finhom/isometry.hpp"
#include "finhom/json_io.hpp"
#include "finhom/quasimorph.hpp"
#include "finhom/spaces.hpp"
#include "finhom/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace finhom;

namespace {

struct Globals {
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::uint64_t budget = 10'000'000;

    RunOptions run() const { return {seed, threads, budget}; }
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

// Objects become "key,value" lines; everything else is dumped as is.
std::string flat_csv(const json& j)
{
    if (!j.is_object()) return j.dump() + "\n";
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : j.items()) {
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            s = q + "\"";
        }
        os << k << "," << s << "\n";
    }
    return os.str();
}

void emit(const Globals& g, const std::string& text)
{
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw UsageError("cannot write " + g.out);
    f << text;
}

void emit_json(const Globals& g, const json& j) { emit(g, g.format == "csv" ? flat_csv(j) : j.dump(2) + "\n"); }

Length parse_length(const std::string& s)
{
    try {
        return Length::parse(s);
    } catch (const std::exception&) {
        throw UsageError("not a length: " + s);
    }
}

ModelSpace parse_model(const std::string& spec)
{
    // circle | torus:D | sphere | solenoid:K
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    int arg = 0;
    if (colon != std::string::npos) arg = std::stoi(spec.substr(colon + 1));
    if (kind == "circle") return Circle{};
    if (kind == "sphere") return Sphere2{};
    if (kind == "torus" && arg >= 1) return Torus{std::vector<Length>(static_cast<std::size_t>(arg), Length(1))};
    if (kind == "solenoid" && arg >= 1) return SolenoidTruncation::factorial(arg);
    throw UsageError("unknown model " + spec + " (circle, torus:D, sphere, solenoid:K)");
}

FiniteGroup parse_group(const std::string& spec)
{
    // cyclic:N | dihedral:N | symmetric:K
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("group must look like cyclic:N, dihedral:N or symmetric:K");
    std::string kind = spec.substr(0, colon);
    const auto n = static_cast<std::size_t>(std::stoul(spec.substr(colon + 1)));
    if (kind == "cyclic") return FiniteGroup::cyclic(n);
    if (kind == "dihedral") return FiniteGroup::dihedral(n);
    if (kind == "symmetric") return FiniteGroup::symmetric(n);
    throw UsageError("unknown group " + spec);
}

GroupAction action_from_json(const json& j)
{
    GroupAction a{space_from_json(j.at("space")), {}};
    for (const auto& e : j.at("elements")) a.elements.push_back(e.get<Permutation>());
    return a;
}

// {"source": {"cyclic": [m...]} | {"action": A}, "target": {"model": ...} |
//  {"action": A}, "table": [...], "bound"?: length}
QuasiMap quasi_from_json(const json& j)
{
    const auto& src = j.at("source");
    FiniteGroup source = src.contains("cyclic")
                             ? FiniteGroup::abelian(src.at("cyclic").get<std::vector<std::size_t>>())
                             : metric_group_of_action(action_from_json(src.at("action"))).group();
    const auto& tgt = j.at("target");
    std::shared_ptr<const MetricGroup> target;
    if (tgt.contains("action")) {
        target = std::make_shared<const MetricGroup>(metric_group_of_action(action_from_json(tgt.at("action"))));
    } else {
        const auto model = tgt.at("model").get<std::string>();
        if (model == "circle")
            target = std::make_shared<const MetricGroup>(MetricGroup::circle());
        else if (model == "torus")
            target = std::make_shared<const MetricGroup>(MetricGroup::torus(tgt.value("d", std::size_t{2})));
        else if (model == "solenoid")
            target = std::make_shared<const MetricGroup>(MetricGroup::solenoid(tgt.value("depth", 2)));
        else
            throw UsageError("unknown target model " + model);
    }
    std::vector<GroupElement> table;
    for (const auto& e : j.at("table")) {
        if (target->is_finite()) {
            table.push_back(target->element(e.get<std::uint32_t>()));
            continue;
        }
        std::vector<Rational> coords;
        if (e.is_array())
            for (const auto& c : e) coords.push_back(Rational::parse(c.get<std::string>()));
        else
            coords.push_back(Rational::parse(e.get<std::string>()));
        table.push_back(target->element(std::move(coords)));
    }
    return QuasiMap(std::move(source), std::move(target), std::move(table));
}

json bounds_json(const GhBounds& b)
{
    return {{"lower", length_to_json(b.lower)},
            {"upper", length_to_json(b.upper)},
            {"exact", b.exact},
            {"net_slack", length_to_json(b.net_slack)},
            {"lower_certificate", b.lower_certificate.describe()},
            {"nodes", b.nodes}};
}

json optional_bool(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite homogeneous metric spaces: generators, isometries, GH bounds, quasi-morphisms, experiments"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--out", g.out, "Write output to this file instead of stdout");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", g.seed, "Seed for randomized campaigns");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--budget", g.budget, "Branch nodes for GH searches");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a space as JSON");
    std::string kind, scale_text, name, group_spec;
    std::size_t n = 0, m = 0, d = 0;
    int depth = 0;
    std::vector<std::uint32_t> gens;
    gen->add_option("kind", kind, "cycle | torus | solenoid | archimedean | cayley | point")->required();
    gen->add_option("--n", n, "Points (cycle, solenoid)");
    gen->add_option("--scale", scale_text, "Edge length, e.g. 1/6");
    gen->add_option("--d", d, "Torus dimension");
    gen->add_option("--m", m, "Torus grid points per axis");
    gen->add_option("--depth", depth, "Solenoid depth");
    gen->add_option("--name", name, "Archimedean or Platonic solid");
    gen->add_option("--group", group_spec, "cyclic:N | dihedral:N | symmetric:K");
    gen->add_option("--gens", gens, "Generator indices (closed under inverses)");

    // validate
    auto* val = app.add_subcommand("validate", "Check the metric axioms of a space file");
    std::string file, file2;
    val->add_option("file", file)->required();

    // entropy
    auto* ent = app.add_subcommand("entropy", "Packing and covering numbers");
    std::vector<std::string> eps_text;
    bool isometry_bound = false;
    ent->add_option("file", file)->required();
    ent->add_option("--eps", eps_text, "Scales")->required();
    ent->add_flag("--isometry-bound", isometry_bound, "Also check packing(Isom X, eps) <= E(eps/4)^E(eps/4)");

    // isom
    auto* iso = app.add_subcommand("isom", "Isometry group and transitivity");
    iso->add_option("file", file)->required();

    // gh
    auto* ghc = app.add_subcommand("gh", "Gromov-Hausdorff bounds between two spaces or to a model");
    std::string model_spec, mesh_text = "1/64";
    ghc->add_option("x", file)->required();
    ghc->add_option("y", file2, "Second space file");
    ghc->add_option("--model", model_spec, "circle | torus:D | sphere | solenoid:K");
    ghc->add_option("--mesh", mesh_text, "Model net mesh");

    // quasi
    auto* qua = app.add_subcommand("quasi", "Defect and density of a map given as a JSON table");
    std::string resolution_text = "1/100";
    qua->add_option("file", file)->required();
    qua->add_option("--resolution", resolution_text, "Net resolution for continuous targets");

    // exp
    auto* exp = app.add_subcommand("exp", "Run an experiment campaign");
    std::string exp_name, params_text = "{}", params_file;
    exp->add_option("name", exp_name)->required()->check(CLI::IsMember(experiment_names()));
    exp->add_option("--params", params_text, "JSON object overriding default parameters");
    exp->add_option("--params-file", params_file, "Same, from a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            FiniteMetricSpace space;
            auto scale = [&](const Length& fallback) { return scale_text.empty() ? fallback : parse_length(scale_text); };
            if (kind == "cycle") {
                if (n < 3) throw UsageError("cycle needs --n >= 3");
                space = cycle_space(n, scale(Length(Rational(1, static_cast<std::int64_t>(n))))).space;
            } else if (kind == "torus") {
                if (d < 1 || m < 1) throw UsageError("torus needs --d and --m");
                space = torus_grid(d, m);
            } else if (kind == "solenoid") {
                if (depth < 1 || n < 1) throw UsageError("solenoid needs --depth and --n");
                space = solenoid_approximant(depth, n);
            } else if (kind == "archimedean") {
                space = archimedean_vertices(name);
            } else if (kind == "cayley") {
                space = cayley_space(parse_group(group_spec), gens, scale(Length(1))).space;
            } else if (kind == "point") {
                space = FiniteMetricSpace::point();
            } else {
                throw UsageError("unknown kind " + kind);
            }
            auto report = validate(space);
            if (!report.ok()) {
                std::cerr << "generated space fails validation (" << report.total << " violations)\n";
                return 1;
            }
            if (g.format == "csv") {
                std::ostringstream os;
                for (std::size_t i = 0; i < space.size(); ++i)
                    for (std::size_t j = 0; j < space.size(); ++j)
                        os << space.distance(i, j).str() << (j + 1 < space.size() ? "," : "\n");
                emit(g, os.str());
            } else {
                emit(g, space_to_json(space).dump(2) + "\n");
            }
            return 0;
        }

        if (val->parsed()) {
            auto space = space_from_json(read_json(file));
            auto report = validate(space);
            json violations = json::array();
            for (const auto& v : report.violations)
                violations.push_back({{"axiom", to_string(v.axiom)}, {"i", v.i}, {"j", v.j}, {"k", v.k}});
            emit_json(g, {{"ok", report.ok()}, {"total", report.total}, {"violations", violations}});
            return report.ok() ? 0 : 1;
        }

        if (ent->parsed()) {
            auto space = space_from_json(read_json(file));
            json rows = json::array();
            bool holds = true;
            std::ostringstream csv;
            csv << "eps,packing,packing_upper,packing_exact,covering,covering_exact\n";
            for (const auto& t : eps_text) {
                const Length eps = parse_length(t);
                auto p = packing_number(space, eps);
                auto c = covering_number(space, eps);
                json row = {{"eps", length_to_json(eps)}, {"packing", p.count},     {"packing_upper", p.upper},
                            {"packing_exact", p.exact},   {"covering", c.count},    {"covering_exact", c.exact}};
                csv << eps.str() << "," << p.count << "," << p.upper << "," << p.exact << "," << c.count << ","
                    << c.exact << "\n";
                if (isometry_bound) {
                    auto chk = verify_isometry_entropy_bound(space, eps);
                    row["isometry_packing"] = chk.lhs;
                    row["isometry_packing_upper"] = chk.lhs_upper;
                    row["entropy_power"] = chk.rhs;
                    row["bound_holds"] = chk.holds;
                    holds = holds && chk.holds;
                }
                rows.push_back(std::move(row));
            }
            if (g.format == "csv" && !isometry_bound)
                emit(g, csv.str());
            else
                emit(g, rows.dump(2) + "\n");
            return holds ? 0 : 1;
        }

        if (iso->parsed()) {
            auto space = space_from_json(read_json(file));
            IsometryOptions opts;
            auto group = isometry_group(space, opts);
            json gens_json = json::array();
            for (const auto& p : group.generators) gens_json.push_back(p);
            emit_json(g, {{"points", space.size()},
                          {"order", group.order()},
                          {"complete", group.complete},
                          {"note", group.note},
                          {"generators", gens_json},
                          {"homogeneous", optional_bool(is_homogeneous(space, opts))},
                          {"distance_transitive", optional_bool(is_distance_transitive(space, opts))}});
            return 0;
        }

        if (ghc->parsed()) {
            auto x = space_from_json(read_json(file));
            GhOptions opts;
            opts.budget = g.budget;
            if (!file2.empty() == !model_spec.empty()) throw UsageError("give either a second space or --model");
            GhBounds b = file2.empty() ? gh_to_model(x, parse_model(model_spec), parse_length(mesh_text), std::nullopt, opts)
                                       : gh_exact(x, space_from_json(read_json(file2)), opts);
            emit_json(g, bounds_json(b));
            return 0;
        }

        if (qua->parsed()) {
            json j = read_json(file);
            auto qm = quasi_from_json(j);
            auto dfc = defect(qm, g.threads);
            auto den = density(qm, parse_length(resolution_text));
            json out = {{"target", qm.target->name()},
                        {"source_order", qm.source.order()},
                        {"defect", length_to_json(dfc.value)},
                        {"defect_pair", {dfc.a, dfc.b}},
                        {"density_lower", length_to_json(den.lower)},
                        {"density_upper", length_to_json(den.upper)},
                        {"density_exact", den.exact()}};
            bool ok = true;
            if (j.contains("bound")) {
                const Length bound = length_from_json(j["bound"]);
                ok = leq_tol(dfc.value, bound);
                out["bound"] = length_to_json(bound);
                out["within_bound"] = ok;
            }
            emit_json(g, out);
            return ok ? 0 : 1;
        }

        if (exp->parsed()) {
            json params = params_file.empty() ? json::parse(params_text) : read_json(params_file);
            auto report = run_experiment(exp_name, params, g.run());
            emit(g, g.format == "csv" ? report_to_csv(report) : report_to_json(report).dump(2) + "\n");
            return report.passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
