// hcwp: weakly periodic boundary laws of the hard-core model on a Cayley tree.
//
// Exit codes: 0 success, 2 usage or unsupported parameters, 1 internal failure.
// Errors go to stderr as {"error": <kind>, "message": <text>}.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "hcwp/curves.hpp"
#include "hcwp/errors.hpp"
#include "hcwp/io.hpp"
#include "hcwp/model.hpp"
#include "hcwp/solver.hpp"
#include "hcwp/tree.hpp"

namespace {

using hcwp::io::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::string set = "I2";
    int k = 2;
    int i = 1;
    std::string output;
    std::string format = "json";
};

void emit(const Common& c, const std::string& text)
{
    if (c.output.empty() || c.output == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream os(c.output, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + c.output + " for writing");
    os << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

hcwp::InvariantSet parse_set(const std::string& s)
{
    try {
        return hcwp::parse_invariant_set(s);
    } catch (const std::exception&) {
        throw UsageError("--set must be one of I1, I2, I3, I4 (got '" + s + "')");
    }
}

void add_common(CLI::App* cmd, Common& c, bool with_set = true)
{
    if (with_set) cmd->add_option("--set", c.set, "Invariant set I1..I4")->capture_default_str();
    cmd->add_option("--k", c.k, "Tree order k >= 1")->capture_default_str();
    cmd->add_option("--i", c.i, "Exponent parameter, 1 <= i <= k")->capture_default_str();
    cmd->add_option("-o,--output", c.output, "Write to this file instead of stdout");
}

hcwp::ModelParams params(const Common& c, std::optional<double> lambda, std::optional<double> coupling)
{
    if (lambda && coupling) return hcwp::ModelParams(c.k, c.i, *lambda, *coupling);
    if (coupling) return hcwp::ModelParams::from_coupling(c.k, c.i, *coupling);
    if (lambda) return hcwp::ModelParams(c.k, c.i, *lambda);
    throw UsageError("one of --lambda or --coupling is required");
}

std::string solutions_csv(const std::vector<hcwp::Solution>& v)
{
    std::string out = "x,y,z1,z2,z3,z4,z5,z6,z7,z8,residual,class,set,method,tangency\n";
    for (const auto& s : v) {
        out += s.chart ? hcwp::io::fmt17(s.chart->x) + ',' + hcwp::io::fmt17(s.chart->y) : std::string(",");
        for (double z : s.z8.values()) out += ',' + hcwp::io::fmt17(z);
        out += ',' + hcwp::io::fmt17(s.residual) + ',' + std::string(to_string(s.cls)) + ',' +
               (s.set ? std::string(to_string(*s.set)) : std::string()) + ',' + std::string(to_string(s.method)) +
               ',' + (s.tangency ? "1" : "0") + '\n';
    }
    return out;
}

int run_solve(const Common& c, std::optional<double> lambda, std::optional<double> coupling, int multistart,
              std::uint64_t seed)
{
    const auto p = params(c, lambda, coupling);
    std::vector<hcwp::Solution> sols;
    if (multistart > 0) {
        sols = hcwp::solve_full_multistart(p, multistart, seed).solutions;
    } else {
        sols = hcwp::solve_reduced(parse_set(c.set), p);
    }
    emit(c, c.format == "csv" ? solutions_csv(sols) : dump(hcwp::io::to_json(sols, p)));
    return 0;
}

int run_scan(const Common& c, double lo, double hi, std::optional<double> step, std::optional<int> steps,
             const std::vector<double>& lambdas, bool geometric, int jobs)
{
    const auto s = parse_set(c.set);
    std::vector<double> grid;
    if (!lambdas.empty()) {
        grid = lambdas;
    } else {
        int n = 0;
        if (lo == hi) {
            n = 0;
        } else if (steps) {
            n = *steps;
        } else if (step) {
            if (!(*step > 0.0)) throw UsageError("--step must be positive");
            n = static_cast<int>(std::lround((hi - lo) / *step));
            if (geometric) throw UsageError("--step is linear; use --steps with --geometric");
        } else {
            n = 50;
        }
        try {
            grid = hcwp::lambda_grid(lo, hi, n, geometric ? hcwp::GridKind::Geometric : hcwp::GridKind::Linear);
        } catch (const std::domain_error& e) {
            throw UsageError(e.what());
        }
    }
    for (double l : grid) {
        if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("lambda values must be positive");
    }
    const auto rows = hcwp::lambda_scan(s, c.k, c.i, grid, jobs);
    if (c.format == "json") {
        json a = json::array();
        for (const auto& r : rows) a.push_back(hcwp::io::to_json(r, c.k, c.i));
        emit(c, dump(a));
    } else {
        emit(c, hcwp::io::scan_csv(rows, c.k, c.i));
    }
    return 0;
}

std::pair<double, double> default_bracket(hcwp::InvariantSet s, int k)
{
    using hcwp::InvariantSet;
    if (s == InvariantSet::I2 && k == 2) return {3.0, 5.0};
    if (s == InvariantSet::I2 && k == 3) return {0.5, 1.8};
    if (s == InvariantSet::I4 && k == 7) return {1.7, 1.8};
    throw UsageError("no default bracket for this (set, k); pass --lo and --hi");
}

int run_critical(const Common& c, std::optional<double> lo, std::optional<double> hi, double tol)
{
    const auto s = parse_set(c.set);
    if (lo.has_value() != hi.has_value()) throw UsageError("--lo and --hi go together");
    const auto [a, b] = lo ? std::pair{*lo, *hi} : default_bracket(s, c.k);
    hcwp::CriticalResult r;
    try {
        r = hcwp::find_critical_lambda(s, c.k, c.i, a, b, tol);
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    json j = hcwp::io::to_json(r);
    j["set"] = c.set;
    j["k"] = c.k;
    j["i"] = c.i;
    emit(c, dump(j));
    return 0;
}

int run_curve(const Common& c, int figure, int samples, std::optional<double> lambda, std::optional<double> xmin,
              std::optional<double> xmax)
{
    hcwp::CurveSpec spec;
    try {
        spec = hcwp::default_curve(figure);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (lambda) spec.lambdas = {*lambda};
    if (xmin) spec.xmin = *xmin;
    if (xmax) spec.xmax = *xmax;
    if (samples < 1) throw UsageError("--samples must be >= 1");
    if (!(spec.xmin <= spec.xmax)) throw UsageError("need --xmin <= --xmax");
    emit(c, hcwp::curve_csv(spec, samples));
    return 0;
}

int run_verify_tree(const Common& c, int depth, std::optional<double> lambda, const std::string& edges)
{
    const auto tree = hcwp::build_tree(c.k, depth, hcwp::tree_cap_from_env());
    const auto rep = hcwp::verify_system_structure(tree, c.i);
    json j{{"k", c.k}, {"i", c.i}, {"depth", depth}, {"vertices", tree.size()}};
    if (!rep.applicable) {
        j["structure"] = "not applicable (the tree oracle certifies i = 1 only)";
    } else {
        json v = json::array();
        for (const auto& e : rep.violations) v.push_back({{"word", e.word}, {"message", e.message}});
        j["structure"] = {{"checked", rep.checked}, {"violations", v}};
    }
    if (lambda) {
        const hcwp::ModelParams p(c.k, c.i, *lambda);
        json laws = json::array();
        double worst = 0.0;
        for (auto s : {hcwp::InvariantSet::I1, hcwp::InvariantSet::I2, hcwp::InvariantSet::I3, hcwp::InvariantSet::I4}) {
            std::vector<hcwp::Solution> sols;
            try {
                sols = hcwp::solve_reduced(s, p);
            } catch (const hcwp::UnsupportedParameter&) {
                continue;
            }
            for (const auto& sol : sols) {
                const double r = hcwp::verify_boundary_law(tree, sol.z8, *lambda);
                worst = std::max(worst, r);
                laws.push_back({{"set", std::string(to_string(s))},
                                {"class", std::string(to_string(sol.cls))},
                                {"z8", hcwp::io::to_json(sol, p)["z8"]},
                                {"residual", r}});
            }
        }
        j["lambda"] = *lambda;
        j["boundary_laws"] = laws;
        j["max_boundary_residual"] = worst;
    }
    if (!edges.empty()) {
        std::ofstream os(edges, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + edges + " for writing");
        tree.write_edges(os);
    }
    emit(c, dump(j));
    return 0;
}

int run_check(const Common& c, const std::string& input)
{
    std::ifstream is(input, std::ios::binary);
    if (!is) throw UsageError("cannot read " + input);
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw UsageError("expected a JSON array of solutions");
    double worst = 0.0;
    for (const auto& s : doc) worst = std::max(worst, hcwp::io::recheck_residual(s));
    const bool ok = worst < hcwp::kSolutionResidualBound;
    emit(c, dump(json{{"checked", doc.size()}, {"max_residual", worst}, {"ok", ok}}));
    return ok ? 0 : 1;
}

int fail(int code, std::string_view kind, const std::string& message)
{
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weakly periodic boundary laws of the hard-core model on a Cayley tree"};
    app.require_subcommand(1);

    Common c;
    std::optional<double> lambda, coupling, lo, hi, step, xmin, xmax;
    std::optional<int> steps;
    std::vector<double> lambdas;
    int multistart = 0;
    std::uint64_t seed = 0;
    bool geometric = false;
    int jobs = 1;
    double tol = 1e-9;
    int figure = 1;
    int samples = 401;
    int depth = 4;
    std::string edges;
    std::string input;

    auto* solve = app.add_subcommand("solve", "Solve the reduced system on one invariant set");
    add_common(solve, c);
    solve->add_option("--lambda", lambda, "Activity λ > 0");
    solve->add_option("--coupling", coupling, "Coupling J, λ = exp(J)");
    solve->add_option("--multistart", multistart, "Search the full 4-variable map from N starts instead");
    solve->add_option("--seed", seed, "Seed for --multistart")->capture_default_str();
    solve->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto* scan = app.add_subcommand("scan", "Solution counts over a λ grid");
    add_common(scan, c);
    scan->add_option("--lo", lo, "Lowest λ");
    scan->add_option("--hi", hi, "Highest λ");
    scan->add_option("--step", step, "Linear grid spacing");
    scan->add_option("--steps", steps, "Number of grid intervals");
    scan->add_option("--lambdas", lambdas, "Explicit λ values")->delimiter(',');
    scan->add_flag("--geometric", geometric, "Geometric grid");
    scan->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
    scan->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

    auto* critical = app.add_subcommand("critical", "Bisection for the λ where the solution count changes");
    add_common(critical, c);
    critical->add_option("--lo", lo, "Lower end of the bracket");
    critical->add_option("--hi", hi, "Upper end of the bracket");
    critical->add_option("--tol", tol, "Bracket width")->capture_default_str();

    auto* curve = app.add_subcommand("curve", "Sampled curve data for plots 1-5");
    add_common(curve, c, false);
    curve->add_option("--figure", figure, "1..5")->capture_default_str();
    curve->add_option("--samples", samples, "Rows per λ")->capture_default_str();
    curve->add_option("--lambda", lambda, "Override λ (single curve)");
    curve->add_option("--xmin", xmin, "Left end of the x range");
    curve->add_option("--xmax", xmax, "Right end of the x range");

    auto* tree = app.add_subcommand("verify-tree", "Check the system structure and boundary laws on a finite tree");
    add_common(tree, c, false);
    tree->add_option("--depth", depth, "Tree depth")->capture_default_str();
    tree->add_option("--lambda", lambda, "Also check every solution at this λ against the tree recursion");
    tree->add_option("--edges", edges, "Export the labelled edge list to this file");

    auto* check = app.add_subcommand("check", "Recompute residuals of a JSON solution file");
    check->add_option("--input", input, "File written by solve")->required();
    check->add_option("-o,--output", c.output, "Write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what());
    }

    try {
        if (*solve) return run_solve(c, lambda, coupling, multistart, seed);
        if (*scan) {
            if (scan->count("--format") == 0) c.format = "csv";
            if (lambdas.empty() && (!lo || !hi)) throw UsageError("scan needs --lo and --hi, or --lambdas");
            return run_scan(c, lo.value_or(0), hi.value_or(0), step, steps, lambdas, geometric, jobs);
        }
        if (*critical) return run_critical(c, lo, hi, tol);
        if (*curve) return run_curve(c, figure, samples, lambda, xmin, xmax);
        if (*tree) return run_verify_tree(c, depth, lambda, edges);
        if (*check) return run_check(c, input);
    } catch (const hcwp::UnsupportedParameter& e) {
        return fail(2, "unsupported", e.what());
    } catch (const hcwp::NoTransition& e) {
        return fail(2, "no-transition", e.what());
    } catch (const hcwp::TreeCapExceeded& e) {
        return fail(2, "tree-cap", e.what());
    } catch (const UsageError& e) {
        return fail(2, "usage", e.what());
    } catch (const std::domain_error& e) {
        return fail(2, "usage", e.what());
    } catch (const std::exception& e) {
        return fail(1, "internal", e.what());
    }
    return fail(2, "usage", "no subcommand");
}
