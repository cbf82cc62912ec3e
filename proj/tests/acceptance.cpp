// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hcwp/curves.hpp"
#include "hcwp/solver.hpp"
#include "hcwp/tree.hpp"

using namespace hcwp;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int digits = 12)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every solution emitted by criteria 2-5, for the tree check.
std::vector<std::pair<ModelParams, Solution>> emitted;

void record(const ModelParams& p, const std::vector<Solution>& v)
{
    for (const auto& s : v) emitted.emplace_back(p, s);
}

Outcome critical_i2_k2()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = find_critical_lambda(InvariantSet::I2, 2, 1, 3.0, 5.0, 1e-9);
    const double dt = seconds_since(t0);
    o.require(std::abs(r.lambda_cr - 4.0) <= 1e-9, "lambda_cr = " + num(r.lambda_cr, 15));
    o.require(r.method == CriticalMethod::ExactSturm, "method is not exact-sturm");
    o.require(dt < 5.0, "runtime " + num(dt, 3) + " s");
    o.note("lambda_cr = " + num(r.lambda_cr, 15) + " in " + num(dt, 3) + " s");
    return o;
}

Outcome counts_i2_k2()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::pair<double, int> expected[] = {{3.88, 1}, {4.0, 2}, {4.15, 3}};
    for (auto [lambda, want] : expected) {
        const ModelParams p(2, 1, lambda);
        const auto s = solve_reduced(InvariantSet::I2, p);
        record(p, s);
        const int got = static_cast<int>(s.size());
        o.require(got == want, "lambda=" + num(lambda, 4) + ": " + std::to_string(got) + " solutions, expected " +
                                   std::to_string(want));
        if (got == want) o.note("lambda=" + num(lambda, 4) + ": " + std::to_string(got));
    }
    const double dt = seconds_since(t0);
    o.require(dt < 5.0, "runtime " + num(dt, 3) + " s");
    return o;
}

Outcome f16_at_1_8()
{
    Outcome o;
    const double lambda = 1.8;
    const auto f = f16_poly(lambda);
    const std::tuple<double, double, double> ref[] = {
        {1.0, 3.24, 1e-5}, {1.5, -0.5255524, 1e-5}, {1.8, 9.30017, 1e-4}, {2.0, -90.1232, 1e-3}};
    for (auto [x, v, tol] : ref) {
        o.require(std::abs(f(x) - v) <= tol, "f(" + num(x, 3) + ") = " + num(f(x), 10));
    }
    const auto fq = f16_poly(Rational(lambda));
    const SturmSequence sturm(fq);
    const int count = sturm.count_above(Rational(1));
    o.require(count >= 4, "Sturm count in (1, inf) = " + std::to_string(count));
    o.note("Sturm count " + std::to_string(count));

    const ModelParams p(3, 1, lambda);
    const ChartMap chart(InvariantSet::I2, p);
    const Rational bound(cauchy_bound(fq) + 1.0);
    for (const auto& b : isolate_roots(fq, Rational(1), bound)) {
        const double x = refine_root(fq, b);
        const auto y = chart(x);
        double residual = INFINITY;
        if (y && *y > 1.0) {
            const auto z8 = back_substitute(chart.reduced_state(x, *y), p);
            residual = max_abs(full_residual(z8, p));
        }
        o.require(residual < 1e-9, "root x=" + num(x, 10) + " residual " + num(residual, 3));
        if (residual < 1e-9) o.note("root x=" + num(x, 10) + " residual " + num(residual, 3));
    }
    return o;
}

Outcome i3_unique()
{
    Outcome o;
    for (int k = 1; k <= 5; ++k) {
        for (double lambda : {0.1, 1.0, 4.0, 35.0}) {
            const ModelParams p(k, 1, lambda);
            const auto s = solve_reduced(InvariantSet::I3, p);
            record(p, s);
            const std::string at = "k=" + std::to_string(k) + " lambda=" + num(lambda, 3);
            o.require(s.size() == 1, at + ": " + std::to_string(s.size()) + " solutions");
            for (const auto& sol : s) {
                const auto v = sol.z8.values();
                const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
                o.require(*hi - *lo <= 1e-10, at + ": components differ by " + num(*hi - *lo, 3));
            }
        }
    }
    if (o.pass) o.note("20 cases, one TI solution each");
    return o;
}

Outcome i4_counts()
{
    Outcome o;
    for (const Rational lambda : {Rational(1, 2), Rational(1), Rational(5), Rational(50)}) {
        const Rational lo(1), hi = 1 + lambda;
        const int c1 = sturm_count(h1_poly(lambda), lo, hi);
        const int c2 = sturm_count(h2_poly(lambda), lo, hi);
        o.require(c1 == 0 && c2 == 0, "h1/h2 Sturm counts at lambda=" + num(lambda.get_d(), 3) + ": " +
                                          std::to_string(c1) + "/" + std::to_string(c2));
        for (int k : {2, 3}) {
            const ModelParams p(k, 1, lambda.get_d());
            const auto s = solve_reduced(InvariantSet::I4, p);
            record(p, s);
            o.require(s.size() == 1, "k=" + std::to_string(k) + " lambda=" + num(lambda.get_d(), 3) + ": " +
                                         std::to_string(s.size()) + " solutions");
        }
    }
    for (int k : {4, 5, 6}) {
        std::vector<double> grid;
        for (int j = 1; j <= 50; ++j) grid.push_back(20.0 * j / 50);
        int bad = 0;
        double first_bad = 0;
        for (const auto& row : lambda_scan(InvariantSet::I4, k, 1, grid)) {
            record(ModelParams(k, 1, row.lambda), row.solutions);
            if (row.count != 1) {
                if (bad++ == 0) first_bad = row.lambda;
            }
        }
        o.require(bad == 0, "k=" + std::to_string(k) + ": " + std::to_string(bad) +
                                "/50 grid points with count != 1 (from lambda=" + num(first_bad, 4) + ")");
    }
    for (auto [lambda, want] : {std::pair{1.765, 1}, std::pair{1.775, 3}}) {
        const ModelParams p(7, 1, lambda);
        const auto s = solve_reduced(InvariantSet::I4, p);
        record(p, s);
        o.require(static_cast<int>(s.size()) == want,
                  "k=7 lambda=" + num(lambda, 4) + ": " + std::to_string(s.size()) + " solutions");
    }
    const auto r = find_critical_lambda(InvariantSet::I4, 7, 1, 1.7, 1.8, 1e-9);
    o.require(std::abs(r.lambda_cr - 1.768674523) <= 1e-6, "k=7 lambda_cr = " + num(r.lambda_cr, 15));
    o.note("k=7 lambda_cr = " + num(r.lambda_cr, 12));
    return o;
}

Outcome invariance()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    std::uniform_real_distribution<double> loglam(std::log(1e-2), std::log(1e2));
    const InvariantSet sets[] = {InvariantSet::I1, InvariantSet::I2, InvariantSet::I3, InvariantSet::I4};
    int failures = 0;
    for (InvariantSet s : sets) {
        for (int n = 0; n < 1000; ++n) {
            const int k = 1 + static_cast<int>(rng() % 7);
            const int i = 1 + static_cast<int>(rng() % static_cast<unsigned>(k));
            const ModelParams p(k, i, std::exp(loglam(rng)));
            const double a = u(rng), b = u(rng);
            ZVector4 z;
            switch (s) {
            case InvariantSet::I1: z = ZVector4::filled(a); break;
            case InvariantSet::I2: z = ZVector4{a, b, a, b}; break;
            case InvariantSet::I3: z = ZVector4{a, a, b, b}; break;
            case InvariantSet::I4: z = ZVector4{a, b, b, a}; break;
            }
            if (!invariant_membership(apply_W(z, p), s, 1e-12)) ++failures;
        }
    }
    o.require(failures == 0, std::to_string(failures) + " of 4000 images left their set");
    if (o.pass) o.note("4000 random points, 0 failures");
    return o;
}

Outcome tree_oracle()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (auto [k, depth] : {std::pair{2, 4}, std::pair{3, 3}}) {
        const auto rep = verify_system_structure(build_tree(k, depth));
        o.require(rep.violations.empty(), "k=" + std::to_string(k) + " depth=" + std::to_string(depth) + ": " +
                                              std::to_string(rep.violations.size()) + " violations");
    }
    std::vector<CosetTree> trees;
    for (int k = 1; k <= 7; ++k) trees.push_back(build_tree(k, 4));
    double worst = 0;
    for (const auto& [p, s] : emitted) {
        const double r = verify_boundary_law(trees[static_cast<std::size_t>(p.k() - 1)], s.z8, p.lambda());
        worst = std::max(worst, r);
        o.require(r < 1e-9, "k=" + std::to_string(p.k()) + " lambda=" + num(p.lambda(), 4) + " residual " + num(r, 3));
    }
    const double dt = seconds_since(t0);
    o.require(dt < 30.0, "runtime " + num(dt, 3) + " s");
    o.note(std::to_string(emitted.size()) + " solutions, max residual " + num(worst, 3) + ", " + num(dt, 3) + " s");
    return o;
}

Outcome cross_oracle()
{
    Outcome o;
    for (double lambda : {3.0, 5.0}) {
        const ModelParams p(2, 1, lambda);
        std::vector<Solution> reduced;
        for (auto s : {InvariantSet::I1, InvariantSet::I2, InvariantSet::I3, InvariantSet::I4}) {
            for (const auto& sol : solve_reduced(s, p)) detail::push_unique(reduced, sol, 1e-8);
        }
        const auto ms = solve_full_multistart(p, 500, 0);
        int extras = 0, missing = 0, outside = 0;
        for (const auto& m : ms.solutions) {
            if (!m.set) {
                ++outside;
                continue;
            }
            const bool known = std::any_of(reduced.begin(), reduced.end(),
                                           [&](const Solution& r) { return detail::close(m.z4, r.z4, 1e-7); });
            extras += !known;
        }
        for (const auto& r : reduced) {
            const bool found = std::any_of(ms.solutions.begin(), ms.solutions.end(),
                                           [&](const Solution& m) { return detail::close(m.z4, r.z4, 1e-7); });
            missing += !found;
        }
        const std::string at = "lambda=" + num(lambda, 3);
        o.require(extras == 0, at + ": " + std::to_string(extras) + " multistart points missing from the sets");
        o.require(missing == 0, at + ": " + std::to_string(missing) + " set solutions not found");
        o.note(at + ": " + std::to_string(reduced.size()) + " fixed points, " + std::to_string(outside) +
               " outside I1-I4, " + std::to_string(ms.non_convergent) + " starts dropped");
    }
    return o;
}

Outcome ti_polynomial()
{
    Outcome o;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> loglam(std::log(1e-3), std::log(1e3));
    int bad = 0;
    for (int n = 0; n < 100; ++n) {
        const int k = 1 + static_cast<int>(rng() % 6);
        const Rational lambda(std::exp(loglam(rng)));
        if (descartes_count(ti_poly(k, lambda)) != 1) ++bad;
    }
    o.require(bad == 0, std::to_string(bad) + " samples with Descartes count != 1");
    const ModelParams p(2, 1, 4.0);
    const double x = ti_chart_root(p);
    o.require(std::abs(x - 2.0) <= 1e-12, "root at k=2, lambda=4 is " + num(x, 17));
    o.require(std::abs(ti_boundary_law(p) - 0.25) <= 1e-12, "z = " + num(ti_boundary_law(p), 17));
    if (o.pass) o.note("100 samples; root " + num(x, 17));
    return o;
}

std::string run_cli(const std::string& args, const std::string& file)
{
    const std::string cmd = std::string("\"") + HCWP_CLI_PATH + "\" " + args + " --output \"" + file + "\"";
    if (std::system(cmd.c_str()) != 0) return "<failed: " + cmd + ">";
    std::ifstream is(file, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome curves()
{
    Outcome o;
    for (int fig = 1; fig <= 5; ++fig) {
        const std::string args = "curve --figure " + std::to_string(fig);
        const std::string a = run_cli(args, "acceptance_curve_a.csv");
        const std::string b = run_cli(args, "acceptance_curve_b.csv");
        const std::string lib = curve_csv(default_curve(fig), 401);
        o.require(a == b && a == lib, "figure " + std::to_string(fig) + " output is not reproducible");
    }
    auto spec = default_curve(2);
    spec.lambdas = {4.0};
    std::istringstream is(curve_csv(spec, 401));
    double lowest = INFINITY;
    for (std::string line; std::getline(is, line);) {
        const auto comma = line.find(',');
        if (line[0] == 'x') continue;
        const double x = std::stod(line.substr(0, comma));
        if (x > 1.9 && x < 2.1) lowest = std::min(lowest, std::abs(std::stod(line.substr(comma + 1))));
    }
    o.require(lowest <= 1e-4, "min |h| on (1.9, 2.1) at lambda=4 is " + num(lowest, 3));
    o.note("min |h| on (1.9, 2.1) = " + num(lowest, 3));
    return o;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"critical lambda on I2, k=2", critical_i2_k2},
        {"solution counts of the I2 system, k=2", counts_i2_k2},
        {"degree-16 polynomial at lambda=1.8", f16_at_1_8},
        {"I3 uniqueness", i3_unique},
        {"I4 counts and k=7 transition", i4_counts},
        {"invariant sets are preserved", invariance},
        {"tree oracle", tree_oracle},
        {"multistart cross-check", cross_oracle},
        {"TI polynomial", ti_polynomial},
        {"curve data", curves},
    };
    int failed = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        Outcome o;
        try {
            o = criteria[n].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", n + 1, criteria[n].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
