#pragma once

// Finding, counting and classifying fixed points of the reduced map W.
//
// Per invariant set the reduced system is solved either exactly (Sturm
// isolation of a closed-form elimination polynomial) or numerically (a scan
// of the quotient q over the chart interval). Every candidate is
// back-substituted into the full eight-variable system and kept only if its
// residual is below kSolutionResidualBound.

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hcwp/errors.hpp"
#include "hcwp/model.hpp"
#include "hcwp/polynomial.hpp"
#include "hcwp/reductions.hpp"

namespace hcwp {

enum class SolveMethod { ExactSturm, NumericQ, NumericScalar, Multistart };

inline std::string_view to_string(SolveMethod m)
{
    switch (m) {
    case SolveMethod::ExactSturm: return "exact-sturm";
    case SolveMethod::NumericQ: return "numeric-q";
    case SolveMethod::NumericScalar: return "numeric-scalar";
    case SolveMethod::Multistart: return "multistart";
    }
    return "?";
}

struct XYPair {
    double x = 0;
    double y = 0;
};

struct Solution {
    ZVector4 z4;
    ZVector8 z8;
    std::optional<XYPair> chart;
    /// Max-norm of the full-system residual of z8.
    double residual = 0;
    SolutionClass cls = SolutionClass::TranslationInvariant;
    /// Smallest invariant set holding z4 (multistart points may lie in none).
    std::optional<InvariantSet> set;
    SolveMethod method = SolveMethod::NumericQ;
    /// The point is a double root of the reduced equation (a bifurcation).
    bool tangency = false;
};

struct SolveOptions {
    int scan_cells = kDefaultScanCells;
    int max_scan_cells = 1 << 17;
    QuotientConfig quotient{};
    /// Roots closer than dedup_tol · max(1, |x|) are merged.
    double dedup_tol = 1e-8;
    double residual_bound = kSolutionResidualBound;
    /// |q| below this at a fixed point, or at a touching extremum, marks a tangency.
    double tangency_tol = 1e-9;
    /// Chart scan starts at 1 + lower_margin.
    double lower_margin = 1e-6;
};

struct ReducedReport {
    InvariantSet set;
    ModelParams params;
    SolveMethod method;
    std::vector<Solution> solutions;
    /// Candidate roots (translation-invariant point included) before verification.
    int candidates = 0;
    /// Candidates that failed chart or full-system verification.
    int rejected = 0;
};

/// Closed-form elimination polynomial for (s, k, i), if there is one.
inline const LambdaPolynomial* exact_family(InvariantSet s, int k, int i)
{
    if (i != 1) return nullptr;
    if (s == InvariantSet::I2 && k == 2) return &h_family();
    if (s == InvariantSet::I2 && k == 3) return &f16_family();
    if (s == InvariantSet::I4 && k == 2) return &h1_family();
    if (s == InvariantSet::I4 && k == 3) return &h2_family();
    return nullptr;
}

/// Method used by solve_reduced, or UnsupportedParameter naming the gap.
inline SolveMethod reduced_method(InvariantSet s, int k, int i)
{
    if (k < 1 || i < 1 || i > k) {
        throw UnsupportedParameter("need k >= 1 and 1 <= i <= k");
    }
    switch (s) {
    case InvariantSet::I1: return SolveMethod::NumericScalar;
    case InvariantSet::I2:
        if (exact_family(s, k, i)) return SolveMethod::ExactSturm;
        return k == 1 ? SolveMethod::NumericScalar : SolveMethod::NumericQ;
    case InvariantSet::I3:
        if (i != 1) {
            throw UnsupportedParameter("I3 reduction is only derived for i = 1 (got i = " + std::to_string(i) + ")");
        }
        return SolveMethod::NumericQ;
    case InvariantSet::I4:
        if (i != 1) {
            throw UnsupportedParameter("I4 reduction is only derived for i = 1 (got i = " + std::to_string(i) + ")");
        }
        return exact_family(s, k, i) ? SolveMethod::ExactSturm : SolveMethod::NumericQ;
    }
    throw UnsupportedParameter("unknown invariant set");
}

inline std::optional<InvariantSet> smallest_invariant_set(const ZVector4& z, double tol = kClassifyTolerance)
{
    for (InvariantSet s : {InvariantSet::I1, InvariantSet::I2, InvariantSet::I3, InvariantSet::I4}) {
        if (invariant_membership(z, s, tol)) return s;
    }
    return std::nullopt;
}

/// Back-substitutes and verifies a reduced state; nothing if it fails.
inline std::optional<Solution> make_solution(const ZVector4& z4, const ModelParams& p, SolveMethod method,
                                             std::optional<XYPair> chart, double residual_bound)
{
    if (!z4.admissible()) return std::nullopt;
    Solution s;
    s.z4 = z4;
    s.z8 = back_substitute(z4, p);
    if (!s.z8.admissible()) return std::nullopt;
    s.residual = max_abs(full_residual(s.z8, p));
    if (!(s.residual < residual_bound)) return std::nullopt;
    s.chart = chart;
    s.cls = classify(s.z8);
    s.set = smallest_invariant_set(z4);
    s.method = method;
    return s;
}

namespace detail {

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

inline bool close(const ZVector4& a, const ZVector4& b, double tol)
{
    const auto u = a.values();
    const auto v = b.values();
    for (std::size_t j = 0; j < 4; ++j) {
        if (!close(u[j], v[j], tol)) return false;
    }
    return true;
}

inline void push_unique(std::vector<double>& xs, double x, double tol)
{
    for (double v : xs) {
        if (close(v, x, tol)) return;
    }
    xs.push_back(x);
}

/// Adds s unless an equal solution exists; a tangency flag is merged in.
inline void push_unique(std::vector<Solution>& out, Solution s, double tol)
{
    for (Solution& t : out) {
        if (close(t.z4, s.z4, tol)) {
            t.tangency = t.tangency || s.tangency;
            return;
        }
    }
    out.push_back(std::move(s));
}

inline void sort_solutions(std::vector<Solution>& v)
{
    std::stable_sort(v.begin(), v.end(), [](const Solution& a, const Solution& b) {
        const bool ta = a.cls == SolutionClass::TranslationInvariant;
        const bool tb = b.cls == SolutionClass::TranslationInvariant;
        if (ta != tb) return ta;
        return a.z4.values() < b.z4.values();
    });
}

/// Uniform grid over [lo, hi] merged with extra nodes.
inline std::vector<double> grid_nodes(double lo, double hi, int cells, std::span<const double> extra)
{
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(cells) + 1 + extra.size());
    for (int j = 0; j <= cells; ++j) {
        xs.push_back(j == cells ? hi : lo + (hi - lo) * j / cells);
    }
    for (double e : extra) {
        if (e > lo && e < hi) xs.push_back(e);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

/// Sign-change roots of fn over the nodes; refine(a, b) maps a bracket to a root.
template <class Fn, class Refine>
std::vector<double> sign_change_roots(const std::vector<double>& xs, Fn&& fn, Refine&& refine, double tol)
{
    std::vector<double> vals(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) vals[j] = fn(xs[j]);
    std::vector<double> roots;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (!std::isfinite(vals[j])) continue;
        if (vals[j] == 0.0) {
            push_unique(roots, xs[j], tol);
            continue;
        }
        if (j + 1 < xs.size() && std::isfinite(vals[j + 1]) && vals[j + 1] != 0.0 &&
            (vals[j] < 0.0) != (vals[j + 1] < 0.0)) {
            if (auto r = refine(xs[j], xs[j + 1], vals[j], vals[j + 1])) push_unique(roots, *r, tol);
        }
    }
    return roots;
}

/// Repeats `scan(cells)` with doubled resolution until the root count is
/// unchanged twice in a row.
template <class Scan>
auto stable_scan(Scan&& scan, int cells, int max_cells)
{
    auto best = scan(cells);
    int stable = 0;
    while (stable < 2 && cells < max_cells) {
        cells *= 2;
        auto finer = scan(cells);
        stable = (finer.size() == best.size()) ? stable + 1 : 0;
        best = std::move(finer);
    }
    return best;
}

inline std::optional<double> bracket_root(auto&& fn, double a, double b, double fa, double fb)
{
    try {
        return toms748_root(fn, a, b, fa, fb);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

/// Scalar equation z = W(z, z, z, z)_1 in the chart x = 1 + λz.
inline std::vector<double> scalar_chart_roots(const ModelParams& p, const SolveOptions& opt)
{
    const double lambda = p.lambda();
    auto fn = [&](double x) {
        const double a = (x - 1.0) / lambda;
        return a - reduced_block(a, a, p) * tail_factor(a, p);
    };
    const double x_ti = ti_chart_root(p);
    const double lo = 1.0 + opt.lower_margin;
    const double hi = 1.0 + lambda;
    const std::vector<double> extra{x_ti};
    return stable_scan(
        [&](int cells) {
            const auto xs = grid_nodes(lo, hi, cells, extra);
            return sign_change_roots(
                xs, fn, [&](double a, double b, double fa, double fb) { return bracket_root(fn, a, b, fa, fb); },
                opt.dedup_tol);
        },
        opt.scan_cells, opt.max_scan_cells);
}

struct ChartScanResult {
    std::vector<double> fixed_points;
    std::vector<double> cycle_points;
    std::vector<double> tangent_cycle_points;
    /// Fixed points where q vanishes (pair of two-cycles merging into it).
    std::vector<double> tangent_fixed_points;

    std::size_t size() const { return fixed_points.size() + cycle_points.size() + tangent_cycle_points.size(); }
};

inline ChartScanResult scan_chart_once(const ChartMap& f, int cells, const SolveOptions& opt)
{
    const ModelParams& p = f.params();
    const double lo = 1.0 + opt.lower_margin;
    const double hi = f.upper();
    const double x_ti = ti_chart_root(p);
    ChartScanResult out;

    // Fixed points of f.
    auto fixed_fn = [&](double x) {
        const auto y = f(x);
        return y ? x - *y : std::numeric_limits<double>::quiet_NaN();
    };
    {
        const std::vector<double> extra{x_ti};
        const auto xs = grid_nodes(lo, hi, cells, extra);
        out.fixed_points = sign_change_roots(
            xs, fixed_fn,
            [&](double a, double b, double fa, double fb) { return bracket_root(fixed_fn, a, b, fa, fb); },
            opt.dedup_tol);
        push_unique(out.fixed_points, x_ti, opt.dedup_tol);
        std::sort(out.fixed_points.begin(), out.fixed_points.end());
    }

    // Two-cycle points: sign changes of q where both x and f(x) are admissible.
    auto q_fn = [&](double x) {
        if (!f.admissible(x)) return std::numeric_limits<double>::quiet_NaN();
        return quotient_q(x, f, opt.quotient);
    };
    auto g_fn = [&](double x) { return two_cycle_residual(f, x); };
    auto is_fixed = [&](double x) {
        return std::any_of(out.fixed_points.begin(), out.fixed_points.end(), [&](double v) { return v == x; });
    };
    const auto xs = grid_nodes(lo, hi, cells, out.fixed_points);
    auto refine = [&](double a, double b, double qa, double qb) -> std::optional<double> {
        std::optional<double> r;
        if (!is_fixed(a) && !is_fixed(b)) {
            const double ga = g_fn(a);
            const double gb = g_fn(b);
            if (std::isfinite(ga) && std::isfinite(gb) && ga != 0.0 && gb != 0.0 && (ga < 0.0) != (gb < 0.0)) {
                r = bracket_root(g_fn, a, b, ga, gb);
            }
        }
        if (!r) r = bracket_root(q_fn, a, b, qa, qb);
        if (!r) return std::nullopt;
        const double g = g_fn(*r);
        // A sign change across a pole is not a root.
        if (!std::isfinite(g) || std::abs(g) > 1e-8 * std::max(1.0, *r)) return std::nullopt;
        for (double fp : out.fixed_points) {
            if (close(fp, *r, opt.dedup_tol)) return std::nullopt;
        }
        return r;
    };
    out.cycle_points = sign_change_roots(xs, q_fn, refine, opt.dedup_tol);

    // Touching zeros: fixed points with q = 0, and interior extrema of q near 0.
    std::vector<double> qs(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) qs[j] = q_fn(xs[j]);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (is_fixed(xs[j]) && std::isfinite(qs[j]) && std::abs(qs[j]) <= opt.tangency_tol) {
            out.tangent_fixed_points.push_back(xs[j]);
        }
    }
    for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
        const double a = qs[j - 1], m = qs[j], b = qs[j + 1];
        if (!std::isfinite(a) || !std::isfinite(m) || !std::isfinite(b)) continue;
        if ((a < 0) != (m < 0) || (b < 0) != (m < 0) || m == 0.0) continue;
        if (std::abs(m) > std::abs(a) || std::abs(m) > std::abs(b) || std::abs(m) > 1e-4) continue;
        if (is_fixed(xs[j - 1]) || is_fixed(xs[j]) || is_fixed(xs[j + 1])) continue;
        const auto [xm, qm] = boost::math::tools::brent_find_minima(
            [&](double x) {
                const double v = q_fn(x);
                return std::isfinite(v) ? std::abs(v) : std::numeric_limits<double>::max();
            },
            xs[j - 1], xs[j + 1], 50);
        if (qm <= opt.tangency_tol) {
            bool near_fixed = false;
            for (double fp : out.fixed_points) near_fixed = near_fixed || close(fp, xm, 1e-6);
            if (!near_fixed) push_unique(out.tangent_cycle_points, xm, opt.dedup_tol);
        }
    }
    return out;
}

inline ChartScanResult scan_chart(const ChartMap& f, const SolveOptions& opt)
{
    return stable_scan([&](int cells) { return scan_chart_once(f, cells, opt); }, opt.scan_cells,
                       opt.max_scan_cells);
}

inline void add_chart_solution(std::vector<Solution>& out, const ChartMap& f, double x, double y, SolveMethod method,
                               bool tangency, const SolveOptions& opt, int& rejected)
{
    auto s = make_solution(f.reduced_state(x, y), f.params(), method, XYPair{x, y}, opt.residual_bound);
    if (!s) {
        ++rejected;
        return;
    }
    s->tangency = tangency;
    push_unique(out, std::move(*s), opt.dedup_tol);
}

/// Adds (y, x) for every reported (x, y).
inline void complete_swapped_pairs(std::vector<Solution>& out, const ChartMap& f, const SolveOptions& opt)
{
    const std::size_t n = out.size();
    int ignored = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!out[j].chart) continue;
        const XYPair c = *out[j].chart;
        if (c.x == c.y) continue;
        add_chart_solution(out, f, c.y, c.x, out[j].method, out[j].tangency, opt, ignored);
    }
}

inline ReducedReport solve_numeric_q(InvariantSet s, const ModelParams& p, const SolveOptions& opt)
{
    ReducedReport rep{s, p, SolveMethod::NumericQ, {}, 0, 0};
    const ChartMap f(s, p);
    const auto scan = scan_chart(f, opt);
    rep.candidates = static_cast<int>(scan.size());
    for (double x : scan.fixed_points) {
        const bool tangent = std::any_of(scan.tangent_fixed_points.begin(), scan.tangent_fixed_points.end(),
                                         [&](double t) { return t == x; });
        add_chart_solution(rep.solutions, f, x, x, rep.method, tangent, opt, rep.rejected);
    }
    for (double x : scan.cycle_points) {
        if (auto y = f(x)) add_chart_solution(rep.solutions, f, x, *y, rep.method, false, opt, rep.rejected);
    }
    for (double x : scan.tangent_cycle_points) {
        if (auto y = f(x)) add_chart_solution(rep.solutions, f, x, *y, rep.method, true, opt, rep.rejected);
    }
    complete_swapped_pairs(rep.solutions, f, opt);
    sort_solutions(rep.solutions);
    return rep;
}

inline ReducedReport solve_numeric_scalar(InvariantSet s, const ModelParams& p, const SolveOptions& opt)
{
    ReducedReport rep{s, p, SolveMethod::NumericScalar, {}, 0, 0};
    const auto roots = scalar_chart_roots(p, opt);
    const double lambda = p.lambda();
    auto add = [&](double x, double y) {
        const double a = (x - 1.0) / lambda;
        const double b = (y - 1.0) / lambda;
        // I1 pairs are diagonal; I2 with k = 1 decouples into independent roots.
        const ZVector4 z = (s == InvariantSet::I1) ? ZVector4::filled(a) : ZVector4{a, b, a, b};
        auto sol = make_solution(z, p, rep.method, XYPair{x, y}, opt.residual_bound);
        if (sol) {
            push_unique(rep.solutions, std::move(*sol), opt.dedup_tol);
        } else {
            ++rep.rejected;
        }
    };
    if (s == InvariantSet::I1) {
        rep.candidates = static_cast<int>(roots.size());
        for (double x : roots) add(x, x);
    } else {
        rep.candidates = static_cast<int>(roots.size() * roots.size());
        for (double x : roots) {
            for (double y : roots) add(x, y);
        }
    }
    sort_solutions(rep.solutions);
    return rep;
}

/// Family polynomial at λ with every translation-invariant root removed.
struct ExactSetup {
    Polynomial<Rational> family;
    Polynomial<Rational> ti;
    Polynomial<Rational> reduced;
    Rational upper;
};

inline ExactSetup exact_setup(const LambdaPolynomial& fam, const ModelParams& p)
{
    const Rational lambda(p.lambda());
    ExactSetup e;
    e.family = fam.at(lambda);
    e.ti = ti_poly<Rational>(p.k(), lambda);
    e.reduced = remove_common_roots(e.family, e.ti);
    // Chart solutions satisfy x <= 1 + λ; one unit of margin.
    e.upper = Rational(2) + lambda;
    return e;
}

/// The translation-invariant root is a root of the family beyond its
/// identically present factor: the pair merges into it.
inline bool ti_is_tangency(const LambdaPolynomial& fam, const ExactSetup& e)
{
    auto rest = e.family;
    for (int j = 0; j < fam.ti_multiplicity; ++j) {
        rest = divmod(rest, e.ti).first;
    }
    return gcd(rest, e.ti).degree() >= 1;
}

inline ReducedReport solve_exact(InvariantSet s, const ModelParams& p, const SolveOptions& opt)
{
    ReducedReport rep{s, p, SolveMethod::ExactSturm, {}, 0, 0};
    const LambdaPolynomial& fam = *exact_family(s, p.k(), p.i());
    const ExactSetup e = exact_setup(fam, p);
    const ChartMap f(s, p);

    const auto ti_brackets = isolate_roots(e.ti, Rational(1), e.upper);
    const auto brackets = e.reduced.degree() >= 1 ? isolate_roots(e.reduced, Rational(1), e.upper)
                                                  : std::vector<RootBracket<Rational>>{};
    rep.candidates = static_cast<int>(ti_brackets.size() + brackets.size());

    const bool tangent = ti_is_tangency(fam, e);
    for (const auto& b : ti_brackets) {
        const double x = refine_root(e.ti, b);
        add_chart_solution(rep.solutions, f, x, x, rep.method, tangent, opt, rep.rejected);
    }
    for (const auto& b : brackets) {
        const double x = refine_root(e.reduced, b);
        const auto y = f(x);
        const double g = two_cycle_residual(f, x);
        if (!y || !std::isfinite(g) || std::abs(g) > 1e-8 * std::max(1.0, x)) {
            ++rep.rejected;
            continue;
        }
        add_chart_solution(rep.solutions, f, x, *y, rep.method, b.tangency(), opt, rep.rejected);
    }
    complete_swapped_pairs(rep.solutions, f, opt);
    sort_solutions(rep.solutions);
    return rep;
}

}  // namespace detail

inline ReducedReport solve_reduced_report(InvariantSet s, const ModelParams& p, const SolveOptions& opt = {})
{
    switch (reduced_method(s, p.k(), p.i())) {
    case SolveMethod::ExactSturm: return detail::solve_exact(s, p, opt);
    case SolveMethod::NumericQ: return detail::solve_numeric_q(s, p, opt);
    case SolveMethod::NumericScalar: return detail::solve_numeric_scalar(s, p, opt);
    case SolveMethod::Multistart: break;
    }
    throw UnsupportedParameter("no reduced solver");
}

/// All solutions of the reduced system on s, verified in the full system.
inline std::vector<Solution> solve_reduced(InvariantSet s, const ModelParams& p, const SolveOptions& opt = {})
{
    return solve_reduced_report(s, p, opt).solutions;
}

/// Exact number of candidate roots: the translation-invariant root plus the
/// distinct roots in (1, 2 + λ] of the family with that root removed.
/// Spurious roots of the elimination are counted.
inline int exact_candidate_count(InvariantSet s, const ModelParams& p)
{
    const LambdaPolynomial* fam = exact_family(s, p.k(), p.i());
    if (!fam) {
        throw UnsupportedParameter("no closed-form polynomial for this (set, k, i)");
    }
    const auto e = detail::exact_setup(*fam, p);
    const int extra = e.reduced.degree() >= 1 ? SturmSequence(e.reduced).count(Rational(1), e.upper) : 0;
    return 1 + extra;
}

// ---------------------------------------------------------------------------
// Multistart on the full reduced map.

struct MultistartOptions {
    int newton_iters = 60;
    int picard_iters = 400;
    double damping = 0.5;
    /// Accept when max |z − W(z)| is below this.
    double accept_tol = 1e-10;
    double dedup_tol = 1e-8;
};

struct MultistartReport {
    std::vector<Solution> solutions;
    int starts = 0;
    int non_convergent = 0;
};

namespace detail {

inline double radical_inverse(std::uint64_t n, std::uint64_t base)
{
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (n > 0) {
        r += f * static_cast<double>(n % base);
        n /= base;
        f *= inv;
    }
    return r;
}

/// Halton points in (0, 1]^4 with a seeded Cranley-Patterson shift.
inline std::vector<ZVector4> low_discrepancy_starts(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::array<double, 4> shift{};
    for (double& s : shift) s = unit(rng);
    constexpr std::array<std::uint64_t, 4> bases{2, 3, 5, 7};
    std::vector<ZVector4> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        std::array<double, 4> u{};
        for (std::size_t d = 0; d < 4; ++d) {
            double v = radical_inverse(static_cast<std::uint64_t>(j), bases[d]) + shift[d];
            v -= std::floor(v);
            u[d] = 1e-3 + (1.0 - 1e-3) * v;
        }
        out.push_back(ZVector4::from_array(u));
    }
    return out;
}

inline Eigen::Vector4d fixed_point_defect(const Eigen::Vector4d& z, const ModelParams& p)
{
    const auto w = apply_W(ZVector4{z[0], z[1], z[2], z[3]}, p);
    return z - Eigen::Vector4d(w.z1, w.z2, w.z7, w.z8);
}

inline bool positive(const Eigen::Vector4d& z) { return (z.array() > 0.0).all(); }

/// Newton on z − W(z) with a centered finite-difference Jacobian and
/// step halving that keeps z positive and the defect decreasing.
inline bool newton_polish(Eigen::Vector4d& z, const ModelParams& p, int iters, double tol)
{
    Eigen::Vector4d F = fixed_point_defect(z, p);
    for (int it = 0; it < iters; ++it) {
        if (F.lpNorm<Eigen::Infinity>() < tol * 1e-3) return true;
        Eigen::Matrix4d J;
        for (int c = 0; c < 4; ++c) {
            const double h = 1e-6 * std::max(z[c], 1e-6);
            Eigen::Vector4d zp = z, zm = z;
            zp[c] += h;
            zm[c] -= h;
            J.col(c) = (fixed_point_defect(zp, p) - fixed_point_defect(zm, p)) / (2.0 * h);
        }
        const auto lu = J.fullPivLu();
        if (!lu.isInvertible()) break;
        const Eigen::Vector4d step = lu.solve(F);
        double t = 1.0;
        bool improved = false;
        for (int half = 0; half < 40; ++half, t *= 0.5) {
            const Eigen::Vector4d trial = z - t * step;
            if (!positive(trial)) continue;
            const Eigen::Vector4d Ft = fixed_point_defect(trial, p);
            if (Ft.lpNorm<Eigen::Infinity>() < F.lpNorm<Eigen::Infinity>()) {
                z = trial;
                F = Ft;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return F.lpNorm<Eigen::Infinity>() < tol;
}

/// Plain iteration z <- z + α(W(z) − z); α drops to `damping` once the
/// defect grows (oscillation).
inline void picard(Eigen::Vector4d& z, const ModelParams& p, int iters, double damping)
{
    double alpha = 1.0;
    double last = fixed_point_defect(z, p).lpNorm<Eigen::Infinity>();
    for (int it = 0; it < iters; ++it) {
        const Eigen::Vector4d F = fixed_point_defect(z, p);
        Eigen::Vector4d trial = z - alpha * F;
        for (double shrink = 0.5; !positive(trial) && shrink > 1e-6; shrink *= 0.5) {
            trial = z - shrink * alpha * F;
        }
        if (!positive(trial)) break;
        z = trial;
        const double now = fixed_point_defect(z, p).lpNorm<Eigen::Infinity>();
        if (now > last) alpha = damping;
        last = now;
        if (now < 1e-14) break;
    }
}

}  // namespace detail

/// Every distinct fixed point of W reached from n_starts low-discrepancy starts.
inline MultistartReport solve_full_multistart(const ModelParams& p, int n_starts, std::uint64_t seed = 0,
                                              const MultistartOptions& opt = {})
{
    if (n_starts < 1) {
        throw std::domain_error("n_starts must be >= 1");
    }
    MultistartReport rep;
    rep.starts = n_starts;
    for (const ZVector4& start : detail::low_discrepancy_starts(n_starts, seed)) {
        Eigen::Vector4d z(start.z1, start.z2, start.z7, start.z8);
        bool ok = false;
        try {
            ok = detail::newton_polish(z, p, opt.newton_iters, opt.accept_tol);
            if (!ok) {
                z = Eigen::Vector4d(start.z1, start.z2, start.z7, start.z8);
                detail::picard(z, p, opt.picard_iters, opt.damping);
                ok = detail::newton_polish(z, p, opt.newton_iters, opt.accept_tol);
            }
        } catch (const std::domain_error&) {
            ok = false;
        }
        if (!ok) {
            ++rep.non_convergent;
            continue;
        }
        const ZVector4 zr{z[0], z[1], z[2], z[3]};
        auto s = make_solution(zr, p, SolveMethod::Multistart, std::nullopt, kSolutionResidualBound);
        if (!s) {
            ++rep.non_convergent;
            continue;
        }
        detail::push_unique(rep.solutions, std::move(*s), opt.dedup_tol);
    }
    detail::sort_solutions(rep.solutions);
    return rep;
}

// ---------------------------------------------------------------------------
// λ-scans and transitions.

struct ScanRow {
    double lambda = 0;
    int count = 0;
    std::vector<Solution> solutions;
    std::optional<std::string> error;
};

enum class GridKind { Linear, Geometric };

/// steps + 1 values from lo to hi; a single value when lo == hi.
inline std::vector<double> lambda_grid(double lo, double hi, int steps, GridKind kind = GridKind::Linear)
{
    if (!(lo > 0.0) || hi < lo) {
        throw std::domain_error("lambda grid needs 0 < lo <= hi");
    }
    if (lo == hi) return {lo};
    if (steps < 1) {
        throw std::domain_error("lambda grid needs steps >= 1");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        const double t = static_cast<double>(j) / steps;
        if (j == steps) {
            out.push_back(hi);
        } else if (kind == GridKind::Linear) {
            out.push_back(lo + (hi - lo) * t);
        } else {
            out.push_back(lo * std::pow(hi / lo, t));
        }
    }
    return out;
}

/// Rows are independent; up to `jobs` run concurrently, output keeps grid order.
inline std::vector<ScanRow> lambda_scan(InvariantSet s, int k, int i, std::span<const double> grid, int jobs = 1,
                                        const SolveOptions& opt = {})
{
    reduced_method(s, k, i);
    std::vector<ScanRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < rows.size(); j = next++) {
            ScanRow& row = rows[j];
            row.lambda = grid[j];
            try {
                row.solutions = solve_reduced(s, ModelParams(k, i, grid[j]), opt);
                row.count = static_cast<int>(row.solutions.size());
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(rows.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    return rows;
}

inline std::vector<ScanRow> lambda_scan(InvariantSet s, int k, int i, double lo, double hi, int steps,
                                        GridKind kind = GridKind::Linear, int jobs = 1,
                                        const SolveOptions& opt = {})
{
    const auto grid = lambda_grid(lo, hi, steps, kind);
    return lambda_scan(s, k, i, grid, jobs, opt);
}

enum class CriticalMethod { ExactSturm, NumericTangency };

inline std::string_view to_string(CriticalMethod m)
{
    return m == CriticalMethod::ExactSturm ? "exact-sturm" : "numeric-tangency";
}

struct CriticalResult {
    double lambda_cr = 0;
    double lo = 0;
    double hi = 0;
    /// Verified solution counts at the two ends of the requested bracket.
    int count_below = 0;
    int count_above = 0;
    CriticalMethod method = CriticalMethod::NumericTangency;
    /// Exact path only: Sturm candidate counts (spurious elimination roots included).
    std::optional<int> candidates_below;
    std::optional<int> candidates_above;
    int iterations = 0;
};

/// Bisection in λ on the solution count: the exact Sturm candidate count where
/// a closed-form polynomial exists, otherwise the count of the q-scan.
inline CriticalResult find_critical_lambda(InvariantSet s, int k, int i, double lo, double hi, double tol,
                                           const SolveOptions& opt = {})
{
    if (!(lo > 0.0) || !(lo < hi) || !(tol > 0.0)) {
        throw std::domain_error("find_critical_lambda needs 0 < lo < hi and tol > 0");
    }
    reduced_method(s, k, i);
    CriticalResult res;
    res.count_below = static_cast<int>(solve_reduced(s, ModelParams(k, i, lo), opt).size());
    res.count_above = static_cast<int>(solve_reduced(s, ModelParams(k, i, hi), opt).size());

    const bool exact = exact_family(s, k, i) != nullptr;
    res.method = exact ? CriticalMethod::ExactSturm : CriticalMethod::NumericTangency;
    auto count = [&](double lambda) {
        const ModelParams p(k, i, lambda);
        return exact ? exact_candidate_count(s, p) : static_cast<int>(solve_reduced(s, p, opt).size());
    };
    const int c_lo = exact ? count(lo) : res.count_below;
    const int c_hi = exact ? count(hi) : res.count_above;
    if (exact) {
        res.candidates_below = c_lo;
        res.candidates_above = c_hi;
    }
    if (c_lo == c_hi) {
        throw NoTransition("solution count is " + std::to_string(c_lo) + " at both ends of [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
    }
    double a = lo;
    double b = hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if (count(mid) == c_lo) {
            a = mid;
        } else {
            b = mid;
        }
        ++res.iterations;
    }
    res.lo = a;
    res.hi = b;
    res.lambda_cr = 0.5 * (a + b);
    return res;
}

}  // namespace hcwp
