#pragma once

// Dense univariate polynomials over double or exact rationals, with
// Descartes and Sturm root counting, root isolation, bracketed
// bisection-Newton refinement and Cardano's formula for cubics.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hcwp {

using Rational = mpq_class;

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }
inline int sign_of(const Rational& v) { return sgn(v); }

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }

inline double abs_value(double v) { return std::abs(v); }
inline Rational abs_value(const Rational& v) { return abs(v); }

}  // namespace detail

/// Coefficients are stored from the constant term up; trailing zeros are
/// trimmed, so the zero polynomial has no coefficients and degree -1.
template <class T>
class Polynomial {
public:
    using value_type = T;

    Polynomial() = default;
    explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

    static Polynomial monomial(T coeff, int power)
    {
        std::vector<T> c(static_cast<std::size_t>(power) + 1, T(0));
        c.back() = std::move(coeff);
        return Polynomial(std::move(c));
    }

    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    const std::vector<T>& coefficients() const noexcept { return c_; }

    T coefficient(int j) const
    {
        if (j < 0 || j > degree()) {
            return T(0);
        }
        return c_[static_cast<std::size_t>(j)];
    }

    const T& leading() const
    {
        if (c_.empty()) {
            throw std::domain_error("zero polynomial has no leading coefficient");
        }
        return c_.back();
    }

    /// Horner evaluation.
    T operator()(const T& x) const
    {
        T acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }

    Polynomial derivative() const
    {
        if (c_.size() <= 1) {
            return {};
        }
        std::vector<T> d(c_.size() - 1);
        for (std::size_t j = 1; j < c_.size(); ++j) {
            d[j - 1] = c_[j] * T(static_cast<long>(j));
        }
        return Polynomial(std::move(d));
    }

    Polynomial<double> to_double() const
    {
        std::vector<double> d;
        d.reserve(c_.size());
        for (const T& c : c_) {
            d.push_back(detail::to_double(c));
        }
        return Polynomial<double>(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t j = 0; j < a.c_.size(); ++j) c[j] += a.c_[j];
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[j] += b.c_[j];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t j = 0; j < a.c_.size(); ++j) c[j] += a.c_[j];
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[j] -= b.c_[j];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t j = 0; j < a.c_.size(); ++j) {
            for (std::size_t l = 0; l < b.c_.size(); ++l) {
                c[j + l] += a.c_[j] * b.c_[l];
            }
        }
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const T& s, const Polynomial& p)
    {
        std::vector<T> c(p.c_);
        for (T& v : c) v *= s;
        return Polynomial(std::move(c));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    void trim()
    {
        while (!c_.empty() && detail::sign_of(c_.back()) == 0) {
            c_.pop_back();
        }
    }

    std::vector<T> c_;
};

template <class T>
T eval(const Polynomial<T>& p, const T& x)
{
    return p(x);
}

/// Evaluates with coefficients rounded to double.
inline double eval_double(const Polynomial<Rational>& p, double x)
{
    double acc = 0.0;
    const auto& c = p.coefficients();
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * x + it->get_d();
    }
    return acc;
}

/// Quotient and remainder over a field.
template <class T>
std::pair<Polynomial<T>, Polynomial<T>> divmod(const Polynomial<T>& a, const Polynomial<T>& b)
{
    if (b.is_zero()) {
        throw std::domain_error("polynomial division by zero");
    }
    std::vector<T> rem = a.coefficients();
    const int db = b.degree();
    if (a.degree() < db) {
        return {Polynomial<T>{}, a};
    }
    std::vector<T> quot(static_cast<std::size_t>(a.degree() - db) + 1, T(0));
    const T& lb = b.leading();
    for (int j = a.degree(); j >= db; --j) {
        T factor = rem[static_cast<std::size_t>(j)] / lb;
        if (detail::sign_of(factor) == 0) {
            continue;
        }
        for (int l = 0; l <= db; ++l) {
            rem[static_cast<std::size_t>(j - db + l)] -= factor * b.coefficient(l);
        }
        quot[static_cast<std::size_t>(j - db)] = factor;
    }
    rem.resize(static_cast<std::size_t>(db));
    return {Polynomial<T>(std::move(quot)), Polynomial<T>(std::move(rem))};
}

/// Monic greatest common divisor. gcd(0, 0) is 0.
inline Polynomial<Rational> gcd(Polynomial<Rational> a, Polynomial<Rational> b)
{
    while (!b.is_zero()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) {
        return a;
    }
    return Rational(1) / a.leading() * a;
}

/// p / gcd(p, p'), normalized to a monic polynomial.
inline Polynomial<Rational> squarefree_part(const Polynomial<Rational>& p)
{
    if (p.is_zero()) {
        throw std::domain_error("squarefree part of the zero polynomial");
    }
    if (p.degree() == 0) {
        return Polynomial<Rational>{Rational(1)};
    }
    const auto g = gcd(p, p.derivative());
    auto q = divmod(p, g).first;
    return Rational(1) / q.leading() * q;
}

/// Removes from p every root it shares with `factor` (with full multiplicity).
inline Polynomial<Rational> remove_common_roots(Polynomial<Rational> p, const Polynomial<Rational>& factor)
{
    for (;;) {
        const auto g = gcd(p, factor);
        if (g.degree() <= 0) {
            return p;
        }
        p = divmod(p, g).first;
    }
}

/// Number of sign changes of the coefficient sequence (zeros skipped).
/// Bounds the number of positive roots and agrees with it mod 2.
template <class T>
int descartes_count(const Polynomial<T>& p)
{
    if (p.is_zero()) {
        throw std::domain_error("Descartes count of the zero polynomial");
    }
    int changes = 0;
    int last = 0;
    for (const T& c : p.coefficients()) {
        const int s = detail::sign_of(c);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Cauchy bound: every root has modulus below 1 + max|a_j / a_n|.
template <class T>
double cauchy_bound(const Polynomial<T>& p)
{
    if (p.degree() < 1) {
        return 1.0;
    }
    const double lead = std::abs(detail::to_double(p.leading()));
    double m = 0.0;
    for (int j = 0; j < p.degree(); ++j) {
        m = std::max(m, std::abs(detail::to_double(p.coefficient(j))) / lead);
    }
    return 1.0 + m;
}

/// Sturm sequence of the squarefree part of a rational polynomial.
class SturmSequence {
public:
    explicit SturmSequence(const Polynomial<Rational>& p)
    {
        if (p.is_zero()) {
            throw std::domain_error("Sturm sequence of the zero polynomial");
        }
        chain_.push_back(squarefree_part(p));
        if (chain_.front().degree() == 0) {
            return;
        }
        chain_.push_back(chain_.front().derivative());
        while (chain_.back().degree() > 0) {
            auto r = divmod(chain_[chain_.size() - 2], chain_.back()).second;
            if (r.is_zero()) {
                break;
            }
            // Scaling by a positive constant keeps every sign intact.
            const Rational scale = Rational(-1) / abs(r.leading());
            chain_.push_back(scale * r);
        }
    }

    const std::vector<Polynomial<Rational>>& chain() const noexcept { return chain_; }
    const Polynomial<Rational>& squarefree() const noexcept { return chain_.front(); }

    /// Sign variations at x. With `right_limit`, a root of the first member is
    /// replaced by its sign just to the right of x.
    int variations(const Rational& x, bool right_limit = false) const
    {
        std::vector<int> signs;
        signs.reserve(chain_.size());
        for (std::size_t j = 0; j < chain_.size(); ++j) {
            int s = sgn(chain_[j](x));
            if (j == 0 && s == 0 && right_limit && chain_.size() > 1) {
                s = sgn(chain_[1](x));
            }
            signs.push_back(s);
        }
        return count_changes(signs);
    }

    int variations_at_infinity(bool positive) const
    {
        std::vector<int> signs;
        signs.reserve(chain_.size());
        for (const auto& q : chain_) {
            int s = sgn(q.leading());
            if (!positive && q.degree() % 2 == 1) s = -s;
            signs.push_back(s);
        }
        return count_changes(signs);
    }

    /// Distinct real roots in (lo, hi].
    int count(const Rational& lo, const Rational& hi) const
    {
        if (!(lo < hi)) {
            throw std::domain_error("Sturm count needs lo < hi");
        }
        return variations(lo, true) - variations(hi);
    }

    /// Distinct real roots in (lo, +inf).
    int count_above(const Rational& lo) const { return variations(lo, true) - variations_at_infinity(true); }

private:
    static int count_changes(const std::vector<int>& signs)
    {
        int changes = 0;
        int last = 0;
        for (int s : signs) {
            if (s == 0) continue;
            if (last != 0 && s != last) ++changes;
            last = s;
        }
        return changes;
    }

    std::vector<Polynomial<Rational>> chain_;
};

/// Distinct real roots of p in (lo, hi].
inline int sturm_count(const Polynomial<Rational>& p, const Rational& lo, const Rational& hi)
{
    return SturmSequence(p).count(lo, hi);
}

/// An interval (lo, hi] holding exactly one distinct root. On the exact path
/// `multiplicity` is certified; the float path leaves it at 1.
template <class T>
struct RootBracket {
    T lo;
    T hi;
    int multiplicity = 1;

    bool tangency() const noexcept { return multiplicity % 2 == 0; }
};

namespace detail {

inline int multiplicity_in(const Polynomial<Rational>& p, const Rational& lo, const Rational& hi)
{
    int m = 1;
    auto g = gcd(p, p.derivative());
    while (g.degree() >= 1 && SturmSequence(g).count(lo, hi) > 0) {
        ++m;
        g = gcd(g, g.derivative());
    }
    return m;
}

}  // namespace detail

/// Exact isolation by recursive Sturm bisection. Brackets come out sorted.
inline std::vector<RootBracket<Rational>> isolate_roots(const Polynomial<Rational>& p, const Rational& lo,
                                                        const Rational& hi)
{
    if (!(lo < hi)) {
        throw std::domain_error("isolate_roots needs lo < hi");
    }
    const SturmSequence sturm(p);
    std::vector<RootBracket<Rational>> out;
    struct Cell {
        Rational lo, hi;
        int count;
    };
    std::vector<Cell> stack{{lo, hi, sturm.count(lo, hi)}};
    while (!stack.empty()) {
        Cell c = std::move(stack.back());
        stack.pop_back();
        if (c.count == 0) {
            continue;
        }
        if (c.count == 1) {
            out.push_back({c.lo, c.hi, detail::multiplicity_in(p, c.lo, c.hi)});
            continue;
        }
        Rational mid = (c.lo + c.hi) / 2;
        const int left = sturm.count(c.lo, mid);
        // Right half first so that the stack pops the left half next.
        stack.push_back({mid, c.hi, c.count - left});
        stack.push_back({c.lo, mid, left});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    return out;
}

inline constexpr int kDefaultScanCells = 4096;

namespace detail {

inline std::vector<RootBracket<double>> sign_scan(const Polynomial<double>& p, double lo, double hi, int cells)
{
    std::vector<RootBracket<double>> out;
    const double h = (hi - lo) / cells;
    double prev_x = lo;
    int prev_s = sign_of(p(lo));
    bool after_zero = (prev_s == 0);
    for (int j = 1; j <= cells; ++j) {
        const double x = (j == cells) ? hi : lo + h * j;
        const int s = sign_of(p(x));
        if (s == 0) {
            out.push_back({prev_x, x, 1});
            after_zero = true;
        } else if (after_zero || prev_s == 0) {
            after_zero = false;
        } else if (s != prev_s) {
            out.push_back({prev_x, x, 1});
        }
        if (s != 0) {
            prev_s = s;
        }
        prev_x = x;
    }
    return out;
}

}  // namespace detail

/// Float isolation by a sign scan on a uniform grid, doubled until the count
/// is unchanged for two consecutive doublings. Even-multiplicity roots are
/// invisible to this path.
inline std::vector<RootBracket<double>> isolate_roots(const Polynomial<double>& p, double lo, double hi,
                                                      int cells = kDefaultScanCells)
{
    if (!(lo < hi)) {
        throw std::domain_error("isolate_roots needs lo < hi");
    }
    if (p.is_zero()) {
        return {};
    }
    auto brackets = detail::sign_scan(p, lo, hi, cells);
    int stable = 0;
    while (stable < 2 && cells < (1 << 22)) {
        cells *= 2;
        auto finer = detail::sign_scan(p, lo, hi, cells);
        stable = (finer.size() == brackets.size()) ? stable + 1 : 0;
        brackets = std::move(finer);
    }
    return brackets;
}

/// Bisection down to width 1e-3, then Newton safeguarded by bisection, until
/// the enclosing interval or the Newton step is below tol·max(1, |x|).
inline double refine_root(const Polynomial<double>& p, const RootBracket<double>& b, double tol = 1e-12)
{
    double a = b.lo;
    double c = b.hi;
    double fa = p(a);
    double fc = p(c);
    if (fa == 0.0) return a;
    if (fc == 0.0) return c;
    if (detail::sign_of(fa) == detail::sign_of(fc)) {
        throw std::invalid_argument("refine_root: bracket has no sign change");
    }
    const auto dp = p.derivative();
    auto shrink = [&](double x, double fx) {
        if (detail::sign_of(fx) == detail::sign_of(fa)) {
            a = x;
            fa = fx;
        } else {
            c = x;
        }
    };
    while (c - a > 1e-3) {
        const double m = 0.5 * (a + c);
        const double fm = p(m);
        if (fm == 0.0) return m;
        shrink(m, fm);
    }
    double x = 0.5 * (a + c);
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = p(x);
        if (fx == 0.0) return x;
        shrink(x, fx);
        const double scale = tol * std::max(1.0, std::abs(x));
        if (c - a <= scale) {
            return 0.5 * (a + c);
        }
        const double dfx = dp(x);
        double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (a + c);
        if (!(next > a && next < c)) {
            next = 0.5 * (a + c);
        }
        if (std::abs(next - x) <= scale) {
            return next;
        }
        x = next;
    }
    return x;
}

/// Exact bisection of a Sturm-certified bracket to width tol·max(1, |lo|).
inline RootBracket<Rational> refine_enclosure(const Polynomial<Rational>& p, RootBracket<Rational> b, double tol)
{
    const auto q = squarefree_part(p);
    if (sgn(q(b.hi)) == 0) {
        b.lo = b.hi;
        return b;
    }
    const int s_hi = sgn(q(b.hi));
    const Rational width = Rational(tol) * std::max(Rational(1), Rational(abs(b.lo)));
    while (b.hi - b.lo > width) {
        Rational mid = (b.lo + b.hi) / 2;
        const int s = sgn(q(mid));
        if (s == 0) {
            b.lo = mid;
            b.hi = mid;
            break;
        }
        if (s == s_hi) {
            b.hi = std::move(mid);
        } else {
            b.lo = std::move(mid);
        }
    }
    return b;
}

inline double refine_root(const Polynomial<Rational>& p, const RootBracket<Rational>& b, double tol = 1e-15)
{
    const auto e = refine_enclosure(p, b, tol);
    return Rational((e.lo + e.hi) / 2).get_d();
}

/// Real roots of a3 x^3 + a2 x^2 + a1 x + a0 (a3 != 0), ascending.
inline std::vector<double> cardano_real_roots(double a3, double a2, double a1, double a0)
{
    if (a3 == 0.0) {
        throw std::domain_error("cardano_real_roots: leading coefficient is zero");
    }
    const double b = a2 / a3;
    const double c = a1 / a3;
    const double d = a0 / a3;
    // x = t - b/3 gives t^3 + p t + q = 0.
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    std::vector<double> t;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        // Pick the cube-root argument without cancellation.
        const double u = std::cbrt(-q / 2.0 - std::copysign(sq, q));
        t.push_back(u == 0.0 ? 0.0 : u - p / (3.0 * u));
    } else if (disc == 0.0) {
        if (p == 0.0) {
            t.push_back(0.0);
        } else {
            t.push_back(3.0 * q / p);
            t.push_back(-1.5 * q / p);
        }
    } else {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int j = 0; j < 3; ++j) {
            t.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * j / 3.0));
        }
    }
    std::vector<double> roots;
    for (double tj : t) {
        double x = tj - b / 3.0;
        for (int it = 0; it < 3; ++it) {
            const double f = ((x + b) * x + c) * x + d;
            const double df = (3.0 * x + 2.0 * b) * x + c;
            if (df == 0.0) break;
            const double step = f / df;
            if (!std::isfinite(step)) break;
            x -= step;
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace hcwp
