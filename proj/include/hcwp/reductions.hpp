#pragma once

// Reduced systems on the invariant sets I2, I3, I4 in the chart x = 1 + λz,
// where each becomes a pair x = f(y), y = f(x) for a scalar chart map f.
// Also holds the closed-form elimination polynomials for the cases where
// they are known, and the quotient (x - f(f(x))) / (x - f(x)) whose roots are
// the points of genuine two-cycles.

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcwp/errors.hpp"
#include "hcwp/model.hpp"
#include "hcwp/polynomial.hpp"

namespace hcwp {

/// Chart map on I2 for k = 2, i = 1: λx² / ((x² + λ)(x − 1)).
inline double f_I2_k2(double x, double lambda)
{
    if (!(x > 1.0)) {
        throw std::domain_error("f_I2_k2: x must exceed 1 (pole at x = 1)");
    }
    return lambda * x * x / ((x * x + lambda) * (x - 1.0));
}

/// Chart map on I4 (i = 1): λx / (x^k + λ) + 1.
inline double f_I4(double x, const ModelParams& p)
{
    if (!(x > 0.0)) {
        throw std::domain_error("f_I4: x must be positive");
    }
    return p.lambda() * x / (std::pow(x, p.k()) + p.lambda()) + 1.0;
}

/// Residuals of the I3 chart system (i = 1):
///   x^k − x^(k−1) − λy^k/(y^k + λ),   y^k − y^(k−1) − λx^k/(x^k + λ).
inline std::pair<double, double> residual_I3(double x, double y, const ModelParams& p)
{
    if (p.i() != 1) {
        throw UnsupportedParameter("I3 chart system is only available for i = 1");
    }
    if (!(x > 1.0) || !(y > 1.0)) {
        throw std::domain_error("residual_I3: x and y must exceed 1");
    }
    const int k = p.k();
    const double lambda = p.lambda();
    const double xk = std::pow(x, k);
    const double yk = std::pow(y, k);
    return {xk - std::pow(x, k - 1) - lambda * yk / (yk + lambda),
            yk - std::pow(y, k - 1) - lambda * xk / (xk + lambda)};
}

/// A polynomial in x whose coefficients are integer polynomials in λ.
/// coeffs[j][e] is the integer coefficient of λ^e x^j.
struct LambdaPolynomial {
    std::string name;
    std::vector<std::vector<std::int64_t>> coeffs;
    /// Tree order k of the translation-invariant factor x^(k+1) − x^k − λ.
    int ti_order = 0;
    /// Power of that factor dividing the family for every λ.
    int ti_multiplicity = 0;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    template <class T>
    Polynomial<T> at(const T& lambda) const
    {
        std::vector<T> c;
        c.reserve(coeffs.size());
        for (const auto& in_lambda : coeffs) {
            T acc(0);
            for (auto it = in_lambda.rbegin(); it != in_lambda.rend(); ++it) {
                acc = acc * lambda + T(static_cast<long>(*it));
            }
            c.push_back(acc);
        }
        return Polynomial<T>(std::move(c));
    }
};

/// x^6 − (λ+2)x^5 + (5λ+1)x^4 − λ(2λ+5)x^3 + 2λ(2λ+1)x^2 − 3λ²x + λ²  (I2, k = 2).
inline const LambdaPolynomial& h_family()
{
    static const LambdaPolynomial family{
        "h",
        {
            {0, 0, 1},    // x^0: λ²
            {0, 0, -3},   // x^1: −3λ²
            {0, 2, 4},    // x^2: 2λ(2λ+1)
            {0, -5, -2},  // x^3: −λ(2λ+5)
            {1, 5},       // x^4: 5λ+1
            {-2, -1},     // x^5: −(λ+2)
            {1},          // x^6
        },
        2,
        0,
    };
    return family;
}

/// The degree-16 elimination polynomial of the I2 system for k = 3.
inline const LambdaPolynomial& f16_family()
{
    static const LambdaPolynomial family{
        "f16",
        {
            {0, 0, 0, 0, 1},    // x^0:  λ^4
            {0, 0, 0, 0, -4},   // x^1: −4λ^4
            {0, 0, 0, 0, 6},    // x^2:  6λ^4
            {0, 0, 0, 4, -3},   // x^3:  λ³(4 − 3λ)
            {0, 0, 0, -16},     // x^4: −16λ³
            {0, 0, 0, 24},      // x^5:  24λ³
            {0, 0, 6, -13},     // x^6:  λ²(6 − 13λ)
            {0, 0, -24, 1},     // x^7:  λ²(λ − 24)
            {0, 0, 36},         // x^8:  36λ²
            {0, 4, -20},        // x^9: −4λ(5λ − 1)
            {0, -16},           // x^10: −16λ
            {0, 24, 3},         // x^11: 3λ(λ + 8)
            {1, -14},           // x^12: 1 − 14λ
            {-4},               // x^13: −4
            {6, 3},             // x^14: 3(λ + 2)
            {-4, -1},           // x^15: −(λ + 4)
            {1},                // x^16
        },
        3,
        1,
    };
    return family;
}

/// (λ+1)x² + λx + 2λ² + λ  (I4, k = 2).
inline const LambdaPolynomial& h1_family()
{
    static const LambdaPolynomial family{"h1", {{0, 1, 2}, {0, 1}, {1, 1}}, 2, 0};
    return family;
}

/// (λ+1)x^6 − λx^5 + 2λx^4 + 2λ(λ+1)x³ + 2λ²x + 2λ³ + λ²  (I4, k = 3).
inline const LambdaPolynomial& h2_family()
{
    static const LambdaPolynomial family{
        "h2",
        {
            {0, 0, 1, 2},  // x^0: 2λ³ + λ²
            {0, 0, 2},     // x^1: 2λ²
            {},            // x^2
            {0, 2, 2},     // x^3: 2λ(λ+1)
            {0, 2},        // x^4: 2λ
            {0, -1},       // x^5: −λ
            {1, 1},        // x^6: λ + 1
        },
        3,
        0,
    };
    return family;
}

template <class T>
Polynomial<T> h_poly(const T& lambda)
{
    return h_family().at(lambda);
}

template <class T>
Polynomial<T> f16_poly(const T& lambda)
{
    return f16_family().at(lambda);
}

template <class T>
Polynomial<T> h1_poly(const T& lambda)
{
    return h1_family().at(lambda);
}

template <class T>
Polynomial<T> h2_poly(const T& lambda)
{
    return h2_family().at(lambda);
}

/// x^(k+1) − x^k − λ; its unique positive root is the translation-invariant
/// boundary law in the chart x = 1 + λz.
template <class T>
Polynomial<T> ti_poly(int k, const T& lambda)
{
    if (k < 1) {
        throw std::domain_error("ti_poly: k must be >= 1");
    }
    std::vector<T> c(static_cast<std::size_t>(k) + 2, T(0));
    c[0] = -lambda;
    c[static_cast<std::size_t>(k)] = T(-1);
    c[static_cast<std::size_t>(k) + 1] = T(1);
    return Polynomial<T>(std::move(c));
}

/// Chart coordinate of the translation-invariant solution.
inline double ti_chart_root(const ModelParams& p)
{
    // P(1) = −λ < 0 and P(1+λ) = λ((1+λ)^k − 1) > 0.
    const auto poly = ti_poly<double>(p.k(), p.lambda());
    return refine_root(poly, RootBracket<double>{1.0, 1.0 + p.lambda()}, 1e-15);
}

inline double ti_boundary_law(const ModelParams& p) { return (ti_chart_root(p) - 1.0) / p.lambda(); }

namespace detail {

inline double toms748_root(auto&& fn, double lo, double hi, double f_lo, double f_hi)
{
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(fn, lo, hi, f_lo, f_hi,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace detail

/// Scalar chart map f of a reduced system x = f(y), y = f(x) on I2, I3 or I4.
class ChartMap {
public:
    ChartMap(InvariantSet s, const ModelParams& p) : set_(s), params_(p)
    {
        switch (s) {
        case InvariantSet::I1:
            throw UnsupportedParameter("I1 has no two-variable chart system; solve the scalar equation instead");
        case InvariantSet::I2:
            if (p.k() == 1) {
                throw UnsupportedParameter(
                    "I2 with k = 1: z2 drops out of the reduced system, so no chart map y = f(x) exists");
            }
            break;
        case InvariantSet::I3:
            if (p.i() != 1) {
                throw UnsupportedParameter("I3 reduction is only derived for i = 1");
            }
            break;
        case InvariantSet::I4:
            if (p.i() != 1) {
                throw UnsupportedParameter("I4 reduction is only derived for i = 1");
            }
            break;
        }
    }

    InvariantSet set() const noexcept { return set_; }
    const ModelParams& params() const noexcept { return params_; }

    /// Chart interval (1, 1 + λ] of boundary laws in (0, 1].
    double lower() const noexcept { return 1.0; }
    double upper() const noexcept { return 1.0 + params_.lambda(); }
    bool in_chart(double x) const noexcept { return x > lower() && x <= upper(); }

    /// y = f(x), or nothing where the map is undefined.
    std::optional<double> operator()(double x) const
    {
        if (!(x > 0.0) || !std::isfinite(x)) {
            return std::nullopt;
        }
        switch (set_) {
        case InvariantSet::I2: return params_.i() == 1 ? i2_explicit(x) : i2_implicit(x);
        case InvariantSet::I3: return i3(x);
        case InvariantSet::I4: return f_I4(x, params_);
        case InvariantSet::I1: break;
        }
        return std::nullopt;
    }

    /// Both x and f(x) inside the chart interval.
    bool admissible(double x) const
    {
        if (!in_chart(x)) return false;
        const auto y = (*this)(x);
        return y && in_chart(*y);
    }

    /// Reduced state for the chart pair (x, y).
    ZVector4 reduced_state(double x, double y) const
    {
        const double lambda = params_.lambda();
        const double a = (x - 1.0) / lambda;
        const double b = (y - 1.0) / lambda;
        switch (set_) {
        case InvariantSet::I2: return {a, b, a, b};
        case InvariantSet::I3: return {a, a, b, b};
        case InvariantSet::I4: return {a, b, b, a};
        case InvariantSet::I1: break;
        }
        return ZVector4::filled(a);
    }

private:
    std::optional<double> i2_explicit(double x) const
    {
        if (!(x > 1.0)) return std::nullopt;
        const double k = params_.k();
        const double lambda = params_.lambda();
        const double log_rhs = std::log(lambda) + k * std::log(x) - std::log(std::pow(x, k) + lambda) -
                               std::log(x - 1.0);
        return std::exp(log_rhs / (k - 1.0));
    }

    // Solves G(a, b) = a for b, with G strictly decreasing in b and G(a, 0) = 1.
    std::optional<double> i2_implicit(double x) const
    {
        const double lambda = params_.lambda();
        const double a = (x - 1.0) / lambda;
        if (!(a > 0.0) || !(a < 1.0)) return std::nullopt;
        auto g = [&](double b) {
            return std::log(detail::reduced_block(a, b, params_) * detail::tail_factor(b, params_)) - std::log(a);
        };
        double hi = 1.0;
        double g_hi = g(hi);
        while (g_hi > 0.0) {
            hi *= 2.0;
            if (hi > 1e300) return std::nullopt;
            g_hi = g(hi);
        }
        const double g_lo = -std::log(a);
        const double b = detail::toms748_root(g, 0.0, hi, g_lo, g_hi);
        return 1.0 + lambda * b;
    }

    // Solves t^(k-1)(t - 1) = λx^k / (x^k + λ) for t > 1.
    std::optional<double> i3(double x) const
    {
        const int k = params_.k();
        const double lambda = params_.lambda();
        const double xk = std::pow(x, k);
        const double r = lambda * xk / (xk + lambda);
        if (k == 1) return 1.0 + r;
        if (k == 2) return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * r));
        auto g = [&](double t) { return std::pow(t, k - 1) * (t - 1.0) - r; };
        // t^(k-1) >= 1 on [1, ∞), so the root lies in (1, 1 + r].
        return detail::toms748_root(g, 1.0, 1.0 + r, -r, g(1.0 + r));
    }

    InvariantSet set_;
    ModelParams params_;
};

/// Guard of the removable singularity of the quotient at fixed points of f.
struct QuotientConfig {
    /// Switch to the limit form when |x − f(x)| < delta · max(1, x).
    double delta = 1e-7;
    /// Centered finite-difference step of the limit form.
    double fd_step = 1e-5;
};

/// x − f(f(x)); NaN where the composition is undefined.
inline double two_cycle_residual(const ChartMap& f, double x)
{
    const auto y = f(x);
    if (!y) return std::numeric_limits<double>::quiet_NaN();
    const auto yy = f(*y);
    if (!yy) return std::numeric_limits<double>::quiet_NaN();
    return x - *yy;
}

/// (x − f(f(x))) / (x − f(x)). Near a fixed point of f the limit form
/// (1 − (f∘f)'(x)) / (1 − f'(x)) is used; NaN when that is 0/0 too, or when
/// f is undefined along the way.
inline double quotient_q(double x, const ChartMap& f, const QuotientConfig& cfg = {})
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const auto y = f(x);
    if (!y) return nan;
    const auto yy = f(*y);
    if (!yy) return nan;
    const double num = x - *yy;
    const double den = x - *y;
    if (std::abs(den) >= cfg.delta * std::max(1.0, x)) {
        return num / den;
    }
    const double h = cfg.fd_step;
    const auto fp = f(x + h);
    const auto fm = f(x - h);
    if (!fp || !fm) return nan;
    const auto ffp = f(*fp);
    const auto ffm = f(*fm);
    if (!ffp || !ffm) return nan;
    const double d1 = (*fp - *fm) / (2.0 * h);
    const double d2 = (*ffp - *ffm) / (2.0 * h);
    const double limit_den = 1.0 - d1;
    if (limit_den == 0.0) return nan;
    return (1.0 - d2) / limit_den;
}

inline double quotient_q(double x, const ModelParams& p, InvariantSet s, const QuotientConfig& cfg = {})
{
    if (!(x > 1.0)) {
        throw std::domain_error("quotient_q: x must exceed 1");
    }
    return quotient_q(x, ChartMap(s, p), cfg);
}

}  // namespace hcwp
