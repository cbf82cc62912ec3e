#pragma once

// Fixed-point system of the weakly periodic boundary laws of the hard-core
// model on the Cayley tree of order k, for the index-four normal divisor
// H_{a1} ∩ G_k^(2). Eight unknowns z1..z8, one per (coset of x, coset of x↓)
// pair, reduced to four (z1, z2, z7, z8) by eliminating z3..z6.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hcwp/errors.hpp"

namespace hcwp {

inline constexpr double kResidualTolerance = 1e-10;
inline constexpr double kClassifyTolerance = 1e-8;
/// Acceptance bound on the full-system residual of a reported solution.
inline constexpr double kSolutionResidualBound = 1e-9;

/// λ = e^J.
inline double lambda_from_coupling(double coupling)
{
    if (!std::isfinite(coupling)) {
        throw std::domain_error("coupling must be finite");
    }
    const double lambda = std::exp(coupling);
    if (!std::isfinite(lambda) || lambda == 0.0) {
        throw std::range_error("exp(coupling) is not representable as a positive double");
    }
    return lambda;
}

class ModelParams {
public:
    ModelParams(int k, int i, double lambda) : k_(k), i_(i), lambda_(lambda)
    {
        if (k < 1) {
            throw std::domain_error("tree order k must be >= 1");
        }
        if (i < 1 || i > k) {
            throw std::domain_error("exponent parameter i must satisfy 1 <= i <= k");
        }
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            throw std::domain_error("activity lambda must be a positive finite number");
        }
    }

    ModelParams(int k, int i, double lambda, double coupling) : ModelParams(k, i, lambda)
    {
        if (std::abs(lambda - std::exp(coupling)) > 1e-12 * lambda) {
            throw std::domain_error("lambda and exp(coupling) disagree");
        }
        coupling_ = coupling;
    }

    static ModelParams from_coupling(int k, int i, double coupling)
    {
        return {k, i, lambda_from_coupling(coupling), coupling};
    }

    int k() const noexcept { return k_; }
    int i() const noexcept { return i_; }
    double lambda() const noexcept { return lambda_; }
    std::optional<double> coupling() const noexcept { return coupling_; }

    ModelParams with_lambda(double lambda) const { return {k_, i_, lambda}; }

private:
    int k_;
    int i_;
    double lambda_;
    std::optional<double> coupling_;
};

/// Full boundary-law state. Index m of z_m follows the case table:
/// z1 (H3|H1), z2 (H1|H3), z3 (H3|H0), z4 (H0|H3),
/// z5 (H1|H2), z6 (H2|H1), z7 (H2|H0), z8 (H0|H2), written (coset x | coset x↓).
struct ZVector8 {
    double z1 = 0, z2 = 0, z3 = 0, z4 = 0, z5 = 0, z6 = 0, z7 = 0, z8 = 0;

    static ZVector8 filled(double v) { return {v, v, v, v, v, v, v, v}; }

    static ZVector8 from_array(const std::array<double, 8>& a)
    {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
    }

    std::array<double, 8> values() const { return {z1, z2, z3, z4, z5, z6, z7, z8}; }

    /// 1-based access matching the z_m numbering.
    double at(int m) const
    {
        if (m < 1 || m > 8) {
            throw std::out_of_range("ZVector8 index must be in 1..8");
        }
        return values()[static_cast<std::size_t>(m - 1)];
    }

    /// Every component in (0, 1].
    bool admissible() const
    {
        const auto v = values();
        return std::all_of(v.begin(), v.end(), [](double c) { return c > 0.0 && c <= 1.0; });
    }

    friend bool operator==(const ZVector8&, const ZVector8&) = default;
};

/// Reduced state (z1, z2, z7, z8).
struct ZVector4 {
    double z1 = 0, z2 = 0, z7 = 0, z8 = 0;

    static ZVector4 filled(double v) { return {v, v, v, v}; }
    std::array<double, 4> values() const { return {z1, z2, z7, z8}; }
    static ZVector4 from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

    bool positive() const { return z1 > 0 && z2 > 0 && z7 > 0 && z8 > 0; }
    bool admissible() const
    {
        const auto v = values();
        return std::all_of(v.begin(), v.end(), [](double c) { return c > 0.0 && c <= 1.0; });
    }

    friend bool operator==(const ZVector4&, const ZVector4&) = default;
};

enum class InvariantSet { I1, I2, I3, I4 };
enum class SolutionClass { TranslationInvariant, Periodic, WeaklyPeriodicNonPeriodic };

inline std::string_view to_string(InvariantSet s)
{
    switch (s) {
    case InvariantSet::I1: return "I1";
    case InvariantSet::I2: return "I2";
    case InvariantSet::I3: return "I3";
    case InvariantSet::I4: return "I4";
    }
    return "?";
}

inline InvariantSet parse_invariant_set(std::string_view s)
{
    if (s == "I1") return InvariantSet::I1;
    if (s == "I2") return InvariantSet::I2;
    if (s == "I3") return InvariantSet::I3;
    if (s == "I4") return InvariantSet::I4;
    throw std::invalid_argument("unknown invariant set '" + std::string(s) + "' (expected I1..I4)");
}

inline std::string_view to_string(SolutionClass c)
{
    switch (c) {
    case SolutionClass::TranslationInvariant: return "TI";
    case SolutionClass::Periodic: return "periodic";
    case SolutionClass::WeaklyPeriodicNonPeriodic: return "WP";
    }
    return "?";
}

namespace detail {

/// base^e for base > 0. Zero exponents give exactly 1; integer exponents go
/// through std::pow, fractional ones through exp/log.
inline double pos_pow(double base, double e)
{
    if (e == 0.0) {
        return 1.0;
    }
    if (std::trunc(e) == e && std::abs(e) <= 64.0) {
        return std::pow(base, static_cast<int>(e));
    }
    return std::exp(e * std::log(base));
}

inline void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string(what) + ": components must be positive and finite");
    }
}

}  // namespace detail

/// One factor (1 + λ z_index)^(-exponent) of a right-hand side of the full
/// system; exponent = i_coef·i + k_coef·k + offset.
struct SystemFactor {
    int index;
    int i_coef;
    int k_coef;
    int offset;

    constexpr int exponent(int k, int i) const noexcept { return i_coef * i + k_coef * k + offset; }
};

struct SystemRow {
    SystemFactor first;
    SystemFactor second;
};

/// Right-hand sides of z_m = (1+λz_a)^(-e_a) (1+λz_b)^(-e_b), m = 1..8.
inline constexpr std::array<SystemRow, 8> kSystemRows{{
    {{4, 1, 0, 0}, {2, -1, 1, 0}},   // z1: z4^i,     z2^(k-i)
    {{6, 1, 0, 0}, {1, -1, 1, 0}},   // z2: z6^i,     z1^(k-i)
    {{4, 1, 0, -1}, {2, -1, 1, 1}},  // z3: z4^(i-1), z2^(k-i+1)
    {{3, 1, 0, -1}, {7, -1, 1, 1}},  // z4: z3^(i-1), z7^(k-i+1)
    {{6, 1, 0, -1}, {1, -1, 1, 1}},  // z5: z6^(i-1), z1^(k-i+1)
    {{5, 1, 0, -1}, {8, -1, 1, 1}},  // z6: z5^(i-1), z8^(k-i+1)
    {{5, 1, 0, 0}, {8, -1, 1, 0}},   // z7: z5^i,     z8^(k-i)
    {{3, 1, 0, 0}, {7, -1, 1, 0}},   // z8: z3^i,     z7^(k-i)
}};

/// Component m is z_m minus the right-hand side of the full eight-variable system.
inline std::array<double, 8> full_residual(const ZVector8& z, const ModelParams& p)
{
    const auto v = z.values();
    for (double c : v) {
        detail::require_positive(c, "full_residual");
    }
    const double lambda = p.lambda();
    std::array<double, 8> r{};
    for (std::size_t m = 0; m < 8; ++m) {
        const SystemRow& row = kSystemRows[m];
        double rhs = 1.0;
        for (const SystemFactor& f : {row.first, row.second}) {
            const int e = f.exponent(p.k(), p.i());
            if (e != 0) {
                rhs /= std::pow(1.0 + lambda * v[static_cast<std::size_t>(f.index - 1)], e);
            }
        }
        r[m] = v[m] - rhs;
    }
    return r;
}

inline double max_abs(const std::array<double, 8>& r)
{
    double m = 0.0;
    for (double c : r) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

namespace detail {

/// (1+λa)^k / ((1+λa)^(k/i) + λ b^(1-1/i))^i, the common block of the reduced map.
inline double reduced_block(double a, double b, const ModelParams& p)
{
    const double k = p.k();
    const double i = p.i();
    const double lambda = p.lambda();
    const double base = 1.0 + lambda * a;
    const double inner = pos_pow(base, k / i) + lambda * pos_pow(b, 1.0 - 1.0 / i);
    return pos_pow(base, k) / pos_pow(inner, i);
}

inline double tail_factor(double b, const ModelParams& p)
{
    return 1.0 / pos_pow(1.0 + p.lambda() * b, p.k() - p.i());
}

}  // namespace detail

/// The reduced map W : (z1, z2, z7, z8) -> (z1', z2', z7', z8').
inline ZVector4 apply_W(const ZVector4& z, const ModelParams& p)
{
    for (double c : z.values()) {
        detail::require_positive(c, "apply_W");
    }
    using detail::reduced_block;
    using detail::tail_factor;
    return {
        reduced_block(z.z7, z.z8, p) * tail_factor(z.z2, p),
        reduced_block(z.z8, z.z7, p) * tail_factor(z.z1, p),
        reduced_block(z.z1, z.z2, p) * tail_factor(z.z8, p),
        reduced_block(z.z2, z.z1, p) * tail_factor(z.z7, p),
    };
}

inline double max_abs_diff(const ZVector4& a, const ZVector4& b)
{
    const auto u = a.values();
    const auto v = b.values();
    double m = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        m = std::max(m, std::abs(u[j] - v[j]));
    }
    return m;
}

/// Recovers z3, z4, z5, z6 from a reduced state.
inline ZVector8 back_substitute(const ZVector4& z, const ModelParams& p)
{
    for (double c : z.values()) {
        detail::require_positive(c, "back_substitute");
    }
    using detail::pos_pow;
    const double lambda = p.lambda();
    const double e_own = 1.0 - 1.0 / p.i();
    const double e_mix = -static_cast<double>(p.k()) / p.i();
    ZVector8 out;
    out.z1 = z.z1;
    out.z2 = z.z2;
    out.z7 = z.z7;
    out.z8 = z.z8;
    out.z3 = pos_pow(z.z1, e_own) * pos_pow(1.0 + lambda * z.z2, e_mix);
    out.z5 = pos_pow(z.z2, e_own) * pos_pow(1.0 + lambda * z.z1, e_mix);
    out.z6 = pos_pow(z.z7, e_own) * pos_pow(1.0 + lambda * z.z8, e_mix);
    out.z4 = pos_pow(z.z8, e_own) * pos_pow(1.0 + lambda * z.z7, e_mix);
    return out;
}

/// |a - b| <= tol · max(|a|, |b|).
inline bool approx_equal(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline bool invariant_membership(const ZVector4& z, InvariantSet s, double tol = kClassifyTolerance)
{
    if (!(tol > 0.0)) {
        throw std::domain_error("membership tolerance must be positive");
    }
    switch (s) {
    case InvariantSet::I1:
        return approx_equal(z.z1, z.z2, tol) && approx_equal(z.z1, z.z7, tol) && approx_equal(z.z1, z.z8, tol);
    case InvariantSet::I2:
        return approx_equal(z.z1, z.z7, tol) && approx_equal(z.z2, z.z8, tol);
    case InvariantSet::I3:
        return approx_equal(z.z1, z.z2, tol) && approx_equal(z.z7, z.z8, tol);
    case InvariantSet::I4:
        return approx_equal(z.z1, z.z8, tol) && approx_equal(z.z2, z.z7, tol);
    }
    return false;
}

/// Does not re-check that z solves the system.
inline SolutionClass classify(const ZVector8& z, double tol = kClassifyTolerance)
{
    const auto v = z.values();
    const bool all_equal =
        std::all_of(v.begin(), v.end(), [&](double c) { return approx_equal(c, v[0], tol); });
    if (all_equal) {
        return SolutionClass::TranslationInvariant;
    }
    // z_x independent of the parent coset.
    const bool periodic = approx_equal(z.z1, z.z3, tol) && approx_equal(z.z2, z.z5, tol) &&
                          approx_equal(z.z4, z.z8, tol) && approx_equal(z.z6, z.z7, tol);
    return periodic ? SolutionClass::Periodic : SolutionClass::WeaklyPeriodicNonPeriodic;
}

}  // namespace hcwp
