#pragma once

// Sampled curves for the five reference plots.
//
//   1  I2 chart map f, k = 2, λ = 35
//   2  h, k = 2, λ ∈ {3.88, 4, 4.15}
//   3  degree-16 polynomial, k = 3, λ = 1.8
//   4  I4 chart map f, k = 3, λ = 1.5
//   5  I4 quotient q, k = 7, λ ∈ {1.765, 1.768674523476329362, 1.775}

#include <stdexcept>
#include <string>
#include <vector>

#include "hcwp/io.hpp"
#include "hcwp/model.hpp"
#include "hcwp/reductions.hpp"

namespace hcwp {

struct CurveSpec {
    int figure = 1;
    std::vector<double> lambdas;
    double xmin = 1;
    double xmax = 2;
    /// Name of the sampled function in the CSV header.
    std::string column;
};

inline CurveSpec default_curve(int figure)
{
    switch (figure) {
    case 1: return {1, {35.0}, 1.05, 8.0, "f(x)"};
    case 2: return {2, {3.88, 4.0, 4.15}, 1.0, 3.0, "h(x)"};
    case 3: return {3, {1.8}, 1.0, 2.2, "f(x)"};
    case 4: return {4, {1.5}, 1.0, 3.0, "f(x)"};
    case 5: return {5, {1.765, 1.768674523476329362, 1.775}, 1.05, 1.6, "h(x)"};
    default: throw std::invalid_argument("figure must be 1..5 (got " + std::to_string(figure) + ")");
    }
}

/// NaN where the function is undefined.
inline double curve_value(int figure, double lambda, double x)
{
    switch (figure) {
    case 1: return x > 1.0 ? f_I2_k2(x, lambda) : std::numeric_limits<double>::quiet_NaN();
    case 2: return h_poly<double>(lambda)(x);
    case 3: return f16_poly<double>(lambda)(x);
    case 4: return f_I4(x, ModelParams(3, 1, lambda));
    case 5:
        return x > 1.0 ? quotient_q(x, ModelParams(7, 1, lambda), InvariantSet::I4)
                       : std::numeric_limits<double>::quiet_NaN();
    default: throw std::invalid_argument("figure must be 1..5");
    }
}

/// Evenly spaced abscissae, both ends included.
inline std::vector<double> curve_abscissae(double xmin, double xmax, int samples)
{
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (!(xmin <= xmax)) throw std::invalid_argument("need xmin <= xmax");
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
        xs.push_back(samples == 1 ? xmin : (j + 1 == samples ? xmax : xmin + (xmax - xmin) * j / (samples - 1)));
    }
    return xs;
}

/// "x,<column>" for one λ, "lambda,x,<column>" for several; n rows per λ.
inline std::string curve_csv(const CurveSpec& spec, int samples)
{
    const bool many = spec.lambdas.size() > 1;
    std::string out = many ? "lambda,x," + spec.column + "\n" : "x," + spec.column + "\n";
    const auto xs = curve_abscissae(spec.xmin, spec.xmax, samples);
    for (double lambda : spec.lambdas) {
        for (double x : xs) {
            if (many) out += io::fmt17(lambda) + ',';
            out += io::fmt17(x) + ',' + io::fmt17(curve_value(spec.figure, lambda, x)) + '\n';
        }
    }
    return out;
}

}  // namespace hcwp
