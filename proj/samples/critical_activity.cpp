// Locates the first bifurcation on I2 for k = 2 and lists the solutions past it.

#include <cstdio>

#include "hcwp/solver.hpp"

int main()
{
    using namespace hcwp;
    const auto cr = find_critical_lambda(InvariantSet::I2, 2, 1, 3.0, 5.0, 1e-10);
    std::printf("lambda_cr = %.12f  (%d -> %d solutions)\n", cr.lambda_cr, cr.count_below, cr.count_above);

    const ModelParams p(2, 1, 5.0);
    for (const Solution& s : solve_reduced(InvariantSet::I2, p)) {
        std::printf("%-9s z1=%.10f z2=%.10f  residual %.1e\n", std::string(to_string(s.cls)).c_str(), s.z8.z1,
                    s.z8.z2, s.residual);
    }
}
