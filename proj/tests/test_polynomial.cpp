#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "hcwp/polynomial.hpp"

using namespace hcwp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using QPoly = Polynomial<Rational>;

QPoly from_roots(std::initializer_list<Rational> roots)
{
    QPoly p({Rational(1)});
    for (const Rational& r : roots) p = p * QPoly({-r, Rational(1)});
    return p;
}

Rational q(long num, long den = 1)
{
    Rational r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace

TEST_CASE("polynomial arithmetic")
{
    const QPoly a({q(1), q(2), q(3)});  // 1 + 2x + 3x²
    const QPoly b({q(-1), q(1)});       // x − 1
    CHECK(a.degree() == 2);
    CHECK(QPoly({q(0), q(0)}).degree() == -1);
    CHECK((a * b)(q(1)) == 0);
    CHECK((a + b).coefficients() == std::vector<Rational>{q(0), q(3), q(3)});
    CHECK((a - a).is_zero());
    CHECK(a.derivative() == QPoly({q(2), q(6)}));
    CHECK(a(q(1, 2)) == q(11, 4));
    CHECK(a.leading() == 3);

    const auto [quo, rem] = divmod(a * b + QPoly({q(5)}), b);
    CHECK(quo == a);
    CHECK(rem == QPoly({q(5)}));
    CHECK_THROWS(divmod(a, QPoly{}));
}

TEST_CASE("gcd and squarefree part")
{
    const auto p = from_roots({q(1), q(2), q(2), q(3)});
    const auto r = from_roots({q(2), q(5)});
    CHECK(gcd(p, r) == from_roots({q(2)}));
    CHECK(squarefree_part(p) == from_roots({q(1), q(2), q(3)}));
    CHECK(gcd(p, from_roots({q(7)})).degree() == 0);

    const auto stripped = remove_common_roots(p * from_roots({q(7, 3)}), from_roots({q(2)}));
    CHECK(stripped == from_roots({q(1), q(3), q(7, 3)}));
}

TEST_CASE("Sturm counts half-open intervals exactly")
{
    const auto p = from_roots({q(-2), q(1), q(3, 2), q(3, 2), q(4)});
    const SturmSequence s(p);
    CHECK(s.count(q(-10), q(10)) == 4);  // distinct roots
    CHECK(s.count(q(1), q(4)) == 2);     // (1, 4] holds 3/2 and 4
    CHECK(s.count(q(0), q(1)) == 1);     // root at the right end counts
    CHECK(s.count(q(1), q(3, 2)) == 1);
    CHECK(s.count(q(3, 2), q(2)) == 0);  // root at the left end does not
    CHECK(s.count_above(q(0)) == 3);
    CHECK(sturm_count(p, q(-3), q(0)) == 1);

    // No real roots.
    CHECK(SturmSequence(QPoly({q(1), q(0), q(1)})).count(q(-100), q(100)) == 0);
}

TEST_CASE("Sturm counts agree with random factored polynomials")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Rational> roots;
        const int n = 1 + static_cast<int>(rng() % 7);
        for (int j = 0; j < n; ++j) roots.push_back(q(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 4)));
        QPoly p({q(1)});
        for (const auto& r : roots) p = p * QPoly({-r, q(1)});
        // Add a factor without real roots.
        if (trial % 3 == 0) p = p * QPoly({q(2), q(1), q(1)});
        const Rational lo = q(-3), hi = q(5, 2);
        std::vector<Rational> inside;
        for (const auto& r : roots) {
            if (r > lo && r <= hi && std::find(inside.begin(), inside.end(), r) == inside.end()) inside.push_back(r);
        }
        CHECK(sturm_count(p, lo, hi) == static_cast<int>(inside.size()));
    }
}

TEST_CASE("exact isolation and refinement")
{
    // (x² − 2)(x − 1)²(x − 3)
    const QPoly p = QPoly({q(-2), q(0), q(1)}) * from_roots({q(1), q(1), q(3)});
    const auto br = isolate_roots(p, q(-5), q(5));
    REQUIRE(br.size() == 4);
    CHECK(br[1].multiplicity == 2);
    CHECK(br[1].tangency());
    CHECK_FALSE(br[3].tangency());
    CHECK_THAT(refine_root(p, br[1]), WithinAbs(1.0, 1e-14));
    const double r = refine_root(p, br[2]);
    CHECK_THAT(r, WithinAbs(std::sqrt(2.0), 1e-14));
    CHECK_THAT(refine_root(p, br[0]), WithinAbs(-std::sqrt(2.0), 1e-14));
    CHECK_THAT(refine_root(p, br[3]), WithinAbs(3.0, 1e-14));
}

TEST_CASE("floating-point isolation and hybrid refinement")
{
    const Polynomial<double> p({-6.0, 11.0, -6.0, 1.0});  // (x−1)(x−2)(x−3)
    const auto br = isolate_roots(p, 0.0, 10.0);
    REQUIRE(br.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) CHECK_THAT(refine_root(p, br[j]), WithinAbs(j + 1.0, 1e-12));
    CHECK_THROWS_AS(refine_root(p, RootBracket<double>{1.2, 1.8}), std::invalid_argument);
}

TEST_CASE("Descartes rule of signs")
{
    CHECK(descartes_count(QPoly({q(-4), q(0), q(-1), q(1)})) == 1);  // x³ − x² − 4
    CHECK(descartes_count(from_roots({q(1), q(2), q(3)})) == 3);
    CHECK(descartes_count(QPoly({q(1), q(1), q(1)})) == 0);
    CHECK_THROWS(descartes_count(QPoly{}));
    CHECK(cauchy_bound(QPoly({q(-6), q(11), q(-6), q(1)})) >= 3);
}

TEST_CASE("Cardano roots")
{
    // Three real roots: (x − 1)(x + 2)(x − 5) = x³ − 4x² − 7x + 10.
    auto r = cardano_real_roots(1.0, -4.0, -7.0, 10.0);
    REQUIRE(r.size() == 3);
    CHECK_THAT(r[0], WithinAbs(-2.0, 1e-12));
    CHECK_THAT(r[1], WithinAbs(1.0, 1e-12));
    CHECK_THAT(r[2], WithinAbs(5.0, 1e-12));

    // One real root: x³ − x² − 4 has root 2.
    r = cardano_real_roots(1.0, -1.0, 0.0, -4.0);
    REQUIRE(r.size() == 1);
    CHECK_THAT(r[0], WithinAbs(2.0, 1e-14));

    // Double root: (x − 1)²(x + 2).
    r = cardano_real_roots(1.0, 0.0, -3.0, 2.0);
    REQUIRE(r.size() >= 2);
    CHECK_THAT(r.front(), WithinAbs(-2.0, 1e-12));
    CHECK_THAT(r.back(), WithinAbs(1.0, 1e-7));
}
