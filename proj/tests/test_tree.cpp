#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include "hcwp/solver.hpp"
#include "hcwp/tree.hpp"

using namespace hcwp;

TEST_CASE("depth-one tree for k = 2")
{
    const auto t = build_tree(2, 1);
    REQUIRE(t.size() == 4);
    CHECK(t[0].coset == 0);
    CHECK(t[0].children.size() == 3);
    int h3 = 0, h2 = 0;
    for (std::size_t c : t[0].children) {
        if (t[c].word.letters() == std::vector<int>{1}) {
            CHECK(t[c].coset == 3);
            ++h3;
        } else {
            CHECK(t[c].coset == 2);
            ++h2;
        }
    }
    CHECK(h3 == 1);
    CHECK(h2 == 2);
}

TEST_CASE("k = 1 gives two alternating paths")
{
    const auto t = build_tree(1, 3);
    REQUIRE(t.size() == 7);
    // Path 1,2,1: cosets H3 (a1 odd, len odd), H1, H2.
    std::vector<int> cosets;
    for (std::size_t v = 0; v < t.size(); ++v) {
        const auto& w = t[v].word.letters();
        if (!w.empty() && w.front() == 1) cosets.push_back(t[v].coset);
    }
    CHECK(cosets == std::vector<int>{3, 1, 2});
    for (std::size_t v = 1; v < t.size(); ++v) CHECK(t[v].children.size() == (t[v].depth < 3 ? 1u : 0u));
}

TEST_CASE("vertex counts follow the geometric sum")
{
    for (int k = 2; k <= 4; ++k) {
        for (int d = 1; d <= 5; ++d) {
            const auto t = build_tree(k, d);
            std::uint64_t kd = 1;
            for (int j = 0; j < d; ++j) kd *= static_cast<std::uint64_t>(k);
            CHECK(t.size() == 1 + (k + 1) * (kd - 1) / (k - 1));
            CHECK(tree_vertex_count(k, d) == t.size());
        }
    }
}

TEST_CASE("words are reduced and cosets behave like a homomorphism")
{
    const auto t = build_tree(3, 4);
    for (std::size_t v = 0; v < t.size(); ++v) {
        const auto& x = t[v];
        const auto& w = x.word.letters();
        for (std::size_t j = 1; j < w.size(); ++j) CHECK(w[j] != w[j - 1]);
        CHECK(x.coset == coset_of(x.word));
        CHECK(x.children.size() == (x.depth == 4 ? 0u : (x.parent ? 3u : 4u)));
        if (x.parent) CHECK(t[*x.parent].word == x.word.times(w.back()));
        // Exactly one neighbour across the a1-edge flips the a1 parity.
        int flips = 0;
        for (int a = 1; a <= 4; ++a) {
            const int c = coset_of(x.word.times(a));
            CHECK(((c ^ x.coset) & 2) == 2);  // length parity always flips
            flips += ((c ^ x.coset) & 1);
        }
        CHECK(flips == 1);
    }
}

TEST_CASE("children tallies match the exponents of the full system")
{
    for (auto [k, depth] : {std::pair{2, 4}, std::pair{3, 3}, std::pair{1, 5}, std::pair{5, 3}}) {
        const auto t = build_tree(k, depth);
        const auto rep = verify_system_structure(t);
        INFO("k=" << k << " depth=" << depth);
        CHECK(rep.applicable);
        CHECK(rep.checked > 0);
        CHECK(rep.violations.empty());
    }
    CHECK_FALSE(verify_system_structure(build_tree(3, 2), 2).applicable);
}

TEST_CASE("a mislabeled coset is reported")
{
    auto t = build_tree(2, 4);
    t.set_coset(5, (t[5].coset + 1) % 4);
    const auto rep = verify_system_structure(t);
    CHECK_FALSE(rep.violations.empty());
}

TEST_CASE("boundary laws on finite trees")
{
    const auto t = build_tree(2, 4);
    CHECK(verify_boundary_law(t, ZVector8::filled(0.25), 4.0) < 1e-12);

    const ModelParams p(2, 1, 5.0);
    const auto sols = solve_reduced(InvariantSet::I2, p);
    REQUIRE(sols.size() == 3);
    for (const auto& s : sols) CHECK(verify_boundary_law(t, s.z8, 5.0) < 1e-9);

    auto bad = sols[1].z8;
    bad.z1 += 0.01;
    CHECK(verify_boundary_law(t, bad, 5.0) > 1e-3);
}

TEST_CASE("boundary-law residual stays small as depth grows")
{
    const ModelParams p(7, 1, 1.775);
    const auto sols = solve_reduced(InvariantSet::I4, p);
    for (const auto& s : sols) {
        for (int d = 2; d <= 5; ++d) CHECK(verify_boundary_law(build_tree(7, d), s.z8, 1.775) < 1e-9);
    }
}

TEST_CASE("vertex cap")
{
    CHECK_THROWS_AS(build_tree(3, 20), TreeCapExceeded);
    CHECK_THROWS_AS(build_tree(2, 5, 50), TreeCapExceeded);
    CHECK_THROWS(build_tree(0, 3));
    CHECK_THROWS(build_tree(2, 0));
}

TEST_CASE("edge list export")
{
    const auto t = build_tree(2, 2);
    std::ostringstream os;
    t.write_edges(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "e 1 H3");
    int lines = 1;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == static_cast<int>(t.size()) - 1);
    CHECK(os.str().find("1 1,2 H1\n") != std::string::npos);
}
