#pragma once

// Brute-force Cayley tree as reduced words of the free product of k+1
// order-two groups, labelled with the four cosets of the index-4 divisor.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hcwp/errors.hpp"
#include "hcwp/model.hpp"

namespace hcwp {

inline constexpr std::size_t kDefaultTreeCap = 1'000'000;

/// Vertex cap from HCWP_TREE_MAX_VERTICES, else the default.
inline std::size_t tree_cap_from_env()
{
    if (const char* v = std::getenv("HCWP_TREE_MAX_VERTICES")) {
        char* end = nullptr;
        const unsigned long long n = std::strtoull(v, &end, 10);
        if (end != v && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
    }
    return kDefaultTreeCap;
}

/// Reduced word over letters 1..k+1; appending the last letter cancels it.
class Word {
public:
    Word() = default;

    const std::vector<int>& letters() const noexcept { return letters_; }
    std::size_t length() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    int a1_count() const noexcept
    {
        int n = 0;
        for (int l : letters_) n += (l == 1);
        return n;
    }

    /// x · a_letter in normal form.
    Word times(int letter) const
    {
        if (letter < 1) throw std::invalid_argument("letters start at 1");
        Word w = *this;
        if (!w.letters_.empty() && w.letters_.back() == letter) {
            w.letters_.pop_back();
        } else {
            w.letters_.push_back(letter);
        }
        return w;
    }

    /// "1,2,1"; the identity prints as "e".
    std::string str() const
    {
        if (letters_.empty()) return "e";
        std::string s;
        for (std::size_t j = 0; j < letters_.size(); ++j) {
            if (j) s += ',';
            s += std::to_string(letters_[j]);
        }
        return s;
    }

    friend bool operator==(const Word&, const Word&) = default;

private:
    std::vector<int> letters_;
};

/// H0..H3: index = (a1-count parity) + 2 * (length parity).
inline int coset_of(const Word& w)
{
    return (w.a1_count() & 1) + 2 * static_cast<int>(w.length() & 1);
}

inline std::string coset_name(int c) { return "H" + std::to_string(c); }

/// Variable index 1..8 of a vertex in coset c whose parent is in coset parent_c,
/// or 0 when no such pair occurs.
inline int case_index(int c, int parent_c)
{
    static constexpr std::array<std::array<int, 4>, 4> table{{
        // parent: H0 H1 H2 H3
        {0, 0, 8, 4},  // H0
        {0, 0, 5, 2},  // H1
        {7, 6, 0, 0},  // H2
        {3, 1, 0, 0},  // H3
    }};
    if (c < 0 || c > 3 || parent_c < 0 || parent_c > 3) return 0;
    return table[static_cast<std::size_t>(c)][static_cast<std::size_t>(parent_c)];
}

struct TreeVertex {
    Word word;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    int coset = 0;
    int depth = 0;
};

class CosetTree {
public:
    CosetTree(int k, int depth) : k_(k), depth_(depth) {}

    int k() const noexcept { return k_; }
    int depth() const noexcept { return depth_; }
    const std::vector<TreeVertex>& vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    const TreeVertex& operator[](std::size_t v) const { return vertices_.at(v); }

    /// Overrides a label (fault injection for negative controls).
    void set_coset(std::size_t v, int c) { vertices_.at(v).coset = c; }

    /// "parent_word child_word child_coset", one edge per line.
    void write_edges(std::ostream& os) const
    {
        for (const TreeVertex& v : vertices_) {
            if (!v.parent) continue;
            os << vertices_[*v.parent].word.str() << ' ' << v.word.str() << ' ' << coset_name(v.coset) << '\n';
        }
    }

private:
    friend CosetTree build_tree(int, int, std::size_t);
    int k_;
    int depth_;
    std::vector<TreeVertex> vertices_;
};

/// 1 + (k+1)(k^depth − 1)/(k − 1), or 1 + 2·depth when k = 1.
inline std::uint64_t tree_vertex_count(int k, int depth)
{
    std::uint64_t total = 1;
    std::uint64_t level = static_cast<std::uint64_t>(k) + 1;
    for (int d = 1; d <= depth; ++d) {
        total += level;
        level *= static_cast<std::uint64_t>(k);
        if (total > (std::uint64_t{1} << 62)) break;
    }
    return total;
}

/// Breadth-first enumeration of all reduced words of length <= depth.
inline CosetTree build_tree(int k, int depth, std::size_t cap = kDefaultTreeCap)
{
    if (k < 1) throw std::domain_error("build_tree needs k >= 1");
    if (depth < 1) throw std::domain_error("build_tree needs depth >= 1");
    const std::uint64_t n = tree_vertex_count(k, depth);
    if (n > cap) {
        throw TreeCapExceeded("tree with k=" + std::to_string(k) + ", depth=" + std::to_string(depth) + " has " +
                              std::to_string(n) + " vertices, cap is " + std::to_string(cap));
    }
    CosetTree t(k, depth);
    t.vertices_.reserve(static_cast<std::size_t>(n));
    t.vertices_.push_back(TreeVertex{Word{}, std::nullopt, {}, 0, 0});
    for (std::size_t v = 0; v < t.vertices_.size(); ++v) {
        if (t.vertices_[v].depth == depth) continue;
        const Word w = t.vertices_[v].word;
        const int last = w.empty() ? 0 : w.letters().back();
        for (int a = 1; a <= k + 1; ++a) {
            if (a == last) continue;
            Word child = w.times(a);
            const int c = coset_of(child);
            t.vertices_.push_back(TreeVertex{std::move(child), v, {}, c, t.vertices_[v].depth + 1});
            t.vertices_[v].children.push_back(t.vertices_.size() - 1);
        }
    }
    return t;
}

struct StructureViolation {
    std::string word;
    std::string message;
};

struct StructureReport {
    bool applicable = true;
    std::size_t checked = 0;
    std::vector<StructureViolation> violations;
};

/// Tallies the children of every internal non-root vertex by case and
/// compares with the exponents of the full system at i = 1.
inline StructureReport verify_system_structure(const CosetTree& t, int i = 1)
{
    StructureReport rep;
    if (i != 1) {
        rep.applicable = false;
        return rep;
    }
    const int k = t.k();
    for (const TreeVertex& v : t.vertices()) {
        if (!v.parent || v.children.empty()) continue;
        ++rep.checked;
        const int m = case_index(v.coset, t[*v.parent].coset);
        if (m == 0) {
            rep.violations.push_back({v.word.str(), "no case for (" + coset_name(v.coset) + " | " +
                                                        coset_name(t[*v.parent].coset) + ")"});
            continue;
        }
        std::array<int, 9> tally{};
        for (std::size_t c : v.children) {
            tally[static_cast<std::size_t>(case_index(t[c].coset, v.coset))] += 1;
        }
        std::array<int, 9> expected{};
        const SystemRow& row = kSystemRows[static_cast<std::size_t>(m - 1)];
        for (const SystemFactor& f : {row.first, row.second}) {
            expected[static_cast<std::size_t>(f.index)] += f.exponent(k, 1);
        }
        if (tally != expected) {
            std::string msg = "z" + std::to_string(m) + " children:";
            for (std::size_t j = 0; j < 9; ++j) {
                if (tally[j] != expected[j]) {
                    msg += (j == 0 ? std::string(" unclassified") : " z" + std::to_string(j)) + " " +
                           std::to_string(tally[j]) + " (expected " + std::to_string(expected[j]) + ")";
                }
            }
            rep.violations.push_back({v.word.str(), msg});
        }
    }
    return rep;
}

/// Largest |z_x − ∏_{y ∈ S(x)} (1 + λ z_y)^(−1)| over internal non-root
/// vertices, with z assigned by (coset(x), coset(parent)).
inline double verify_boundary_law(const CosetTree& t, const ZVector8& z, double lambda)
{
    const auto value = [&](std::size_t v) {
        const TreeVertex& x = t[v];
        const int m = case_index(x.coset, t[*x.parent].coset);
        if (m == 0) throw std::logic_error("vertex " + x.word.str() + " has no (coset, parent coset) case");
        return z.at(m);
    };
    double worst = 0.0;
    for (std::size_t v = 0; v < t.size(); ++v) {
        const TreeVertex& x = t[v];
        if (!x.parent || x.children.empty()) continue;
        double rhs = 1.0;
        for (std::size_t c : x.children) rhs /= 1.0 + lambda * value(c);
        worst = std::max(worst, std::abs(value(v) - rhs));
    }
    return worst;
}

}  // namespace hcwp
