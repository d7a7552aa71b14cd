#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "treerank/game.hpp"
#include "treerank/structure.hpp"

namespace treerank {

// ---------------------------------------------------------------------------
// Numbers and arithmetic on finite structures

/// k when {fiber(i) : i ∈ I} is exactly the family of k-subsets of S.
std::optional<int> realises_number_direct(const FiniteStructure& st);
/// The same test for B_a(x, i) = C(x, i, a).
std::optional<int> realises_number_direct(const FiniteStructure& st, Nat a);

/// The antichain-plus-exchange sentence evaluated through fo-eval.
bool realises_number_formula(const FiniteStructure& st);

/// Every k in [0, |S|] is realised by some parameter.
bool realises_arithmetic_direct(const FiniteStructure& st);
bool realises_arithmetic_formula(const FiniteStructure& st);

/// Each of B_n, B_m, B_l realises a number and some fiber of B_l is the
/// disjoint union of a fiber of B_n and a fiber of B_m. Throws
/// IndexOutOfUniverse when a parameter is not in A.
bool add_rel(const FiniteStructure& st, Nat n, Nat m, Nat l);
bool add_formula(const FiniteStructure& st, Nat n, Nat m, Nat l);

/// Each of B_n, B_m, B_l realises a number, and some fibers s_n ⊆ s_l share
/// max and min (max {} below, min {} above everything) with every slice
/// [a, b) of s_l between consecutive a < b of s_n a fiber of B_m.
bool mul_rel(const FiniteStructure& st, Nat n, Nat m, Nat l);
bool mul_formula(const FiniteStructure& st, Nat n, Nat m, Nat l);

using Triple = std::tuple<Nat, Nat, Nat>;

/// Parameter triples (n, m, l) over A × A × A on which `rel` holds.
template <class Rel>
std::vector<Triple> truth_table(const FiniteStructure& st, Rel rel)
{
    std::vector<Triple> out;
    for (Nat n : st.params)
        for (Nat m : st.params)
            for (Nat l : st.params)
                if (rel(st, n, m, l)) out.emplace_back(n, m, l);
    return out;
}

/// What the multiplication table says about the numbers it relates.
struct MulLawReport {
    std::size_t true_rows = 0;
    /// (num n, num m) -> num l over the true rows; empty when inconsistent.
    std::map<std::pair<int, int>, int> law;
    bool single_valued = false;
    /// Pairs where two true rows disagree on num l.
    std::vector<std::pair<int, int>> conflicts;
    /// f(0, m) = 0, f(1, m) = 1, f(n, m) = (n - 1) m + 1 for n >= 2, m >= 1,
    /// with f defined on the table exactly where that value is realised.
    bool matches_affine = false;
    /// Entries agreeing with l = n m + 1.
    std::size_t agree_nm_plus_1 = 0;
    std::size_t disagree_nm_plus_1 = 0;

    std::string describe() const;
};

MulLawReport mul_law(const FiniteStructure& st);

/// C(x, i, a): the p-th parameter of A realises p mod (|S| + 1); as i runs
/// over I its fibers cycle through the (p mod (|S|+1))-subsets of S in
/// lexicographic order. Throws UniverseTooSmall when I cannot hold every
/// subset of one size or |A| <= |S|.
FiniteStructure canonical_realizer(std::vector<Nat> carrier, std::vector<Nat> indices, std::vector<Nat> params);
/// S = [0, size), I = [0, C(size, size/2)), A = [0, size].
FiniteStructure canonical_realizer(int size);

// ---------------------------------------------------------------------------
// Interleaved boundary sequences

struct Interleaving {
    std::vector<Nat> a;
    std::vector<Nat> b;
};

/// A = {max(s)} ∪ {x ∈ u∖s : every earlier y ∈ u has [y, x] ∩ v ≠ ∅}
/// B = {x ∈ v∖s : every y ∈ v with max(s) < y < x has [y, x] ∩ u ≠ ∅}
/// max(∅) is omitted. Throws NotComparable unless s ⪯ u and s ⪯ v.
Interleaving interleaving_sets(const NodeSeq& s, const NodeSeq& u, const NodeSeq& v);

/// The first violated ordering or threshold condition on a_1 < b_1 < ... <
/// b_n < a_{n+1} with b_i > φ(a_i), a_{i+1} > ψ(a_i, b_i), as text.
std::optional<std::string> boundary_premise_violation(GameSolver& solver,
                                                      const std::vector<Nat>& a,
                                                      const std::vector<Nat>& b);

struct Tmp2Witness {
    NodeSeq u;
    NodeSeq v;
    Interleaving sets;
    int n = 0;  // rk(s) - 1
};

/// Alternately extends v past φ(max u) and u past ψ(max u, max v), each
/// step dropping g (and rk) by exactly one, until A_{u,v} has n+1 elements.
/// At a nonempty s the first boundary is max(s); at the root u first takes
/// a reply with all elements past `start`. Requires g(s) = rk(s) = n + 1
/// with n >= 1. Throws NotFiniteRank, PreconditionFailed, ConstructionStalled.
Tmp2Witness build_tmp2_witness(const TreePresentation& tree,
                               const NodeSeq& s,
                               const GameBounds& bounds,
                               std::optional<Nat> start = std::nullopt);

struct Tmp1Report {
    int n = 0;
    int k = 0;
    /// Gap i (1-based) is [b_i, a_{i+1}]; bit i-1 of a pattern.
    std::vector<std::pair<Mask, NodeSeq>> witnesses;  // one per k-gap pattern found
    std::vector<Mask> missing;                        // k-gap patterns with no witness
    int max_gaps_hit = 0;
    std::optional<NodeSeq> over_witness;  // an extension hitting more than k gaps
    std::size_t states = 0;

    bool part_i() const noexcept { return missing.empty(); }
    bool part_ii() const noexcept { return max_gaps_hit <= k; }
    bool passed() const noexcept { return part_i() && part_ii(); }
};

/// Explores every extension s' ⪰ s with elements at most a_{n+1} that avoids
/// all open intervals (a_i, b_i), recording which gaps [b_i, a_{i+1}] it
/// meets. (i) asks every k-subset of gaps to be met exactly by some s';
/// (ii) asks that none meets more than k. Throws PremiseViolated naming
/// the failed inequality, BudgetExceeded.
Tmp1Report check_tmp1(const TreePresentation& tree,
                      const NodeSeq& s,
                      const std::vector<Nat>& a,
                      const std::vector<Nat>& b,
                      const GameBounds& bounds,
                      std::size_t state_budget = std::size_t{1} << 22);

/// Shortlex-least node inside [0, bound] with g = k, if any.
std::optional<NodeSeq> node_with_value_within(GameSolver& solver, Nat bound, int k);

/// build_tmp2_witness at s, then check_tmp1 on its boundaries once for each
/// k < n, using the shortlex-least node inside [0, a_1] with g = k.
struct TmpPipelineReport {
    Tmp2Witness witness;
    std::vector<std::pair<NodeSeq, Tmp1Report>> checks;
    std::vector<int> values_without_base;  // k with no node inside [0, a_1]

    bool passed() const noexcept;
};

TmpPipelineReport run_tmp_pipeline(const TreePresentation& tree,
                                   const NodeSeq& s,
                                   const GameBounds& bounds,
                                   std::optional<Nat> start = std::nullopt);

/// {a_i : s misses every (a_k, b_k) and meets [b_{i-1}, a_i]}, b_0 = max(s).
std::vector<Nat> a_subset(const NodeSeq& s, const std::vector<Nat>& a, const std::vector<Nat>& b);

} // namespace treerank
