#include "treerank/interp.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "treerank/error.hpp"
#include "treerank/formula.hpp"
#include "treerank/rank.hpp"

namespace treerank {

namespace {

long long binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::optional<int> number_of(const std::vector<Mask>& fibers, int carrier_size)
{
    std::set<Mask> family(fibers.begin(), fibers.end());
    if (family.empty()) return std::nullopt;
    const int k = std::popcount(*family.begin());
    for (Mask f : family)
        if (std::popcount(f) != k) return std::nullopt;
    if (static_cast<long long>(family.size()) != binomial(carrier_size, k)) return std::nullopt;
    return k;
}

std::vector<Mask> fibers_of(const FiniteStructure& st, Nat a)
{
    std::vector<Mask> out;
    for (Nat i : st.indices) out.push_back(fiber(st, a, i));
    return out;
}

void require_param(const FiniteStructure& st, Nat a)
{
    if (!st.ternary) throw Error(Errc::ArityMismatch, "structure has no ternary relation C");
    if (!st.is_param(a)) throw Error(Errc::IndexOutOfUniverse, "parameter " + std::to_string(a) + " is not in A");
}

const Formula& cached_builtin(std::string_view name)
{
    static const Formula number = builtin("realises_number");
    static const Formula arithmetic = builtin("realises_arithmetic");
    static const Formula addition = builtin("addition");
    static const Formula multiplication = builtin("multiplication");
    if (name == "realises_number") return number;
    if (name == "realises_arithmetic") return arithmetic;
    if (name == "addition") return addition;
    return multiplication;
}

int top_of(Mask m) { return m ? 63 - std::countl_zero(m) : -1; }
int bottom_of(Mask m) { return m ? std::countr_zero(m) : 64; }

Mask range_mask(Nat a, Nat b)  // [a, b)
{
    if (a >= b) return 0;
    const Mask below_b = b >= 64 ? ~Mask{0} : bit(b) - 1;
    return below_b & ~(bit(a) - 1);
}

/// k-subsets of `elems` in lexicographic order.
std::vector<Mask> lex_subsets(const std::vector<Nat>& elems, int k)
{
    std::vector<Mask> out;
    std::function<void(std::size_t, int, Mask)> rec = [&](std::size_t from, int left, Mask acc) {
        if (left == 0) {
            out.push_back(acc);
            return;
        }
        for (std::size_t p = from; p + left <= elems.size(); ++p) rec(p + 1, left - 1, acc | bit(elems[p]));
    };
    rec(0, k, 0);
    return out;
}

} // namespace

std::optional<int> realises_number_direct(const FiniteStructure& st)
{
    if (!st.binary) throw Error(Errc::ArityMismatch, "structure has no binary relation B");
    std::vector<Mask> fibers;
    for (Nat i : st.indices) fibers.push_back(fiber(st, i));
    return number_of(fibers, static_cast<int>(st.carrier.size()));
}

std::optional<int> realises_number_direct(const FiniteStructure& st, Nat a)
{
    require_param(st, a);
    return number_of(fibers_of(st, a), static_cast<int>(st.carrier.size()));
}

bool realises_number_formula(const FiniteStructure& st) { return evaluate(st, cached_builtin("realises_number")); }

bool realises_arithmetic_direct(const FiniteStructure& st)
{
    if (!st.ternary) throw Error(Errc::ArityMismatch, "structure has no ternary relation C");
    std::set<int> realised;
    for (Nat a : st.params)
        if (auto k = realises_number_direct(st, a)) realised.insert(*k);
    for (int k = 0; k <= static_cast<int>(st.carrier.size()); ++k)
        if (!realised.count(k)) return false;
    return true;
}

bool realises_arithmetic_formula(const FiniteStructure& st)
{
    return evaluate(st, cached_builtin("realises_arithmetic"));
}

bool add_rel(const FiniteStructure& st, Nat n, Nat m, Nat l)
{
    for (Nat p : {n, m, l}) require_param(st, p);
    for (Nat p : {n, m, l})
        if (!realises_number_direct(st, p)) return false;
    const auto fn = fibers_of(st, n), fm = fibers_of(st, m), fl = fibers_of(st, l);
    const std::set<Mask> targets(fl.begin(), fl.end());
    for (Mask x : fn)
        for (Mask y : fm)
            if (!(x & y) && targets.count(x | y)) return true;
    return false;
}

bool add_formula(const FiniteStructure& st, Nat n, Nat m, Nat l)
{
    return evaluate(st, cached_builtin("addition"), {{"n", n}, {"m", m}, {"l", l}});
}

bool mul_rel(const FiniteStructure& st, Nat n, Nat m, Nat l)
{
    for (Nat p : {n, m, l}) require_param(st, p);
    for (Nat p : {n, m, l})
        if (!realises_number_direct(st, p)) return false;
    const auto fn = fibers_of(st, n), fl = fibers_of(st, l);
    const auto fm_list = fibers_of(st, m);
    const std::set<Mask> fm(fm_list.begin(), fm_list.end());
    for (Mask x : fn) {
        const auto xs = mask_elements(x);
        for (Mask y : fl) {
            if ((x & ~y) || top_of(x) != top_of(y) || bottom_of(x) != bottom_of(y)) continue;
            bool slices_ok = true;
            for (std::size_t p = 0; p + 1 < xs.size() && slices_ok; ++p)
                slices_ok = fm.count(y & range_mask(xs[p], xs[p + 1])) > 0;
            if (slices_ok) return true;
        }
    }
    return false;
}

bool mul_formula(const FiniteStructure& st, Nat n, Nat m, Nat l)
{
    return evaluate(st, cached_builtin("multiplication"), {{"n", n}, {"m", m}, {"l", l}});
}

std::string MulLawReport::describe() const
{
    std::ostringstream os;
    if (!single_valued) {
        os << "no single law: " << conflicts.size() << " (num n, num m) pairs map to several num l";
        return os.str();
    }
    os << "num(l) = f(num(n), num(m)) on " << true_rows << " true rows; f(0,m) = 0, f(1,m) = 1, f(n,m) = (n-1)m+1 for n >= 2, m >= 1";
    os << (matches_affine ? " (matches every entry)" : " (does NOT match the table)");
    os << "; l = n*m+1 agrees on " << agree_nm_plus_1 << " of " << (agree_nm_plus_1 + disagree_nm_plus_1) << " entries";
    return os.str();
}

MulLawReport mul_law(const FiniteStructure& st)
{
    MulLawReport out;
    std::map<Nat, int> num;
    std::set<int> realised;
    for (Nat p : st.params)
        if (auto k = realises_number_direct(st, p)) {
            num[p] = *k;
            realised.insert(*k);
        }

    std::map<std::pair<int, int>, std::set<int>> seen;
    for (const auto& [n, m, l] : truth_table(st, mul_rel)) {
        ++out.true_rows;
        seen[{num.at(n), num.at(m)}].insert(num.at(l));
    }
    for (const auto& [key, values] : seen) {
        if (values.size() > 1) out.conflicts.push_back(key);
        else out.law[key] = *values.begin();
    }
    out.single_valued = out.conflicts.empty();
    if (!out.single_valued) out.law.clear();

    auto affine = [](int n, int m) -> std::optional<int> {
        if (n == 0) return 0;
        if (n == 1) return 1;
        if (m == 0) return std::nullopt;
        return (n - 1) * m + 1;
    };
    out.matches_affine = out.single_valued;
    for (int n : realised)
        for (int m : realised) {
            auto want = affine(n, m);
            if (want && !realised.count(*want)) want.reset();
            auto it = out.law.find({n, m});
            const bool defined = it != out.law.end();
            if (defined != want.has_value() || (defined && it->second != *want)) out.matches_affine = false;
        }
    for (const auto& [key, l] : out.law) {
        if (l == key.first * key.second + 1) ++out.agree_nm_plus_1;
        else ++out.disagree_nm_plus_1;
    }
    return out;
}

FiniteStructure canonical_realizer(std::vector<Nat> carrier, std::vector<Nat> indices, std::vector<Nat> params)
{
    auto st = ternary_structure(std::move(carrier), std::move(indices), std::move(params));
    const int size = static_cast<int>(st.carrier.size());
    if (size == 0 || st.indices.empty()) throw Error(Errc::UniverseTooSmall, "S and I must be nonempty");
    if (static_cast<long long>(st.indices.size()) < binomial(size, size / 2))
        throw Error(Errc::UniverseTooSmall,
                    "|I| = " + std::to_string(st.indices.size()) + " cannot hold the " + std::to_string(binomial(size, size / 2))
                        + " subsets of size " + std::to_string(size / 2));
    if (static_cast<int>(st.params.size()) < size + 1)
        throw Error(Errc::UniverseTooSmall, "|A| must be at least |S| + 1 = " + std::to_string(size + 1));

    for (std::size_t p = 0; p < st.params.size(); ++p) {
        const auto subsets = lex_subsets(st.carrier, static_cast<int>(p % (size + 1)));
        for (std::size_t pos = 0; pos < st.indices.size(); ++pos)
            set_ternary(st, st.params[p], st.indices[pos], subsets[pos % subsets.size()]);
    }
    return st;
}

FiniteStructure canonical_realizer(int size)
{
    if (size < 1) throw Error(Errc::UniverseTooSmall, "canonical realizer needs |S| >= 1");
    std::vector<Nat> carrier, indices, params;
    for (Nat x = 0; x < size; ++x) carrier.push_back(x);
    for (Nat i = 0; i < binomial(size, size / 2); ++i) indices.push_back(i);
    for (Nat a = 0; a <= size; ++a) params.push_back(a);
    return canonical_realizer(carrier, indices, params);
}

// ---------------------------------------------------------------------------

Interleaving interleaving_sets(const NodeSeq& s, const NodeSeq& u, const NodeSeq& v)
{
    if (!is_initial_segment(s, u) || !is_initial_segment(s, v))
        throw Error(Errc::NotComparable, s.to_string() + " is not an initial segment of both " + u.to_string() + " and " + v.to_string(),
                    {s, u, v});
    auto meets = [](const NodeSeq& t, Nat lo, Nat hi) {
        return std::any_of(t.begin(), t.end(), [&](Nat x) { return lo <= x && x <= hi; });
    };
    Interleaving out;
    if (!s.empty()) out.a.push_back(s.top());
    for (std::size_t p = s.size(); p < u.size(); ++p) {
        const Nat x = u[p];
        bool ok = true;
        for (std::size_t q = 0; q < p && ok; ++q) ok = meets(v, u[q], x);
        if (ok) out.a.push_back(x);
    }
    for (std::size_t p = s.size(); p < v.size(); ++p) {
        const Nat x = v[p];
        bool ok = true;
        for (std::size_t q = s.size(); q < p && ok; ++q) ok = meets(u, v[q], x);
        if (ok) out.b.push_back(x);
    }
    return out;
}

std::optional<std::string> boundary_premise_violation(GameSolver& solver, const std::vector<Nat>& a, const std::vector<Nat>& b)
{
    if (b.empty() || a.size() != b.size() + 1)
        return "need n >= 1 gaps with |a| = n + 1, got |a| = " + std::to_string(a.size()) + ", |b| = " + std::to_string(b.size());
    const std::size_t n = b.size();
    auto idx = [](std::size_t i) { return std::to_string(i + 1); };
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a[i] < b[i]))
            return "a_" + idx(i) + " < b_" + idx(i) + " (" + std::to_string(a[i]) + " vs " + std::to_string(b[i]) + ")";
        if (!(b[i] < a[i + 1]))
            return "b_" + idx(i) + " < a_" + idx(i + 1) + " (" + std::to_string(b[i]) + " vs " + std::to_string(a[i + 1]) + ")";
    }
    WitnessFunctions fns(solver);
    for (std::size_t i = 0; i < n; ++i) {
        const Nat p = fns.phi(a[i]);
        if (!(b[i] > p))
            return "b_" + idx(i) + " > phi(a_" + idx(i) + ") (b = " + std::to_string(b[i]) + ", phi = " + std::to_string(p) + ")";
        const Nat q = fns.psi(a[i], b[i]);
        if (!(a[i + 1] > q))
            return "a_" + idx(i + 1) + " > psi(a_" + idx(i) + ", b_" + idx(i) + ") (a = " + std::to_string(a[i + 1])
                   + ", psi = " + std::to_string(q) + ")";
    }
    return std::nullopt;
}

Tmp2Witness build_tmp2_witness(const TreePresentation& tree,
                               const NodeSeq& s,
                               const GameBounds& bounds,
                               std::optional<Nat> start)
{
    validate(bounds);
    if (!tree.contains(s)) throw Error(Errc::NotANode, s.to_string() + " is not a node of " + tree.name(), {s});
    GameSolver solver(tree, bounds);
    const auto rk = rank(solver, s);
    if (!rk.is_finite() || rk.value < 2)
        throw Error(Errc::NotFiniteRank, "rk(" + s.to_string() + ") = " + rk.to_string() + "; a finite rank n + 1 >= 2 is required",
                    {s});
    const auto g = solver.survival_value(s);
    if (!g.is_finite() || g.value != rk.value)
        throw Error(Errc::PreconditionFailed, "g(" + s.to_string() + ") = " + g.to_string() + " differs from rk = " + rk.to_string(),
                    {s});

    Tmp2Witness out;
    out.n = rk.value - 1;
    WitnessFunctions fns(solver);

    // Extend t past `after` to a node with g = rk = want.
    auto step = [&](const NodeSeq& t, Nat after, int want) {
        auto next = solver.find_first(
            t, after, [want](const GameSolver::Entry& e) { return e.value == want && e.subtree_max == want; },
            [want](const GameSolver::Entry& e) { return e.subtree_max >= want; });
        if (!next)
            throw Error(Errc::ConstructionStalled,
                        "no extension of " + t.to_string() + " past " + std::to_string(after) + " with g = rk = " + std::to_string(want)
                            + " within universe " + std::to_string(bounds.universe_bound),
                        {t});
        return *next;
    };

    NodeSeq u = s, v = s;
    int gu = rk.value, gv = rk.value;
    if (s.empty()) {
        u = step(u, start.value_or(kBelowAll), --gu);
    }
    for (int i = 0; i < out.n; ++i) {
        v = step(v, fns.phi(u.top()), --gv);
        u = step(u, fns.psi(u.top(), v.top()), --gu);
    }

    out.u = u;
    out.v = v;
    out.sets = interleaving_sets(s, u, v);
    if (static_cast<int>(out.sets.a.size()) != out.n + 1 || static_cast<int>(out.sets.b.size()) != out.n)
        throw Error(Errc::ConstructionStalled, "interleaving of " + u.to_string() + " and " + v.to_string() + " has the wrong shape", {u, v});
    if (auto why = boundary_premise_violation(solver, out.sets.a, out.sets.b))
        throw Error(Errc::ConstructionStalled, "constructed boundaries violate " + *why, {u, v});
    return out;
}

Tmp1Report check_tmp1(const TreePresentation& tree,
                      const NodeSeq& s,
                      const std::vector<Nat>& a,
                      const std::vector<Nat>& b,
                      const GameBounds& bounds,
                      std::size_t state_budget)
{
    validate(bounds);
    GameSolver solver(tree, bounds);
    if (auto why = boundary_premise_violation(solver, a, b)) throw Error(Errc::PremiseViolated, *why);
    if (!tree.contains(s)) throw Error(Errc::NotANode, s.to_string() + " is not a node of " + tree.name(), {s});
    if (s.top() > a.front())
        throw Error(Errc::PremiseViolated, "s within [0, a_1] (max(s) = " + std::to_string(s.top()) + ")", {s});
    const auto g = solver.survival_value(s);
    const int n = static_cast<int>(b.size());
    if (!g.is_finite() || g.value >= n)
        throw Error(Errc::PremiseViolated, "g(s) = k < n (g = " + g.to_string() + ", n = " + std::to_string(n) + ")", {s});

    Tmp1Report out;
    out.n = n;
    out.k = g.value;

    const Nat last = a.back();
    auto avoided = [&](Nat x) {
        for (int i = 0; i < n; ++i)
            if (a[i] < x && x < b[i]) return false;
        return x <= last;
    };
    auto gap_bit = [&](Nat x) -> Mask {
        for (int i = 0; i < n; ++i)
            if (b[i] <= x && x <= a[i + 1]) return bit(i);
        return 0;
    };

    std::map<Mask, NodeSeq> first_at;
    std::unordered_set<StateKey, StateKeyHash> visited;
    std::function<void(const NodeSeq&, Mask)> walk = [&](const NodeSeq& t, Mask hit) {
        auto key = tree.state_key(t);
        key.push_back(static_cast<Nat>(hit));
        if (!visited.insert(std::move(key)).second) return;
        if (visited.size() > state_budget)
            throw Error(Errc::BudgetExceeded, "tmp1 search exceeded " + std::to_string(state_budget) + " states", {t});
        first_at.emplace(hit, t);
        for (Nat x : tree.son_elements(t, last))
            if (avoided(x)) walk(t.extended(x), hit | gap_bit(x));
    };
    walk(s, 0);
    out.states = visited.size();

    for (const auto& [hit, node] : first_at) {
        const int c = std::popcount(hit);
        if (c > out.max_gaps_hit) out.max_gaps_hit = c;
        if (c > out.k && (!out.over_witness || shortlex_less(node, *out.over_witness))) out.over_witness = node;
    }
    for (Mask pattern = 0; pattern < bit(n); ++pattern) {
        if (std::popcount(pattern) != out.k) continue;
        if (auto it = first_at.find(pattern); it != first_at.end())
            out.witnesses.emplace_back(pattern, it->second);
        else
            out.missing.push_back(pattern);
    }
    return out;
}

std::optional<NodeSeq> node_with_value_within(GameSolver& solver, Nat bound, int k)
{
    const auto& tree = solver.tree();
    std::optional<NodeSeq> best;
    std::unordered_set<StateKey, StateKeyHash> seen;
    std::function<void(const NodeSeq&)> walk = [&](const NodeSeq& t) {
        auto key = tree.state_key(t);
        key.push_back(static_cast<Nat>(t.size()));
        if (!seen.insert(std::move(key)).second) return;
        const auto e = solver.entry(t);
        if (e.value == k && (!best || shortlex_less(t, *best))) best = t;
        if (e.subtree_max < k) return;
        for (Nat x : tree.son_elements(t, bound)) walk(t.extended(x));
    };
    walk(NodeSeq{});
    return best;
}

bool TmpPipelineReport::passed() const noexcept
{
    if (!values_without_base.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second.passed(); });
}

TmpPipelineReport run_tmp_pipeline(const TreePresentation& tree,
                                   const NodeSeq& s,
                                   const GameBounds& bounds,
                                   std::optional<Nat> start)
{
    TmpPipelineReport out;
    out.witness = build_tmp2_witness(tree, s, bounds, start);
    GameSolver solver(tree, bounds);
    const Nat a1 = out.witness.sets.a.front();
    for (int k = 0; k < out.witness.n; ++k) {
        auto base = node_with_value_within(solver, a1, k);
        if (!base) {
            out.values_without_base.push_back(k);
            continue;
        }
        out.checks.emplace_back(*base, check_tmp1(tree, *base, out.witness.sets.a, out.witness.sets.b, bounds));
    }
    return out;
}

std::vector<Nat> a_subset(const NodeSeq& s, const std::vector<Nat>& a, const std::vector<Nat>& b)
{
    std::vector<Nat> out;
    for (std::size_t k = 0; k < b.size(); ++k)
        for (Nat x : s)
            if (a[k] < x && x < b[k]) return out;
    auto meets = [&](Nat lo, Nat hi) { return std::any_of(s.begin(), s.end(), [&](Nat x) { return lo <= x && x <= hi; }); };
    for (std::size_t i = 0; i < a.size() && i <= b.size(); ++i) {
        const Nat lo = i == 0 ? s.top() : b[i - 1];
        if (meets(lo, a[i])) out.push_back(a[i]);
    }
    return out;
}

} // namespace treerank
