#pragma once

// Seeded generators of closed random formulas and small random structures,
// shared by the evaluator tests and the acceptance run.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "treerank/formula.hpp"
#include "treerank/structure.hpp"

namespace testgen {

using namespace treerank;

struct Scope {
    std::vector<std::string> elem, idx, param;

    std::vector<std::string>& of(Sort s)
    {
        return s == Sort::elem ? elem : s == Sort::idx ? idx : param;
    }
};

/// Closed random formulas over B and C; every atom only uses bound names.
class FormulaGen {
public:
    explicit FormulaGen(std::mt19937& rng) : rng_(rng) {}

    Formula formula(int depth, Scope scope)
    {
        if (depth == 0) return atom(scope);
        switch (pick(7)) {
        case 0: return wrap(Formula::Kind::negation, {formula(depth - 1, scope)});
        case 1: return wrap(Formula::Kind::conjunction, {formula(depth - 1, scope), formula(depth - 1, scope)});
        case 2: return wrap(Formula::Kind::disjunction, {formula(depth - 1, scope), formula(depth - 1, scope)});
        case 3: return wrap(Formula::Kind::implication, {formula(depth - 1, scope), formula(depth - 1, scope)});
        case 4:
        case 5: {
            const Sort sort = static_cast<Sort>(pick(3));
            auto& names = scope.of(sort);
            // sometimes shadow a name of the same sort
            std::string name = !names.empty() && pick(4) == 0 ? names[pick(names.size())] : "v" + std::to_string(++fresh_);
            names.push_back(name);
            Formula f = wrap(pick(2) ? Formula::Kind::forall : Formula::Kind::exists, {formula(depth - 1, scope)});
            f.var = name;
            f.sort = sort;
            return f;
        }
        default: return atom(scope);
        }
    }

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    static Formula wrap(Formula::Kind k, std::vector<Formula> sub)
    {
        Formula f;
        f.kind = k;
        f.sub = std::move(sub);
        return f;
    }

    const std::string& any(const std::vector<std::string>& v) { return v[pick(v.size())]; }

    SetTerm set(int depth, const Scope& sc)
    {
        using K = SetTerm::Kind;
        SetTerm t;
        for (int tries = 0; tries < 8; ++tries) {
            const auto k = static_cast<K>(pick(8));
            if (k == K::fiber && !sc.idx.empty()) {
                t.kind = k;
                if (!sc.param.empty() && pick(2)) t.vars = {any(sc.param), any(sc.idx)};
                else t.vars = {any(sc.idx)};
                return t;
            }
            if (k == K::carrier || k == K::empty) {
                t.kind = k;
                return t;
            }
            if (k == K::singleton && !sc.elem.empty()) {
                t.kind = k;
                t.vars = {any(sc.elem)};
                return t;
            }
            if ((k == K::unite || k == K::minus || k == K::intersect) && depth > 0) {
                t.kind = k;
                t.args = {set(depth - 1, sc), set(depth - 1, sc)};
                return t;
            }
            if (k == K::slice && depth > 0 && !sc.elem.empty()) {
                t.kind = k;
                t.vars = {any(sc.elem), any(sc.elem)};
                t.args = {set(depth - 1, sc)};
                return t;
            }
        }
        t.kind = K::carrier;
        return t;
    }

    Formula atom(const Scope& sc)
    {
        using K = Formula::Kind;
        Formula f;
        for (int tries = 0; tries < 10; ++tries) {
            switch (pick(12)) {
            case 0:
                if (sc.elem.empty() || sc.idx.empty()) break;
                f.kind = K::rel_b;
                f.vars = {any(sc.elem), any(sc.idx)};
                return f;
            case 1:
                if (sc.elem.empty() || sc.idx.empty() || sc.param.empty()) break;
                f.kind = K::rel_c;
                f.vars = {any(sc.elem), any(sc.idx), any(sc.param)};
                return f;
            case 2:
            case 3:
            case 4: {
                if (sc.elem.empty()) break;
                const K ks[] = {K::eq, K::lt, K::le};
                f.kind = ks[pick(3)];
                f.vars = {any(sc.elem), any(sc.elem)};
                return f;
            }
            case 5:
                if (sc.elem.empty()) break;
                f.kind = K::member;
                f.vars = {any(sc.elem)};
                f.sets = {set(2, sc)};
                return f;
            case 6:
            case 7:
            case 8:
            case 9: {
                const K ks[] = {K::set_eq, K::subset, K::max_eq, K::min_eq};
                f.kind = ks[pick(4)];
                f.sets = {set(2, sc), set(2, sc)};
                return f;
            }
            case 10:
                f.kind = K::is_empty;
                f.sets = {set(2, sc)};
                return f;
            default:
                f.kind = pick(2) ? K::truth : K::falsity;
                return f;
            }
        }
        f.kind = K::truth;
        return f;
    }

    std::mt19937& rng_;
    int fresh_ = 0;
};

inline FiniteStructure random_structure(std::mt19937& rng)
{
    auto roll = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const Nat u = roll(1, 5);
    auto subset = [&](int max_size) {
        std::vector<Nat> out;
        for (Nat x = 0; x <= u; ++x)
            if (roll(0, 1)) out.push_back(x);
        std::shuffle(out.begin(), out.end(), rng);
        if (static_cast<int>(out.size()) > max_size) out.resize(max_size);
        if (out.empty()) out.push_back(roll(0, u));
        std::sort(out.begin(), out.end());
        return out;
    };
    auto st = ternary_structure(subset(6), subset(3), subset(2));
    st.universe = u;
    st.ternary = std::vector<std::vector<Mask>>(u + 1, std::vector<Mask>(u + 1, 0));
    st.binary = std::vector<Mask>(u + 1, 0);
    const Mask all = bit(u + 1) - 1;
    for (Nat i : st.indices) {
        (*st.binary)[i] = std::uniform_int_distribution<Mask>(0, all)(rng);
        for (Nat a : st.params) (*st.ternary)[a][i] = std::uniform_int_distribution<Mask>(0, all)(rng);
    }
    return st;
}

inline int formula_depth(const Formula& f)
{
    int d = 0;
    for (const auto& s : f.sub) d = std::max(d, 1 + formula_depth(s));
    return d;
}

} // namespace testgen
