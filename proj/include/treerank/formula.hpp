#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "treerank/structure.hpp"

namespace treerank {

/// The finite universe a quantified variable ranges over.
enum class Sort { elem, idx, param };

std::string_view to_string(Sort s) noexcept;

/// A set-valued term. Fibers are always cut down to the carrier S.
///
///   fiber(i)         s^B_i
///   fiber(z, i)      s^{B_z}_i = S ∩ {x : C(x, i, z)}
///   S, {}, {x}
///   T + U, T - U, T & U
///   slice(T, a, b)   {x ∈ T : a <= x < b}
struct SetTerm {
    enum class Kind { fiber, carrier, empty, singleton, unite, minus, intersect, slice };
    Kind kind = Kind::empty;
    std::vector<std::string> vars;  // fiber: [i] or [z, i]; singleton: [x]; slice: [a, b]
    std::vector<SetTerm> args;      // operands

    friend bool operator==(const SetTerm&, const SetTerm&) = default;
};

struct Formula {
    enum class Kind {
        truth,
        falsity,
        negation,
        conjunction,
        disjunction,
        implication,
        forall,
        exists,
        rel_b,     // B(x, i), raw table
        rel_c,     // C(x, i, z), raw table
        eq,        // x = y
        lt,        // x < y
        le,        // x <= y
        member,    // x in T
        set_eq,    // T = U
        subset,    // T sub U
        is_empty,  // empty(T)
        max_eq,    // max(T) = max(U); max of {} sits below everything
        min_eq,    // min(T) = min(U); min of {} sits above everything
    };
    Kind kind = Kind::truth;
    std::vector<Formula> sub;
    std::string var;  // bound variable
    Sort sort = Sort::elem;
    std::vector<std::string> vars;  // element-level arguments
    std::vector<SetTerm> sets;      // set-level arguments

    friend bool operator==(const Formula&, const Formula&) = default;
};

using Valuation = std::map<std::string, Nat>;

/// Tarskian truth over the structure's finite universes: elem ranges over
/// [0, universe], idx over I, param over A. Throws UnboundVariable,
/// ArityMismatch (fiber/relation arity the structure lacks) and
/// IndexOutOfUniverse (a fiber index outside I or A).
bool evaluate(const FiniteStructure& st, const Formula& f, const Valuation& val = {});

std::set<std::string> free_vars(const Formula& f);

/// Rewrites every set-level atom into element quantifiers over B, C, = and
/// <, keeping `x in S` as the only membership primitive. Truth is preserved.
Formula expand(const Formula& f);

/// ASCII syntax:
///   forall x:elem . f    exists i:idx . f    (sorts elem | idx | param)
///   not f,  f and g,  f or g,  f -> g,  true,  false,  ( f )
///   B(x,i)  C(x,i,z)  x = y  x < y  x <= y  x in T
///   T = U   T sub U   empty(T)   max(T) = max(U)   min(T) = min(U)
/// Quantifier bodies extend as far right as possible; -> is right
/// associative and binds loosest. Throws ParseError, UnknownUniverse.
Formula parse_formula(std::string_view text);
std::string to_string(const Formula& f);
std::string to_string(const SetTerm& t);

/// realises_number (closed, over B), realises_arithmetic (closed, over C),
/// addition and multiplication (over C, free variables n, m, l).
/// Throws UnknownBuiltin.
Formula builtin(std::string_view name);
std::vector<std::string> builtin_names();

} // namespace treerank
