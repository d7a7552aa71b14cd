#include "treerank/formula.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "treerank/error.hpp"

namespace treerank {

std::string_view to_string(Sort s) noexcept
{
    switch (s) {
    case Sort::elem: return "elem";
    case Sort::idx: return "idx";
    case Sort::param: return "param";
    }
    return "elem";
}

namespace {

using K = Formula::Kind;
using SK = SetTerm::Kind;

bool is_numeral(const std::string& name) { return !name.empty() && std::isdigit(static_cast<unsigned char>(name[0])); }

// ---------------------------------------------------------------------------
// Evaluation

class Evaluator {
public:
    Evaluator(const FiniteStructure& st, const Valuation& val) : st_(st)
    {
        for (const auto& [name, value] : val) scope_.emplace_back(&name, value);
        for (Nat x = 0; x <= st_.universe; ++x) elements_.push_back(x);
    }

    bool eval(const Formula& f)
    {
        switch (f.kind) {
        case K::truth: return true;
        case K::falsity: return false;
        case K::negation: return !eval(f.sub[0]);
        case K::conjunction: return eval(f.sub[0]) && eval(f.sub[1]);
        case K::disjunction: return eval(f.sub[0]) || eval(f.sub[1]);
        case K::implication: return !eval(f.sub[0]) || eval(f.sub[1]);
        case K::forall:
        case K::exists: {
            const bool want = f.kind == K::exists;
            scope_.emplace_back(&f.var, 0);
            const std::size_t slot = scope_.size() - 1;
            bool result = !want;
            for (Nat v : domain(f.sort)) {
                scope_[slot].second = v;
                if (eval(f.sub[0]) == want) {
                    result = want;
                    break;
                }
            }
            scope_.pop_back();
            return result;
        }
        case K::rel_b: {
            if (!st_.binary) throw Error(Errc::ArityMismatch, "B(x,i) used on a structure without B");
            const Nat x = value(f.vars[0]);
            const Nat i = index(f.vars[1]);
            return in_range(x) && ((*st_.binary)[i] & bit(x));
        }
        case K::rel_c: {
            if (!st_.ternary) throw Error(Errc::ArityMismatch, "C(x,i,z) used on a structure without C");
            const Nat x = value(f.vars[0]);
            const Nat i = index(f.vars[1]);
            const Nat z = param(f.vars[2]);
            return in_range(x) && ((*st_.ternary)[z][i] & bit(x));
        }
        case K::eq: return value(f.vars[0]) == value(f.vars[1]);
        case K::lt: return value(f.vars[0]) < value(f.vars[1]);
        case K::le: return value(f.vars[0]) <= value(f.vars[1]);
        case K::member: {
            const Nat x = value(f.vars[0]);
            return in_range(x) && (set(f.sets[0]) & bit(x));
        }
        case K::set_eq: return set(f.sets[0]) == set(f.sets[1]);
        case K::subset: return (set(f.sets[0]) & ~set(f.sets[1])) == 0;
        case K::is_empty: return set(f.sets[0]) == 0;
        case K::max_eq: return top(set(f.sets[0])) == top(set(f.sets[1]));
        case K::min_eq: return bottom(set(f.sets[0])) == bottom(set(f.sets[1]));
        }
        return false;
    }

    Mask set(const SetTerm& t)
    {
        switch (t.kind) {
        case SK::fiber:
            if (t.vars.size() == 1) {
                if (!st_.binary) throw Error(Errc::ArityMismatch, "fiber(i) used on a structure without B");
                return fiber(st_, index(t.vars[0]));
            }
            if (!st_.ternary) throw Error(Errc::ArityMismatch, "fiber(z,i) used on a structure without C");
            return fiber(st_, param(t.vars[0]), index(t.vars[1]));
        case SK::carrier: return st_.carrier_mask();
        case SK::empty: return 0;
        case SK::singleton: {
            const Nat x = value(t.vars[0]);
            return in_range(x) ? bit(x) : 0;
        }
        case SK::unite: return set(t.args[0]) | set(t.args[1]);
        case SK::minus: return set(t.args[0]) & ~set(t.args[1]);
        case SK::intersect: return set(t.args[0]) & set(t.args[1]);
        case SK::slice: {
            const Nat a = std::max<Nat>(value(t.vars[0]), 0);
            const Nat b = std::min<Nat>(value(t.vars[1]), 64);
            if (a >= b) return 0;
            const Mask upto_b = b >= 64 ? ~Mask{0} : bit(b) - 1;
            return set(t.args[0]) & upto_b & ~(bit(a) - 1);
        }
        }
        return 0;
    }

private:
    static bool in_range(Nat x) { return x >= 0 && x <= kMaxUniverse; }
    static int top(Mask m) { return m ? 63 - std::countl_zero(m) : -1; }
    static int bottom(Mask m) { return m ? std::countr_zero(m) : 64; }

    const std::vector<Nat>& domain(Sort s) const
    {
        switch (s) {
        case Sort::idx: return st_.indices;
        case Sort::param: return st_.params;
        case Sort::elem: break;
        }
        return elements_;
    }

    Nat value(const std::string& name) const
    {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (*it->first == name) return it->second;
        if (is_numeral(name)) return std::stoi(name);
        throw Error(Errc::UnboundVariable, "variable '" + name + "' is not bound");
    }

    Nat index(const std::string& name) const
    {
        const Nat i = value(name);
        if (!st_.is_index(i)) throw Error(Errc::IndexOutOfUniverse, name + " = " + std::to_string(i) + " is not in I");
        return i;
    }

    Nat param(const std::string& name) const
    {
        const Nat z = value(name);
        if (!st_.is_param(z)) throw Error(Errc::IndexOutOfUniverse, name + " = " + std::to_string(z) + " is not in A");
        return z;
    }

    const FiniteStructure& st_;
    std::vector<std::pair<const std::string*, Nat>> scope_;
    std::vector<Nat> elements_;
};

// ---------------------------------------------------------------------------
// Construction helpers

Formula node(K kind, std::vector<Formula> sub = {})
{
    Formula f;
    f.kind = kind;
    f.sub = std::move(sub);
    return f;
}

Formula atom(K kind, std::vector<std::string> vars, std::vector<SetTerm> sets = {})
{
    Formula f;
    f.kind = kind;
    f.vars = std::move(vars);
    f.sets = std::move(sets);
    return f;
}

Formula quant(K kind, std::string var, Sort sort, Formula body)
{
    Formula f = node(kind, {std::move(body)});
    f.var = std::move(var);
    f.sort = sort;
    return f;
}

SetTerm term(SK kind, std::vector<std::string> vars = {}, std::vector<SetTerm> args = {})
{
    SetTerm t;
    t.kind = kind;
    t.vars = std::move(vars);
    t.args = std::move(args);
    return t;
}

// ---------------------------------------------------------------------------
// Free variables

void collect(const SetTerm& t, const std::set<std::string>& bound, std::set<std::string>& out)
{
    for (const auto& v : t.vars)
        if (!bound.count(v) && !is_numeral(v)) out.insert(v);
    for (const auto& a : t.args) collect(a, bound, out);
}

void collect(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out)
{
    if (f.kind == K::forall || f.kind == K::exists) {
        const bool fresh = bound.insert(f.var).second;
        collect(f.sub[0], bound, out);
        if (fresh) bound.erase(f.var);
        return;
    }
    for (const auto& v : f.vars)
        if (!bound.count(v) && !is_numeral(v)) out.insert(v);
    for (const auto& t : f.sets) collect(t, bound, out);
    for (const auto& s : f.sub) collect(s, bound, out);
}

// ---------------------------------------------------------------------------
// Expansion

class Expander {
public:
    Formula run(const Formula& f)
    {
        switch (f.kind) {
        case K::member:
            if (f.sets[0].kind == SK::carrier) return f;
            return in(f.vars[0], f.sets[0]);
        case K::set_eq: {
            auto x = fresh();
            return quant(K::forall, x, Sort::elem,
                         node(K::conjunction, {node(K::implication, {in(x, f.sets[0]), in(x, f.sets[1])}),
                                               node(K::implication, {in(x, f.sets[1]), in(x, f.sets[0])})}));
        }
        case K::subset: {
            auto x = fresh();
            return quant(K::forall, x, Sort::elem, node(K::implication, {in(x, f.sets[0]), in(x, f.sets[1])}));
        }
        case K::is_empty: {
            auto x = fresh();
            return quant(K::forall, x, Sort::elem, node(K::negation, {in(x, f.sets[0])}));
        }
        case K::max_eq:
        case K::min_eq: {
            auto empty_t = run(atom(K::is_empty, {}, {f.sets[0]}));
            auto empty_u = run(atom(K::is_empty, {}, {f.sets[1]}));
            auto x = fresh();
            auto y = fresh();
            auto order = f.kind == K::max_eq ? atom(K::le, {y, x}) : atom(K::le, {x, y});
            auto extreme = quant(
                K::exists, x, Sort::elem,
                node(K::conjunction,
                     {node(K::conjunction, {in(x, f.sets[0]), in(x, f.sets[1])}),
                      quant(K::forall, y, Sort::elem,
                            node(K::implication,
                                 {node(K::disjunction, {in(y, f.sets[0]), in(y, f.sets[1])}), std::move(order)}))}));
            return node(K::disjunction, {node(K::conjunction, {std::move(empty_t), std::move(empty_u)}), std::move(extreme)});
        }
        default: break;
        }
        Formula out = f;
        for (auto& s : out.sub) s = run(s);
        return out;
    }

private:
    std::string fresh() { return "_v" + std::to_string(++counter_); }

    /// x ∈ t as an element-level formula.
    Formula in(const std::string& x, const SetTerm& t)
    {
        switch (t.kind) {
        case SK::fiber: {
            auto carrier = atom(K::member, {x}, {term(SK::carrier)});
            auto rel = t.vars.size() == 1 ? atom(K::rel_b, {x, t.vars[0]}) : atom(K::rel_c, {x, t.vars[1], t.vars[0]});
            return node(K::conjunction, {std::move(carrier), std::move(rel)});
        }
        case SK::carrier: return atom(K::member, {x}, {term(SK::carrier)});
        case SK::empty: return node(K::falsity);
        case SK::singleton: return atom(K::eq, {x, t.vars[0]});
        case SK::unite: return node(K::disjunction, {in(x, t.args[0]), in(x, t.args[1])});
        case SK::minus: return node(K::conjunction, {in(x, t.args[0]), node(K::negation, {in(x, t.args[1])})});
        case SK::intersect: return node(K::conjunction, {in(x, t.args[0]), in(x, t.args[1])});
        case SK::slice:
            return node(K::conjunction, {node(K::conjunction, {in(x, t.args[0]), atom(K::le, {t.vars[0], x})}),
                                         atom(K::lt, {x, t.vars[1]})});
        }
        return node(K::falsity);
    }

    int counter_ = 0;
};

// ---------------------------------------------------------------------------
// Parsing

struct Token {
    enum class Type { ident, symbol, end };
    Type type = Type::end;
    std::string text;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Token::Type::ident, std::string(src.substr(i, j - i)), i});
            i = j;
            continue;
        }
        if (src.substr(i, 2) == "->" || src.substr(i, 2) == "<=") {
            out.push_back({Token::Type::symbol, std::string(src.substr(i, 2)), i});
            i += 2;
            continue;
        }
        if (std::string_view("(),.:{}=<+-&").find(c) != std::string_view::npos) {
            out.push_back({Token::Type::symbol, std::string(1, c), i});
            ++i;
            continue;
        }
        throw Error(Errc::ParseError, "unexpected character '" + std::string(1, c) + "' at " + std::to_string(i));
    }
    out.push_back({Token::Type::end, "", src.size()});
    return out;
}

const std::set<std::string>& keywords()
{
    static const std::set<std::string> k{"forall", "exists", "and", "or",    "not", "true",  "false", "in",
                                         "sub",    "fiber",  "slice", "empty", "max", "min",   "S"};
    return k;
}

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

    Formula parse()
    {
        Formula f = implication();
        if (peek().type != Token::Type::end) fail("trailing input");
        return f;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
    bool at(std::string_view text, std::size_t ahead = 0) const
    {
        return peek(ahead).type != Token::Type::end && peek(ahead).text == text;
    }
    bool accept(std::string_view text)
    {
        if (!at(text)) return false;
        ++pos_;
        return true;
    }
    void expect(std::string_view text)
    {
        if (!accept(text)) fail("expected '" + std::string(text) + "'");
    }
    [[noreturn]] void fail(const std::string& why) const
    {
        const auto& t = peek();
        throw Error(Errc::ParseError,
                    why + " at offset " + std::to_string(t.pos) + (t.type == Token::Type::end ? " (end)" : " near '" + t.text + "'"));
    }

    std::string variable()
    {
        const auto& t = peek();
        if (t.type != Token::Type::ident || keywords().count(t.text)) fail("expected a variable");
        ++pos_;
        return t.text;
    }

    Formula implication()
    {
        Formula lhs = disjunction();
        if (accept("->")) return node(K::implication, {std::move(lhs), implication()});
        return lhs;
    }

    Formula disjunction()
    {
        Formula f = conjunction();
        while (accept("or")) f = node(K::disjunction, {std::move(f), conjunction()});
        return f;
    }

    Formula conjunction()
    {
        Formula f = unary();
        while (accept("and")) f = node(K::conjunction, {std::move(f), unary()});
        return f;
    }

    Formula unary()
    {
        if (accept("not")) return node(K::negation, {unary()});
        if (at("forall") || at("exists")) {
            const K kind = at("forall") ? K::forall : K::exists;
            ++pos_;
            std::vector<std::pair<std::string, Sort>> binders;
            do {
                auto name = variable();
                expect(":");
                binders.emplace_back(std::move(name), sort());
            } while (accept(","));
            expect(".");
            Formula body = implication();
            for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = quant(kind, it->first, it->second, std::move(body));
            return body;
        }
        return primary();
    }

    Sort sort()
    {
        const auto& t = peek();
        if (t.type != Token::Type::ident) fail("expected a sort");
        ++pos_;
        if (t.text == "elem") return Sort::elem;
        if (t.text == "idx") return Sort::idx;
        if (t.text == "param") return Sort::param;
        throw Error(Errc::UnknownUniverse, "unknown universe '" + t.text + "' (use elem, idx or param)");
    }

    Formula primary()
    {
        if (accept("true")) return node(K::truth);
        if (accept("false")) return node(K::falsity);
        if (at("(")) {
            const std::size_t save = pos_;
            try {
                ++pos_;
                Formula f = implication();
                expect(")");
                // "(T + U) = V" starts like a group but is a set atom
                if (!at("=") && !at("sub")) return f;
            } catch (const Error& e) {
                if (e.code() != Errc::ParseError) throw;
            }
            pos_ = save;
            return set_atom();
        }
        if ((at("B") || at("C")) && at("(", 1)) {
            const K kind = at("B") ? K::rel_b : K::rel_c;
            pos_ += 2;
            std::vector<std::string> args{variable()};
            expect(",");
            args.push_back(variable());
            if (kind == K::rel_c) {
                expect(",");
                args.push_back(variable());
            }
            expect(")");
            return atom(kind, std::move(args));
        }
        if (at("empty") && at("(", 1)) {
            pos_ += 2;
            SetTerm t = set_term();
            expect(")");
            return atom(K::is_empty, {}, {std::move(t)});
        }
        if (at("max") || at("min")) {
            const std::string which = peek().text;
            const K kind = which == "max" ? K::max_eq : K::min_eq;
            ++pos_;
            expect("(");
            SetTerm a = set_term();
            expect(")");
            expect("=");
            expect(which);
            expect("(");
            SetTerm b = set_term();
            expect(")");
            return atom(kind, {}, {std::move(a), std::move(b)});
        }
        if (at("fiber") || at("S") || at("{") || at("slice")) return set_atom();
        auto x = variable();
        if (accept("=")) return atom(K::eq, {x, variable()});
        if (accept("<=")) return atom(K::le, {x, variable()});
        if (accept("<")) return atom(K::lt, {x, variable()});
        if (accept("in")) return atom(K::member, {x}, {set_term()});
        fail("expected =, <, <= or in after a variable");
    }

    Formula set_atom()
    {
        SetTerm a = set_term();
        if (accept("=")) return atom(K::set_eq, {}, {std::move(a), set_term()});
        if (accept("sub")) return atom(K::subset, {}, {std::move(a), set_term()});
        fail("expected = or sub after a set term");
    }

    SetTerm set_term()
    {
        SetTerm t = set_primary();
        while (true) {
            SK kind;
            if (accept("+"))
                kind = SK::unite;
            else if (accept("-"))
                kind = SK::minus;
            else if (accept("&"))
                kind = SK::intersect;
            else
                return t;
            t = term(kind, {}, {std::move(t), set_primary()});
        }
    }

    SetTerm set_primary()
    {
        if (accept("(")) {
            SetTerm t = set_term();
            expect(")");
            return t;
        }
        if (accept("S")) return term(SK::carrier);
        if (accept("{")) {
            if (accept("}")) return term(SK::empty);
            auto x = variable();
            expect("}");
            return term(SK::singleton, {x});
        }
        if (accept("fiber")) {
            expect("(");
            std::vector<std::string> args{variable()};
            if (accept(",")) args.push_back(variable());
            expect(")");
            return term(SK::fiber, std::move(args));
        }
        if (accept("slice")) {
            expect("(");
            SetTerm inner = set_term();
            expect(",");
            auto a = variable();
            expect(",");
            auto b = variable();
            expect(")");
            return term(SK::slice, {a, b}, {std::move(inner)});
        }
        fail("expected a set term");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Builtins, written in the formula syntax

std::string fib(const std::string& z, const std::string& i) { return z.empty() ? "fiber(" + i + ")" : "fiber(" + z + "," + i + ")"; }

/// "B_z realises a number on S"; z empty means B itself.
std::string realises_number_text(const std::string& z)
{
    return "((forall i:idx . forall j:idx . (" + fib(z, "i") + " sub " + fib(z, "j") + " -> " + fib(z, "i") + " = "
           + fib(z, "j") + ")) and (forall i:idx . forall a:elem . forall b:elem . ((a in " + fib(z, "i")
           + " and b in S - " + fib(z, "i") + ") -> exists j:idx . " + fib(z, "j") + " = " + fib(z, "i")
           + " + {b} - {a})))";
}

std::string three_numbers() { return realises_number_text("n") + " and " + realises_number_text("m") + " and " + realises_number_text("l"); }

} // namespace

bool evaluate(const FiniteStructure& st, const Formula& f, const Valuation& val)
{
    Evaluator ev(st, val);
    return ev.eval(f);
}

std::set<std::string> free_vars(const Formula& f)
{
    std::set<std::string> bound, out;
    collect(f, bound, out);
    return out;
}

Formula expand(const Formula& f) { return Expander().run(f); }

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const SetTerm& t)
{
    switch (t.kind) {
    case SK::fiber: return t.vars.size() == 1 ? "fiber(" + t.vars[0] + ")" : "fiber(" + t.vars[0] + ", " + t.vars[1] + ")";
    case SK::carrier: return "S";
    case SK::empty: return "{}";
    case SK::singleton: return "{" + t.vars[0] + "}";
    case SK::unite: return "(" + to_string(t.args[0]) + " + " + to_string(t.args[1]) + ")";
    case SK::minus: return "(" + to_string(t.args[0]) + " - " + to_string(t.args[1]) + ")";
    case SK::intersect: return "(" + to_string(t.args[0]) + " & " + to_string(t.args[1]) + ")";
    case SK::slice: return "slice(" + to_string(t.args[0]) + ", " + t.vars[0] + ", " + t.vars[1] + ")";
    }
    return "{}";
}

std::string to_string(const Formula& f)
{
    switch (f.kind) {
    case K::truth: return "true";
    case K::falsity: return "false";
    case K::negation: return "not " + to_string(f.sub[0]);
    case K::conjunction: return "(" + to_string(f.sub[0]) + " and " + to_string(f.sub[1]) + ")";
    case K::disjunction: return "(" + to_string(f.sub[0]) + " or " + to_string(f.sub[1]) + ")";
    case K::implication: return "(" + to_string(f.sub[0]) + " -> " + to_string(f.sub[1]) + ")";
    case K::forall:
    case K::exists:
        return std::string("(") + (f.kind == K::forall ? "forall " : "exists ") + f.var + ":" + std::string(to_string(f.sort))
               + " . " + to_string(f.sub[0]) + ")";
    case K::rel_b: return "B(" + f.vars[0] + ", " + f.vars[1] + ")";
    case K::rel_c: return "C(" + f.vars[0] + ", " + f.vars[1] + ", " + f.vars[2] + ")";
    case K::eq: return f.vars[0] + " = " + f.vars[1];
    case K::lt: return f.vars[0] + " < " + f.vars[1];
    case K::le: return f.vars[0] + " <= " + f.vars[1];
    case K::member: return f.vars[0] + " in " + to_string(f.sets[0]);
    case K::set_eq: return to_string(f.sets[0]) + " = " + to_string(f.sets[1]);
    case K::subset: return to_string(f.sets[0]) + " sub " + to_string(f.sets[1]);
    case K::is_empty: return "empty(" + to_string(f.sets[0]) + ")";
    case K::max_eq: return "max(" + to_string(f.sets[0]) + ") = max(" + to_string(f.sets[1]) + ")";
    case K::min_eq: return "min(" + to_string(f.sets[0]) + ") = min(" + to_string(f.sets[1]) + ")";
    }
    return "false";
}

std::vector<std::string> builtin_names() { return {"addition", "multiplication", "realises_arithmetic", "realises_number"}; }

Formula builtin(std::string_view name)
{
    if (name == "realises_number") return parse_formula(realises_number_text(""));
    if (name == "realises_arithmetic")
        return parse_formula("(exists z:param . forall i:idx . empty(fiber(z,i))) and (forall z:param . (("
                             + realises_number_text("z")
                             + " and exists i:idx . not fiber(z,i) = S) -> exists u:param . ("
                             + realises_number_text("u")
                             + " and exists i:idx . exists j:idx . exists a:elem . (a in S - fiber(z,i) and fiber(u,j) = "
                               "fiber(z,i) + {a}))))");
    if (name == "addition")
        return parse_formula(three_numbers()
                             + " and exists i:idx . exists j:idx . exists k:idx . (fiber(l,k) = fiber(n,i) + fiber(m,j) "
                               "and empty(fiber(n,i) & fiber(m,j)))");
    if (name == "multiplication")
        return parse_formula(
            three_numbers()
            + " and exists i:idx . exists j:idx . (fiber(n,i) sub fiber(l,j) and max(fiber(l,j)) = max(fiber(n,i)) and "
              "min(fiber(l,j)) = min(fiber(n,i)) and forall a:elem . forall b:elem . ((a in fiber(n,i) and b in "
              "fiber(n,i) and a < b and forall c:elem . (c in fiber(n,i) -> (a < c -> b <= c))) -> exists k:idx . "
              "fiber(m,k) = slice(fiber(l,j), a, b)))");
    throw Error(Errc::UnknownBuiltin, "unknown builtin '" + std::string(name) + "'");
}

} // namespace treerank
