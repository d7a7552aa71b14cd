#include "treerank/rank.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "treerank/error.hpp"

namespace treerank {

std::string RankValue::to_string() const
{
    switch (tag) {
    case Tag::finite: return "finite(" + std::to_string(value) + ")";
    case Tag::infinite_evidence: return "infinite_evidence(" + (witness ? witness->to_string() : "?") + ")";
    case Tag::unknown: return "unknown";
    }
    return "unknown";
}

RankValue rank(GameSolver& solver, const NodeSeq& s)
{
    require_node(solver.tree(), s);
    RankValue out;
    out.bounds = solver.bounds();
    const int cap = solver.bounds().cap;
    const auto e = solver.entry(s);
    if (e.subtree_max < cap) {
        out.tag = RankValue::Tag::finite;
        out.value = e.subtree_max;
        return out;
    }
    out.tag = RankValue::Tag::infinite_evidence;
    out.value = cap;
    if (e.value >= cap) {
        out.witness = s;
    } else {
        out.witness = solver.find_first(
            s, s.top(), [cap](const GameSolver::Entry& x) { return x.value >= cap; },
            [cap](const GameSolver::Entry& x) { return x.subtree_max >= cap; });
    }
    return out;
}

RankValue rank(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    return rank(solver, s);
}

RegularityReport is_regular(GameSolver& solver, const NodeSeq& s)
{
    RegularityReport out;
    out.node = s;
    out.g = solver.survival_value(s);
    out.regular = out.g.is_finite();
    out.rk = rank(solver, s);
    return out;
}

RegularityReport is_regular(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    return is_regular(solver, s);
}

void for_each_node_class(const TreePresentation& tree, Nat bound, const std::function<void(const NodeSeq&)>& visit)
{
    std::unordered_set<StateKey, StateKeyHash> seen;
    for_each_node(tree, bound, [&](const NodeSeq& s) {
        if (!seen.insert(tree.state_key(s)).second) return false;
        visit(s);
        return true;
    });
}

// ---------------------------------------------------------------------------

std::vector<NodeSeq> WitnessFunctions::nodes_within(Nat a)
{
    std::vector<NodeSeq> out;
    for_each_node_class(solver_.tree(), a, [&](const NodeSeq& s) { out.push_back(s); });
    return out;
}

Nat WitnessFunctions::phi(Nat a)
{
    if (auto it = phi_cache_.find(a); it != phi_cache_.end()) return it->second;
    const int cap = solver_.bounds().cap;
    Nat best = kBelowAll;
    for (const auto& s : nodes_within(a)) {
        const auto e = solver_.entry(s);
        if (e.value >= cap)
            throw Error(Errc::UnboundedRank, s.to_string() + " inside [0," + std::to_string(a) + "] is not regular",
                        {s});
        best = std::max(best, e.value == 0 ? s.top() : solver_.best_boundary(s));
    }
    const Nat value = best + 1;
    phi_cache_.emplace(a, value);
    return value;
}

Nat WitnessFunctions::psi(Nat a, Nat b)
{
    if (a >= b) throw Error(Errc::PreconditionFailed, "psi needs a < b");
    if (auto it = psi_cache_.find({a, b}); it != psi_cache_.end()) return it->second;
    const int cap = solver_.bounds().cap;
    Nat best = b;
    for (const auto& s : nodes_within(a)) {
        const auto e = solver_.entry(s);
        if (e.value >= cap)
            throw Error(Errc::UnboundedRank, s.to_string() + " inside [0," + std::to_string(a) + "] is not regular",
                        {s});
        if (e.value == 0) continue;
        if (!solver_.reply_value(s, b))
            throw Error(Errc::NoReplyPastB,
                        s.to_string() + " has no reply past " + std::to_string(b) + " within the universe", {s});
        best = std::max(best, solver_.best_reply(s, b).top());
    }
    const Nat value = best + 1;
    psi_cache_.emplace(std::make_pair(a, b), value);
    return value;
}

Nat phi(const TreePresentation& tree, Nat a, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    return WitnessFunctions(solver).phi(a);
}

Nat psi(const TreePresentation& tree, Nat a, Nat b, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    return WitnessFunctions(solver).psi(a, b);
}

std::size_t phi_jump_count(WitnessFunctions& fns, const NodeSeq& s)
{
    auto rk = rank(fns.solver(), s);
    if (!rk.is_finite())
        throw Error(Errc::UnboundedRank, s.to_string() + " does not have certified finite rank", {s});
    std::size_t jumps = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i + 1] > fns.phi(s[i])) ++jumps;
    return jumps;
}

std::size_t phi_jump_count(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    WitnessFunctions fns(solver);
    return phi_jump_count(fns, s);
}

// ---------------------------------------------------------------------------

RestrictedSubtree::RestrictedSubtree(const TreePresentation& tree, NodeSeq anchor, const GameBounds& bounds)
    : tree_(tree), anchor_(std::move(anchor)), bounds_(bounds)
{
    base_ = std::make_unique<GameSolver>(tree_, bounds_);
    auto rk = rank(*base_, anchor_);
    if (!rk.is_finite())
        throw Error(Errc::NotFiniteRank, "rk" + anchor_.to_string() + " is " + rk.to_string(), {anchor_});
    rank_ = rk.value;
}

std::string RestrictedSubtree::name() const { return "Tr_" + anchor_.to_string() + " of " + tree_.name(); }

int RestrictedSubtree::rank_at(GameSolver& solver, const NodeSeq& t) const
{
    const auto e = solver.entry(t);
    return e.subtree_max >= solver.bounds().cap ? -1 : e.subtree_max;
}

bool RestrictedSubtree::contains(const NodeSeq& t) const
{
    if (is_initial_segment(t, anchor_)) return true;
    if (!is_initial_segment(anchor_, t) || !tree_.contains(t)) return false;
    std::lock_guard lock(mutex_);
    return rank_at(*base_, t) == rank_;
}

std::vector<Nat> RestrictedSubtree::son_elements(const NodeSeq& t, Nat universe_bound) const
{
    if (t.size() < anchor_.size()) {
        Nat next = anchor_[t.size()];
        if (next <= universe_bound) return {next};
        return {};
    }
    std::vector<Nat> out;
    for (Nat b : tree_.son_elements(t, universe_bound))
        if (contains(t.extended(b))) out.push_back(b);
    return out;
}

Hint RestrictedSubtree::cofinal_hint(const NodeSeq& t, Nat) const
{
    if (t.size() < anchor_.size()) return Hint::no;
    std::lock_guard lock(mutex_);
    if (!doubled_) {
        GameBounds wide = bounds_;
        wide.universe_bound = bounds_.universe_bound * 2;
        doubled_ = std::make_unique<GameSolver>(tree_, wide);
    }
    const int wide_rank = rank_at(*doubled_, anchor_);
    std::size_t at_base = 0;
    for (Nat b : tree_.son_elements(t, bounds_.universe_bound))
        if (rank_at(*base_, t.extended(b)) == rank_) ++at_base;
    std::size_t at_double = 0;
    for (Nat b : tree_.son_elements(t, doubled_->bounds().universe_bound))
        if (rank_at(*doubled_, t.extended(b)) == wide_rank) ++at_double;
    return at_double > at_base ? Hint::yes : Hint::no;
}

StateKey RestrictedSubtree::state_key(const NodeSeq& t) const
{
    StateKey key;
    if (t.size() < anchor_.size()) {
        key.push_back(-3);
        key.insert(key.end(), t.begin(), t.end());
        return key;
    }
    key.push_back(-4);
    auto inner = tree_.state_key(t);
    key.insert(key.end(), inner.begin(), inner.end());
    return key;
}

std::unique_ptr<RestrictedSubtree> restricted_subtree(const TreePresentation& tree,
                                                      const NodeSeq& s,
                                                      const GameBounds& bounds)
{
    require_node(tree, s);
    return std::make_unique<RestrictedSubtree>(tree, s, bounds);
}

// ---------------------------------------------------------------------------

bool Rk0Report::passed() const
{
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed; });
}

namespace {

PropertyResult named(std::string name)
{
    PropertyResult p;
    p.name = std::move(name);
    return p;
}

PropertyResult vacuous(std::string name, std::string why)
{
    PropertyResult p = named(std::move(name));
    p.vacuous = true;
    p.detail = std::move(why);
    return p;
}

} // namespace

Rk0Report check_lemma_rk0(GameSolver& solver, const NodeSeq& s, const Rk0Options& options)
{
    using Entry = GameSolver::Entry;
    const auto& tree = solver.tree();
    require_node(tree, s);
    const Nat n_bound = solver.bounds().universe_bound;

    Rk0Report report;
    report.node = s;
    report.g = solver.survival_value(s);
    report.rk = rank(solver, s);
    const bool g_finite = report.g.is_finite();
    const bool rk_finite = report.rk.is_finite();
    const int g = report.g.value;
    const int rk = report.rk.value;

    // Descendants of a finite-rank node have finite rank no larger.
    if (!rk_finite) {
        report.properties.push_back(vacuous("monotonicity", "rank not finite"));
    } else {
        auto p = named("monotonicity");
        for (Nat b : tree.son_elements(s, n_bound)) {
            auto child = s.extended(b);
            auto child_rk = rank(solver, child);
            if (!child_rk.is_finite() || child_rk.value > rk) {
                p.passed = false;
                p.witnesses.push_back(child);
                p.detail = "rk" + child.to_string() + " = " + child_rk.to_string() + " above rk = " + std::to_string(rk);
                break;
            }
        }
        report.properties.push_back(std::move(p));
    }

    if (!g_finite || !rk_finite) {
        report.properties.push_back(vacuous("rank_at_least_g", "g or rank not finite"));
    } else {
        auto p = named("rank_at_least_g");
        p.passed = rk >= g;
        if (!p.passed) p.detail = "rk = " + std::to_string(rk) + " < g = " + std::to_string(g);
        report.properties.push_back(std::move(p));
    }

    // Past any boundary there is a reply with g = rk = g(s) - 1.
    if (!g_finite || g < 1) {
        report.properties.push_back(vacuous("reply_drops_by_one", "g not finite and positive"));
    } else {
        auto p = named("reply_drops_by_one");
        const Nat first = std::max<Nat>(s.top(), kBelowAll) + 1;
        for (Nat a = first; a < first + options.sampled_boundaries; ++a) {
            auto found = solver.find_first(
                s, a, [g](const Entry& e) { return e.value == g - 1 && e.subtree_max == g - 1; },
                [g](const Entry& e) { return e.subtree_max >= g - 1; });
            if (!found) {
                p.passed = false;
                p.detail = "no reply past " + std::to_string(a) + " with g = rk = " + std::to_string(g - 1);
                break;
            }
            p.witnesses.push_back(*found);
        }
        report.properties.push_back(std::move(p));
    }

    // Some boundary forces every reply below g(s).
    if (!g_finite || g < 1) {
        report.properties.push_back(vacuous("uniform_boundary", "g not finite and positive"));
    } else {
        auto p = named("uniform_boundary");
        p.passed = false;
        const auto window = boundary_window(s, solver.bounds());
        for (Nat a = window.lo; a <= window.hi && !p.passed; ++a) {
            bool all_below = true;
            for (Nat b : tree.son_elements(s, n_bound))
                if (b > a && solver.entry(s.extended(b)).subtree_max >= g) all_below = false;
            if (all_below) {
                p.passed = true;
                p.detail = "boundary " + std::to_string(a);
            }
        }
        if (!p.passed) p.detail = "no boundary in the window forces g below " + std::to_string(g);
        report.properties.push_back(std::move(p));
    }

    // Pairwise incomparable descendants with g = rk = rk(s) - 1.
    if (!rk_finite || rk < 1) {
        report.properties.push_back(vacuous("incomparable_descendants", "rank not finite and positive"));
    } else {
        auto p = named("incomparable_descendants");
        const int want = rk - 1;
        std::deque<NodeSeq> level{s};
        std::size_t visited = 0;
        while (!level.empty() && p.witnesses.size() < options.incomparable_quota && visited < options.search_budget) {
            std::deque<NodeSeq> next;
            for (const auto& t : level) {
                for (Nat b : tree.son_elements(t, n_bound)) {
                    if (++visited > options.search_budget) break;
                    auto child = t.extended(b);
                    const auto e = solver.entry(child);
                    if (e.subtree_max < want) continue;
                    if (e.value == want && e.subtree_max == want) {
                        // Witnesses are never expanded, so later ones cannot extend them.
                        p.witnesses.push_back(child);
                        if (p.witnesses.size() >= options.incomparable_quota) break;
                    } else {
                        next.push_back(std::move(child));
                    }
                }
                if (p.witnesses.size() >= options.incomparable_quota || visited > options.search_budget) break;
            }
            level = std::move(next);
        }
        p.passed = p.witnesses.size() >= options.incomparable_quota;
        p.detail = std::to_string(p.witnesses.size()) + " incomparable descendants with g = rk = " + std::to_string(want);
        report.properties.push_back(std::move(p));
    }
    return report;
}

Rk0Report check_lemma_rk0(const TreePresentation& tree,
                          const NodeSeq& s,
                          const GameBounds& bounds,
                          const Rk0Options& options)
{
    GameSolver solver(tree, bounds);
    return check_lemma_rk0(solver, s, options);
}

std::vector<Rk0Report> check_lemma_rk0_all(GameSolver& solver, Nat max_element, const Rk0Options& options)
{
    std::vector<Rk0Report> out;
    for_each_node_class(solver.tree(), max_element,
                        [&](const NodeSeq& s) { out.push_back(check_lemma_rk0(solver, s, options)); });
    return out;
}

} // namespace treerank
