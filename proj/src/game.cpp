#include "treerank/game.hpp"

#include <algorithm>
#include <limits>

#include "treerank/error.hpp"

namespace treerank {

void validate(const GameBounds& bounds)
{
    if (bounds.boundary_bound < 0 || bounds.universe_bound < bounds.boundary_bound)
        throw Error(Errc::BoundsInvalid,
                    "need 0 <= boundary bound <= universe bound, got B=" + std::to_string(bounds.boundary_bound)
                        + " N=" + std::to_string(bounds.universe_bound));
    if (bounds.cap < 1) throw Error(Errc::BoundsInvalid, "cap must be >= 1");
}

std::string SurvivalValue::to_string() const
{
    return (tag == Tag::finite ? "finite(" : "at_least(") + std::to_string(value) + ")";
}

Window boundary_window(const NodeSeq& s, const GameBounds& bounds)
{
    Window w;
    w.lo = std::max<Nat>(s.top(), 0);
    w.hi = std::max<Nat>(bounds.boundary_bound, s.top() + 1);
    if (s.empty()) w.hi = std::max<Nat>(bounds.boundary_bound, 0);
    return w;
}

GameSolver::GameSolver(const TreePresentation& tree, GameBounds bounds, std::size_t state_budget)
    : tree_(tree), bounds_(bounds), budget_(state_budget)
{
    validate(bounds_);
}

GameSolver::Entry GameSolver::entry(const NodeSeq& s)
{
    auto key = tree_.state_key(s);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Entry e = compute(s);
    if (memo_.size() >= budget_)
        throw Error(Errc::BudgetExceeded,
                    "game on " + tree_.name() + " needs more than " + std::to_string(budget_) + " states");
    memo_.emplace(std::move(key), e);
    return e;
}

GameSolver::Entry GameSolver::compute(const NodeSeq& s)
{
    const auto window = boundary_window(s, bounds_);
    int best_past_top = -1;  // best reply value past the window top
    int subtree = 0;
    for (Nat b : tree_.son_elements(s, bounds_.universe_bound)) {
        const Entry child = entry(s.extended(b));
        subtree = std::max(subtree, child.subtree_max);
        if (b > window.hi) best_past_top = std::max(best_past_top, child.subtree_max);
    }
    Entry e;
    e.value = best_past_top < 0 ? 0 : std::min(bounds_.cap, 1 + best_past_top);
    e.subtree_max = std::max(e.value, subtree);
    return e;
}

SurvivalValue GameSolver::survival_value(const NodeSeq& s)
{
    require_node(tree_, s);
    const int v = entry(s).value;
    return v >= bounds_.cap ? SurvivalValue::at_least(bounds_.cap) : SurvivalValue::finite(v);
}

std::optional<int> GameSolver::reply_value(const NodeSeq& s, Nat a)
{
    std::optional<int> best;
    for (Nat b : tree_.son_elements(s, bounds_.universe_bound)) {
        if (b <= a) continue;
        const int d = entry(s.extended(b)).subtree_max;
        if (!best || d > *best) best = d;
    }
    return best;
}

Nat GameSolver::best_boundary(const NodeSeq& s)
{
    const auto g = survival_value(s);
    if (!g.is_finite())
        throw Error(Errc::NoFiniteValue, "g" + s.to_string() + " is " + g.to_string(), {s});
    if (g.value < 1)
        throw Error(Errc::PreconditionFailed, "g" + s.to_string() + " = 0: no boundary duel to win", {s});
    const auto window = boundary_window(s, bounds_);
    for (Nat a = window.lo; a <= window.hi; ++a) {
        auto r = reply_value(s, a);
        if (!r || *r <= g.value - 1) return a;
    }
    // The window top always qualifies when g is finite.
    throw Error(Errc::PreconditionFailed, "no uniform boundary found for " + s.to_string(), {s});
}

NodeSeq GameSolver::best_reply(const NodeSeq& s, Nat a)
{
    require_node(tree_, s);
    auto target = reply_value(s, a);
    if (!target)
        throw Error(Errc::NoReply, "no reply to boundary " + std::to_string(a) + " at " + s.to_string(), {s});
    const int want = *target;
    auto found = find_first(
        s, a, [want](const Entry& e) { return e.value == want; },
        [want](const Entry& e) { return e.subtree_max >= want; });
    if (!found) throw Error(Errc::NoReply, "reply search failed at " + s.to_string(), {s});
    return *found;
}

std::optional<NodeSeq> GameSolver::find_first(const NodeSeq& s,
                                              Nat a,
                                              const std::function<bool(const Entry&)>& accept,
                                              const std::function<bool(const Entry&)>& may_contain)
{
    constexpr int kNone = std::numeric_limits<int>::max();
    std::unordered_map<StateKey, int, StateKeyHash> depth_memo;
    const Nat n = bounds_.universe_bound;

    // Fewest extra elements needed below t (t included) to reach an accepted node.
    std::function<int(const NodeSeq&)> distance = [&](const NodeSeq& t) -> int {
        auto key = tree_.state_key(t);
        if (auto it = depth_memo.find(key); it != depth_memo.end()) return it->second;
        const Entry e = entry(t);
        int d = kNone;
        if (accept(e)) {
            d = 0;
        } else if (may_contain(e)) {
            for (Nat b : tree_.son_elements(t, n)) {
                int sub = distance(t.extended(b));
                if (sub != kNone) d = std::min(d, sub + 1);
            }
        }
        depth_memo.emplace(std::move(key), d);
        return d;
    };

    int total = kNone;
    for (Nat b : tree_.son_elements(s, n)) {
        if (b <= a) continue;
        int d = distance(s.extended(b));
        if (d != kNone) total = std::min(total, d + 1);
    }
    if (total == kNone) return std::nullopt;

    NodeSeq cur = s;
    for (int remaining = total; remaining > 0; --remaining) {
        bool stepped = false;
        for (Nat b : tree_.son_elements(cur, n)) {
            if (cur.size() == s.size() && b <= a) continue;
            NodeSeq next = cur.extended(b);
            if (distance(next) == remaining - 1) {
                cur = std::move(next);
                stepped = true;
                break;
            }
        }
        if (!stepped) return std::nullopt;
    }
    return cur;
}

SurvivalValue survival_value(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    return solver.survival_value(s);
}

Nat best_boundary(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    return solver.best_boundary(s);
}

NodeSeq best_reply(const TreePresentation& tree, const NodeSeq& s, Nat a, const GameBounds& bounds)
{
    GameSolver solver(tree, bounds);
    return solver.best_reply(s, a);
}

Stabilization stabilization(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds)
{
    Stabilization out;
    for (std::size_t i = 0; i < 3; ++i) {
        GameBounds scaled = bounds;
        scaled.universe_bound = bounds.universe_bound << i;
        out.universes[i] = scaled.universe_bound;
        out.values[i] = survival_value(tree, s, scaled);
    }
    out.stable = out.values[0] == out.values[1] && out.values[1] == out.values[2];
    return out;
}

// ---------------------------------------------------------------------------

std::size_t Transcript::reply_count() const
{
    return static_cast<std::size_t>(
        std::count_if(rounds.begin(), rounds.end(), [](const Round& r) { return r.reply.has_value(); }));
}

Transcript play(const TreePresentation& tree,
                const NodeSeq& start,
                const FirstStrategy& first,
                const SecondStrategy& second,
                std::size_t max_rounds,
                const GameBounds& bounds)
{
    validate(bounds);
    require_node(tree, start);
    Transcript out;
    out.start = start;
    NodeSeq pos = start;
    const Nat n = bounds.universe_bound;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        const Nat a = first(pos);
        const auto window = boundary_window(pos, bounds);
        if (a < window.lo || a > n)
            throw Error(Errc::IllegalMove,
                        "first player marked " + std::to_string(a) + " at " + pos.to_string() + " (legal: "
                            + std::to_string(window.lo) + ".." + std::to_string(n) + ")",
                        {pos});
        auto reply = second(pos, a);
        if (!reply) {
            auto kids = tree.son_elements(pos, n);
            if (!kids.empty() && kids.back() > a)
                throw Error(Errc::IllegalMove,
                            "second player conceded at " + pos.to_string() + " although a reply past "
                                + std::to_string(a) + " exists",
                            {pos});
            out.rounds.push_back({a, std::nullopt});
            out.terminal = Transcript::Terminal::second_stuck;
            return out;
        }
        const bool legal = reply->size() > pos.size() && is_initial_segment(pos, *reply)
                           && (*reply)[pos.size()] > a && reply->top() <= n && tree.contains(*reply);
        if (!legal)
            throw Error(Errc::IllegalMove,
                        "second player answered " + reply->to_string() + " to boundary " + std::to_string(a) + " at "
                            + pos.to_string(),
                        {pos, *reply});
        out.rounds.push_back({a, reply});
        pos = *reply;
    }
    out.terminal = Transcript::Terminal::round_limit;
    return out;
}

FirstStrategy optimal_first(GameSolver& solver)
{
    return [&solver](const NodeSeq& pos) -> Nat {
        const auto window = boundary_window(pos, solver.bounds());
        const auto e = solver.entry(pos);
        if (e.value == 0) {
            for (Nat a = window.lo; a <= window.hi; ++a)
                if (!solver.reply_value(pos, a)) return a;
            return window.hi;
        }
        if (e.value >= solver.bounds().cap) return window.hi;
        return solver.best_boundary(pos);
    };
}

SecondStrategy optimal_second(GameSolver& solver)
{
    return [&solver](const NodeSeq& pos, Nat a) -> std::optional<NodeSeq> {
        if (!solver.reply_value(pos, a)) return std::nullopt;
        return solver.best_reply(pos, a);
    };
}

FirstStrategy lowest_boundary_first()
{
    return [](const NodeSeq& pos) { return std::max<Nat>(pos.top(), 0); };
}

SecondStrategy greedy_second(const TreePresentation& tree, Nat universe_bound)
{
    return [&tree, universe_bound](const NodeSeq& pos, Nat a) -> std::optional<NodeSeq> {
        for (Nat b : tree.son_elements(pos, universe_bound))
            if (b > a) return pos.extended(b);
        return std::nullopt;
    };
}

} // namespace treerank
