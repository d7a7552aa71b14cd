#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "treerank/tree.hpp"

namespace treerank {

/// Bounds of the finite game that approximates the s-game.
///
/// The first player marks boundaries in the window [max(s), hi] with
/// hi = max(boundary_bound, max(s) + 1); the root's window starts at 0.
/// Replies are nonempty sets s' with min(s') > boundary and all elements at
/// most universe_bound. Survival is counted up to `cap`.
struct GameBounds {
    Nat boundary_bound = 12;
    Nat universe_bound = 96;
    int cap = 8;

    friend bool operator==(const GameBounds&, const GameBounds&) = default;
};

/// Throws BoundsInvalid unless 0 <= boundary_bound <= universe_bound and cap >= 1.
void validate(const GameBounds& bounds);

/// g(s) within bounds: an exact count, or "at least cap".
struct SurvivalValue {
    enum class Tag { finite, at_least };
    Tag tag = Tag::finite;
    int value = 0;

    bool is_finite() const noexcept { return tag == Tag::finite; }
    std::string to_string() const;

    static SurvivalValue finite(int k) { return {Tag::finite, k}; }
    static SurvivalValue at_least(int cap) { return {Tag::at_least, cap}; }

    friend bool operator==(const SurvivalValue&, const SurvivalValue&) = default;
};

struct Window {
    Nat lo = 0;
    Nat hi = 0;
};

Window boundary_window(const NodeSeq& s, const GameBounds& bounds);

/// Memoized solver for one (tree, bounds) pair.
///
/// For every node t it computes the clipped game value v(t) and
/// d(t) = max{v(t') : t ⪯ t', elements <= universe_bound}. A reply past a
/// boundary a is any descendant of a son t∪{b} with b > a, so the best reply
/// value at a is max{d(t∪{b}) : b > a}, which cannot grow with a; the
/// window top is therefore always a best boundary.
///
/// Not thread safe: confine a solver to one thread.
class GameSolver {
public:
    struct Entry {
        int value = 0;        // v(t), clipped at cap
        int subtree_max = 0;  // d(t), clipped at cap
    };

    GameSolver(const TreePresentation& tree, GameBounds bounds, std::size_t state_budget = kDefaultStateBudget);

    static constexpr std::size_t kDefaultStateBudget = std::size_t{1} << 22;

    const TreePresentation& tree() const noexcept { return tree_; }
    const GameBounds& bounds() const noexcept { return bounds_; }

    /// Does not check membership; callers validate nodes first.
    Entry entry(const NodeSeq& s);

    SurvivalValue survival_value(const NodeSeq& s);

    /// Best reply value past a, or nullopt when no reply exists.
    std::optional<int> reply_value(const NodeSeq& s, Nat a);

    /// Least boundary after which every reply has value <= g(s) - 1.
    /// Requires finite g(s) >= 1.
    Nat best_boundary(const NodeSeq& s);

    /// A reply past a of maximal value; shortlex-least among those.
    NodeSeq best_reply(const NodeSeq& s, Nat a);

    /// Shortlex-least node t ≻ s whose new elements all exceed a and whose
    /// entry satisfies `accept`. `may_contain` prunes subtrees by their root
    /// entry.
    std::optional<NodeSeq> find_first(const NodeSeq& s,
                                      Nat a,
                                      const std::function<bool(const Entry&)>& accept,
                                      const std::function<bool(const Entry&)>& may_contain);

    std::size_t states() const noexcept { return memo_.size(); }

private:
    Entry compute(const NodeSeq& s);

    const TreePresentation& tree_;
    GameBounds bounds_;
    std::size_t budget_;
    std::unordered_map<StateKey, Entry, StateKeyHash> memo_;
};

SurvivalValue survival_value(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds);
Nat best_boundary(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds);
NodeSeq best_reply(const TreePresentation& tree, const NodeSeq& s, Nat a, const GameBounds& bounds);

/// g(s) at universe N, 2N and 4N with the same boundary bound and cap.
struct Stabilization {
    std::array<Nat, 3> universes{};
    std::array<SurvivalValue, 3> values{};
    bool stable = false;
};

Stabilization stabilization(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds);

// ---------------------------------------------------------------------------
// Playing the game

struct Transcript {
    enum class Terminal { second_stuck, round_limit };
    struct Round {
        Nat boundary = 0;
        std::optional<NodeSeq> reply;  // position after the reply
    };

    NodeSeq start;
    std::vector<Round> rounds;
    Terminal terminal = Terminal::round_limit;

    std::size_t reply_count() const;
};

/// Chooses a boundary for the current position.
using FirstStrategy = std::function<Nat(const NodeSeq& position)>;
/// Chooses the position after a reply past `boundary`, or nullopt to concede.
using SecondStrategy = std::function<std::optional<NodeSeq>(const NodeSeq& position, Nat boundary)>;

/// Alternates moves from `start` until the second player has no reply or
/// max_rounds boundaries have been answered. Throws IllegalMove when a
/// strategy leaves the rules, including conceding while a reply exists.
Transcript play(const TreePresentation& tree,
                const NodeSeq& start,
                const FirstStrategy& first,
                const SecondStrategy& second,
                std::size_t max_rounds,
                const GameBounds& bounds);

/// Best boundary when g is finite and positive; a winning boundary when g = 0;
/// the window top otherwise.
FirstStrategy optimal_first(GameSolver& solver);
SecondStrategy optimal_second(GameSolver& solver);
/// Always marks the lowest legal boundary.
FirstStrategy lowest_boundary_first();
/// Answers with the least single son past the boundary.
SecondStrategy greedy_second(const TreePresentation& tree, Nat universe_bound);

} // namespace treerank
