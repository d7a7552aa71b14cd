#include "treerank/branch.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <unordered_map>

#include "treerank/error.hpp"
#include "treerank/rank.hpp"

namespace treerank {

namespace {

GameBounds scaled(const GameBounds& bounds, int doublings)
{
    GameBounds out = bounds;
    out.universe_bound = bounds.universe_bound << doublings;
    return out;
}

/// Longest chain of same-rank sons below a node, counted in extra elements.
class SameRankDepth {
public:
    explicit SameRankDepth(GameSolver& solver) : solver_(solver) {}

    std::size_t extra(const NodeSeq& u, int r)
    {
        StateKey key = solver_.tree().state_key(u);
        key.push_back(r);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::size_t best = 0;
        for (Nat b : solver_.tree().son_elements(u, solver_.bounds().universe_bound)) {
            auto child = u.extended(b);
            if (solver_.entry(child).subtree_max == r) best = std::max(best, 1 + extra(child, r));
        }
        memo_.emplace(std::move(key), best);
        return best;
    }

    /// Depth of Tr_t at this scale, or nullopt when rk(t) is capped here.
    std::optional<std::size_t> depth(const NodeSeq& t)
    {
        const int r = solver_.entry(t).subtree_max;
        if (r >= solver_.bounds().cap) return std::nullopt;
        return t.size() + extra(t, r);
    }

    GameSolver& solver() noexcept { return solver_; }

private:
    GameSolver& solver_;
    std::unordered_map<StateKey, std::size_t, StateKeyHash> memo_;
};

struct Scales {
    Scales(const TreePresentation& tree, const GameBounds& bounds)
    {
        for (int i = 0; i < 3; ++i) {
            solvers[i] = std::make_unique<GameSolver>(tree, scaled(bounds, i));
            depth[i] = std::make_unique<SameRankDepth>(*solvers[i]);
        }
    }

    /// nullopt when the rank caps at some scale.
    std::optional<Growth> growth(const NodeSeq& t)
    {
        Growth g;
        for (int i = 0; i < 3; ++i) {
            g.universes[i] = solvers[i]->bounds().universe_bound;
            auto d = depth[i]->depth(t);
            if (!d) return std::nullopt;
            g.depths[i] = *d;
        }
        return g;
    }

    std::array<std::unique_ptr<GameSolver>, 3> solvers;
    std::array<std::unique_ptr<SameRankDepth>, 3> depth;
};

/// Length of the longest node below u (u included), memoized by class.
std::size_t longest_below(const TreePresentation& tree,
                          const NodeSeq& u,
                          Nat n,
                          std::unordered_map<StateKey, std::size_t, StateKeyHash>& memo)
{
    auto key = tree.state_key(u);
    if (auto it = memo.find(key); it != memo.end()) return u.size() + it->second;
    std::size_t extra = 0;
    for (Nat b : tree.son_elements(u, n)) extra = std::max(extra, longest_below(tree, u.extended(b), n, memo) - u.size());
    memo.emplace(std::move(key), extra);
    return u.size() + extra;
}

} // namespace

std::string BranchVerdict::to_string() const
{
    switch (tag) {
    case Tag::yes:
        return std::string(evidence == Evidence::infinite_rank_node ? "yes(infinite_rank_node "
                                                                    : "yes(infinite_restricted_subtree ")
               + node->to_string() + ")";
    case Tag::no:
        return "no(rank <= " + std::to_string(rank_bound) + ", depth <= " + std::to_string(depth_bound) + ")";
    case Tag::unknown: return "unknown";
    }
    return "unknown";
}

BranchVerdict branch_exists(const TreePresentation& tree, const GameBounds& bounds)
{
    validate(bounds);
    BranchVerdict out;
    out.bounds = bounds;

    Scales scales(tree, bounds);
    const auto root_rank = rank(*scales.solvers[0], NodeSeq{});
    if (!root_rank.is_finite()) {
        out.tag = BranchVerdict::Tag::yes;
        out.evidence = BranchVerdict::Evidence::infinite_rank_node;
        out.node = root_rank.witness;
        return out;
    }
    out.rank_bound = root_rank.value;

    bool all_saturated = true;
    std::optional<NodeSeq> undecided;
    std::optional<Growth> undecided_growth;
    std::optional<NodeSeq> found;
    std::optional<Growth> found_growth;
    // One candidate per class; a class shares its Tr shape.
    for_each_node_class(tree, bounds.boundary_bound, [&](const NodeSeq& t) {
        if (found) return;
        ++out.candidates_examined;
        auto g = scales.growth(t);
        if (g && g->strictly_growing()) {
            found = t;
            found_growth = g;
        } else if (!g || !g->saturated()) {
            all_saturated = false;
            if (!undecided) {
                undecided = t;
                undecided_growth = g;
            }
        }
    });

    if (found) {
        out.tag = BranchVerdict::Tag::yes;
        out.evidence = BranchVerdict::Evidence::infinite_restricted_subtree;
        out.node = found;
        out.growth = found_growth;
        return out;
    }
    if (all_saturated) {
        out.tag = BranchVerdict::Tag::no;
        std::unordered_map<StateKey, std::size_t, StateKeyHash> memo;
        out.depth_bound = longest_below(tree, NodeSeq{}, bounds.universe_bound << 2, memo);
        return out;
    }
    out.tag = BranchVerdict::Tag::unknown;
    out.node = undecided;
    out.growth = undecided_growth;
    return out;
}

BranchPrefix definable_branch_prefix(const TreePresentation& tree, const GameBounds& bounds, std::size_t m)
{
    const auto verdict = branch_exists(tree, bounds);
    if (verdict.tag != BranchVerdict::Tag::yes)
        throw Error(Errc::NoBranchCertified, "branch_exists on " + tree.name() + " is " + verdict.to_string());

    BranchPrefix out;
    const Nat n = bounds.universe_bound;
    auto stalled = [&](const NodeSeq& at) {
        return Error(Errc::PrefixStalled,
                     "no qualifying son of " + at.to_string() + " within universe " + std::to_string(n)
                         + "; retry with a larger universe",
                     {at});
    };

    if (verdict.evidence == BranchVerdict::Evidence::infinite_rank_node) {
        GameSolver solver(tree, bounds);
        const int cap = bounds.cap;
        NodeSeq cur;
        out.push_back(cur);
        while (out.size() < m) {
            std::optional<NodeSeq> next;
            for (Nat b : tree.son_elements(cur, n)) {
                auto child = cur.extended(b);
                if (solver.entry(child).subtree_max >= cap) {
                    next = std::move(child);
                    break;
                }
            }
            if (!next) throw stalled(cur);
            cur = *next;
            out.push_back(cur);
        }
        return out;
    }

    const NodeSeq& anchor = *verdict.node;
    for (std::size_t len = 0; len <= anchor.size() && out.size() < m; ++len) out.push_back(anchor.prefix(len));
    if (out.size() >= m) return out;

    Scales scales(tree, bounds);
    const int r = scales.solvers[0]->entry(anchor).subtree_max;
    NodeSeq cur = anchor;
    while (out.size() < m) {
        std::optional<NodeSeq> next;
        for (Nat b : tree.son_elements(cur, n)) {
            auto child = cur.extended(b);
            if (scales.solvers[0]->entry(child).subtree_max != r) continue;
            auto g = scales.growth(child);
            if (g && g->strictly_growing()) {
                next = std::move(child);
                break;
            }
        }
        if (!next) throw stalled(cur);
        cur = *next;
        out.push_back(cur);
    }
    return out;
}

bool KonigReport::growing() const noexcept
{
    return node_counts[0] < node_counts[1] && node_counts[1] < node_counts[2] && depths[0] < depths[1]
           && depths[1] < depths[2];
}

KonigReport konig_check(const TreePresentation& tree, const GameBounds& bounds)
{
    validate(bounds);
    KonigReport out;
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    for (int i = 0; i < 3; ++i) {
        const Nat n = bounds.universe_bound << i;
        out.universes[i] = n;
        std::unordered_map<StateKey, std::pair<std::uint64_t, std::size_t>, StateKeyHash> memo;
        // (node count, extra depth) of the subtree below u
        std::function<std::pair<std::uint64_t, std::size_t>(const NodeSeq&)> walk = [&](const NodeSeq& u) {
            auto key = tree.state_key(u);
            if (auto it = memo.find(key); it != memo.end()) return it->second;
            if (tree.cofinal_hint(u, u.top()) == Hint::yes)
                throw Error(Errc::NotLocallyFinite, u.to_string() + " has sons past every bound in " + tree.name(),
                            {u});
            std::pair<std::uint64_t, std::size_t> acc{1, 0};
            for (Nat b : tree.son_elements(u, n)) {
                auto [count, depth] = walk(u.extended(b));
                acc.first = count > kMax - acc.first ? kMax : acc.first + count;
                acc.second = std::max(acc.second, depth + 1);
            }
            memo.emplace(std::move(key), acc);
            return acc;
        };
        auto [count, depth] = walk(NodeSeq{});
        out.node_counts[i] = count;
        out.depths[i] = depth;
    }
    return out;
}

} // namespace treerank
