#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treerank/game.hpp"

namespace treerank {

/// rk(s) within bounds. `finite` means no descendant within the universe hit
/// the cap and `value` is the largest g among descendants s' ⪰ s (s
/// included). `infinite_evidence` names the shortlex-least descendant whose
/// g reached the cap.
struct RankValue {
    enum class Tag { finite, infinite_evidence, unknown };
    Tag tag = Tag::unknown;
    int value = 0;
    std::optional<NodeSeq> witness;
    GameBounds bounds;

    bool is_finite() const noexcept { return tag == Tag::finite; }
    std::string to_string() const;
};

RankValue rank(GameSolver& solver, const NodeSeq& s);
RankValue rank(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds);

struct RegularityReport {
    NodeSeq node;
    SurvivalValue g;
    bool regular = false;
    RankValue rk;
};

RegularityReport is_regular(GameSolver& solver, const NodeSeq& s);
RegularityReport is_regular(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds);

/// The witness functions φ and ψ over one solver, cached by argument.
///
///   φ(a)   = 1 + max over nodes s ⊆ [0,a] of best_boundary(s),
///            g = 0 nodes contributing max(s)
///   ψ(a,b) = 1 + max over nodes s ⊆ [0,a] with g(s) >= 1 of
///            max(best_reply(s, b)); b + 1 when there are none
///
/// Both throw UnboundedRank when a node in [0,a] has capped g; ψ throws
/// NoReplyPastB naming the first node with no reply past b.
class WitnessFunctions {
public:
    explicit WitnessFunctions(GameSolver& solver) : solver_(solver) {}

    Nat phi(Nat a);
    Nat psi(Nat a, Nat b);

    GameSolver& solver() noexcept { return solver_; }

private:
    /// Representatives of the node classes inside [0,a].
    std::vector<NodeSeq> nodes_within(Nat a);

    GameSolver& solver_;
    std::map<Nat, Nat> phi_cache_;
    std::map<std::pair<Nat, Nat>, Nat> psi_cache_;
};

Nat phi(const TreePresentation& tree, Nat a, const GameBounds& bounds);
Nat psi(const TreePresentation& tree, Nat a, Nat b, const GameBounds& bounds);

/// |{i : a_{i+1} > φ(a_i)}| for s = {a_1 < ... < a_n}. Requires finite rk(s).
std::size_t phi_jump_count(WitnessFunctions& fns, const NodeSeq& s);
std::size_t phi_jump_count(const TreePresentation& tree, const NodeSeq& s, const GameBounds& bounds);

/// Tr_s = {s' ⪰ s : rk(s') = rk(s)}, closed downward with the initial
/// segments of s so that it is a tree. Membership is decided on demand with
/// ranks at the construction bounds; cofinal_hint compares same-rank sons at
/// universe N and 2N.
class RestrictedSubtree final : public TreePresentation {
public:
    RestrictedSubtree(const TreePresentation& tree, NodeSeq anchor, const GameBounds& bounds);

    Kind kind() const noexcept override { return Kind::derived; }
    std::string name() const override;
    bool contains(const NodeSeq& t) const override;
    std::vector<Nat> son_elements(const NodeSeq& t, Nat universe_bound) const override;
    Hint cofinal_hint(const NodeSeq& t, Nat a) const override;
    StateKey state_key(const NodeSeq& t) const override;

    const NodeSeq& anchor() const noexcept { return anchor_; }
    int anchor_rank() const noexcept { return rank_; }

private:
    int rank_at(GameSolver& solver, const NodeSeq& t) const;

    const TreePresentation& tree_;
    NodeSeq anchor_;
    GameBounds bounds_;
    int rank_ = 0;
    mutable std::mutex mutex_;
    mutable std::unique_ptr<GameSolver> base_;
    mutable std::unique_ptr<GameSolver> doubled_;
};

/// Throws NotFiniteRank when rk(s) is not certified finite.
std::unique_ptr<RestrictedSubtree> restricted_subtree(const TreePresentation& tree,
                                                      const NodeSeq& s,
                                                      const GameBounds& bounds);

// ---------------------------------------------------------------------------
// Node-level properties

struct PropertyResult {
    std::string name;
    bool passed = true;
    bool vacuous = false;
    std::string detail;
    std::vector<NodeSeq> witnesses;
};

struct Rk0Report {
    NodeSeq node;
    SurvivalValue g;
    RankValue rk;
    std::vector<PropertyResult> properties;

    bool passed() const;
};

struct Rk0Options {
    std::size_t incomparable_quota = 5;
    /// Boundaries max(s)+1 .. max(s)+sampled_boundaries for the reply check.
    Nat sampled_boundaries = 5;
    /// Cap on nodes visited while collecting incomparable witnesses.
    std::size_t search_budget = std::size_t{1} << 18;
};

/// Checks, at s: monotonicity of rank below s, rk >= g, the rank-dropping
/// reply past every sampled boundary, a uniform boundary after which all
/// replies have smaller g, and a quota of pairwise incomparable descendants
/// with g = rk = rk(s) - 1.
Rk0Report check_lemma_rk0(GameSolver& solver, const NodeSeq& s, const Rk0Options& options = {});
Rk0Report check_lemma_rk0(const TreePresentation& tree,
                          const NodeSeq& s,
                          const GameBounds& bounds,
                          const Rk0Options& options = {});

/// Runs check_lemma_rk0 on one representative of every node class with all
/// elements <= max_element.
std::vector<Rk0Report> check_lemma_rk0_all(GameSolver& solver, Nat max_element, const Rk0Options& options = {});

/// Walks nodes with elements <= bound in lexicographic DFS order, visiting
/// one node per StateKey (a class shares its whole subtree of keys).
void for_each_node_class(const TreePresentation& tree, Nat bound, const std::function<void(const NodeSeq&)>& visit);

} // namespace treerank
