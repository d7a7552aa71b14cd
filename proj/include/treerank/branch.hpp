#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treerank/game.hpp"

namespace treerank {

/// Depth of the same-rank subtree below a node at universes N, 2N, 4N.
struct Growth {
    std::array<Nat, 3> universes{};
    std::array<std::size_t, 3> depths{};

    bool strictly_growing() const noexcept { return depths[0] < depths[1] && depths[1] < depths[2]; }
    bool saturated() const noexcept { return depths[0] == depths[1] && depths[1] == depths[2]; }
};

struct BranchVerdict {
    enum class Tag { yes, no, unknown };
    enum class Evidence { none, infinite_rank_node, infinite_restricted_subtree };

    Tag tag = Tag::unknown;
    Evidence evidence = Evidence::none;
    std::optional<NodeSeq> node;  // evidence node for yes, undecided candidate for unknown
    std::optional<Growth> growth;
    // Certificate for no: rk(root) and the longest node in the truncation at 4N.
    int rank_bound = 0;
    std::size_t depth_bound = 0;
    std::size_t candidates_examined = 0;
    GameBounds bounds;

    std::string to_string() const;
};

/// Case 1: the root has a descendant with capped g. Case 2: some node t with
/// max(t) <= B has finite rank and Tr_t keeps deepening at N, 2N and 4N.
/// No: every such Tr_t is saturated. Candidates are visited one per node
/// class, in lexicographic depth-first order.
BranchVerdict branch_exists(const TreePresentation& tree, const GameBounds& bounds);

using BranchPrefix = std::vector<NodeSeq>;

/// The first m nodes of a least-son descent: through capped-rank nodes in
/// case 1, through Tr_t in case 2 (initial segments of t first, then the
/// least same-rank son whose own Tr keeps deepening). Throws
/// NoBranchCertified or PrefixStalled.
BranchPrefix definable_branch_prefix(const TreePresentation& tree, const GameBounds& bounds, std::size_t m);

struct KonigReport {
    std::array<Nat, 3> universes{};
    std::array<std::uint64_t, 3> node_counts{};  // saturates at UINT64_MAX
    std::array<std::size_t, 3> depths{};

    bool growing() const noexcept;
};

/// Node count and depth of the truncations at N, 2N, 4N. Throws
/// NotLocallyFinite naming the first examined node whose sons are cofinal.
KonigReport konig_check(const TreePresentation& tree, const GameBounds& bounds);

} // namespace treerank
