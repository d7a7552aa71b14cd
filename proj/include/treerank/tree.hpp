#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "treerank/node.hpp"

namespace treerank {

enum class Hint { yes, no, unknown };

std::string_view to_string(Hint h) noexcept;

/// Identifies a class of nodes that behave identically in every bounded
/// computation: nodes with equal keys have the same largest element and the
/// same set of descendant differences t∖s, and corresponding descendants
/// again share keys. Memo tables are keyed by it.
using StateKey = std::vector<Nat>;

struct StateKeyHash {
    std::size_t operator()(const StateKey& key) const noexcept;
};

/// A tree on ℕ: a prefix-closed family of finite increasing sequences,
/// given by decidable membership plus an enumeration of one-step extensions.
/// Implementations are immutable after construction.
class TreePresentation {
public:
    enum class Kind { explicit_tree, generator, derived };

    virtual ~TreePresentation() = default;

    virtual Kind kind() const noexcept = 0;
    virtual std::string name() const = 0;
    virtual bool contains(const NodeSeq& s) const = 0;

    /// All b with max(s) < b <= universe_bound and s∪{b} a node, ascending.
    /// `s` must be a node. The default scans `contains`.
    virtual std::vector<Nat> son_elements(const NodeSeq& s, Nat universe_bound) const;

    /// Whether s has extensions s∪s' with min(s') > a for arbitrarily large a.
    virtual Hint cofinal_hint(const NodeSeq& s, Nat a) const = 0;

    /// See StateKey. The default is the node itself.
    virtual StateKey state_key(const NodeSeq& s) const;
};

/// A finite tree listed node by node.
class ExplicitTree final : public TreePresentation {
public:
    Kind kind() const noexcept override { return Kind::explicit_tree; }
    std::string name() const override { return "explicit"; }
    bool contains(const NodeSeq& s) const override;
    std::vector<Nat> son_elements(const NodeSeq& s, Nat universe_bound) const override;
    /// An explicit tree is finite, so nothing extends past its largest element.
    Hint cofinal_hint(const NodeSeq& s, Nat a) const override;

    const std::set<NodeSeq>& nodes() const noexcept { return nodes_; }
    Nat largest_element() const noexcept { return largest_; }

private:
    friend ExplicitTree validate_explicit(const std::vector<std::vector<Nat>>& nodes);
    friend ExplicitTree truncate(const TreePresentation& tree, Nat universe_bound, std::size_t node_cap);

    void insert_unchecked(const NodeSeq& s);

    std::set<NodeSeq> nodes_;
    std::map<NodeSeq, std::vector<Nat>> children_;
    Nat largest_ = kBelowAll;
};

/// Accepts `nodes` iff it contains the root, every sequence is increasing and
/// the family is closed under initial segments. Throws ValidationError
/// listing every offender otherwise.
ExplicitTree validate_explicit(const std::vector<std::vector<Nat>>& nodes);

struct SonList {
    std::vector<NodeSeq> sons;
    Hint cofinal = Hint::unknown;
};

/// One-element extensions of `s` within [0, universe_bound]; the flag is
/// cofinal_hint(s, max(s)). Throws NotANode.
SonList sons(const TreePresentation& tree, const NodeSeq& s, Nat universe_bound);

/// Visits every node s∪s' with s' nonempty, min(s') > a and all elements at
/// most universe_bound, depth first in lexicographic order. Stops early when
/// the visitor returns false.
void extensions_beyond(const TreePresentation& tree,
                       const NodeSeq& s,
                       Nat a,
                       Nat universe_bound,
                       const std::function<bool(const NodeSeq&)>& visit);

/// Visits every node with all elements <= bound (root included), depth first
/// in lexicographic order. Returning false from the visitor prunes that
/// node's subtree.
void for_each_node(const TreePresentation& tree, Nat bound, const std::function<bool(const NodeSeq&)>& visit);

inline constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 20;

/// The explicit tree {s : tree.contains(s), max(s) <= universe_bound}.
/// Throws BudgetExceeded when it would hold more than node_cap nodes.
ExplicitTree truncate(const TreePresentation& tree, Nat universe_bound, std::size_t node_cap = kDefaultNodeCap);

void require_node(const TreePresentation& tree, const NodeSeq& s);

} // namespace treerank
