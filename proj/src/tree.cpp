#include "treerank/tree.hpp"

#include <algorithm>

#include "treerank/error.hpp"

namespace treerank {

std::string_view to_string(Hint h) noexcept
{
    switch (h) {
    case Hint::yes: return "yes";
    case Hint::no: return "no";
    case Hint::unknown: return "unknown";
    }
    return "unknown";
}

std::size_t StateKeyHash::operator()(const StateKey& key) const noexcept
{
    std::size_t h = 0xcbf29ce484222325ULL ^ key.size();
    for (Nat x : key) h = (h ^ static_cast<std::size_t>(static_cast<std::uint32_t>(x))) * 0x100000001b3ULL;
    return h;
}

std::vector<Nat> TreePresentation::son_elements(const NodeSeq& s, Nat universe_bound) const
{
    std::vector<Nat> out;
    for (Nat b = s.top() + 1; b <= universe_bound; ++b)
        if (contains(s.extended(b))) out.push_back(b);
    return out;
}

StateKey TreePresentation::state_key(const NodeSeq& s) const
{
    return StateKey(s.begin(), s.end());
}

bool ExplicitTree::contains(const NodeSeq& s) const { return nodes_.count(s) > 0; }

std::vector<Nat> ExplicitTree::son_elements(const NodeSeq& s, Nat universe_bound) const
{
    auto it = children_.find(s);
    if (it == children_.end()) return {};
    std::vector<Nat> out;
    for (Nat b : it->second)
        if (b <= universe_bound) out.push_back(b);
    return out;
}

Hint ExplicitTree::cofinal_hint(const NodeSeq&, Nat) const { return Hint::no; }

void ExplicitTree::insert_unchecked(const NodeSeq& s)
{
    if (!nodes_.insert(s).second) return;
    largest_ = std::max(largest_, s.top());
    if (!s.empty()) {
        auto& kids = children_[s.prefix(s.size() - 1)];
        kids.insert(std::upper_bound(kids.begin(), kids.end(), s.top()), s.top());
    }
}

ExplicitTree validate_explicit(const std::vector<std::vector<Nat>>& nodes)
{
    std::vector<Issue> issues;
    std::set<NodeSeq> valid;
    for (const auto& raw : nodes) {
        auto node = NodeSeq::try_from(raw);
        if (!node)
            issues.push_back({Errc::NotIncreasing, raw});
        else
            valid.insert(*node);
    }
    if (!valid.count(NodeSeq{})) issues.insert(issues.begin(), Issue{Errc::MissingRoot, {}});

    std::vector<Nat> unclosed;
    for (const auto& s : valid) {
        bool closed = true;
        for (std::size_t len = 0; len < s.size() && closed; ++len)
            closed = valid.count(s.prefix(len)) > 0;
        if (!closed) issues.push_back({Errc::NotPrefixClosed, std::vector<Nat>(s.begin(), s.end())});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    ExplicitTree tree;
    for (const auto& s : valid) tree.insert_unchecked(s);
    return tree;
}

void require_node(const TreePresentation& tree, const NodeSeq& s)
{
    if (!tree.contains(s)) throw Error(Errc::NotANode, s.to_string() + " is not a node of " + tree.name(), {s});
}

SonList sons(const TreePresentation& tree, const NodeSeq& s, Nat universe_bound)
{
    require_node(tree, s);
    SonList out;
    for (Nat b : tree.son_elements(s, universe_bound)) out.sons.push_back(s.extended(b));
    out.cofinal = tree.cofinal_hint(s, s.top());
    return out;
}

namespace {

bool walk(const TreePresentation& tree,
          const NodeSeq& s,
          Nat bound,
          const std::function<bool(const NodeSeq&)>& visit)
{
    for (Nat b : tree.son_elements(s, bound)) {
        NodeSeq child = s.extended(b);
        if (!visit(child)) return false;
        if (!walk(tree, child, bound, visit)) return false;
    }
    return true;
}

} // namespace

void extensions_beyond(const TreePresentation& tree,
                       const NodeSeq& s,
                       Nat a,
                       Nat universe_bound,
                       const std::function<bool(const NodeSeq&)>& visit)
{
    require_node(tree, s);
    for (Nat b : tree.son_elements(s, universe_bound)) {
        if (b <= a) continue;
        NodeSeq child = s.extended(b);
        if (!visit(child)) return;
        if (!walk(tree, child, universe_bound, visit)) return;
    }
}

void for_each_node(const TreePresentation& tree, Nat bound, const std::function<bool(const NodeSeq&)>& visit)
{
    std::vector<NodeSeq> stack;
    if (tree.contains(NodeSeq{})) stack.emplace_back();
    while (!stack.empty()) {
        NodeSeq s = std::move(stack.back());
        stack.pop_back();
        if (!visit(s)) continue;
        auto kids = tree.son_elements(s, bound);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(s.extended(*it));
    }
}

ExplicitTree truncate(const TreePresentation& tree, Nat universe_bound, std::size_t node_cap)
{
    ExplicitTree out;
    for_each_node(tree, universe_bound, [&](const NodeSeq& s) {
        if (out.nodes_.size() >= node_cap)
            throw Error(Errc::BudgetExceeded,
                        "truncation of " + tree.name() + " at " + std::to_string(universe_bound) + " exceeds "
                            + std::to_string(node_cap) + " nodes");
        out.insert_unchecked(s);
        return true;
    });
    return out;
}

} // namespace treerank
