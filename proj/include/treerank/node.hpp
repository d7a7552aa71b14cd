#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treerank {

/// A natural number. Negative values only appear as the `kBelowAll` sentinel.
using Nat = std::int32_t;

/// max(∅): sits below every natural.
inline constexpr Nat kBelowAll = -1;

/// A node of a tree on ℕ: a finite set of naturals kept as its increasing
/// enumeration. The empty node is the root.
class NodeSeq {
public:
    NodeSeq() = default;
    NodeSeq(std::initializer_list<Nat> elems);
    explicit NodeSeq(std::vector<Nat> elems);

    /// Returns nullopt unless `elems` is strictly increasing and nonnegative.
    static std::optional<NodeSeq> try_from(std::span<const Nat> elems);

    std::size_t size() const noexcept { return elems_.size(); }
    bool empty() const noexcept { return elems_.empty(); }
    Nat operator[](std::size_t i) const { return elems_[i]; }
    std::span<const Nat> elements() const noexcept { return elems_; }
    auto begin() const noexcept { return elems_.begin(); }
    auto end() const noexcept { return elems_.end(); }

    /// Largest element, or kBelowAll for the root.
    Nat top() const noexcept { return elems_.empty() ? kBelowAll : elems_.back(); }
    std::optional<Nat> max() const;
    std::optional<Nat> min() const;

    /// The initial segment made of the `len` smallest elements.
    NodeSeq prefix(std::size_t len) const;
    /// s ∪ {b}; requires b > top().
    NodeSeq extended(Nat b) const;
    bool has(Nat x) const;

    std::string to_string() const;

    friend bool operator==(const NodeSeq&, const NodeSeq&) = default;
    friend auto operator<=>(const NodeSeq& a, const NodeSeq& b) { return a.elems_ <=> b.elems_; }

private:
    std::vector<Nat> elems_;
};

/// s ⪯ t: s consists of the |s| smallest elements of t.
bool is_initial_segment(const NodeSeq& s, const NodeSeq& t);

/// Length first, then lexicographic.
bool shortlex_less(const NodeSeq& a, const NodeSeq& b);

/// Parses "[0, 2, 5]" (whitespace tolerant). Throws Error(ParseError).
NodeSeq parse_node(std::string_view text);

struct NodeSeqHash {
    std::size_t operator()(const NodeSeq& s) const noexcept;
};

} // namespace treerank
