#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treerank/node.hpp"

namespace treerank {

enum class Errc {
    // tree-core
    NotIncreasing,
    MissingRoot,
    NotPrefixClosed,
    NotANode,
    BudgetExceeded,
    UnknownGallery,
    // game
    BoundsInvalid,
    NoFiniteValue,
    PreconditionFailed,
    NoReply,
    IllegalMove,
    // rank
    UnboundedRank,
    NoReplyPastB,
    NotFiniteRank,
    // branch
    NoBranchCertified,
    PrefixStalled,
    NotLocallyFinite,
    // interp
    IndexOutOfUniverse,
    UniverseTooSmall,
    NotComparable,
    ConstructionStalled,
    PremiseViolated,
    // fo-eval
    UnboundVariable,
    UnknownUniverse,
    ArityMismatch,
    UnknownBuiltin,
    // plumbing
    ParseError,
    FixtureError,
    UsageError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::vector<NodeSeq> nodes = {});

    Errc code() const noexcept { return code_; }
    /// Nodes the error is about (offenders, stalled positions, ...).
    const std::vector<NodeSeq>& nodes() const noexcept { return nodes_; }

private:
    Errc code_;
    std::vector<NodeSeq> nodes_;
};

/// One problem found while validating an explicit node set. Offending
/// sequences are kept raw since they may not be valid NodeSeqs.
struct Issue {
    Errc code;
    std::vector<Nat> sequence;
};

/// Carries every issue found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Issue> issues);
    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    std::vector<Issue> issues_;
};

} // namespace treerank
