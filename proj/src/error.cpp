#include "treerank/error.hpp"

namespace treerank {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::NotIncreasing: return "NotIncreasing";
    case Errc::MissingRoot: return "MissingRoot";
    case Errc::NotPrefixClosed: return "NotPrefixClosed";
    case Errc::NotANode: return "NotANode";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::UnknownGallery: return "UnknownGallery";
    case Errc::BoundsInvalid: return "BoundsInvalid";
    case Errc::NoFiniteValue: return "NoFiniteValue";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::NoReply: return "NoReply";
    case Errc::IllegalMove: return "IllegalMove";
    case Errc::UnboundedRank: return "UnboundedRank";
    case Errc::NoReplyPastB: return "NoReplyPastB";
    case Errc::NotFiniteRank: return "NotFiniteRank";
    case Errc::NoBranchCertified: return "NoBranchCertified";
    case Errc::PrefixStalled: return "PrefixStalled";
    case Errc::NotLocallyFinite: return "NotLocallyFinite";
    case Errc::IndexOutOfUniverse: return "IndexOutOfUniverse";
    case Errc::UniverseTooSmall: return "UniverseTooSmall";
    case Errc::NotComparable: return "NotComparable";
    case Errc::ConstructionStalled: return "ConstructionStalled";
    case Errc::PremiseViolated: return "PremiseViolated";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::UnknownUniverse: return "UnknownUniverse";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::UnknownBuiltin: return "UnknownBuiltin";
    case Errc::ParseError: return "ParseError";
    case Errc::FixtureError: return "FixtureError";
    case Errc::UsageError: return "UsageError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::vector<NodeSeq> nodes)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), nodes_(std::move(nodes))
{
}

namespace {

std::string describe(const std::vector<Issue>& issues)
{
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) out += "; ";
        out += to_string(issue.code);
        if (issue.code != Errc::MissingRoot) {
            out += '(';
            out += '[';
            for (std::size_t i = 0; i < issue.sequence.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(issue.sequence[i]);
            }
            out += "])";
        }
    }
    return out;
}

} // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(issues.empty() ? Errc::FixtureError : issues.front().code, describe(issues)), issues_(std::move(issues))
{
}

} // namespace treerank
