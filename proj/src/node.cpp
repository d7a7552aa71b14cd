#include "treerank/node.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "treerank/error.hpp"

namespace treerank {

namespace {

bool strictly_increasing(std::span<const Nat> elems)
{
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (elems[i] < 0) return false;
        if (i > 0 && elems[i - 1] >= elems[i]) return false;
    }
    return true;
}

std::string seq_string(std::span<const Nat> elems)
{
    std::string out = "[";
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(elems[i]);
    }
    out += ']';
    return out;
}

} // namespace

NodeSeq::NodeSeq(std::initializer_list<Nat> elems) : NodeSeq(std::vector<Nat>(elems)) {}

NodeSeq::NodeSeq(std::vector<Nat> elems) : elems_(std::move(elems))
{
    if (!strictly_increasing(elems_))
        throw Error(Errc::NotIncreasing, "sequence is not strictly increasing: " + seq_string(elems_));
}

std::optional<NodeSeq> NodeSeq::try_from(std::span<const Nat> elems)
{
    if (!strictly_increasing(elems)) return std::nullopt;
    return NodeSeq(std::vector<Nat>(elems.begin(), elems.end()));
}

std::optional<Nat> NodeSeq::max() const
{
    if (elems_.empty()) return std::nullopt;
    return elems_.back();
}

std::optional<Nat> NodeSeq::min() const
{
    if (elems_.empty()) return std::nullopt;
    return elems_.front();
}

NodeSeq NodeSeq::prefix(std::size_t len) const
{
    NodeSeq out;
    out.elems_.assign(elems_.begin(), elems_.begin() + static_cast<std::ptrdiff_t>(std::min(len, elems_.size())));
    return out;
}

NodeSeq NodeSeq::extended(Nat b) const
{
    if (b <= top())
        throw Error(Errc::NotIncreasing, "cannot extend " + to_string() + " by " + std::to_string(b));
    NodeSeq out = *this;
    out.elems_.push_back(b);
    return out;
}

bool NodeSeq::has(Nat x) const
{
    return std::binary_search(elems_.begin(), elems_.end(), x);
}

std::string NodeSeq::to_string() const { return seq_string(elems_); }

bool is_initial_segment(const NodeSeq& s, const NodeSeq& t)
{
    if (s.size() > t.size()) return false;
    return std::equal(s.begin(), s.end(), t.begin());
}

bool shortlex_less(const NodeSeq& a, const NodeSeq& b)
{
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

NodeSeq parse_node(std::string_view text)
{
    auto fail = [&](const std::string& why) -> Error {
        return Error(Errc::ParseError, "bad node \"" + std::string(text) + "\": " + why);
    };
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    skip_ws();
    if (pos >= text.size() || text[pos] != '[') throw fail("expected '['");
    ++pos;
    std::vector<Nat> elems;
    skip_ws();
    if (pos < text.size() && text[pos] == ']') {
        ++pos;
    } else {
        for (;;) {
            skip_ws();
            Nat value = 0;
            auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
            if (ec != std::errc{} || value < 0) throw fail("expected a natural number");
            pos = static_cast<std::size_t>(ptr - text.data());
            elems.push_back(value);
            skip_ws();
            if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
            if (pos < text.size() && text[pos] == ']') { ++pos; break; }
            throw fail("expected ',' or ']'");
        }
    }
    skip_ws();
    if (pos != text.size()) throw fail("trailing characters");
    auto node = NodeSeq::try_from(elems);
    if (!node) throw fail("elements must be strictly increasing");
    return *node;
}

std::size_t NodeSeqHash::operator()(const NodeSeq& s) const noexcept
{
    std::size_t h = 0x9e3779b97f4a7c15ULL ^ s.size();
    for (Nat x : s) h = (h ^ static_cast<std::size_t>(x)) * 0x100000001b3ULL;
    return h;
}

} // namespace treerank
