#include "treerank/gallery.hpp"

#include "treerank/error.hpp"

namespace treerank {

namespace {

class GalleryTree : public TreePresentation {
public:
    explicit GalleryTree(GallerySpec spec) : spec_(std::move(spec)) {}

    Kind kind() const noexcept override { return Kind::generator; }
    std::string name() const override
    {
        std::string out = spec_.name;
        for (const auto& [key, value] : spec_.params) out += "(" + key + "=" + std::to_string(value) + ")";
        return out;
    }
    const GallerySpec& spec() const noexcept { return spec_; }

private:
    GallerySpec spec_;
};

/// True when s = [0, 1, ..., len-1].
bool is_initial_run(const NodeSeq& s)
{
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] != static_cast<Nat>(i)) return false;
    return true;
}

std::vector<Nat> range_after(Nat from, Nat to)
{
    std::vector<Nat> out;
    for (Nat b = from + 1; b <= to; ++b) out.push_back(b);
    return out;
}

class Chain final : public GalleryTree {
public:
    Chain() : GalleryTree({"chain", {}}) {}
    bool contains(const NodeSeq& s) const override { return is_initial_run(s); }
    std::vector<Nat> son_elements(const NodeSeq& s, Nat bound) const override
    {
        Nat next = s.top() + 1;
        if (next <= bound) return {next};
        return {};
    }
    Hint cofinal_hint(const NodeSeq&, Nat) const override { return Hint::no; }
    StateKey state_key(const NodeSeq& s) const override { return {s.top()}; }
};

class DepthK final : public GalleryTree {
public:
    DepthK(std::string name, Nat k, GalleryParams params) : GalleryTree({std::move(name), std::move(params)}), k_(k) {}
    bool contains(const NodeSeq& s) const override { return s.size() <= static_cast<std::size_t>(k_); }
    std::vector<Nat> son_elements(const NodeSeq& s, Nat bound) const override
    {
        if (s.size() >= static_cast<std::size_t>(k_)) return {};
        return range_after(s.top(), bound);
    }
    Hint cofinal_hint(const NodeSeq& s, Nat) const override
    {
        return s.size() < static_cast<std::size_t>(k_) ? Hint::yes : Hint::no;
    }
    StateKey state_key(const NodeSeq& s) const override { return {static_cast<Nat>(s.size()), s.top()}; }

private:
    Nat k_;
};

class BushSpine final : public GalleryTree {
public:
    BushSpine() : GalleryTree({"bushspine", {}}) {}

    enum Part : Nat { spine = 0, bush = 1, leaf = 2 };

    /// Position of a node, or -1 if it is not one.
    static Nat classify(const NodeSeq& s)
    {
        if (is_initial_run(s)) return spine;
        // [0..n, b, ...] with n >= 0 and b > n+1.
        std::size_t run = 0;
        while (run < s.size() && s[run] == static_cast<Nat>(run)) ++run;
        if (run == 0) return -1;
        std::size_t extra = s.size() - run;
        // s[run] > run holds automatically here; bush roots need b > n+1 = run.
        if (extra == 1) return s[run] > static_cast<Nat>(run) ? bush : -1;
        if (extra == 2) return s[run] > static_cast<Nat>(run) ? leaf : -1;
        return -1;
    }

    bool contains(const NodeSeq& s) const override { return classify(s) >= 0; }
    std::vector<Nat> son_elements(const NodeSeq& s, Nat bound) const override
    {
        switch (classify(s)) {
        case spine:
            // next spine element, then bush roots b > n+1 where n = max(s)
            if (s.empty()) return bound >= 0 ? std::vector<Nat>{0} : std::vector<Nat>{};
            return range_after(s.top(), bound);
        case bush:
            return range_after(s.top(), bound);
        default:
            return {};
        }
    }
    Hint cofinal_hint(const NodeSeq& s, Nat) const override
    {
        Nat part = classify(s);
        if (part == bush) return Hint::yes;
        if (part == spine) return s.empty() ? Hint::no : Hint::yes;
        return Hint::no;
    }
    StateKey state_key(const NodeSeq& s) const override
    {
        return {classify(s), s.empty() ? kBelowAll - 1 : s.top()};
    }
};

class FullSpread final : public GalleryTree {
public:
    FullSpread() : GalleryTree({"fullspread", {}}) {}
    bool contains(const NodeSeq&) const override { return true; }
    std::vector<Nat> son_elements(const NodeSeq& s, Nat bound) const override { return range_after(s.top(), bound); }
    Hint cofinal_hint(const NodeSeq&, Nat) const override { return Hint::yes; }
    StateKey state_key(const NodeSeq& s) const override { return {s.top()}; }
};

void expect_params(std::string_view name, const GalleryParams& params, std::initializer_list<std::string_view> keys)
{
    for (const auto& [key, value] : params) {
        bool known = false;
        for (auto k : keys) known = known || key == k;
        if (!known)
            throw Error(Errc::UnknownGallery, "gallery tree " + std::string(name) + " takes no parameter '" + key + "'");
    }
    for (auto k : keys)
        if (!params.count(std::string(k)))
            throw Error(Errc::UnknownGallery,
                        "gallery tree " + std::string(name) + " requires parameter '" + std::string(k) + "'");
}

} // namespace

std::unique_ptr<TreePresentation> gallery(std::string_view name, const GalleryParams& params)
{
    if (name == "chain") {
        expect_params(name, params, {});
        return std::make_unique<Chain>();
    }
    if (name == "pairs") {
        expect_params(name, params, {});
        return std::make_unique<DepthK>("pairs", 2, GalleryParams{});
    }
    if (name == "depthk") {
        expect_params(name, params, {"k"});
        Nat k = params.at("k");
        if (k < 0) throw Error(Errc::UnknownGallery, "depthk needs k >= 0");
        return std::make_unique<DepthK>("depthk", k, params);
    }
    if (name == "bushspine") {
        expect_params(name, params, {});
        return std::make_unique<BushSpine>();
    }
    if (name == "fullspread") {
        expect_params(name, params, {});
        return std::make_unique<FullSpread>();
    }
    throw Error(Errc::UnknownGallery, "unknown gallery tree '" + std::string(name) + "'");
}

std::vector<std::string> gallery_names() { return {"bushspine", "chain", "depthk", "fullspread", "pairs"}; }

const GallerySpec* gallery_spec(const TreePresentation& tree) noexcept
{
    if (auto* g = dynamic_cast<const GalleryTree*>(&tree)) return &g->spec();
    return nullptr;
}

} // namespace treerank
