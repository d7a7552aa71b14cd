#include "treerank/fixture.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "treerank/error.hpp"
#include "treerank/gallery.hpp"

namespace treerank {

namespace {

Error fixture_error(const std::string& why) { return Error(Errc::FixtureError, why); }

std::vector<Nat> read_sequence(const json& arr)
{
    if (!arr.is_array()) throw fixture_error("node must be an array of naturals");
    std::vector<Nat> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1'000'000'000)
            throw fixture_error("node elements must be nonnegative integers");
        out.push_back(v.get<Nat>());
    }
    return out;
}

} // namespace

std::unique_ptr<TreePresentation> tree_from_json(const json& doc)
{
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string())
        throw fixture_error("tree fixture needs a string \"kind\"");
    const auto kind = doc["kind"].get<std::string>();
    if (kind == "explicit") {
        if (!doc.contains("nodes") || !doc["nodes"].is_array())
            throw fixture_error("explicit tree fixture needs a \"nodes\" array");
        std::vector<std::vector<Nat>> nodes;
        for (const auto& n : doc["nodes"]) nodes.push_back(read_sequence(n));
        return std::make_unique<ExplicitTree>(validate_explicit(nodes));
    }
    if (kind == "generator") {
        if (!doc.contains("name") || !doc["name"].is_string())
            throw fixture_error("generator fixture needs a string \"name\"");
        GalleryParams params;
        if (doc.contains("params")) {
            if (!doc["params"].is_object()) throw fixture_error("\"params\" must be an object");
            for (const auto& [key, value] : doc["params"].items()) {
                if (!value.is_number_integer()) throw fixture_error("parameter '" + key + "' must be an integer");
                params[key] = value.get<Nat>();
            }
        }
        return gallery(doc["name"].get<std::string>(), params);
    }
    throw fixture_error("unknown tree kind '" + kind + "'");
}

json node_to_json(const NodeSeq& s)
{
    json arr = json::array();
    for (Nat x : s) arr.push_back(x);
    return arr;
}

json tree_to_json(const TreePresentation& tree)
{
    if (const auto* spec = gallery_spec(tree)) {
        json params = json::object();
        for (const auto& [k, v] : spec->params) params[k] = v;
        return json{{"kind", "generator"}, {"name", spec->name}, {"params", params}};
    }
    if (const auto* ex = dynamic_cast<const ExplicitTree*>(&tree)) {
        std::vector<NodeSeq> nodes(ex->nodes().begin(), ex->nodes().end());
        std::sort(nodes.begin(), nodes.end(), shortlex_less);
        json arr = json::array();
        for (const auto& s : nodes) arr.push_back(node_to_json(s));
        return json{{"kind", "explicit"}, {"nodes", arr}};
    }
    throw fixture_error("tree " + tree.name() + " has no fixture form");
}

std::unique_ptr<TreePresentation> load_tree_fixture(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw fixture_error("cannot open tree fixture '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw fixture_error("'" + path + "': " + e.what());
    }
    return tree_from_json(doc);
}

std::unique_ptr<TreePresentation> tree_from_spec(std::string_view spec)
{
    constexpr std::string_view prefix = "gallery:";
    if (spec.substr(0, prefix.size()) != prefix) return load_tree_fixture(std::string(spec));
    auto rest = spec.substr(prefix.size());
    auto colon = rest.find(':');
    std::string name(rest.substr(0, colon));
    GalleryParams params;
    if (colon != std::string_view::npos) {
        auto arg = rest.substr(colon + 1);
        Nat k = 0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
        if (ec != std::errc{} || ptr != arg.data() + arg.size())
            throw Error(Errc::UsageError, "bad gallery parameter in '" + std::string(spec) + "'");
        params["k"] = k;
    }
    return gallery(name, params);
}

} // namespace treerank
