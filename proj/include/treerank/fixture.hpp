#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "treerank/tree.hpp"

namespace treerank {

using json = nlohmann::json;

/// Tree fixtures:
///   {"kind":"explicit","nodes":[[],[0],[0,2]]}
///   {"kind":"generator","name":"depthk","params":{"k":3}}
/// Explicit node lists go through validate_explicit; other shape problems
/// raise FixtureError.
std::unique_ptr<TreePresentation> tree_from_json(const json& doc);

/// Explicit trees list their nodes in shortlex order.
json tree_to_json(const TreePresentation& tree);

std::unique_ptr<TreePresentation> load_tree_fixture(const std::string& path);

/// "gallery:NAME" or "gallery:depthk:K" names a gallery tree; anything else
/// is read as a fixture path.
std::unique_ptr<TreePresentation> tree_from_spec(std::string_view spec);

json node_to_json(const NodeSeq& s);

} // namespace treerank
