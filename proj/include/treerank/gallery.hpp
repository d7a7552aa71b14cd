#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "treerank/tree.hpp"

namespace treerank {

using GalleryParams = std::map<std::string, Nat>;

/// Generator-backed trees used as fixtures:
///
///   chain       prefix closure of {[0..n]}
///   pairs       prefix closure of {[a,b] : a < b}
///   depthk(k)   all increasing sequences of length <= k
///   bushspine   prefix closure of {[0..n]} ∪ {[0..n,b] : b > n+1}
///               ∪ {[0..n,b,c] : c > b > n+1}
///   fullspread  all finite increasing sequences
///
/// Throws UnknownGallery for other names or missing/extra parameters.
std::unique_ptr<TreePresentation> gallery(std::string_view name, const GalleryParams& params = {});

std::vector<std::string> gallery_names();

/// Name and parameters of a gallery tree, as written in fixtures.
struct GallerySpec {
    std::string name;
    GalleryParams params;
};

/// Non-null only for trees built by `gallery`.
const GallerySpec* gallery_spec(const TreePresentation& tree) noexcept;

} // namespace treerank
