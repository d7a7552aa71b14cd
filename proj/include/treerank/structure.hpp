#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "treerank/node.hpp"

namespace treerank {

/// A subset of [0, 63].
using Mask = std::uint64_t;

inline constexpr Nat kMaxUniverse = 63;

inline constexpr Mask bit(Nat x) { return Mask{1} << x; }
Mask mask_of(const std::vector<Nat>& elems);
std::vector<Nat> mask_elements(Mask m);
/// "{0,2}"
std::string mask_to_string(Mask m);

/// A finite structure over the element universe [0, universe]: a carrier S,
/// an index universe I, a parameter universe A, and the relation tables
/// B(x, i) and/or C(x, i, a).
struct FiniteStructure {
    Nat universe = 0;
    std::vector<Nat> carrier;  // S, sorted
    std::vector<Nat> indices;  // I, sorted
    std::vector<Nat> params;   // A, sorted; empty without C
    // binary[i] = {x : B(x, i)}, sized universe + 1
    std::optional<std::vector<Mask>> binary;
    // ternary[a][i] = {x : C(x, i, a)}, sized (universe + 1)^2
    std::optional<std::vector<std::vector<Mask>>> ternary;

    Mask carrier_mask() const;
    bool is_index(Nat i) const;
    bool is_param(Nat a) const;

    friend bool operator==(const FiniteStructure&, const FiniteStructure&) = default;
};

/// Builds a structure with B only, one index per listed fiber (I = 0..n-1).
/// The universe covers S and I.
FiniteStructure structure_with_fibers(const std::vector<Nat>& carrier, const std::vector<Mask>& fibers);

/// An empty C table over the given universes; fill it through set_ternary.
FiniteStructure ternary_structure(std::vector<Nat> carrier, std::vector<Nat> indices, std::vector<Nat> params);
void set_ternary(FiniteStructure& st, Nat a, Nat i, Mask fiber_members);

/// s^B_i = S ∩ {x : B(x, i)}. Throws IndexOutOfUniverse, ArityMismatch without B.
Mask fiber(const FiniteStructure& st, Nat i);
/// s^{B_a}_i = S ∩ {x : C(x, i, a)}. Throws IndexOutOfUniverse, ArityMismatch without C.
Mask fiber(const FiniteStructure& st, Nat a, Nat i);

/// {"S":[..], "I":[..], "A":[..], "B":[[x,i],..]} or "C":[[x,i,a],..];
/// optional "U" widens the element universe. Throws FixtureError.
FiniteStructure structure_from_json(const nlohmann::json& doc);
nlohmann::json structure_to_json(const FiniteStructure& st);
FiniteStructure load_structure(const std::string& path);

} // namespace treerank
