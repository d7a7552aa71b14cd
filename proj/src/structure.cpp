#include "treerank/structure.hpp"

#include <algorithm>
#include <bit>
#include <fstream>

#include "treerank/error.hpp"

namespace treerank {

using json = nlohmann::json;

Mask mask_of(const std::vector<Nat>& elems)
{
    Mask m = 0;
    for (Nat x : elems) m |= bit(x);
    return m;
}

std::vector<Nat> mask_elements(Mask m)
{
    std::vector<Nat> out;
    while (m) {
        out.push_back(static_cast<Nat>(std::countr_zero(m)));
        m &= m - 1;
    }
    return out;
}

std::string mask_to_string(Mask m)
{
    std::string out = "{";
    bool first = true;
    for (Nat x : mask_elements(m)) {
        if (!first) out += ",";
        out += std::to_string(x);
        first = false;
    }
    return out + "}";
}

Mask FiniteStructure::carrier_mask() const { return mask_of(carrier); }

bool FiniteStructure::is_index(Nat i) const { return std::binary_search(indices.begin(), indices.end(), i); }

bool FiniteStructure::is_param(Nat a) const { return std::binary_search(params.begin(), params.end(), a); }

namespace {

Error fixture_error(const std::string& why) { return Error(Errc::FixtureError, why); }

Nat largest(const std::vector<Nat>& v) { return v.empty() ? 0 : *std::max_element(v.begin(), v.end()); }

void normalize(std::vector<Nat>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Nat> read_set(const json& doc, const char* key, bool required)
{
    if (!doc.contains(key)) {
        if (required) throw fixture_error(std::string("structure fixture needs \"") + key + "\"");
        return {};
    }
    const auto& arr = doc[key];
    if (!arr.is_array()) throw fixture_error(std::string("\"") + key + "\" must be an array");
    std::vector<Nat> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > kMaxUniverse)
            throw fixture_error(std::string("\"") + key + "\" entries must be integers in [0,63]");
        out.push_back(v.get<Nat>());
    }
    normalize(out);
    return out;
}

std::vector<std::vector<Nat>> read_tuples(const json& doc, const char* key, std::size_t arity)
{
    const auto& arr = doc[key];
    if (!arr.is_array()) throw fixture_error(std::string("\"") + key + "\" must be an array of tuples");
    std::vector<std::vector<Nat>> out;
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != arity)
            throw fixture_error(std::string("\"") + key + "\" tuples must have " + std::to_string(arity) + " entries");
        std::vector<Nat> tuple;
        for (const auto& v : t) {
            if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > kMaxUniverse)
                throw fixture_error(std::string("\"") + key + "\" entries must be integers in [0,63]");
            tuple.push_back(v.get<Nat>());
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

} // namespace

FiniteStructure structure_with_fibers(const std::vector<Nat>& carrier, const std::vector<Mask>& fibers)
{
    FiniteStructure st;
    st.carrier = carrier;
    normalize(st.carrier);
    for (std::size_t i = 0; i < fibers.size(); ++i) st.indices.push_back(static_cast<Nat>(i));
    st.universe = std::max(largest(st.carrier), largest(st.indices));
    for (Mask f : fibers)
        if (f) st.universe = std::max<Nat>(st.universe, 63 - std::countl_zero(f));
    if (st.universe > kMaxUniverse) throw Error(Errc::UniverseTooSmall, "structures are limited to [0,63]");
    st.binary = std::vector<Mask>(st.universe + 1, 0);
    for (std::size_t i = 0; i < fibers.size(); ++i) (*st.binary)[i] = fibers[i];
    return st;
}

FiniteStructure ternary_structure(std::vector<Nat> carrier, std::vector<Nat> indices, std::vector<Nat> params)
{
    FiniteStructure st;
    normalize(carrier);
    normalize(indices);
    normalize(params);
    st.universe = std::max({largest(carrier), largest(indices), largest(params)});
    if (st.universe > kMaxUniverse) throw Error(Errc::UniverseTooSmall, "structures are limited to [0,63]");
    st.carrier = std::move(carrier);
    st.indices = std::move(indices);
    st.params = std::move(params);
    st.ternary = std::vector<std::vector<Mask>>(st.universe + 1, std::vector<Mask>(st.universe + 1, 0));
    return st;
}

void set_ternary(FiniteStructure& st, Nat a, Nat i, Mask fiber_members)
{
    if (!st.ternary) throw Error(Errc::ArityMismatch, "structure has no ternary relation");
    if (!st.is_param(a) || !st.is_index(i))
        throw Error(Errc::IndexOutOfUniverse, "C(-, " + std::to_string(i) + ", " + std::to_string(a) + ") is off the universes");
    (*st.ternary)[a][i] = fiber_members;
}

Mask fiber(const FiniteStructure& st, Nat i)
{
    if (!st.binary) throw Error(Errc::ArityMismatch, "structure has no binary relation B");
    if (!st.is_index(i)) throw Error(Errc::IndexOutOfUniverse, "index " + std::to_string(i) + " is not in I");
    return (*st.binary)[i] & st.carrier_mask();
}

Mask fiber(const FiniteStructure& st, Nat a, Nat i)
{
    if (!st.ternary) throw Error(Errc::ArityMismatch, "structure has no ternary relation C");
    if (!st.is_index(i)) throw Error(Errc::IndexOutOfUniverse, "index " + std::to_string(i) + " is not in I");
    if (!st.is_param(a)) throw Error(Errc::IndexOutOfUniverse, "parameter " + std::to_string(a) + " is not in A");
    return (*st.ternary)[a][i] & st.carrier_mask();
}

FiniteStructure structure_from_json(const json& doc)
{
    if (!doc.is_object()) throw fixture_error("structure fixture must be a JSON object");
    FiniteStructure st;
    st.carrier = read_set(doc, "S", true);
    st.indices = read_set(doc, "I", true);
    st.params = read_set(doc, "A", false);
    if (st.carrier.empty() || st.indices.empty()) throw fixture_error("\"S\" and \"I\" must be nonempty");
    const bool has_b = doc.contains("B");
    const bool has_c = doc.contains("C");
    if (!has_b && !has_c) throw fixture_error("structure fixture needs a \"B\" or \"C\" table");
    if (has_c && st.params.empty()) throw fixture_error("a \"C\" table needs a nonempty \"A\"");

    std::vector<std::vector<Nat>> b_rows, c_rows;
    if (has_b) b_rows = read_tuples(doc, "B", 2);
    if (has_c) c_rows = read_tuples(doc, "C", 3);
    st.universe = std::max({largest(st.carrier), largest(st.indices), largest(st.params)});
    for (const auto& r : b_rows) st.universe = std::max(st.universe, r[0]);
    for (const auto& r : c_rows) st.universe = std::max(st.universe, r[0]);
    if (doc.contains("U")) {
        const auto& u = doc["U"];
        if (!u.is_number_integer() || u.get<long long>() < st.universe || u.get<long long>() > kMaxUniverse)
            throw fixture_error("\"U\" must cover every listed element and be at most 63");
        st.universe = u.get<Nat>();
    }

    if (has_b) {
        st.binary = std::vector<Mask>(st.universe + 1, 0);
        for (const auto& r : b_rows) {
            if (!st.is_index(r[1])) throw fixture_error("B tuple [" + std::to_string(r[0]) + "," + std::to_string(r[1]) + "] has an index outside I");
            (*st.binary)[r[1]] |= bit(r[0]);
        }
    }
    if (has_c) {
        st.ternary = std::vector<std::vector<Mask>>(st.universe + 1, std::vector<Mask>(st.universe + 1, 0));
        for (const auto& r : c_rows) {
            if (!st.is_index(r[1]) || !st.is_param(r[2]))
                throw fixture_error("C tuple [" + std::to_string(r[0]) + "," + std::to_string(r[1]) + "," + std::to_string(r[2])
                                    + "] is outside I x A");
            (*st.ternary)[r[2]][r[1]] |= bit(r[0]);
        }
    }
    return st;
}

json structure_to_json(const FiniteStructure& st)
{
    json doc;
    doc["U"] = st.universe;
    doc["S"] = st.carrier;
    doc["I"] = st.indices;
    if (!st.params.empty()) doc["A"] = st.params;
    if (st.binary) {
        json rows = json::array();
        for (Nat i : st.indices)
            for (Nat x : mask_elements((*st.binary)[i])) rows.push_back({x, i});
        doc["B"] = rows;
    }
    if (st.ternary) {
        json rows = json::array();
        for (Nat a : st.params)
            for (Nat i : st.indices)
                for (Nat x : mask_elements((*st.ternary)[a][i])) rows.push_back({x, i, a});
        doc["C"] = rows;
    }
    return doc;
}

FiniteStructure load_structure(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw fixture_error("cannot open structure fixture '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw fixture_error("structure fixture '" + path + "' is not valid JSON: " + e.what());
    }
    return structure_from_json(doc);
}

} // namespace treerank
