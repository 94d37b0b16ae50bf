#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "xyzsep/common.hpp"
#include "xyzsep/lattice.hpp"

namespace xyzsep {

/// Lattice plus (optionally) a field configuration, as stored in model files.
struct ModelFile {
    SpinLattice lattice;
    std::optional<FieldAssignment> fields;
};

/// Model JSON schema (sites are 1-indexed in files):
///   { "sites": n, "spin": s | [s1, s2], "cyclic": bool,
///     "edges": [[i, j, r], ...], "couplings": {"jx": ., "jy": ., "jz": .},
///     "fields": [h1, ..., hn] | {"pattern": "alternating", "h1": ., "h2": .} }
inline ModelFile parse_model(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelError("model JSON must be an object");
    for (const auto& [key, val] : j.items()) {
        (void)val;
        if (key != "sites" && key != "spin" && key != "cyclic" && key != "edges" && key != "couplings" &&
            key != "fields")
            throw ModelError("unknown key in model JSON: " + key);
    }
    ModelFile m;
    try {
        m.lattice.n_sites = j.at("sites").get<int>();
        if (m.lattice.n_sites < 1) throw ModelError("sites must be >= 1");

        const auto& sp = j.at("spin");
        if (sp.is_array()) {
            m.lattice.spin = sp.get<std::vector<double>>();
            if (static_cast<int>(m.lattice.spin.size()) != m.lattice.n_sites)
                throw ModelError("spin array length must equal sites");
        } else {
            m.lattice.spin.assign(m.lattice.n_sites, sp.get<double>());
        }

        m.lattice.cyclic = j.value("cyclic", false);

        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3) throw ModelError("edge must be [i, j] or [i, j, r]");
            Edge edge;
            edge.i = e.at(0).get<int>() - 1;
            edge.j = e.at(1).get<int>() - 1;
            edge.r = e.size() == 3 ? e.at(2).get<double>() : 1.0;
            if (edge.i > edge.j) std::swap(edge.i, edge.j);
            m.lattice.edges.push_back(edge);
        }

        const auto& c = j.at("couplings");
        m.lattice.base.jx = c.at("jx").get<double>();
        m.lattice.base.jy = c.at("jy").get<double>();
        m.lattice.base.jz = c.at("jz").get<double>();

        validate_lattice(m.lattice);

        if (j.contains("fields")) {
            const auto& f = j.at("fields");
            if (f.is_array()) {
                auto vals = f.get<std::vector<double>>();
                if (static_cast<int>(vals.size()) != m.lattice.n_sites)
                    throw ModelError("fields array length must equal sites");
                m.fields = explicit_fields(std::move(vals));
            } else if (f.is_object()) {
                if (f.value("pattern", "") != std::string("alternating"))
                    throw ModelError("field pattern must be \"alternating\"");
                m.fields = alternating_fields(m.lattice, f.at("h1").get<double>(), f.at("h2").get<double>());
            } else {
                throw ModelError("fields must be an array or an alternating-pattern object");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed model JSON: ") + e.what());
    }
    return m;
}

inline nlohmann::json model_to_json(const SpinLattice& lat, const std::optional<FieldAssignment>& fields) {
    validate_lattice(lat);
    nlohmann::json j;
    j["sites"] = lat.n_sites;
    bool uniform = true;
    for (double s : lat.spin) uniform = uniform && s == lat.spin.front();
    if (uniform)
        j["spin"] = lat.spin.front();
    else
        j["spin"] = lat.spin;
    j["cyclic"] = lat.cyclic;
    auto edges = lat.edges;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edges) j["edges"].push_back({e.i + 1, e.j + 1, e.r});
    j["couplings"] = {{"jx", lat.base.jx}, {"jy", lat.base.jy}, {"jz", lat.base.jz}};
    if (fields) {
        if (fields->pattern == FieldAssignment::Pattern::Alternating)
            j["fields"] = {{"pattern", "alternating"}, {"h1", fields->h1}, {"h2", fields->h2}};
        else
            j["fields"] = fields->values;
    }
    return j;
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return parse_model(j);
}

inline void save_model(const std::string& path, const SpinLattice& lat,
                       const std::optional<FieldAssignment>& fields = std::nullopt) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot open output file: " + path);
    out << model_to_json(lat, fields).dump(2) << '\n';
}

}  // namespace xyzsep
