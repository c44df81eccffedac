#pragma once
#include <string>

#include <json.hpp>

#include "wfem/mesh.hpp"

namespace wfem {

inline nlohmann::json mesh_to_json(const Mesh& m) {
    nlohmann::json j;
    j["domain"] = {{"kind", m.domain.kind == DomainDesc::Kind::Disk ? "disk" : "square"},
                   {"radius", m.domain.radius}};
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (auto& v : m.vertices) vs.push_back({v.x, v.y});
    auto& ts = j["triangles"] = nlohmann::json::array();
    for (auto& t : m.triangles) ts.push_back({t[0], t[1], t[2]});
    auto& bs = j["boundary_edges"] = nlohmann::json::array();
    for (auto& be : m.boundary_edges)
        bs.push_back({{"a", be.a},
                      {"b", be.b},
                      {"label", be.label == EdgeLabel::Dirichlet ? "dirichlet" : "flux"}});
    j["h_max"] = m.h_max;
    return j;
}

// rejects documents that violate the mesh invariants
inline Mesh mesh_from_json(const nlohmann::json& j) {
    Mesh m;
    std::string kind = j.at("domain").at("kind").get<std::string>();
    if (kind == "disk")
        m.domain.kind = DomainDesc::Kind::Disk;
    else if (kind == "square")
        m.domain.kind = DomainDesc::Kind::Square;
    else
        throw std::invalid_argument("mesh_from_json: unknown domain kind " + kind);
    m.domain.radius = j.at("domain").at("radius").get<double>();
    for (auto& v : j.at("vertices"))
        m.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    for (auto& t : j.at("triangles"))
        m.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    for (auto& be : j.at("boundary_edges")) {
        std::string label = be.at("label").get<std::string>();
        if (label != "dirichlet" && label != "flux")
            throw std::invalid_argument("mesh_from_json: unknown edge label " + label);
        m.boundary_edges.push_back({be.at("a").get<int>(), be.at("b").get<int>(),
                                    label == "dirichlet" ? EdgeLabel::Dirichlet
                                                         : EdgeLabel::Flux});
    }
    m.h_max = j.at("h_max").get<double>();
    validate_mesh(m);
    if (std::abs(m.h_max - mesh_h_max(m)) > 1e-9 * std::max(1.0, m.domain.radius))
        throw std::invalid_argument("mesh_from_json: stored h_max mismatch");
    return m;
}

} // namespace wfem
