#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mcsbr/geometry.hpp"

namespace mcsbr {

namespace {

struct RawMesh {
    std::vector<Vec3> vertices;
    struct Face {
        uint32_t a, b, c;
        std::string group;
        size_t line;
    };
    std::vector<Face> faces;
};

RawMesh parse_obj(const std::string& text) {
    RawMesh mesh;
    std::istringstream in(text);
    std::string line;
    std::string group = "default";
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw SceneError("mesh line " + std::to_string(line_no) + ": malformed vertex");
            mesh.vertices.push_back(v);
        } else if (tag == "g" || tag == "o") {
            if (!(ls >> group)) group = "default";
        } else if (tag == "f") {
            std::vector<uint32_t> idx;
            std::string tok;
            while (ls >> tok) {
                // accept v, v/vt, v/vt/vn, v//vn forms
                const size_t slash = tok.find('/');
                const long raw = std::stol(tok.substr(0, slash));
                if (raw == 0) throw SceneError("mesh line " + std::to_string(line_no) +
                                               ": zero face index");
                const long resolved =
                    raw > 0 ? raw - 1 : static_cast<long>(mesh.vertices.size()) + raw;
                if (resolved < 0 || resolved >= static_cast<long>(mesh.vertices.size()))
                    throw SceneError("mesh line " + std::to_string(line_no) +
                                     ": face index out of range");
                idx.push_back(static_cast<uint32_t>(resolved));
            }
            if (idx.size() < 3)
                throw SceneError("mesh line " + std::to_string(line_no) + ": face needs 3+ vertices");
            for (size_t i = 2; i < idx.size(); ++i)
                mesh.faces.push_back({idx[0], idx[i - 1], idx[i], group, line_no});
        }
        // other tags (vn, vt, usemtl, mtllib, s) are ignored
    }
    return mesh;
}

// Closed-manifold orientation walk for one dielectric region: every edge of
// the region boundary must be shared by exactly two triangles with opposite
// winding once all triangles are oriented with the region on the back side.
void check_region_parity(const Scene& scene, uint16_t material_id) {
    std::map<std::pair<uint32_t, uint32_t>, int> edge_use;
    bool any = false;
    for (const Triangle& tri : scene.triangles) {
        bool back_side;
        if (tri.back_material == material_id)
            back_side = true;
        else if (tri.front_material == material_id)
            back_side = false;
        else
            continue;
        any = true;
        // orient so the region lies behind the normal
        uint32_t v[3] = {tri.v0, tri.v1, tri.v2};
        if (!back_side) std::swap(v[1], v[2]);
        for (int e = 0; e < 3; ++e) {
            const uint32_t s = v[e];
            const uint32_t d = v[(e + 1) % 3];
            edge_use[{std::min(s, d), std::max(s, d)}] += (s < d) ? 1 : -1;
        }
    }
    if (!any) return;
    for (const auto& [edge, balance] : edge_use) {
        if (balance != 0)
            throw SceneError("dielectric region '" + scene.material_names[material_id] +
                             "' has a non-manifold or inconsistently oriented boundary");
    }
}

}  // namespace

Scene load_scene(const std::string& mesh_text, const std::string& material_map_text) {
    using nlohmann::json;
    const RawMesh mesh = parse_obj(mesh_text);

    json map;
    try {
        map = json::parse(material_map_text);
    } catch (const json::exception& e) {
        throw SceneError(std::string("material map: invalid JSON: ") + e.what());
    }

    Scene scene;
    scene.vertices = mesh.vertices;

    const std::string ambient_name = map.value("ambient", std::string("air"));
    std::map<std::string, uint16_t> material_ids;

    auto add_material = [&](const std::string& name, const json& spec) {
        Material m;
        m.is_pec = spec.value("pec", false);
        if (!m.is_pec) {
            m.eps_r = spec.value("eps_r", 1.0);
            m.mu_r = spec.value("mu_r", 1.0);
            if (!(m.eps_r > 0.0) || !(m.mu_r > 0.0) || !std::isfinite(m.eps_r) ||
                !std::isfinite(m.mu_r))
                throw SceneError("material '" + name + "': eps_r and mu_r must be positive");
        }
        material_ids[name] = static_cast<uint16_t>(scene.materials.size());
        scene.materials.push_back(m);
        scene.material_names.push_back(name);
    };

    if (!map.contains("materials") || !map["materials"].is_object())
        throw SceneError("material map: missing 'materials' object");
    if (!map["materials"].contains(ambient_name))
        throw SceneError("material map: ambient material '" + ambient_name + "' not defined");
    add_material(ambient_name, map["materials"][ambient_name]);
    if (scene.materials[0].is_pec)
        throw SceneError("material map: ambient material cannot be PEC");
    for (const auto& [name, spec] : map["materials"].items()) {
        if (name == ambient_name) continue;
        add_material(name, spec);
    }

    if (!map.contains("regions") || !map["regions"].is_object())
        throw SceneError("material map: missing 'regions' object");
    struct RegionPair {
        uint16_t front, back;
    };
    std::map<std::string, RegionPair> regions;
    for (const auto& [group, spec] : map["regions"].items()) {
        const std::string front = spec.value("front", ambient_name);
        const std::string back = spec.value("back", ambient_name);
        for (const std::string& name : {front, back}) {
            if (!material_ids.count(name))
                throw SceneError("regions." + group + ": unknown material '" + name + "'");
        }
        regions[group] = {material_ids[front], material_ids[back]};
    }

    scene.triangles.reserve(mesh.faces.size());
    for (const auto& face : mesh.faces) {
        auto it = regions.find(face.group);
        if (it == regions.end())
            throw SceneError("mesh group '" + face.group + "' has no region entry (line " +
                             std::to_string(face.line) + ")");
        Triangle tri;
        tri.v0 = face.a;
        tri.v1 = face.b;
        tri.v2 = face.c;
        const Vec3 n = cross(scene.vertices[face.b] - scene.vertices[face.a],
                             scene.vertices[face.c] - scene.vertices[face.a]);
        const double area2 = norm(n);
        if (area2 < 1e-12)
            throw SceneError("degenerate triangle " + std::to_string(scene.triangles.size()) +
                             " (mesh line " + std::to_string(face.line) + ")");
        tri.normal = n / area2;
        tri.front_material = it->second.front;
        tri.back_material = it->second.back;
        tri.exterior_facing = tri.front_material == 0 || tri.back_material == 0;
        scene.triangles.push_back(tri);
    }

    // Parity-consistency walk over every non-ambient dielectric region.
    for (uint16_t id = 1; id < scene.materials.size(); ++id) {
        if (!scene.materials[id].is_pec) check_region_parity(scene, id);
    }

    scene.finalize();
    return scene;
}

Scene load_scene_files(const std::string& mesh_path, const std::string& material_map_path) {
    auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw SceneError("cannot open file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    return load_scene(slurp(mesh_path), slurp(material_map_path));
}

}  // namespace mcsbr
