#include "mcsbr/scenes.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcsbr {

namespace {

struct MeshBuilder {
    std::vector<Vec3> vertices;
    struct Face {
        uint32_t a, b, c;
        std::string group;
    };
    std::vector<Face> faces;

    uint32_t vertex(const Vec3& v) {
        vertices.push_back(v);
        return static_cast<uint32_t>(vertices.size() - 1);
    }
    void tri(uint32_t a, uint32_t b, uint32_t c, const std::string& group) {
        faces.push_back({a, b, c, group});
    }
    void quad(uint32_t a, uint32_t b, uint32_t c, uint32_t d, const std::string& group) {
        tri(a, b, c, group);
        tri(a, c, d, group);
    }

    std::string to_obj() const {
        std::ostringstream out;
        char buf[128];
        for (const Vec3& v : vertices) {
            std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
            out << buf;
        }
        std::string group;
        for (const Face& f : faces) {
            if (f.group != group) {
                group = f.group;
                out << "g " << group << "\n";
            }
            out << "f " << f.a + 1 << " " << f.b + 1 << " " << f.c + 1 << "\n";
        }
        return out.str();
    }

    /// Axis-aligned box with outward normals, one group. skip_bottom leaves
    /// the -z face open.
    void box(const Vec3& lo, const Vec3& hi, const std::string& group, bool skip_bottom = false) {
        const uint32_t v000 = vertex({lo.x, lo.y, lo.z});
        const uint32_t v100 = vertex({hi.x, lo.y, lo.z});
        const uint32_t v010 = vertex({lo.x, hi.y, lo.z});
        const uint32_t v110 = vertex({hi.x, hi.y, lo.z});
        const uint32_t v001 = vertex({lo.x, lo.y, hi.z});
        const uint32_t v101 = vertex({hi.x, lo.y, hi.z});
        const uint32_t v011 = vertex({lo.x, hi.y, hi.z});
        const uint32_t v111 = vertex({hi.x, hi.y, hi.z});
        quad(v001, v101, v111, v011, group);  // +z
        if (!skip_bottom) quad(v000, v010, v110, v100, group);  // -z
        quad(v100, v110, v111, v101, group);  // +x
        quad(v000, v001, v011, v010, group);  // -x
        quad(v010, v011, v111, v110, group);  // +y
        quad(v000, v100, v101, v001, group);  // -y
    }

    void rect_plate(const Vec3& center, double size_a, double size_b, const std::string& group) {
        // plate in the xy plane, normal +z
        const double ha = 0.5 * size_a, hb = 0.5 * size_b;
        const uint32_t a = vertex(center + Vec3{-ha, -hb, 0.0});
        const uint32_t b = vertex(center + Vec3{ha, -hb, 0.0});
        const uint32_t c = vertex(center + Vec3{ha, hb, 0.0});
        const uint32_t d = vertex(center + Vec3{-ha, hb, 0.0});
        quad(a, b, c, d, group);
    }

    void icosphere(const Vec3& center, double radius, int subdivisions,
                   const std::string& group) {
        const double t = (1.0 + std::sqrt(5.0)) / 2.0;
        std::vector<Vec3> pts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                                 {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                                 {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
        std::vector<std::array<uint32_t, 3>> tris = {
            {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
        for (auto& p : pts) p = normalized(p);

        for (int s = 0; s < subdivisions; ++s) {
            std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoint;
            auto mid = [&](uint32_t a, uint32_t b) {
                const auto key = std::minmax(a, b);
                auto it = midpoint.find(key);
                if (it != midpoint.end()) return it->second;
                pts.push_back(normalized((pts[a] + pts[b]) * 0.5));
                const uint32_t id = static_cast<uint32_t>(pts.size() - 1);
                midpoint[key] = id;
                return id;
            };
            std::vector<std::array<uint32_t, 3>> next;
            next.reserve(tris.size() * 4);
            for (const auto& tr : tris) {
                const uint32_t ab = mid(tr[0], tr[1]);
                const uint32_t bc = mid(tr[1], tr[2]);
                const uint32_t ca = mid(tr[2], tr[0]);
                next.push_back({tr[0], ab, ca});
                next.push_back({tr[1], bc, ab});
                next.push_back({tr[2], ca, bc});
                next.push_back({ab, bc, ca});
            }
            tris.swap(next);
        }

        const uint32_t base = static_cast<uint32_t>(vertices.size());
        for (const Vec3& p : pts) vertex(center + radius * p);
        for (const auto& tr : tris) tri(base + tr[0], base + tr[1], base + tr[2], group);
    }
};

double param(const std::map<std::string, double>& params, const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
}

Vec3 param_center(const std::map<std::string, double>& params) {
    return {param(params, "center_x_m", 0.0), param(params, "center_y_m", 0.0),
            param(params, "center_z_m", 0.0)};
}

std::string materials_json(const std::string& regions, const std::string& extra_materials) {
    std::string out = "{\n  \"ambient\": \"air\",\n  \"materials\": {\n";
    out += "    \"air\": {\"eps_r\": 1.0, \"mu_r\": 1.0},\n";
    out += "    \"metal\": {\"pec\": true}";
    if (!extra_materials.empty()) out += ",\n" + extra_materials;
    out += "\n  },\n  \"regions\": {\n" + regions + "\n  }\n}\n";
    return out;
}

std::string dielectric(const std::string& name, double eps_r) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "    \"%s\": {\"eps_r\": %.17g, \"mu_r\": 1.0}",
                  name.c_str(), eps_r);
    return buf;
}

}  // namespace

std::vector<std::string> builtin_scene_names() {
    return {"plate",      "sphere", "pec_cube",  "dihedral",
            "glass_cube", "glass_cube_pec_bottom", "nested", "airplane_stub"};
}

SceneFiles builtin_scene(const std::string& name, const std::map<std::string, double>& params) {
    MeshBuilder mesh;
    SceneFiles files;

    if (name == "plate") {
        mesh.rect_plate(param_center(params), param(params, "size_a_m", 1.0),
                        param(params, "size_b_m", 1.0), "plate");
        files.material_map =
            materials_json("    \"plate\": {\"front\": \"air\", \"back\": \"metal\"}", "");
    } else if (name == "sphere") {
        mesh.icosphere(param_center(params), param(params, "radius_m", 1.0),
                       static_cast<int>(param(params, "subdivisions", 4)), "sphere");
        files.material_map =
            materials_json("    \"sphere\": {\"front\": \"air\", \"back\": \"metal\"}", "");
    } else if (name == "pec_cube") {
        const double h = 0.5 * param(params, "size_m", 3.0);
        const Vec3 c = param_center(params);
        mesh.box(c - Vec3{h, h, h}, c + Vec3{h, h, h}, "cube");
        files.material_map =
            materials_json("    \"cube\": {\"front\": \"air\", \"back\": \"metal\"}", "");
    } else if (name == "dihedral") {
        const double l = param(params, "size_m", 1.0);
        // 90 degree corner: one plate in the xy plane (normal +z), one in the
        // yz plane (normal +x), seam along the y axis.
        const uint32_t a0 = mesh.vertex({0.0, -0.5 * l, 0.0});
        const uint32_t a1 = mesh.vertex({l, -0.5 * l, 0.0});
        const uint32_t a2 = mesh.vertex({l, 0.5 * l, 0.0});
        const uint32_t a3 = mesh.vertex({0.0, 0.5 * l, 0.0});
        mesh.quad(a0, a1, a2, a3, "plates");
        const uint32_t b1 = mesh.vertex({0.0, -0.5 * l, l});
        const uint32_t b2 = mesh.vertex({0.0, 0.5 * l, l});
        mesh.quad(a0, a3, b2, b1, "plates");
        files.material_map =
            materials_json("    \"plates\": {\"front\": \"air\", \"back\": \"metal\"}", "");
    } else if (name == "glass_cube" || name == "glass_cube_pec_bottom") {
        const double h = 0.5 * param(params, "size_m", 3.0);
        const double eps = param(params, "eps_r", 1.5);
        const Vec3 c = param_center(params);
        const bool backed = name == "glass_cube_pec_bottom";
        mesh.box(c - Vec3{h, h, h}, c + Vec3{h, h, h}, "cube", backed);
        std::string regions = "    \"cube\": {\"front\": \"air\", \"back\": \"glass\"}";
        if (backed) {
            // Backing plate wound with its normal up, into the glass.
            const uint32_t p0 = mesh.vertex(c + Vec3{-h, -h, -h});
            const uint32_t p1 = mesh.vertex(c + Vec3{h, -h, -h});
            const uint32_t p2 = mesh.vertex(c + Vec3{h, h, -h});
            const uint32_t p3 = mesh.vertex(c + Vec3{-h, h, -h});
            mesh.quad(p0, p1, p2, p3, "backing");
            regions += ",\n    \"backing\": {\"front\": \"glass\", \"back\": \"metal\"}";
        }
        files.material_map = materials_json(regions, dielectric("glass", eps));
    } else if (name == "nested") {
        const double ho = 0.5 * param(params, "outer_size_m", 3.0);
        const double hi = 0.5 * param(params, "inner_size_m", 2.0);
        const double r = param(params, "sphere_radius_m", 0.5);
        const int subdiv = static_cast<int>(param(params, "subdivisions", 3));
        mesh.box({-ho, -ho, -ho}, {ho, ho, ho}, "outer");
        mesh.box({-hi, -hi, -hi}, {hi, hi, hi}, "inner");
        mesh.icosphere({0.0, 0.0, 0.0}, r, subdiv, "core");
        files.material_map = materials_json(
            "    \"outer\": {\"front\": \"air\", \"back\": \"glass_outer\"},\n"
            "    \"inner\": {\"front\": \"glass_outer\", \"back\": \"glass_inner\"},\n"
            "    \"core\": {\"front\": \"glass_inner\", \"back\": \"metal\"}",
            dielectric("glass_outer", param(params, "outer_eps_r", 1.5)) + ",\n" +
                dielectric("glass_inner", param(params, "inner_eps_r", 2.0)));
    } else if (name == "airplane_stub") {
        const double span = param(params, "span_m", 7.0);
        const double length = param(params, "length_m", 7.0);
        const double fin_h = param(params, "fin_height_m", 1.5);
        const double hl = 0.5 * length;
        const double body_h = 0.4;

        // Fuselage.
        mesh.box({-hl, -body_h, -body_h}, {hl, body_h, body_h}, "airframe");
        // Swept wings: trapezoid prisms overlapping the fuselage sides.
        auto wing = [&](double y_in, double y_out) {
            const double le_root = 0.9, te_root = -0.5;   // chord 1.4 at root
            const double le_tip = 0.1, te_tip = -0.6;     // chord 0.7 at tip
            const double th = 0.05;
            const uint32_t l0 = mesh.vertex({le_root, y_in, -th});
            const uint32_t l1 = mesh.vertex({te_root, y_in, -th});
            const uint32_t l2 = mesh.vertex({te_tip, y_out, -th});
            const uint32_t l3 = mesh.vertex({le_tip, y_out, -th});
            const uint32_t u0 = mesh.vertex({le_root, y_in, th});
            const uint32_t u1 = mesh.vertex({te_root, y_in, th});
            const uint32_t u2 = mesh.vertex({te_tip, y_out, th});
            const uint32_t u3 = mesh.vertex({le_tip, y_out, th});
            const bool right = y_out > y_in;
            if (right) {
                mesh.quad(u0, u3, u2, u1, "airframe");  // top (+z)
                mesh.quad(l0, l1, l2, l3, "airframe");  // bottom (-z)
                mesh.quad(u0, u1, l1, l0, "airframe");  // root side
                mesh.quad(u3, l3, l2, u2, "airframe");  // tip side
                mesh.quad(u0, l0, l3, u3, "airframe");  // leading edge
                mesh.quad(u1, u2, l2, l1, "airframe");  // trailing edge
            } else {
                mesh.quad(u0, u1, u2, u3, "airframe");
                mesh.quad(l0, l3, l2, l1, "airframe");
                mesh.quad(u0, l0, l1, u1, "airframe");
                mesh.quad(u3, u2, l2, l3, "airframe");
                mesh.quad(u0, u3, l3, l0, "airframe");
                mesh.quad(u1, l1, l2, u2, "airframe");
            }
        };
        wing(0.3, 0.5 * span);
        wing(-0.3, -0.5 * span);
        // Vertical fin at the tail, swept leading edge.
        {
            const double th = 0.04;
            const double z0 = 0.3, z1 = body_h + fin_h;
            const uint32_t l0 = mesh.vertex({-hl, -th, z0});
            const uint32_t l1 = mesh.vertex({-hl + 1.1, -th, z0});
            const uint32_t l2 = mesh.vertex({-hl + 0.9, -th, z1});
            const uint32_t l3 = mesh.vertex({-hl + 0.35, -th, z1});
            const uint32_t r0 = mesh.vertex({-hl, th, z0});
            const uint32_t r1 = mesh.vertex({-hl + 1.1, th, z0});
            const uint32_t r2 = mesh.vertex({-hl + 0.9, th, z1});
            const uint32_t r3 = mesh.vertex({-hl + 0.35, th, z1});
            mesh.quad(l0, l1, l2, l3, "airframe");      // -y side
            mesh.quad(r0, r3, r2, r1, "airframe");      // +y side
            mesh.quad(l3, l2, r2, r3, "airframe");      // top
            mesh.quad(l0, l3, r3, r0, "airframe");      // leading edge
            mesh.quad(l1, r1, r2, l2, "airframe");      // trailing edge
            mesh.quad(l0, r0, r1, l1, "airframe");      // base
        }
        const double eps = param(params, "eps_r", 0.0);
        if (eps > 0.0) {
            files.material_map = materials_json(
                "    \"airframe\": {\"front\": \"air\", \"back\": \"skin\"}",
                dielectric("skin", eps));
        } else {
            files.material_map = materials_json(
                "    \"airframe\": {\"front\": \"air\", \"back\": \"metal\"}", "");
        }
    } else {
        throw std::invalid_argument("unknown builtin scene: " + name);
    }

    files.mesh_obj = mesh.to_obj();
    return files;
}

Scene make_builtin_scene(const std::string& name, const std::map<std::string, double>& params) {
    const SceneFiles files = builtin_scene(name, params);
    return load_scene(files.mesh_obj, files.material_map);
}

std::pair<std::string, std::string> write_builtin_scene(
    const std::string& name, const std::map<std::string, double>& params,
    const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const SceneFiles files = builtin_scene(name, params);
    const std::string mesh_path = (fs::path(directory) / (name + ".obj")).string();
    const std::string map_path = (fs::path(directory) / (name + ".materials.json")).string();
    std::ofstream(mesh_path) << files.mesh_obj;
    std::ofstream(map_path) << files.material_map;
    return {mesh_path, map_path};
}

}  // namespace mcsbr
