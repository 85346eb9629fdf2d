#pragma once
// Triangle-mesh scenes with two-sided material assignment, BVH-accelerated
// ray casting, and incident-plane bounding-rect construction for ray launch.
//
// Meshes are Wavefront OBJ text (v / f / g, triangles or quads); the sidecar
// material map is JSON binding group names to (front, back) materials. The
// front material is the medium on the side the triangle normal points toward.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mcsbr/em_math.hpp"

namespace mcsbr {

struct SceneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Triangle {
    uint32_t v0, v1, v2;
    Vec3 normal;           // unit, from winding order
    uint16_t front_material;
    uint16_t back_material;
    bool exterior_facing;  // borders the ambient medium on either side
};

struct Hit {
    double t = 0.0;
    Vec3 point;
    Vec3 normal;          // unit, oriented against the incoming ray
    uint32_t triangle_id = 0;
    double n_incident = 1.0;   // refractive index on the arrival side
    double n_transmit = 1.0;   // refractive index on the far side (0 if PEC)
    bool far_side_pec = false;
    bool exterior_facing = false;
    bool near_is_ambient = false;  // arrival side is the ambient medium
};

/// Launch aperture: rectangle normal to the incident direction, placed
/// outside the scene bounding sphere.
struct LaunchRect {
    Vec3 center;
    Vec3 u_axis, v_axis;     // orthonormal, both normal to k_inc
    double half_u = 0.0, half_v = 0.0;  // meters
    double area() const { return 4.0 * half_u * half_v; }
    Vec3 point_at(double su, double sv) const {  // su, sv in [-1, 1]
        return center + su * half_u * u_axis + sv * half_v * v_axis;
    }
};

class Scene {
public:
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<Material> materials;       // index 0 is the ambient medium
    std::vector<std::string> material_names;

    /// Build the BVH and validate invariants; called by load_scene.
    void finalize();

    /// Nearest intersection with t > t_min. Equal-t ties resolve to the
    /// smallest triangle id so a ray through a shared edge reports one hit.
    std::optional<Hit> intersect(const Vec3& origin, const Vec3& dir, double t_min) const;

    /// True iff something lies along dir beyond the self-intersection epsilon.
    bool occluded(const Vec3& point, const Vec3& dir) const;

    /// Reference implementation used by tests: linear scan over all triangles.
    std::optional<Hit> intersect_brute_force(const Vec3& origin, const Vec3& dir,
                                             double t_min) const;

    double ambient_index() const { return materials[0].index(); }
    double diameter() const { return diameter_; }
    double self_intersection_epsilon() const { return 1e-6 * diameter_; }
    Vec3 bounding_center() const { return bound_center_; }
    double bounding_radius() const { return bound_radius_; }

private:
    struct BvhNode {
        Vec3 lo, hi;
        uint32_t left = 0;    // child index, or first triangle if leaf
        uint32_t count = 0;   // 0 for inner nodes, triangle count for leaves
        uint32_t right = 0;
    };

    void build_bvh();
    void fill_hit(Hit& h, const Vec3& dir) const;

    std::vector<BvhNode> nodes_;
    std::vector<uint32_t> order_;  // triangle indices, leaf-contiguous
    Vec3 bound_center_;
    double bound_radius_ = 0.0;
    double diameter_ = 0.0;
};

/// Parse an OBJ mesh and JSON material map into a validated Scene.
Scene load_scene(const std::string& mesh_text, const std::string& material_map_text);

/// Convenience file-path loader.
Scene load_scene_files(const std::string& mesh_path, const std::string& material_map_path);

/// Bounding rectangle of the scene's silhouette on the plane normal to k_inc,
/// padded per side and offset along -k_inc to sit outside the bounding sphere.
LaunchRect launch_rect(const Scene& scene, const Vec3& k_inc, double padding);

}  // namespace mcsbr
