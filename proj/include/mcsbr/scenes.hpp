#pragma once
// Parameterized builtin benchmark scenes, emitted in the same mesh +
// material-map text formats the loader consumes.

#include <map>
#include <string>
#include <vector>

#include "mcsbr/geometry.hpp"

namespace mcsbr {

struct SceneFiles {
    std::string mesh_obj;
    std::string material_map;
};

/// Numeric parameters per scene (all optional):
///   plate: size_a_m, size_b_m, center_x/y/z_m
///   sphere: radius_m, subdivisions, center_*
///   pec_cube: size_m
///   dihedral: size_m
///   glass_cube / glass_cube_pec_bottom: size_m, eps_r
///   nested: outer_size_m, inner_size_m, sphere_radius_m, outer_eps_r,
///           inner_eps_r, subdivisions
///   airplane_stub: span_m, length_m, fin_height_m, eps_r (0 = PEC)
SceneFiles builtin_scene(const std::string& name,
                         const std::map<std::string, double>& params = {});

/// All recognized builtin names.
std::vector<std::string> builtin_scene_names();

/// Generate and immediately load (no filesystem round trip).
Scene make_builtin_scene(const std::string& name,
                         const std::map<std::string, double>& params = {});

/// Write <name>.obj and <name>.materials.json into a directory; returns the
/// two paths.
std::pair<std::string, std::string> write_builtin_scene(
    const std::string& name, const std::map<std::string, double>& params,
    const std::string& directory);

}  // namespace mcsbr
