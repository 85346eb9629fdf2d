#include "mcsbr/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace mcsbr {

namespace {

struct RayTriHit {
    double t;
    bool front_side;  // ray arrives from the normal side
};

// Moller-Trumbore with inclusive edge bounds; shared-edge hits are resolved
// by the caller's smallest-id tie break.
inline bool ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                         const Vec3& c, double t_min, double t_max, RayTriHit& out) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = cross(dir, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < 1e-14) return false;
    const double inv_det = 1.0 / det;
    const Vec3 s = origin - a;
    const double u = dot(s, p) * inv_det;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 q = cross(s, e1);
    const double v = dot(dir, q) * inv_det;
    if (v < 0.0 || u + v > 1.0) return false;
    const double t = dot(e2, q) * inv_det;
    if (t <= t_min || t >= t_max) return false;
    out.t = t;
    out.front_side = det > 0.0;
    return true;
}

inline Vec3 vmin(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 vmax(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

inline bool slab_hit(const Vec3& lo, const Vec3& hi, const Vec3& origin, const Vec3& inv_dir,
                     double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int axis = 0; axis < 3; ++axis) {
        const double o = axis == 0 ? origin.x : axis == 1 ? origin.y : origin.z;
        const double inv = axis == 0 ? inv_dir.x : axis == 1 ? inv_dir.y : inv_dir.z;
        const double l = axis == 0 ? lo.x : axis == 1 ? lo.y : lo.z;
        const double h = axis == 0 ? hi.x : axis == 1 ? hi.y : hi.z;
        double near = (l - o) * inv;
        double far = (h - o) * inv;
        if (near > far) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace

void Scene::build_bvh() {
    const size_t n = triangles.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);

    std::vector<Vec3> centroids(n);
    std::vector<Vec3> tri_lo(n), tri_hi(n);
    for (size_t i = 0; i < n; ++i) {
        const Triangle& t = triangles[i];
        const Vec3& a = vertices[t.v0];
        const Vec3& b = vertices[t.v1];
        const Vec3& c = vertices[t.v2];
        centroids[i] = (a + b + c) / 3.0;
        tri_lo[i] = vmin(a, vmin(b, c));
        tri_hi[i] = vmax(a, vmax(b, c));
    }

    nodes_.clear();
    nodes_.reserve(2 * n + 1);

    struct Task {
        uint32_t node;
        uint32_t begin, end;
    };
    nodes_.push_back({});
    std::vector<Task> stack{{0, 0, static_cast<uint32_t>(n)}};

    while (!stack.empty()) {
        const Task task = stack.back();
        stack.pop_back();
        BvhNode& node = nodes_[task.node];

        Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
        Vec3 clo = lo, chi = hi;
        for (uint32_t i = task.begin; i < task.end; ++i) {
            lo = vmin(lo, tri_lo[order_[i]]);
            hi = vmax(hi, tri_hi[order_[i]]);
            clo = vmin(clo, centroids[order_[i]]);
            chi = vmax(chi, centroids[order_[i]]);
        }
        node.lo = lo;
        node.hi = hi;

        const uint32_t count = task.end - task.begin;
        if (count <= 4) {
            node.left = task.begin;
            node.count = count;
            continue;
        }

        const Vec3 extent = chi - clo;
        int axis = 0;
        if (extent.y > extent.x) axis = 1;
        if (extent.z > (axis == 0 ? extent.x : extent.y)) axis = 2;
        const double mid = 0.5 * ((axis == 0 ? clo.x : axis == 1 ? clo.y : clo.z) +
                                  (axis == 0 ? chi.x : axis == 1 ? chi.y : chi.z));

        auto key = [&](uint32_t id) {
            const Vec3& c = centroids[id];
            return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
        };
        auto* base = order_.data();
        auto* split = std::partition(base + task.begin, base + task.end,
                                     [&](uint32_t id) { return key(id) < mid; });
        uint32_t cut = static_cast<uint32_t>(split - base);
        if (cut == task.begin || cut == task.end) cut = task.begin + count / 2;

        const uint32_t left = static_cast<uint32_t>(nodes_.size());
        nodes_.push_back({});
        nodes_.push_back({});
        nodes_[task.node].left = left;
        nodes_[task.node].right = left + 1;
        nodes_[task.node].count = 0;
        stack.push_back({left, task.begin, cut});
        stack.push_back({left + 1, cut, task.end});
    }
}

void Scene::finalize() {
    if (triangles.empty()) throw SceneError("scene has no triangles");

    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const Vec3& v : vertices) {
        lo = vmin(lo, v);
        hi = vmax(hi, v);
    }
    bound_center_ = (lo + hi) * 0.5;
    bound_radius_ = 0.0;
    for (const Vec3& v : vertices)
        bound_radius_ = std::max(bound_radius_, norm(v - bound_center_));
    diameter_ = 2.0 * bound_radius_;
    if (!(diameter_ > 0.0)) throw SceneError("scene is degenerate (zero extent)");

    build_bvh();
}

void Scene::fill_hit(Hit& h, const Vec3& dir) const {
    const Triangle& tri = triangles[h.triangle_id];
    const bool front = dot(dir, tri.normal) < 0.0;
    h.normal = front ? tri.normal : -tri.normal;
    const Material& near = materials[front ? tri.front_material : tri.back_material];
    const Material& far = materials[front ? tri.back_material : tri.front_material];
    h.n_incident = near.is_pec ? materials[0].index() : near.index();
    h.far_side_pec = far.is_pec || near.is_pec;
    h.n_transmit = far.is_pec ? 0.0 : far.index();
    h.exterior_facing = tri.exterior_facing;
    h.near_is_ambient = (front ? tri.front_material : tri.back_material) == 0;
}

std::optional<Hit> Scene::intersect(const Vec3& origin, const Vec3& dir, double t_min) const {
    const Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    double best_t = std::numeric_limits<double>::infinity();
    uint32_t best_id = std::numeric_limits<uint32_t>::max();

    std::array<uint32_t, 128> stack;
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const BvhNode& node = nodes_[stack[--sp]];
        if (!slab_hit(node.lo, node.hi, origin, inv_dir,
                      best_t == std::numeric_limits<double>::infinity() ? 1e300 : best_t))
            continue;
        if (node.count > 0) {
            for (uint32_t i = node.left; i < node.left + node.count; ++i) {
                const uint32_t id = order_[i];
                const Triangle& tri = triangles[id];
                RayTriHit rh;
                if (ray_triangle(origin, dir, vertices[tri.v0], vertices[tri.v1],
                                 vertices[tri.v2], t_min, 1e300, rh)) {
                    if (rh.t < best_t || (rh.t == best_t && id < best_id)) {
                        best_t = rh.t;
                        best_id = id;
                    }
                }
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }

    if (best_id == std::numeric_limits<uint32_t>::max()) return std::nullopt;
    Hit h;
    h.t = best_t;
    h.point = origin + best_t * dir;
    h.triangle_id = best_id;
    fill_hit(h, dir);
    return h;
}

std::optional<Hit> Scene::intersect_brute_force(const Vec3& origin, const Vec3& dir,
                                                double t_min) const {
    double best_t = std::numeric_limits<double>::infinity();
    uint32_t best_id = std::numeric_limits<uint32_t>::max();
    for (uint32_t id = 0; id < triangles.size(); ++id) {
        const Triangle& tri = triangles[id];
        RayTriHit rh;
        if (ray_triangle(origin, dir, vertices[tri.v0], vertices[tri.v1], vertices[tri.v2],
                         t_min, 1e300, rh)) {
            if (rh.t < best_t || (rh.t == best_t && id < best_id)) {
                best_t = rh.t;
                best_id = id;
            }
        }
    }
    if (best_id == std::numeric_limits<uint32_t>::max()) return std::nullopt;
    Hit h;
    h.t = best_t;
    h.point = origin + best_t * dir;
    h.triangle_id = best_id;
    fill_hit(h, dir);
    return h;
}

bool Scene::occluded(const Vec3& point, const Vec3& dir) const {
    return intersect(point, dir, self_intersection_epsilon()).has_value();
}

LaunchRect launch_rect(const Scene& scene, const Vec3& k_inc, double padding) {
    const Vec3 k = normalized(k_inc);
    Vec3 seed{1.0, 0.0, 0.0};
    if (std::abs(k.x) > 0.9) seed = Vec3{0.0, 1.0, 0.0};
    const Vec3 u = normalized(cross(k, seed));
    const Vec3 v = cross(k, u);

    double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300;
    for (const Vec3& p : scene.vertices) {
        const double pu = dot(p, u);
        const double pv = dot(p, v);
        ulo = std::min(ulo, pu);
        uhi = std::max(uhi, pu);
        vlo = std::min(vlo, pv);
        vhi = std::max(vhi, pv);
    }
    ulo -= padding;
    uhi += padding;
    vlo -= padding;
    vhi += padding;

    LaunchRect rect;
    rect.u_axis = u;
    rect.v_axis = v;
    rect.half_u = 0.5 * (uhi - ulo);
    rect.half_v = 0.5 * (vhi - vlo);
    const double standoff = dot(scene.bounding_center(), k) - 1.05 * scene.bounding_radius();
    rect.center = 0.5 * (ulo + uhi) * u + 0.5 * (vlo + vhi) * v + standoff * k;
    return rect;
}

}  // namespace mcsbr
