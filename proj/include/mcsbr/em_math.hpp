#pragma once
// Complex vector algebra, polarization bases, Snell's law and Fresnel
// interface coefficients. Everything here is a pure function over value
// types; the whole solver stack is built on this kernel.
//
// Conventions (see docs/conventions.md for the worked examples):
//   - time factor e^{+j omega t}, spatial phase e^{-j k0 phi}
//   - s/p Fresnel signs chosen so the PEC limit is r_s = -1, r_p = +1
//   - all lengths in meters, field amplitudes dimensionless (|E0| = 1)

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

namespace mcsbr {

using complexd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Real 3-vectors

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

// ---------------------------------------------------------------------------
// Complex 3-vectors (polarization / intensity, equivalent currents)

struct ComplexVec3 {
    complexd x{0.0, 0.0}, y{0.0, 0.0}, z{0.0, 0.0};

    ComplexVec3() = default;
    ComplexVec3(complexd x_, complexd y_, complexd z_) : x(x_), y(y_), z(z_) {}
    explicit ComplexVec3(const Vec3& v) : x(v.x), y(v.y), z(v.z) {}

    ComplexVec3 operator+(const ComplexVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    ComplexVec3 operator-(const ComplexVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    ComplexVec3 operator*(complexd s) const { return {x * s, y * s, z * s}; }
    ComplexVec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    ComplexVec3& operator+=(const ComplexVec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
};

inline ComplexVec3 operator*(complexd s, const ComplexVec3& v) { return v * s; }
inline ComplexVec3 operator*(double s, const ComplexVec3& v) { return v * s; }

/// Projection of a complex field onto a real direction (no conjugation).
inline complexd dot(const ComplexVec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline complexd dot(const Vec3& a, const ComplexVec3& b) { return dot(b, a); }

inline ComplexVec3 cross(const Vec3& a, const ComplexVec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline ComplexVec3 cross(const ComplexVec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Hermitian norm; zero iff all components vanish.
inline double norm(const ComplexVec3& v) {
    return std::sqrt(std::norm(v.x) + std::norm(v.y) + std::norm(v.z));
}

// ---------------------------------------------------------------------------
// Materials

/// Bulk material: lossless dielectric (real eps_r, mu_r) or perfect conductor.
struct Material {
    double eps_r = 1.0;
    double mu_r = 1.0;
    bool is_pec = false;

    double index() const { return is_pec ? 0.0 : std::sqrt(eps_r * mu_r); }
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Fresnel interface coefficients

struct InterfaceCoefficients {
    complexd r_s{0.0, 0.0};
    complexd r_p{0.0, 0.0};
    complexd t_s{0.0, 0.0};
    complexd t_p{0.0, 0.0};
    complexd cos_theta_t{0.0, 0.0};
    bool total_internal_reflection = false;

    /// PEC limit in this sign convention.
    static InterfaceCoefficients pec() {
        InterfaceCoefficients c;
        c.r_s = {-1.0, 0.0};
        c.r_p = {1.0, 0.0};
        c.cos_theta_t = {0.0, 0.0};
        return c;
    }
};

/// Fresnel coefficients for an n1 -> n2 interface at cos(theta_i) in (0, 1].
/// Under TIR cos_theta_t picks the -j branch (decaying evanescent wave for
/// the e^{+j omega t} time factor) and |r_s| = |r_p| = 1.
InterfaceCoefficients fresnel(double n1, double n2, double cos_theta_i);

/// Mirror reflection of a propagation direction. dir and normal unit,
/// non-grazing (|dir.normal| >= 1e-9).
Vec3 reflect_dir(const Vec3& dir, const Vec3& normal);

/// Snell refraction of a propagation direction; normal oriented against dir
/// (dot(dir, normal) < 0). Returns nullopt past the critical angle.
std::optional<Vec3> refract_dir(const Vec3& dir, const Vec3& normal, double n1, double n2);

/// s/p polarization basis at an interface. s_hat is normal to the plane of
/// incidence; each p_hat completes a right-handed (s, p, k) triad for its
/// propagation direction. Near-normal incidence (|dir x normal| < 1e-6) falls
/// back to projecting the global x axis (then y) onto the plane normal to dir.
struct SpBasis {
    Vec3 s_hat;
    Vec3 p_hat_in;
    Vec3 p_hat_out_r;   // reflected direction basis
    Vec3 p_hat_out_t;   // transmitted direction basis (meaningful when no TIR)
    Vec3 dir_r;
    Vec3 dir_t;         // equals dir when TIR (unused)
};

SpBasis sp_basis(const Vec3& dir_in, const Vec3& normal, double n1, double n2);

enum class Branch { kReflect, kTransmit };

/// Decompose a transverse field in the s/p basis, scale by the interface
/// coefficients, and recompose along the outgoing direction.
ComplexVec3 interface_transform(const ComplexVec3& e, Branch branch,
                                const InterfaceCoefficients& coeffs, const SpBasis& basis);

}  // namespace mcsbr
