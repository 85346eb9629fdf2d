#include "mcsbr/em_math.hpp"

namespace mcsbr {

InterfaceCoefficients fresnel(double n1, double n2, double cos_theta_i) {
    if (!(std::isfinite(n1) && std::isfinite(n2)) || n1 <= 0.0 || n2 <= 0.0)
        throw DomainError("fresnel: refractive indices must be finite and positive");
    if (!(cos_theta_i > 0.0 && cos_theta_i <= 1.0))
        throw DomainError("fresnel: cos_theta_i must lie in (0, 1]");

    InterfaceCoefficients c;
    const double sin2_i = std::max(0.0, 1.0 - cos_theta_i * cos_theta_i);
    const double s2 = (n1 / n2) * (n1 / n2) * sin2_i;

    complexd cos_t;
    if (s2 > 1.0) {
        c.total_internal_reflection = true;
        cos_t = complexd(0.0, -std::sqrt(s2 - 1.0));
    } else {
        cos_t = complexd(std::sqrt(1.0 - s2), 0.0);
    }
    c.cos_theta_t = cos_t;

    const complexd ci(cos_theta_i, 0.0);
    c.r_s = (n1 * ci - n2 * cos_t) / (n1 * ci + n2 * cos_t);
    c.t_s = 2.0 * n1 * ci / (n1 * ci + n2 * cos_t);
    c.r_p = (n2 * ci - n1 * cos_t) / (n2 * ci + n1 * cos_t);
    c.t_p = 2.0 * n1 * ci / (n2 * ci + n1 * cos_t);
    return c;
}

Vec3 reflect_dir(const Vec3& dir, const Vec3& normal) {
    const double dn = dot(dir, normal);
    if (std::abs(dn) < 1e-9)
        throw DegenerateGeometryError("reflect_dir: grazing incidence");
    return dir - 2.0 * dn * normal;
}

std::optional<Vec3> refract_dir(const Vec3& dir, const Vec3& normal, double n1, double n2) {
    const double dn = dot(dir, normal);
    if (std::abs(dn) < 1e-9)
        throw DegenerateGeometryError("refract_dir: grazing incidence");
    const double cos_i = -dn;  // normal oriented against dir
    const double eta = n1 / n2;
    const double sin2_t = eta * eta * std::max(0.0, 1.0 - cos_i * cos_i);
    if (sin2_t > 1.0) return std::nullopt;
    const double cos_t = std::sqrt(1.0 - sin2_t);
    return normalized(eta * dir + (eta * cos_i - cos_t) * normal);
}

SpBasis sp_basis(const Vec3& dir_in, const Vec3& normal, double n1, double n2) {
    SpBasis b;
    const Vec3 c = cross(dir_in, normal);
    const double cn = norm(c);
    if (cn < 1e-6) {
        // Degenerate plane of incidence: fixed global-axis fallback.
        Vec3 axis{1.0, 0.0, 0.0};
        Vec3 s = axis - dot(axis, dir_in) * dir_in;
        if (norm(s) < 1e-6) {
            axis = Vec3{0.0, 1.0, 0.0};
            s = axis - dot(axis, dir_in) * dir_in;
        }
        b.s_hat = normalized(s);
    } else {
        b.s_hat = c / cn;
    }

    b.dir_r = reflect_dir(dir_in, normal);
    b.p_hat_in = cross(dir_in, b.s_hat);
    b.p_hat_out_r = cross(b.dir_r, b.s_hat);

    const auto t = refract_dir(dir_in, normal, n1, n2);
    if (t) {
        b.dir_t = *t;
        b.p_hat_out_t = cross(b.dir_t, b.s_hat);
    } else {
        b.dir_t = dir_in;
        b.p_hat_out_t = b.p_hat_in;
    }
    return b;
}

ComplexVec3 interface_transform(const ComplexVec3& e, Branch branch,
                                const InterfaceCoefficients& coeffs, const SpBasis& basis) {
    const Vec3 dir_in = cross(basis.s_hat, basis.p_hat_in);  // (s, p, k) right-handed
    if (std::abs(dot(e, dir_in)) > 1e-9 * (1.0 + norm(e)))
        throw DomainError("interface_transform: field is not transverse to dir_in");
    const complexd es = dot(e, basis.s_hat);
    const complexd ep = dot(e, basis.p_hat_in);
    if (branch == Branch::kReflect)
        return es * coeffs.r_s * ComplexVec3(basis.s_hat) +
               ep * coeffs.r_p * ComplexVec3(basis.p_hat_out_r);
    return es * coeffs.t_s * ComplexVec3(basis.s_hat) +
           ep * coeffs.t_p * ComplexVec3(basis.p_hat_out_t);
}

}  // namespace mcsbr
