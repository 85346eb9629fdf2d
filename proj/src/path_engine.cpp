#include "mcsbr/path_engine.hpp"

namespace mcsbr {

PathState init_path(const Vec3& rect_sample, const Vec3& k_inc, const ComplexVec3& e0_v,
                    const ComplexVec3& e0_h, double ambient_n) {
    PathState s;
    s.origin = rect_sample;
    s.dir = k_inc;
    s.e[0] = e0_v;
    s.e[1] = e0_h;
    s.phi = ambient_n * dot(k_inc, rect_sample);
    s.medium_n = ambient_n;
    return s;
}

void advance(PathState& state, const Hit& hit) {
    state.phi += state.medium_n * hit.t;
    state.origin = hit.point;
    state.bounce += 1;
}

BranchSet branch_outcomes(const PathState& state, const Hit& hit) {
    BranchSet set;
    const double cos_i = -dot(state.dir, hit.normal);
    if (cos_i < 1e-6) {
        set.grazing = true;
        return set;
    }

    const bool pec = hit.far_side_pec;
    const double n1 = state.medium_n;
    const double n2 = pec ? n1 : hit.n_transmit;

    set.coeffs = pec ? InterfaceCoefficients::pec() : fresnel(n1, n2, cos_i);
    set.basis = sp_basis(state.dir, hit.normal, n1, n2);

    BranchOutcome& r = set.outcomes[set.count++];
    r.kind = Branch::kReflect;
    r.new_dir = set.basis.dir_r;
    r.new_e[0] = interface_transform(state.e[0], Branch::kReflect, set.coeffs, set.basis);
    r.new_e[1] = interface_transform(state.e[1], Branch::kReflect, set.coeffs, set.basis);
    r.new_n = n1;

    if (!pec && !set.coeffs.total_internal_reflection) {
        BranchOutcome& t = set.outcomes[set.count++];
        t.kind = Branch::kTransmit;
        t.new_dir = set.basis.dir_t;
        t.new_e[0] = interface_transform(state.e[0], Branch::kTransmit, set.coeffs, set.basis);
        t.new_e[1] = interface_transform(state.e[1], Branch::kTransmit, set.coeffs, set.basis);
        t.new_n = n2;
    }
    return set;
}

}  // namespace mcsbr
