#include "mcsbr/farfield.hpp"

#include <cmath>

namespace mcsbr {

namespace {
const complexd kJ{0.0, 1.0};
}

SurfaceCurrents meca_currents(const Hit& hit, const ComplexVec3& e_incident, const Vec3& dir_in,
                              ScatterCase scatter_case, const InterfaceCoefficients& coeffs,
                              const SpBasis& basis, double medium_n) {
    SurfaceCurrents out;
    switch (scatter_case) {
        case ScatterCase::kPec: {
            // J = 2 n x H^i, M = 0; eta0 H = n_medium (k x E).
            const ComplexVec3 h_i = medium_n * cross(dir_in, e_incident);
            out.j = 2.0 * cross(hit.normal, h_i);
            break;
        }
        case ScatterCase::kEntering: {
            const ComplexVec3 e_r = interface_transform(e_incident, Branch::kReflect, coeffs, basis);
            const ComplexVec3 h_sum =
                medium_n * (cross(dir_in, e_incident) + cross(basis.dir_r, e_r));
            out.j = cross(hit.normal, h_sum);
            out.m = cross(e_incident + e_r, hit.normal);
            break;
        }
        case ScatterCase::kExiting: {
            if (coeffs.total_internal_reflection) break;  // no propagating transmitted wave
            const ComplexVec3 e_t =
                interface_transform(e_incident, Branch::kTransmit, coeffs, basis);
            // The radiating side is the far (ambient) side: outward normal is
            // the flip of the hit normal, and the wave impedance is the far
            // medium's.
            const Vec3 n_out = -hit.normal;
            const ComplexVec3 h_t = hit.n_transmit * cross(basis.dir_t, e_t);
            out.j = cross(n_out, h_t);
            out.m = cross(e_t, n_out);
            break;
        }
    }
    return out;
}

SurfaceCurrents meca_currents(const Hit& hit, const ComplexVec3& e_incident, const Vec3& dir_in,
                              ScatterCase scatter_case) {
    const double cos_i = -dot(dir_in, hit.normal);
    InterfaceCoefficients coeffs;
    SpBasis basis;
    const double n1 = hit.n_incident;
    if (scatter_case == ScatterCase::kPec) {
        coeffs = InterfaceCoefficients::pec();
        basis = sp_basis(dir_in, hit.normal, n1, n1);
    } else {
        coeffs = fresnel(n1, hit.n_transmit, cos_i);
        basis = sp_basis(dir_in, hit.normal, n1, hit.n_transmit);
    }
    return meca_currents(hit, e_incident, dir_in, scatter_case, coeffs, basis, n1);
}

bool chi_visibility(const Scene& scene, const Vec3& exit_point, bool exterior_facing,
                    const Vec3& k_scatter, bool occlusion_enabled) {
    if (!exterior_facing) return false;
    if (!occlusion_enabled) return true;
    return !scene.occluded(exit_point, k_scatter);
}

Contribution make_contribution(const PathState& state, const Hit& hit,
                               const SurfaceCurrents currents[2], double area_weight,
                               uint64_t order_key) {
    const double cos_n = std::abs(dot(state.dir, hit.normal));
    const double scale = state.weight * area_weight / (state.prob * cos_n);
    Contribution c;
    for (int pol = 0; pol < 2; ++pol) {
        c.a_j[pol] = scale * currents[pol].j;
        c.a_m[pol] = scale * currents[pol].m;
    }
    c.phi_total = state.phi;
    c.exit_point = hit.point;
    c.bounce = state.bounce;
    c.order_key = order_key;
    return c;
}

SweepAccumulator::SweepAccumulator(const SweepGrid& grid) : grid_(&grid) {
    const size_t n = grid.frequencies.size();
    for (auto& s : sums_) s.assign(n, complexd{0.0, 0.0});
    uniform_ = n >= 2;
    if (n >= 2) {
        f0_ = grid.frequencies[0];
        df_ = grid.frequencies[1] - grid.frequencies[0];
        for (size_t i = 1; i < n; ++i) {
            const double step = grid.frequencies[i] - grid.frequencies[i - 1];
            if (std::abs(step - df_) > 1e-6 * std::abs(df_)) {
                uniform_ = false;
                break;
            }
        }
    } else if (n == 1) {
        f0_ = grid.frequencies[0];
    }
}

void SweepAccumulator::add(const Contribution& c) {
    ++count_;
    const Vec3& ks = grid_->k_scatter;

    // Tangential radiation vector per transmit polarization, then receiver
    // projections. All frequency independent.
    complexd amp[kPolChannelCount];
    for (int tx = 0; tx < 2; ++tx) {
        const ComplexVec3 f = cross(ks, cross(ks, c.a_j[tx])) + cross(ks, c.a_m[tx]);
        const complexd av = dot(f, grid_->rx_v);
        const complexd ah = dot(f, grid_->rx_h);
        if (tx == 0) {
            amp[kVV] = av;
            amp[kHV] = ah;
        } else {
            amp[kVH] = av;
            amp[kHH] = ah;
        }
    }

    // e^{-j k0 s} with s the net optical path: accumulated phase minus the
    // exit-direction advance.
    const double s = c.phi_total - dot(ks, c.exit_point);
    const size_t n = grid_->frequencies.size();
    if (uniform_) {
        const double phase0 = -2.0 * kPi * f0_ / kSpeedOfLight * s;
        const double dphase = -2.0 * kPi * df_ / kSpeedOfLight * s;
        complexd z = std::polar(1.0, phase0);
        const complexd w = std::polar(1.0, dphase);
        for (size_t i = 0; i < n; ++i) {
            for (int ch = 0; ch < kPolChannelCount; ++ch) sums_[ch][i] += amp[ch] * z;
            z *= w;
        }
    } else {
        for (size_t i = 0; i < n; ++i) {
            const double k0 = 2.0 * kPi * grid_->frequencies[i] / kSpeedOfLight;
            const complexd z = std::polar(1.0, -k0 * s);
            for (int ch = 0; ch < kPolChannelCount; ++ch) sums_[ch][i] += amp[ch] * z;
        }
    }
}

void SweepAccumulator::merge(const SweepAccumulator& other) {
    for (int ch = 0; ch < kPolChannelCount; ++ch)
        for (size_t i = 0; i < sums_[ch].size(); ++i) sums_[ch][i] += other.sums_[ch][i];
    count_ += other.count_;
}

SweepResult SweepAccumulator::finalize() const {
    SweepResult r;
    r.frequencies = grid_->frequencies;
    r.contributions = count_;
    const size_t n = grid_->frequencies.size();
    for (int ch = 0; ch < kPolChannelCount; ++ch) {
        r.values[ch].resize(n);
        for (size_t i = 0; i < n; ++i) {
            const double k0 = 2.0 * kPi * grid_->frequencies[i] / kSpeedOfLight;
            r.values[ch][i] = kJ * k0 / (2.0 * std::sqrt(kPi)) * sums_[ch][i];
        }
    }
    return r;
}

SweepResult evaluate_sweep(const std::vector<Contribution>& contributions,
                           const SweepGrid& grid) {
    SweepAccumulator acc(grid);
    for (const Contribution& c : contributions) acc.add(c);
    return acc.finalize();
}

}  // namespace mcsbr
