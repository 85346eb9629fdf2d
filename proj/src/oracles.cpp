#include "mcsbr/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace mcsbr::oracles {

namespace {

constexpr double kC0 = 299792458.0;
constexpr double kPi = 3.14159265358979323846;
const complexd kJ{0.0, 1.0};

// Normal-incidence Fresnel scalars, re-derived from the impedance-matching
// boundary conditions (independent of the solver kernel).
complexd r_interface(double n_from, double n_to) {
    return complexd((n_from - n_to) / (n_from + n_to), 0.0);
}
complexd t_interface(double n_from, double n_to) {
    return complexd(2.0 * n_from / (n_from + n_to), 0.0);
}

// Characteristic matrix of one layer for the (E, eta0*H) column vector with
// phase convention e^{-j k0 n z}.
struct Mat2 {
    complexd a, b, c, d;
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

Mat2 layer_matrix(double n, double thickness, double k0) {
    const double delta = k0 * n * thickness;
    const complexd cs{std::cos(delta), 0.0};
    const complexd sn{std::sin(delta), 0.0};
    return {cs, -kJ * sn / n, -kJ * n * sn, cs};
}

Mat2 stack_matrix(const LayerStack& stack, double k0) {
    Mat2 m{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    for (const auto& layer : stack.layers) {
        if (!(layer.index > 0.0) || !(layer.thickness > 0.0))
            throw std::invalid_argument("slab_reflection: indices and thicknesses must be > 0");
        m = layer_matrix(layer.index, layer.thickness, k0) * m;
    }
    return m;
}

}  // namespace

complexd slab_reflection(const LayerStack& stack, double frequency_hz, bool pec_backed) {
    const double k0 = 2.0 * kPi * frequency_hz / kC0;
    const Mat2 m = stack_matrix(stack, k0);
    const double n0 = stack.ambient_front;

    if (pec_backed) {
        // E vanishes at the back face: m11 (1 + r) + m12 n0 (1 - r) = 0.
        return -(m.a + m.b * n0) / (m.a - m.b * n0);
    }
    const double nt = stack.ambient_back;
    const complexd num = m.c + n0 * m.d - nt * m.a - nt * n0 * m.b;
    const complexd den = nt * m.a - nt * n0 * m.b - m.c + n0 * m.d;
    return num / den;
}

double slab_transmitted_power(const LayerStack& stack, double frequency_hz) {
    const double k0 = 2.0 * kPi * frequency_hz / kC0;
    const Mat2 m = stack_matrix(stack, k0);
    const double n0 = stack.ambient_front;
    const double nt = stack.ambient_back;
    const complexd r = slab_reflection(stack, frequency_hz, false);
    const complexd t = m.a * (1.0 + r) + m.b * n0 * (1.0 - r);
    return std::norm(t) * nt / n0;
}

double plate_rcs(double a, double b, double lambda) {
    if (!(a > 0.0 && b > 0.0 && lambda > 0.0))
        throw std::invalid_argument("plate_rcs: dimensions must be positive");
    return 4.0 * kPi * (a * b) * (a * b) / (lambda * lambda);
}

double sphere_go_rcs(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("sphere_go_rcs: radius must be positive");
    return kPi * radius * radius;
}

namespace {

struct Walker {
    const LayerStack& stack;
    bool pec_backed;
    int max_bounce;
    std::vector<LayeredPathTerm>& out;
    std::vector<char> decisions;

    // Interfaces are numbered 0..L where 0 is the front face. index_of(i)
    // gives the medium between interfaces i-1 and i.
    double medium(int i) const {
        if (i < 0) return stack.ambient_front;
        if (i >= static_cast<int>(stack.layers.size())) return stack.ambient_back;
        return stack.layers[static_cast<size_t>(i)].index;
    }

    int interface_count() const { return static_cast<int>(stack.layers.size()) + 1; }

    // Arrive at an interface. `iface` in [0, L]; `downward` is the travel
    // direction (true = deeper into the stack); amp/length accumulated so far.
    void arrive(int iface, bool downward, complexd amp, double length, int bounce) {
        if (bounce > max_bounce) return;
        const int last = interface_count() - 1;
        const bool back_is_pec = pec_backed && iface == last;

        if (iface == 0 && !downward) {
            // Exit arrival at the front face: emit the transmitted amplitude.
            LayeredPathTerm term;
            term.amplitude = amp * t_interface(medium(0), medium(-1));
            term.optical_length = length;
            term.bounce = bounce;
            term.sequence = decisions;
            out.push_back(term);
        }
        if (bounce == max_bounce) return;

        const double n_near = downward ? medium(iface - 1) : medium(iface);
        const double n_far = downward ? medium(iface) : medium(iface - 1);

        // Reflected branch stays on the near side.
        {
            const complexd r = back_is_pec ? complexd{-1.0, 0.0} : r_interface(n_near, n_far);
            decisions.push_back('R');
            travel(iface, !downward, amp * r, length, bounce);
            decisions.pop_back();
        }
        // Transmitted branch crosses, unless the far side is PEC or ambient
        // (a transmitted ray into ambient leaves and never returns).
        if (!back_is_pec) {
            const bool leaves = (downward && iface == last) || (!downward && iface == 0);
            if (!leaves) {
                decisions.push_back('T');
                travel(iface, downward, amp * t_interface(n_near, n_far), length, bounce);
                decisions.pop_back();
            }
        }
    }

    // Travel from `iface` in the given direction to the next interface.
    void travel(int iface, bool downward, complexd amp, double length, int bounce) {
        const int next = downward ? iface + 1 : iface - 1;
        if (next < 0 || next >= interface_count()) return;  // escaped into ambient
        const int layer = downward ? iface : next;
        const auto& l = stack.layers[static_cast<size_t>(layer)];
        arrive(next, downward, amp, length + l.index * l.thickness, bounce + 1);
    }
};

}  // namespace

std::vector<LayeredPathTerm> enumerate_layered_paths(const LayerStack& stack, bool pec_backed,
                                                     int max_bounce) {
    std::vector<LayeredPathTerm> out;
    Walker w{stack, pec_backed, max_bounce, out, {}};

    // First arrival at the front face: emit the entering-event amplitude
    // (the reflection coefficient), then branch into the stack.
    LayeredPathTerm enter;
    enter.amplitude = r_interface(stack.ambient_front, w.medium(0));
    if (pec_backed && stack.layers.empty()) enter.amplitude = complexd{-1.0, 0.0};
    enter.optical_length = 0.0;
    enter.bounce = 1;
    out.push_back(enter);

    if (!(pec_backed && stack.layers.empty()) && !stack.layers.empty()) {
        const double n0 = stack.ambient_front;
        const double n1 = w.medium(0);
        w.decisions.push_back('T');
        w.travel(0, true, t_interface(n0, n1), 0.0, 1);
        w.decisions.pop_back();
    }
    return out;
}

std::vector<double> plate_specular_range(double standoff) { return {standoff}; }

std::vector<double> dihedral_specular_ranges(double seam_range) { return {seam_range}; }

std::vector<double> slab_profile_ranges(double front_range, double index, double thickness,
                                        int echo_count) {
    std::vector<double> ranges;
    for (int k = 0; k < echo_count; ++k)
        ranges.push_back(front_range + k * index * thickness);
    return ranges;
}

}  // namespace mcsbr::oracles
