#pragma once
// Independent analytic and brute-force references used by the acceptance
// tests. Deliberately self-contained: the normal-incidence Fresnel scalars
// here are re-derived locally rather than shared with the solver kernel.

#include <complex>
#include <vector>

namespace mcsbr::oracles {

using complexd = std::complex<double>;

/// Planar layer stack at normal incidence. Ambient media on both sides.
struct LayerStack {
    struct Layer {
        double index;      // refractive index, > 0
        double thickness;  // meters, > 0
    };
    double ambient_front = 1.0;
    double ambient_back = 1.0;
    std::vector<Layer> layers;
};

/// Complex reflection coefficient of the stack by the chain-matrix method,
/// referenced to the front interface. pec_backed terminates the stack with a
/// perfect reflector (E = 0 boundary).
complexd slab_reflection(const LayerStack& stack, double frequency_hz, bool pec_backed);

/// Through-transmission power fraction (lossless energy check companion).
double slab_transmitted_power(const LayerStack& stack, double frequency_hz);

/// Broadside physical-optics RCS of an a x b plate: 4 pi (ab)^2 / lambda^2.
double plate_rcs(double a, double b, double lambda);

/// Geometric-optics RCS of a sphere: pi r^2 (valid for ka >> 1).
double sphere_go_rcs(double radius);

/// One enumerated reflect/transmit path through a 1D stack.
struct LayeredPathTerm {
    complexd amplitude;     // product of interface coefficients
    double optical_length;  // meters, two-way path inside the stack
    int bounce;             // interface interactions incl. entry and exit arrival
    std::vector<char> sequence;  // 'R' / 'T' decisions after the entry interface
};

/// Exhaustive enumeration of normal-incidence paths that return to the front
/// ambient medium within max_bounce interface interactions. Partial sums of
/// amplitude * e^{-j k0 optical_length} converge to slab_reflection.
std::vector<LayeredPathTerm> enumerate_layered_paths(const LayerStack& stack, bool pec_backed,
                                                     int max_bounce);

/// Expected monostatic range-profile peak locations for canonical scenes.
/// Ranges follow the two-way c0/2 convention: a scatterer at depth u along
/// the incident direction peaks at range u.
std::vector<double> plate_specular_range(double standoff);
std::vector<double> dihedral_specular_ranges(double seam_range);
std::vector<double> slab_profile_ranges(double front_range, double index, double thickness,
                                        int echo_count);

}  // namespace mcsbr::oracles
