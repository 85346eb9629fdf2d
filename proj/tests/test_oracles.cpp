#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "mcsbr/oracles.hpp"
#include "test_util.hpp"

using namespace mcsbr::oracles;
namespace {
constexpr double kC0 = 299792458.0;
}

TEST_CASE("slab_reflection single interface") {
    LayerStack s;
    s.ambient_back = 1.5;  // semi-infinite glass
    const auto r = slab_reflection(s, 2e9, false);
    CHECK(r.real() == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(std::abs(r.imag()) < 1e-15);
}

TEST_CASE("slab_reflection half-wave window") {
    const double f = 2e9;
    const double lambda = kC0 / f;
    LayerStack s;
    s.layers.push_back({1.5, lambda / (2.0 * 1.5)});
    CHECK(std::abs(slab_reflection(s, f, false)) < 1e-12);
}

TEST_CASE("slab_reflection fringe period for the 3 m glass slab") {
    LayerStack s;
    s.layers.push_back({1.5, 3.0});
    // c0 / (2 n d) spacing between nulls
    const double period = kC0 / (2.0 * 1.5 * 3.0);
    const double f0 = 45.0 * period;  // inside 1-3 GHz
    CHECK(std::abs(slab_reflection(s, f0, false)) < 1e-10);
    CHECK(std::abs(slab_reflection(s, f0 + period, false)) < 1e-10);
    CHECK(std::abs(slab_reflection(s, f0 + 0.5 * period, false)) ==
          doctest::Approx(0.4 / 1.04).epsilon(1e-10));
}

TEST_CASE("slab_reflection pec-backed magnitude is 1") {
    LayerStack s;
    s.layers.push_back({1.5, 3.0});
    for (const double f : {1.0e9, 1.7e9, 2.9e9}) {
        CHECK(std::abs(slab_reflection(s, f, true)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // zero-thickness limit: bare PEC
    LayerStack bare;
    CHECK(std::abs(slab_reflection(bare, 1e9, true) - complexd{-1.0, 0.0}) < 1e-14);
}

TEST_CASE("slab energy conservation") {
    LayerStack s;
    s.layers.push_back({1.5, 0.8});
    s.layers.push_back({2.0, 0.35});
    for (const double f : {1.1e9, 1.9e9, 2.7e9}) {
        const double r2 = std::norm(slab_reflection(s, f, false));
        const double t2 = slab_transmitted_power(s, f);
        CHECK(r2 + t2 == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("plate_rcs closed form and scaling laws") {
    CHECK(plate_rcs(1.0, 1.0, 0.1) == doctest::Approx(4.0 * M_PI * 100.0).epsilon(1e-14));
    // direct numerical PO check: broadside integral is just the area, so
    // sigma = 4 pi A^2 / lambda^2; quadrature over the plate reproduces it.
    const double a = 0.8, b = 1.3, lambda = 0.07;
    double integral = 0.0;
    const int n = 400;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) integral += (a / n) * (b / n);
    const double k0 = 2.0 * M_PI / lambda;
    const double sigma = k0 * k0 * integral * integral / M_PI;
    CHECK(plate_rcs(a, b, lambda) == doctest::Approx(sigma).epsilon(1e-10));
    // doubling the area quadruples sigma; doubling lambda divides by 4
    CHECK(plate_rcs(2.0, 1.0, 0.1) == doctest::Approx(4.0 * plate_rcs(1.0, 1.0, 0.1) / 1.0));
    CHECK(plate_rcs(1.0, 1.0, 0.2) == doctest::Approx(plate_rcs(1.0, 1.0, 0.1) / 4.0));
}

TEST_CASE("sphere_go_rcs") {
    CHECK(sphere_go_rcs(1.0) == doctest::Approx(M_PI));
    CHECK(sphere_go_rcs(0.5) == doctest::Approx(M_PI / 4.0));
    CHECK(sphere_go_rcs(2.0) > sphere_go_rcs(1.0));
}

TEST_CASE("enumerate_layered_paths single interface") {
    LayerStack s;
    s.ambient_back = 1.5;
    for (const int mb : {1, 5, 20}) {
        const auto terms = enumerate_layered_paths(s, false, mb);
        REQUIRE(terms.size() == 1);
        CHECK(terms[0].amplitude.real() == doctest::Approx(-0.2));
        CHECK(terms[0].optical_length == 0.0);
    }
}

TEST_CASE("enumerate_layered_paths slab low orders") {
    LayerStack s;
    s.layers.push_back({1.5, 3.0});
    const auto terms = enumerate_layered_paths(s, false, 3);
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].amplitude.real() == doctest::Approx(-0.2));
    // t * r' * t' with r' = +0.2, t = 0.8, t' = 1.2
    CHECK(terms[1].amplitude.real() == doctest::Approx(0.8 * 0.2 * 1.2).epsilon(1e-14));
    CHECK(terms[1].optical_length == doctest::Approx(2.0 * 1.5 * 3.0));
    CHECK(terms[1].bounce == 3);
}

TEST_CASE("enumerate_layered_paths converges to slab_reflection") {
    LayerStack s;
    s.layers.push_back({1.5, 3.0});
    const double f = 1.73e9;
    const double k0 = 2.0 * M_PI * f / kC0;
    const auto terms = enumerate_layered_paths(s, false, 20);
    complexd sum{0.0, 0.0};
    for (const auto& t : terms)
        sum += t.amplitude * std::polar(1.0, -k0 * t.optical_length);
    CHECK(std::abs(sum - slab_reflection(s, f, false)) < 1e-8);

    // Cauchy tail: successive exit orders shrink by |r r'| = 0.04
    const auto t5 = enumerate_layered_paths(s, false, 5);
    CHECK(std::abs(t5.back().amplitude) == doctest::Approx(0.04 * std::abs(t5[1].amplitude)));
}

TEST_CASE("enumerate_layered_paths pec-backed converges") {
    LayerStack s;
    s.layers.push_back({1.5, 3.0});
    const double f = 2.21e9;
    const double k0 = 2.0 * M_PI * f / kC0;
    const auto terms = enumerate_layered_paths(s, true, 60);
    complexd sum{0.0, 0.0};
    for (const auto& t : terms)
        sum += t.amplitude * std::polar(1.0, -k0 * t.optical_length);
    CHECK(std::abs(sum - slab_reflection(s, f, true)) < 1e-8);
}

TEST_CASE("two-layer enumeration converges") {
    LayerStack s;
    s.layers.push_back({1.5, 1.0});
    s.layers.push_back({2.0, 0.6});
    const double f = 1.44e9;
    const double k0 = 2.0 * M_PI * f / kC0;
    const auto terms = enumerate_layered_paths(s, false, 40);
    complexd sum{0.0, 0.0};
    for (const auto& t : terms)
        sum += t.amplitude * std::polar(1.0, -k0 * t.optical_length);
    CHECK(std::abs(sum - slab_reflection(s, f, false)) < 1e-6);
}

TEST_CASE("profile range oracles") {
    CHECK(plate_specular_range(2.0) == std::vector<double>{2.0});
    CHECK(dihedral_specular_ranges(0.0) == std::vector<double>{0.0});
    const auto cube = slab_profile_ranges(-1.5, 1.5, 3.0, 2);
    REQUIRE(cube.size() == 2);
    CHECK(cube[0] == doctest::Approx(-1.5));
    CHECK(cube[1] == doctest::Approx(3.0));  // n d = 4.5 past the front face
}
