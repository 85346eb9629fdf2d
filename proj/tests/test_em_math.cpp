#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcsbr/em_math.hpp"
#include "test_util.hpp"

using namespace mcsbr;
using mcsbr::test::random_incidence;
using mcsbr::test::random_unit;

TEST_CASE("fresnel normal incidence air to glass") {
    const auto c = fresnel(1.0, 1.5, 1.0);
    CHECK(c.r_s.real() == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(c.r_p.real() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(c.r_s) == doctest::Approx(0.2));
    CHECK(std::abs(c.r_p) == doctest::Approx(0.2));
    CHECK(std::norm(c.r_s) == doctest::Approx(0.04));  // power reflectance
    CHECK(!c.total_internal_reflection);
}

TEST_CASE("fresnel identical media is transparent") {
    for (const double cos_i : {1.0, 0.7, 0.1}) {
        const auto c = fresnel(1.4, 1.4, cos_i);
        CHECK(std::abs(c.r_s) < 1e-15);
        CHECK(std::abs(c.r_p) < 1e-15);
        CHECK(std::abs(c.t_s - 1.0) < 1e-15);
        CHECK(std::abs(c.t_p - 1.0) < 1e-15);
    }
}

TEST_CASE("fresnel Brewster angle zeroes r_p") {
    const double cos_b = std::cos(std::atan(1.5));
    const auto c = fresnel(1.0, 1.5, cos_b);
    CHECK(std::abs(c.r_p) < 1e-12);
    CHECK(std::abs(c.r_s) > 0.1);
}

TEST_CASE("fresnel total internal reflection") {
    // critical angle asin(1/1.5) ~ 41.8 deg < 60 deg
    const auto c = fresnel(1.5, 1.0, std::cos(60.0 * kPi / 180.0));
    CHECK(c.total_internal_reflection);
    CHECK(std::abs(c.r_s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(c.r_p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.cos_theta_t.imag() < 0.0);  // decaying evanescent branch
}

TEST_CASE("fresnel domain errors") {
    CHECK_THROWS_AS(fresnel(-1.0, 1.5, 1.0), DomainError);
    CHECK_THROWS_AS(fresnel(1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(fresnel(1.0, 1.5, 0.0), DomainError);
    CHECK_THROWS_AS(fresnel(1.0, 1.5, 1.5), DomainError);
}

TEST_CASE("fresnel energy balance over random interfaces") {
    std::mt19937 rng(100);
    std::uniform_real_distribution<double> n_dist(1.0, 3.0);
    std::uniform_real_distribution<double> c_dist(0.01, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double n1 = n_dist(rng), n2 = n_dist(rng), ci = c_dist(rng);
        const auto c = fresnel(n1, n2, ci);
        if (c.total_internal_reflection) {
            CHECK(std::abs(c.r_s) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(c.r_p) == doctest::Approx(1.0).epsilon(1e-12));
            continue;
        }
        const double ratio = n2 * c.cos_theta_t.real() / (n1 * ci);
        CHECK(std::norm(c.r_s) + ratio * std::norm(c.t_s) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::norm(c.r_p) + ratio * std::norm(c.t_p) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(c.r_s) <= 1.0 + 1e-15);
        CHECK(std::abs(c.r_p) <= 1.0 + 1e-15);
    }
}

TEST_CASE("reflect_dir closed forms") {
    const Vec3 z{0, 0, 1};
    const Vec3 up = reflect_dir({0, 0, -1}, z);
    CHECK(norm(up - z) < 1e-15);

    const Vec3 d{1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0)};
    const Vec3 r = reflect_dir(d, z);
    CHECK(norm(r - Vec3{1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0)}) < 1e-15);

    CHECK_THROWS_AS(reflect_dir({1, 0, 0}, z), DegenerateGeometryError);
}

TEST_CASE("reflect_dir mirror-law properties") {
    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto [dir, normal] = random_incidence(rng);
        const Vec3 r = reflect_dir(dir, normal);
        CHECK(norm(r) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dot(dir, normal) == doctest::Approx(-dot(r, normal)).epsilon(1e-12));
        // coplanarity: r lies in span(dir, normal)
        const Vec3 c = cross(dir, normal);
        CHECK(std::abs(dot(r, c)) < 1e-12);
        // involution
        CHECK(norm(reflect_dir(r, normal) - dir) < 1e-12);
    }
}

TEST_CASE("refract_dir closed forms and Snell round trip") {
    const Vec3 z{0, 0, 1};
    // identical media and normal incidence leave the direction unchanged
    CHECK(norm(*refract_dir({0, 0, -1}, z, 1.0, 1.0) - Vec3{0, 0, -1}) < 1e-15);
    const Vec3 oblique = normalized(Vec3{1.0, 0.0, -1.0});
    CHECK(norm(*refract_dir(oblique, z, 1.3, 1.3) - oblique) < 1e-12);
    CHECK(norm(*refract_dir({0, 0, -1}, z, 1.0, 1.5) - Vec3{0, 0, -1}) < 1e-15);

    // 45 degrees air -> glass
    const auto t = refract_dir(oblique, z, 1.0, 1.5);
    REQUIRE(t.has_value());
    const double sin_t = std::sqrt(t->x * t->x + t->y * t->y);
    CHECK(sin_t == doctest::Approx(std::sin(kPi / 4.0) / 1.5).epsilon(1e-12));

    // TIR signal
    CHECK(!refract_dir(normalized(Vec3{1.0, 0.0, -0.5}), z, 1.5, 1.0).has_value());

    std::mt19937 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto [dir, normal] = random_incidence(rng);
        const double n1 = 1.0 + 0.002 * (i % 500);
        const double n2 = 1.0 + 0.003 * (i % 333);
        const auto fwd = refract_dir(dir, normal, n1, n2);
        if (!fwd) continue;
        const auto back = refract_dir(*fwd, -normal, n2, n1);
        REQUIRE(back.has_value());
        CHECK(norm(*back - dir) < 1e-10);
        // transverse wave-vector continuity
        const Vec3 tang = normalized(cross(cross(normal, dir), normal));
        CHECK(n1 * dot(dir, tang) == doctest::Approx(n2 * dot(*fwd, tang)).epsilon(1e-10));
    }
}

TEST_CASE("sp_basis degenerate and oblique conventions") {
    // normal incidence falls back to the global x axis
    const SpBasis b0 = sp_basis({0, 0, -1}, {0, 0, 1}, 1.0, 1.5);
    CHECK(norm(b0.s_hat - Vec3{1, 0, 0}) < 1e-12);

    // 45 degrees in the x-z plane: s_hat is +-y
    const SpBasis b1 = sp_basis(normalized(Vec3{1, 0, -1}), {0, 0, 1}, 1.0, 1.5);
    CHECK(std::abs(std::abs(b1.s_hat.y) - 1.0) < 1e-12);

    std::mt19937 rng(23);
    for (int i = 0; i < 1000; ++i) {
        const auto [dir, normal] = random_incidence(rng);
        const SpBasis b = sp_basis(dir, normal, 1.0, 1.5);
        CHECK(norm(b.s_hat) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(norm(b.p_hat_in) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(norm(b.p_hat_out_r) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(dot(b.s_hat, dir)) < 1e-12);
        CHECK(std::abs(dot(b.s_hat, b.p_hat_in)) < 1e-12);
        CHECK(std::abs(dot(b.p_hat_in, dir)) < 1e-12);
        CHECK(std::abs(dot(b.p_hat_out_r, b.dir_r)) < 1e-12);
        CHECK(std::abs(dot(b.p_hat_out_t, b.dir_t)) < 1e-12);
    }
}

TEST_CASE("interface_transform closed forms") {
    const Vec3 down{0, 0, -1};
    const Vec3 z{0, 0, 1};

    // PEC normal incidence negates the tangential field
    {
        const SpBasis b = sp_basis(down, z, 1.0, 1.0);
        const ComplexVec3 e{1.0, 0.0, 0.0};
        const ComplexVec3 r = interface_transform(e, Branch::kReflect,
                                                  InterfaceCoefficients::pec(), b);
        CHECK(std::abs(r.x - complexd{-1.0, 0.0}) < 1e-12);
        CHECK(std::abs(r.y) < 1e-15);
        CHECK(std::abs(r.z) < 1e-15);
    }
    // index-matched transmission is the identity
    {
        const auto c = fresnel(1.2, 1.2, 0.6);
        const SpBasis b = sp_basis(normalized(Vec3{0.8, 0.0, -0.6}), z, 1.2, 1.2);
        const ComplexVec3 e{complexd{0.0, 0.3}, complexd{1.0, 0.0}, complexd{0.0, 0.4}};
        // make e transverse to dir
        const Vec3 dir = normalized(Vec3{0.8, 0.0, -0.6});
        ComplexVec3 et = e;
        const complexd along = dot(e, dir);
        et = et + (-along) * ComplexVec3(dir);
        const ComplexVec3 t = interface_transform(et, Branch::kTransmit, c, b);
        CHECK(norm(t - et) < 1e-12);
    }
    // air -> glass normal incidence reflection has magnitude 0.2 |E|
    {
        const auto c = fresnel(1.0, 1.5, 1.0);
        const SpBasis b = sp_basis(down, z, 1.0, 1.5);
        const ComplexVec3 e{1.0, 0.0, 0.0};
        const ComplexVec3 r = interface_transform(e, Branch::kReflect, c, b);
        CHECK(norm(r) == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("interface_transform is linear and rejects non-transverse fields") {
    std::mt19937 rng(31);
    const auto [dir, normal] = random_incidence(rng);
    const auto c = fresnel(1.0, 1.5, -dot(dir, normal));
    const SpBasis b = sp_basis(dir, normal, 1.0, 1.5);

    const ComplexVec3 e1 = complexd{0.3, 0.1} * ComplexVec3(b.s_hat);
    const ComplexVec3 e2 = complexd{-0.2, 0.7} * ComplexVec3(b.p_hat_in);
    const complexd a{1.7, -0.4};
    const ComplexVec3 lhs = interface_transform(e1 + a * e2, Branch::kReflect, c, b);
    const ComplexVec3 rhs = interface_transform(e1, Branch::kReflect, c, b) +
                            a * interface_transform(e2, Branch::kReflect, c, b);
    CHECK(norm(lhs - rhs) < 1e-12);

    CHECK_THROWS_AS(interface_transform(ComplexVec3(dir), Branch::kReflect, c, b), DomainError);
}

TEST_CASE("lossless interface conserves power flux") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> n_dist(1.0, 2.5);
    std::uniform_real_distribution<double> c_dist(0.05, 1.0);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto [dir, normal] = random_incidence(rng, 0.05);
        const double n1 = n_dist(rng), n2 = n_dist(rng);
        const double cos_i = -dot(dir, normal);
        const auto c = fresnel(n1, n2, cos_i);
        const SpBasis b = sp_basis(dir, normal, n1, n2);
        const ComplexVec3 e = complexd{amp(rng), amp(rng)} * ComplexVec3(b.s_hat) +
                              complexd{amp(rng), amp(rng)} * ComplexVec3(b.p_hat_in);
        const ComplexVec3 er = interface_transform(e, Branch::kReflect, c, b);
        const double inc = n1 * norm(e) * norm(e) * cos_i;
        const double ref = n1 * norm(er) * norm(er) * cos_i;
        if (c.total_internal_reflection) {
            CHECK(ref == doctest::Approx(inc).epsilon(1e-10));
            continue;
        }
        const ComplexVec3 et = interface_transform(e, Branch::kTransmit, c, b);
        const double trn = n2 * norm(et) * norm(et) * c.cos_theta_t.real();
        CHECK(ref + trn == doctest::Approx(inc).epsilon(1e-10));
    }
}
