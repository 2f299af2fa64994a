#include "ivsim/mathcore.hpp"
#include "ivsim/rng.hpp"

#include <doctest.h>

using namespace ivsim;

TEST_CASE("skew of zero vector is the zero matrix") {
    CHECK(skew(Vec3::Zero()).norm() == 0.0);
}

TEST_CASE("skew reproduces basis cross products") {
    const Vec3 r = skew(Vec3(1, 0, 0)) * Vec3(0, 1, 0);
    CHECK((r - Vec3(0, 0, 1)).norm() == doctest::Approx(0.0));
}

TEST_CASE("skew matches the direct cross product on random vectors") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Vec3 v(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        const Vec3 w(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        CHECK((skew(v) * w - v.cross(w)).norm() <= 1e-12);
        CHECK((skew(v).transpose() + skew(v)).norm() == 0.0);
    }
}

TEST_CASE("vex inverts skew") {
    CHECK((vex(skew(Vec3(1, 2, 3))) - Vec3(1, 2, 3)).norm() == 0.0);
    CHECK(vex(Mat3::Zero()).norm() == 0.0);
    CHECK((vex(skew(Vec3(-0.5, 0.25, 7))) - Vec3(-0.5, 0.25, 7)).norm() == 0.0);
}

TEST_CASE("vex rejects non-skew input") {
    Mat3 m = Mat3::Identity();
    CHECK_THROWS_AS(vex(m), std::invalid_argument);
}

TEST_CASE("vex(skew(v)) == v for random vectors") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Vec3 v(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
        CHECK((vex(skew(v)) - v).norm() <= 1e-12);
    }
}

TEST_CASE("rodrigues at zero angle is the identity") {
    CHECK((rodrigues(Vec3(0.3, 0.4, 0.5), 0.0) - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("quarter turn about y maps z to x") {
    const Vec3 r = rodrigues(Vec3(0, 1, 0), kPi / 2) * Vec3(0, 0, 1);
    CHECK((r - Vec3(1, 0, 0)).norm() <= 1e-12);
}

TEST_CASE("rodrigues rejects a non-unit axis") {
    CHECK_THROWS_AS(rodrigues(Vec3(1, 1, 0), 0.5), std::invalid_argument);
}

TEST_CASE("rodrigues output stays in SO(3) for 1000 random inputs") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
        if (axis.norm() < 1e-6) continue;
        axis.normalize();
        const double angle = rng.uniform(-kPi, kPi);
        const Mat3 r = rodrigues(axis, angle);
        CHECK((r.transpose() * r - Mat3::Identity()).norm() <= 1e-9);
        CHECK(std::abs(r.determinant() - 1.0) <= 1e-9);
        CHECK((r * rodrigues(axis, -angle) - Mat3::Identity()).norm() <= 1e-9);
    }
}

TEST_CASE("sat_vec scales an over-limit vector onto the limit sphere") {
    const Vec3 r = sat_vec(Vec3(0, 0, 4), 2.0);
    CHECK((r - Vec3(0, 0, 2)).norm() <= 1e-12);
}

TEST_CASE("sat_vec passes vectors inside the limit through") {
    CHECK((sat_vec(Vec3(1, 0, 0), 2.0) - Vec3(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("sat_vec norm arithmetic") {
    const Vec3 r = sat_vec(Vec3(3, 4, 0), 2.5);
    CHECK((r - Vec3(1.5, 2.0, 0.0)).norm() <= 1e-12);
}

TEST_CASE("sat_vec rejects non-positive limits and never grows the norm") {
    CHECK_THROWS_AS(sat_vec(Vec3(1, 0, 0), 0.0), std::invalid_argument);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const Vec3 w(rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-9, 9));
        const double m = rng.uniform(0.01, 5.0);
        CHECK(sat_vec(w, m).norm() <= m + 1e-12);
        CHECK(sat_vec(w, m).norm() <= w.norm() + 1e-12);
    }
}

TEST_CASE("clamp_scalar") {
    CHECK(clamp_scalar(5, 0, 3) == 3);
    CHECK(clamp_scalar(-1, 0, 3) == 0);
    CHECK(clamp_scalar(2, 0, 3) == 2);
    CHECK_THROWS_AS(clamp_scalar(1, 2, 0), std::invalid_argument);
}

TEST_CASE("gravity points down in ENU with the documented magnitude") {
    CHECK(std::abs(gravity_enu().norm() - 9.8) <= 1e-12);
    CHECK(gravity_enu().z() < 0.0);
}

TEST_CASE("orthonormalize pulls a perturbed rotation back onto SO(3)") {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
        axis.normalize();
        Mat3 r = rodrigues(axis, rng.uniform(-3, 3));
        for (int k = 0; k < 9; ++k) {
            r(k / 3, k % 3) += rng.uniform(-1e-6, 1e-6);
        }
        CHECK(is_rotation(orthonormalize(r), 1e-9));
    }
}
