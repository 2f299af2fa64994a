// Frame conventions, rotation algebra and saturation primitives shared by
// every module. All angles are radians; degrees appear only at CLI/report
// boundaries.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ivsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;

// Earth frame is ENU (x East, y North, z Up). The frame choice is isolated
// here so it can be flipped in one place.
inline constexpr double kGravity = 9.8;  // m/s^2

inline Vec3 gravity_enu() { return {0.0, 0.0, -kGravity}; }

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

// Tolerances for algebraic identities and SO(3) membership checks.
inline constexpr double kSkewTol = 1e-9;
inline constexpr double kRotTol = 1e-9;

/// Cross-product matrix: skew(v) * w == v.cross(w).
inline Mat3 skew(const Vec3& v) {
    Mat3 m;
    m <<    0.0, -v.z(),  v.y(),
          v.z(),    0.0, -v.x(),
         -v.y(),  v.x(),    0.0;
    return m;
}

/// Inverse of skew. Rejects matrices whose symmetric part exceeds tolerance,
/// which would indicate a controller math bug upstream.
inline Vec3 vex(const Mat3& m) {
    if ((m + m.transpose()).norm() > kSkewTol) {
        throw std::invalid_argument("vex: input is not skew-symmetric");
    }
    return {m(2, 1), m(0, 2), m(1, 0)};
}

/// Rotation about a unit axis by angle: I + [r]x sin(phi) + [r]x^2 (1-cos(phi)).
inline Mat3 rodrigues(const Vec3& axis, double angle) {
    if (angle == 0.0) {
        return Mat3::Identity();
    }
    if (std::abs(axis.norm() - 1.0) > kSkewTol) {
        throw std::invalid_argument("rodrigues: axis must be unit length");
    }
    const Mat3 k = skew(axis);
    return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

/// Exponential map of a rotation vector (axis * angle).
inline Mat3 so3_exp(const Vec3& rotvec) {
    const double angle = rotvec.norm();
    if (angle < 1e-12) {
        // second-order series keeps small steps orthonormal to machine precision
        const Mat3 k = skew(rotvec);
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    return rodrigues(rotvec / angle, angle);
}

/// Norm-limiting saturation: direction preserved, norm clipped to w_max.
inline Vec3 sat_vec(const Vec3& w, double w_max) {
    if (w_max <= 0.0) {
        throw std::invalid_argument("sat_vec: limit must be positive");
    }
    const double n = w.norm();
    if (n <= w_max) {
        return w;
    }
    return (w_max / n) * w;
}

inline double clamp_scalar(double x, double lo, double hi) {
    if (lo > hi) {
        throw std::invalid_argument("clamp_scalar: lo > hi");
    }
    return std::clamp(x, lo, hi);
}

inline bool is_rotation(const Mat3& r, double tol = kRotTol) {
    return (r.transpose() * r - Mat3::Identity()).norm() <= tol &&
           std::abs(r.determinant() - 1.0) <= tol;
}

/// Pulls a nearly-orthonormal matrix back onto SO(3). One Newton step of the
/// polar decomposition is enough at integrator drift levels.
inline Mat3 orthonormalize(const Mat3& r) {
    Mat3 q = r;
    for (int i = 0; i < 3; ++i) {
        q = 0.5 * (q + q.transpose().inverse());
    }
    return q;
}

}  // namespace ivsim
