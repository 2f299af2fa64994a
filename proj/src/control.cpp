#include "ivsim/control.hpp"

#include <cmath>
#include <stdexcept>

namespace ivsim {

double yaw_rate_pd(double e_x, double ed_x, const FovParams& params) {
    return params.k_p * e_x + params.k_d * ed_x;
}

LambdaCheck lambda_check(double e_x, double v_z_cam, double p_tz, double f_oc,
                         const FovParams& params) {
    if (!(p_tz > 0.0)) {
        throw std::invalid_argument("lambda_check: target depth must be positive");
    }
    const double eb = e_x / f_oc;
    const double one_eb2 = 1.0 + eb * eb;
    LambdaCheck out;
    out.lambda = (-v_z_cam / (f_oc * p_tz) + params.k_p * one_eb2) /
                 (1.0 + params.k_d * one_eb2);
    out.positive = out.lambda > 0.0;
    return out;
}

Vec3 desired_accel(const Vec3& v_d, const Vec3& v_now, double dt_ctrl, double a_max) {
    if (!(dt_ctrl > 0.0)) {
        throw std::invalid_argument("desired_accel: dt must be positive");
    }
    Vec3 a = (v_d - v_now) / dt_ctrl;
    const double n = a.norm();
    if (n > a_max) {
        a *= a_max / n;
    }
    return a;
}

Vec3 lift_direction(const Vec3& a_d, const Vec3& g_e) {
    const Vec3 f = a_d - g_e;
    const double n = f.norm();
    if (n <= 1e-6) {
        // only reachable with a_max >= |g|, i.e. a misconfigured limit
        throw std::invalid_argument("lift_direction: degenerate lift demand");
    }
    return f / n;
}

Mat3 tilt_rotation(const Vec3& n_f, const Vec3& n_fd) {
    if (std::abs(n_f.norm() - 1.0) > 1e-9 || std::abs(n_fd.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("tilt_rotation: directions must be unit length");
    }
    const double c = clamp_scalar(n_f.dot(n_fd), -1.0, 1.0);
    const double phi = std::acos(c);
    if (phi < 1e-8) {
        return Mat3::Identity();
    }
    if (phi > kPi - 1e-6) {
        // antiparallel: rotate half a turn about a fixed axis orthogonal to n_f
        Vec3 ref(1.0, 0.0, 0.0);
        Vec3 axis = ref - ref.dot(n_f) * n_f;
        if (axis.norm() < 1e-6) {
            ref = Vec3(0.0, 1.0, 0.0);
            axis = ref - ref.dot(n_f) * n_f;
        }
        return rodrigues(axis.normalized(), kPi);
    }
    const Vec3 axis = n_f.cross(n_fd).normalized();
    return rodrigues(axis, phi);
}

Vec3 attitude_rate(const Mat3& R_d, const Mat3& R_be) {
    const Mat3 a = R_d.transpose() * R_be;
    return -vex(a - a.transpose());
}

Command assemble_command(const Vec3& omega_tilt, double w_psi, const Vec3& a_d,
                         const Vec3& n_f, const VehicleParams& params, double t) {
    Command cmd;
    cmd.t = t;
    const Vec3 omega_yaw(0.0, 0.0, -w_psi);
    cmd.omega_d = sat_vec(omega_tilt + omega_yaw, params.omega_max);
    cmd.f_d = clamp_scalar(params.mass * n_f.dot(a_d - gravity_enu()), 0.0, params.f_max);
    return cmd;
}

double fov_excursion_bound(double dq_y, double v0, double vfov) {
    if (!(dq_y >= 0.0 && dq_y < kPi / 2.0)) {
        throw std::invalid_argument("fov_excursion_bound: dq_y must be in [0, pi/2)");
    }
    if (!(vfov > 0.0 && vfov < kPi)) {
        throw std::invalid_argument("fov_excursion_bound: vfov must be in (0, pi)");
    }
    return v0 * std::tan(dq_y) / std::tan(vfov / 2.0);
}

}  // namespace ivsim
