// Inner control: yaw-rate PD holding the target on the image centerline,
// velocity-error acceleration, geometric tilt attitude loop, and command
// assembly with rate/thrust saturation.
#pragma once

#include "ivsim/dynamics.hpp"
#include "ivsim/mathcore.hpp"

namespace ivsim {

struct FovParams {
    double k_p = 0.03;      // [rad/s per px]
    double k_d = 0.01;      // [rad/s per px/s]
    double epsilon_px = 60.0;  // allowed v-direction excursion [px]
};

struct LambdaCheck {
    double lambda = 0.0;  // image-error decay rate [1/s]
    bool positive = false;
};

/// Yaw-rate command driving e_x to zero.
double yaw_rate_pd(double e_x, double ed_x, const FovParams& params);

/// Decay rate of the linearized centerline error dynamics; positive lambda
/// means the yaw PD is stabilizing at this operating point.
LambdaCheck lambda_check(double e_x, double v_z_cam, double p_tz, double f_oc,
                         const FovParams& params);

/// Velocity-error acceleration, norm-clipped to a_max.
Vec3 desired_accel(const Vec3& v_d, const Vec3& v_now, double dt_ctrl, double a_max);

/// Unit direction the lift must take to realize a_d against gravity.
Vec3 lift_direction(const Vec3& a_d, const Vec3& g_e);

/// Shortest rotation taking the current lift axis onto the desired one.
/// Near-identity and antiparallel pairs resolve deterministically.
Mat3 tilt_rotation(const Vec3& n_f, const Vec3& n_fd);

/// Tilt-correcting body-rate term: -vex(R_d^T R_be - R_be^T R_d).
Vec3 attitude_rate(const Mat3& R_d, const Mat3& R_be);

/// Combine tilt and yaw rates, saturate, and map the desired acceleration
/// onto the current lift axis: f_d = clamp(m * n_f . (a_d - g), 0, f_max).
/// Positive yaw-PD output turns the nose toward positive e_x, which is a
/// negative rate about body +z.
Command assemble_command(const Vec3& omega_tilt, double w_psi, const Vec3& a_d,
                         const Vec3& n_f, const VehicleParams& params, double t);

/// Image-plane excursion bound for a vertical LOS change:
/// v0 * tan(dq_y) / tan(vfov/2).
double fov_excursion_bound(double dq_y, double v0, double vfov);

}  // namespace ivsim
