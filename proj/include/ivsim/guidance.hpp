// Guidance laws: proportional navigation in two decoupled planes, plus the
// pursuit baseline. LOS and velocity directions are reduced to
// vertical/horizontal-plane angles; the PN step advances the desired
// velocity angle by the navigation gain times the LOS angle change.
#pragma once

#include "ivsim/mathcore.hpp"

namespace ivsim {

struct LosAngles {
    double q_y = 0.0;  // vertical-plane angle [rad]
    double q_z = 0.0;  // horizontal-plane angle [rad]
    bool in_domain = true;  // false when the direction leaves the forward half-space
};

struct VelocityAngles {
    double sigma_y = 0.0;
    double sigma_z = 0.0;
    bool in_domain = true;
};

struct GuidanceParams {
    double nav_gain_y = 3.0;   // K_y
    double nav_gain_z = 3.0;   // K_z
    double k_a = 2.0;          // speed gain [m/s per guidance step]
    double v_cap = 8.0;        // speed ceiling [m/s]
};

/// One-sample memory for the PN difference equation.
struct GuidanceState {
    double q_y_prev = 0.0;
    double q_z_prev = 0.0;
    double sigma_y_prev = 0.0;
    double sigma_z_prev = 0.0;
    bool initialized = false;
};

struct DesiredAngles {
    double sigma_yd = 0.0;
    double sigma_zd = 0.0;
};

/// Vertical/horizontal-plane angles of a unit direction. The horizontal
/// angle uses the two-argument arctangent; directions outside the forward
/// half-space (n_y <= 0) are flagged rather than wrapped.
LosAngles los_angles(const Vec3& n_t);

VelocityAngles velocity_angles(const Vec3& n_v);

/// PN step: sigma_d = K (q_k - q_{k-1}) + sigma_{k-1}. The first call seeds
/// the state and passes the current angles through.
DesiredAngles png_step(GuidanceState& gs, const LosAngles& q, const VelocityAngles& sigma,
                       const GuidanceParams& params);

/// Unit direction from plane angles, scaled to the desired speed.
Vec3 desired_velocity(double sigma_yd, double sigma_zd, double v_d);

/// Speed ramp: v_d = min(v_now + k_a, v_cap).
double speed_schedule(double v_now, const GuidanceParams& params);

/// Baseline: desired velocity aligned with the instantaneous LOS.
Vec3 pursuit_guidance(const Vec3& n_t, double v_d);

}  // namespace ivsim
