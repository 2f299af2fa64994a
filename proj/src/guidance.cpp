#include "ivsim/guidance.hpp"

#include <cmath>
#include <stdexcept>

namespace ivsim {

namespace {

// Shared by LOS and velocity directions: elevation above the horizontal
// plane and azimuth about +y, flagged outside the forward half-space.
void plane_angles(const Vec3& n, double& ang_y, double& ang_z, bool& in_domain) {
    const double horiz = std::hypot(n.x(), n.y());
    in_domain = n.y() > 0.0;
    if (horiz == 0.0) {
        // straight up/down: azimuth undefined, caller holds the previous value
        ang_y = n.z() > 0.0 ? kPi / 2.0 : -kPi / 2.0;
        ang_z = 0.0;
        in_domain = false;
        return;
    }
    ang_y = std::atan2(n.z(), horiz);
    ang_z = std::atan2(n.x(), n.y());
}

}  // namespace

LosAngles los_angles(const Vec3& n_t) {
    if (std::abs(n_t.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("los_angles: direction must be unit length");
    }
    LosAngles q;
    plane_angles(n_t, q.q_y, q.q_z, q.in_domain);
    return q;
}

VelocityAngles velocity_angles(const Vec3& n_v) {
    if (std::abs(n_v.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("velocity_angles: direction must be unit length");
    }
    VelocityAngles s;
    plane_angles(n_v, s.sigma_y, s.sigma_z, s.in_domain);
    return s;
}

DesiredAngles png_step(GuidanceState& gs, const LosAngles& q, const VelocityAngles& sigma,
                       const GuidanceParams& params) {
    DesiredAngles out;
    if (!gs.initialized) {
        out.sigma_yd = sigma.sigma_y;
        out.sigma_zd = sigma.sigma_z;
    } else {
        out.sigma_yd = params.nav_gain_y * (q.q_y - gs.q_y_prev) + gs.sigma_y_prev;
        out.sigma_zd = params.nav_gain_z * (q.q_z - gs.q_z_prev) + gs.sigma_z_prev;
    }
    gs.q_y_prev = q.q_y;
    gs.q_z_prev = q.q_z;
    gs.sigma_y_prev = sigma.sigma_y;
    gs.sigma_z_prev = sigma.sigma_z;
    gs.initialized = true;
    return out;
}

Vec3 desired_velocity(double sigma_yd, double sigma_zd, double v_d) {
    if (v_d < 0.0) {
        throw std::invalid_argument("desired_velocity: speed must be >= 0");
    }
    const Vec3 n_vd(std::cos(sigma_yd) * std::sin(sigma_zd),
                    std::cos(sigma_yd) * std::cos(sigma_zd),
                    std::sin(sigma_yd));
    return v_d * n_vd;
}

double speed_schedule(double v_now, const GuidanceParams& params) {
    if (v_now < 0.0) {
        throw std::invalid_argument("speed_schedule: speed must be >= 0");
    }
    return std::min(v_now + params.k_a, params.v_cap);
}

Vec3 pursuit_guidance(const Vec3& n_t, double v_d) {
    if (std::abs(n_t.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("pursuit_guidance: LOS must be unit length");
    }
    return v_d * n_t;
}

}  // namespace ivsim
