// Rigid-body propagation of the interceptor and closed-form propagation of
// the target under its maneuver model, plus the wind disturbance process.
#pragma once

#include "ivsim/mathcore.hpp"
#include "ivsim/rng.hpp"

#include <optional>
#include <variant>

namespace ivsim {

struct VehicleState {
    Vec3 p = Vec3::Zero();       // position, earth frame [m]
    Vec3 v = Vec3::Zero();       // velocity, earth frame [m/s]
    Mat3 R_be = Mat3::Identity();  // body -> earth
    Vec3 omega_b = Vec3::Zero();   // body rates [rad/s]
    double t = 0.0;              // [s]

    /// Thrust axis (body +z) expressed in the earth frame.
    Vec3 lift_dir() const { return R_be.col(2); }
};

struct VehicleParams {
    double mass = 1.5;        // [kg]
    double f_max = 44.1;      // max lift [N]; thrust-to-weight ~= 3
    double omega_max = 4.0;   // max body-rate norm [rad/s]
    double tau_omega = 0.05;  // angular-rate tracking time constant [s]
    double v_max = 12.0;      // sanity ceiling on speed [m/s]
    double a_max = 5.0;       // accel command ceiling [m/s^2]
};

struct Command {
    double f_d = 0.0;            // thrust magnitude [N]
    Vec3 omega_d = Vec3::Zero();  // desired body rates [rad/s]
    double t = 0.0;
};

// Target maneuver models. Each is evaluated in closed form from t=0 so that
// propagation is stateless and exactly repeatable.
struct StaticModel {};
struct ConstantVelocity {
    Vec3 v = Vec3::Zero();
};
struct ConstantAcceleration {
    Vec3 a = Vec3::Zero();
};
struct SinusoidalManeuver {
    double amplitude = 2.0;  // [m], x-axis weave
    double period = 14.0;    // [s]
    double drift = 3.0;      // [m/s], y-axis drift
};

struct MotionModel {
    Vec3 p0 = Vec3::Zero();
    std::variant<StaticModel, ConstantVelocity, ConstantAcceleration, SinusoidalManeuver> law;
};

struct TargetState {
    Vec3 p = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 a = Vec3::Zero();
    double t = 0.0;
};

// First-order Gauss-Markov gust on top of a mean wind. Disturbance
// acceleration is drag_coeff * (wind - velocity) per body.
struct WindModel {
    Vec3 mean = Vec3::Zero();   // [m/s]
    double gust_std = 0.0;      // [m/s]
    double corr_time = 1.0;     // [s]
    double drag_vehicle = 0.0;  // [1/s]
    double drag_target = 0.3;   // [1/s]; balloon-like targets respond strongly
};

class WindSim {
public:
    WindSim(const WindModel& model, std::uint64_t seed) : model_(model), rng_(seed) {}

    /// Advance the gust process one step and return total wind velocity.
    Vec3 step(double dt);

    Vec3 current() const { return model_.mean + gust_; }
    const WindModel& model() const { return model_; }

private:
    WindModel model_;
    Rng rng_;
    Vec3 gust_ = Vec3::Zero();
};

struct RelativeState {
    Vec3 p_r = Vec3::Zero();
    Vec3 v_r = Vec3::Zero();
    double range = 0.0;
    double closing_rate = 0.0;  // d(range)/dt, negative when closing
    bool intercepted = false;   // range exactly zero
};

/// One fixed physics step. Translation integrates with RK4 against the
/// attitude trajectory implied by the rate-lag solution; the rotation update
/// itself goes through the exponential map so SO(3) drift stays below
/// re-orthonormalization noise.
VehicleState step_vehicle(const VehicleState& state, const Command& cmd,
                          const VehicleParams& params, const Vec3& wind_velocity,
                          double wind_drag, double dt);

/// Closed-form target state at time t.
TargetState step_target(const MotionModel& model, double t);

RelativeState relative_state(const VehicleState& vehicle, const TargetState& target);

}  // namespace ivsim
