#include "ivsim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace ivsim {

Vec3 WindSim::step(double dt) {
    if (model_.gust_std > 0.0) {
        const double a = std::exp(-dt / model_.corr_time);
        const double s = model_.gust_std * std::sqrt(1.0 - a * a);
        gust_ = a * gust_ + Vec3(rng_.gaussian(0.0, s), rng_.gaussian(0.0, s),
                                 rng_.gaussian(0.0, s));
    }
    return model_.mean + gust_;
}

namespace {

// Body-rate first-order lag has a closed form; its time integral gives the
// rotation vector accumulated over [0, s].
Vec3 omega_at(const Vec3& w0, const Vec3& wd, double tau, double s) {
    const double a = std::exp(-s / tau);
    return wd + (w0 - wd) * a;
}

Vec3 omega_integral(const Vec3& w0, const Vec3& wd, double tau, double s) {
    const double a = std::exp(-s / tau);
    return wd * s + (w0 - wd) * tau * (1.0 - a);
}

}  // namespace

VehicleState step_vehicle(const VehicleState& state, const Command& cmd,
                          const VehicleParams& params, const Vec3& wind_velocity,
                          double wind_drag, double dt) {
    if (!(dt > 0.0 && dt <= 0.02)) {
        throw std::invalid_argument("step_vehicle: dt must be in (0, 0.02] s");
    }

    const Vec3 g = gravity_enu();
    const double thrust_accel = cmd.f_d / params.mass;

    // Attitude at an intermediate stage time, from the exact rate-lag solution.
    const auto R_at = [&](double s) -> Mat3 {
        if (s == 0.0) return state.R_be;
        return state.R_be *
               so3_exp(omega_integral(state.omega_b, cmd.omega_d, params.tau_omega, s));
    };
    const auto accel_at = [&](double s, const Vec3& v) -> Vec3 {
        const Vec3 n_f = R_at(s).col(2);
        Vec3 a = g + thrust_accel * n_f;
        if (wind_drag != 0.0) {
            a += wind_drag * (wind_velocity - v);
        }
        return a;
    };

    // RK4 on (p, v).
    const Vec3 k1v = accel_at(0.0, state.v);
    const Vec3 k1p = state.v;
    const Vec3 k2v = accel_at(0.5 * dt, state.v + 0.5 * dt * k1v);
    const Vec3 k2p = state.v + 0.5 * dt * k1v;
    const Vec3 k3v = accel_at(0.5 * dt, state.v + 0.5 * dt * k2v);
    const Vec3 k3p = state.v + 0.5 * dt * k2v;
    const Vec3 k4v = accel_at(dt, state.v + dt * k3v);
    const Vec3 k4p = state.v + dt * k3v;

    VehicleState next;
    next.p = state.p + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    next.v = state.v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    next.R_be = orthonormalize(R_at(dt));
    next.omega_b = omega_at(state.omega_b, cmd.omega_d, params.tau_omega, dt);
    next.t = state.t + dt;

    if (!next.p.allFinite() || !next.v.allFinite() || !next.R_be.allFinite()) {
        throw std::runtime_error("step_vehicle: state diverged (NaN/inf)");
    }
    return next;
}

TargetState step_target(const MotionModel& model, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("step_target: t must be >= 0");
    }
    TargetState s;
    s.t = t;
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, StaticModel>) {
                s.p = model.p0;
            } else if constexpr (std::is_same_v<T, ConstantVelocity>) {
                s.p = model.p0 + law.v * t;
                s.v = law.v;
            } else if constexpr (std::is_same_v<T, ConstantAcceleration>) {
                s.p = model.p0 + 0.5 * law.a * t * t;
                s.v = law.a * t;
                s.a = law.a;
            } else if constexpr (std::is_same_v<T, SinusoidalManeuver>) {
                const double w = 2.0 * kPi / law.period;
                s.p = model.p0 + Vec3(law.amplitude * std::sin(w * t), law.drift * t, 0.0);
                s.v = Vec3(law.amplitude * w * std::cos(w * t), law.drift, 0.0);
                s.a = Vec3(-law.amplitude * w * w * std::sin(w * t), 0.0, 0.0);
            }
        },
        model.law);
    return s;
}

RelativeState relative_state(const VehicleState& vehicle, const TargetState& target) {
    RelativeState r;
    r.p_r = target.p - vehicle.p;
    r.v_r = target.v - vehicle.v;
    r.range = r.p_r.norm();
    if (r.range == 0.0) {
        r.closing_rate = 0.0;
        r.intercepted = true;
    } else {
        r.closing_rate = r.p_r.dot(r.v_r) / r.range;
    }
    return r;
}

}  // namespace ivsim
