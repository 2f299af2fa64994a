#include "ivsim/simloop.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ivsim {

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Intercepted: return "intercepted";
        case Outcome::FovLost: return "fov_lost";
        case Outcome::Timeout: return "timeout";
        case Outcome::Diverged: return "diverged";
    }
    return "unknown";
}

double segment_min_distance(const Vec3& p0, const Vec3& p1, double* s_at) {
    const Vec3 d = p1 - p0;
    const double dd = d.squaredNorm();
    double s = 0.0;
    if (dd > 0.0) {
        s = clamp_scalar(-p0.dot(d) / dd, 0.0, 1.0);
    }
    if (s_at) {
        *s_at = s;
    }
    return (p0 + s * d).norm();
}

double miss_distance(const std::vector<StepRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("miss_distance: no records");
    }
    double best = (records.front().p_t - records.front().p_m).norm();
    for (std::size_t i = 1; i < records.size(); ++i) {
        const Vec3 r0 = records[i - 1].p_t - records[i - 1].p_m;
        const Vec3 r1 = records[i].p_t - records[i].p_m;
        best = std::min(best, segment_min_distance(r0, r1));
    }
    return best;
}

namespace {

struct EulerAngles {
    double yaw, pitch, roll;
};

// z-y-x decomposition used for logging only
EulerAngles euler_of(const Mat3& r) {
    EulerAngles e{};
    e.pitch = std::asin(clamp_scalar(-r(2, 0), -1.0, 1.0));
    e.yaw = std::atan2(r(1, 0), r(0, 0));
    e.roll = std::atan2(r(2, 1), r(2, 2));
    return e;
}

Mat3 yaw_rotation(double psi) {
    return rodrigues(Vec3(0.0, 0.0, 1.0), psi);
}

double face_target_yaw(const Vec3& p_m, const Vec3& p_t) {
    const double dx = p_t.x() - p_m.x();
    const double dy = p_t.y() - p_m.y();
    if (dx == 0.0 && dy == 0.0) {
        return 0.0;
    }
    // body +y (forward) onto the horizontal LOS
    return std::atan2(-dx, dy);
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    validate_config(cfg);

    const double dt_p = cfg.physics_dt();
    const double dt_c = cfg.control_dt();
    const int steps_per_ctrl = static_cast<int>(std::round(cfg.rates.physics_hz / cfg.rates.control_hz));
    const CameraIntrinsics cam = cfg.camera.intrinsics();
    const Vec3 g = gravity_enu();

    // independent substreams so enabling one noise source never shifts another
    CameraSim camera(cam, cfg.camera.rate_hz, cfg.camera.latency_s, cfg.camera.pixel_noise_px,
                     derive_seed(cfg.seed, 1));
    WindSim wind(cfg.wind, derive_seed(cfg.seed, 2));
    Dkf dkf(cfg.dkf);

    VehicleState vehicle;
    vehicle.p = cfg.initial.position;
    {
        const TargetState t0 = step_target(cfg.target, 0.0);
        double yaw = cfg.initial.has_yaw ? deg_to_rad(cfg.initial.yaw_deg)
                                         : face_target_yaw(vehicle.p, t0.p);
        yaw += deg_to_rad(cfg.initial.yaw_error_deg);
        vehicle.R_be = yaw_rotation(yaw);
    }

    // balloon-like gust response rides on top of the closed-form motion model
    Vec3 target_off_p = Vec3::Zero();
    Vec3 target_off_v = Vec3::Zero();
    const auto target_at = [&](double t) {
        TargetState s = step_target(cfg.target, t);
        s.p += target_off_p;
        s.v += target_off_v;
        return s;
    };

    GuidanceState gs;
    bool guid_seeded = false;
    double sigma_cmd_y = 0.0, sigma_cmd_z = 0.0;
    double v_ref = 0.0;
    double ed_x_filt = 0.0;
    bool ed_x_filt_init = false;
    LosAngles q_held;
    bool q_held_valid = false;
    VelocityAngles sigma_meas_held;
    double prev_qy_est = 0.0, prev_qz_est = 0.0;
    bool have_prev_q_est = false;
    Vec3 v_prev = vehicle.v;

    RunResult out;
    out.summary.seed = cfg.seed;
    out.summary.controller = to_string(cfg.controller);

    double best_miss = (target_at(0.0).p - vehicle.p).norm();
    double t_best = 0.0;
    double ey_min = 0.0, ey_max = 0.0, qy_min = 0.0, qy_max = 0.0;
    bool excursion_started = false;

    Outcome outcome = Outcome::Timeout;
    bool done = false;
    const long max_ticks = static_cast<long>(std::ceil(cfg.sim.max_duration_s / dt_c));

    const Command hover{cfg.vehicle.mass * kGravity, Vec3::Zero(), 0.0};
    Command cmd = hover;

    for (long tick = 0; tick <= max_ticks && !done; ++tick) {
        const double t = tick * dt_c;
        TargetState target = target_at(t);

        // -------- sensing --------
        const auto delivered = camera.tick(t, target.p, vehicle);
        if (dkf.initialized() && t > dkf.time() + 1e-12) {
            dkf.predict(t - dkf.time());
        }
        if (delivered && delivered->valid) {
            dkf.update_delayed(*delivered);
            if (dkf.time() < t - 1e-12) {
                dkf.predict(t - dkf.time());  // first update lands in the past
            }
        }

        const bool guided = dkf.initialized();
        const RelativeState rel = relative_state(vehicle, target);

        StepRecord rec;
        rec.t = t;
        rec.p_m = vehicle.p;
        rec.v_m = vehicle.v;
        const EulerAngles eul = euler_of(vehicle.R_be);
        rec.yaw = eul.yaw;
        rec.pitch = eul.pitch;
        rec.roll = eul.roll;
        rec.p_t = target.p;
        rec.range = rel.range;
        rec.closing_rate = rel.closing_rate;
        rec.guided = guided;

        {
            const PixelObservation truth = project(target.p, vehicle, cam);
            rec.fov_valid = truth.valid;
            rec.e_x_true = truth.u - cam.u0;
            rec.e_y_true = truth.v - cam.v0;
        }
        if (rel.range > 1e-9) {
            const Vec3 n_t_true = (target.p - vehicle.p) / rel.range;
            rec.v_normal = (vehicle.v - vehicle.v.dot(n_t_true) * n_t_true).norm();
        }
        if (tick > 0) {
            const Vec3 accel = (vehicle.v - v_prev) / dt_c;
            const double speed = vehicle.v.norm();
            if (speed > 1e-6) {
                const Vec3 n_v = vehicle.v / speed;
                rec.a_normal = (accel - accel.dot(n_v) * n_v).norm();
            } else {
                rec.a_normal = accel.norm();
            }
        }
        v_prev = vehicle.v;

        // -------- guidance + control --------
        if (guided) {
            const DkfEstimate est = dkf.estimate(cam);
            rec.e_x_dkf = est.e_x;
            rec.e_y_dkf = est.e_y;

            const Vec3 n_t = los_from_pixels(est.e_x, est.e_y, cam.f_oc, vehicle.R_be, cam.R_cb);
            LosAngles q = los_angles(n_t);
            if (!q.in_domain && q_held_valid) {
                q = q_held;  // hold the previous sample rather than wrap
            }
            q_held = q;
            q_held_valid = true;

            const double speed = vehicle.v.norm();
            VelocityAngles sigma_meas;
            if (speed > 0.05) {
                sigma_meas = velocity_angles(vehicle.v / speed);
                if (!sigma_meas.in_domain) {
                    sigma_meas = sigma_meas_held;
                }
            } else if (guid_seeded) {
                sigma_meas = sigma_meas_held;
            } else {
                sigma_meas.sigma_y = q.q_y;  // standstill start: seed from the LOS
                sigma_meas.sigma_z = q.q_z;
            }
            sigma_meas_held = sigma_meas;

            if (!guid_seeded) {
                sigma_cmd_y = q.q_y;
                sigma_cmd_z = q.q_z;
                v_ref = speed;
            }

            VelocityAngles anchor = sigma_meas;
            if (cfg.guidance.anchor == SigmaAnchor::Commanded && guid_seeded) {
                anchor.sigma_y = sigma_cmd_y;
                anchor.sigma_z = sigma_cmd_z;
            }
            DesiredAngles des = png_step(gs, q, anchor, cfg.guidance.params);
            guid_seeded = true;

            // keep the commanded direction within a bounded lead of the
            // actual one so the reference cannot wind up under saturation;
            // below walking pace the measured direction is meaningless
            if (speed > 1.0) {
                const double lead = cfg.guidance.max_sigma_lead;
                des.sigma_yd = clamp_scalar(des.sigma_yd, sigma_meas.sigma_y - lead,
                                            sigma_meas.sigma_y + lead);
                des.sigma_zd = clamp_scalar(des.sigma_zd, sigma_meas.sigma_z - lead,
                                            sigma_meas.sigma_z + lead);
            }
            sigma_cmd_y = des.sigma_yd;
            sigma_cmd_z = des.sigma_zd;

            if (cfg.guidance.anchor == SigmaAnchor::Commanded) {
                v_ref = std::min(v_ref + cfg.guidance.params.k_a * dt_c / cfg.guidance.speed_ramp_s,
                                 cfg.guidance.params.v_cap);
            } else {
                v_ref = speed_schedule(speed, cfg.guidance.params);
            }

            const Vec3 v_d = cfg.controller == ControllerKind::Pursuit
                                 ? pursuit_guidance(n_t, v_ref)
                                 : desired_velocity(des.sigma_yd, des.sigma_zd, v_ref);

            const Vec3 a_d = desired_accel(v_d, vehicle.v, cfg.control.accel_horizon_s,
                                           cfg.vehicle.a_max);
            const Vec3 n_f = vehicle.lift_dir();
            const Vec3 n_fd = lift_direction(a_d, g);
            const Mat3 R_d = tilt_rotation(n_f, n_fd) * vehicle.R_be;
            const Vec3 omega_tilt = attitude_rate(R_d, vehicle.R_be);

            // the pixel-rate estimate carries extrapolation artifacts around
            // rate reversals; filter it before the derivative term
            if (!ed_x_filt_init) {
                ed_x_filt = est.ed_x;
                ed_x_filt_init = true;
            } else if (cfg.control.derivative_lpf_s > 0.0) {
                ed_x_filt += (est.ed_x - ed_x_filt) * dt_c /
                             (cfg.control.derivative_lpf_s + dt_c);
            } else {
                ed_x_filt = est.ed_x;
            }
            const double w_psi = yaw_rate_pd(est.e_x, ed_x_filt, cfg.control.fov);
            cmd = assemble_command(omega_tilt, w_psi, a_d, n_f, cfg.vehicle, t);

            // LOS angle estimates and rate, for the log and the monitors
            rec.q_y_est = q.q_y;
            rec.q_z_est = q.q_z;
            if (have_prev_q_est) {
                rec.q_rate_est =
                    std::hypot(q.q_y - prev_qy_est, q.q_z - prev_qz_est) / dt_c;
            }
            prev_qy_est = q.q_y;
            prev_qz_est = q.q_z;
            have_prev_q_est = true;

            {
                const Vec3 p_cam = cam.R_cb.transpose() * vehicle.R_be.transpose() *
                                   (target.p - vehicle.p);
                const Vec3 v_cam = cam.R_cb.transpose() * vehicle.R_be.transpose() * vehicle.v;
                rec.lambda_ok = p_cam.z() > 0.0 &&
                                lambda_check(est.e_x, v_cam.z(), p_cam.z(), cam.f_oc,
                                             cfg.control.fov)
                                    .positive;
            }

            // FOV-holding excursion bookkeeping (true values, guided phase)
            const double qy_true = los_angles((target.p - vehicle.p).normalized()).q_y;
            if (!excursion_started) {
                ey_min = ey_max = rec.e_y_true;
                qy_min = qy_max = qy_true;
                excursion_started = true;
            } else if (rec.fov_valid) {
                ey_min = std::min(ey_min, rec.e_y_true);
                ey_max = std::max(ey_max, rec.e_y_true);
                qy_min = std::min(qy_min, qy_true);
                qy_max = std::max(qy_max, qy_true);
            }
        } else {
            cmd = hover;
            cmd.t = t;
        }
        rec.f_d = cmd.f_d;
        rec.omega_d = cmd.omega_d;
        rec.lyapunov = 0.5 * (rec.e_x_true * rec.e_x_true + rel.range * rel.range);
        out.records.push_back(rec);
        out.summary.max_omega_cmd = std::max(out.summary.max_omega_cmd, cmd.omega_d.norm());

        // -------- termination checks at the control boundary --------
        if (rel.range <= cfg.sim.capture_radius_m) {
            best_miss = std::min(best_miss, rel.range);
            t_best = t;
            outcome = Outcome::Intercepted;
            done = true;
            break;
        }
        const double last_seen = camera.last_valid_capture().value_or(0.0);
        if (t - last_seen > cfg.sim.fov_grace_s) {
            outcome = Outcome::FovLost;
            done = true;
            break;
        }
        if (tick == max_ticks) {
            outcome = Outcome::Timeout;
            break;
        }

        // -------- physics substeps --------
        try {
            for (int s = 0; s < steps_per_ctrl && !done; ++s) {
                const double t_sub = t + s * dt_p;
                const Vec3 w = wind.step(dt_p);
                const Vec3 rel0 = target_at(t_sub).p - vehicle.p;

                vehicle = step_vehicle(vehicle, cmd, cfg.vehicle, w, cfg.wind.drag_vehicle, dt_p);
                if (cfg.wind.gust_std > 0.0 || cfg.wind.mean.squaredNorm() > 0.0) {
                    target_off_v += cfg.wind.drag_target * (w - target_off_v) * dt_p;
                    target_off_p += target_off_v * dt_p;
                }

                const Vec3 rel1 = target_at(t_sub + dt_p).p - vehicle.p;
                double s_at = 0.0;
                const double dmin = segment_min_distance(rel0, rel1, &s_at);
                if (dmin < best_miss) {
                    best_miss = dmin;
                    t_best = t_sub + s_at * dt_p;
                }
                if (dmin <= cfg.sim.capture_radius_m) {
                    outcome = Outcome::Intercepted;
                    done = true;
                }
            }
        } catch (const std::runtime_error&) {
            outcome = Outcome::Diverged;
            done = true;
        }
    }

    out.summary.outcome = outcome;
    out.summary.miss_distance = best_miss;
    out.summary.time_of_closest = t_best;
    out.summary.duration = out.records.empty() ? 0.0 : out.records.back().t;
    out.summary.terminal_speed = vehicle.v.norm();
    out.summary.delta_e_y = excursion_started ? ey_max - ey_min : 0.0;
    out.summary.delta_q_g = excursion_started ? qy_max - qy_min : 0.0;
    out.summary.frames_total = camera.frames_captured();
    out.summary.frames_valid = camera.frames_valid();
    out.summary.dkf_skipped = dkf.skipped_updates();
    out.summary.monitors = evaluate_monitors(out.records, cfg);
    return out;
}

MonitorReport evaluate_monitors(const std::vector<StepRecord>& records,
                                const ScenarioConfig& cfg) {
    MonitorReport rep;
    if (records.empty()) {
        return rep;
    }
    const double duration = records.back().t;
    const double transient = std::max(cfg.sim.transient_s, 0.1 * duration);
    rep.transient_s = transient;
    const double dt_c = cfg.control_dt();
    const double min_range = cfg.sim.monitor_min_range_m;
    const double k_min = std::min(cfg.guidance.params.nav_gain_y, cfg.guidance.params.nav_gain_z);

    // Lyapunov descent sampled at 10 Hz
    const int stride = std::max(1, static_cast<int>(std::round(0.1 / dt_c)));
    double prev_l2 = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < records.size(); i += stride) {
        const StepRecord& r = records[i];
        if (!r.guided || r.t < transient) {
            continue;
        }
        if (have_prev && r.lyapunov > prev_l2 * (1.0 + 1e-9) + 1e-9) {
            ++rep.l2_violations;
        }
        prev_l2 = r.lyapunov;
        have_prev = true;
    }

    // every monitor disarms inside min_range, where the small-angle and
    // constant-depth assumptions behind the conditions have broken down
    std::vector<double> window_sum;
    std::vector<long> window_count;
    double t_first = -1.0;
    for (const StepRecord& r : records) {
        if (!r.guided || r.t < transient || r.range <= min_range) {
            continue;
        }
        if (!r.lambda_ok) {
            ++rep.lambda_violations;
        }
        if (r.closing_rate >= 0.0) {
            ++rep.closing_violations;
        }
        const double speed = r.v_m.norm();
        const Vec3 p_r = r.p_t - r.p_m;
        if (speed > 0.5 && r.range > 1e-9) {
            const double cos_eta = (r.v_m / speed).dot(p_r / r.range);
            if (cos_eta <= 0.0 || k_min <= 2.0 * std::abs(r.closing_rate) / (speed * cos_eta)) {
                ++rep.k_bound_violations;
            }
        }
        if (t_first < 0.0) {
            t_first = r.t;
        }
        const auto idx = static_cast<std::size_t>(std::floor((r.t - t_first) / 0.5));
        if (idx >= window_sum.size()) {
            window_sum.resize(idx + 1, 0.0);
            window_count.resize(idx + 1, 0);
        }
        window_sum[idx] += r.q_rate_est;
        ++window_count[idx];
    }
    if (!window_sum.empty()) {
        window_sum.pop_back();  // trailing partial window
        window_count.pop_back();
    }
    double prev_mean = 0.0;
    bool have_mean = false;
    for (std::size_t i = 0; i < window_sum.size(); ++i) {
        if (window_count[i] == 0) {
            continue;
        }
        const double mean = window_sum[i] / window_count[i];
        if (have_mean && mean > prev_mean + 1e-3) {
            ++rep.qdot_increases;
        }
        prev_mean = mean;
        have_mean = true;
    }
    return rep;
}

std::string records_to_csv(const std::vector<StepRecord>& records) {
    std::string out =
        "t,p_mx,p_my,p_mz,v_mx,v_my,v_mz,yaw,pitch,roll,p_tx,p_ty,p_tz,"
        "range,closing_rate,q_y_est,q_z_est,q_rate_est,e_x_true,e_y_true,"
        "e_x_dkf,e_y_dkf,f_d,omega_dx,omega_dy,omega_dz,a_normal,v_normal,"
        "fov_valid,lyapunov,lambda_ok,guided\r\n";
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        out += buf;
    };
    for (const StepRecord& r : records) {
        const double cols[] = {r.t,        r.p_m.x(),     r.p_m.y(),   r.p_m.z(),  r.v_m.x(),
                               r.v_m.y(),  r.v_m.z(),     r.yaw,       r.pitch,    r.roll,
                               r.p_t.x(),  r.p_t.y(),     r.p_t.z(),   r.range,    r.closing_rate,
                               r.q_y_est,  r.q_z_est,     r.q_rate_est, r.e_x_true, r.e_y_true,
                               r.e_x_dkf,  r.e_y_dkf,     r.f_d,       r.omega_d.x(),
                               r.omega_d.y(), r.omega_d.z(), r.a_normal,  r.v_normal};
        bool first = true;
        for (double c : cols) {
            if (!first) out += ',';
            num(c);
            first = false;
        }
        out += ',';
        out += r.fov_valid ? '1' : '0';
        out += ',';
        num(r.lyapunov);
        out += ',';
        out += r.lambda_ok ? '1' : '0';
        out += ',';
        out += r.guided ? '1' : '0';
        out += "\r\n";
    }
    return out;
}

void write_records_csv(const std::string& path, const std::vector<StepRecord>& records) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f << records_to_csv(records);
}

std::string summary_to_json(const RunSummary& s) {
    nlohmann::json j;
    j["outcome"] = to_string(s.outcome);
    j["miss_distance_m"] = s.miss_distance;
    j["time_of_closest_s"] = s.time_of_closest;
    j["duration_s"] = s.duration;
    j["terminal_speed_m_s"] = s.terminal_speed;
    j["max_omega_cmd_rad_s"] = s.max_omega_cmd;
    j["delta_e_y_px"] = s.delta_e_y;
    j["delta_q_g_rad"] = s.delta_q_g;
    j["frames_total"] = s.frames_total;
    j["frames_valid"] = s.frames_valid;
    j["dkf_skipped_updates"] = s.dkf_skipped;
    j["monitors"] = {{"l2_violations", s.monitors.l2_violations},
                     {"lambda_violations", s.monitors.lambda_violations},
                     {"qdot_increases", s.monitors.qdot_increases},
                     {"closing_violations", s.monitors.closing_violations},
                     {"k_bound_violations", s.monitors.k_bound_violations},
                     {"transient_s", s.monitors.transient_s}};
    j["seed"] = s.seed;
    j["controller"] = s.controller;
    return j.dump(2) + "\n";
}

}  // namespace ivsim
