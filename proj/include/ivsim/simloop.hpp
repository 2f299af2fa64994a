// Single-engagement orchestration: fixed-step scheduling of physics,
// camera, filter, guidance and control; termination and miss-distance
// determination; structured logging; runtime stability monitors.
#pragma once

#include "ivsim/config.hpp"

#include <string>
#include <vector>

namespace ivsim {

enum class Outcome { Intercepted, FovLost, Timeout, Diverged };

std::string to_string(Outcome outcome);

// One row per control tick.
struct StepRecord {
    double t = 0.0;
    Vec3 p_m = Vec3::Zero();
    Vec3 v_m = Vec3::Zero();
    double yaw = 0.0, pitch = 0.0, roll = 0.0;  // logging only [rad]
    Vec3 p_t = Vec3::Zero();
    double range = 0.0;
    double closing_rate = 0.0;
    double q_y_est = 0.0, q_z_est = 0.0;
    double q_rate_est = 0.0;  // |dq/dt| from estimated angles [rad/s]
    double e_x_true = 0.0, e_y_true = 0.0;
    double e_x_dkf = 0.0, e_y_dkf = 0.0;
    double f_d = 0.0;
    Vec3 omega_d = Vec3::Zero();
    double a_normal = 0.0;  // accel component perpendicular to velocity [m/s^2]
    double v_normal = 0.0;  // velocity component perpendicular to the LOS [m/s]
    bool fov_valid = false;
    double lyapunov = 0.0;  // 0.5 * (e_x^2 + range^2)
    bool lambda_ok = true;
    bool guided = false;  // estimator initialized, controller active
};

struct MonitorReport {
    long l2_violations = 0;       // Lyapunov increases after the transient
    long lambda_violations = 0;   // decay-rate positivity failures
    long qdot_increases = 0;      // windowed LOS-rate increases > 1e-3 rad/s
    long closing_violations = 0;  // non-negative range rate after the transient
    long k_bound_violations = 0;  // navigation constant below the geometry bound
    double transient_s = 0.0;
};

struct RunSummary {
    Outcome outcome = Outcome::Timeout;
    double miss_distance = 0.0;      // [m], segment-interpolated minimum range
    double time_of_closest = 0.0;    // [s]
    double duration = 0.0;           // [s]
    double terminal_speed = 0.0;     // [m/s]
    double max_omega_cmd = 0.0;      // [rad/s]
    double delta_e_y = 0.0;          // observed v-axis excursion while guided [px]
    double delta_q_g = 0.0;          // observed vertical LOS change while guided [rad]
    long frames_total = 0;
    long frames_valid = 0;
    long dkf_skipped = 0;
    MonitorReport monitors;
    std::uint64_t seed = 0;
    std::string controller;
};

struct RunResult {
    RunSummary summary;
    std::vector<StepRecord> records;
};

/// Run one engagement. Deterministic given the config (seed included).
RunResult run_scenario(const ScenarioConfig& cfg);

/// Minimum range over the records, refined by closed-form interpolation of
/// the closest approach on the straddling segment (relative motion assumed
/// linear between samples).
double miss_distance(const std::vector<StepRecord>& records);

/// Closest approach to the origin on the segment p0 -> p1.
double segment_min_distance(const Vec3& p0, const Vec3& p1, double* s_at = nullptr);

/// Evaluate the stability monitors over a completed run.
MonitorReport evaluate_monitors(const std::vector<StepRecord>& records, const ScenarioConfig& cfg);

/// RFC-4180 CSV with a header row and 9 significant digits.
std::string records_to_csv(const std::vector<StepRecord>& records);
void write_records_csv(const std::string& path, const std::vector<StepRecord>& records);

/// Pretty-printed JSON object with sorted keys.
std::string summary_to_json(const RunSummary& summary);

}  // namespace ivsim
