// Scenario configuration: one JSON document describing vehicle, target,
// sensing, estimation, guidance, control, wind, rates and termination.
// Parsing is strict -- unknown fields are rejected so typos cannot silently
// fall back to defaults. docs/config.md documents every field and unit.
#pragma once

#include "ivsim/control.hpp"
#include "ivsim/dynamics.hpp"
#include "ivsim/filter.hpp"
#include "ivsim/guidance.hpp"
#include "ivsim/sensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ivsim {

enum class ControllerKind { Proposed, Pursuit };

std::string to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);

// How the PN difference equation is anchored between ticks: to the
// previously commanded velocity angles (reference integrates the LOS change)
// or to the measured ones (reference re-anchors to the actual velocity).
enum class SigmaAnchor { Commanded, Measured };

struct CameraConfig {
    int width = 640;
    int height = 480;
    double hfov_deg = 120.0;
    double rate_hz = 30.0;
    double latency_s = 0.1;
    double pixel_noise_px = 1.5;
    std::string mount = "forward";

    CameraIntrinsics intrinsics() const;
};

struct InitialConfig {
    Vec3 position{0.0, 0.0, 10.0};
    bool has_yaw = false;     // explicit heading overrides face-the-target
    double yaw_deg = 0.0;
    double yaw_error_deg = 0.0;  // applied on top of the face-target heading
};

struct GuidanceConfig {
    GuidanceParams params;
    double speed_ramp_s = 1.0;   // period over which the +k_a speed step is spread
    SigmaAnchor anchor = SigmaAnchor::Commanded;
    double max_sigma_lead = 0.6;  // [rad] windup clamp on commanded vs measured angles
};

struct ControlConfig {
    FovParams fov;
    double accel_horizon_s = 0.3;   // dt in the velocity-error acceleration
    double derivative_lpf_s = 0.1;  // first-order filter on the pixel-rate
                                    // estimate feeding the yaw PD (0 = off)
};

struct RatesConfig {
    double physics_hz = 500.0;
    double control_hz = 100.0;
};

struct SimConfig {
    double capture_radius_m = 0.08;
    double max_duration_s = 20.0;
    double fov_grace_s = 0.3;
    double transient_s = 1.0;          // floor; monitors use max(this, 10% of run)
    double monitor_min_range_m = 2.0;  // stability monitors disarm inside this range
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    ControllerKind controller = ControllerKind::Proposed;
    VehicleParams vehicle;
    InitialConfig initial;
    MotionModel target;
    CameraConfig camera;
    DkfParams dkf;
    GuidanceConfig guidance;
    ControlConfig control;
    WindModel wind;
    RatesConfig rates;
    SimConfig sim;

    double physics_dt() const { return 1.0 / rates.physics_hz; }
    double control_dt() const { return 1.0 / rates.control_hz; }
};

/// Parse a scenario from JSON text. Throws std::runtime_error with a field
/// path on any structural or range error; fills `warnings` with advisory
/// notes (gains outside recommended ranges etc.).
ScenarioConfig load_config(const std::string& json_text, std::vector<std::string>* warnings = nullptr);

ScenarioConfig load_config_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Serialize the effective configuration (defaults filled in).
std::string config_to_json(const ScenarioConfig& cfg);

/// Structural and range validation shared by load and the CLI.
void validate_config(const ScenarioConfig& cfg, std::vector<std::string>* warnings = nullptr);

}  // namespace ivsim
