#include "ivsim/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ivsim {

using nlohmann::json;

std::string to_string(ControllerKind kind) {
    return kind == ControllerKind::Proposed ? "proposed" : "pg";
}

ControllerKind controller_from_string(const std::string& name) {
    if (name == "proposed") return ControllerKind::Proposed;
    if (name == "pg") return ControllerKind::Pursuit;
    throw std::runtime_error("controller must be \"proposed\" or \"pg\", got \"" + name + "\"");
}

CameraIntrinsics CameraConfig::intrinsics() const {
    const Mat3 m = mount == "down" ? camera_mount_down() : camera_mount_forward();
    return CameraIntrinsics::from_hfov(width, height, deg_to_rad(hfov_deg), m);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::runtime_error("config: " + path + ": " + why);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            fail(path.empty() ? key : path + "." + key, "unknown field");
        }
    }
}

double get_num(const json& obj, const std::string& path, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key, int dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<int>();
}

std::string get_str(const json& obj, const std::string& path, const std::string& key,
                    const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

Vec3 get_vec3(const json& obj, const std::string& path, const std::string& key, const Vec3& dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj[key];
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
        fail(path + "." + key, "expected an array of 3 numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

MotionModel parse_target(const json& obj) {
    check_keys(obj, "target",
               {"model", "position_m", "velocity_m_s", "accel_m_s2", "amplitude_m", "period_s",
                "drift_m_s"});
    MotionModel model;
    model.p0 = get_vec3(obj, "target", "position_m", {0.0, 25.0, 1.0});
    const std::string kind = get_str(obj, "target", "model", "static");
    if (kind == "static") {
        model.law = StaticModel{};
    } else if (kind == "cv") {
        model.law = ConstantVelocity{get_vec3(obj, "target", "velocity_m_s", {0.0, 0.0, 1.0})};
    } else if (kind == "ca") {
        model.law = ConstantAcceleration{get_vec3(obj, "target", "accel_m_s2", {0.8, 0.0, 0.2})};
    } else if (kind == "sm") {
        SinusoidalManeuver sm;
        sm.amplitude = get_num(obj, "target", "amplitude_m", 2.0);
        sm.period = get_num(obj, "target", "period_s", 14.0);
        sm.drift = get_num(obj, "target", "drift_m_s", 3.0);
        if (!(sm.period > 0.0)) fail("target.period_s", "must be positive");
        model.law = sm;
    } else {
        fail("target.model", "must be one of static/cv/ca/sm");
    }
    return model;
}

json target_to_json(const MotionModel& model) {
    json obj;
    obj["position_m"] = {model.p0.x(), model.p0.y(), model.p0.z()};
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, StaticModel>) {
                obj["model"] = "static";
            } else if constexpr (std::is_same_v<T, ConstantVelocity>) {
                obj["model"] = "cv";
                obj["velocity_m_s"] = {law.v.x(), law.v.y(), law.v.z()};
            } else if constexpr (std::is_same_v<T, ConstantAcceleration>) {
                obj["model"] = "ca";
                obj["accel_m_s2"] = {law.a.x(), law.a.y(), law.a.z()};
            } else if constexpr (std::is_same_v<T, SinusoidalManeuver>) {
                obj["model"] = "sm";
                obj["amplitude_m"] = law.amplitude;
                obj["period_s"] = law.period;
                obj["drift_m_s"] = law.drift;
            }
        },
        model.law);
    return obj;
}

}  // namespace

ScenarioConfig load_config(const std::string& json_text, std::vector<std::string>* warnings) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw std::runtime_error("config: top level must be an object");
    }
    check_keys(root, "",
               {"seed", "controller", "vehicle", "initial", "target", "camera", "dkf", "guidance",
                "control", "wind", "rates", "sim"});

    ScenarioConfig cfg;
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) fail("seed", "expected an unsigned integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    cfg.controller = controller_from_string(get_str(root, "", "controller", "proposed"));

    {
        const json obj = root.value("vehicle", json::object());
        check_keys(obj, "vehicle",
                   {"mass_kg", "f_max_n", "omega_max_rad_s", "tau_omega_s", "v_max_m_s",
                    "a_max_m_s2"});
        cfg.vehicle.mass = get_num(obj, "vehicle", "mass_kg", cfg.vehicle.mass);
        cfg.vehicle.f_max = get_num(obj, "vehicle", "f_max_n", cfg.vehicle.f_max);
        cfg.vehicle.omega_max = get_num(obj, "vehicle", "omega_max_rad_s", cfg.vehicle.omega_max);
        cfg.vehicle.tau_omega = get_num(obj, "vehicle", "tau_omega_s", cfg.vehicle.tau_omega);
        cfg.vehicle.v_max = get_num(obj, "vehicle", "v_max_m_s", cfg.vehicle.v_max);
        cfg.vehicle.a_max = get_num(obj, "vehicle", "a_max_m_s2", cfg.vehicle.a_max);
    }
    {
        const json obj = root.value("initial", json::object());
        check_keys(obj, "initial", {"position_m", "yaw_deg", "yaw_error_deg"});
        cfg.initial.position = get_vec3(obj, "initial", "position_m", cfg.initial.position);
        if (obj.contains("yaw_deg")) {
            cfg.initial.has_yaw = true;
            cfg.initial.yaw_deg = get_num(obj, "initial", "yaw_deg", 0.0);
        }
        cfg.initial.yaw_error_deg = get_num(obj, "initial", "yaw_error_deg", 0.0);
    }
    if (root.contains("target")) {
        cfg.target = parse_target(root["target"]);
    } else {
        cfg.target.p0 = Vec3(0.0, 25.0, 1.0);
        cfg.target.law = StaticModel{};
    }
    {
        const json obj = root.value("camera", json::object());
        check_keys(obj, "camera",
                   {"width_px", "height_px", "hfov_deg", "rate_hz", "latency_s", "pixel_noise_px",
                    "mount"});
        cfg.camera.width = get_int(obj, "camera", "width_px", cfg.camera.width);
        cfg.camera.height = get_int(obj, "camera", "height_px", cfg.camera.height);
        cfg.camera.hfov_deg = get_num(obj, "camera", "hfov_deg", cfg.camera.hfov_deg);
        cfg.camera.rate_hz = get_num(obj, "camera", "rate_hz", cfg.camera.rate_hz);
        cfg.camera.latency_s = get_num(obj, "camera", "latency_s", cfg.camera.latency_s);
        cfg.camera.pixel_noise_px = get_num(obj, "camera", "pixel_noise_px", cfg.camera.pixel_noise_px);
        cfg.camera.mount = get_str(obj, "camera", "mount", cfg.camera.mount);
        if (cfg.camera.mount != "forward" && cfg.camera.mount != "down") {
            fail("camera.mount", "must be \"forward\" or \"down\"");
        }
    }
    {
        const json obj = root.value("dkf", json::object());
        check_keys(obj, "dkf",
                   {"q_accel", "r_px2", "init_pos_sigma_px", "init_vel_sigma_px_s"});
        cfg.dkf.q_accel = get_num(obj, "dkf", "q_accel", cfg.dkf.q_accel);
        cfg.dkf.r_px = get_num(obj, "dkf", "r_px2", cfg.dkf.r_px);
        cfg.dkf.init_pos_sigma = get_num(obj, "dkf", "init_pos_sigma_px", cfg.dkf.init_pos_sigma);
        cfg.dkf.init_vel_sigma = get_num(obj, "dkf", "init_vel_sigma_px_s", cfg.dkf.init_vel_sigma);
    }
    {
        const json obj = root.value("guidance", json::object());
        check_keys(obj, "guidance",
                   {"nav_gain_y", "nav_gain_z", "k_a_m_s", "v_cap_m_s", "speed_ramp_s",
                    "sigma_anchor", "max_sigma_lead_rad"});
        cfg.guidance.params.nav_gain_y = get_num(obj, "guidance", "nav_gain_y", 3.0);
        cfg.guidance.params.nav_gain_z = get_num(obj, "guidance", "nav_gain_z", 3.0);
        cfg.guidance.params.k_a = get_num(obj, "guidance", "k_a_m_s", 2.0);
        cfg.guidance.params.v_cap = get_num(obj, "guidance", "v_cap_m_s", 8.0);
        cfg.guidance.speed_ramp_s = get_num(obj, "guidance", "speed_ramp_s", 1.0);
        const std::string anchor = get_str(obj, "guidance", "sigma_anchor", "commanded");
        if (anchor == "commanded") {
            cfg.guidance.anchor = SigmaAnchor::Commanded;
        } else if (anchor == "measured") {
            cfg.guidance.anchor = SigmaAnchor::Measured;
        } else {
            fail("guidance.sigma_anchor", "must be \"commanded\" or \"measured\"");
        }
        cfg.guidance.max_sigma_lead = get_num(obj, "guidance", "max_sigma_lead_rad", 0.6);
    }
    {
        const json obj = root.value("control", json::object());
        check_keys(obj, "control",
                   {"k_p", "k_d", "epsilon_px", "accel_horizon_s", "derivative_lpf_s"});
        cfg.control.fov.k_p = get_num(obj, "control", "k_p", cfg.control.fov.k_p);
        cfg.control.fov.k_d = get_num(obj, "control", "k_d", cfg.control.fov.k_d);
        cfg.control.fov.epsilon_px = get_num(obj, "control", "epsilon_px", cfg.control.fov.epsilon_px);
        cfg.control.accel_horizon_s = get_num(obj, "control", "accel_horizon_s", cfg.control.accel_horizon_s);
        cfg.control.derivative_lpf_s =
            get_num(obj, "control", "derivative_lpf_s", cfg.control.derivative_lpf_s);
        if (cfg.control.derivative_lpf_s < 0.0) {
            fail("control.derivative_lpf_s", "must be >= 0");
        }
    }
    {
        const json obj = root.value("wind", json::object());
        check_keys(obj, "wind",
                   {"mean_m_s", "gust_std_m_s", "corr_time_s", "drag_vehicle", "drag_target"});
        cfg.wind.mean = get_vec3(obj, "wind", "mean_m_s", cfg.wind.mean);
        cfg.wind.gust_std = get_num(obj, "wind", "gust_std_m_s", cfg.wind.gust_std);
        cfg.wind.corr_time = get_num(obj, "wind", "corr_time_s", cfg.wind.corr_time);
        cfg.wind.drag_vehicle = get_num(obj, "wind", "drag_vehicle", cfg.wind.drag_vehicle);
        cfg.wind.drag_target = get_num(obj, "wind", "drag_target", cfg.wind.drag_target);
    }
    {
        const json obj = root.value("rates", json::object());
        check_keys(obj, "rates", {"physics_hz", "control_hz"});
        cfg.rates.physics_hz = get_num(obj, "rates", "physics_hz", cfg.rates.physics_hz);
        cfg.rates.control_hz = get_num(obj, "rates", "control_hz", cfg.rates.control_hz);
    }
    {
        const json obj = root.value("sim", json::object());
        check_keys(obj, "sim",
                   {"capture_radius_m", "max_duration_s", "fov_grace_s", "transient_s",
                    "monitor_min_range_m"});
        cfg.sim.capture_radius_m = get_num(obj, "sim", "capture_radius_m", cfg.sim.capture_radius_m);
        cfg.sim.max_duration_s = get_num(obj, "sim", "max_duration_s", cfg.sim.max_duration_s);
        cfg.sim.fov_grace_s = get_num(obj, "sim", "fov_grace_s", cfg.sim.fov_grace_s);
        cfg.sim.transient_s = get_num(obj, "sim", "transient_s", cfg.sim.transient_s);
        cfg.sim.monitor_min_range_m =
            get_num(obj, "sim", "monitor_min_range_m", cfg.sim.monitor_min_range_m);
    }

    // history must cover the rewind window with margin
    cfg.dkf.history_span = std::max(cfg.dkf.history_span, 2.0 * cfg.camera.latency_s);

    validate_config(cfg, warnings);
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return load_config(buf.str(), warnings);
}

void validate_config(const ScenarioConfig& cfg, std::vector<std::string>* warnings) {
    const auto& v = cfg.vehicle;
    if (!(v.mass > 0.0 && v.f_max > 0.0 && v.omega_max > 0.0 && v.tau_omega > 0.0 &&
          v.v_max > 0.0 && v.a_max > 0.0)) {
        throw std::runtime_error("config: vehicle parameters must all be positive");
    }
    if (v.f_max / v.mass < kGravity) {
        throw std::runtime_error("config: vehicle cannot hover (f_max/mass < g)");
    }
    if (!(cfg.camera.rate_hz > 0.0) || cfg.camera.latency_s < 0.0 ||
        cfg.camera.pixel_noise_px < 0.0) {
        throw std::runtime_error("config: camera rate/latency/noise out of range");
    }
    if (!(cfg.camera.hfov_deg > 0.0 && cfg.camera.hfov_deg < 180.0)) {
        throw std::runtime_error("config: camera.hfov_deg must be in (0, 180)");
    }
    if (!(cfg.dkf.q_accel > 0.0 && cfg.dkf.r_px > 0.0)) {
        throw std::runtime_error("config: dkf noise parameters must be positive");
    }
    if (!(cfg.rates.physics_hz >= cfg.rates.control_hz &&
          cfg.rates.control_hz >= cfg.camera.rate_hz)) {
        throw std::runtime_error("config: require physics_hz >= control_hz >= camera rate_hz");
    }
    const double ratio = cfg.rates.physics_hz / cfg.rates.control_hz;
    if (std::abs(ratio - std::round(ratio)) > 1e-9) {
        throw std::runtime_error("config: physics_hz must be an integer multiple of control_hz");
    }
    if (!(cfg.sim.capture_radius_m > 0.0)) {
        throw std::runtime_error("config: sim.capture_radius_m must be positive");
    }
    if (!(cfg.sim.max_duration_s > 0.0)) {
        throw std::runtime_error("config: sim.max_duration_s must be positive");
    }
    if (!(cfg.guidance.params.v_cap > 0.0)) {
        throw std::runtime_error("config: guidance.v_cap_m_s must be positive");
    }
    if (!(cfg.guidance.speed_ramp_s > 0.0) || !(cfg.control.accel_horizon_s > 0.0)) {
        throw std::runtime_error("config: guidance.speed_ramp_s and control.accel_horizon_s must be positive");
    }
    if (!(cfg.control.fov.k_p > 0.0 && cfg.control.fov.k_d > 0.0)) {
        throw std::runtime_error("config: control.k_p and control.k_d must be positive");
    }
    if (!(cfg.wind.corr_time > 0.0) || cfg.wind.gust_std < 0.0) {
        throw std::runtime_error("config: wind.corr_time_s must be positive and gust_std_m_s >= 0");
    }

    if (warnings) {
        const auto warn_gain = [&](double k, const char* name) {
            if (k < 2.0 || k > 6.0) {
                warnings->push_back(std::string(name) +
                                    " outside the recommended [2, 6] range");
            }
        };
        warn_gain(cfg.guidance.params.nav_gain_y, "guidance.nav_gain_y");
        warn_gain(cfg.guidance.params.nav_gain_z, "guidance.nav_gain_z");
        if (cfg.guidance.params.k_a < 1.0 || cfg.guidance.params.k_a > 3.0) {
            warnings->push_back("guidance.k_a_m_s outside the recommended [1, 3] range");
        }
    }
}

std::string config_to_json(const ScenarioConfig& cfg) {
    json root;
    root["seed"] = cfg.seed;
    root["controller"] = to_string(cfg.controller);
    root["vehicle"] = {{"mass_kg", cfg.vehicle.mass},
                       {"f_max_n", cfg.vehicle.f_max},
                       {"omega_max_rad_s", cfg.vehicle.omega_max},
                       {"tau_omega_s", cfg.vehicle.tau_omega},
                       {"v_max_m_s", cfg.vehicle.v_max},
                       {"a_max_m_s2", cfg.vehicle.a_max}};
    json initial;
    initial["position_m"] = {cfg.initial.position.x(), cfg.initial.position.y(),
                             cfg.initial.position.z()};
    if (cfg.initial.has_yaw) {
        initial["yaw_deg"] = cfg.initial.yaw_deg;
    }
    initial["yaw_error_deg"] = cfg.initial.yaw_error_deg;
    root["initial"] = initial;
    root["target"] = target_to_json(cfg.target);
    root["camera"] = {{"width_px", cfg.camera.width},
                      {"height_px", cfg.camera.height},
                      {"hfov_deg", cfg.camera.hfov_deg},
                      {"rate_hz", cfg.camera.rate_hz},
                      {"latency_s", cfg.camera.latency_s},
                      {"pixel_noise_px", cfg.camera.pixel_noise_px},
                      {"mount", cfg.camera.mount}};
    root["dkf"] = {{"q_accel", cfg.dkf.q_accel},
                   {"r_px2", cfg.dkf.r_px},
                   {"init_pos_sigma_px", cfg.dkf.init_pos_sigma},
                   {"init_vel_sigma_px_s", cfg.dkf.init_vel_sigma}};
    root["guidance"] = {{"nav_gain_y", cfg.guidance.params.nav_gain_y},
                        {"nav_gain_z", cfg.guidance.params.nav_gain_z},
                        {"k_a_m_s", cfg.guidance.params.k_a},
                        {"v_cap_m_s", cfg.guidance.params.v_cap},
                        {"speed_ramp_s", cfg.guidance.speed_ramp_s},
                        {"sigma_anchor",
                         cfg.guidance.anchor == SigmaAnchor::Commanded ? "commanded" : "measured"},
                        {"max_sigma_lead_rad", cfg.guidance.max_sigma_lead}};
    root["control"] = {{"k_p", cfg.control.fov.k_p},
                       {"k_d", cfg.control.fov.k_d},
                       {"epsilon_px", cfg.control.fov.epsilon_px},
                       {"accel_horizon_s", cfg.control.accel_horizon_s},
                       {"derivative_lpf_s", cfg.control.derivative_lpf_s}};
    root["wind"] = {{"mean_m_s", {cfg.wind.mean.x(), cfg.wind.mean.y(), cfg.wind.mean.z()}},
                    {"gust_std_m_s", cfg.wind.gust_std},
                    {"corr_time_s", cfg.wind.corr_time},
                    {"drag_vehicle", cfg.wind.drag_vehicle},
                    {"drag_target", cfg.wind.drag_target}};
    root["rates"] = {{"physics_hz", cfg.rates.physics_hz}, {"control_hz", cfg.rates.control_hz}};
    root["sim"] = {{"capture_radius_m", cfg.sim.capture_radius_m},
                   {"max_duration_s", cfg.sim.max_duration_s},
                   {"fov_grace_s", cfg.sim.fov_grace_s},
                   {"transient_s", cfg.sim.transient_s},
                   {"monitor_min_range_m", cfg.sim.monitor_min_range_m}};
    return root.dump(2) + "\n";
}

}  // namespace ivsim
