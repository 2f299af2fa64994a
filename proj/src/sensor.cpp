#include "ivsim/sensor.hpp"

#include <cmath>
#include <stdexcept>

namespace ivsim {

Mat3 camera_mount_forward() {
    // columns are the camera axes in body coordinates:
    // x_c -> body x (right), y_c -> body -z (down), z_c -> body +y (forward)
    Mat3 m;
    m << 1.0, 0.0, 0.0,
         0.0, 0.0, 1.0,
         0.0, -1.0, 0.0;
    return m;
}

Mat3 camera_mount_down() {
    // optical axis along body -z, image x right, image y toward body -y
    Mat3 m;
    m << 1.0, 0.0, 0.0,
         0.0, -1.0, 0.0,
         0.0, 0.0, -1.0;
    return m;
}

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov_rad,
                                             const Mat3& mount) {
    if (!(hfov_rad > 0.0 && hfov_rad < kPi)) {
        throw std::invalid_argument("camera: horizontal FOV must be in (0, pi)");
    }
    CameraIntrinsics cam;
    cam.width = width;
    cam.height = height;
    cam.u0 = width / 2.0;
    cam.v0 = height / 2.0;
    cam.f_oc = (width / 2.0) / std::tan(hfov_rad / 2.0);
    cam.vfov = 2.0 * std::atan2(height / 2.0, cam.f_oc);
    cam.R_cb = mount;
    return cam;
}

PixelObservation project(const Vec3& p_t_earth, const VehicleState& vehicle,
                         const CameraIntrinsics& cam) {
    PixelObservation obs;
    obs.t_capture = vehicle.t;
    const Vec3 p_c = cam.R_cb.transpose() * vehicle.R_be.transpose() * (p_t_earth - vehicle.p);
    if (p_c.z() <= 0.0) {
        return obs;  // behind the camera
    }
    obs.u = cam.u0 + cam.f_oc * p_c.x() / p_c.z();
    obs.v = cam.v0 + cam.f_oc * p_c.y() / p_c.z();
    obs.valid = obs.u >= 0.0 && obs.u < cam.width && obs.v >= 0.0 && obs.v < cam.height;
    return obs;
}

PixelObservation add_pixel_noise(const PixelObservation& obs, const CameraIntrinsics& cam,
                                 double sigma_px, Rng& rng) {
    if (sigma_px < 0.0) {
        throw std::invalid_argument("add_pixel_noise: sigma must be >= 0");
    }
    if (!obs.valid || sigma_px == 0.0) {
        return obs;
    }
    PixelObservation noisy = obs;
    noisy.u += rng.gaussian(0.0, sigma_px);
    noisy.v += rng.gaussian(0.0, sigma_px);
    noisy.valid = noisy.u >= 0.0 && noisy.u < cam.width && noisy.v >= 0.0 && noisy.v < cam.height;
    return noisy;
}

Vec3 los_from_pixels(double e_x, double e_y, double f_oc, const Mat3& R_be,
                     const Mat3& R_cb) {
    const Vec3 ray(e_x, e_y, f_oc);
    return (R_be * R_cb * ray).normalized();
}

std::optional<PixelObservation> CameraSim::tick(double t, const Vec3& target_pos,
                                                const VehicleState& vehicle) {
    // capture every 1/rate seconds; frame times never drift because they are
    // computed from the frame index
    if (t + 1e-12 >= static_cast<double>(next_frame_) / rate_) {
        ++next_frame_;
        ++frames_captured_;
        PixelObservation obs = project(target_pos, vehicle, cam_);
        obs.t_capture = t;
        obs = add_pixel_noise(obs, cam_, sigma_px_, rng_);
        if (obs.valid) {
            ++frames_valid_;
            last_valid_capture_ = t;
        }
        pending_.push_back(obs);
    }
    if (!pending_.empty() && pending_.front().t_capture + latency_ <= t + 1e-12) {
        PixelObservation out = pending_.front();
        pending_.pop_front();
        return out;
    }
    return std::nullopt;
}

}  // namespace ivsim
