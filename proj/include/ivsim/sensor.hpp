// Synthetic strapdown camera: pinhole projection of the target centroid,
// detector noise, frame-rate/latency scheduling, and LOS reconstruction
// from pixel errors.
#pragma once

#include "ivsim/dynamics.hpp"
#include "ivsim/mathcore.hpp"
#include "ivsim/rng.hpp"

#include <deque>
#include <optional>

namespace ivsim {

// Camera axes: x right in image, y down in image, z along the optical axis.
// The forward mount aligns the optical axis with body +y.
Mat3 camera_mount_forward();
Mat3 camera_mount_down();

struct CameraIntrinsics {
    double f_oc = 0.0;    // focal length [px]
    double u0 = 320.0;    // principal point [px]
    double v0 = 240.0;
    int width = 640;
    int height = 480;
    double vfov = 0.0;    // vertical field of view [rad]
    Mat3 R_cb = camera_mount_forward();  // camera -> body

    /// Derive focal length and vertical FOV from a horizontal FOV.
    static CameraIntrinsics from_hfov(int width, int height, double hfov_rad,
                                      const Mat3& mount = camera_mount_forward());
};

struct PixelObservation {
    double u = 0.0;
    double v = 0.0;
    double t_capture = 0.0;
    bool valid = false;

    double e_x(const CameraIntrinsics& cam) const { return u - cam.u0; }
    double e_y(const CameraIntrinsics& cam) const { return v - cam.v0; }
};

/// Pinhole projection of an earth-frame point through the vehicle-mounted
/// camera. Points behind the camera or outside the image are invalid.
PixelObservation project(const Vec3& p_t_earth, const VehicleState& vehicle,
                         const CameraIntrinsics& cam);

/// i.i.d. Gaussian pixel jitter; validity re-checked against image bounds.
PixelObservation add_pixel_noise(const PixelObservation& obs, const CameraIntrinsics& cam,
                                 double sigma_px, Rng& rng);

/// Earth-frame unit LOS from pixel errors: R_be * R_cb * [e_x e_y f]^T, normalized.
Vec3 los_from_pixels(double e_x, double e_y, double f_oc, const Mat3& R_be,
                     const Mat3& R_cb);

/// Frame scheduler plus FIFO latency queue. Frames are captured every
/// 1/rate seconds and become visible latency seconds later, in order.
class CameraSim {
public:
    CameraSim(const CameraIntrinsics& cam, double rate_hz, double latency_s,
              double sigma_px, std::uint64_t noise_seed)
        : cam_(cam), rate_(rate_hz), latency_(latency_s), sigma_px_(sigma_px),
          rng_(noise_seed) {}

    /// Call with nondecreasing t. Captures a frame when one is due (counted
    /// even if the target is out of view) and releases at most one matured
    /// observation, oldest first.
    std::optional<PixelObservation> tick(double t, const Vec3& target_pos,
                                         const VehicleState& vehicle);

    const CameraIntrinsics& intrinsics() const { return cam_; }
    long frames_captured() const { return frames_captured_; }
    long frames_valid() const { return frames_valid_; }
    /// Capture time of the most recent valid frame, or nullopt if none yet.
    std::optional<double> last_valid_capture() const { return last_valid_capture_; }

private:
    CameraIntrinsics cam_;
    double rate_;
    double latency_;
    double sigma_px_;
    Rng rng_;
    std::deque<PixelObservation> pending_;
    long next_frame_ = 0;
    long frames_captured_ = 0;
    long frames_valid_ = 0;
    std::optional<double> last_valid_capture_;
};

}  // namespace ivsim
