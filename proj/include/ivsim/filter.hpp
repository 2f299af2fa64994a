// Delayed Kalman filter on pixel position/velocity. Measurements arrive
// stamped in the past; the filter rewinds to the capture instant, applies a
// standard update, and replays predictions to the present, so the estimate
// stream is exactly what an in-time filter would have produced.
#pragma once

#include "ivsim/mathcore.hpp"
#include "ivsim/sensor.hpp"

#include <deque>

#include <Eigen/Dense>

namespace ivsim {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct DkfParams {
    double q_accel = 400.0;      // white-acceleration PSD [(px/s^2)^2 * s]
    double r_px = 2.25;          // measurement variance [px^2]
    double init_pos_sigma = 10.0;    // [px]
    double init_vel_sigma = 100.0;   // [px/s]
    double history_span = 0.2;   // [s]; >= 2x the worst expected latency
};

struct DkfEstimate {
    double e_x = 0.0;   // [px]
    double e_y = 0.0;
    double ed_x = 0.0;  // [px/s]
    double ed_y = 0.0;
};

class Dkf {
public:
    explicit Dkf(const DkfParams& params) : params_(params) {}

    bool initialized() const { return initialized_; }
    double time() const { return t_est_; }
    const Vec4& state() const { return x_; }
    const Mat4& covariance() const { return P_; }
    long skipped_updates() const { return skipped_; }

    /// Advance the estimate by dt and snapshot the result into the history ring.
    void predict(double dt);

    /// Apply a (possibly delayed) measurement. First valid observation
    /// initializes the filter at its capture time. Measurements older than
    /// the history span are counted and skipped.
    void update_delayed(const PixelObservation& z);

    /// Current-time estimate in error coordinates about the principal point.
    DkfEstimate estimate(const CameraIntrinsics& cam) const;

private:
    // post-update snapshots remember their measurement so a rewind can
    // re-apply everything that originally happened inside the replay window
    struct Snapshot {
        double t;
        Vec4 x;
        Mat4 P;
        bool has_meas = false;
        Vec2 z = Vec2::Zero();
    };

    void predict_in_place(double dt);
    void update_in_place(double u, double v);
    void trim_history();

    DkfParams params_;
    bool initialized_ = false;
    double t_est_ = 0.0;
    Vec4 x_ = Vec4::Zero();   // (u, v, u_dot, v_dot)
    Mat4 P_ = Mat4::Zero();
    std::deque<Snapshot> history_;
    long skipped_ = 0;
};

}  // namespace ivsim
