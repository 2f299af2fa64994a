#include "ivsim/filter.hpp"

#include <stdexcept>
#include <vector>

namespace ivsim {

namespace {

Mat4 transition(double dt) {
    Mat4 f = Mat4::Identity();
    f(0, 2) = dt;
    f(1, 3) = dt;
    return f;
}

Mat4 process_noise(double q, double dt) {
    const double d3 = q * dt * dt * dt / 3.0;
    const double d2 = q * dt * dt / 2.0;
    const double d1 = q * dt;
    Mat4 n = Mat4::Zero();
    n(0, 0) = d3;
    n(1, 1) = d3;
    n(0, 2) = d2;
    n(2, 0) = d2;
    n(1, 3) = d2;
    n(3, 1) = d2;
    n(2, 2) = d1;
    n(3, 3) = d1;
    return n;
}

}  // namespace

void Dkf::predict_in_place(double dt) {
    const Mat4 f = transition(dt);
    x_ = f * x_;
    P_ = f * P_ * f.transpose() + process_noise(params_.q_accel, dt);
    P_ = 0.5 * (P_ + P_.transpose());
    t_est_ += dt;
}

void Dkf::update_in_place(double u, double v) {
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    const Eigen::Matrix2d r = params_.r_px * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d s = h * P_ * h.transpose() + r;
    const Eigen::Matrix<double, 4, 2> k = P_ * h.transpose() * s.inverse();
    x_ += k * (Vec2(u, v) - h * x_);
    // Joseph form keeps P symmetric PSD over long runs
    const Mat4 ikh = Mat4::Identity() - k * h;
    P_ = ikh * P_ * ikh.transpose() + k * r * k.transpose();
    P_ = 0.5 * (P_ + P_.transpose());
}

void Dkf::trim_history() {
    while (!history_.empty() && history_.front().t < t_est_ - params_.history_span) {
        history_.pop_front();
    }
}

void Dkf::predict(double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dkf: predict dt must be positive");
    }
    if (!initialized_) {
        return;
    }
    predict_in_place(dt);
    history_.push_back({t_est_, x_, P_});
    trim_history();
}

void Dkf::update_delayed(const PixelObservation& z) {
    if (!z.valid) {
        return;
    }
    if (!initialized_) {
        x_ = Vec4(z.u, z.v, 0.0, 0.0);
        P_ = Mat4::Zero();
        P_(0, 0) = P_(1, 1) = params_.init_pos_sigma * params_.init_pos_sigma;
        P_(2, 2) = P_(3, 3) = params_.init_vel_sigma * params_.init_vel_sigma;
        t_est_ = z.t_capture;
        history_.clear();
        history_.push_back({t_est_, x_, P_});
        initialized_ = true;
        return;
    }
    if (z.t_capture > t_est_ + 1e-12) {
        // measurement from the future of the filter clock: advance to it
        predict_in_place(z.t_capture - t_est_);
        t_est_ = z.t_capture;
        update_in_place(z.u, z.v);
        history_.push_back({t_est_, x_, P_, true, Vec2(z.u, z.v)});
        trim_history();
        return;
    }
    if (history_.empty() || z.t_capture < history_.front().t - 1e-12) {
        ++skipped_;  // older than the buffer: latency exceeded the span
        return;
    }

    // rewind to the last snapshot at or before the capture time
    std::size_t idx = history_.size() - 1;
    while (history_[idx].t > z.t_capture + 1e-12) {
        --idx;
    }
    const double t_now = t_est_;
    const std::vector<Snapshot> tail(history_.begin() + static_cast<long>(idx) + 1,
                                     history_.end());
    x_ = history_[idx].x;
    P_ = history_[idx].P;
    t_est_ = history_[idx].t;
    history_.erase(history_.begin() + static_cast<long>(idx) + 1, history_.end());

    if (z.t_capture - t_est_ > 1e-12) {
        predict_in_place(z.t_capture - t_est_);
    }
    t_est_ = z.t_capture;
    update_in_place(z.u, z.v);
    history_.push_back({t_est_, x_, P_, true, Vec2(z.u, z.v)});

    // replay the original timeline, re-applying its measurements
    for (const Snapshot& s : tail) {
        if (s.t - t_est_ > 1e-12) {
            predict_in_place(s.t - t_est_);
        }
        t_est_ = s.t;
        if (s.has_meas) {
            update_in_place(s.z.x(), s.z.y());
        }
        history_.push_back({t_est_, x_, P_, s.has_meas, s.z});
    }
    if (t_now - t_est_ > 1e-12) {
        predict_in_place(t_now - t_est_);
        history_.push_back({t_est_, x_, P_, false, Vec2::Zero()});
    }
    t_est_ = t_now;
    trim_history();
}

DkfEstimate Dkf::estimate(const CameraIntrinsics& cam) const {
    if (!initialized_) {
        throw std::logic_error("dkf: estimate requested before first update");
    }
    DkfEstimate e;
    e.e_x = x_(0) - cam.u0;
    e.e_y = x_(1) - cam.v0;
    e.ed_x = x_(2);
    e.ed_y = x_(3);
    return e;
}

}  // namespace ivsim
