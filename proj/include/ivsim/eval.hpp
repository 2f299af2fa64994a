// Monte Carlo experiment harness and metrics: CEP, quartile statistics of
// normalized image errors, and proposed-vs-pursuit comparison tables.
#pragma once

#include "ivsim/simloop.hpp"

#include <string>
#include <vector>

namespace ivsim {

// Target placement for the static suite: uniform range, azimuth about the
// nominal forward axis, altitude offset about the start altitude (clipped
// above ground), plus a bounded initial heading error.
struct TargetSampler {
    double range_min = 15.0;       // [m]
    double range_max = 35.0;
    double azimuth_max = deg_to_rad(60.0);    // [rad], symmetric
    double alt_offset_min = -9.0;  // [m]
    double alt_offset_max = 5.0;
    double min_altitude = 1.0;     // [m] above ground
    double yaw_error_max = deg_to_rad(15.0);  // [rad], symmetric
};

struct MonteCarloSpec {
    ScenarioConfig base;
    int runs = 50;
    TargetSampler sampler;
    bool randomize_targets = true;  // false reuses base.target in every run
    ControllerKind controller = ControllerKind::Proposed;
    std::uint64_t seed = 1;
};

struct AxisStats {
    double median = 0.0;
    double iqr = 0.0;
};

struct MonteCarloReport {
    std::vector<RunSummary> runs;
    double cep = 0.0;
    double mean_miss = 0.0;
    double median_miss = 0.0;
    double success_rate = 0.0;  // fraction with miss <= capture radius
    AxisStats image_u;          // normalized by half-width
    AxisStats image_v;          // normalized by half-height
    long l2_violations = 0;
    long lambda_violations = 0;
    long qdot_increases = 0;
};

/// Nearest-rank p-quantile: the ceil(p*n)-th smallest value. No
/// interpolation, so results are identical across platforms.
double nearest_rank(std::vector<double> values, double p);

/// Circular error probability: nearest-rank 50th percentile of miss distances.
double cep(const std::vector<double>& miss);

/// Median and IQR of normalized image-plane errors across runs, per axis.
/// Only in-view samples from the guided phase contribute.
void image_error_stats(const std::vector<std::vector<StepRecord>>& runs,
                       const CameraIntrinsics& cam, AxisStats* u_stats, AxisStats* v_stats);

/// Derive the i-th run of a suite from the spec (seed, target placement,
/// heading error). Exposed so callers can reproduce an individual run.
ScenarioConfig make_run_config(const MonteCarloSpec& spec, int index);

/// Run the suite with the given fan-out. The report is bit-identical for
/// any parallelism degree. Per-run records are returned when keep_records
/// is set (the acceptance suite inspects them).
MonteCarloReport montecarlo(const MonteCarloSpec& spec, int jobs,
                            std::vector<std::vector<StepRecord>>* records_out = nullptr);

std::string report_to_json(const MonteCarloReport& report);

struct CompareRow {
    std::string scenario;
    double miss_proposed = 0.0;
    double miss_pursuit = 0.0;
    double ratio = 0.0;       // proposed / pursuit
    bool ordering_ok = false;  // proposed < pursuit
};

/// Run both controllers on the same seeded scenarios and tabulate the miss
/// distances. Scenario pairs must share seeds; mismatches are an error.
std::vector<CompareRow> compare_table(const std::vector<std::pair<std::string, ScenarioConfig>>& scenarios);

std::string compare_to_json(const std::vector<CompareRow>& rows);
std::string compare_to_csv(const std::vector<CompareRow>& rows);

/// The three moving-target engagements used by the comparison experiments.
std::vector<std::pair<std::string, ScenarioConfig>> moving_target_scenarios(
    const ScenarioConfig& base);

}  // namespace ivsim
