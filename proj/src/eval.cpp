#include "ivsim/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ivsim {

double nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) {
        throw std::invalid_argument("nearest_rank: empty sample");
    }
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::max<std::size_t>(rank, 1);
    rank = std::min<std::size_t>(rank, values.size());
    return values[rank - 1];
}

double cep(const std::vector<double>& miss) {
    return nearest_rank(miss, 0.5);
}

void image_error_stats(const std::vector<std::vector<StepRecord>>& runs,
                       const CameraIntrinsics& cam, AxisStats* u_stats, AxisStats* v_stats) {
    std::vector<double> us, vs;
    for (const auto& records : runs) {
        for (const StepRecord& r : records) {
            if (r.guided && r.fov_valid) {
                us.push_back(r.e_x_true / (cam.width / 2.0));
                vs.push_back(r.e_y_true / (cam.height / 2.0));
            }
        }
    }
    if (us.empty()) {
        throw std::invalid_argument("image_error_stats: no valid observations");
    }
    u_stats->median = nearest_rank(us, 0.5);
    u_stats->iqr = nearest_rank(us, 0.75) - nearest_rank(us, 0.25);
    v_stats->median = nearest_rank(vs, 0.5);
    v_stats->iqr = nearest_rank(vs, 0.75) - nearest_rank(vs, 0.25);
}

ScenarioConfig make_run_config(const MonteCarloSpec& spec, int index) {
    ScenarioConfig cfg = spec.base;
    cfg.controller = spec.controller;
    cfg.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index));
    Rng rng(derive_seed(cfg.seed, 0));
    if (spec.randomize_targets) {
        const TargetSampler& s = spec.sampler;
        const double range = rng.uniform(s.range_min, s.range_max);
        const double az = rng.uniform(-s.azimuth_max, s.azimuth_max);
        const double dz = rng.uniform(s.alt_offset_min, s.alt_offset_max);
        const Vec3 start = cfg.initial.position;
        const double horiz = std::sqrt(std::max(range * range - dz * dz, 1.0));
        Vec3 target(start.x() + horiz * std::sin(az), start.y() + horiz * std::cos(az),
                    std::max(start.z() + dz, s.min_altitude));
        cfg.target.p0 = target;
        cfg.target.law = StaticModel{};
        cfg.initial.has_yaw = false;
        cfg.initial.yaw_error_deg = rad_to_deg(rng.uniform(-s.yaw_error_max, s.yaw_error_max));
    }
    return cfg;
}

MonteCarloReport montecarlo(const MonteCarloSpec& spec, int jobs,
                            std::vector<std::vector<StepRecord>>* records_out) {
    if (spec.runs < 1) {
        throw std::invalid_argument("montecarlo: need at least one run");
    }
    jobs = std::max(1, jobs);

    std::vector<RunSummary> summaries(spec.runs);
    std::vector<std::vector<StepRecord>> records(spec.runs);
    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (int i = next.fetch_add(1); i < spec.runs; i = next.fetch_add(1)) {
            RunResult res = run_scenario(make_run_config(spec, i));
            summaries[i] = std::move(res.summary);
            records[i] = std::move(res.records);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    MonteCarloReport rep;
    std::vector<double> miss;
    miss.reserve(summaries.size());
    double sum = 0.0;
    long successes = 0;
    for (const RunSummary& s : summaries) {
        miss.push_back(s.miss_distance);
        sum += s.miss_distance;
        if (s.miss_distance <= spec.base.sim.capture_radius_m) {
            ++successes;
        }
        rep.l2_violations += s.monitors.l2_violations;
        rep.lambda_violations += s.monitors.lambda_violations;
        rep.qdot_increases += s.monitors.qdot_increases;
    }
    rep.cep = cep(miss);
    rep.mean_miss = sum / static_cast<double>(miss.size());
    rep.median_miss = nearest_rank(miss, 0.5);
    rep.success_rate = static_cast<double>(successes) / static_cast<double>(summaries.size());
    image_error_stats(records, spec.base.camera.intrinsics(), &rep.image_u, &rep.image_v);
    rep.runs = std::move(summaries);
    if (records_out) {
        *records_out = std::move(records);
    }
    return rep;
}

std::string report_to_json(const MonteCarloReport& rep) {
    nlohmann::json j;
    j["cep_m"] = rep.cep;
    j["mean_miss_m"] = rep.mean_miss;
    j["median_miss_m"] = rep.median_miss;
    j["success_rate"] = rep.success_rate;
    j["image_error"] = {{"u_median", rep.image_u.median},
                        {"u_iqr", rep.image_u.iqr},
                        {"v_median", rep.image_v.median},
                        {"v_iqr", rep.image_v.iqr}};
    j["violations"] = {{"l2", rep.l2_violations},
                       {"lambda", rep.lambda_violations},
                       {"qdot_increases", rep.qdot_increases}};
    nlohmann::json runs = nlohmann::json::array();
    for (const RunSummary& s : rep.runs) {
        runs.push_back(nlohmann::json::parse(summary_to_json(s)));
    }
    j["runs"] = runs;
    return j.dump(2) + "\n";
}

std::vector<CompareRow> compare_table(
    const std::vector<std::pair<std::string, ScenarioConfig>>& scenarios) {
    std::vector<CompareRow> rows;
    for (const auto& [name, cfg] : scenarios) {
        ScenarioConfig proposed = cfg;
        proposed.controller = ControllerKind::Proposed;
        ScenarioConfig pursuit = cfg;
        pursuit.controller = ControllerKind::Pursuit;
        if (proposed.seed != pursuit.seed) {
            throw std::logic_error("compare_table: controllers must share seeds");
        }
        CompareRow row;
        row.scenario = name;
        row.miss_proposed = run_scenario(proposed).summary.miss_distance;
        row.miss_pursuit = run_scenario(pursuit).summary.miss_distance;
        row.ratio = row.miss_pursuit > 0.0 ? row.miss_proposed / row.miss_pursuit
                                           : std::numeric_limits<double>::infinity();
        row.ordering_ok = row.miss_proposed < row.miss_pursuit;
        rows.push_back(row);
    }
    return rows;
}

std::string compare_to_json(const std::vector<CompareRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const CompareRow& r : rows) {
        j.push_back({{"scenario", r.scenario},
                     {"miss_proposed_m", r.miss_proposed},
                     {"miss_pg_m", r.miss_pursuit},
                     {"ratio", r.ratio},
                     {"ordering_ok", r.ordering_ok}});
    }
    return j.dump(2) + "\n";
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
    std::string out = "scenario,miss_proposed_m,miss_pg_m,ratio,ordering_ok\r\n";
    char buf[64];
    for (const CompareRow& r : rows) {
        out += r.scenario;
        std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g,", r.miss_proposed, r.miss_pursuit,
                      r.ratio);
        out += buf;
        out += r.ordering_ok ? '1' : '0';
        out += "\r\n";
    }
    return out;
}

std::vector<std::pair<std::string, ScenarioConfig>> moving_target_scenarios(
    const ScenarioConfig& base) {
    std::vector<std::pair<std::string, ScenarioConfig>> out;

    ScenarioConfig cv = base;
    cv.target.p0 = Vec3(0.0, 25.0, 1.0);
    cv.target.law = ConstantVelocity{Vec3(0.0, 0.0, 1.0)};
    out.emplace_back("cv", cv);

    ScenarioConfig ca = base;
    ca.target.p0 = Vec3(-8.0, 15.0, 8.0);
    ca.target.law = ConstantAcceleration{Vec3(0.8, 0.0, 0.2)};
    out.emplace_back("ca", ca);

    ScenarioConfig sm = base;
    sm.target.p0 = Vec3(0.0, 30.0, 10.0);
    sm.target.law = SinusoidalManeuver{2.0, 14.0, 3.0};
    out.emplace_back("sm", sm);

    return out;
}

}  // namespace ivsim
