// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "images.hpp"
#include "oracles.hpp"
#include "pitchtrack/assignment.hpp"
#include "pitchtrack/experiment.hpp"
#include "pitchtrack/metrics.hpp"
#include "pitchtrack/motion.hpp"
#include "pitchtrack/mot_io.hpp"
#include "pitchtrack/reference_values.hpp"
#include "pitchtrack/rng.hpp"
#include "pitchtrack/simulate.hpp"
#include "scenes.hpp"

using namespace pitchtrack;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<std::uint64_t> seed_list(std::uint64_t n) {
    std::vector<std::uint64_t> s;
    for (std::uint64_t i = 1; i <= n; ++i) s.push_back(i);
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
    return files;
}

Outcome assignment_oracle() {
    const auto t0 = Clock::now();
    Rng rng(101);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + rng.below(7);
        const std::size_t cols = 1 + rng.below(7);
        std::vector<std::vector<double>> c(rows, std::vector<double>(cols));
        CostMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                c[i][j] = static_cast<double>(rng.below(1000)) - 200.0;
                m(i, j) = c[i][j];
            }
        }
        const AssignmentResult r = solve_assignment(m);
        if (r.total_cost != oracle::min_assignment_cost(c) || r.pairs.size() != std::min(rows, cols)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 5.0, fmt::format("{} of 200 matrices differ, {:.2f} s", mismatches, secs)};
}

Outcome metrics_oracle() {
    int mismatches = 0;
    int scenes_run = 0;
    for (std::uint64_t seed = 1; scenes_run < 50; ++seed) {
        const scenes::Scene s = scenes::random_scene(seed);
        const oracle::Clear o = oracle::clear_mot(s.gt, s.hyp, 0.5);
        if (o.gt_total == 0) continue;
        ++scenes_run;
        const MetricsReport r = evaluate(s.gt, s.hyp, 0.5);
        const bool same = r.fp == o.fp && r.fn == o.fn && r.idsw == o.idsw && r.gt_total == o.gt_total &&
                          r.matches_total == o.matches && std::abs(r.mota - o.mota) <= 1e-9 &&
                          std::abs(r.motp - o.motp) <= 1e-9;
        if (!same) ++mismatches;
    }
    return {mismatches == 0, fmt::format("{} of {} scenes differ", mismatches, scenes_run)};
}

Outcome ecc_recovery() {
    const auto t0 = Clock::now();
    Rng rng(303);
    double worst_t = 0.0;
    double worst_theta = 0.0;
    int max_iter = 0;
    for (int k = 0; k < 100; ++k) {
        const std::uint64_t pattern = 1000 + k;
        const double radius = 5.0 * std::sqrt(rng.uniform());
        const double dir = rng.uniform(0.0, 2 * std::numbers::pi);
        const double dx = radius * std::cos(dir);
        const double dy = radius * std::sin(dir);
        const GrayImage tmpl = images::smooth_image(64, pattern);
        const EccResult tr = ecc_align(tmpl, images::smooth_image(64, pattern, dx, dy), WarpKind::translation);
        worst_t = std::max({worst_t, std::abs(tr.warp.tx + dx), std::abs(tr.warp.ty + dy)});
        max_iter = std::max(max_iter, tr.iterations);

        const double rot = rng.uniform(-0.1, 0.1);
        const EccResult er = ecc_align(tmpl, images::smooth_image(64, pattern, 0.0, 0.0, rot), WarpKind::euclidean);
        worst_theta = std::max(worst_theta, std::abs(er.warp.theta + rot));
        max_iter = std::max(max_iter, er.iterations);
    }
    const double secs = seconds_since(t0);
    return {worst_t <= 0.1 && worst_theta <= 0.005 && max_iter <= 50 && secs < 10.0,
            fmt::format("worst translation error {:.4f} px, worst rotation error {:.5f} rad, max {} iterations, "
                        "{:.2f} s",
                        worst_t, worst_theta, max_iter, secs)};
}

Outcome calibration_fidelity() {
    constexpr int kSeeds = 20;
    std::map<CellKey, std::pair<double, double>> sums;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        ScenarioConfig sc;
        sc.seed = seed;
        sc.render_backgrounds = false;
        const GroundTruth gt = generate_scenario(sc);
        const TrackFrames truth = gt.frames();
        const ProfileGrid grid = default_profile_grid(gt, 0);
        for (const auto& [cell, profile] : grid) {
            const auto tag = 4 * reference::index(cell.second) + reference::index(cell.first);
            const DetectionScore s = detection_pr(truth, degrade(gt, profile, mix_seed(seed, 0x900 + tag)));
            sums[cell].first += s.recall;
            sums[cell].second += s.precision;
        }
    }
    double worst = 0.0;
    std::string worst_cell;
    std::string examples;
    for (const auto& [cell, sum] : sums) {
        const auto qi = reference::index(cell.second);
        const auto di = reference::index(cell.first);
        const double recall = 100.0 * sum.first / kSeeds;
        const double precision = 100.0 * sum.second / kSeeds;
        const double err = std::max(std::abs(recall - reference::kRecall[qi][di]),
                                    std::abs(precision - reference::kPrecision[qi][di]));
        if (err > worst) {
            worst = err;
            worst_cell = fmt::format("{}/{}", to_string(cell.first), to_string(cell.second));
        }
        if ((cell == CellKey{DetectorModel::normal, Quality::n}) || (cell == CellKey{DetectorModel::q50, Quality::q50}) ||
            (cell == CellKey{DetectorModel::original, Quality::q50})) {
            examples += fmt::format(" {}/{}={:.1f}/{:.1f}", to_string(cell.first), to_string(cell.second), recall,
                                    precision);
        }
    }
    return {sums.size() == 12 && worst <= 0.5,
            fmt::format("worst deviation {:.3f} pp at {};{}", worst, worst_cell, examples)};
}

Outcome reid_benefit() {
    ExperimentConfig config;
    config.scenario.n_frames = reference::kSequenceFrames[2];
    config.scenario.occlusion_bias = 1.0;
    config.experiment.seeds = seed_list(20);
    GridOptions options;
    options.qualities = {Quality::q50};
    options.detectors = {DetectorModel::q50};
    const GridResult r = run_grid(config, options);
    double on = 0.0, off = 0.0;
    for (std::uint64_t s : config.experiment.seeds) {
        on += r.cell(s, Quality::q50, ReidSetting::q50, DetectorModel::q50).report.mota;
        off += r.cell(s, Quality::q50, ReidSetting::without, DetectorModel::q50).report.mota;
    }
    const double diff = 100.0 * (on - off) / static_cast<double>(config.experiment.seeds.size());
    return {diff >= 0.5 && diff <= 5.0,
            fmt::format("MOTA with ReID {:.2f}, without {:.2f}, difference {:+.2f} pp", 100.0 * on / 20.0,
                        100.0 * off / 20.0, diff)};
}

struct FullGrid {
    std::vector<MotaTable> mota;
    std::vector<DetectorTable> detectors;
};

FullGrid full_grid_20() {
    ExperimentConfig config;
    config.scenario.n_frames = reference::kSequenceFrames[2];
    config.experiment.seeds = seed_list(20);
    const GridResult r = run_grid(config);
    return {mota_tables(r), detector_tables(r)};
}

Outcome quality_monotonicity(const FullGrid& g) {
    std::vector<std::string> violations;
    for (std::size_t ri = 0; ri < kReidSettings.size(); ++ri) {
        for (DetectorModel d : {DetectorModel::normal, DetectorModel::q40, DetectorModel::q50}) {
            const auto di = reference::index(d);
            const double n = g.mota[0].cells[ri][di].mean;
            const double q40 = g.mota[1].cells[ri][di].mean;
            const double q50 = g.mota[2].cells[ri][di].mean;
            if (!(n >= q40 && q40 >= q50)) {
                violations.push_back(fmt::format("{} detector, {} ReID: {:.1f} {:.1f} {:.1f}", to_string(d),
                                                 to_string(kReidSettings[ri]), n, q40, q50));
            }
        }
    }
    const auto ni = reference::index(DetectorModel::normal);
    std::string detail = fmt::format("Normal detector with 50 ReID: {:.1f} -> {:.1f} -> {:.1f}",
                                     g.mota[0].cells[4][ni].mean, g.mota[1].cells[4][ni].mean,
                                     g.mota[2].cells[4][ni].mean);
    for (const std::string& v : violations) detail += "; violated: " + v;
    return {violations.empty(), detail};
}

Outcome ordering(const FullGrid& g) {
    std::vector<std::string> violations;
    double stretch_worst = 0.0;
    for (const MotaTable& t : g.mota) {
        const auto qi = reference::index(t.quality);
        const DetectorModel matched = qi == 0 ? DetectorModel::normal : qi == 1 ? DetectorModel::q40 : DetectorModel::q50;
        for (std::size_t ri = 0; ri < kReidSettings.size(); ++ri) {
            const auto& row = t.cells[ri];
            double row_max = row[0].mean;
            for (const Stat& s : row) row_max = std::max(row_max, s.mean);
            for (std::size_t di = 1; di < row.size(); ++di) {
                if (!(row[0].mean < row[di].mean)) {
                    violations.push_back(fmt::format("Original not the minimum of {}/{}", to_string(t.quality),
                                                     to_string(kReidSettings[ri])));
                }
                stretch_worst = std::max(stretch_worst, std::abs(row[di].mean - reference::kMota[qi][ri][di]));
            }
            const double m = row[reference::index(matched)].mean;
            if (m < row_max - 1.0) {
                violations.push_back(fmt::format("{} detector {:.1f} vs max {:.1f} on {}/{}", to_string(matched), m,
                                                 row_max, to_string(t.quality), to_string(kReidSettings[ri])));
            }
        }
    }
    std::string detail = fmt::format("{} violations; trained cells within {:.1f} of reference (stretch goal {})",
                                     violations.size(), stretch_worst, stretch_worst <= 5.0 ? "met" : "not met");
    for (const std::string& v : violations) detail += "; " + v;
    return {violations.empty(), detail};
}

Outcome mt_ml_sanity(const FullGrid& g) {
    const double mt = g.detectors[0].rows[reference::index(DetectorModel::normal)].mt.mean;
    const double ml = g.detectors[2].rows[reference::index(DetectorModel::q50)].ml.mean;
    return {mt >= 29.0 && ml >= 4.0, fmt::format("Normal/N MT {:.2f} of 32, 50/50 ML {:.2f}", mt, ml)};
}

Outcome determinism_round_trip() {
    const fs::path base = fs::temp_directory_path() / "pitchtrack_acceptance";
    fs::remove_all(base);
    std::ostringstream log, err;

    cli::GridArgs args;
    args.config.scenario.n_frames = reference::kSequenceFrames[2];
    args.config.experiment.seeds = {1, 2};
    args.dump_trails = 10;
    args.out_dir = base / "grid_a";
    cli::cmd_grid(args, log, err);
    args.out_dir = base / "grid_b";
    cli::cmd_grid(args, log, err);
    const auto a = tree(base / "grid_a");
    const bool identical = !a.empty() && a == tree(base / "grid_b");

    ExperimentConfig gen;
    gen.scenario.n_frames = reference::kSequenceFrames[2];
    cli::cmd_generate(gen, 4, base / "gen", log);
    int files = 0, broken = 0, short_files = 0;
    for (const auto& e : fs::directory_iterator(base / "gen")) {
        if (e.path().extension() != ".txt") continue;
        ++files;
        const std::string text = slurp(e.path());
        const MotData d = read_mot(e.path());
        const std::string again = e.path().filename() == "gt.txt" ? format_mot(d.tracks) : format_mot(d.detections);
        if (again != text) ++broken;
        if (d.max_frame() != reference::kSequenceFrames[2]) ++short_files;
    }
    fs::remove_all(base);
    return {identical && files == 13 && broken == 0 && short_files == 0,
            fmt::format("grid outputs {}; {} generated files, {} not round-tripping, {} with max frame != 595",
                        identical ? "byte-identical" : "DIFFER", files, broken, short_files)};
}

Outcome runtime_budget() {
    ExperimentConfig config;
    config.scenario.n_frames = reference::kSequenceFrames[2];
    config.experiment.seeds = seed_list(5);
    const auto t0 = Clock::now();
    const GridResult r = run_grid(config);
    const double secs = seconds_since(t0);
    return {secs < 60.0 && r.cells.size() == 5 * 3 * 20,
            fmt::format("{} cells in {:.1f} s on {} hardware threads", r.cells.size(), secs,
                        std::thread::hardware_concurrency())};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int n, const std::string& name, const Outcome& o) {
        std::printf("[%s] criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    };
    auto guarded = [](const std::function<Outcome()>& f) -> Outcome {
        try {
            return f();
        } catch (const std::exception& e) {
            return {false, std::string("exception: ") + e.what()};
        }
    };

    report(1, "assignment matches exhaustive minimum", guarded(assignment_oracle));
    report(2, "CLEAR-MOT matches brute-force oracle", guarded(metrics_oracle));
    report(3, "ECC recovers translations and rotations", guarded(ecc_recovery));
    report(4, "calibrated recall/precision within 0.5 pp", guarded(calibration_fidelity));
    report(5, "ReID benefit on occlusion-rich Q50", guarded(reid_benefit));

    FullGrid grid;
    std::string grid_error;
    try {
        grid = full_grid_20();
    } catch (const std::exception& e) {
        grid_error = e.what();
    }
    auto on_grid = [&](const std::function<Outcome(const FullGrid&)>& f) {
        return grid_error.empty() ? guarded([&] { return f(grid); }) : Outcome{false, "exception: " + grid_error};
    };
    report(6, "MOTA declines N >= 40 >= 50 for trained detectors", on_grid(quality_monotonicity));
    report(7, "Original column minimum, matched detector near maximum", on_grid(ordering));
    report(8, "MT on Normal/N and ML on 50/50", on_grid(mt_ml_sanity));
    report(9, "deterministic grid and MOT round trip", guarded(determinism_round_trip));
    report(10, "5-seed 595-frame grid under 60 s", guarded(runtime_budget));

    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
