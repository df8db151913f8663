#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pitchtrack/experiment.hpp"
#include "pitchtrack/metrics.hpp"
#include "pitchtrack/mot_io.hpp"
#include "pitchtrack/rng.hpp"
#include "pitchtrack/reference_values.hpp"
#include "pitchtrack/tracker.hpp"

namespace pitchtrack::cli {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::uint64_t parse_u64(std::string_view s, const std::string& whole) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("invalid seed list '" + whole + "' (expected N or N..M)");
    }
    return v;
}

std::string det_file_name(DetectorModel d, Quality q) {
    return fmt::format("det_{}_{}.txt", to_string(d), to_string(q));
}

void print_report(std::ostream& log, const MetricsReport& r) {
    log << fmt::format("MOTA {:.4f}  MOTP {:.4f}  FP {}  FN {}  IDSW {}  GT {}\n", r.mota, r.motp, r.fp, r.fn, r.idsw,
                       r.gt_total);
    log << fmt::format("MT {}  PT {}  ML {}  Recall {:.4f}  Precision {:.4f}\n", r.mt, r.pt, r.ml, r.recall,
                       r.precision);
}

}  // namespace

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) return {parse_u64(text, text)};
    const std::uint64_t lo = parse_u64(std::string_view(text).substr(0, dots), text);
    const std::uint64_t hi = parse_u64(std::string_view(text).substr(dots + 2), text);
    if (hi < lo) throw std::invalid_argument("invalid seed list '" + text + "' (empty range)");
    if (hi - lo >= 100000) throw std::invalid_argument("invalid seed list '" + text + "' (range too large)");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
}

int cmd_generate(const ExperimentConfig& config, std::uint64_t seed, const fs::path& out_dir, std::ostream& log) {
    ScenarioConfig sc = config.scenario;
    sc.seed = seed;
    sc.render_backgrounds = false;
    const GroundTruth gt = generate_scenario(sc);
    const ProfileGrid grid = build_profile_grid(config, gt);

    fs::create_directories(out_dir);
    write_mot(out_dir / "gt.txt", gt.frames());
    nlohmann::json files = nlohmann::json::array({"gt.txt"});
    for (Quality q : kQualities) {
        for (DetectorModel d : kDetectorModels) {
            const auto tag = static_cast<std::uint64_t>(4 * reference::index(q) + reference::index(d));
            DetectionFrames dets = degrade(gt, grid.at({d, q}), mix_seed(seed, 0x100 + tag));
            // Frames past the last detection still belong to the sequence.
            dets.resize(static_cast<std::size_t>(gt.n_frames()));
            const fs::path path = out_dir / det_file_name(d, q);
            write_mot(path, dets);
            write_embeddings(embedding_path(path), dets);
            files.push_back(path.filename().string());
            files.push_back(embedding_path(path).filename().string());
        }
    }
    nlohmann::json manifest;
    manifest["seed"] = seed;
    manifest["n_frames"] = gt.n_frames();
    manifest["files"] = files;
    manifest["config"] = nlohmann::json::parse(dump_config(config));
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    log << fmt::format("wrote {} files to {}\n", files.size() + 1, out_dir.string());
    return kExitOk;
}

int cmd_track(const TrackArgs& args, std::ostream& log) {
    if (uses_cmc(args.tracker.motion)) {
        throw std::invalid_argument("motion inputs required: MOT files carry no background images, so motion "
                                    "model '" + std::string(to_string(args.tracker.motion)) +
                                    "' is only available in grid; use none or cva");
    }
    MotData det = read_mot(args.det_file);
    const fs::path sidecar = embedding_path(args.det_file);
    if (fs::exists(sidecar)) read_embeddings(sidecar, det.detections);

    std::optional<MotData> gt;
    if (args.gt_file) gt = read_mot(*args.gt_file);
    const std::size_t n_frames = std::max(det.detections.size(), gt ? gt->tracks.size() : std::size_t{0});
    if (n_frames == 0) throw std::invalid_argument("no frames in " + args.det_file.string());
    det.detections.resize(n_frames);

    const TrackerOutput out = run_sequence(det.detections, args.tracker);
    write_mot(args.out_file, out.frames);
    log << fmt::format("tracked {} frames, wrote {}\n", n_frames, args.out_file.string());
    if (gt) print_report(log, evaluate(gt->tracks, out.frames, args.iou_gate));
    return kExitOk;
}

int cmd_grid(const GridArgs& args, std::ostream& log, std::ostream& err) {
    GridOptions options;
    options.dump_trails = args.dump_trails;
    const GridResult result = run_grid(args.config, options);
    const auto mota = mota_tables(result);
    const auto detectors = detector_tables(result);

    fs::create_directories(args.out_dir);
    write_file(args.out_dir / "cells.csv", cells_csv(result));
    for (const MotaTable& t : mota) {
        const std::string q(to_string(t.quality));
        write_file(args.out_dir / fmt::format("mota_{}.csv", q), mota_csv(t, false));
        write_file(args.out_dir / fmt::format("mota_{}_std.csv", q), mota_csv(t, true));
    }
    for (const DetectorTable& t : detectors) {
        const std::string q(to_string(t.quality));
        write_file(args.out_dir / fmt::format("detectors_{}.csv", q), detector_csv(t, false));
        write_file(args.out_dir / fmt::format("detectors_{}_std.csv", q), detector_csv(t, true));
    }
    write_file(args.out_dir / "motp.csv", motp_csv(detectors, false));
    write_file(args.out_dir / "motp_std.csv", motp_csv(detectors, true));
    const std::string text = tables_text(mota, detectors);
    write_file(args.out_dir / "tables.txt", text);
    if (args.dump_trails > 0) write_file(args.out_dir / "trails.csv", trails_csv(result));
    log << text;

    if (!args.check) return kExitOk;
    const auto failures = check_tables(mota);
    for (const std::string& f : failures) err << "check failed: " << f << '\n';
    if (!failures.empty()) return kExitCheckFailed;
    log << "all ordering checks passed\n";
    return kExitOk;
}

}  // namespace pitchtrack::cli
