#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pitchtrack/config.hpp"

namespace pitchtrack::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

/// "7" or "1..5" (inclusive). Throws std::invalid_argument.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// Writes gt.txt, det_<detector>_<quality>.txt (+ .emb embedding sidecar)
/// for all twelve cells and manifest.json into out_dir.
int cmd_generate(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir,
                 std::ostream& log);

struct TrackArgs {
    std::filesystem::path det_file;
    std::optional<std::filesystem::path> gt_file;
    std::filesystem::path out_file = "results.txt";
    TrackerConfig tracker;
    double iou_gate = 0.5;
};

/// Tracks one detection file (with its sidecar embeddings when present) and
/// writes MOT results; prints a metrics report when ground truth is given.
/// Motion models using cmc are rejected (MOT files carry no backgrounds).
int cmd_track(const TrackArgs& args, std::ostream& log);

struct GridArgs {
    ExperimentConfig config;
    std::filesystem::path out_dir;
    bool check = false;
    int dump_trails = 0;
};

/// Runs the experiment grid and writes CSV tables plus tables.txt. Returns
/// kExitCheckFailed when check is set and an ordering check fails.
int cmd_grid(const GridArgs& args, std::ostream& log, std::ostream& err);

}  // namespace pitchtrack::cli
