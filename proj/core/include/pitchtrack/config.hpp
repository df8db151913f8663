#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pitchtrack/simulate.hpp"
#include "pitchtrack/tracker.hpp"

namespace pitchtrack {

/// Per-cell adjustments applied on top of default_profile before calibration.
/// recall/precision replace the reference targets (fractions in (0, 1]).
struct ProfileOverride {
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> loc_sigma;
    std::optional<double> conf_mean;
    std::optional<double> conf_sigma;
    std::optional<double> fp_conf_mean;
    std::optional<double> embed_sigma;
    std::optional<double> team_similarity;
    std::optional<double> miss_hardness_gain;
    std::optional<double> conf_hardness_drop;
    friend bool operator==(const ProfileOverride&, const ProfileOverride&) = default;
};

/// Extra per-dimension embedding noise the ReID matcher sees, by how its
/// training quality relates to the dataset.
struct ReidNoise {
    double original = 0.08;    ///< the stock ReID model
    double matched = 0.0;      ///< retrained on the dataset's quality
    double mismatched = 0.04;  ///< retrained on another quality
    friend bool operator==(const ReidNoise&, const ReidNoise&) = default;
};

struct GridSpec {
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double iou_gate = 0.5;
    ReidNoise reid_noise;
    /// Seeds used to re-check each calibrated profile by simulation; 0 skips.
    int calibration_check_seeds = 0;
    /// Worker threads; 0 = hardware concurrency.
    int threads = 0;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    std::map<CellKey, ProfileOverride> profiles;
    TrackerConfig tracker;
    GridSpec experiment;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// JSON with optional top-level objects "scenario", "profiles", "tracker" and
/// "experiment". Missing keys keep their defaults. Throws
/// std::invalid_argument for unknown keys ("unknown key 'x' in tracker") and
/// type mismatches ("expected real for loc_sigma").
ExperimentConfig parse_config(std::string_view json_text);
/// Throws std::runtime_error("cannot open <path>") when unreadable.
ExperimentConfig read_config(const std::filesystem::path& path);

/// Canonical JSON of a configuration (all keys, defaults included).
std::string dump_config(const ExperimentConfig& config);

/// default_profile with the cell's override applied.
QualityProfile profile_with_override(DetectorModel d, Quality q, const ProfileOverride* override_or_null);
/// Target (recall, precision) of a cell: the reference table unless overridden.
std::pair<double, double> cell_targets(DetectorModel d, Quality q, const ProfileOverride* override_or_null);

/// Calibrated profiles for all twelve cells.
ProfileGrid build_profile_grid(const ExperimentConfig& config, const GroundTruth& gt);

}  // namespace pitchtrack
