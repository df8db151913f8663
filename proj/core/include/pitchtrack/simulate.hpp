#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pitchtrack/box.hpp"
#include "pitchtrack/motion.hpp"

namespace pitchtrack {

inline constexpr int kEmbeddingDim = 16;

struct ScenarioConfig {
    int n_tracks = 32;
    int n_frames = 462;
    int fps = 30;
    double pitch_length = 105.0;  // meters
    double pitch_width = 68.0;
    int image_width = 1920;
    int image_height = 1080;
    double px_per_meter = 18.0;
    double max_speed = 7.0;  // m/s
    double team_split = 0.5;
    /// Probability weight of picking a waypoint next to another player.
    double occlusion_bias = 0.3;
    double camera_pan_gain = 1.0;
    /// Full-resolution pixels per background pixel.
    int background_scale = 16;
    bool render_backgrounds = true;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
    double duration_seconds() const { return static_cast<double>(n_frames) / fps; }
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct GtTrack {
    int id = 0;
    int team = 0;
    /// Per-player detection difficulty in [0, 1] (kit contrast, typical
    /// distance to camera). Quality profiles decide how much it matters.
    double hardness = 0.0;
    std::map<int, BoundingBox> boxes;  ///< frame -> box, visible frames only
    friend bool operator==(const GtTrack&, const GtTrack&) = default;
};

struct GroundTruth {
    ScenarioConfig config;
    std::vector<GtTrack> tracks;
    /// Index f-1: warp mapping frame f image coordinates onto frame f-1
    /// (identity for the first frame). Full-resolution pixels.
    std::vector<Warp> camera_warp_per_frame;
    /// Pitch texture seen by the camera, one per frame, downsampled by
    /// config.background_scale. Empty when render_backgrounds is false.
    std::vector<GrayImage> backgrounds;
    std::map<int, Embedding> true_embeddings;
    std::array<Embedding, 2> team_centers;

    int n_frames() const { return config.n_frames; }
    TrackFrames frames() const;
    std::size_t visible_boxes() const;
    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Simulated players on a pitch filmed by a panning camera. Deterministic in
/// cfg.seed. Throws std::invalid_argument("overcrowded scenario") when the
/// players cannot be placed at least 2 m apart.
GroundTruth generate_scenario(const ScenarioConfig& cfg);

/// Detection-level surrogate for one (detector model, video quality) cell.
struct QualityProfile {
    std::string name;
    double miss_rate = 0.0;   ///< mean probability a visible box is not detected
    double fp_rate = 0.0;     ///< expected false positives per frame
    double loc_sigma = 0.0;   ///< jitter scale as a fraction of box size
    double conf_mean = 0.9;
    double conf_sigma = 0.05;
    double fp_conf_mean = 0.35;
    double embed_sigma = 0.0;
    double team_similarity = 0.5;
    /// Spread of per-player miss probability with hardness; 0 = uniform.
    double miss_hardness_gain = 0.0;
    /// Drop of mean confidence at hardness 1.
    double conf_hardness_drop = 0.0;

    void validate() const;
    friend bool operator==(const QualityProfile&, const QualityProfile&) = default;
};

enum class DetectorModel { original, normal, q40, q50 };
enum class Quality { n, q40, q50 };

inline constexpr std::array<DetectorModel, 4> kDetectorModels{
    DetectorModel::original, DetectorModel::normal, DetectorModel::q40, DetectorModel::q50};
inline constexpr std::array<Quality, 3> kQualities{Quality::n, Quality::q40, Quality::q50};

std::string_view to_string(DetectorModel d);  // "Original", "Normal", "40", "50"
std::string_view to_string(Quality q);        // "N", "40", "50"
DetectorModel parse_detector(std::string_view s);
Quality parse_quality(std::string_view s);
/// The dataset quality a trained detector was trained on; Original has none.
bool trained_on(DetectorModel d, Quality q);

using CellKey = std::pair<DetectorModel, Quality>;
using ProfileGrid = std::map<CellKey, QualityProfile>;

/// Per-player miss probability after spreading profile.miss_rate by hardness,
/// keyed by track id. The visible-box-weighted mean equals miss_rate.
std::map<int, double> resolve_miss_probabilities(const GroundTruth& gt, const QualityProfile& profile);

/// Corrupted detector output, index f-1 for frame f. True detections always
/// overlap their ground-truth box with IoU >= 0.5; false positives never
/// reach IoU 0.5 with any visible ground-truth box.
DetectionFrames degrade(const GroundTruth& gt, const QualityProfile& profile, std::uint64_t seed);

/// Expected recall/precision of degrade(gt, profile, .) at IoU gate 0.5.
std::pair<double, double> expected_recall_precision(const GroundTruth& gt, const QualityProfile& profile);

/// `base` with miss_rate and fp_rate solved for the targets. When
/// verify_seeds > 0 the profile is simulated on that many seeds and
/// std::runtime_error is thrown if the mean recall or precision misses its
/// target by more than 0.5 percentage points.
QualityProfile calibrate_profile(double target_recall, double target_precision, const QualityProfile& base,
                                 const GroundTruth& gt, int verify_seeds = 20);

/// Jitter scale whose mean (1 - IoU) over accepted detections is `motp`.
double loc_sigma_for_motp(double motp);
/// Mean (1 - IoU) of accepted jittered detections at scale `loc_sigma`.
double jitter_motp(double loc_sigma);

/// Simulator knobs of one grid cell before calibration.
QualityProfile default_profile(DetectorModel d, Quality q);

/// All twelve cells calibrated to the reference recall/precision table.
ProfileGrid default_profile_grid(const GroundTruth& gt, int verify_seeds = 20);

/// Appearance noise the ReID matcher adds on top of the detector's
/// embeddings; `extra_sigma` per dimension, renormalized. Deterministic.
DetectionFrames perturb_embeddings(const DetectionFrames& dets, double extra_sigma, std::uint64_t seed);

}  // namespace pitchtrack
