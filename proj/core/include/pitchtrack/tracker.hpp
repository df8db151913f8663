#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pitchtrack/box.hpp"
#include "pitchtrack/motion.hpp"

namespace pitchtrack {

enum class MotionModel { none, cva, cmc, cva_cmc };

std::string_view to_string(MotionModel m);  // "none", "cva", "cmc", "cva+cmc"
MotionModel parse_motion_model(std::string_view s);
inline bool uses_cmc(MotionModel m) { return m == MotionModel::cmc || m == MotionModel::cva_cmc; }
inline bool uses_cva(MotionModel m) { return m == MotionModel::cva || m == MotionModel::cva_cmc; }

/// Thresholds of the propagate-and-refine loop. Defaults are tunable choices,
/// not measured values.
struct TrackerConfig {
    double sigma_active = 0.5;    ///< tracks scoring below this leave the active set
    double lambda_new = 0.6;      ///< min detection confidence to spawn or revive
    double lambda_new_iou = 0.3;  ///< max IoU with an active track to spawn
    double tau_refine = 0.3;      ///< min IoU between prediction and detection to refine
    double gamma_decay = 0.7;     ///< score factor for an unrefined frame
    double lambda_nms = 0.6;      ///< inter-track IoU above which the weaker track is parked
    MotionModel motion = MotionModel::cva;
    bool reid_enabled = true;
    int reid_patience = 30;  ///< frames an inactive track stays revivable
    double tau_reid = 0.7;   ///< max embedding distance for a revival
    int embedding_buffer = 10;
    /// Full-resolution pixels per background pixel (camera motion estimates
    /// are scaled by this before being applied to boxes).
    double background_scale = 1.0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

enum class TrackStatus { active, inactive, killed };

struct Track {
    int id = 0;
    std::map<int, BoundingBox> boxes;
    std::map<int, double> scores;
    TrackStatus status = TrackStatus::active;
    std::optional<int> inactive_since;
    int active_since = 0;
    BoundingBox last_box;
    double score = 0.0;
    std::deque<Embedding> last_embeddings;  ///< newest at the back
};

enum class TrackEventKind { spawn, deactivate, revive, kill };

struct TrackEvent {
    int frame = 0;
    int id = 0;
    TrackEventKind kind = TrackEventKind::spawn;
    friend bool operator==(const TrackEvent&, const TrackEvent&) = default;
};

struct TrackerOutput {
    TrackFrames frames;  ///< index f-1, sorted by id
    std::vector<TrackEvent> events;
};

/// Euclidean distance between the unit-normalized vectors, in [0, 2].
/// Throws std::invalid_argument("degenerate embedding") for a zero vector or
/// mismatched dimensions.
double embedding_distance(std::span<const double> a, std::span<const double> b);

/// Tracking-by-detection state machine. Each step:
///  1. camera motion compensation of active boxes (cmc),
///  2. constant-velocity prediction (cva),
///  3. refinement: IoU-gated assignment of predictions to detections; matched
///     tracks adopt the detection, unmatched ones keep the prediction with a
///     decayed score,
///  4. tracks below sigma_active and the weaker of overlapping tracks
///     (lambda_nms) become inactive,
///  5. ReID: unused confident detections revive inactive tracks by embedding
///     distance,
///  6. remaining confident detections away from active tracks spawn new ids,
///  7. inactive tracks older than reid_patience are killed.
///
/// Single owner; not safe to mutate concurrently.
class Tracker {
public:
    explicit Tracker(TrackerConfig config);

    /// Throws std::invalid_argument("non-monotonic frame") unless frames
    /// strictly increase, and ("motion inputs required") when the motion
    /// model uses cmc and a background is missing.
    void step(int frame, std::span<const Detection> detections, const GrayImage* bg_prev = nullptr,
              const GrayImage* bg_cur = nullptr);

    const TrackerConfig& config() const { return config_; }
    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerOutput& output() const { return output_; }
    TrackerOutput take_output() { return std::move(output_); }

private:
    void deactivate(Track& t, int frame);
    std::vector<double> mean_embedding(const Track& t) const;
    void remember(Track& t, const Detection& d);

    TrackerConfig config_;
    std::vector<Track> tracks_;
    TrackerOutput output_;
    int last_frame_ = 0;
    int next_id_ = 1;
};

/// Folds Tracker::step over frames 1..detections.size(). `backgrounds`, when
/// given, must have one image per frame.
TrackerOutput run_sequence(const DetectionFrames& detections, const TrackerConfig& config,
                           std::span<const GrayImage> backgrounds = {});

}  // namespace pitchtrack
