#pragma once

#include <map>
#include <vector>

#include "pitchtrack/box.hpp"

namespace pitchtrack {

struct MetricsReport {
    double mota = 0.0;
    double motp = 0.0;  ///< mean (1 - IoU) over matches; lower is better
    long fp = 0;
    long fn = 0;
    long idsw = 0;
    long gt_total = 0;
    long matches_total = 0;
    int mt = 0;
    int pt = 0;
    int ml = 0;
    double recall = 0.0;
    double precision = 0.0;
    /// gt id -> fraction of its visible frames matched to any hypothesis
    std::map<int, double> per_track_coverage;
};

/// CLEAR-MOT evaluation. Per frame, correspondences from the previous frame
/// are kept while they still pass the IoU gate; the rest are matched with a
/// minimum (1 - IoU) assignment. A ground-truth object matched to a different
/// hypothesis id than its last partner counts one identity switch.
///
/// Throws std::invalid_argument for an empty ground truth or a gate outside
/// (0, 1).
MetricsReport evaluate(const TrackFrames& gt, const TrackFrames& hyp, double iou_gate = 0.5);

struct TrackClasses {
    std::vector<int> mt;
    std::vector<int> pt;
    std::vector<int> ml;
};

/// MT: coverage >= 0.8; PT: 0.2 <= coverage < 0.8; ML: coverage < 0.2.
TrackClasses classify_tracks(const std::map<int, double>& per_track_coverage);

struct DetectionScore {
    double recall = 0.0;
    double precision = 0.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

/// Detector-level recall and precision with per-frame optimal matching at the gate.
DetectionScore detection_pr(const TrackFrames& gt, const DetectionFrames& detections, double iou_gate = 0.5);

}  // namespace pitchtrack
