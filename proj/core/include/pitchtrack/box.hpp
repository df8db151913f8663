#pragma once

#include <optional>
#include <vector>

namespace pitchtrack {

/// Axis-aligned box in continuous pixel coordinates: left, top, width, height.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    static BoundingBox from_center(double cx, double cy, double w, double h) {
        return {cx - 0.5 * w, cy - 0.5 * h, w, h};
    }

    double right() const { return x + w; }
    double bottom() const { return y + h; }
    double center_x() const { return x + 0.5 * w; }
    double center_y() const { return y + 0.5 * h; }
    double area() const { return w * h; }

    /// w > 0, h > 0 and every coordinate finite.
    bool valid() const;

    BoundingBox translated(double dx, double dy) const { return {x + dx, y + dy, w, h}; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

using Embedding = std::vector<double>;

struct Detection {
    int frame = 1;
    BoundingBox box;
    double confidence = 1.0;
    std::optional<Embedding> embedding;
};

/// One box of an identified track (ground truth or tracker hypothesis).
struct TrackedBox {
    int id = 0;
    BoundingBox box;
    double score = 1.0;
};

/// Index i holds frame i + 1; frames are 1-based and contiguous.
using DetectionFrames = std::vector<std::vector<Detection>>;
using TrackFrames = std::vector<std::vector<TrackedBox>>;

/// Intersection over union; 0 for disjoint or edge-touching boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Euclidean norm; scales `v` to unit length. Throws on a zero vector.
void normalize(Embedding& v);

}  // namespace pitchtrack
