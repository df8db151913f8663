#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pitchtrack/box.hpp"

namespace pitchtrack {

/// One record of the 10-field MOTChallenge text format:
/// frame, id, x, y, w, h, conf, and three trailing fields (-1 when unused).
struct MotLine {
    int frame = 1;
    int id = -1;  ///< -1 for raw detections
    BoundingBox box;
    double conf = 1.0;
    std::array<double, 3> extra{-1.0, -1.0, -1.0};
    friend bool operator==(const MotLine&, const MotLine&) = default;
};

/// Records grouped by frame (index f-1). Lines with id -1 become detections,
/// lines with id >= 0 become track entries sorted by id.
struct MotData {
    DetectionFrames detections;
    TrackFrames tracks;
    int max_frame() const;
};

/// Parses one line. Throws std::invalid_argument with a message ending in
/// "(line N)" for a wrong field count, a non-numeric field, frame < 1, an id
/// below -1 or a non-positive box size.
MotLine parse_mot_line(std::string_view text, int line_no);

/// All records of a stream; blank lines are skipped.
std::vector<MotLine> parse_mot(std::istream& in);
MotData group_mot(const std::vector<MotLine>& lines);

/// Throws std::runtime_error("cannot open <path>") when unreadable.
MotData read_mot(const std::filesystem::path& path);

/// Reals with exactly two decimals, '.' as separator, no locale.
std::string format_real(double v);
std::string format_mot_line(const MotLine& line);

/// Frame-major then id order; detections keep their in-frame order.
std::string format_mot(const TrackFrames& tracks);
std::string format_mot(const DetectionFrames& detections);

/// Throws std::runtime_error("cannot write <path>").
void write_mot(const std::filesystem::path& path, const TrackFrames& tracks);
void write_mot(const std::filesystem::path& path, const DetectionFrames& detections);

/// Embedding sidecar for a detection file: one line "frame,e1,...,eD" per
/// detection, in the order format_mot writes them. Detections without an
/// embedding are skipped entirely, so either all or none should carry one.
std::string format_embeddings(const DetectionFrames& detections);
void write_embeddings(const std::filesystem::path& path, const DetectionFrames& detections);

/// Attaches sidecar embeddings (renormalized) to detections read from the
/// matching MOT file. Throws std::invalid_argument on a count or frame
/// mismatch, naming the sidecar line.
void attach_embeddings(std::istream& in, DetectionFrames& detections);
void read_embeddings(const std::filesystem::path& path, DetectionFrames& detections);

/// Conventional sidecar location: "<det file>.emb".
std::filesystem::path embedding_path(const std::filesystem::path& det_file);

}  // namespace pitchtrack
