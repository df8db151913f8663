#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pitchtrack/config.hpp"
#include "pitchtrack/metrics.hpp"
#include "pitchtrack/simulate.hpp"

namespace pitchtrack {

/// Rows of the MOTA tables: tracking without ReID, or with one of the four
/// ReID models (the stock one or one retrained per quality).
enum class ReidSetting { without, original, normal, q40, q50 };

inline constexpr std::array<ReidSetting, 5> kReidSettings{ReidSetting::without, ReidSetting::original,
                                                           ReidSetting::normal, ReidSetting::q40, ReidSetting::q50};

std::string_view to_string(ReidSetting r);  // "Without", "Original", "Normal", "40", "50"
ReidSetting parse_reid_setting(std::string_view s);

/// The ReID row paired with a detector model in per-detector tables.
ReidSetting reid_for(DetectorModel d);

/// Extra embedding noise seen by a ReID setting on a dataset; -1 for Without.
double reid_extra_sigma(ReidSetting r, Quality q, const ReidNoise& noise);

struct CellResult {
    std::uint64_t seed = 0;
    Quality quality = Quality::n;
    ReidSetting reid = ReidSetting::without;
    DetectorModel detector = DetectorModel::original;
    MetricsReport report;
};

struct DetectorResult {
    std::uint64_t seed = 0;
    Quality quality = Quality::n;
    DetectorModel detector = DetectorModel::original;
    DetectionScore score;
};

/// Center of a box every k frames, for trail plots.
struct TrailPoint {
    std::uint64_t seed = 0;
    Quality quality = Quality::n;
    std::string source;  ///< "gt" or "track"
    int frame = 0;
    int id = 0;
    double cx = 0.0;
    double cy = 0.0;
};

struct GridResult {
    std::vector<std::uint64_t> seeds;
    /// Ordered by seed, quality, ReID row, detector.
    std::vector<CellResult> cells;
    /// Ordered by seed, quality, detector.
    std::vector<DetectorResult> detectors;
    /// Ordered by seed, quality, source, frame, id.
    std::vector<TrailPoint> trails;

    const CellResult& cell(std::uint64_t seed, Quality q, ReidSetting r, DetectorModel d) const;
};

struct GridOptions {
    /// Emit trails every k frames for the matched-quality cell; 0 disables.
    int dump_trails = 0;
    /// Restrict to these dataset qualities (all when empty).
    std::vector<Quality> qualities;
    /// Restrict to these detectors (all when empty).
    std::vector<DetectorModel> detectors;
};

/// Runs every (seed, quality, ReID row, detector) combination. All cells of a
/// seed share one ground truth; all ReID rows of a (seed, quality, detector)
/// share one set of detections. Jobs run on config.experiment.threads
/// workers and results are placed by coordinates, so output does not depend
/// on scheduling.
GridResult run_grid(const ExperimentConfig& config, const GridOptions& options = {});

/// Mean and sample standard deviation over seeds.
struct Stat {
    double mean = 0.0;
    double std = 0.0;
};

struct MotaTable {
    Quality quality = Quality::n;
    std::array<std::array<Stat, 4>, 5> cells{};  ///< [ReID row][detector], percent
};

struct DetectorTableRow {
    DetectorModel detector = DetectorModel::original;
    Stat motp, mt, pt, ml, recall, precision;  ///< recall/precision in percent
};

struct DetectorTable {
    Quality quality = Quality::n;
    std::array<DetectorTableRow, 4> rows{};
};

std::vector<MotaTable> mota_tables(const GridResult& result);
std::vector<DetectorTable> detector_tables(const GridResult& result);

/// Ordering checks over the mean MOTA tables: the Original detector is the
/// strict minimum of every row, the detector trained on the dataset's quality
/// is within `slack` points of the row maximum, and trained detectors never
/// improve as quality degrades. Returns one message per violation.
std::vector<std::string> check_tables(const std::vector<MotaTable>& tables, double slack = 1.0);

/// Renders of the tables; files written by write_grid_outputs.
std::string cells_csv(const GridResult& result);
std::string mota_csv(const MotaTable& table, bool std_dev);
std::string motp_csv(const std::vector<DetectorTable>& tables, bool std_dev);
std::string detector_csv(const DetectorTable& table, bool std_dev);
std::string trails_csv(const GridResult& result);
std::string tables_text(const std::vector<MotaTable>& mota, const std::vector<DetectorTable>& detectors);

}  // namespace pitchtrack
