#include "pitchtrack/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "pitchtrack/assignment.hpp"

namespace pitchtrack {

namespace {

void check_gate(double iou_gate) {
    if (!(iou_gate > 0.0 && iou_gate < 1.0)) throw std::invalid_argument("iou_gate must be in (0, 1)");
}

// Gated (1 - IoU) matching of rows to columns; returns (row, col) pairs.
template <typename RowBox, typename ColBox>
std::vector<std::pair<std::size_t, std::size_t>> gated_match(const std::vector<std::size_t>& rows,
                                                             const std::vector<std::size_t>& cols,
                                                             RowBox row_box, ColBox col_box, double gate) {
    if (rows.empty() || cols.empty()) return {};
    CostMatrix cost(rows.size(), cols.size(), 1.0);
    ForbidMask forbid(rows.size(), cols.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double v = iou(row_box(rows[i]), col_box(cols[j]));
            if (v < gate) continue;
            cost(i, j) = 1.0 - v;
            forbid(i, j) = 0;
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [i, j] : solve_assignment_blockwise(cost, forbid).pairs) out.emplace_back(rows[i], cols[j]);
    return out;
}

}  // namespace

MetricsReport evaluate(const TrackFrames& gt, const TrackFrames& hyp, double iou_gate) {
    check_gate(iou_gate);
    MetricsReport r;
    const std::size_t n_frames = std::max(gt.size(), hyp.size());

    std::map<int, long> visible;
    std::map<int, long> matched;
    std::unordered_map<int, int> last_partner;   // gt id -> hyp id, any earlier frame
    std::unordered_map<int, int> prev_frame;     // gt id -> hyp id, previous frame only
    double dist_sum = 0.0;

    static const std::vector<TrackedBox> none;
    for (std::size_t f = 0; f < n_frames; ++f) {
        const auto& g = f < gt.size() ? gt[f] : none;
        const auto& h = f < hyp.size() ? hyp[f] : none;
        r.gt_total += static_cast<long>(g.size());
        for (const TrackedBox& b : g) ++visible[b.id];

        std::vector<char> g_used(g.size(), 0), h_used(h.size(), 0);
        std::unordered_map<int, std::size_t> h_index;
        for (std::size_t j = 0; j < h.size(); ++j) h_index.emplace(h[j].id, j);

        std::unordered_map<int, int> current;
        auto record = [&](std::size_t i, std::size_t j, bool carried) {
            g_used[i] = h_used[j] = 1;
            const int gid = g[i].id;
            const int hid = h[j].id;
            if (!carried) {
                const auto it = last_partner.find(gid);
                if (it != last_partner.end() && it->second != hid) ++r.idsw;
            }
            last_partner[gid] = hid;
            current[gid] = hid;
            dist_sum += 1.0 - iou(g[i].box, h[j].box);
            ++r.matches_total;
            ++matched[gid];
        };

        // 1) keep last frame's correspondences that still pass the gate
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto prev = prev_frame.find(g[i].id);
            if (prev == prev_frame.end()) continue;
            const auto hj = h_index.find(prev->second);
            if (hj == h_index.end() || h_used[hj->second]) continue;
            if (iou(g[i].box, h[hj->second].box) >= iou_gate) record(i, hj->second, true);
        }

        // 2) optimal matching of the rest
        std::vector<std::size_t> free_g, free_h;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g_used[i]) free_g.push_back(i);
        }
        for (std::size_t j = 0; j < h.size(); ++j) {
            if (!h_used[j]) free_h.push_back(j);
        }
        const auto pairs = gated_match(
            free_g, free_h, [&](std::size_t i) { return g[i].box; }, [&](std::size_t j) { return h[j].box; },
            iou_gate);
        for (const auto& [i, j] : pairs) record(i, j, false);

        for (char u : g_used) r.fn += u ? 0 : 1;
        for (char u : h_used) r.fp += u ? 0 : 1;
        prev_frame = std::move(current);
    }

    if (r.gt_total == 0) throw std::invalid_argument("empty ground truth");

    r.mota = 1.0 - static_cast<double>(r.fp + r.fn + r.idsw) / static_cast<double>(r.gt_total);
    r.motp = r.matches_total > 0 ? dist_sum / static_cast<double>(r.matches_total) : 0.0;
    r.recall = static_cast<double>(r.matches_total) / static_cast<double>(r.gt_total);
    const long hyp_total = r.matches_total + r.fp;
    r.precision = hyp_total > 0 ? static_cast<double>(r.matches_total) / static_cast<double>(hyp_total) : 0.0;
    for (const auto& [id, n] : visible) {
        const auto it = matched.find(id);
        r.per_track_coverage[id] = static_cast<double>(it == matched.end() ? 0 : it->second) / static_cast<double>(n);
    }
    const TrackClasses classes = classify_tracks(r.per_track_coverage);
    r.mt = static_cast<int>(classes.mt.size());
    r.pt = static_cast<int>(classes.pt.size());
    r.ml = static_cast<int>(classes.ml.size());
    return r;
}

TrackClasses classify_tracks(const std::map<int, double>& per_track_coverage) {
    TrackClasses out;
    for (const auto& [id, coverage] : per_track_coverage) {
        if (coverage >= 0.8) {
            out.mt.push_back(id);
        } else if (coverage >= 0.2) {
            out.pt.push_back(id);
        } else {
            out.ml.push_back(id);
        }
    }
    return out;
}

DetectionScore detection_pr(const TrackFrames& gt, const DetectionFrames& detections, double iou_gate) {
    check_gate(iou_gate);
    DetectionScore s;
    const std::size_t n_frames = std::max(gt.size(), detections.size());
    long gt_total = 0;
    for (std::size_t f = 0; f < n_frames; ++f) {
        static const std::vector<TrackedBox> no_gt;
        static const std::vector<Detection> no_det;
        const auto& g = f < gt.size() ? gt[f] : no_gt;
        const auto& d = f < detections.size() ? detections[f] : no_det;
        gt_total += static_cast<long>(g.size());
        std::vector<std::size_t> rows(g.size()), cols(d.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
        const auto pairs = gated_match(
            rows, cols, [&](std::size_t i) { return g[i].box; }, [&](std::size_t j) { return d[j].box; }, iou_gate);
        const auto tp = static_cast<long>(pairs.size());
        s.tp += tp;
        s.fn += static_cast<long>(g.size()) - tp;
        s.fp += static_cast<long>(d.size()) - tp;
    }
    if (gt_total == 0) throw std::invalid_argument("empty ground truth");
    s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    s.precision = s.tp + s.fp > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp) : 0.0;
    return s;
}

}  // namespace pitchtrack
