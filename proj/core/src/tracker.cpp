#include "pitchtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pitchtrack/assignment.hpp"

namespace pitchtrack {

std::string_view to_string(MotionModel m) {
    switch (m) {
        case MotionModel::none: return "none";
        case MotionModel::cva: return "cva";
        case MotionModel::cmc: return "cmc";
        case MotionModel::cva_cmc: return "cva+cmc";
    }
    return "?";
}

MotionModel parse_motion_model(std::string_view s) {
    for (MotionModel m : {MotionModel::none, MotionModel::cva, MotionModel::cmc, MotionModel::cva_cmc}) {
        if (s == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown motion model '" + std::string(s) + "' (expected none, cva, cmc or cva+cmc)");
}

void TrackerConfig::validate() const {
    auto in_unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
    };
    in_unit(sigma_active, "sigma_active");
    in_unit(lambda_new, "lambda_new");
    in_unit(lambda_new_iou, "lambda_new_iou");
    in_unit(tau_refine, "tau_refine");
    in_unit(lambda_nms, "lambda_nms");
    if (!(gamma_decay > 0.0 && gamma_decay < 1.0)) throw std::invalid_argument("gamma_decay must be in (0, 1)");
    if (reid_patience < 1) throw std::invalid_argument("reid_patience must be >= 1");
    if (!(tau_reid >= 0.0 && tau_reid <= 2.0)) throw std::invalid_argument("tau_reid must be in [0, 2]");
    if (embedding_buffer < 1) throw std::invalid_argument("embedding_buffer must be >= 1");
    if (!(background_scale > 0.0)) throw std::invalid_argument("background_scale must be > 0");
}

double embedding_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("degenerate embedding: dimension mismatch");
    const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    if (!(na > 1e-12) || !(nb > 1e-12)) throw std::invalid_argument("degenerate embedding");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / na - b[i] / nb;
        sq += d * d;
    }
    return std::clamp(std::sqrt(sq), 0.0, 2.0);
}

Tracker::Tracker(TrackerConfig config) : config_(config) { config_.validate(); }

void Tracker::deactivate(Track& t, int frame) {
    t.status = TrackStatus::inactive;
    t.inactive_since = frame;
    t.boxes.erase(frame);
    t.scores.erase(frame);
    output_.events.push_back({frame, t.id, TrackEventKind::deactivate});
}

std::vector<double> Tracker::mean_embedding(const Track& t) const {
    std::vector<double> mean(t.last_embeddings.front().size(), 0.0);
    for (const Embedding& e : t.last_embeddings) {
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += e[i];
    }
    return mean;
}

void Tracker::remember(Track& t, const Detection& d) {
    if (!d.embedding) return;
    t.last_embeddings.push_back(*d.embedding);
    while (static_cast<int>(t.last_embeddings.size()) > config_.embedding_buffer) t.last_embeddings.pop_front();
}

void Tracker::step(int frame, std::span<const Detection> detections, const GrayImage* bg_prev,
                   const GrayImage* bg_cur) {
    if (frame <= last_frame_) throw std::invalid_argument("non-monotonic frame");
    if (uses_cmc(config_.motion) && (bg_prev == nullptr || bg_cur == nullptr)) {
        throw std::invalid_argument("motion inputs required");
    }
    last_frame_ = frame;

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (tracks_[i].status == TrackStatus::active) active.push_back(i);
    }

    // 1-2: motion
    std::optional<Warp> to_current;
    if (uses_cmc(config_.motion) && !active.empty()) {
        const EccResult ecc = ecc_align(*bg_prev, *bg_cur, WarpKind::translation);
        to_current = ecc.warp.inverse().scaled(config_.background_scale);
    }
    std::vector<BoundingBox> predicted(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
        const Track& t = tracks_[active[k]];
        std::vector<BoundingBox> history;
        auto it = t.boxes.rbegin();
        for (int n = 0; n < 2 && it != t.boxes.rend() && it->first >= t.active_since; ++n, ++it) {
            history.insert(history.begin(), it->second);
        }
        if (history.empty()) history.push_back(t.last_box);
        if (to_current) {
            for (BoundingBox& b : history) b = cmc_apply(*to_current, b);
        }
        predicted[k] = uses_cva(config_.motion) ? cva_predict(history) : history.back();
    }

    // 3: refinement
    std::vector<char> det_used(detections.size(), 0);
    std::vector<char> refined(active.size(), 0);
    if (!active.empty() && !detections.empty()) {
        CostMatrix cost(active.size(), detections.size(), 1.0);
        ForbidMask forbid(active.size(), detections.size(), 1);
        for (std::size_t k = 0; k < active.size(); ++k) {
            for (std::size_t j = 0; j < detections.size(); ++j) {
                const double v = iou(predicted[k], detections[j].box);
                if (v <= 0.0 || v < config_.tau_refine) continue;
                cost(k, j) = 1.0 - v;
                forbid(k, j) = 0;
            }
        }
        for (const auto& [k, j] : solve_assignment_blockwise(cost, forbid).pairs) {
            Track& t = tracks_[active[k]];
            t.last_box = detections[j].box;
            t.score = detections[j].confidence;
            remember(t, detections[j]);
            refined[k] = 1;
            det_used[j] = 1;
        }
    }
    for (std::size_t k = 0; k < active.size(); ++k) {
        Track& t = tracks_[active[k]];
        if (!refined[k]) {
            t.last_box = predicted[k];
            t.score *= config_.gamma_decay;
        }
        t.boxes[frame] = t.last_box;
        t.scores[frame] = t.score;
    }

    // 4: park low-score tracks, then inter-track NMS
    std::vector<std::size_t> survivors;
    for (std::size_t idx : active) {
        if (tracks_[idx].score < config_.sigma_active) {
            deactivate(tracks_[idx], frame);
        } else {
            survivors.push_back(idx);
        }
    }
    std::stable_sort(survivors.begin(), survivors.end(), [&](std::size_t a, std::size_t b) {
        return tracks_[a].score > tracks_[b].score;
    });
    for (std::size_t a = 0; a < survivors.size(); ++a) {
        if (tracks_[survivors[a]].status != TrackStatus::active) continue;
        for (std::size_t b = a + 1; b < survivors.size(); ++b) {
            Track& weaker = tracks_[survivors[b]];
            if (weaker.status != TrackStatus::active) continue;
            if (iou(tracks_[survivors[a]].last_box, weaker.last_box) > config_.lambda_nms) deactivate(weaker, frame);
        }
    }

    // 5: re-identification
    if (config_.reid_enabled) {
        std::vector<std::size_t> cands;
        for (std::size_t j = 0; j < detections.size(); ++j) {
            if (!det_used[j] && detections[j].confidence >= config_.lambda_new && detections[j].embedding) {
                cands.push_back(j);
            }
        }
        std::vector<std::size_t> pool;
        std::vector<std::vector<double>> pool_mean;
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            const Track& t = tracks_[i];
            if (t.status != TrackStatus::inactive || t.last_embeddings.empty()) continue;
            if (frame - *t.inactive_since > config_.reid_patience) continue;
            pool.push_back(i);
            pool_mean.push_back(mean_embedding(t));
        }
        if (!cands.empty() && !pool.empty()) {
            CostMatrix cost(pool.size(), cands.size(), 2.0);
            ForbidMask forbid(pool.size(), cands.size(), 1);
            for (std::size_t p = 0; p < pool.size(); ++p) {
                for (std::size_t c = 0; c < cands.size(); ++c) {
                    const auto& emb = *detections[cands[c]].embedding;
                    double d = 0.0;
                    try {
                        d = embedding_distance(pool_mean[p], emb);
                    } catch (const std::invalid_argument&) {
                        continue;
                    }
                    if (d > config_.tau_reid) continue;
                    cost(p, c) = d;
                    forbid(p, c) = 0;
                }
            }
            for (const auto& [p, c] : solve_assignment_blockwise(cost, forbid).pairs) {
                Track& t = tracks_[pool[p]];
                const Detection& d = detections[cands[c]];
                t.status = TrackStatus::active;
                t.inactive_since.reset();
                t.active_since = frame;
                t.last_box = d.box;
                t.score = d.confidence;
                t.boxes[frame] = d.box;
                t.scores[frame] = d.confidence;
                remember(t, d);
                det_used[cands[c]] = 1;
                output_.events.push_back({frame, t.id, TrackEventKind::revive});
            }
        }
    }

    // 6: spawn
    std::vector<std::size_t> spawn_order;
    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (!det_used[j] && detections[j].confidence >= config_.lambda_new) spawn_order.push_back(j);
    }
    std::stable_sort(spawn_order.begin(), spawn_order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].confidence > detections[b].confidence;
    });
    std::vector<BoundingBox> occupied;
    for (const Track& t : tracks_) {
        if (t.status == TrackStatus::active) occupied.push_back(t.last_box);
    }
    for (std::size_t j : spawn_order) {
        const Detection& d = detections[j];
        const bool overlaps = std::any_of(occupied.begin(), occupied.end(), [&](const BoundingBox& b) {
            return iou(b, d.box) >= config_.lambda_new_iou;
        });
        if (overlaps) continue;
        Track t;
        t.id = next_id_++;
        t.status = TrackStatus::active;
        t.active_since = frame;
        t.last_box = d.box;
        t.score = d.confidence;
        t.boxes[frame] = d.box;
        t.scores[frame] = d.confidence;
        remember(t, d);
        occupied.push_back(d.box);
        output_.events.push_back({frame, t.id, TrackEventKind::spawn});
        tracks_.push_back(std::move(t));
    }

    // 7: expire
    for (Track& t : tracks_) {
        if (t.status == TrackStatus::inactive && frame - *t.inactive_since > config_.reid_patience) {
            t.status = TrackStatus::killed;
            output_.events.push_back({frame, t.id, TrackEventKind::kill});
        }
    }

    if (output_.frames.size() < static_cast<std::size_t>(frame)) output_.frames.resize(frame);
    auto& out = output_.frames[frame - 1];
    for (const Track& t : tracks_) {
        if (t.status == TrackStatus::active) out.push_back({t.id, t.last_box, t.score});
    }
}

TrackerOutput run_sequence(const DetectionFrames& detections, const TrackerConfig& config,
                           std::span<const GrayImage> backgrounds) {
    if (detections.empty()) throw std::invalid_argument("run_sequence needs a nonempty frame range");
    if (!backgrounds.empty() && backgrounds.size() != detections.size()) {
        throw std::invalid_argument("one background per frame required");
    }
    Tracker tracker(config);
    for (std::size_t f = 0; f < detections.size(); ++f) {
        const GrayImage* cur = backgrounds.empty() ? nullptr : &backgrounds[f];
        const GrayImage* prev = backgrounds.empty() ? nullptr : &backgrounds[f == 0 ? 0 : f - 1];
        tracker.step(static_cast<int>(f) + 1, detections[f], prev, cur);
    }
    return tracker.take_output();
}

}  // namespace pitchtrack
