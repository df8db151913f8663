#include "pitchtrack/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "pitchtrack/metrics.hpp"
#include "pitchtrack/reference_values.hpp"
#include "pitchtrack/rng.hpp"

namespace pitchtrack {

namespace {

constexpr double kPlayerHeightM = 1.8;
constexpr double kPlayerAspect = 0.4;
constexpr double kMinSpacingM = 2.0;
constexpr double kPitchMarginM = 1.0;
constexpr double kSmoothingOmega = 0.8;  // rad/s, critically damped approach to waypoint
constexpr double kMatchGate = 0.5;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

Embedding random_unit(Rng& rng) {
    Embedding e(kEmbeddingDim);
    for (double& v : e) v = rng.normal();
    normalize(e);
    return e;
}

struct Wave {
    double kx, ky, phase, amp;
};

// Smooth pitch texture in full-resolution world pixels.
class PitchTexture {
public:
    PitchTexture(Rng& rng, double px_per_meter) {
        for (int k = 0; k < 6; ++k) {
            const double wavelength = rng.uniform(150.0, 600.0);
            const double dir = rng.uniform(0.0, std::numbers::pi);
            const double kmag = 2.0 * std::numbers::pi / wavelength;
            waves_.push_back({kmag * std::cos(dir), kmag * std::sin(dir), rng.uniform(0.0, 6.3), 0.06});
        }
        // mowing stripes every 5 m
        waves_.push_back({std::numbers::pi / (5.0 * px_per_meter), 0.0, rng.uniform(0.0, 6.3), 0.06});
    }

    double operator()(double wx, double wy) const {
        double v = 0.5;
        for (const Wave& w : waves_) v += w.amp * std::sin(w.kx * wx + w.ky * wy + w.phase);
        return v;
    }

private:
    std::vector<Wave> waves_;
};

// Box jitter shared by degrade() and the MOTP calibration so both use the
// same conditional distribution.
BoundingBox jitter(const BoundingBox& b, double sigma, const std::array<double, 4>& z) {
    const double w = b.w * std::max(0.2, 1.0 + sigma * z[2]);
    const double h = b.h * std::max(0.2, 1.0 + sigma * z[3]);
    return BoundingBox::from_center(b.center_x() + sigma * b.w * z[0], b.center_y() + sigma * b.h * z[1], w, h);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void ScenarioConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(n_tracks >= 1, "n_tracks must be >= 1");
    require(n_frames >= 2, "n_frames must be >= 2");
    require(fps > 0, "fps must be > 0");
    require(px_per_meter > 0.0 && std::isfinite(px_per_meter), "px_per_meter must be > 0");
    require(pitch_length > 0.0 && pitch_width > 0.0, "pitch dimensions must be > 0");
    require(image_width > 0 && image_height > 0, "image dimensions must be > 0");
    require(max_speed > 0.0, "max_speed must be > 0");
    require(team_split >= 0.0 && team_split <= 1.0, "team_split must be in [0, 1]");
    require(occlusion_bias >= 0.0, "occlusion_bias must be >= 0");
    require(std::isfinite(camera_pan_gain), "camera_pan_gain must be finite");
    require(background_scale >= 1, "background_scale must be >= 1");
    require(kPlayerHeightM * px_per_meter < image_height, "player boxes do not fit in the image");
    if (render_backgrounds) {
        const int bw = (image_width + background_scale - 1) / background_scale;
        const int bh = (image_height + background_scale - 1) / background_scale;
        require(bw >= 16 && bh >= 16, "background must be at least 16x16 pixels");
    }
}

TrackFrames GroundTruth::frames() const {
    TrackFrames out(static_cast<std::size_t>(config.n_frames));
    for (const GtTrack& t : tracks) {
        for (const auto& [frame, box] : t.boxes) out[frame - 1].push_back({t.id, box, 1.0});
    }
    return out;
}

std::size_t GroundTruth::visible_boxes() const {
    std::size_t n = 0;
    for (const GtTrack& t : tracks) n += t.boxes.size();
    return n;
}

GroundTruth generate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Rng rng(mix_seed(cfg.seed, 1));
    GroundTruth gt;
    gt.config = cfg;

    const double x_lo = kPitchMarginM;
    const double x_hi = cfg.pitch_length - kPitchMarginM;
    const double y_lo = kPitchMarginM;
    const double y_hi = cfg.pitch_width - kPitchMarginM;
    if (x_hi <= x_lo || y_hi <= y_lo) throw std::invalid_argument("overcrowded scenario");
    const double usable = (x_hi - x_lo) * (y_hi - y_lo);
    if (cfg.n_tracks * kMinSpacingM * kMinSpacingM > 0.5 * usable) {
        throw std::invalid_argument("overcrowded scenario");
    }

    const int n = cfg.n_tracks;
    std::vector<Vec2> pos;
    pos.reserve(n);
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
            const Vec2 p{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
            placed = std::all_of(pos.begin(), pos.end(), [&](const Vec2& q) {
                return std::hypot(p.x - q.x, p.y - q.y) >= kMinSpacingM;
            });
            if (placed) pos.push_back(p);
        }
        if (!placed) throw std::invalid_argument("overcrowded scenario");
    }

    // Stratified hardness so every scenario has the same spread of easy and
    // hard players, then shuffled over identities.
    std::vector<double> hardness(n);
    for (int k = 0; k < n; ++k) {
        const double u = (k + rng.uniform()) / n;
        hardness[k] = u * u;
    }
    for (int k = n - 1; k > 0; --k) std::swap(hardness[k], hardness[rng.below(k + 1)]);

    const int team0 = static_cast<int>(std::lround(cfg.team_split * n));
    gt.team_centers = {random_unit(rng), random_unit(rng)};
    gt.tracks.resize(n);
    for (int i = 0; i < n; ++i) {
        gt.tracks[i].id = i + 1;
        gt.tracks[i].team = i < team0 ? 0 : 1;
        gt.tracks[i].hardness = hardness[i];
        gt.true_embeddings[i + 1] = random_unit(rng);
    }

    const double dt = 1.0 / cfg.fps;
    std::vector<Vec2> vel(n), target(pos);
    std::vector<double> retarget_at(n);
    for (int i = 0; i < n; ++i) retarget_at[i] = rng.uniform(0.0, 3.0);
    const double partner_prob = cfg.occlusion_bias / (1.0 + cfg.occlusion_bias);

    Rng tex_rng(mix_seed(cfg.seed, 3));
    const PitchTexture texture(tex_rng, cfg.px_per_meter);
    const int bg_w = (cfg.image_width + cfg.background_scale - 1) / cfg.background_scale;
    const int bg_h = (cfg.image_height + cfg.background_scale - 1) / cfg.background_scale;

    const double box_h = kPlayerHeightM * cfg.px_per_meter;
    const double box_w = kPlayerAspect * box_h;
    const Vec2 pitch_center{0.5 * cfg.pitch_length, 0.5 * cfg.pitch_width};
    Vec2 prev_offset;

    for (int f = 1; f <= cfg.n_frames; ++f) {
        const double t = (f - 1) * dt;
        if (f > 1) {
            for (int i = 0; i < n; ++i) {
                if (t >= retarget_at[i]) {
                    retarget_at[i] = t + rng.uniform(2.0, 5.0);
                    if (n > 1 && rng.bernoulli(partner_prob)) {
                        auto j = static_cast<int>(rng.below(n - 1));
                        if (j >= i) ++j;
                        target[i] = {pos[j].x + rng.normal(0.0, 1.0), pos[j].y + rng.normal(0.0, 1.0)};
                    } else {
                        target[i] = {rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
                    }
                    target[i].x = std::clamp(target[i].x, x_lo, x_hi);
                    target[i].y = std::clamp(target[i].y, y_lo, y_hi);
                }
                const double w2 = kSmoothingOmega * kSmoothingOmega;
                vel[i].x += (w2 * (target[i].x - pos[i].x) - 2.0 * kSmoothingOmega * vel[i].x) * dt;
                vel[i].y += (w2 * (target[i].y - pos[i].y) - 2.0 * kSmoothingOmega * vel[i].y) * dt;
                const double speed = std::hypot(vel[i].x, vel[i].y);
                if (speed > cfg.max_speed) {
                    vel[i].x *= cfg.max_speed / speed;
                    vel[i].y *= cfg.max_speed / speed;
                }
                pos[i].x += vel[i].x * dt;
                pos[i].y += vel[i].y * dt;
                if (pos[i].x < 0.0 || pos[i].x > cfg.pitch_length) {
                    pos[i].x = std::clamp(pos[i].x, 0.0, cfg.pitch_length);
                    vel[i].x = 0.0;
                }
                if (pos[i].y < 0.0 || pos[i].y > cfg.pitch_width) {
                    pos[i].y = std::clamp(pos[i].y, 0.0, cfg.pitch_width);
                    vel[i].y = 0.0;
                }
            }
        }

        Vec2 centroid;
        for (const Vec2& p : pos) {
            centroid.x += p.x / n;
            centroid.y += p.y / n;
        }
        const Vec2 cam{pitch_center.x + cfg.camera_pan_gain * (centroid.x - pitch_center.x),
                       pitch_center.y + cfg.camera_pan_gain * (centroid.y - pitch_center.y)};
        const Vec2 offset{cam.x * cfg.px_per_meter - 0.5 * cfg.image_width,
                          cam.y * cfg.px_per_meter - 0.5 * cfg.image_height};
        if (f == 1) {
            gt.camera_warp_per_frame.push_back(Warp::identity());
        } else {
            gt.camera_warp_per_frame.push_back(Warp::translation(offset.x - prev_offset.x, offset.y - prev_offset.y));
        }
        prev_offset = offset;

        for (int i = 0; i < n; ++i) {
            const double foot_x = pos[i].x * cfg.px_per_meter - offset.x;
            const double foot_y = pos[i].y * cfg.px_per_meter - offset.y;
            const BoundingBox box{foot_x - 0.5 * box_w, foot_y - box_h, box_w, box_h};
            if (box.x >= 0.0 && box.y >= 0.0 && box.right() <= cfg.image_width &&
                box.bottom() <= cfg.image_height) {
                gt.tracks[i].boxes.emplace(f, box);
            }
        }

        if (cfg.render_backgrounds) {
            GrayImage bg(bg_w, bg_h);
            const double s = cfg.background_scale;
            for (int y = 0; y < bg_h; ++y) {
                for (int x = 0; x < bg_w; ++x) bg.at(x, y) = texture(x * s + offset.x, y * s + offset.y);
            }
            gt.backgrounds.push_back(std::move(bg));
        }
    }
    return gt;
}

void QualityProfile::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(miss_rate >= 0.0 && miss_rate <= 1.0, "miss_rate must be in [0, 1]");
    require(fp_rate >= 0.0 && std::isfinite(fp_rate), "fp_rate must be >= 0");
    require(loc_sigma >= 0.0, "loc_sigma must be >= 0");
    require(conf_sigma >= 0.0, "conf_sigma must be >= 0");
    require(embed_sigma >= 0.0, "embed_sigma must be >= 0");
    require(team_similarity >= 0.0 && team_similarity <= 1.0, "team_similarity must be in [0, 1]");
    require(miss_hardness_gain >= 0.0, "miss_hardness_gain must be >= 0");
}

std::string_view to_string(DetectorModel d) {
    switch (d) {
        case DetectorModel::original: return "Original";
        case DetectorModel::normal: return "Normal";
        case DetectorModel::q40: return "40";
        case DetectorModel::q50: return "50";
    }
    return "?";
}

std::string_view to_string(Quality q) {
    switch (q) {
        case Quality::n: return "N";
        case Quality::q40: return "40";
        case Quality::q50: return "50";
    }
    return "?";
}

DetectorModel parse_detector(std::string_view s) {
    for (DetectorModel d : kDetectorModels) {
        if (s == to_string(d)) return d;
    }
    throw std::invalid_argument("unknown detector model '" + std::string(s) + "'");
}

Quality parse_quality(std::string_view s) {
    for (Quality q : kQualities) {
        if (s == to_string(q)) return q;
    }
    throw std::invalid_argument("unknown dataset quality '" + std::string(s) + "'");
}

bool trained_on(DetectorModel d, Quality q) {
    return (d == DetectorModel::normal && q == Quality::n) || (d == DetectorModel::q40 && q == Quality::q40) ||
           (d == DetectorModel::q50 && q == Quality::q50);
}

std::map<int, double> resolve_miss_probabilities(const GroundTruth& gt, const QualityProfile& profile) {
    std::map<int, double> out;
    const double m = profile.miss_rate;
    if (profile.miss_hardness_gain == 0.0 || m <= 0.0 || m >= 1.0) {
        for (const GtTrack& t : gt.tracks) out[t.id] = m;
        return out;
    }
    double total = 0.0;
    for (const GtTrack& t : gt.tracks) total += static_cast<double>(t.boxes.size());
    auto mean_at = [&](double offset) {
        double acc = 0.0;
        for (const GtTrack& t : gt.tracks) {
            acc += static_cast<double>(t.boxes.size()) *
                   logistic(offset + profile.miss_hardness_gain * (t.hardness - 0.5));
        }
        return total > 0.0 ? acc / total : m;
    };
    double lo = -60.0;
    double hi = 60.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_at(mid) < m ? lo : hi) = mid;
    }
    const double offset = 0.5 * (lo + hi);
    for (const GtTrack& t : gt.tracks) {
        out[t.id] = logistic(offset + profile.miss_hardness_gain * (t.hardness - 0.5));
    }
    return out;
}

DetectionFrames degrade(const GroundTruth& gt, const QualityProfile& profile, std::uint64_t seed) {
    profile.validate();
    Rng rng(mix_seed(seed, 0xD5));
    const auto miss = resolve_miss_probabilities(gt, profile);
    const TrackFrames frames = gt.frames();
    const auto& cfg = gt.config;
    const double box_h = kPlayerHeightM * cfg.px_per_meter;
    const double box_w = kPlayerAspect * box_h;

    std::map<int, const GtTrack*> by_id;
    for (const GtTrack& t : gt.tracks) by_id[t.id] = &t;

    DetectionFrames out(frames.size());
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
        const int frame = static_cast<int>(fi) + 1;
        auto& dets = out[fi];
        for (const TrackedBox& g : frames[fi]) {
            const GtTrack& track = *by_id.at(g.id);
            if (rng.bernoulli(miss.at(g.id))) continue;
            BoundingBox box = g.box;
            if (profile.loc_sigma > 0.0) {
                for (int attempt = 0; attempt < 200; ++attempt) {
                    const std::array<double, 4> z{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
                    const BoundingBox cand = jitter(g.box, profile.loc_sigma, z);
                    if (iou(cand, g.box) >= kMatchGate) {
                        box = cand;
                        break;
                    }
                }
            }
            const double conf_mean = profile.conf_mean - profile.conf_hardness_drop * track.hardness;
            const double conf = clamp01(rng.normal(conf_mean, profile.conf_sigma));

            const Embedding& own = gt.true_embeddings.at(g.id);
            const Embedding& team = gt.team_centers[static_cast<std::size_t>(track.team)];
            Embedding emb(kEmbeddingDim);
            for (int k = 0; k < kEmbeddingDim; ++k) {
                emb[k] = profile.team_similarity * team[k] + (1.0 - profile.team_similarity) * own[k] +
                         profile.embed_sigma * rng.normal();
            }
            normalize(emb);
            dets.push_back({frame, box, conf, std::move(emb)});
        }

        const int n_fp = rng.poisson(profile.fp_rate);
        for (int k = 0; k < n_fp; ++k) {
            for (int attempt = 0; attempt < 50; ++attempt) {
                const double scale = rng.uniform(0.8, 1.2);
                const double w = box_w * scale;
                const double h = box_h * scale;
                BoundingBox cand;
                if (!frames[fi].empty() && rng.bernoulli(0.5)) {
                    // clutter next to a player
                    const BoundingBox& anchor = frames[fi][rng.below(frames[fi].size())].box;
                    const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
                    const double dx = side * rng.uniform(0.6, 1.6) * anchor.w;
                    const double dy = rng.normal(0.0, 0.3 * anchor.h);
                    cand = BoundingBox::from_center(anchor.center_x() + dx, anchor.center_y() + dy, w, h);
                } else {
                    cand = {rng.uniform(0.0, std::max(1.0, cfg.image_width - w)),
                            rng.uniform(0.0, std::max(1.0, cfg.image_height - h)), w, h};
                }
                const bool clear = std::none_of(frames[fi].begin(), frames[fi].end(), [&](const TrackedBox& g) {
                    return iou(cand, g.box) >= kMatchGate;
                });
                if (!clear) continue;
                const double conf = clamp01(rng.normal(profile.fp_conf_mean, profile.conf_sigma));
                dets.push_back({frame, cand, conf, random_unit(rng)});
                break;
            }
        }
    }
    return out;
}

std::pair<double, double> expected_recall_precision(const GroundTruth& gt, const QualityProfile& profile) {
    const auto miss = resolve_miss_probabilities(gt, profile);
    double visible = 0.0;
    double tp = 0.0;
    for (const GtTrack& t : gt.tracks) {
        visible += static_cast<double>(t.boxes.size());
        tp += static_cast<double>(t.boxes.size()) * (1.0 - miss.at(t.id));
    }
    const double fp = profile.fp_rate * gt.n_frames();
    const double recall = visible > 0.0 ? tp / visible : 0.0;
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    return {recall, precision};
}

QualityProfile calibrate_profile(double target_recall, double target_precision, const QualityProfile& base,
                                 const GroundTruth& gt, int verify_seeds) {
    if (!(target_recall > 0.0 && target_recall <= 1.0)) {
        throw std::invalid_argument("target_recall must be in (0, 1]");
    }
    if (!(target_precision > 0.0 && target_precision <= 1.0)) {
        throw std::invalid_argument("target_precision must be in (0, 1]");
    }
    const auto visible = static_cast<double>(gt.visible_boxes());
    if (visible <= 0.0) throw std::invalid_argument("ground truth has no visible boxes");

    QualityProfile p = base;
    p.miss_rate = 1.0 - target_recall;
    const double tp_per_frame = target_recall * visible / gt.n_frames();
    p.fp_rate = target_precision >= 1.0 ? 0.0 : tp_per_frame * (1.0 - target_precision) / target_precision;
    if (p.fp_rate > 50.0) {
        throw std::invalid_argument("target_precision too low: fp_rate would exceed 50 per frame");
    }
    p.validate();

    if (verify_seeds > 0) {
        const TrackFrames truth = gt.frames();
        double recall = 0.0;
        double precision = 0.0;
        for (int s = 1; s <= verify_seeds; ++s) {
            const auto score = detection_pr(truth, degrade(gt, p, mix_seed(0xCA11B, s)), kMatchGate);
            recall += score.recall / verify_seeds;
            precision += score.precision / verify_seeds;
        }
        if (std::abs(recall - target_recall) > 0.005 || std::abs(precision - target_precision) > 0.005) {
            throw std::runtime_error("calibration verification failed for " + p.name + ": simulated recall " +
                                     std::to_string(recall) + ", precision " + std::to_string(precision));
        }
    }
    return p;
}

double jitter_motp(double loc_sigma) {
    Rng rng(0x5EED);
    const BoundingBox unit{0.0, 0.0, 0.4, 1.0};
    double acc = 0.0;
    int accepted = 0;
    for (int i = 0; i < 6000; ++i) {
        const std::array<double, 4> z{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const double v = iou(jitter(unit, loc_sigma, z), unit);
        if (v < kMatchGate) continue;
        acc += 1.0 - v;
        ++accepted;
    }
    return accepted > 0 ? acc / accepted : 0.0;
}

double loc_sigma_for_motp(double motp) {
    if (motp <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    if (jitter_motp(hi) <= motp) return hi;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (jitter_motp(mid) < motp ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

QualityProfile default_profile(DetectorModel d, Quality q) {
    QualityProfile p;
    p.name = std::string(to_string(d)) + "/" + std::string(to_string(q));
    const auto qi = reference::index(q);
    const auto di = reference::index(d);

    // Localization noise follows the reference MOTP, kept strictly increasing
    // with degradation. Solved once per process.
    static const auto sigma_table = [] {
        std::array<std::array<double, 4>, 3> table{};
        for (std::size_t dj = 0; dj < 4; ++dj) {
            double motp = reference::kMotp[0][dj];
            table[0][dj] = loc_sigma_for_motp(motp);
            for (std::size_t k = 1; k < 3; ++k) {
                motp = std::max(reference::kMotp[k][dj], motp + 0.005);
                table[k][dj] = loc_sigma_for_motp(motp);
            }
        }
        return table;
    }();
    p.loc_sigma = sigma_table[qi][di];

    constexpr std::array<double, 3> embed_sigma{0.03, 0.05, 0.08};
    p.embed_sigma = embed_sigma[qi];
    p.team_similarity = 0.5;
    p.fp_conf_mean = 0.3;
    p.conf_sigma = 0.08;

    if (d == DetectorModel::original) {
        p.conf_mean = 0.75;
        p.conf_hardness_drop = 0.2;
        p.miss_hardness_gain = 8.0;
        return p;
    }
    // Trained detectors: confidence on hard players collapses as quality
    // degrades and the detector is further from its training quality.
    constexpr std::array<std::array<double, 3>, 3> drop{{
        // N, 40, 50 for Normal, 40, 50 detectors
        {0.30, 0.55, 0.45},
        {0.30, 0.45, 0.64},
        {0.30, 0.45, 0.62},
    }};
    constexpr std::array<std::array<double, 3>, 3> gain{{
        {1.0, 3.0, 3.0},
        {1.0, 2.0, 3.0},
        {1.0, 2.0, 3.0},
    }};
    p.conf_mean = 0.95;
    p.conf_hardness_drop = drop[di - 1][qi];
    p.miss_hardness_gain = gain[di - 1][qi];
    return p;
}

ProfileGrid default_profile_grid(const GroundTruth& gt, int verify_seeds) {
    ProfileGrid grid;
    for (Quality q : kQualities) {
        for (DetectorModel d : kDetectorModels) {
            const auto qi = reference::index(q);
            const auto di = reference::index(d);
            grid[{d, q}] = calibrate_profile(reference::kRecall[qi][di] / 100.0,
                                             reference::kPrecision[qi][di] / 100.0, default_profile(d, q), gt,
                                             verify_seeds);
        }
    }
    return grid;
}

DetectionFrames perturb_embeddings(const DetectionFrames& dets, double extra_sigma, std::uint64_t seed) {
    if (extra_sigma <= 0.0) return dets;
    Rng rng(mix_seed(seed, 0xE3B));
    DetectionFrames out = dets;
    for (auto& frame : out) {
        for (Detection& d : frame) {
            if (!d.embedding) continue;
            for (double& v : *d.embedding) v += extra_sigma * rng.normal();
            normalize(*d.embedding);
        }
    }
    return out;
}

}  // namespace pitchtrack
