#include "pitchtrack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pitchtrack/reference_values.hpp"

namespace pitchtrack {

namespace {

using nlohmann::json;

class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw std::invalid_argument("expected object for " + name_);
    }

    void real(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw std::invalid_argument(std::string("expected real for ") + key);
            out = v->get<double>();
        }
    }
    void real(const char* key, std::optional<double>& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw std::invalid_argument(std::string("expected real for ") + key);
            out = v->get<double>();
        }
    }
    void integer(const char* key, int& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) throw std::invalid_argument(std::string("expected integer for ") + key);
            out = v->get<int>();
        }
    }
    void seed(const char* key, std::uint64_t& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned()) {
                throw std::invalid_argument(std::string("expected non-negative integer for ") + key);
            }
            out = v->get<std::uint64_t>();
        }
    }
    void boolean(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) throw std::invalid_argument(std::string("expected boolean for ") + key);
            out = v->get<bool>();
        }
    }
    const json* take(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + name_);
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

void parse_scenario(const json& j, ScenarioConfig& s) {
    Section sec(j, "scenario");
    sec.integer("n_tracks", s.n_tracks);
    sec.integer("n_frames", s.n_frames);
    sec.integer("fps", s.fps);
    sec.real("pitch_length", s.pitch_length);
    sec.real("pitch_width", s.pitch_width);
    sec.integer("image_width", s.image_width);
    sec.integer("image_height", s.image_height);
    sec.real("px_per_meter", s.px_per_meter);
    sec.real("max_speed", s.max_speed);
    sec.real("team_split", s.team_split);
    sec.real("occlusion_bias", s.occlusion_bias);
    sec.real("camera_pan_gain", s.camera_pan_gain);
    sec.integer("background_scale", s.background_scale);
    sec.boolean("render_backgrounds", s.render_backgrounds);
    sec.seed("seed", s.seed);
    sec.finish();
    s.validate();
}

void parse_override(const json& j, const std::string& cell, ProfileOverride& o) {
    Section sec(j, "profiles." + cell);
    sec.real("recall", o.recall);
    sec.real("precision", o.precision);
    sec.real("loc_sigma", o.loc_sigma);
    sec.real("conf_mean", o.conf_mean);
    sec.real("conf_sigma", o.conf_sigma);
    sec.real("fp_conf_mean", o.fp_conf_mean);
    sec.real("embed_sigma", o.embed_sigma);
    sec.real("team_similarity", o.team_similarity);
    sec.real("miss_hardness_gain", o.miss_hardness_gain);
    sec.real("conf_hardness_drop", o.conf_hardness_drop);
    sec.finish();
}

CellKey parse_cell(const std::string& key) {
    const auto slash = key.find('/');
    if (slash == std::string::npos) {
        throw std::invalid_argument("profile key '" + key + "' must be <detector>/<quality>, e.g. Normal/N");
    }
    return {parse_detector(key.substr(0, slash)), parse_quality(key.substr(slash + 1))};
}

void parse_tracker(const json& j, TrackerConfig& t) {
    Section sec(j, "tracker");
    sec.real("sigma_active", t.sigma_active);
    sec.real("lambda_new", t.lambda_new);
    sec.real("lambda_new_iou", t.lambda_new_iou);
    sec.real("tau_refine", t.tau_refine);
    sec.real("gamma_decay", t.gamma_decay);
    sec.real("lambda_nms", t.lambda_nms);
    if (const json* v = sec.take("motion")) {
        if (!v->is_string()) throw std::invalid_argument("expected string for motion");
        t.motion = parse_motion_model(v->get<std::string>());
    }
    sec.boolean("reid_enabled", t.reid_enabled);
    sec.integer("reid_patience", t.reid_patience);
    sec.real("tau_reid", t.tau_reid);
    sec.integer("embedding_buffer", t.embedding_buffer);
    sec.real("background_scale", t.background_scale);
    sec.finish();
    t.validate();
}

void parse_experiment(const json& j, GridSpec& g) {
    Section sec(j, "experiment");
    if (const json* v = sec.take("seeds")) {
        if (!v->is_array() || v->empty()) throw std::invalid_argument("expected nonempty integer list for seeds");
        g.seeds.clear();
        for (const json& s : *v) {
            if (!s.is_number_unsigned()) throw std::invalid_argument("expected integer list for seeds");
            g.seeds.push_back(s.get<std::uint64_t>());
        }
    }
    sec.real("iou_gate", g.iou_gate);
    if (const json* v = sec.take("reid_noise")) {
        Section noise(*v, "experiment.reid_noise");
        noise.real("original", g.reid_noise.original);
        noise.real("matched", g.reid_noise.matched);
        noise.real("mismatched", g.reid_noise.mismatched);
        noise.finish();
    }
    sec.integer("calibration_check_seeds", g.calibration_check_seeds);
    sec.integer("threads", g.threads);
    sec.finish();
    if (!(g.iou_gate > 0.0 && g.iou_gate < 1.0)) throw std::invalid_argument("iou_gate must be in (0, 1)");
    if (g.reid_noise.original < 0.0 || g.reid_noise.matched < 0.0 || g.reid_noise.mismatched < 0.0) {
        throw std::invalid_argument("reid_noise levels must be >= 0");
    }
    if (g.calibration_check_seeds < 0) throw std::invalid_argument("calibration_check_seeds must be >= 0");
    if (g.threads < 0) throw std::invalid_argument("threads must be >= 0");
}

void put(json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    ExperimentConfig cfg;
    Section top(root, "config");
    if (const json* s = top.take("scenario")) parse_scenario(*s, cfg.scenario);
    if (const json* p = top.take("profiles")) {
        if (!p->is_object()) throw std::invalid_argument("expected object for profiles");
        for (const auto& [key, value] : p->items()) parse_override(value, key, cfg.profiles[parse_cell(key)]);
    }
    if (const json* t = top.take("tracker")) parse_tracker(*t, cfg.tracker);
    if (const json* e = top.take("experiment")) parse_experiment(*e, cfg.experiment);
    top.finish();
    return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& c) {
    json j;
    const ScenarioConfig& s = c.scenario;
    j["scenario"] = {{"n_tracks", s.n_tracks},
                     {"n_frames", s.n_frames},
                     {"fps", s.fps},
                     {"pitch_length", s.pitch_length},
                     {"pitch_width", s.pitch_width},
                     {"image_width", s.image_width},
                     {"image_height", s.image_height},
                     {"px_per_meter", s.px_per_meter},
                     {"max_speed", s.max_speed},
                     {"team_split", s.team_split},
                     {"occlusion_bias", s.occlusion_bias},
                     {"camera_pan_gain", s.camera_pan_gain},
                     {"background_scale", s.background_scale},
                     {"render_backgrounds", s.render_backgrounds},
                     {"seed", s.seed}};
    json profiles = json::object();
    for (const auto& [cell, o] : c.profiles) {
        json p = json::object();
        put(p, "recall", o.recall);
        put(p, "precision", o.precision);
        put(p, "loc_sigma", o.loc_sigma);
        put(p, "conf_mean", o.conf_mean);
        put(p, "conf_sigma", o.conf_sigma);
        put(p, "fp_conf_mean", o.fp_conf_mean);
        put(p, "embed_sigma", o.embed_sigma);
        put(p, "team_similarity", o.team_similarity);
        put(p, "miss_hardness_gain", o.miss_hardness_gain);
        put(p, "conf_hardness_drop", o.conf_hardness_drop);
        profiles[std::string(to_string(cell.first)) + "/" + std::string(to_string(cell.second))] = p;
    }
    j["profiles"] = profiles;
    const TrackerConfig& t = c.tracker;
    j["tracker"] = {{"sigma_active", t.sigma_active},
                    {"lambda_new", t.lambda_new},
                    {"lambda_new_iou", t.lambda_new_iou},
                    {"tau_refine", t.tau_refine},
                    {"gamma_decay", t.gamma_decay},
                    {"lambda_nms", t.lambda_nms},
                    {"motion", std::string(to_string(t.motion))},
                    {"reid_enabled", t.reid_enabled},
                    {"reid_patience", t.reid_patience},
                    {"tau_reid", t.tau_reid},
                    {"embedding_buffer", t.embedding_buffer},
                    {"background_scale", t.background_scale}};
    const GridSpec& g = c.experiment;
    j["experiment"] = {{"seeds", g.seeds},
                       {"iou_gate", g.iou_gate},
                       {"reid_noise",
                        {{"original", g.reid_noise.original},
                         {"matched", g.reid_noise.matched},
                         {"mismatched", g.reid_noise.mismatched}}},
                       {"calibration_check_seeds", g.calibration_check_seeds},
                       {"threads", g.threads}};
    return j.dump(2) + "\n";
}

QualityProfile profile_with_override(DetectorModel d, Quality q, const ProfileOverride* o) {
    QualityProfile p = default_profile(d, q);
    if (o == nullptr) return p;
    if (o->loc_sigma) p.loc_sigma = *o->loc_sigma;
    if (o->conf_mean) p.conf_mean = *o->conf_mean;
    if (o->conf_sigma) p.conf_sigma = *o->conf_sigma;
    if (o->fp_conf_mean) p.fp_conf_mean = *o->fp_conf_mean;
    if (o->embed_sigma) p.embed_sigma = *o->embed_sigma;
    if (o->team_similarity) p.team_similarity = *o->team_similarity;
    if (o->miss_hardness_gain) p.miss_hardness_gain = *o->miss_hardness_gain;
    if (o->conf_hardness_drop) p.conf_hardness_drop = *o->conf_hardness_drop;
    p.validate();
    return p;
}

std::pair<double, double> cell_targets(DetectorModel d, Quality q, const ProfileOverride* o) {
    const auto qi = reference::index(q);
    const auto di = reference::index(d);
    double recall = reference::kRecall[qi][di] / 100.0;
    double precision = reference::kPrecision[qi][di] / 100.0;
    if (o != nullptr && o->recall) recall = *o->recall;
    if (o != nullptr && o->precision) precision = *o->precision;
    return {recall, precision};
}

ProfileGrid build_profile_grid(const ExperimentConfig& config, const GroundTruth& gt) {
    ProfileGrid grid;
    for (Quality q : kQualities) {
        for (DetectorModel d : kDetectorModels) {
            const auto it = config.profiles.find({d, q});
            const ProfileOverride* o = it == config.profiles.end() ? nullptr : &it->second;
            const auto [recall, precision] = cell_targets(d, q, o);
            grid[{d, q}] = calibrate_profile(recall, precision, profile_with_override(d, q, o), gt,
                                             config.experiment.calibration_check_seeds);
        }
    }
    return grid;
}

}  // namespace pitchtrack
