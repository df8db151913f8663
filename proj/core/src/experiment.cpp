#include "pitchtrack/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "pitchtrack/reference_values.hpp"
#include "pitchtrack/rng.hpp"
#include "pitchtrack/tracker.hpp"

namespace pitchtrack {

namespace {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

Stat stat_of(const std::vector<double>& values) {
    Stat s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::string quality_label(Quality q) { return std::string(to_string(q)); }

std::string stat_cell(const Stat& s, int decimals) { return fmt::format("{:.{}f} ({:.{}f})", s.mean, decimals, s.std, decimals); }

}  // namespace

std::string_view to_string(ReidSetting r) {
    switch (r) {
        case ReidSetting::without: return "Without";
        case ReidSetting::original: return "Original";
        case ReidSetting::normal: return "Normal";
        case ReidSetting::q40: return "40";
        case ReidSetting::q50: return "50";
    }
    return "?";
}

ReidSetting parse_reid_setting(std::string_view s) {
    for (ReidSetting r : kReidSettings) {
        if (s == to_string(r)) return r;
    }
    throw std::invalid_argument("unknown ReID setting '" + std::string(s) + "'");
}

ReidSetting reid_for(DetectorModel d) {
    switch (d) {
        case DetectorModel::original: return ReidSetting::original;
        case DetectorModel::normal: return ReidSetting::normal;
        case DetectorModel::q40: return ReidSetting::q40;
        case DetectorModel::q50: return ReidSetting::q50;
    }
    return ReidSetting::without;
}

double reid_extra_sigma(ReidSetting r, Quality q, const ReidNoise& noise) {
    switch (r) {
        case ReidSetting::without: return -1.0;
        case ReidSetting::original: return noise.original;
        case ReidSetting::normal: return q == Quality::n ? noise.matched : noise.mismatched;
        case ReidSetting::q40: return q == Quality::q40 ? noise.matched : noise.mismatched;
        case ReidSetting::q50: return q == Quality::q50 ? noise.matched : noise.mismatched;
    }
    return -1.0;
}

const CellResult& GridResult::cell(std::uint64_t seed, Quality q, ReidSetting r, DetectorModel d) const {
    for (const CellResult& c : cells) {
        if (c.seed == seed && c.quality == q && c.reid == r && c.detector == d) return c;
    }
    throw std::out_of_range("no such grid cell");
}

GridResult run_grid(const ExperimentConfig& config, const GridOptions& options) {
    const GridSpec& spec = config.experiment;
    if (spec.seeds.empty()) throw std::invalid_argument("grid needs at least one seed");
    if (options.dump_trails < 0) throw std::invalid_argument("dump_trails must be >= 0");
    const std::vector<Quality> qualities =
        options.qualities.empty() ? std::vector<Quality>(kQualities.begin(), kQualities.end()) : options.qualities;
    const std::vector<DetectorModel> detectors = options.detectors.empty()
                                                     ? std::vector<DetectorModel>(kDetectorModels.begin(),
                                                                                  kDetectorModels.end())
                                                     : options.detectors;

    ScenarioConfig scenario = config.scenario;
    TrackerConfig tracker = config.tracker;
    scenario.render_backgrounds = uses_cmc(tracker.motion);
    if (scenario.render_backgrounds) tracker.background_scale = scenario.background_scale;
    tracker.validate();

    const std::size_t n_seeds = spec.seeds.size();
    std::vector<GroundTruth> truths(n_seeds);
    std::vector<ProfileGrid> grids(n_seeds);
    parallel_for(n_seeds, spec.threads, [&](std::size_t s) {
        ScenarioConfig sc = scenario;
        sc.seed = spec.seeds[s];
        truths[s] = generate_scenario(sc);
        grids[s] = build_profile_grid(config, truths[s]);
    });

    const std::size_t nq = qualities.size();
    const std::size_t nd = detectors.size();
    const std::size_t nr = kReidSettings.size();
    GridResult result;
    result.seeds = spec.seeds;
    result.cells.resize(n_seeds * nq * nr * nd);
    result.detectors.resize(n_seeds * nq * nd);
    std::vector<std::vector<TrailPoint>> trails(n_seeds * nq * nd);

    parallel_for(n_seeds * nq * nd, spec.threads, [&](std::size_t job) {
        const std::size_t s = job / (nq * nd);
        const std::size_t qi = (job / nd) % nq;
        const std::size_t di = job % nd;
        const std::uint64_t seed = spec.seeds[s];
        const Quality q = qualities[qi];
        const DetectorModel d = detectors[di];
        const GroundTruth& gt = truths[s];
        const TrackFrames truth = gt.frames();
        const auto cell_tag = static_cast<std::uint64_t>(4 * reference::index(q) + reference::index(d));

        const DetectionFrames dets = degrade(gt, grids[s].at({d, q}), mix_seed(seed, 0x100 + cell_tag));
        result.detectors[job] = {seed, q, d, detection_pr(truth, dets, spec.iou_gate)};

        const bool dump = options.dump_trails > 0 && trained_on(d, q);
        for (std::size_t ri = 0; ri < nr; ++ri) {
            const ReidSetting r = kReidSettings[ri];
            TrackerConfig tc = tracker;
            tc.reid_enabled = tracker.reid_enabled && r != ReidSetting::without;
            const double sigma = reid_extra_sigma(r, q, spec.reid_noise);
            TrackerOutput out =
                sigma > 0.0 ? run_sequence(perturb_embeddings(dets, sigma, mix_seed(seed, 0x200 + cell_tag)), tc,
                                           gt.backgrounds)
                            : run_sequence(dets, tc, gt.backgrounds);
            CellResult& cell = result.cells[((s * nq + qi) * nr + ri) * nd + di];
            cell = {seed, q, r, d, evaluate(truth, out.frames, spec.iou_gate)};

            if (dump && r == reid_for(d)) {
                auto& sink = trails[job];
                const int k = options.dump_trails;
                for (int f = 1; f <= gt.n_frames(); f += k) {
                    for (const TrackedBox& b : truth[f - 1]) {
                        sink.push_back({seed, q, "gt", f, b.id, b.box.center_x(), b.box.center_y()});
                    }
                }
                for (int f = 1; f <= static_cast<int>(out.frames.size()); f += k) {
                    for (const TrackedBox& b : out.frames[f - 1]) {
                        sink.push_back({seed, q, "track", f, b.id, b.box.center_x(), b.box.center_y()});
                    }
                }
            }
        }
    });

    for (auto& t : trails) result.trails.insert(result.trails.end(), t.begin(), t.end());
    return result;
}

std::vector<MotaTable> mota_tables(const GridResult& result) {
    std::vector<MotaTable> tables;
    for (Quality q : kQualities) {
        MotaTable table;
        table.quality = q;
        bool any = false;
        for (std::size_t ri = 0; ri < kReidSettings.size(); ++ri) {
            for (std::size_t di = 0; di < kDetectorModels.size(); ++di) {
                std::vector<double> values;
                for (const CellResult& c : result.cells) {
                    if (c.quality == q && c.reid == kReidSettings[ri] && c.detector == kDetectorModels[di]) {
                        values.push_back(100.0 * c.report.mota);
                    }
                }
                any = any || !values.empty();
                table.cells[ri][di] = stat_of(values);
            }
        }
        if (any) tables.push_back(table);
    }
    return tables;
}

std::vector<DetectorTable> detector_tables(const GridResult& result) {
    std::vector<DetectorTable> tables;
    for (Quality q : kQualities) {
        DetectorTable table;
        table.quality = q;
        bool any = false;
        for (std::size_t di = 0; di < kDetectorModels.size(); ++di) {
            const DetectorModel d = kDetectorModels[di];
            std::vector<double> motp, mt, pt, ml, recall, precision;
            for (const CellResult& c : result.cells) {
                if (c.quality != q || c.detector != d || c.reid != reid_for(d)) continue;
                motp.push_back(c.report.motp);
                mt.push_back(c.report.mt);
                pt.push_back(c.report.pt);
                ml.push_back(c.report.ml);
            }
            for (const DetectorResult& r : result.detectors) {
                if (r.quality != q || r.detector != d) continue;
                recall.push_back(100.0 * r.score.recall);
                precision.push_back(100.0 * r.score.precision);
            }
            any = any || !motp.empty();
            table.rows[di] = {d, stat_of(motp), stat_of(mt), stat_of(pt), stat_of(ml), stat_of(recall),
                              stat_of(precision)};
        }
        if (any) tables.push_back(table);
    }
    return tables;
}

std::vector<std::string> check_tables(const std::vector<MotaTable>& tables, double slack) {
    std::vector<std::string> failures;
    const auto orig = reference::index(DetectorModel::original);
    for (const MotaTable& t : tables) {
        const std::string q = quality_label(t.quality);
        for (std::size_t ri = 0; ri < kReidSettings.size(); ++ri) {
            const auto& row = t.cells[ri];
            const std::string rname(to_string(kReidSettings[ri]));
            for (std::size_t di = 0; di < row.size(); ++di) {
                if (di != orig && !(row[orig].mean < row[di].mean)) {
                    failures.push_back(fmt::format("dataset {}, ReID {}: Original detector ({:.2f}) is not below {} ({:.2f})",
                                                   q, rname, row[orig].mean, to_string(kDetectorModels[di]),
                                                   row[di].mean));
                }
            }
            double best = row[0].mean;
            for (const Stat& s : row) best = std::max(best, s.mean);
            for (std::size_t di = 0; di < row.size(); ++di) {
                if (trained_on(kDetectorModels[di], t.quality) && row[di].mean < best - slack) {
                    failures.push_back(fmt::format("dataset {}, ReID {}: matched detector {} ({:.2f}) trails the row maximum ({:.2f}) by more than {:.1f}",
                                                   q, rname, to_string(kDetectorModels[di]), row[di].mean, best, slack));
                }
            }
        }
    }
    for (std::size_t a = 0; a + 1 < tables.size(); ++a) {
        const MotaTable& better = tables[a];
        const MotaTable& worse = tables[a + 1];
        for (std::size_t ri = 0; ri < kReidSettings.size(); ++ri) {
            for (std::size_t di = 0; di < kDetectorModels.size(); ++di) {
                if (di == orig) continue;
                if (better.cells[ri][di].mean < worse.cells[ri][di].mean) {
                    failures.push_back(fmt::format("ReID {}, detector {}: MOTA rises from dataset {} ({:.2f}) to {} ({:.2f})",
                                                   to_string(kReidSettings[ri]), to_string(kDetectorModels[di]),
                                                   quality_label(better.quality), better.cells[ri][di].mean,
                                                   quality_label(worse.quality), worse.cells[ri][di].mean));
                }
            }
        }
    }
    return failures;
}

std::string cells_csv(const GridResult& result) {
    std::string out = "seed,quality,reid,detector,mota,motp,fp,fn,idsw,gt_total,matches,mt,pt,ml,recall,precision\n";
    for (const CellResult& c : result.cells) {
        const MetricsReport& m = c.report;
        out += fmt::format("{},{},{},{},{:.6f},{:.6f},{},{},{},{},{},{},{},{},{:.6f},{:.6f}\n", c.seed,
                           to_string(c.quality), to_string(c.reid), to_string(c.detector), m.mota, m.motp, m.fp, m.fn,
                           m.idsw, m.gt_total, m.matches_total, m.mt, m.pt, m.ml, m.recall, m.precision);
    }
    return out;
}

std::string mota_csv(const MotaTable& table, bool std_dev) {
    std::string out = "reid";
    for (DetectorModel d : kDetectorModels) out += fmt::format(",{}", to_string(d));
    out += '\n';
    for (std::size_t ri = 0; ri < kReidSettings.size(); ++ri) {
        out += to_string(kReidSettings[ri]);
        for (const Stat& s : table.cells[ri]) out += fmt::format(",{:.2f}", std_dev ? s.std : s.mean);
        out += '\n';
    }
    return out;
}

std::string motp_csv(const std::vector<DetectorTable>& tables, bool std_dev) {
    std::string out = "quality";
    for (DetectorModel d : kDetectorModels) out += fmt::format(",{}", to_string(d));
    out += '\n';
    for (const DetectorTable& t : tables) {
        out += quality_label(t.quality);
        for (const DetectorTableRow& r : t.rows) out += fmt::format(",{:.4f}", std_dev ? r.motp.std : r.motp.mean);
        out += '\n';
    }
    return out;
}

std::string detector_csv(const DetectorTable& table, bool std_dev) {
    std::string out = "detector,MOTP,MT,PT,ML,Recall,PRCN\n";
    for (const DetectorTableRow& r : table.rows) {
        auto v = [&](const Stat& s) { return std_dev ? s.std : s.mean; };
        out += fmt::format("{},{:.4f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f}\n", to_string(r.detector), v(r.motp), v(r.mt),
                           v(r.pt), v(r.ml), v(r.recall), v(r.precision));
    }
    return out;
}

std::string trails_csv(const GridResult& result) {
    std::string out = "seed,quality,source,frame,id,cx,cy\n";
    for (const TrailPoint& p : result.trails) {
        out += fmt::format("{},{},{},{},{},{:.2f},{:.2f}\n", p.seed, to_string(p.quality), p.source, p.frame, p.id,
                           p.cx, p.cy);
    }
    return out;
}

std::string tables_text(const std::vector<MotaTable>& mota, const std::vector<DetectorTable>& detectors) {
    std::string out;
    for (const MotaTable& t : mota) {
        out += fmt::format("MOTA (%), dataset {}: mean (std) over seeds\n", to_string(t.quality));
        out += fmt::format("{:<10}", "ReID");
        for (DetectorModel d : kDetectorModels) out += fmt::format("{:>16}", to_string(d));
        out += '\n';
        for (std::size_t ri = 0; ri < kReidSettings.size(); ++ri) {
            out += fmt::format("{:<10}", to_string(kReidSettings[ri]));
            for (const Stat& s : t.cells[ri]) out += fmt::format("{:>16}", stat_cell(s, 2));
            out += '\n';
        }
        out += '\n';
    }
    for (const DetectorTable& t : detectors) {
        out += fmt::format("Detectors, dataset {} (tracked with the matching ReID model)\n", to_string(t.quality));
        out += fmt::format("{:<10}{:>18}{:>14}{:>14}{:>14}{:>16}{:>16}\n", "Detector", "MOTP", "MT", "PT", "ML",
                           "Recall", "PRCN");
        for (const DetectorTableRow& r : t.rows) {
            out += fmt::format("{:<10}{:>18}{:>14}{:>14}{:>14}{:>16}{:>16}\n", to_string(r.detector),
                               stat_cell(r.motp, 4), stat_cell(r.mt, 1), stat_cell(r.pt, 1), stat_cell(r.ml, 1),
                               stat_cell(r.recall, 2), stat_cell(r.precision, 2));
        }
        out += '\n';
    }
    return out;
}

}  // namespace pitchtrack
