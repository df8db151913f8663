#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pitchtrack/config.hpp"
#include "pitchtrack/tracker.hpp"

namespace {

using namespace pitchtrack;

ExperimentConfig load_config(const std::string& path) { return path.empty() ? ExperimentConfig{} : read_config(path); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated soccer player tracking under video degradation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string seeds_text;
    std::string out;
    std::string motion;
    bool no_reid = false;
    bool check = false;
    int dump_trails = 0;

    auto* generate = app.add_subcommand("generate", "write ground truth and the twelve detection files");
    generate->add_option("--config", config_path, "JSON configuration file");
    generate->add_option("--seed", seeds_text, "scenario seed (default: scenario.seed)");
    generate->add_option("--out", out, "output directory")->required();

    std::string det_file;
    std::string gt_file;
    double iou_gate = 0.5;
    auto* track = app.add_subcommand("track", "track one MOT detection file");
    track->add_option("--det", det_file, "detection file (MOT format)")->required();
    track->add_option("--gt", gt_file, "ground truth file; prints metrics when given");
    track->add_option("--out", out, "result file")->default_val("results.txt");
    track->add_option("--config", config_path, "JSON configuration file (tracker section)");
    track->add_flag("--no-reid", no_reid, "disable re-identification");
    track->add_option("--motion", motion, "none, cva, cmc or cva+cmc");
    track->add_option("--iou-gate", iou_gate, "matching gate for the report")->default_val(0.5);

    auto* grid = app.add_subcommand("grid", "run the detector x ReID x dataset experiment grid");
    grid->add_option("--config", config_path, "JSON configuration file");
    grid->add_option("--seeds,--seed", seeds_text, "seed N or range N..M (default: experiment.seeds)");
    grid->add_option("--out", out, "output directory")->required();
    grid->add_flag("--no-reid", no_reid, "disable re-identification in every row");
    grid->add_option("--motion", motion, "none, cva, cmc or cva+cmc");
    grid->add_flag("--check", check, "exit 2 when an ordering check fails");
    grid->add_option("--dump-trails", dump_trails, "write track centers every K frames")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitUsage;
    }

    try {
        ExperimentConfig config = load_config(config_path);
        if (!motion.empty()) config.tracker.motion = parse_motion_model(motion);

        if (generate->parsed()) {
            const std::uint64_t seed = seeds_text.empty() ? config.scenario.seed : cli::parse_seed_range(seeds_text).at(0);
            return cli::cmd_generate(config, seed, out, std::cout);
        }
        if (track->parsed()) {
            cli::TrackArgs args;
            args.det_file = det_file;
            if (!gt_file.empty()) args.gt_file = gt_file;
            args.out_file = out;
            args.tracker = config.tracker;
            if (no_reid) args.tracker.reid_enabled = false;
            args.iou_gate = iou_gate;
            return cli::cmd_track(args, std::cout);
        }
        cli::GridArgs args;
        args.config = config;
        if (!seeds_text.empty()) args.config.experiment.seeds = cli::parse_seed_range(seeds_text);
        args.out_dir = out;
        args.check = check;
        args.dump_trails = dump_trails;
        if (no_reid) args.config.tracker.reid_enabled = false;
        return cli::cmd_grid(args, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
}
