#include <benchmark/benchmark.h>

#include "images.hpp"
#include "pitchtrack/assignment.hpp"
#include "pitchtrack/metrics.hpp"
#include "pitchtrack/motion.hpp"
#include "pitchtrack/rng.hpp"
#include "pitchtrack/simulate.hpp"
#include "pitchtrack/tracker.hpp"

using namespace pitchtrack;

namespace {

GroundTruth scenario(int frames, bool backgrounds) {
    ScenarioConfig c;
    c.n_frames = frames;
    c.render_backgrounds = backgrounds;
    return generate_scenario(c);
}

void BM_SolveAssignment(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    CostMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform();
    }
    for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(m));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveAssignment)->RangeMultiplier(2)->Range(4, 128)->Complexity();

void BM_EccTranslation(benchmark::State& state) {
    const GrayImage t = images::smooth_image(64, 7);
    const GrayImage img = images::smooth_image(64, 7, 2.5, -1.5);
    for (auto _ : state) benchmark::DoNotOptimize(ecc_align(t, img, WarpKind::translation));
}
BENCHMARK(BM_EccTranslation);

void BM_EccEuclidean(benchmark::State& state) {
    const GrayImage t = images::smooth_image(64, 8);
    const GrayImage img = images::smooth_image(64, 8, 0.0, 0.0, 0.06);
    for (auto _ : state) benchmark::DoNotOptimize(ecc_align(t, img, WarpKind::euclidean));
}
BENCHMARK(BM_EccEuclidean);

void BM_TrackSequence(benchmark::State& state) {
    const GroundTruth gt = scenario(595, false);
    const DetectionFrames dets = degrade(gt, default_profile(DetectorModel::q50, Quality::q50), 1);
    TrackerConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(run_sequence(dets, cfg));
    state.SetItemsProcessed(state.iterations() * 595);
}
BENCHMARK(BM_TrackSequence)->Unit(benchmark::kMillisecond);

void BM_TrackSequenceWithCmc(benchmark::State& state) {
    const GroundTruth gt = scenario(200, true);
    const DetectionFrames dets = degrade(gt, default_profile(DetectorModel::normal, Quality::n), 1);
    TrackerConfig cfg;
    cfg.motion = MotionModel::cva_cmc;
    cfg.background_scale = gt.config.background_scale;
    for (auto _ : state) benchmark::DoNotOptimize(run_sequence(dets, cfg, gt.backgrounds));
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_TrackSequenceWithCmc)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
    const GroundTruth gt = scenario(595, false);
    const TrackFrames truth = gt.frames();
    const TrackerOutput out =
        run_sequence(degrade(gt, default_profile(DetectorModel::q40, Quality::q40), 2), TrackerConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(truth, out.frames));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

void BM_Degrade(benchmark::State& state) {
    const GroundTruth gt = scenario(595, false);
    const QualityProfile p = default_profile(DetectorModel::q50, Quality::q50);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(degrade(gt, p, ++seed));
}
BENCHMARK(BM_Degrade)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
