#include <random>

#include <benchmark/benchmark.h>

#include "arreg/mesh.hpp"
#include "arreg/replay.hpp"
#include "arreg/segmentation.hpp"
#include "arreg/session_io.hpp"

namespace {

using namespace arreg;

void BM_ProjectPoint(benchmark::State& state) {
  const auto k = intrinsics_from_fov(50.0, 640, 480);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> xy(-1, 1), z(0.25, 10);
  std::vector<Point3> pts(4096);
  for (auto& p : pts) p = {xy(rng), xy(rng), z(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_point(k, pts[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ProjectPoint);

void BM_ProjectMeshBbox(benchmark::State& state) {
  const auto k = intrinsics_from_fov(50.0, 640, 480);
  const Mesh head = make_ellipsoid_mesh(0.09, 0.12, 0.10);
  const RigidPose pose = compose(RigidPose::translation(0, 0, 0.5), RigidPose::rotation_y(20));
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_mesh_bbox(k, pose, {1.1, 0.9}, {330, 250}, head));
  }
}
BENCHMARK(BM_ProjectMeshBbox);

void BM_MaskToBox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(0, 1);
  std::vector<float> c(static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const float dx = (x - n / 2.0f) / (n / 3.0f), dy = (y - n / 2.0f) / (n / 2.5f);
      c[static_cast<std::size_t>(y) * n + x] = dx * dx + dy * dy < 1.0f ? 0.9f : 0.3f * u(rng);
    }
  }
  const SegMask m(n, n, std::move(c));
  for (auto _ : state) benchmark::DoNotOptimize(mask_to_box(m));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_MaskToBox)->Arg(128)->Arg(256)->Arg(512);

void BM_ReplayStep(benchmark::State& state) {
  SynthConfig cfg;
  cfg.frames = 1000;
  cfg.noise_rot_deg = 2;
  cfg.noise_trans = 0.01;
  cfg.scale_mismatch = {1.1, 1.1};
  const Session s = synth_session(cfg);
  ReplayOptions opts;
  opts.auto_scale = AutoScaleMode::Continuous;
  Replayer r(s.header, std::make_shared<const Mesh>(load_model(s.header.model_ref)), opts);
  std::size_t i = 0;
  for (auto _ : state) {
    auto f = s.frames[i % s.frames.size()];
    f.seq = static_cast<std::int64_t>(i++);
    benchmark::DoNotOptimize(r.process(f));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReplayStep);

void BM_SessionRoundTrip(benchmark::State& state) {
  SynthConfig cfg;
  cfg.frames = 1000;
  cfg.noise_rot_deg = 2;
  const Session s = synth_session(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(read_session_string(write_session(s.header, s.frames)));
  }
  state.SetItemsProcessed(state.iterations() * cfg.frames);
}
BENCHMARK(BM_SessionRoundTrip);

}  // namespace
BENCHMARK_MAIN();
