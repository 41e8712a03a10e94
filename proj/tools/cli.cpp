#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "arreg/error.hpp"
#include "arreg/glb.hpp"
#include "arreg/replay.hpp"
#include "arreg/server.hpp"
#include "arreg/session_io.hpp"

namespace arreg::cli {

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::RangeError:
    case ErrorCode::DomainError:
      return kUsage;
    case ErrorCode::Io:
    case ErrorCode::ModelLoad:
      return kRuntime;
    default:
      return kInput;
  }
}

std::optional<std::pair<double, double>> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return std::nullopt;
  double a = 0.0, b = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto r1 = std::from_chars(begin, begin + comma, a);
  auto r2 = std::from_chars(begin + comma + 1, end, b);
  if (r1.ec != std::errc{} || r1.ptr != begin + comma || r2.ec != std::errc{} || r2.ptr != end) return std::nullopt;
  return std::make_pair(a, b);
}

std::string format_aabb(const Box3& b) {
  if (b.min.x == b.min.y && b.min.y == b.min.z && b.max.x == b.max.y && b.max.y == b.max.z) {
    return fmt::format("[{},{}]^3", b.min.x, b.max.x);
  }
  return fmt::format("[{},{}]x[{},{}]x[{},{}]", b.min.x, b.max.x, b.min.y, b.max.y, b.min.z, b.max.z);
}

struct SynthFlags {
  std::string dof = "yaw";
  std::string scale_mismatch = "1,1";
  std::string out;
  SynthConfig cfg;
};

int cmd_synth(SynthFlags& f, std::ostream& out, std::ostream& err) {
  const auto dof = parse_dof(f.dof);
  if (!dof || *dof == DofLabel::Static) {
    err << "error: --dof must be pitch, yaw or roll\n";
    return kUsage;
  }
  f.cfg.dof = *dof;
  const auto mismatch = parse_pair(f.scale_mismatch);
  if (!mismatch) {
    err << "error: --scale-mismatch expects SW,SH\n";
    return kUsage;
  }
  f.cfg.scale_mismatch = *mismatch;
  validate(f.cfg);

  const Session s = synth_session(f.cfg);
  const std::string text = write_session(s.header, s.frames);
  if (f.out.empty() || f.out == "-") {
    out << text;
    return kOk;
  }
  std::ofstream file(f.out, std::ios::binary);
  if (!file || !(file << text) || !file.flush()) {
    err << "error: cannot write " << f.out << '\n';
    return kRuntime;
  }
  return kOk;
}

struct ReplayFlags {
  std::string session;
  std::string model;
  std::string auto_scale = "off";
  double alpha = 1.0;
  bool uniform = false;
  std::string metrics;
  std::string summary;
};

int cmd_replay(const ReplayFlags& f, std::ostream& out, std::ostream& err) {
  const auto mode = parse_auto_scale_mode(f.auto_scale);
  if (!mode) {
    err << "error: --auto-scale must be off, oneshot or continuous\n";
    return kUsage;
  }
  if (!(f.alpha > 0.0 && f.alpha <= 1.0)) {
    err << "error: --alpha must lie in (0, 1]\n";
    return kUsage;
  }
  std::ifstream in(f.session);
  if (!in) {
    err << "error: cannot open session " << f.session << '\n';
    return kRuntime;
  }
  SessionReader reader(in);
  const std::string model_ref = f.model.empty() ? reader.header().model_ref : f.model;
  const auto base_dir = f.model.empty() ? std::filesystem::path(f.session).parent_path() : std::filesystem::path{};
  auto model = std::make_shared<const Mesh>(load_model(model_ref, base_dir));

  ReplayOptions opts;
  opts.auto_scale = *mode;
  opts.smoothing_alpha = f.alpha;
  opts.uniform_scale = f.uniform;
  Replayer replayer(reader.header(), model, opts);

  std::ofstream metrics_file;
  if (!f.metrics.empty()) {
    metrics_file.open(f.metrics, std::ios::binary);
    if (!metrics_file) {
      err << "error: cannot write " << f.metrics << '\n';
      return kRuntime;
    }
  }
  std::ostream& csv = f.metrics.empty() ? out : metrics_file;
  csv << metrics_csv_header() << '\n';

  std::vector<MetricsRow> rows;
  while (auto frame = reader.next()) {
    std::optional<MetricsRow> row;
    try {
      row = replayer.process(*frame);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("line {}: frame seq {}: {}", reader.line_no(), frame->seq, e.what()));
    }
    if (row) {
      csv << metrics_csv_line(*row) << '\n';
      rows.push_back(*row);
    }
  }
  csv.flush();

  const std::string summary = rows.empty() ? std::string("{\n  \"n_frames\": 0\n}") : summary_json(aggregate(rows));
  if (!f.summary.empty()) {
    std::ofstream file(f.summary, std::ios::binary);
    if (!file || !(file << summary << '\n')) {
      err << "error: cannot write " << f.summary << '\n';
      return kRuntime;
    }
  } else if (!f.metrics.empty()) {
    out << summary << '\n';
  } else {
    err << summary << '\n';
  }
  return kOk;
}

int cmd_glb_info(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open " << path << '\n';
    return kRuntime;
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const glb::GlbModel model = glb::parse_glb(bytes);
  out << fmt::format("{} vertices, AABB {}\n", model.mesh.positions.size(), format_aabb(mesh_aabb(model.mesh)));
  out << fmt::format("primitives: {}\n", model.primitive_count);
  out << fmt::format("triangles: {}\n", model.mesh.indices.size());
  out << fmt::format("node transforms applied: {}\n", model.mesh.node_transform_applied ? "yes" : "no");
  for (const auto& w : model.warnings) out << "warning: " << w << '\n';
  return kOk;
}

int cmd_serve(const ServerConfig& cfg, std::ostream& out) {
  Server server(cfg);
  server.start();
  fmt::print(out, "listening: ws://{}:{}/session, tcp {}:{}, assets {}\n", cfg.bind_addr, server.ws_port(),
             cfg.bind_addr, server.tcp_port(), cfg.asset_dir.string());
  out.flush();
  server.run_until_signal();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markerless AR head registration: synthesize, replay and serve tracking sessions"};
  app.require_subcommand(1);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic pitch/yaw/roll sweep session");
  synth_cmd->add_option("--dof", synth.dof, "Rotation axis: pitch, yaw or roll")->capture_default_str();
  synth_cmd->add_option("--max-deg", synth.cfg.max_deg, "Peak rotation, degrees (0, 90)")->capture_default_str();
  synth_cmd->add_option("--frames", synth.cfg.frames, "Number of frames (>= 2)")->capture_default_str();
  synth_cmd->add_option("--noise-rot-deg", synth.cfg.noise_rot_deg, "Rotation noise sigma, degrees")
      ->capture_default_str();
  synth_cmd->add_option("--noise-trans", synth.cfg.noise_trans, "Translation noise sigma, fraction of depth")
      ->capture_default_str();
  synth_cmd->add_option("--scale-mismatch", synth.scale_mismatch, "Model/head size ratio SW,SH")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.cfg.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--depth", synth.cfg.depth, "Head center depth")->capture_default_str();
  synth_cmd->add_option("--image-w", synth.cfg.image_w, "Image width, pixels")->capture_default_str();
  synth_cmd->add_option("--image-h", synth.cfg.image_h, "Image height, pixels")->capture_default_str();
  synth_cmd->add_option("--fov", synth.cfg.fov_v_deg, "Vertical field of view, degrees")->capture_default_str();
  synth_cmd->add_flag("--return-sweep", synth.cfg.return_sweep, "Sweep back to 0 after the peak");
  synth_cmd->add_option("--out", synth.out, "Output session file (default stdout)");

  ReplayFlags replay;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a session through registration and score it");
  replay_cmd->add_option("session", replay.session, "Session file")->required();
  replay_cmd->add_option("--model", replay.model, "GLB path or builtin:* (default: session header)");
  replay_cmd->add_option("--auto-scale", replay.auto_scale, "off, oneshot or continuous")->capture_default_str();
  replay_cmd->add_option("--alpha", replay.alpha, "Pose smoothing weight in (0, 1]")->capture_default_str();
  replay_cmd->add_flag("--uniform", replay.uniform, "Uniform (geometric mean) auto-scale");
  replay_cmd->add_option("--metrics", replay.metrics, "Metrics CSV path (default stdout)");
  replay_cmd->add_option("--summary", replay.summary, "Summary JSON path");

  ServerConfig serve;
  std::string assets = ".";
  std::string record_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Run the session service");
  serve_cmd->add_option("--port", serve.ws_port, "HTTP/web-socket port")->capture_default_str();
  serve_cmd->add_option("--tcp-port", serve.tcp_port, "Line-delimited TCP port")->capture_default_str();
  serve_cmd->add_option("--bind", serve.bind_addr, "Bind address")->capture_default_str();
  serve_cmd->add_option("--assets", assets, "Asset directory")->capture_default_str();
  serve_cmd->add_option("--record-dir", record_dir, "Recording directory (default <assets>/recordings)");

  std::string glb_path;
  auto* glb_cmd = app.add_subcommand("glb-info", "Summarize a GLB model");
  glb_cmd->add_option("file", glb_path, "GLB file")->required();

  std::vector<std::string> argv_store(args.begin(), args.end());
  if (argv_store.empty()) argv_store.emplace_back("arreg");
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out, err);
    if (*replay_cmd) return cmd_replay(replay, out, err);
    if (*glb_cmd) return cmd_glb_info(glb_path, out, err);
    if (*serve_cmd) {
      serve.asset_dir = assets;
      serve.record_dir = record_dir;
      return cmd_serve(serve, out);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace arreg::cli
