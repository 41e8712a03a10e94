#include "arreg/session_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "arreg/error.hpp"
#include "arreg/json_codec.hpp"

namespace arreg {

namespace {

using json_codec::Json;

void check_seq(std::optional<std::int64_t>& last, std::int64_t seq) {
  if (last && seq <= *last) {
    throw Error(ErrorCode::NonMonotonicSeq,
                "seq " + std::to_string(seq) + " does not follow " + std::to_string(*last));
  }
  last = seq;
}

// Box-Muller over mt19937_64 so the stream is identical on every standard
// library (std::normal_distribution is implementation-defined).
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

  double operator()(double sigma) {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return sigma * z;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return sigma * r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace

SessionWriter::SessionWriter(std::ostream& out, const SessionHeader& header) : out_(out) {
  out_ << json_codec::header_to_json(header).dump() << '\n';
}

void SessionWriter::write(const SessionFrame& frame) {
  if (!frame.pose) throw Error(ErrorCode::MalformedLine, "session frames must carry a pose");
  if (frame.box && frame.mask_rle) throw Error(ErrorCode::MalformedLine, "frame has both box and mask_rle");
  check_seq(last_seq_, frame.seq);
  out_ << json_codec::frame_to_json(frame).dump() << '\n';
}

SessionReader::SessionReader(std::istream& in) : in_(in) {
  std::string line;
  if (!std::getline(in_, line)) throw MalformedLineError(1, "missing header line");
  line_no_ = 1;
  Json doc;
  try {
    doc = Json::parse(line);
  } catch (const Json::exception& e) {
    throw MalformedLineError(1, std::string("invalid JSON: ") + e.what());
  }
  if (doc.is_object()) {
    auto v = doc.find("format_version");
    if (v != doc.end() && v->is_number_integer() && v->get<std::int64_t>() != kSessionFormatVersion) {
      throw Error(ErrorCode::FormatVersionMismatch, "session format_version " + v->dump() + " (expected " +
                                                        std::to_string(kSessionFormatVersion) + ")");
    }
  }
  try {
    header_ = json_codec::header_from_json(doc);
  } catch (const json_codec::FieldError& e) {
    throw MalformedLineError(1, e.what());
  }
}

std::optional<SessionFrame> SessionReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SessionFrame frame;
    try {
      frame = json_codec::frame_from_json(Json::parse(line));
    } catch (const Json::exception& e) {
      throw MalformedLineError(line_no_, std::string("invalid JSON: ") + e.what());
    } catch (const json_codec::FieldError& e) {
      throw MalformedLineError(line_no_, e.what());
    }
    try {
      check_seq(last_seq_, frame.seq);
    } catch (const Error& e) {
      throw Error(ErrorCode::NonMonotonicSeq, "line " + std::to_string(line_no_) + ": " + e.what());
    }
    return frame;
  }
  return std::nullopt;
}

std::string write_session(const SessionHeader& header, const std::vector<SessionFrame>& frames) {
  std::ostringstream out;
  SessionWriter writer(out, header);
  for (const auto& f : frames) writer.write(f);
  return out.str();
}

Session read_session(std::istream& in) {
  SessionReader reader(in);
  Session s{reader.header(), {}};
  while (auto f = reader.next()) s.frames.push_back(std::move(*f));
  return s;
}

Session read_session_string(const std::string& text) {
  std::istringstream in(text);
  return read_session(in);
}

Session read_session_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open session file " + path);
  return read_session(in);
}

void validate(const SynthConfig& cfg) {
  const auto bad = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
  if (cfg.frames < 2) bad("frames must be >= 2");
  if (!(cfg.max_deg > 0.0 && cfg.max_deg < 90.0)) bad("max_deg must lie in (0, 90)");
  for (double a : cfg.head_axes) {
    if (!(a > 0.0 && std::isfinite(a))) bad("head semi-axes must be positive");
  }
  if (!(cfg.depth > 0.0 && std::isfinite(cfg.depth))) bad("depth must be positive");
  if (!(cfg.noise_rot_deg >= 0.0) || !(cfg.noise_trans >= 0.0)) bad("noise sigmas must be >= 0");
  if (!(cfg.scale_mismatch.first > 0.0 && cfg.scale_mismatch.second > 0.0)) bad("scale mismatch must be positive");
  if (cfg.image_w < 1 || cfg.image_h < 1) bad("image dimensions must be >= 1");
  if (!(cfg.fov_v_deg > 0.0 && cfg.fov_v_deg < 180.0)) bad("fov must lie in (0, 180)");
  if (!(cfg.fps > 0.0)) bad("fps must be positive");
}

double synth_angle(const SynthConfig& cfg, int k) {
  if (cfg.dof == DofLabel::Static) return 0.0;
  const double t = static_cast<double>(k) / (cfg.frames - 1);
  if (!cfg.return_sweep) return cfg.max_deg * t;
  return cfg.max_deg * (1.0 - std::abs(2.0 * t - 1.0));
}

RigidPose synth_true_pose(const SynthConfig& cfg, double angle_deg) {
  RigidPose rot;
  switch (cfg.dof) {
    case DofLabel::Pitch: rot = RigidPose::rotation_x(angle_deg); break;
    case DofLabel::Yaw: rot = RigidPose::rotation_y(angle_deg); break;
    case DofLabel::Roll: rot = RigidPose::rotation_z(angle_deg); break;
    case DofLabel::Static: break;
  }
  return compose(RigidPose::translation(0.0, 0.0, cfg.depth), rot);
}

Session synth_session(const SynthConfig& cfg) {
  validate(cfg);
  const auto& axes = cfg.head_axes;
  const Mesh head = make_ellipsoid_mesh(axes[0], axes[1], axes[2]);
  const CameraIntrinsics k = intrinsics_from_fov(cfg.fov_v_deg, cfg.image_w, cfg.image_h);

  Session s;
  s.header.image_w = cfg.image_w;
  s.header.image_h = cfg.image_h;
  s.header.fov_v_deg = cfg.fov_v_deg;
  s.header.model_ref =
      head_ellipsoid_ref(axes[0] * cfg.scale_mismatch.first, axes[1] * cfg.scale_mismatch.second, axes[2]);
  s.header.notes = fmt::format("synthetic {} sweep to {} deg, {} frames, seed {}, noise rot {} deg trans {}",
                               to_string(cfg.dof), cfg.max_deg, cfg.frames, cfg.seed, cfg.noise_rot_deg,
                               cfg.noise_trans);

  Gaussian noise(cfg.seed);
  s.frames.reserve(static_cast<std::size_t>(cfg.frames));
  for (int i = 0; i < cfg.frames; ++i) {
    const double angle = synth_angle(cfg, i);
    const RigidPose truth = synth_true_pose(cfg, angle);

    SessionFrame f;
    f.seq = i;
    f.t_ms = 1000.0 * i / cfg.fps;
    f.dof_label = cfg.dof;
    f.angle_deg = angle;
    f.box = project_mesh_bbox(k, truth, ScaleFactors::unit(), k.principal_point(), head);

    RigidPose pose = truth;
    if (cfg.noise_rot_deg > 0.0) {
      const Point3 axis{noise(1.0), noise(1.0), noise(1.0)};
      const RigidPose jitter = RigidPose::rotation_axis_angle(axis, noise(cfg.noise_rot_deg));
      // Perturb the rotation about the head center, keep the translation.
      RigidPose rotated = compose(jitter, truth);
      for (int r = 0; r < 3; ++r) rotated(r, 3) = truth(r, 3);
      pose = rotated;
    }
    if (cfg.noise_trans > 0.0) {
      const double sigma = cfg.noise_trans * cfg.depth;
      pose(0, 3) += noise(sigma);
      pose(1, 3) += noise(sigma);
      pose(2, 3) += noise(sigma);
    }
    f.pose = pose;
    s.frames.push_back(std::move(f));
  }
  return s;
}

}  // namespace arreg
