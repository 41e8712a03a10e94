#include "arreg/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "arreg/error.hpp"

namespace arreg {

namespace {

// Welford's running mean / variance.
class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  SummaryStat stat() const {
    const double var = n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    return {mean_, std::sqrt(std::max(var, 0.0)), n_};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MetricAccumulators {
  Accumulator e_w, e_h, iou;

  void add(const MetricsRow& r) {
    e_w.add(r.e_w_pct);
    e_h.add(r.e_h_pct);
    iou.add(r.iou);
  }

  MetricSummary summary() const { return {e_w.stat(), e_h.stat(), iou.stat()}; }
};

nlohmann::ordered_json to_json(const SummaryStat& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}};
}

nlohmann::ordered_json to_json(const MetricSummary& m) {
  return {{"e_w", to_json(m.e_w)}, {"e_h", to_json(m.e_h)}, {"iou", to_json(m.iou)}};
}

}  // namespace

DimensionErrors dimension_errors(const Rect& box_i, const Rect& box_m) {
  if (box_i.degenerate()) throw Error(ErrorCode::DegenerateGroundTruth, "head box has zero width or height");
  DimensionErrors e;
  e.ratio_w = box_m.w / box_i.w;
  e.ratio_h = box_m.h / box_i.h;
  e.e_w_pct = std::abs(e.ratio_w - 1.0) * 100.0;
  e.e_h_pct = std::abs(e.ratio_h - 1.0) * 100.0;
  return e;
}

double iou(const Rect& a, const Rect& b) {
  // Areas come from the same edge differences as the overlap, so iou(a, a) is exactly 1.
  const double area_a = std::max(a.right() - a.x, 0.0) * std::max(a.bottom() - a.y, 0.0);
  const double area_b = std::max(b.right() - b.x, 0.0) * std::max(b.bottom() - b.y, 0.0);
  if (area_a == 0.0 && area_b == 0.0) throw Error(ErrorCode::BothEmpty, "IoU of two empty rects");
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = iw * ih;
  return std::clamp(inter / (area_a + area_b - inter), 0.0, 1.0);
}

MetricsRow make_metrics_row(std::int64_t seq, double t_ms, DofLabel dof, double angle_deg, const Rect& box_i,
                            const Rect& box_m) {
  const DimensionErrors e = dimension_errors(box_i, box_m);
  return {seq, t_ms, dof, angle_deg, e.ratio_w, e.ratio_h, e.e_w_pct, e.e_h_pct, iou(box_i, box_m)};
}

AggregateStats aggregate(std::span<const MetricsRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no metrics rows to aggregate");
  MetricAccumulators overall;
  std::map<DofLabel, MetricAccumulators> groups;
  for (const MetricsRow& r : rows) {
    overall.add(r);
    groups[r.dof_label].add(r);
  }
  AggregateStats out;
  out.overall = overall.summary();
  for (const auto& [dof, acc] : groups) out.per_dof[dof] = acc.summary();
  out.n_frames = rows.size();
  return out;
}

std::string summary_json(const AggregateStats& stats) {
  nlohmann::ordered_json per_dof = nlohmann::ordered_json::object();
  for (const auto& [dof, m] : stats.per_dof) per_dof[std::string(to_string(dof))] = to_json(m);
  const nlohmann::ordered_json doc = {
      {"overall", to_json(stats.overall)}, {"per_dof", per_dof}, {"n_frames", stats.n_frames}};
  return doc.dump(2);
}

std::string_view metrics_csv_header() noexcept {
  return "seq,t_ms,dof_label,angle_deg,ratio_w,ratio_h,e_w_pct,e_h_pct,iou";
}

std::string metrics_csv_line(const MetricsRow& r) {
  // Frames without a known angle (live recordings) leave the column empty.
  const std::string angle = std::isnan(r.angle_deg) ? std::string() : fmt::format("{:.9g}", r.angle_deg);
  return fmt::format("{},{:.9g},{},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}", r.seq, r.t_ms, to_string(r.dof_label),
                     angle, r.ratio_w, r.ratio_h, r.e_w_pct, r.e_h_pct, r.iou);
}

}  // namespace arreg
