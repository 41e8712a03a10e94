#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "arreg/frame.hpp"
#include "arreg/mesh.hpp"

namespace arreg {

struct DimensionErrors {
  double ratio_w = 0.0;  ///< w_m / w_i
  double ratio_h = 0.0;  ///< h_m / h_i
  double e_w_pct = 0.0;  ///< |ratio_w - 1| * 100
  double e_h_pct = 0.0;  ///< |ratio_h - 1| * 100
};

/// Width/height agreement of the model box against the head box (ground
/// truth). Throws Error{DegenerateGroundTruth} when B_i has no width or height.
DimensionErrors dimension_errors(const Rect& box_i, const Rect& box_m);

/// Continuous intersection-over-union. Throws Error{BothEmpty} when both
/// rects have zero area.
double iou(const Rect& a, const Rect& b);

struct MetricsRow {
  std::int64_t seq = 0;
  double t_ms = 0.0;
  DofLabel dof_label = DofLabel::Static;
  double angle_deg = 0.0;
  double ratio_w = 0.0;
  double ratio_h = 0.0;
  double e_w_pct = 0.0;
  double e_h_pct = 0.0;
  double iou = 0.0;
};

MetricsRow make_metrics_row(std::int64_t seq, double t_ms, DofLabel dof, double angle_deg, const Rect& box_i,
                            const Rect& box_m);

struct SummaryStat {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation (n - 1); 0 for n == 1
  std::size_t n = 0;
};

/// Statistics of e_w_pct, e_h_pct and iou.
struct MetricSummary {
  SummaryStat e_w;
  SummaryStat e_h;
  SummaryStat iou;
};

struct AggregateStats {
  MetricSummary overall;
  std::map<DofLabel, MetricSummary> per_dof;
  std::size_t n_frames = 0;
};

/// Throws Error{EmptyInput} for no rows.
AggregateStats aggregate(std::span<const MetricsRow> rows);

/// {"overall": {...}, "per_dof": {...}, "n_frames": N} with each metric as
/// {"mean", "std", "n"}.
std::string summary_json(const AggregateStats& stats);

/// Header line of the metrics CSV (no trailing newline).
std::string_view metrics_csv_header() noexcept;
/// One CSV line, '.' decimal, 9 significant digits (no trailing newline).
std::string metrics_csv_line(const MetricsRow& row);

}  // namespace arreg
