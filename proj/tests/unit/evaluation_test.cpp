#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "arreg/error.hpp"
#include "arreg/evaluation.hpp"
#include "support/oracles.hpp"

namespace arreg {
namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no arreg::Error thrown";
  return ErrorCode::Io;
}

TEST(DimensionErrors, PerfectOverlayIsZero) {
  const auto e = dimension_errors({3, 4, 50, 60}, {3, 4, 50, 60});
  EXPECT_EQ(e.ratio_w, 1.0);
  EXPECT_EQ(e.ratio_h, 1.0);
  EXPECT_EQ(e.e_w_pct, 0.0);
  EXPECT_EQ(e.e_h_pct, 0.0);
}

TEST(DimensionErrors, ReportedMeanWidthErrorMagnitude) {
  // A model 10.09 % wider than the head reads as a 10.09 % width error.
  const auto e = dimension_errors({0, 0, 100, 100}, {0, 0, 110.09, 100});
  EXPECT_NEAR(e.ratio_w, 1.1009, 1e-12);
  EXPECT_NEAR(e.e_w_pct, 10.09, 1e-9);
  EXPECT_EQ(e.e_w_pct, std::abs(e.ratio_w - 1.0) * 100.0);
  const auto narrow = dimension_errors({0, 0, 100, 100}, {0, 0, 89.91, 92.4});
  EXPECT_NEAR(narrow.e_w_pct, 10.09, 1e-9);
  EXPECT_NEAR(narrow.e_h_pct, 7.6, 1e-9);
}

TEST(DimensionErrors, DegenerateGroundTruth) {
  EXPECT_EQ(code_of([] { dimension_errors({0, 0, 0, 10}, {0, 0, 10, 10}); }), ErrorCode::DegenerateGroundTruth);
  EXPECT_EQ(code_of([] { dimension_errors({0, 0, 10, 0}, {0, 0, 10, 10}); }), ErrorCode::DegenerateGroundTruth);
}

TEST(Iou, Examples) {
  EXPECT_EQ(iou({1, 2, 30, 40}, {1, 2, 30, 40}), 1.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(oracle::raster_iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(iou({0, 0, 0, 0}, {5, 5, 10, 10}), 0.0);
  EXPECT_EQ(code_of([] { iou({0, 0, 0, 5}, {1, 1, 5, 0}); }), ErrorCode::BothEmpty);
}

TEST(Iou, PropertiesOnRandomRects) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> pos(-200, 600), size(0.5, 300), lam(0.01, 50), frac(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Rect a{pos(rng), pos(rng), size(rng), size(rng)};
    const Rect b{pos(rng), pos(rng), size(rng), size(rng)};
    const double v = iou(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_EQ(iou(a, a), 1.0);

    // Containment.
    const double fw = frac(rng), fh = frac(rng);
    const Rect c{a.x + a.w * (1 - fw) * frac(rng), a.y + a.h * (1 - fh) * frac(rng), a.w * fw, a.h * fh};
    if (c.w > 0 && c.h > 0) EXPECT_NEAR(iou(a, c), c.area() / a.area(), 1e-12);

    // Translation invariance and scale covariance.
    const double dx = pos(rng), dy = pos(rng), l = lam(rng);
    const Rect at{a.x + dx, a.y + dy, a.w, a.h}, bt{b.x + dx, b.y + dy, b.w, b.h};
    const Rect as{a.x * l, a.y * l, a.w * l, a.h * l}, bs{b.x * l, b.y * l, b.w * l, b.h * l};
    EXPECT_NEAR(iou(at, bt), v, 1e-12);
    EXPECT_NEAR(iou(as, bs), v, 1e-12);
    const auto e = dimension_errors(a, b), et = dimension_errors(at, bt), es = dimension_errors(as, bs);
    EXPECT_EQ(et.ratio_w, e.ratio_w);
    EXPECT_EQ(et.e_h_pct, e.e_h_pct);
    EXPECT_NEAR(es.ratio_w, e.ratio_w, 1e-12 * e.ratio_w);
    EXPECT_NEAR(es.e_h_pct, e.e_h_pct, 1e-10 * (1 + e.e_h_pct));
  }
}

TEST(Iou, AgreesWithRasterOracleOnPixelAlignedRects) {
  std::mt19937_64 rng(52);
  std::uniform_int_distribution<int> pos(0, 300), size(1, 200);
  for (int i = 0; i < 200; ++i) {
    const Rect a{double(pos(rng)), double(pos(rng)), double(size(rng)), double(size(rng))};
    const Rect b{double(pos(rng)), double(pos(rng)), double(size(rng)), double(size(rng))};
    EXPECT_NEAR(iou(a, b), oracle::raster_iou({a.x, a.y, a.w, a.h}, {b.x, b.y, b.w, b.h}), 1e-12);
  }
}

TEST(Aggregate, Examples) {
  std::vector<MetricsRow> rows(5);
  for (auto& r : rows) r.iou = 0.8;
  const auto s = aggregate(rows);
  EXPECT_NEAR(s.overall.iou.mean, 0.8, 1e-15);
  EXPECT_EQ(s.overall.iou.std, 0.0);
  EXPECT_EQ(s.overall.iou.n, 5u);
  EXPECT_EQ(s.n_frames, 5u);

  std::vector<MetricsRow> three(3);
  three[0].e_w_pct = 1;
  three[1].e_w_pct = 2;
  three[2].e_w_pct = 3;
  const auto t = aggregate(three);
  EXPECT_EQ(t.overall.e_w.mean, 2.0);
  EXPECT_EQ(t.overall.e_w.std, 1.0);

  EXPECT_EQ(aggregate(std::vector<MetricsRow>(1)).overall.iou.std, 0.0);
  EXPECT_EQ(code_of([] { aggregate(std::vector<MetricsRow>{}); }), ErrorCode::EmptyInput);
}

TEST(Aggregate, MatchesTwoPassOracleOn1000Rows) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> e(0, 30), v(0.5, 1.0);
  const DofLabel dofs[] = {DofLabel::Pitch, DofLabel::Yaw, DofLabel::Roll};
  std::vector<MetricsRow> rows(1000);
  std::map<DofLabel, std::vector<double>> ew_by, iou_by;
  std::vector<double> ew, eh, iv;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    r.seq = static_cast<std::int64_t>(i);
    r.dof_label = dofs[rng() % 3];
    r.e_w_pct = e(rng);
    r.e_h_pct = e(rng);
    r.iou = v(rng);
    ew.push_back(r.e_w_pct);
    eh.push_back(r.e_h_pct);
    iv.push_back(r.iou);
    ew_by[r.dof_label].push_back(r.e_w_pct);
    iou_by[r.dof_label].push_back(r.iou);
  }
  const auto s = aggregate(rows);
  const auto [mw, sw] = oracle::two_pass_mean_std(ew);
  const auto [mh, sh] = oracle::two_pass_mean_std(eh);
  const auto [mi, si] = oracle::two_pass_mean_std(iv);
  EXPECT_NEAR(s.overall.e_w.mean, mw, 1e-12);
  EXPECT_NEAR(s.overall.e_w.std, sw, 1e-12);
  EXPECT_NEAR(s.overall.e_h.mean, mh, 1e-12);
  EXPECT_NEAR(s.overall.e_h.std, sh, 1e-12);
  EXPECT_NEAR(s.overall.iou.mean, mi, 1e-12);
  EXPECT_NEAR(s.overall.iou.std, si, 1e-12);
  ASSERT_EQ(s.per_dof.size(), 3u);
  for (const auto& [dof, values] : ew_by) {
    const auto [m, sd] = oracle::two_pass_mean_std(values);
    EXPECT_NEAR(s.per_dof.at(dof).e_w.mean, m, 1e-12);
    EXPECT_NEAR(s.per_dof.at(dof).e_w.std, sd, 1e-12);
    EXPECT_EQ(s.per_dof.at(dof).e_w.n, values.size());
    const auto [mi2, si2] = oracle::two_pass_mean_std(iou_by[dof]);
    EXPECT_NEAR(s.per_dof.at(dof).iou.mean, mi2, 1e-12);
    EXPECT_NEAR(s.per_dof.at(dof).iou.std, si2, 1e-12);
  }
}

TEST(SummaryJson, Layout) {
  std::vector<MetricsRow> rows(2);
  rows[0].dof_label = DofLabel::Yaw;
  rows[0].iou = 1.0;
  rows[1].dof_label = DofLabel::Yaw;
  rows[1].iou = 0.5;
  const auto j = nlohmann::json::parse(summary_json(aggregate(rows)));
  EXPECT_EQ(j["n_frames"], 2);
  EXPECT_DOUBLE_EQ(j["overall"]["iou"]["mean"].get<double>(), 0.75);
  EXPECT_EQ(j["overall"]["iou"]["n"], 2);
  EXPECT_TRUE(j["overall"]["e_w"].contains("std"));
  EXPECT_TRUE(j["per_dof"].contains("yaw"));
  EXPECT_FALSE(j["per_dof"].contains("pitch"));
}

TEST(MetricsCsv, HeaderAndNineDigitLine) {
  EXPECT_EQ(metrics_csv_header(), "seq,t_ms,dof_label,angle_deg,ratio_w,ratio_h,e_w_pct,e_h_pct,iou");
  const MetricsRow r = make_metrics_row(3, 100.0, DofLabel::Pitch, 22.5, {0, 0, 100, 100}, {0, 0, 110.09, 100});
  EXPECT_EQ(metrics_csv_line(r), "3,100,pitch,22.5,1.1009,1,10.09,0,0.908347716");
  MetricsRow nan_angle = r;
  nan_angle.angle_deg = std::nan("");
  EXPECT_NE(metrics_csv_line(nan_angle).find(",pitch,,"), std::string::npos);
}

}  // namespace
}  // namespace arreg
