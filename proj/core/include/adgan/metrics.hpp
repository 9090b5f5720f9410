#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "adgan/grid.hpp"

namespace adgan::metrics {

struct PixelReport {
  std::int64_t n_tp = 0;
  std::int64_t n_fp = 0;
  std::int64_t n_fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double dice = 0.0;
};

/// Pixel precision, recall and DICE. When both masks are empty all three are 1;
/// any other 0/0 ratio is 0.
PixelReport pixel_metrics(const BinaryMask& pred, const BinaryMask& gt);

/// 8-connected labeling with ids contiguous from 1.
LabelMap connected_components(const BinaryMask& mask);

/// Object areas and pairwise intersections between two label maps.
struct OverlapTable {
  std::vector<std::int64_t> pred_area;  // index = id, entry 0 unused
  std::vector<std::int64_t> gt_area;
  struct Entry {
    std::int32_t pred;
    std::int32_t gt;
    std::int64_t intersection;
  };
  std::vector<Entry> overlaps;  // only non-zero intersections

  int n_pred() const { return static_cast<int>(pred_area.size()) - 1; }
  int n_gt() const { return static_cast<int>(gt_area.size()) - 1; }
  double iou(const Entry& e) const;
};

/// Throws ShapeError on mismatch. Ids need not be contiguous; the tables are
/// sized by the maximum id and missing ids have area 0.
OverlapTable overlap_table(const LabelMap& pred, const LabelMap& gt);

struct Match {
  std::int32_t pred;
  std::int32_t gt;
  double iou;
};

/// One-to-one matching taking pairs in descending IoU order; only pairs with
/// IoU >= threshold are eligible.
std::vector<Match> greedy_iou_matching(const OverlapTable& table, double iou_threshold);

struct ObjectReport {
  int n_gt = 0;
  int n_pred = 0;
  int matches = 0;
  double f1 = 0.0;
  double seg_score = 0.0;
  std::optional<double> op_csb;
};

ObjectReport object_f1(const LabelMap& pred, const LabelMap& gt, double iou_threshold = 0.5);

/// Cell Tracking Challenge SEG: mean Jaccard over ground-truth objects, each
/// matched to the prediction covering more than half of it (0 if none).
double seg_score(const LabelMap& pred, const LabelMap& gt);

/// OP_csb = (SEG + DET) / 2.
double op_csb(double seg, double det);

/// Counts objects present in a label map (distinct non-zero ids).
int count_objects(const LabelMap& labels);

/// Renumbers ids to 1..k in raster order of first appearance.
LabelMap relabel_sequential(const LabelMap& labels);

}  // namespace adgan::metrics
