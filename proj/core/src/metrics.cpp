#include "adgan/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <opencv2/imgproc.hpp>

#include "adgan/error.hpp"

namespace adgan::metrics {

namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.height) + "x" +
                     std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" + std::to_string(b.width));
  }
}

}  // namespace

PixelReport pixel_metrics(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "pixel_metrics");
  PixelReport r;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.data[i] != 0;
    const bool g = gt.data[i] != 0;
    r.n_tp += p && g;
    r.n_fp += p && !g;
    r.n_fn += !p && g;
  }
  if (r.n_tp + r.n_fp + r.n_fn == 0) {
    r.precision = r.recall = r.dice = 1.0;
    return r;
  }
  r.precision = ratio(r.n_tp, r.n_tp + r.n_fp);
  r.recall = ratio(r.n_tp, r.n_tp + r.n_fn);
  r.dice = ratio(2 * r.n_tp, 2 * r.n_tp + r.n_fp + r.n_fn);
  return r;
}

LabelMap connected_components(const BinaryMask& mask) {
  LabelMap out(mask.height, mask.width, 0);
  if (mask.empty()) return out;
  cv::Mat src(mask.height, mask.width, CV_8U);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) src.at<std::uint8_t>(y, x) = mask(y, x) ? 255 : 0;
  }
  cv::Mat labels;
  cv::connectedComponents(src, labels, 8, CV_32S);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) out(y, x) = labels.at<std::int32_t>(y, x);
  }
  return relabel_sequential(out);
}

double OverlapTable::iou(const Entry& e) const {
  const std::int64_t uni = pred_area[static_cast<std::size_t>(e.pred)] +
                           gt_area[static_cast<std::size_t>(e.gt)] - e.intersection;
  return ratio(e.intersection, uni);
}

OverlapTable overlap_table(const LabelMap& pred, const LabelMap& gt) {
  require_same_shape(pred, gt, "overlap_table");
  std::int32_t max_pred = 0;
  std::int32_t max_gt = 0;
  for (auto v : pred.data) max_pred = std::max(max_pred, v);
  for (auto v : gt.data) max_gt = std::max(max_gt, v);

  OverlapTable t;
  t.pred_area.assign(static_cast<std::size_t>(max_pred) + 1, 0);
  t.gt_area.assign(static_cast<std::size_t>(max_gt) + 1, 0);
  std::unordered_map<std::uint64_t, std::int64_t> inter;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = pred.data[i];
    const auto g = gt.data[i];
    if (p < 0 || g < 0) throw ShapeError("overlap_table: negative label id");
    if (p > 0) ++t.pred_area[static_cast<std::size_t>(p)];
    if (g > 0) ++t.gt_area[static_cast<std::size_t>(g)];
    if (p > 0 && g > 0) ++inter[(static_cast<std::uint64_t>(p) << 32) | static_cast<std::uint32_t>(g)];
  }
  t.overlaps.reserve(inter.size());
  for (const auto& [key, count] : inter) {
    t.overlaps.push_back({static_cast<std::int32_t>(key >> 32), static_cast<std::int32_t>(key & 0xffffffffu), count});
  }
  std::sort(t.overlaps.begin(), t.overlaps.end(), [](const auto& a, const auto& b) {
    return a.pred != b.pred ? a.pred < b.pred : a.gt < b.gt;
  });
  return t;
}

std::vector<Match> greedy_iou_matching(const OverlapTable& table, double iou_threshold) {
  std::vector<Match> candidates;
  for (const auto& e : table.overlaps) {
    const double v = table.iou(e);
    if (v >= iou_threshold) candidates.push_back({e.pred, e.gt, v});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Match& a, const Match& b) { return a.iou > b.iou; });
  std::vector<bool> pred_used(table.pred_area.size(), false);
  std::vector<bool> gt_used(table.gt_area.size(), false);
  std::vector<Match> matches;
  for (const auto& m : candidates) {
    if (pred_used[static_cast<std::size_t>(m.pred)] || gt_used[static_cast<std::size_t>(m.gt)]) continue;
    pred_used[static_cast<std::size_t>(m.pred)] = true;
    gt_used[static_cast<std::size_t>(m.gt)] = true;
    matches.push_back(m);
  }
  return matches;
}

namespace {

int present(const std::vector<std::int64_t>& areas) {
  return static_cast<int>(std::count_if(areas.begin() + 1, areas.end(), [](std::int64_t a) { return a > 0; }));
}

double seg_from_table(const OverlapTable& t) {
  const int n_gt = present(t.gt_area);
  if (n_gt == 0) return present(t.pred_area) == 0 ? 1.0 : 0.0;
  std::vector<double> best(t.gt_area.size(), 0.0);
  std::vector<int> matched(t.gt_area.size(), 0);
  for (const auto& e : t.overlaps) {
    const auto g = static_cast<std::size_t>(e.gt);
    if (2 * e.intersection > t.gt_area[g]) {
      if (++matched[g] > 1) throw std::logic_error("seg_score: majority-overlap match is not unique");
      best[g] = t.iou(e);
    }
  }
  double sum = 0.0;
  for (std::size_t g = 1; g < best.size(); ++g) sum += best[g];
  return sum / n_gt;
}

}  // namespace

ObjectReport object_f1(const LabelMap& pred, const LabelMap& gt, double iou_threshold) {
  const auto table = overlap_table(pred, gt);
  ObjectReport r;
  r.n_gt = present(table.gt_area);
  r.n_pred = present(table.pred_area);
  r.matches = static_cast<int>(greedy_iou_matching(table, iou_threshold).size());
  r.f1 = (r.n_gt + r.n_pred) == 0 ? 1.0 : 2.0 * r.matches / (r.n_gt + r.n_pred);
  r.seg_score = seg_from_table(table);
  return r;
}

double seg_score(const LabelMap& pred, const LabelMap& gt) { return seg_from_table(overlap_table(pred, gt)); }

double op_csb(double seg, double det) {
  if (seg < 0.0 || seg > 1.0 || det < 0.0 || det > 1.0) throw std::invalid_argument("op_csb: inputs must lie in [0, 1]");
  return 0.5 * (seg + det);
}

int count_objects(const LabelMap& labels) {
  std::vector<std::int32_t> ids;
  for (auto v : labels.data) {
    if (v > 0) ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  return static_cast<int>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

LabelMap relabel_sequential(const LabelMap& labels) {
  LabelMap out(labels.height, labels.width, 0);
  std::unordered_map<std::int32_t, std::int32_t> remap;
  std::int32_t next = 1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto v = labels.data[i];
    if (v <= 0) continue;
    auto [it, inserted] = remap.try_emplace(v, next);
    if (inserted) ++next;
    out.data[i] = it->second;
  }
  return out;
}

}  // namespace adgan::metrics
