#include "adgan/postprocess.hpp"

#include <queue>
#include <tuple>

#include <opencv2/imgproc.hpp>

#include "adgan/error.hpp"
#include "adgan/metrics.hpp"

namespace adgan::inference {

namespace {

cv::Mat as_mat(const BinaryMask& m) {
  return cv::Mat(m.height, m.width, CV_8U, const_cast<std::uint8_t*>(m.data.data()));
}

LabelMap components_of(const BinaryMask& mask) { return metrics::connected_components(mask); }

}  // namespace

BinaryMask binarize(const ImageTensor& y, float threshold) {
  BinaryMask out(y.height, y.width);
  for (std::size_t i = 0; i < y.size(); ++i) out.data[i] = y.data[i] > threshold ? 1 : 0;
  return out;
}

BinaryMask erode_disk(const BinaryMask& mask, int radius) {
  if (radius < 0) throw std::invalid_argument("erosion radius must be >= 0");
  if (radius == 0 || mask.empty()) return mask;
  BinaryMask out(mask.height, mask.width);
  cv::Mat dst(out.height, out.width, CV_8U, out.data.data());
  const auto kernel = cv::getStructuringElement(cv::MORPH_ELLIPSE, cv::Size(2 * radius + 1, 2 * radius + 1));
  cv::erode(as_mat(mask), dst, kernel, cv::Point(-1, -1), 1, cv::BORDER_CONSTANT, cv::Scalar(255));
  return out;
}

Grid<float> distance_transform(const BinaryMask& mask) {
  Grid<float> out(mask.height, mask.width);
  if (mask.empty()) return out;
  cv::Mat dst(out.height, out.width, CV_32F, out.data.data());
  cv::distanceTransform(as_mat(mask), dst, cv::DIST_L2, cv::DIST_MASK_PRECISE);
  return out;
}

LabelMap marker_watershed(const Grid<float>& relief, const LabelMap& markers, const BinaryMask& domain) {
  if (!relief.same_shape(markers) || !relief.same_shape(domain)) throw ShapeError("marker_watershed: shape mismatch");
  LabelMap out(relief.height, relief.width);
  std::vector<std::uint8_t> queued(relief.size(), 0);
  // (relief, arrival order, pixel); std::greater gives the lowest relief first.
  using Item = std::tuple<float, std::uint64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  std::uint64_t order = 0;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (markers.data[i] != 0) {
      out.data[i] = markers.data[i];
      queued[i] = 1;
      queue.emplace(relief.data[i], order++, i);
    }
  }
  const int w = relief.width;
  while (!queue.empty()) {
    const auto [level, _, idx] = queue.top();
    queue.pop();
    const int y = static_cast<int>(idx / static_cast<std::size_t>(w));
    const int x = static_cast<int>(idx % static_cast<std::size_t>(w));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dy == 0 && dx == 0) || !relief.in_bounds(y + dy, x + dx)) continue;
        const auto n = relief.index(y + dy, x + dx);
        if (queued[n] || !domain.data[n]) continue;
        queued[n] = 1;
        out.data[n] = out.data[idx];
        queue.emplace(std::max(level, relief.data[n]), order++, n);
      }
    }
  }
  return out;
}

LabelMap semantic_postprocess(const BinaryMask& mask, int erosion_radius) {
  if (mask.empty()) return LabelMap(mask.height, mask.width);
  LabelMap markers = components_of(erode_disk(mask, erosion_radius));
  // Components erased entirely by erosion still count as objects.
  const LabelMap whole = components_of(mask);
  std::vector<std::uint8_t> has_marker(static_cast<std::size_t>(metrics::count_objects(whole)) + 1, 0);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    next = std::max(next, markers.data[i]);
    if (markers.data[i] != 0) has_marker[static_cast<std::size_t>(whole.data[i])] = 1;
  }
  std::vector<std::int32_t> fresh(has_marker.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto c = static_cast<std::size_t>(whole.data[i]);
    if (c == 0 || has_marker[c]) continue;
    if (fresh[c] == 0) fresh[c] = ++next;
    markers.data[i] = fresh[c];
  }

  Grid<float> relief = distance_transform(mask);
  for (auto& v : relief.data) v = -v;
  return metrics::relabel_sequential(marker_watershed(relief, markers, mask));
}

Grid<std::uint8_t> ternarize(const ImageTensor& y, TernaryThresholds t) {
  if (!(t.lo < t.hi)) throw std::invalid_argument("ternarize: lo must be below hi");
  Grid<std::uint8_t> out(y.height, y.width);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const float v = y.data[i];
    out.data[i] = v > t.hi ? kInterior : (v > t.lo ? kEdge : kBackground);
  }
  return out;
}

LabelMap instance_from_ternary(const ImageTensor& y, TernaryThresholds t) {
  const auto classes = ternarize(y, t);
  BinaryMask interior(y.height, y.width);
  BinaryMask domain(y.height, y.width);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    interior.data[i] = classes.data[i] == kInterior;
    domain.data[i] = classes.data[i] != kBackground;
  }
  const LabelMap markers = components_of(interior);
  Grid<float> relief = distance_transform(interior);
  for (auto& v : relief.data) v = -v;
  return metrics::relabel_sequential(marker_watershed(relief, markers, domain));
}

}  // namespace adgan::inference
