#include "adgan/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "adgan/error.hpp"
#include "adgan/image_io.hpp"
#include "adgan/metrics.hpp"

namespace adgan::diagnostics {

namespace {

struct Centroid {
  double y = 0.0;
  double x = 0.0;
};

std::vector<Centroid> centroids(const LabelMap& labels, const std::vector<std::int64_t>& areas) {
  std::vector<Centroid> c(areas.size());
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      const auto id = labels(y, x);
      if (id <= 0) continue;
      c[static_cast<std::size_t>(id)].y += y;
      c[static_cast<std::size_t>(id)].x += x;
    }
  }
  for (std::size_t id = 1; id < c.size(); ++id) {
    if (areas[id] == 0) continue;
    c[id].y /= static_cast<double>(areas[id]);
    c[id].x /= static_cast<double>(areas[id]);
  }
  return c;
}

}  // namespace

LossyReport lossy_report(const LabelMap& pred, const LabelMap& reference, double iou_threshold) {
  const auto table = metrics::overlap_table(pred, reference);
  const auto matches = metrics::greedy_iou_matching(table, iou_threshold);
  const auto cp = centroids(pred, table.pred_area);
  const auto cr = centroids(reference, table.gt_area);

  LossyReport r;
  const int n_pred = metrics::count_objects(pred);
  const int n_ref = metrics::count_objects(reference);
  r.count_delta = n_pred - n_ref;
  for (const auto& m : matches) {
    const auto& a = cp[static_cast<std::size_t>(m.pred)];
    const auto& b = cr[static_cast<std::size_t>(m.gt)];
    r.matched_centroid_offsets.push_back(std::hypot(a.y - b.y, a.x - b.x));
    r.per_object_iou.push_back(m.iou);
  }
  if (!matches.empty()) {
    r.mean_offset = std::accumulate(r.matched_centroid_offsets.begin(), r.matched_centroid_offsets.end(), 0.0) /
                    static_cast<double>(matches.size());
  }
  r.unmatched_pred = n_pred - static_cast<int>(matches.size());
  r.unmatched_reference = n_ref - static_cast<int>(matches.size());
  return r;
}

nlohmann::json to_json(const LossyReport& r) {
  return {{"count_delta", r.count_delta},
          {"matched_centroid_offsets", r.matched_centroid_offsets},
          {"mean_offset", r.mean_offset},
          {"per_object_iou", r.per_object_iou},
          {"unmatched_reference", r.unmatched_reference},
          {"unmatched_pred", r.unmatched_pred}};
}

std::vector<FeatureRow> content_feature_rows(inference::InferenceSession& session,
                                             const std::vector<std::pair<std::string, ImageTensor>>& images,
                                             model::Domain domain) {
  std::vector<FeatureRow> rows;
  const std::string name = domain == model::Domain::kImage ? "image" : "mask";
  for (const auto& [id, image] : images) {
    FeatureRow row{id, name, session.content_features(image, domain)};
    for (float v : row.features) {
      if (!std::isfinite(v)) throw NumericError("non-finite content feature for " + id);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_feature_csv(const std::vector<FeatureRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const std::size_t width = rows.empty() ? 0 : rows.front().features.size();
  out << "image_id,domain";
  for (std::size_t k = 0; k < width; ++k) out << ",f" << k;
  out << '\n' << std::setprecision(9);
  for (const auto& row : rows) {
    out << row.image_id << ',' << row.domain;
    for (float v : row.features) out << ',' << v;
    out << '\n';
  }
}

std::vector<FeatureRow> export_content_features(inference::InferenceSession& session,
                                                const std::filesystem::path& images_dir, model::Domain domain,
                                                const std::filesystem::path& out) {
  std::vector<std::pair<std::string, ImageTensor>> images;
  for (const auto& file : io::list_images(images_dir)) images.emplace_back(file.stem().string(), io::load_image(file));
  if (images.empty()) throw IoError("no images in " + images_dir.string());
  auto rows = content_feature_rows(session, images, domain);
  write_feature_csv(rows, out);
  return rows;
}

}  // namespace adgan::diagnostics
