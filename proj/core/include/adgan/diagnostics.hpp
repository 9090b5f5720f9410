#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "adgan/grid.hpp"
#include "adgan/inference.hpp"

namespace adgan::diagnostics {

constexpr double kDiagnosticIou = 0.1;

/// Content inconsistency between a predicted and a reference label map.
struct LossyReport {
  int count_delta = 0;  // predicted objects minus reference objects
  std::vector<double> matched_centroid_offsets;
  double mean_offset = 0.0;
  std::vector<double> per_object_iou;
  int unmatched_reference = 0;
  int unmatched_pred = 0;
};

LossyReport lossy_report(const LabelMap& pred, const LabelMap& reference, double iou_threshold = kDiagnosticIou);

nlohmann::json to_json(const LossyReport& report);

struct FeatureRow {
  std::string image_id;
  std::string domain;
  std::vector<float> features;
};

/// Average-pooled content features, one row per image.
std::vector<FeatureRow> content_feature_rows(inference::InferenceSession& session,
                                             const std::vector<std::pair<std::string, ImageTensor>>& images,
                                             model::Domain domain);

/// CSV with header image_id,domain,f0,...,f{C-1}.
void write_feature_csv(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);

/// Loads every image in a directory and writes its feature row.
std::vector<FeatureRow> export_content_features(inference::InferenceSession& session,
                                                const std::filesystem::path& images_dir, model::Domain domain,
                                                const std::filesystem::path& out);

}  // namespace adgan::diagnostics
