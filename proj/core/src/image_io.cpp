#include "adgan/image_io.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>

#include "adgan/error.hpp"
#include "adgan/metrics.hpp"

namespace fs = std::filesystem;

namespace adgan::io {

namespace {

cv::Mat read_single_channel(const fs::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError("cannot read image " + path.string());
  if (m.channels() != 1) {
    throw IoError(path.string() + ": expected a single-channel image, got " + std::to_string(m.channels()) +
                  " channels");
  }
  if (m.depth() != CV_8U && m.depth() != CV_16U) {
    throw IoError(path.string() + ": only 8- and 16-bit images are supported");
  }
  return m;
}

double pixel(const cv::Mat& m, int y, int x) {
  return m.depth() == CV_8U ? m.at<std::uint8_t>(y, x) : m.at<std::uint16_t>(y, x);
}

void write(const fs::path& path, const cv::Mat& m) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

}  // namespace

ImageTensor load_image(const fs::path& path, Normalization mode) {
  const cv::Mat m = read_single_channel(path);
  ImageTensor out(m.rows, m.cols);
  double lo = 0.0;
  double hi = m.depth() == CV_8U ? 255.0 : 65535.0;
  if (mode == Normalization::kMinMax) {
    cv::minMaxLoc(m, &lo, &hi);
    if (hi <= lo) {
      std::fill(out.data.begin(), out.data.end(), -1.0f);
      return out;
    }
  }
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      out(y, x) = static_cast<float>(2.0 * (pixel(m, y, x) - lo) / (hi - lo) - 1.0);
    }
  }
  return out;
}

void save_image(const ImageTensor& image, const fs::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw IoError("bit_depth must be 8 or 16");
  const double max_value = bit_depth == 8 ? 255.0 : 65535.0;
  cv::Mat m(image.height, image.width, bit_depth == 8 ? CV_8U : CV_16U);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const float v = image(y, x);
      if (!(v >= -1.0f && v <= 1.0f)) {
        throw IoError("save_image: value " + std::to_string(v) + " outside [-1, 1] at (" + std::to_string(y) + ", " +
                      std::to_string(x) + ")");
      }
      const double q = std::round((static_cast<double>(v) + 1.0) * 0.5 * max_value);
      if (bit_depth == 8) {
        m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(q);
      } else {
        m.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(q);
      }
    }
  }
  write(path, m);
}

void save_label_map(const LabelMap& labels, const fs::path& path) {
  cv::Mat m(labels.height, labels.width, CV_16U);
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      const auto v = labels(y, x);
      if (v < 0 || v > 65535) throw IoError("save_label_map: id " + std::to_string(v) + " does not fit 16 bits");
      m.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(v);
    }
  }
  write(path, m);
}

LabelMap load_label_map(const fs::path& path) {
  const cv::Mat m = read_single_channel(path);
  LabelMap out(m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) out(y, x) = static_cast<std::int32_t>(pixel(m, y, x));
  }
  return out;
}

void save_binary_mask(const BinaryMask& mask, const fs::path& path) {
  cv::Mat m(mask.height, mask.width, CV_8U);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) m.at<std::uint8_t>(y, x) = mask(y, x) ? 255 : 0;
  }
  write(path, m);
}

BinaryMask load_binary_mask(const fs::path& path) {
  const cv::Mat m = read_single_channel(path);
  BinaryMask out(m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) out(y, x) = pixel(m, y, x) > 0 ? 1 : 0;
  }
  return out;
}

LabelMap load_objects(const fs::path& path) {
  const cv::Mat m = read_single_channel(path);
  if (m.depth() == CV_16U) return load_label_map(path);
  return metrics::connected_components(load_binary_mask(path));
}

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".tif" || ext == ".tiff") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace adgan::io
