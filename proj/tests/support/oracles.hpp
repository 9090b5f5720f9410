// Independent reference implementations used to check the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <torch/torch.h>
#include <unistd.h>

#include "adgan/grid.hpp"

namespace adgan::oracle {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("adgan_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline BinaryMask random_mask(std::mt19937_64& rng, int h, int w, double p) {
  std::bernoulli_distribution on(p);
  BinaryMask m(h, w);
  for (auto& v : m.data) v = on(rng) ? 1 : 0;
  return m;
}

struct Counts {
  long tp = 0, fp = 0, fn = 0;
};

inline Counts brute_counts(const BinaryMask& pred, const BinaryMask& gt) {
  Counts c;
  for (int y = 0; y < pred.height; ++y) {
    for (int x = 0; x < pred.width; ++x) {
      const bool p = pred(y, x) != 0;
      const bool g = gt(y, x) != 0;
      if (p && g) ++c.tp;
      if (p && !g) ++c.fp;
      if (!p && g) ++c.fn;
    }
  }
  return c;
}

/// 8-connected breadth-first labeling in raster order.
inline LabelMap flood_fill(const BinaryMask& mask) {
  LabelMap out(mask.height, mask.width);
  int next = 0;
  for (int y0 = 0; y0 < mask.height; ++y0) {
    for (int x0 = 0; x0 < mask.width; ++x0) {
      if (!mask(y0, x0) || out(y0, x0)) continue;
      ++next;
      std::deque<std::pair<int, int>> q{{y0, x0}};
      out(y0, x0) = next;
      while (!q.empty()) {
        auto [y, x] = q.front();
        q.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int yy = y + dy, xx = x + dx;
            if (!mask.in_bounds(yy, xx) || !mask(yy, xx) || out(yy, xx)) continue;
            out(yy, xx) = next;
            q.emplace_back(yy, xx);
          }
        }
      }
    }
  }
  return out;
}

/// True when two label maps describe the same partition up to id renaming.
inline bool same_partition(const LabelMap& a, const LabelMap& b) {
  if (!a.same_shape(b)) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int u = a.data[i], v = b.data[i];
    if ((u == 0) != (v == 0)) return false;
    if (u == 0) continue;
    auto [it1, new1] = ab.emplace(u, v);
    auto [it2, new2] = ba.emplace(v, u);
    if (it1->second != v || it2->second != u) return false;
  }
  return true;
}

/// Pairwise IoU from scratch, keyed by (pred id, gt id).
inline std::map<std::pair<int, int>, double> brute_iou(const LabelMap& pred, const LabelMap& gt) {
  std::map<int, long> ap, ag;
  std::map<std::pair<int, int>, long> inter;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred.data[i]) ++ap[pred.data[i]];
    if (gt.data[i]) ++ag[gt.data[i]];
    if (pred.data[i] && gt.data[i]) ++inter[{pred.data[i], gt.data[i]}];
  }
  std::map<std::pair<int, int>, double> iou;
  for (auto [key, n] : inter) {
    iou[key] = static_cast<double>(n) / static_cast<double>(ap[key.first] + ag[key.second] - n);
  }
  return iou;
}

/// Maximum one-to-one matching among pairs with IoU >= threshold, by
/// exhaustive search over subsets of eligible pairs.
inline int exhaustive_matching(const LabelMap& pred, const LabelMap& gt, double threshold) {
  std::vector<std::pair<int, int>> edges;
  for (auto [key, v] : brute_iou(pred, gt)) {
    if (v >= threshold) edges.push_back(key);
  }
  int best = 0;
  std::function<void(std::size_t, std::set<int>&, std::set<int>&, int)> go = [&](std::size_t k, std::set<int>& up,
                                                                                 std::set<int>& ug, int n) {
    best = std::max(best, n);
    if (k == edges.size()) return;
    go(k + 1, up, ug, n);
    auto [p, g] = edges[k];
    if (up.count(p) || ug.count(g)) return;
    up.insert(p);
    ug.insert(g);
    go(k + 1, up, ug, n + 1);
    up.erase(p);
    ug.erase(g);
  };
  std::set<int> up, ug;
  go(0, up, ug, 0);
  return best;
}

/// Minor/major axis ratio from the second central moments of the foreground.
inline double moment_axis_ratio(const BinaryMask& m) {
  double n = 0, sx = 0, sy = 0;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m(y, x)) continue;
      n += 1;
      sx += x;
      sy += y;
    }
  }
  const double cx = sx / n, cy = sy / n;
  double mxx = 0, myy = 0, mxy = 0;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m(y, x)) continue;
      mxx += (x - cx) * (x - cx);
      myy += (y - cy) * (y - cy);
      mxy += (x - cx) * (y - cy);
    }
  }
  mxx /= n;
  myy /= n;
  mxy /= n;
  const double tr = mxx + myy;
  const double disc = std::sqrt((mxx - myy) * (mxx - myy) + 4 * mxy * mxy);
  return std::sqrt((tr - disc) / (tr + disc));
}

/// Mean absolute difference by explicit iteration over elements.
inline double brute_l1(const torch::Tensor& a, const torch::Tensor& b) {
  const auto fa = a.detach().contiguous().to(torch::kDouble).flatten();
  const auto fb = b.detach().contiguous().to(torch::kDouble).flatten();
  const auto* pa = fa.data_ptr<double>();
  const auto* pb = fb.data_ptr<double>();
  double sum = 0.0;
  for (std::int64_t i = 0; i < fa.numel(); ++i) sum += std::abs(pa[i] - pb[i]);
  return sum / static_cast<double>(fa.numel());
}

inline BinaryMask disk_mask(int h, int w, double cy, double cx, double r) {
  BinaryMask m(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dy = y + 0.5 - cy, dx = x + 0.5 - cx;
      m(y, x) = dx * dx + dy * dy <= r * r;
    }
  }
  return m;
}

}  // namespace adgan::oracle
