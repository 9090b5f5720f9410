#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace adgan {

/// Dense row-major 2D grid. Used for images, binary masks and label maps
/// everywhere outside the network code.
template <typename T>
struct Grid {
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int h, int w, T fill = T{})
      : height(h), width(w), data(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

  T& operator()(int y, int x) { return data[index(y, x)]; }
  const T& operator()(int y, int x) const { return data[index(y, x)]; }

  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  bool in_bounds(int y, int x) const { return y >= 0 && y < height && x >= 0 && x < width; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return height == other.height && width == other.width;
  }

  bool operator==(const Grid&) const = default;
};

/// Single-channel image with values in [-1, 1].
using ImageTensor = Grid<float>;
/// Binary mask, 0 = background, 1 = foreground.
using BinaryMask = Grid<std::uint8_t>;
/// Instance labels, 0 = background, k >= 1 = instance id.
using LabelMap = Grid<std::int32_t>;

}  // namespace adgan
