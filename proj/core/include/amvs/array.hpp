#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace amvs {

// Row-major H x W grid. Pixel centers sit at integer coordinates, x right, y down.
template <typename T>
class Array2 {
 public:
  Array2() = default;
  Array2(int height, int width, T fill = T{})
      : height_(height), width_(width), data_(static_cast<std::size_t>(height) * width, fill) {}

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int y, int x) noexcept {
    assert(y >= 0 && y < height_ && x >= 0 && x < width_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int y, int x) const noexcept {
    assert(y >= 0 && y < height_ && x >= 0 && x < width_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const Array2& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  template <typename U>
  bool same_shape(const Array2<U>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  friend bool operator==(const Array2&, const Array2&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

// Dense 3-axis array, row-major in (i, j, k). Used both as H x W x C images
// (i = row) and as D x H x W volumes (i = plane).
template <typename T>
class Array3 {
 public:
  Array3() = default;
  Array3(int n0, int n1, int n2, T fill = T{})
      : n0_(n0), n1_(n1), n2_(n2), data_(static_cast<std::size_t>(n0) * n1 * n2, fill) {}

  int dim0() const noexcept { return n0_; }
  int dim1() const noexcept { return n1_; }
  int dim2() const noexcept { return n2_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(int i, int j, int k) const noexcept {
    assert(i >= 0 && i < n0_ && j >= 0 && j < n1_ && k >= 0 && k < n2_);
    return (static_cast<std::size_t>(i) * n1_ + j) * n2_ + k;
  }

  T& operator()(int i, int j, int k) noexcept { return data_[index(i, j, k)]; }
  const T& operator()(int i, int j, int k) const noexcept { return data_[index(i, j, k)]; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Array3<U>& other) const noexcept {
    return n0_ == other.dim0() && n1_ == other.dim1() && n2_ == other.dim2();
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  int n0_ = 0;
  int n1_ = 0;
  int n2_ = 0;
  std::vector<T> data_;
};

}  // namespace amvs
