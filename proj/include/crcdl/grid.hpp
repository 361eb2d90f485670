#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace crcdl {

/** Dense row-major matrix. Element access is bounds-checked in debug builds. */
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), v_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return v_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return v_[static_cast<std::size_t>(r) * cols_ + c];
  }

  void fill(T value) { v_.assign(v_.size(), value); }
  std::vector<T>& data() { return v_; }
  const std::vector<T>& data() const { return v_; }

  bool operator==(const Grid2&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> v_;
};

/** Dense 3-d array, layout (i, j, l) with l fastest. */
template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int n1, int n2, int n3, T fill = T{})
      : n1_(n1), n2_(n2), n3_(n3),
        v_(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2) * static_cast<std::size_t>(n3), fill) {}

  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  int dim3() const { return n3_; }

  T& operator()(int i, int j, int l) {
    assert(i >= 0 && i < n1_ && j >= 0 && j < n2_ && l >= 0 && l < n3_);
    return v_[(static_cast<std::size_t>(i) * n2_ + j) * n3_ + l];
  }
  const T& operator()(int i, int j, int l) const {
    assert(i >= 0 && i < n1_ && j >= 0 && j < n2_ && l >= 0 && l < n3_);
    return v_[(static_cast<std::size_t>(i) * n2_ + j) * n3_ + l];
  }

  void fill(T value) { v_.assign(v_.size(), value); }
  std::vector<T>& data() { return v_; }
  const std::vector<T>& data() const { return v_; }

  bool operator==(const Grid3&) const = default;

 private:
  int n1_ = 0;
  int n2_ = 0;
  int n3_ = 0;
  std::vector<T> v_;
};

}  // namespace crcdl
