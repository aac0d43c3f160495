#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tvmax {

// Dense row-major a x b grid of finite reals. A 1D signal is a 1 x k grid.
class ScoreGrid {
 public:
  ScoreGrid() = default;
  // Throws InvalidInput if rows or cols is zero, the data length does not
  // match, or any entry is NaN/Inf.
  ScoreGrid(std::size_t rows, std::size_t cols, std::vector<double> data);

  static ScoreGrid row(std::vector<double> values);
  static ScoreGrid filled(std::size_t rows, std::size_t cols, double value);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool same_shape(const ScoreGrid& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const ScoreGrid&, const ScoreGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws InvalidInput naming `what` if `values` is empty or holds a non-finite entry.
void require_finite(std::span<const double> values, const char* what);

}  // namespace tvmax
