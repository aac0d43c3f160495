#include "tvmax/grid.hpp"

#include <cmath>
#include <string>

#include "tvmax/error.hpp"

namespace tvmax {

void require_finite(std::span<const double> values, const char* what) {
  if (values.empty()) throw InvalidInput(std::string(what) + " is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidInput(std::string(what) + " has a non-finite entry at index " +
                         std::to_string(i));
    }
  }
}

ScoreGrid::ScoreGrid(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) throw InvalidInput("grid dimensions must be positive");
  if (data_.size() != rows_ * cols_) {
    throw InvalidInput("grid data length " + std::to_string(data_.size()) + " does not match " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  require_finite(data_, "grid");
}

ScoreGrid ScoreGrid::row(std::vector<double> values) {
  const auto n = values.size();
  return ScoreGrid(1, n, std::move(values));
}

ScoreGrid ScoreGrid::filled(std::size_t rows, std::size_t cols, double value) {
  return ScoreGrid(rows, cols, std::vector<double>(rows * cols, value));
}

}  // namespace tvmax
