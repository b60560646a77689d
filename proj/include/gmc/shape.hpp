#pragma once

#include <cstdint>
#include <string>

#include "gmc/errors.hpp"

namespace gmc {

using Dim = std::int64_t;

/// Matrix dimensions. Vectors are shapes with a unit dimension; there is no
/// separate vector type.
struct Shape {
  Dim rows = 0;
  Dim cols = 0;

  Shape() = default;
  Shape(Dim r, Dim c) : rows(r), cols(c) {
    if (r < 1 || c < 1)
      throw Error(ErrorKind::NonPositiveDimension,
                  "shape dimensions must be >= 1, got " + std::to_string(r) +
                      "x" + std::to_string(c));
  }

  bool square() const { return rows == cols; }
  bool column_vector() const { return cols == 1; }
  bool row_vector() const { return rows == 1; }
  bool vector() const { return column_vector() || row_vector(); }
  Dim elements() const { return rows * cols; }

  Shape transposed() const { return Shape(cols, rows); }

  friend bool operator==(const Shape&, const Shape&) = default;

  std::string str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }
};

} // namespace gmc
