#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gmc/shape.hpp"

namespace gmc {

/// Dynamic operation counters for the reference kernels. Divisions and
/// square roots count as one floating-point operation each.
struct OpCounts {
  long long mults = 0;
  long long adds = 0;
  long long divs = 0;
  long long sqrts = 0;

  long long flops() const { return mults + adds + divs + sqrts; }

  OpCounts& operator+=(const OpCounts& o) {
    mults += o.mults;
    adds += o.adds;
    divs += o.divs;
    sqrts += o.sqrts;
    return *this;
  }
};

/// Row-major dense double-precision matrix; the numeric reference type.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(Dim rows, Dim cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows * cols), fill) {
    if (rows < 1 || cols < 1)
      throw Error(ErrorKind::NonPositiveDimension, "matrix dimensions");
  }

  static DenseMatrix identity(Dim n) {
    DenseMatrix m(n, n);
    for (Dim i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  Dim rows() const { return rows_; }
  Dim cols() const { return cols_; }
  Shape shape() const { return Shape(rows_, cols_); }

  double& at(Dim i, Dim j) {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }
  double at(Dim i, Dim j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (Dim i = 0; i < rows_; ++i)
      for (Dim j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
  }

  double frobenius() const {
    double s = 0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

private:
  Dim rows_ = 0;
  Dim cols_ = 0;
  std::vector<double> data_;
};

inline double rel_frobenius_error(const DenseMatrix& got,
                                  const DenseMatrix& want) {
  if (got.rows() != want.rows() || got.cols() != want.cols())
    throw Error(ErrorKind::ShapeMismatch, "comparing matrices of different shapes");
  double diff = 0;
  for (Dim i = 0; i < got.rows(); ++i)
    for (Dim j = 0; j < got.cols(); ++j) {
      double d = got.at(i, j) - want.at(i, j);
      diff += d * d;
    }
  double ref = want.frobenius();
  return std::sqrt(diff) / (ref > 0 ? ref : 1.0);
}

// ---------------------------------------------------------------------------
// Reference kernels. All counters reflect the work the loops actually do.
// ---------------------------------------------------------------------------

/// C = A * B, plain triple loop: m*n*k multiplications, m*n*(k-1) additions.
inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b,
                            OpCounts* counts = nullptr) {
  if (a.cols() != b.rows())
    throw Error(ErrorKind::ShapeMismatch,
                "multiply: " + a.shape().str() + " by " + b.shape().str());
  DenseMatrix c(a.rows(), b.cols());
  for (Dim i = 0; i < a.rows(); ++i)
    for (Dim j = 0; j < b.cols(); ++j) {
      double s = 0;
      for (Dim l = 0; l < a.cols(); ++l) s += a.at(i, l) * b.at(l, j);
      c.at(i, j) = s;
      if (counts) {
        counts->mults += a.cols();
        counts->adds += a.cols() - 1;
      }
    }
  return c;
}

namespace linalg {

inline constexpr double kPivotTolerance = 1e-12;

/// LU factorization with partial pivoting, stored packed; perm is the row
/// permutation applied to the input. Fails when a pivot falls below
/// kPivotTolerance relative to its column's scale.
struct LuFactors {
  DenseMatrix lu;
  std::vector<Dim> perm;
};

inline LuFactors lu_factor(DenseMatrix a, OpCounts* counts = nullptr) {
  if (!a.shape().square())
    throw Error(ErrorKind::ShapeMismatch, "LU needs a square matrix");
  Dim n = a.rows();
  std::vector<double> col_scale(static_cast<std::size_t>(n), 0.0);
  for (Dim j = 0; j < n; ++j)
    for (Dim i = 0; i < n; ++i)
      col_scale[static_cast<std::size_t>(j)] =
          std::max(col_scale[static_cast<std::size_t>(j)], std::fabs(a.at(i, j)));

  LuFactors f;
  f.perm.resize(static_cast<std::size_t>(n));
  for (Dim i = 0; i < n; ++i) f.perm[static_cast<std::size_t>(i)] = i;

  for (Dim j = 0; j + 1 <= n; ++j) {
    Dim piv = j;
    for (Dim i = j + 1; i < n; ++i)
      if (std::fabs(a.at(i, j)) > std::fabs(a.at(piv, j))) piv = i;
    double scale = col_scale[static_cast<std::size_t>(j)];
    if (scale == 0.0 || std::fabs(a.at(piv, j)) < kPivotTolerance * scale)
      throw Error(ErrorKind::SingularSystem,
                  "pivot below tolerance in column " + std::to_string(j));
    if (piv != j) {
      for (Dim c = 0; c < n; ++c) std::swap(a.at(j, c), a.at(piv, c));
      std::swap(f.perm[static_cast<std::size_t>(j)],
                f.perm[static_cast<std::size_t>(piv)]);
    }
    for (Dim i = j + 1; i < n; ++i) {
      double m = a.at(i, j) / a.at(j, j);
      a.at(i, j) = m;
      if (counts) counts->divs += 1;
      for (Dim c = j + 1; c < n; ++c) {
        a.at(i, c) -= m * a.at(j, c);
        if (counts) {
          counts->mults += 1;
          counts->adds += 1;
        }
      }
    }
  }
  f.lu = std::move(a);
  return f;
}

/// B := A^{-1} B given the factorization of A.
inline void lu_solve_inplace(const LuFactors& f, DenseMatrix& b,
                             OpCounts* counts = nullptr) {
  Dim n = f.lu.rows();
  if (b.rows() != n)
    throw Error(ErrorKind::ShapeMismatch, "LU solve: RHS rows mismatch");
  DenseMatrix pb(n, b.cols());
  for (Dim i = 0; i < n; ++i)
    for (Dim j = 0; j < b.cols(); ++j)
      pb.at(i, j) = b.at(f.perm[static_cast<std::size_t>(i)], j);
  // unit lower solve
  for (Dim j = 0; j < b.cols(); ++j)
    for (Dim i = 0; i < n; ++i) {
      double s = pb.at(i, j);
      for (Dim l = 0; l < i; ++l) {
        s -= f.lu.at(i, l) * pb.at(l, j);
        if (counts) {
          counts->mults += 1;
          counts->adds += 1;
        }
      }
      pb.at(i, j) = s;
    }
  // upper solve
  for (Dim j = 0; j < b.cols(); ++j)
    for (Dim i = n - 1; i >= 0; --i) {
      double s = pb.at(i, j);
      for (Dim l = i + 1; l < n; ++l) {
        s -= f.lu.at(i, l) * pb.at(l, j);
        if (counts) {
          counts->mults += 1;
          counts->adds += 1;
        }
      }
      pb.at(i, j) = s / f.lu.at(i, i);
      if (counts) counts->divs += 1;
    }
  b = std::move(pb);
}

/// Lower Cholesky factor of an SPD matrix; fails on non-positive pivots.
inline DenseMatrix cholesky(const DenseMatrix& a, OpCounts* counts = nullptr) {
  if (!a.shape().square())
    throw Error(ErrorKind::ShapeMismatch, "Cholesky needs a square matrix");
  Dim n = a.rows();
  double scale = a.max_abs();
  DenseMatrix l(n, n);
  for (Dim j = 0; j < n; ++j) {
    double d = a.at(j, j);
    for (Dim t = 0; t < j; ++t) {
      d -= l.at(j, t) * l.at(j, t);
      if (counts) {
        counts->mults += 1;
        counts->adds += 1;
      }
    }
    if (!(d > kPivotTolerance * scale))
      throw Error(ErrorKind::SingularSystem,
                  "matrix is not numerically positive definite at column " +
                      std::to_string(j));
    l.at(j, j) = std::sqrt(d);
    if (counts) counts->sqrts += 1;
    for (Dim i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (Dim t = 0; t < j; ++t) {
        s -= l.at(i, t) * l.at(j, t);
        if (counts) {
          counts->mults += 1;
          counts->adds += 1;
        }
      }
      l.at(i, j) = s / l.at(j, j);
      if (counts) counts->divs += 1;
    }
  }
  return l;
}

/// Unpivoted LDL^T of a symmetric matrix, with a pivot-size guard. Adequate
/// as a reference for the well-conditioned systems the test generators
/// produce; genuinely tiny pivots surface as SingularSystem.
struct LdltFactors {
  DenseMatrix l;          // unit lower
  std::vector<double> d;  // diagonal
};

inline LdltFactors ldlt(const DenseMatrix& a, OpCounts* counts = nullptr) {
  if (!a.shape().square())
    throw Error(ErrorKind::ShapeMismatch, "LDL^T needs a square matrix");
  Dim n = a.rows();
  double scale = a.max_abs();
  LdltFactors f{DenseMatrix(n, n), std::vector<double>(static_cast<std::size_t>(n))};
  std::vector<double> w(static_cast<std::size_t>(n)); // d_t * L(j,t) cache
  for (Dim i = 0; i < n; ++i) f.l.at(i, i) = 1.0;
  for (Dim j = 0; j < n; ++j) {
    double d = a.at(j, j);
    for (Dim t = 0; t < j; ++t) {
      w[static_cast<std::size_t>(t)] =
          f.d[static_cast<std::size_t>(t)] * f.l.at(j, t);
      d -= w[static_cast<std::size_t>(t)] * f.l.at(j, t);
      if (counts) {
        counts->mults += 2;
        counts->adds += 1;
      }
    }
    if (scale == 0.0 || std::fabs(d) < kPivotTolerance * scale)
      throw Error(ErrorKind::SingularSystem,
                  "LDL^T pivot below tolerance at column " + std::to_string(j));
    f.d[static_cast<std::size_t>(j)] = d;
    for (Dim i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (Dim t = 0; t < j; ++t) {
        s -= f.l.at(i, t) * w[static_cast<std::size_t>(t)];
        if (counts) {
          counts->mults += 1;
          counts->adds += 1;
        }
      }
      f.l.at(i, j) = s / d;
      if (counts) counts->divs += 1;
    }
  }
  return f;
}

inline void ldlt_solve_inplace(const LdltFactors& f, DenseMatrix& b,
                               OpCounts* counts = nullptr) {
  Dim n = f.l.rows();
  if (b.rows() != n)
    throw Error(ErrorKind::ShapeMismatch, "LDL^T solve: RHS rows mismatch");
  for (Dim j = 0; j < b.cols(); ++j) {
    for (Dim i = 0; i < n; ++i) {
      double s = b.at(i, j);
      for (Dim l = 0; l < i; ++l) {
        s -= f.l.at(i, l) * b.at(l, j);
        if (counts) {
          counts->mults += 1;
          counts->adds += 1;
        }
      }
      b.at(i, j) = s;
    }
    for (Dim i = 0; i < n; ++i) {
      b.at(i, j) /= f.d[static_cast<std::size_t>(i)];
      if (counts) counts->divs += 1;
    }
    for (Dim i = n - 1; i >= 0; --i) {
      double s = b.at(i, j);
      for (Dim l = i + 1; l < n; ++l) {
        s -= f.l.at(l, i) * b.at(l, j);
        if (counts) {
          counts->mults += 1;
          counts->adds += 1;
        }
      }
      b.at(i, j) = s;
    }
  }
}

/// B := T^{-1} B for a triangular T (lower if `lower`, both non-unit).
inline void triangular_solve_inplace(const DenseMatrix& t, bool lower,
                                     DenseMatrix& b,
                                     OpCounts* counts = nullptr) {
  Dim n = t.rows();
  if (!t.shape().square() || b.rows() != n)
    throw Error(ErrorKind::ShapeMismatch, "triangular solve shapes");
  double scale = 0;
  for (Dim i = 0; i < n; ++i) scale = std::max(scale, std::fabs(t.at(i, i)));
  for (Dim i = 0; i < n; ++i)
    if (scale == 0.0 || std::fabs(t.at(i, i)) < kPivotTolerance * scale)
      throw Error(ErrorKind::SingularSystem,
                  "triangular matrix has a vanishing diagonal entry");
  for (Dim j = 0; j < b.cols(); ++j) {
    if (lower) {
      for (Dim i = 0; i < n; ++i) {
        double s = b.at(i, j);
        for (Dim l = 0; l < i; ++l) {
          s -= t.at(i, l) * b.at(l, j);
          if (counts) {
            counts->mults += 1;
            counts->adds += 1;
          }
        }
        b.at(i, j) = s / t.at(i, i);
        if (counts) counts->divs += 1;
      }
    } else {
      for (Dim i = n - 1; i >= 0; --i) {
        double s = b.at(i, j);
        for (Dim l = i + 1; l < n; ++l) {
          s -= t.at(i, l) * b.at(l, j);
          if (counts) {
            counts->mults += 1;
            counts->adds += 1;
          }
        }
        b.at(i, j) = s / t.at(i, i);
        if (counts) counts->divs += 1;
      }
    }
  }
}

/// A^{-1} B via LU; the workhorse behind naive evaluation and general solves.
inline DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b,
                         OpCounts* counts = nullptr) {
  LuFactors f = lu_factor(a, counts);
  DenseMatrix x = b;
  lu_solve_inplace(f, x, counts);
  return x;
}

} // namespace linalg

} // namespace gmc
