#pragma once

#include <string>
#include <vector>

#include "gmc/expr.hpp"

namespace gmc {

/// A validated product chain: the factor sequence of the right-hand side of
/// one assignment, plus the target name it is assigned to.
struct Chain {
  std::string target;
  std::vector<Factor> factors;

  std::size_t length() const { return factors.size(); }

  Shape result_shape() const {
    return Shape(effective_shape(factors.front()).rows,
                 effective_shape(factors.back()).cols);
  }

  /// Boundary dimensions d0..dn: factor i has effective shape d_i x d_{i+1}.
  std::vector<Dim> boundary_sizes() const {
    std::vector<Dim> sizes;
    sizes.reserve(factors.size() + 1);
    sizes.push_back(effective_shape(factors.front()).rows);
    for (const Factor& f : factors) sizes.push_back(effective_shape(f).cols);
    return sizes;
  }
};

/// Validates length, squareness of inverted factors, and adjacent-shape
/// conformance. DimensionMismatch reports the index of the right-hand factor
/// of the offending pair.
inline Chain make_chain(std::string target, std::vector<Factor> factors) {
  if (factors.empty())
    throw Error(ErrorKind::ChainTooShort, "chain has no factors");
  if (factors.size() < 2)
    throw Error(ErrorKind::ChainTooShort,
                "chain must have length >= 2, got " +
                    std::to_string(factors.size()));
  for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
    Shape a = effective_shape(factors[i]);
    Shape b = effective_shape(factors[i + 1]);
    if (a.cols != b.rows)
      throw Error(ErrorKind::DimensionMismatch,
                  "factor " + std::to_string(i) + " (" + a.str() +
                      ") does not conform with factor " + std::to_string(i + 1) +
                      " (" + b.str() + ")",
                  static_cast<long>(i + 1));
  }
  return Chain{std::move(target), std::move(factors)};
}

/// Symbolic product of factors i..j (left-deep tree; i == j yields the single
/// modified factor).
inline ExprPtr subchain(const Chain& chain, std::size_t i, std::size_t j) {
  if (i > j || j >= chain.factors.size())
    throw Error(ErrorKind::IndexOutOfRange,
                "subchain(" + std::to_string(i) + ", " + std::to_string(j) +
                    ") of a chain of length " +
                    std::to_string(chain.factors.size()));
  ExprPtr e = factor_view(chain.factors[i]);
  for (std::size_t t = i + 1; t <= j; ++t)
    e = Expr::product(e, factor_view(chain.factors[t]));
  return e;
}

} // namespace gmc
