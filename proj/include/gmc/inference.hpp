#pragma once

#include <vector>

#include "gmc/expr.hpp"

namespace gmc {

/// Property maps for the unary operators. Transposition swaps the triangles
/// and fixes everything else; inversion preserves all six properties (the
/// inverse of a lower-triangular matrix is lower triangular, of a diagonal
/// diagonal, of an SPD matrix SPD, ...). Both maps are involutions.
inline Property transpose_property(Property p) {
  switch (p) {
  case Property::LowerTriangular: return Property::UpperTriangular;
  case Property::UpperTriangular: return Property::LowerTriangular;
  default: return p;
  }
}

inline Property inverse_property(Property p) { return p; }

namespace detail {

inline Factor transpose_factor(const Factor& f) {
  return Factor{f.operand, compose(f.mod, UnaryMod::Transpose)};
}

inline bool factor_equal(const Factor& a, const Factor& b) {
  return a.mod == b.mod && a.operand.name == b.operand.name &&
         a.operand.shape == b.operand.shape;
}

/// factors[r-1-t] == factors[t]^T for all t. An even-length sequence with
/// this property is of the form X^T X (with X the second half), which is
/// symmetric regardless of how the product tree is associated.
inline bool palindromic_transpose(const std::vector<Factor>& factors) {
  std::size_t r = factors.size();
  if (r < 2 || r % 2 != 0) return false;
  for (std::size_t t = 0; t < r / 2; ++t)
    if (!factor_equal(factors[r - 1 - t], transpose_factor(factors[t])))
      return false;
  return true;
}

inline bool factor_full_rank(const Factor& f) {
  // An inverted factor is nonsingular wherever the expression is defined.
  if (has_inverse(f.mod)) return true;
  return f.operand.properties.contains(Property::FullRank);
}

/// Full rank of a factor sequence: a single full-rank factor, or a product
/// of square nonsingular factors. (Rectangular products do not preserve
/// rank in general, so nothing is claimed for them.)
inline bool sequence_full_rank(const std::vector<Factor>& factors,
                               std::size_t begin, std::size_t end) {
  if (end - begin == 1) return factor_full_rank(factors[begin]);
  for (std::size_t t = begin; t < end; ++t)
    if (!effective_shape(factors[t]).square() || !factor_full_rank(factors[t]))
      return false;
  return true;
}

} // namespace detail

inline bool has_property(const ExprPtr& e, Property p);

namespace detail {

/// X^T X is SPD iff X has full column rank; the second half of a palindromic
/// factor sequence plays the role of X.
inline bool product_is_spd(const ExprPtr& e) {
  std::vector<Factor> factors;
  try {
    factors = flatten(e);
  } catch (const Error&) {
    return false; // inverse of a rectangular product: nothing derivable
  }
  if (!palindromic_transpose(factors)) return false;
  std::size_t half = factors.size() / 2;
  if (!sequence_full_rank(factors, half, factors.size())) return false;
  Dim rows = effective_shape(factors[half]).rows;
  Dim cols = effective_shape(factors.back()).cols;
  return rows >= cols;
}

inline bool product_is_symmetric(const ExprPtr& e) {
  try {
    return palindromic_transpose(flatten(e));
  } catch (const Error&) {
    return false;
  }
}

} // namespace detail

/// Sound (not complete) recursive check: true only if `p` is symbolically
/// derivable from the declared operand properties.
inline bool has_property(const ExprPtr& e, Property p) {
  switch (e->kind()) {
  case Expr::Kind::Leaf:
    return e->operand().properties.contains(p); // closed at construction
  case Expr::Kind::TempRef:
    return e->temporary()->properties.contains(p);
  case Expr::Kind::Modified: {
    if (p == Property::FullRank && has_inverse(e->mod())) return true;
    Property inner = has_transpose(e->mod()) ? transpose_property(p) : p;
    return has_property(e->child(), inner);
  }
  case Expr::Kind::Product: {
    const ExprPtr& l = e->left();
    const ExprPtr& r = e->right();
    switch (p) {
    case Property::Diagonal:
    case Property::LowerTriangular:
    case Property::UpperTriangular:
      // Triangularity and diagonality are preserved by products
      // (trapezoidal in the rectangular case).
      return has_property(l, p) && has_property(r, p);
    case Property::Symmetric:
      return detail::product_is_symmetric(e) ||
             (e->shape().square() && has_property(l, Property::Diagonal) &&
              has_property(r, Property::Diagonal));
    case Property::SPD:
      return detail::product_is_spd(e);
    case Property::FullRank:
      if (l->shape().square() && r->shape().square() &&
          has_property(l, Property::FullRank) &&
          has_property(r, Property::FullRank))
        return true;
      return detail::product_is_spd(e);
    }
    return false;
  }
  }
  return false;
}

/// All derivable properties of an expression, closed under implication.
/// Depends only on the underlying factor sequence (temporaries are expanded),
/// never on how the result will be computed.
inline PropertySet infer_properties(const ExprPtr& e) {
  PropertySet out;
  for (Property p : all_properties())
    if (has_property(e, p)) out.insert(p);
  return closure(out, e->shape().square());
}

} // namespace gmc
