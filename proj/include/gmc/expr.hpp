#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gmc/operand.hpp"

namespace gmc {

/// Unary decoration on a factor. Transposition and inversion commute, so a
/// modifier is a pair of flags and composition is bitwise XOR; stacked
/// modifiers always normalize to a single UnaryMod.
enum class UnaryMod : std::uint8_t {
  None = 0,
  Transpose = 1,
  Inverse = 2,
  InverseTranspose = 3,
};

inline UnaryMod compose(UnaryMod a, UnaryMod b) {
  return static_cast<UnaryMod>(static_cast<std::uint8_t>(a) ^
                               static_cast<std::uint8_t>(b));
}

inline bool has_transpose(UnaryMod m) {
  return static_cast<std::uint8_t>(m) & 1;
}

inline bool has_inverse(UnaryMod m) {
  return static_cast<std::uint8_t>(m) & 2;
}

/// Rendering used by the problem-file syntax and all emitters.
inline const char* mod_suffix(UnaryMod m) {
  switch (m) {
  case UnaryMod::None: return "";
  case UnaryMod::Transpose: return "^T";
  case UnaryMod::Inverse: return "^-1";
  case UnaryMod::InverseTranspose: return "^-T";
  }
  return "";
}

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Symbolic stand-in for a computed sub-chain. `defining` is the full
/// expression over original operands, so property inference on a temporary
/// always sees the underlying factors.
struct Temporary {
  std::string name;
  Shape shape;
  PropertySet properties;
  ExprPtr defining;
};

using TemporaryPtr = std::shared_ptr<const Temporary>;

/// A flattened factor: one operand with its effective modifier.
struct Factor {
  Operand operand;
  UnaryMod mod = UnaryMod::None;

  friend bool operator==(const Factor&, const Factor&) = default;
};

inline Shape effective_shape(const Operand& op, UnaryMod mod) {
  if (has_inverse(mod) && !op.shape.square())
    throw Error(ErrorKind::NonSquareInverse,
                "cannot invert " + op.name + " of shape " + op.shape.str());
  return has_transpose(mod) ? op.shape.transposed() : op.shape;
}

inline Shape effective_shape(const Factor& f) {
  return effective_shape(f.operand, f.mod);
}

/// Immutable expression tree. Nodes are shared; construction goes through the
/// factories below, which normalize stacked modifiers and validate shapes.
class Expr {
public:
  enum class Kind { Leaf, Modified, Product, TempRef };

  static ExprPtr leaf(Operand op) {
    auto e = std::make_shared<Expr>(Private{});
    e->kind_ = Kind::Leaf;
    e->operand_ = std::move(op);
    e->shape_ = e->operand_.shape;
    return e;
  }

  static ExprPtr temp_ref(TemporaryPtr t) {
    auto e = std::make_shared<Expr>(Private{});
    e->kind_ = Kind::TempRef;
    e->shape_ = t->shape;
    e->temp_ = std::move(t);
    return e;
  }

  static ExprPtr modified(UnaryMod mod, ExprPtr inner) {
    if (inner->kind_ == Kind::Modified) {
      mod = compose(mod, inner->mod_);
      inner = inner->child_;
    }
    if (mod == UnaryMod::None) return inner;
    if (has_inverse(mod) && !inner->shape().square())
      throw Error(ErrorKind::NonSquareInverse,
                  "cannot invert expression of shape " + inner->shape().str());
    auto e = std::make_shared<Expr>(Private{});
    e->kind_ = Kind::Modified;
    e->mod_ = mod;
    e->shape_ = has_transpose(mod) ? inner->shape().transposed() : inner->shape();
    e->child_ = std::move(inner);
    return e;
  }

  static ExprPtr product(ExprPtr left, ExprPtr right) {
    if (left->shape().cols != right->shape().rows)
      throw Error(ErrorKind::DimensionMismatch,
                  "product of " + left->shape().str() + " and " +
                      right->shape().str());
    auto e = std::make_shared<Expr>(Private{});
    e->kind_ = Kind::Product;
    e->shape_ = Shape(left->shape().rows, right->shape().cols);
    e->child_ = std::move(left);
    e->right_ = std::move(right);
    return e;
  }

  Kind kind() const { return kind_; }
  const Shape& shape() const { return shape_; }
  const Operand& operand() const { return operand_; }
  UnaryMod mod() const { return mod_; }
  const ExprPtr& child() const { return child_; }
  const ExprPtr& left() const { return child_; }
  const ExprPtr& right() const { return right_; }
  const TemporaryPtr& temporary() const { return temp_; }

  struct Private {};
  explicit Expr(Private) {}

private:
  Kind kind_ = Kind::Leaf;
  UnaryMod mod_ = UnaryMod::None;
  Shape shape_{1, 1};
  Operand operand_;
  ExprPtr child_;
  ExprPtr right_;
  TemporaryPtr temp_;
};

inline ExprPtr factor_view(const Factor& f) {
  return Expr::modified(f.mod, Expr::leaf(f.operand));
}

/// Replace temporary references by their defining expressions.
inline ExprPtr expand(const ExprPtr& e) {
  switch (e->kind()) {
  case Expr::Kind::Leaf: return e;
  case Expr::Kind::TempRef: return expand(e->temporary()->defining);
  case Expr::Kind::Modified: return Expr::modified(e->mod(), expand(e->child()));
  case Expr::Kind::Product:
    return Expr::product(expand(e->left()), expand(e->right()));
  }
  return e;
}

/// Structural transpose: distributes over products and composes into
/// modifiers, so the result never stacks Modified nodes.
inline ExprPtr transpose_of(const ExprPtr& e) {
  if (e->kind() == Expr::Kind::Product)
    return Expr::product(transpose_of(e->right()), transpose_of(e->left()));
  return Expr::modified(UnaryMod::Transpose, e);
}

inline bool struct_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
  case Expr::Kind::Leaf:
    return a->operand().name == b->operand().name &&
           a->operand().shape == b->operand().shape;
  case Expr::Kind::TempRef:
    return a->temporary()->name == b->temporary()->name;
  case Expr::Kind::Modified:
    return a->mod() == b->mod() && struct_equal(a->child(), b->child());
  case Expr::Kind::Product:
    return struct_equal(a->left(), b->left()) &&
           struct_equal(a->right(), b->right());
  }
  return false;
}

namespace detail {

inline void flatten_into(const ExprPtr& e, UnaryMod outer,
                         std::vector<Factor>& out) {
  switch (e->kind()) {
  case Expr::Kind::Leaf:
    out.push_back(Factor{e->operand(), outer});
    return;
  case Expr::Kind::TempRef:
    flatten_into(e->temporary()->defining, outer, out);
    return;
  case Expr::Kind::Modified:
    flatten_into(e->child(), compose(outer, e->mod()), out);
    return;
  case Expr::Kind::Product: {
    // (AB)^T = B^T A^T and (AB)^-1 = B^-1 A^-1, but (AB)^-T = A^-T B^-T:
    // the order flips iff exactly one of the two components is present.
    // Distributing an inverse is only valid when both factors are square.
    if (has_inverse(outer) &&
        (!e->left()->shape().square() || !e->right()->shape().square()))
      throw Error(ErrorKind::NonSquareInverse,
                  "inverse of a product of non-square factors");
    bool reverses = has_transpose(outer) != has_inverse(outer);
    const ExprPtr& first = reverses ? e->right() : e->left();
    const ExprPtr& second = reverses ? e->left() : e->right();
    flatten_into(first, outer, out);
    flatten_into(second, outer, out);
    return;
  }
  }
}

} // namespace detail

/// Expand temporaries and flatten the tree into its ordered factor sequence,
/// pushing modifiers down to the leaves.
inline std::vector<Factor> flatten(const ExprPtr& e) {
  std::vector<Factor> out;
  detail::flatten_into(e, UnaryMod::None, out);
  return out;
}

inline std::string to_string(const ExprPtr& e) {
  switch (e->kind()) {
  case Expr::Kind::Leaf: return e->operand().name;
  case Expr::Kind::TempRef: return e->temporary()->name;
  case Expr::Kind::Modified: {
    const ExprPtr& c = e->child();
    if (c->kind() == Expr::Kind::Product)
      return "(" + to_string(c) + ")" + mod_suffix(e->mod());
    return to_string(c) + mod_suffix(e->mod());
  }
  case Expr::Kind::Product: {
    auto wrap = [](const ExprPtr& s) {
      if (s->kind() == Expr::Kind::Product) return "(" + to_string(s) + ")";
      return to_string(s);
    };
    return wrap(e->left()) + " * " + wrap(e->right());
  }
  }
  return "?";
}

} // namespace gmc
