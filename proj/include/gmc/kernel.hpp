#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gmc/cost.hpp"
#include "gmc/inference.hpp"

namespace gmc {

/// Syntactic shapes a kernel can compute. Patterns never exceed the
/// f1(X)*f2(Y) form, so a pattern is fully described by the modifier on each
/// side plus whether both sides must bind the same operand. X names the
/// "special" operand (the one that is inverted, or that constraints usually
/// refer to); in the right-solve shapes X is the right factor.
enum class PatternShape {
  XY,   // X*Y
  XtY,  // X^T*Y
  XYt,  // X*Y^T
  XtYt, // X^T*Y^T
  XiY,  // X^-1*Y
  XitY, // X^-T*Y
  YXi,  // Y*X^-1
  YXit, // Y*X^-T
  XtX,  // X^T*X
  XXt,  // X*X^T
  XiYi, // X^-1*Y^-1 (not part of the default registry)
};

struct PatternInfo {
  UnaryMod left_mod;
  UnaryMod right_mod;
  bool same_operand;
  bool x_is_left; // which factor the X role binds
  const char* token;
};

inline const PatternInfo& pattern_info(PatternShape s) {
  static const PatternInfo table[] = {
      {UnaryMod::None, UnaryMod::None, false, true, "X*Y"},
      {UnaryMod::Transpose, UnaryMod::None, false, true, "X^T*Y"},
      {UnaryMod::None, UnaryMod::Transpose, false, true, "X*Y^T"},
      {UnaryMod::Transpose, UnaryMod::Transpose, false, true, "X^T*Y^T"},
      {UnaryMod::Inverse, UnaryMod::None, false, true, "X^-1*Y"},
      {UnaryMod::InverseTranspose, UnaryMod::None, false, true, "X^-T*Y"},
      {UnaryMod::None, UnaryMod::Inverse, false, false, "Y*X^-1"},
      {UnaryMod::None, UnaryMod::InverseTranspose, false, false, "Y*X^-T"},
      {UnaryMod::Transpose, UnaryMod::None, true, true, "X^T*X"},
      {UnaryMod::None, UnaryMod::Transpose, true, true, "X*X^T"},
      {UnaryMod::Inverse, UnaryMod::Inverse, false, true, "X^-1*Y^-1"},
  };
  return table[static_cast<int>(s)];
}

inline std::optional<PatternShape> pattern_from_token(const std::string& tok) {
  for (int i = 0; i <= static_cast<int>(PatternShape::XiYi); ++i) {
    auto s = static_cast<PatternShape>(i);
    if (tok == pattern_info(s).token) return s;
  }
  return std::nullopt;
}

/// A requirement on one bound role. Property constraints are checked with
/// the inference engine against the base subexpression (the stored operand,
/// before the pattern's modifier is applied); the vector predicates check the
/// base shape, which is what keeps matrix-vector kernels off matrix-matrix
/// products.
struct Constraint {
  enum class Kind { Prop, ColVector, RowVector };
  char role = 'X'; // 'X' or 'Y'
  Kind kind = Kind::Prop;
  Property property = Property::FullRank;

  std::string str() const {
    std::string what = kind == Kind::ColVector  ? "ColVector"
                       : kind == Kind::RowVector ? "RowVector"
                                                 : to_string(property);
    return what + "@" + std::string(1, role);
  }
};

struct Kernel {
  std::string name;
  PatternShape pattern = PatternShape::XY;
  std::vector<Constraint> constraints;
  CostFormula cost;
  std::string call_template; // empty means no BLAS-style emission available
  std::string exec;          // reference-implementation family for execution
  char out_slot = 'O';       // 'A' overwrite left, 'B' overwrite right, 'O' fresh
  std::vector<std::pair<std::string, std::string>> flags;

  std::string constraints_str() const {
    std::string out;
    for (const auto& c : constraints) {
      if (!out.empty()) out += ",";
      out += c.str();
    }
    return out.empty() ? "-" : out;
  }
};

/// The result of binding a pattern to a concrete product expression.
struct Binding {
  ExprPtr x;         // base subexpression bound to role X
  ExprPtr y;         // base subexpression bound to role Y (null for X^T*X / X*X^T)
  ExprPtr left_base; // base of the left factor as written
  ExprPtr right_base;
  UnaryMod left_mod = UnaryMod::None;
  UnaryMod right_mod = UnaryMod::None;
  Dims dims;
  Shape out_shape{1, 1};
};

using KernelPtr = std::shared_ptr<const Kernel>;

struct Match {
  KernelPtr kernel;
  Binding binding;
};

namespace detail {

struct SideView {
  ExprPtr base;
  UnaryMod mod = UnaryMod::None;
};

inline SideView side_view(const ExprPtr& e) {
  if (e->kind() == Expr::Kind::Modified) {
    const ExprPtr& c = e->child();
    if (c->kind() == Expr::Kind::Product)
      throw Error(ErrorKind::ShapeMismatch,
                  "kernel matching expects factors, not nested products");
    return {c, e->mod()};
  }
  if (e->kind() == Expr::Kind::Product)
    throw Error(ErrorKind::ShapeMismatch,
                "kernel matching expects factors, not nested products");
  return {e, UnaryMod::None};
}

inline bool same_base(const ExprPtr& a, const ExprPtr& b) {
  return struct_equal(a, b);
}

inline bool constraint_holds(const Constraint& c, const ExprPtr& bound) {
  switch (c.kind) {
  case Constraint::Kind::Prop: return has_property(bound, c.property);
  case Constraint::Kind::ColVector: return bound->shape().column_vector();
  case Constraint::Kind::RowVector: return bound->shape().row_vector();
  }
  return false;
}

} // namespace detail

/// Attempts to bind `kernel` to the two-factor product `expr`.
inline std::optional<Binding> bind_kernel(const Kernel& kernel,
                                          const ExprPtr& expr) {
  if (expr->kind() != Expr::Kind::Product) return std::nullopt;
  detail::SideView l = detail::side_view(expr->left());
  detail::SideView r = detail::side_view(expr->right());
  const PatternInfo& info = pattern_info(kernel.pattern);
  if (l.mod != info.left_mod || r.mod != info.right_mod) return std::nullopt;
  if (info.same_operand && !detail::same_base(l.base, r.base))
    return std::nullopt;

  Binding b;
  b.left_base = l.base;
  b.right_base = r.base;
  b.left_mod = l.mod;
  b.right_mod = r.mod;
  b.x = info.x_is_left ? l.base : r.base;
  b.y = info.same_operand ? nullptr : (info.x_is_left ? r.base : l.base);
  b.out_shape = expr->shape();
  b.dims.m = expr->shape().rows;
  b.dims.n = expr->shape().cols;
  b.dims.k = expr->left()->shape().cols;

  for (const Constraint& c : kernel.constraints) {
    const ExprPtr& bound = c.role == 'X' ? b.x : b.y;
    if (!bound || !detail::constraint_holds(c, bound)) return std::nullopt;
  }
  return b;
}

} // namespace gmc
