#pragma once

#include <map>
#include <random>
#include <string>

#include "gmc/matrix.hpp"
#include "gmc/parser.hpp"
#include "gmc/solver.hpp"

namespace gmc {

struct ExecReport {
  std::map<std::string, OpCounts> per_kernel;
  std::vector<OpCounts> per_call;
  OpCounts total;
  double max_rel_error = 0.0;
  bool pass = true;
};

// ---------------------------------------------------------------------------
// Random instantiation honoring declared properties
// ---------------------------------------------------------------------------

namespace detail {

inline double unit_draw(std::mt19937_64& eng) {
  // top 53 bits -> [0,1); avoids distribution objects, which are not
  // bit-stable across standard libraries
  return static_cast<double>(eng() >> 11) * (1.0 / 9007199254740992.0);
}

inline DenseMatrix shaped_random(const Operand& op, std::mt19937_64& eng) {
  Dim r = op.shape.rows, c = op.shape.cols;
  DenseMatrix m(r, c);
  for (Dim i = 0; i < r; ++i)
    for (Dim j = 0; j < c; ++j) m.at(i, j) = 2.0 * unit_draw(eng) - 1.0;

  const PropertySet& p = op.properties;
  if (p.contains(Property::SPD)) {
    // M M^T + rows*I: symmetric, positive definite and well conditioned
    DenseMatrix a = multiply(m, m.transposed());
    for (Dim i = 0; i < r; ++i) a.at(i, i) += static_cast<double>(r);
    return a;
  }
  bool lower = p.contains(Property::LowerTriangular);
  bool upper = p.contains(Property::UpperTriangular);
  bool sym = p.contains(Property::Symmetric);
  if (p.contains(Property::Diagonal) || (sym && (lower || upper))) {
    for (Dim i = 0; i < r; ++i)
      for (Dim j = 0; j < c; ++j)
        if (i != j) m.at(i, j) = 0.0;
  } else if (lower) {
    for (Dim i = 0; i < r; ++i)
      for (Dim j = i + 1; j < c; ++j) m.at(i, j) = 0.0;
  } else if (upper) {
    for (Dim i = 0; i < r; ++i)
      for (Dim j = 0; j < std::min(i, c); ++j) m.at(i, j) = 0.0;
  } else if (sym) {
    for (Dim i = 0; i < r; ++i)
      for (Dim j = 0; j < i; ++j) {
        double v = 0.5 * (m.at(i, j) + m.at(j, i));
        m.at(i, j) = v;
        m.at(j, i) = v;
      }
  }
  if (p.contains(Property::FullRank)) {
    // diagonal dominance keeps declared-nonsingular operands far from
    // singular, so inverted factors stay well conditioned in tests
    Dim d = std::min(r, c);
    for (Dim i = 0; i < d; ++i)
      m.at(i, i) += static_cast<double>(std::max(r, c));
  }
  return m;
}

} // namespace detail

/// Deterministic per seed; operands are drawn in the order given. Entries are
/// uniform in [-1, 1] before shaping.
inline std::map<std::string, DenseMatrix>
random_instantiate(const std::vector<Operand>& operands, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::map<std::string, DenseMatrix> values;
  for (const Operand& op : operands)
    values.emplace(op.name, detail::shaped_random(op, eng));
  return values;
}

// ---------------------------------------------------------------------------
// Reference execution of plans
// ---------------------------------------------------------------------------

namespace detail {

inline DenseMatrix eff_matrix(const DenseMatrix& base, UnaryMod mod) {
  return has_transpose(mod) ? base.transposed() : base;
}

struct ConstraintRoles {
  bool found = false;
  bool on_left = false;
  bool lower = false; // for triangular constraints
};

inline ConstraintRoles find_role(const Kernel& k, Property a,
                                 Property b = Property::FullRank,
                                 bool use_b = false) {
  ConstraintRoles out;
  const PatternInfo& info = pattern_info(k.pattern);
  for (const Constraint& c : k.constraints) {
    if (c.kind != Constraint::Kind::Prop) continue;
    if (c.property == a || (use_b && c.property == b)) {
      out.found = true;
      out.on_left = (c.role == 'X') == info.x_is_left;
      out.lower = c.property != Property::UpperTriangular;
      return out;
    }
  }
  return out;
}

/// Structure-aware triangular multiply: contraction runs over the stored
/// triangle only, which is what makes the counted work match the m^2 n model.
inline DenseMatrix triangular_multiply(const DenseMatrix& l,
                                       const DenseMatrix& r, bool tri_left,
                                       bool tri_lower, OpCounts* counts) {
  DenseMatrix out(l.rows(), r.cols());
  Dim kdim = l.cols();
  for (Dim i = 0; i < l.rows(); ++i)
    for (Dim j = 0; j < r.cols(); ++j) {
      Dim lo = 0, hi = kdim; // contraction range [lo, hi)
      if (tri_left) {
        if (tri_lower) hi = std::min(i + 1, kdim);
        else lo = std::min(i, kdim);
      } else {
        if (tri_lower) lo = std::min(j, kdim);
        else hi = std::min(j + 1, kdim);
      }
      double s = 0;
      for (Dim t = lo; t < hi; ++t) s += l.at(i, t) * r.at(t, j);
      out.at(i, j) = s;
      if (counts && hi > lo) {
        counts->mults += hi - lo;
        counts->adds += hi - lo - 1;
      }
    }
  return out;
}

/// Symmetric multiply reading one triangle of the symmetric operand. The
/// contraction is still full length: the counted work is 2mnk - mn, twice
/// the m^2 n cost model carried by the registry (see the counter notes in
/// the README).
inline DenseMatrix symmetric_multiply(const DenseMatrix& sym_base,
                                      const DenseMatrix& other, bool sym_left,
                                      OpCounts* counts) {
  auto sym_at = [&](Dim i, Dim j) {
    return i >= j ? sym_base.at(i, j) : sym_base.at(j, i);
  };
  Dim m = sym_left ? sym_base.rows() : other.rows();
  Dim n = sym_left ? other.cols() : sym_base.cols();
  Dim kdim = sym_left ? other.rows() : other.cols();
  DenseMatrix out(m, n);
  for (Dim i = 0; i < m; ++i)
    for (Dim j = 0; j < n; ++j) {
      double s = 0;
      for (Dim t = 0; t < kdim; ++t)
        s += sym_left ? sym_at(i, t) * other.at(t, j)
                      : other.at(i, t) * sym_at(t, j);
      out.at(i, j) = s;
      if (counts) {
        counts->mults += kdim;
        counts->adds += kdim - 1;
      }
    }
  return out;
}

/// Rank-k update X^T X or X X^T: computes the lower triangle and mirrors it.
inline DenseMatrix rank_k_update(const DenseMatrix& x, bool transpose_first,
                                 OpCounts* counts) {
  Dim m = transpose_first ? x.cols() : x.rows();
  Dim kdim = transpose_first ? x.rows() : x.cols();
  DenseMatrix out(m, m);
  for (Dim i = 0; i < m; ++i)
    for (Dim j = 0; j <= i; ++j) {
      double s = 0;
      for (Dim t = 0; t < kdim; ++t)
        s += transpose_first ? x.at(t, i) * x.at(t, j)
                             : x.at(i, t) * x.at(j, t);
      out.at(i, j) = s;
      out.at(j, i) = s;
      if (counts) {
        counts->mults += kdim;
        counts->adds += kdim - 1;
      }
    }
  return out;
}

/// Multiply by a (possibly trapezoidal) diagonal operand. `diag` is the
/// effective matrix: a p x q trapezoid with entries only at (t, t).
inline DenseMatrix diagonal_multiply(const DenseMatrix& diag,
                                     const DenseMatrix& other, bool diag_left,
                                     OpCounts* counts) {
  Dim m = diag_left ? diag.rows() : other.rows();
  Dim n = diag_left ? other.cols() : diag.cols();
  Dim kdim = diag_left ? diag.cols() : diag.rows();
  DenseMatrix out(m, n);
  for (Dim i = 0; i < m; ++i)
    for (Dim j = 0; j < n; ++j) {
      if (diag_left) {
        if (i < kdim) {
          out.at(i, j) = diag.at(i, i) * other.at(i, j);
          if (counts) counts->mults += 1;
        }
      } else {
        if (j < kdim) {
          out.at(i, j) = other.at(i, j) * diag.at(j, j);
          if (counts) counts->mults += 1;
        }
      }
    }
  return out;
}

inline DenseMatrix diagonal_solve(const DenseMatrix& diag,
                                  const DenseMatrix& rhs, bool diag_left,
                                  OpCounts* counts) {
  Dim n = diag.rows();
  double scale = 0;
  for (Dim i = 0; i < n; ++i) scale = std::max(scale, std::fabs(diag.at(i, i)));
  for (Dim i = 0; i < n; ++i)
    if (scale == 0.0 ||
        std::fabs(diag.at(i, i)) < linalg::kPivotTolerance * scale)
      throw Error(ErrorKind::SingularSystem,
                  "diagonal entry below tolerance at " + std::to_string(i));
  DenseMatrix out = rhs;
  for (Dim i = 0; i < rhs.rows(); ++i)
    for (Dim j = 0; j < rhs.cols(); ++j) {
      out.at(i, j) /= diag_left ? diag.at(i, i) : diag.at(j, j);
      if (counts) counts->divs += 1;
    }
  return out;
}

inline DenseMatrix cholesky_solve(const DenseMatrix& spd,
                                  const DenseMatrix& rhs, OpCounts* counts) {
  DenseMatrix l = linalg::cholesky(spd, counts);
  DenseMatrix z = rhs;
  linalg::triangular_solve_inplace(l, true, z, counts);
  DenseMatrix lt = l.transposed();
  linalg::triangular_solve_inplace(lt, false, z, counts);
  return z;
}

inline DenseMatrix ldlt_solve(const DenseMatrix& sym, const DenseMatrix& rhs,
                              OpCounts* counts) {
  linalg::LdltFactors f = linalg::ldlt(sym, counts);
  DenseMatrix z = rhs;
  linalg::ldlt_solve_inplace(f, z, counts);
  return z;
}

inline DenseMatrix explicit_inverse(const DenseMatrix& a, OpCounts* counts) {
  return linalg::solve(a, DenseMatrix::identity(a.rows()), counts);
}

inline DenseMatrix run_kernel(const KernelCall& call, const DenseMatrix& lbase,
                              const DenseMatrix& rbase, OpCounts* counts) {
  if (!call.kernel_def)
    throw Error(ErrorKind::MissingEntry,
                "kernel '" + call.kernel +
                    "' has no attached definition; execute plans produced "
                    "against a registry");
  const Kernel& k = *call.kernel_def;
  const std::string& exec = k.exec;
  UnaryMod lmod = call.left_mod, rmod = call.right_mod;

  if (exec == "trmm") {
    ConstraintRoles tri = find_role(k, Property::LowerTriangular,
                                    Property::UpperTriangular, true);
    if (!tri.found)
      throw Error(ErrorKind::InvalidKernelSpec,
                  call.kernel + ": trmm kernel without triangular constraint");
    bool eff_lower =
        tri.lower != has_transpose(tri.on_left ? lmod : rmod);
    return triangular_multiply(eff_matrix(lbase, lmod), eff_matrix(rbase, rmod),
                               tri.on_left, eff_lower, counts);
  }
  if (exec == "symm") {
    ConstraintRoles sym = find_role(k, Property::Symmetric);
    if (!sym.found)
      throw Error(ErrorKind::InvalidKernelSpec,
                  call.kernel + ": symm kernel without symmetric constraint");
    // transposing the symmetric operand is a no-op; read it untransposed
    return sym.on_left ? symmetric_multiply(lbase, eff_matrix(rbase, rmod),
                                            true, counts)
                       : symmetric_multiply(rbase, eff_matrix(lbase, lmod),
                                            false, counts);
  }
  if (exec == "syrk")
    return rank_k_update(lbase, has_transpose(lmod), counts);
  if (exec == "diagmm") {
    ConstraintRoles d = find_role(k, Property::Diagonal);
    return diagonal_multiply(d.on_left ? eff_matrix(lbase, lmod)
                                       : eff_matrix(rbase, rmod),
                             d.on_left ? eff_matrix(rbase, rmod)
                                       : eff_matrix(lbase, lmod),
                             d.on_left, counts);
  }
  if (exec == "diagsv") {
    bool inv_left = has_inverse(lmod);
    return diagonal_solve(inv_left ? lbase : rbase,
                          inv_left ? eff_matrix(rbase, rmod)
                                   : eff_matrix(lbase, lmod),
                          inv_left, counts);
  }
  if (exec == "trsm") {
    ConstraintRoles tri = find_role(k, Property::LowerTriangular,
                                    Property::UpperTriangular, true);
    if (has_inverse(lmod)) {
      // op(X)^{-1} * Y
      DenseMatrix t = has_transpose(lmod) ? lbase.transposed() : lbase;
      bool lower = tri.lower != has_transpose(lmod);
      DenseMatrix z = eff_matrix(rbase, rmod);
      linalg::triangular_solve_inplace(t, lower, z, counts);
      return z;
    }
    // Y * op(X)^{-1}  ==  (op(X)^T)^{-1} Y^T, transposed back
    DenseMatrix t = has_transpose(rmod) ? rbase : rbase.transposed();
    bool lower = tri.lower == has_transpose(rmod);
    DenseMatrix z = eff_matrix(lbase, lmod).transposed();
    linalg::triangular_solve_inplace(t, lower, z, counts);
    return z.transposed();
  }
  if (exec == "posv" || exec == "sysv") {
    bool spd = exec == "posv";
    // the coefficient matrix is symmetric, so its transpose solves are
    // identical and right solves reduce to a left solve of the transpose
    if (has_inverse(lmod)) {
      DenseMatrix z = eff_matrix(rbase, rmod);
      return spd ? cholesky_solve(lbase, z, counts)
                 : ldlt_solve(lbase, z, counts);
    }
    DenseMatrix z = eff_matrix(lbase, lmod).transposed();
    DenseMatrix w = spd ? cholesky_solve(rbase, z, counts)
                        : ldlt_solve(rbase, z, counts);
    return w.transposed();
  }
  if (exec == "gesv") {
    if (has_inverse(lmod)) {
      DenseMatrix a = has_transpose(lmod) ? lbase.transposed() : lbase;
      return linalg::solve(a, eff_matrix(rbase, rmod), counts);
    }
    DenseMatrix a = has_transpose(rmod) ? rbase : rbase.transposed();
    DenseMatrix w = linalg::solve(a, eff_matrix(lbase, lmod).transposed(),
                                  counts);
    return w.transposed();
  }
  if (exec == "inv_gemm" || exec == "invinv") {
    DenseMatrix l = has_inverse(lmod)
                        ? explicit_inverse(
                              has_transpose(lmod) ? lbase.transposed() : lbase,
                              counts)
                        : eff_matrix(lbase, lmod);
    DenseMatrix r = has_inverse(rmod)
                        ? explicit_inverse(
                              has_transpose(rmod) ? rbase.transposed() : rbase,
                              counts)
                        : eff_matrix(rbase, rmod);
    return multiply(l, r, counts);
  }
  // gemm family and any unannotated product kernel
  if (has_inverse(lmod) || has_inverse(rmod)) {
    if (has_inverse(lmod)) {
      DenseMatrix a = has_transpose(lmod) ? lbase.transposed() : lbase;
      return linalg::solve(a, eff_matrix(rbase, rmod), counts);
    }
    DenseMatrix a = has_transpose(rmod) ? rbase : rbase.transposed();
    return linalg::solve(a, eff_matrix(lbase, lmod).transposed(), counts)
        .transposed();
  }
  return multiply(eff_matrix(lbase, lmod), eff_matrix(rbase, rmod), counts);
}

} // namespace detail

/// Runs the reference implementation of every call in order, producing the
/// final value and per-call operation counts.
inline DenseMatrix execute_plan(const Plan& plan,
                                const std::map<std::string, DenseMatrix>& values,
                                ExecReport* report = nullptr) {
  std::map<std::string, DenseMatrix> env = values;
  const DenseMatrix* last = nullptr;
  for (const KernelCall& call : plan.calls) {
    auto li = env.find(call.left);
    auto ri = env.find(call.right);
    if (li == env.end() || ri == env.end())
      throw Error(ErrorKind::MissingEntry,
                  "plan input '" + (li == env.end() ? call.left : call.right) +
                      "' has no value");
    Shape le = has_transpose(call.left_mod) ? li->second.shape().transposed()
                                            : li->second.shape();
    Shape re = has_transpose(call.right_mod) ? ri->second.shape().transposed()
                                             : ri->second.shape();
    if (le.rows != call.dims.m || le.cols != call.dims.k ||
        re.rows != call.dims.k || re.cols != call.dims.n)
      throw Error(ErrorKind::ShapeMismatch,
                  "call " + call.output + " := " + call.expr_str() +
                      " got operands of unexpected shape");
    OpCounts counts;
    DenseMatrix out = detail::run_kernel(call, li->second, ri->second,
                                         report ? &counts : nullptr);
    if (report) {
      report->per_call.push_back(counts);
      report->per_kernel[call.kernel] += counts;
      report->total += counts;
    }
    auto [it, _] = env.insert_or_assign(call.output, std::move(out));
    last = &it->second;
  }
  if (!last)
    throw Error(ErrorKind::UnsolvableRange, "plan has no calls");
  return *last;
}

/// Ground truth: strict left-to-right evaluation with explicit solves.
/// An inverted factor is applied by solving against the accumulated result;
/// the inverse is only formed when the inverted factor comes first, in which
/// case it is the solution of op(X) Z = I.
inline DenseMatrix evaluate_naive(const Chain& chain,
                                  const std::map<std::string, DenseMatrix>& values) {
  auto value_of = [&](const Factor& f) -> const DenseMatrix& {
    auto it = values.find(f.operand.name);
    if (it == values.end())
      throw Error(ErrorKind::MissingEntry,
                  "no value for operand " + f.operand.name);
    if (it->second.shape() != f.operand.shape)
      throw Error(ErrorKind::ShapeMismatch,
                  "value for " + f.operand.name + " has shape " +
                      it->second.shape().str() + ", declared " +
                      f.operand.shape.str());
    return it->second;
  };

  const Factor& first = chain.factors.front();
  DenseMatrix acc;
  if (has_inverse(first.mod)) {
    DenseMatrix a = has_transpose(first.mod)
                        ? value_of(first).transposed()
                        : value_of(first);
    acc = linalg::solve(a, DenseMatrix::identity(a.rows()));
  } else {
    acc = detail::eff_matrix(value_of(first), first.mod);
  }
  for (std::size_t i = 1; i < chain.factors.size(); ++i) {
    const Factor& f = chain.factors[i];
    if (has_inverse(f.mod)) {
      // acc := acc * op(X)^{-1}  ==  (op(X)^T \ acc^T)^T
      DenseMatrix a = has_transpose(f.mod) ? value_of(f) : value_of(f).transposed();
      acc = linalg::solve(a, acc.transposed()).transposed();
    } else {
      acc = multiply(acc, detail::eff_matrix(value_of(f), f.mod));
    }
  }
  return acc;
}

/// Runs `trials` seeded instantiations of the plan against naive evaluation.
/// A trial that hits a singular system is re-drawn once with a shifted seed;
/// if the re-draw is singular too the trial counts as failed. The returned
/// report carries the accumulated counters, the worst relative error and the
/// pass/fail verdict at `tolerance`.
struct TrialFailure {
  int trial;
  std::string message;
};

inline ExecReport verify_plan(const Plan& plan, const Chain& chain,
                              const std::vector<Operand>& operands,
                              std::uint64_t seed, int trials,
                              double tolerance = 1e-8,
                              std::vector<TrialFailure>* failures = nullptr) {
  ExecReport report;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
    bool done = false;
    std::string last_error;
    for (int attempt = 0; attempt < 2 && !done; ++attempt) {
      auto values = random_instantiate(operands,
                                       trial_seed + (attempt ? 1000003u : 0u));
      try {
        DenseMatrix got = execute_plan(plan, values, &report);
        DenseMatrix want = evaluate_naive(chain, values);
        report.max_rel_error =
            std::max(report.max_rel_error, rel_frobenius_error(got, want));
        done = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularSystem) throw;
        last_error = e.what();
      }
    }
    if (!done) {
      report.pass = false;
      if (failures) failures->push_back({t, last_error});
    }
  }
  if (report.max_rel_error > tolerance) report.pass = false;
  return report;
}

/// Recursive evaluation of an arbitrary expression tree; used to check
/// inferred properties numerically.
inline DenseMatrix eval_expr(const ExprPtr& e,
                             const std::map<std::string, DenseMatrix>& values) {
  switch (e->kind()) {
  case Expr::Kind::Leaf: {
    auto it = values.find(e->operand().name);
    if (it == values.end())
      throw Error(ErrorKind::MissingEntry,
                  "no value for operand " + e->operand().name);
    return it->second;
  }
  case Expr::Kind::TempRef:
    return eval_expr(e->temporary()->defining, values);
  case Expr::Kind::Modified: {
    DenseMatrix inner = eval_expr(e->child(), values);
    if (has_transpose(e->mod())) inner = inner.transposed();
    if (has_inverse(e->mod()))
      inner = linalg::solve(inner, DenseMatrix::identity(inner.rows()));
    return inner;
  }
  case Expr::Kind::Product:
    return multiply(eval_expr(e->left(), values), eval_expr(e->right(), values));
  }
  throw Error(ErrorKind::ShapeMismatch, "unreachable expression kind");
}

} // namespace gmc
