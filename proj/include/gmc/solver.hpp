#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmc/chain.hpp"
#include "gmc/registry.hpp"

namespace gmc {

/// One emitted kernel invocation. Inputs are operand names or names of
/// previously produced temporaries; `left`/`right` are the factors in the
/// order they appear in the computed product.
struct KernelCall {
  std::string kernel;
  std::string left;
  UnaryMod left_mod = UnaryMod::None;
  std::string right;
  UnaryMod right_mod = UnaryMod::None;
  std::string output;
  Shape out_shape{1, 1};
  Dims dims;
  CostValue cost = CostValue::scalar(0);
  std::vector<std::pair<std::string, std::string>> flags;
  KernelPtr kernel_def; // not serialized; used by executor/emitters

  std::string expr_str() const {
    return left + mod_suffix(left_mod) + " * " + right + mod_suffix(right_mod);
  }
};

struct Plan {
  std::string target;
  Shape result_shape{1, 1};
  std::vector<KernelCall> calls;
  CostValue total_cost = CostValue::scalar(0);
};

/// Symbolic temporary for a computed product: unique name, the shape of the
/// expression, the expanded defining expression over original operands, and
/// the properties inferred from it.
inline Temporary create_tmp(const ExprPtr& expr, std::string name) {
  Temporary t;
  t.name = std::move(name);
  t.shape = expr->shape();
  t.defining = expand(expr);
  t.properties = infer_properties(t.defining);
  return t;
}

struct SolveOptions {
  /// By default properties are inferred on every strict improvement inside
  /// the split loop; hoisting defers inference until a cell is final, doing
  /// O(n^2) inferences instead of O(n^3). Both yield identical tables.
  bool hoist_inference = false;
};

/// The dynamic-programming state over sub-chains [i,j]. Cell (i,i) holds the
/// modified input factor at cost zero; cell (i,j) holds the cheapest found
/// temporary, kernel and split. Unreachable cells keep an infinite cost.
class DPTables {
public:
  DPTables(const Chain& chain, const Registry& registry,
           const CostMetric& metric)
      : chain_(chain), registry_(registry), metric_(metric),
        n_(chain.length()), cells_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      Cell& c = cell(i, i);
      c.view = factor_view(chain.factors[i]);
      c.cost = metric.zero;
    }
  }

  std::size_t length() const { return n_; }
  const Chain& chain() const { return chain_; }
  const Registry& registry() const { return registry_; }
  const CostMetric& metric() const { return metric_; }

  const CostValue& cost(std::size_t i, std::size_t j) const {
    return cell(i, j).cost;
  }
  int split(std::size_t i, std::size_t j) const { return cell(i, j).split; }
  const ExprPtr& view(std::size_t i, std::size_t j) const {
    return cell(i, j).view;
  }
  const std::optional<BestMatch>& kernel_at(std::size_t i, std::size_t j) const {
    return cell(i, j).kernel;
  }

  bool solvable() const { return !cost(0, n_ - 1).is_unreachable(); }
  const CostValue& total_cost() const { return cost(0, n_ - 1); }

  /// Number of (i, k, j) split evaluations performed; n(n^2-1)/6 for a chain
  /// of length n.
  long long split_evaluations() const { return split_evaluations_; }

  friend DPTables solve(const Chain&, const Registry&, const CostMetric&,
                        const SolveOptions&);

private:
  struct Cell {
    ExprPtr view; // modified operand on the diagonal, TempRef above it
    CostValue cost = CostValue::unreachable();
    std::optional<BestMatch> kernel;
    int split = -1;
  };

  Cell& cell(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
  const Cell& cell(std::size_t i, std::size_t j) const {
    return cells_[i * n_ + j];
  }

  static std::string temp_name(std::size_t i, std::size_t j) {
    return "T" + std::to_string(i) + "_" + std::to_string(j);
  }

  Chain chain_;
  Registry registry_; // shared kernel definitions stay alive with the tables
  CostMetric metric_;
  std::size_t n_;
  std::vector<Cell> cells_;
  long long split_evaluations_ = 0;
};

/// The generalized chain solver: a bottom-up DP over sub-chain lengths that
/// forms the two-factor product of the best temporaries for each split, asks
/// the registry for the cheapest kernel, and keeps strict improvements.
/// Splits with no matching kernel contribute an infinite cost, so a chain is
/// solvable iff at least one parenthesization exposes only computable
/// binary operations.
inline DPTables solve(const Chain& chain, const Registry& registry,
                      const CostMetric& metric,
                      const SolveOptions& options = {}) {
  DPTables t(chain, registry, metric);
  std::size_t n = t.n_;
  for (std::size_t l = 1; l < n; ++l) {
    for (std::size_t i = 0; i + l < n; ++i) {
      std::size_t j = i + l;
      DPTables::Cell& target = t.cell(i, j);
      for (std::size_t k = i; k < j; ++k) {
        ++t.split_evaluations_;
        const DPTables::Cell& lc = t.cell(i, k);
        const DPTables::Cell& rc = t.cell(k + 1, j);
        if (lc.cost.is_unreachable() || rc.cost.is_unreachable()) continue;
        ExprPtr expr = Expr::product(lc.view, rc.view);
        std::optional<BestMatch> bm = best_match(expr, registry, metric);
        if (!bm) continue;
        CostValue cost = lc.cost + rc.cost + bm->cost;
        if (cost < target.cost) {
          Temporary tmp;
          tmp.name = DPTables::temp_name(i, j);
          tmp.shape = expr->shape();
          tmp.defining = expand(expr);
          if (!options.hoist_inference)
            tmp.properties = infer_properties(tmp.defining);
          target.view = Expr::temp_ref(std::make_shared<Temporary>(std::move(tmp)));
          target.kernel = std::move(bm);
          target.cost = std::move(cost);
          target.split = static_cast<int>(k);
        }
      }
      if (options.hoist_inference && target.split >= 0) {
        // O(n^2 p) variant: infer once per finalized cell instead of once
        // per improvement.
        auto tmp = std::make_shared<Temporary>(*target.view->temporary());
        tmp->properties = infer_properties(tmp->defining);
        target.view = Expr::temp_ref(std::move(tmp));
      }
    }
  }
  return t;
}

namespace detail {

struct PlanBuilder {
  Plan plan;
  int next_temp = 1;
  CostValue total;

  explicit PlanBuilder(const CostMetric& metric) : total(metric.zero) {}

  std::string fresh_name() { return "T" + std::to_string(next_temp++); }

  void add_call(const BestMatch& bm, const std::string& left_name,
                const std::string& right_name, std::string output) {
    KernelCall call;
    call.kernel = bm.kernel->name;
    call.left = left_name;
    call.left_mod = bm.binding.left_mod;
    call.right = right_name;
    call.right_mod = bm.binding.right_mod;
    call.output = std::move(output);
    call.out_shape = bm.binding.out_shape;
    call.dims = bm.binding.dims;
    call.cost = bm.cost;
    call.flags = bm.kernel->flags;
    call.kernel_def = bm.kernel;
    total = total + call.cost;
    plan.calls.push_back(std::move(call));
  }
};

inline std::string emit_range(const DPTables& t, std::size_t i, std::size_t j,
                              PlanBuilder& b, std::size_t root_i,
                              std::size_t root_j) {
  if (i == j) return t.chain().factors[i].operand.name;
  const std::optional<BestMatch>& bm = t.kernel_at(i, j);
  if (t.cost(i, j).is_unreachable() || !bm)
    throw Error(ErrorKind::UnsolvableRange,
                "no computable kernel sequence for factors " +
                    std::to_string(i) + ".." + std::to_string(j));
  std::size_t k = static_cast<std::size_t>(t.split(i, j));
  std::string left = emit_range(t, i, k, b, root_i, root_j);
  std::string right = emit_range(t, k + 1, j, b, root_i, root_j);
  bool is_root = i == root_i && j == root_j;
  std::string out = is_root && root_i == 0 && root_j + 1 == t.length()
                        ? t.chain().target
                        : b.fresh_name();
  b.add_call(*bm, left, right, out);
  return out;
}

} // namespace detail

/// Post-order extraction of the kernel sequence for factors i..j: left
/// sub-solution, right sub-solution, then the node's kernel call. Calls are
/// returned in dependency order; temporaries are named T1, T2, ... in
/// emission order and the final call of a full-chain plan writes the target.
inline Plan construct_solution(const DPTables& tables, std::size_t i,
                               std::size_t j) {
  if (i > j || j >= tables.length())
    throw Error(ErrorKind::IndexOutOfRange,
                "construct_solution(" + std::to_string(i) + ", " +
                    std::to_string(j) + ")");
  if (i == j)
    throw Error(ErrorKind::UnsolvableRange,
                "a single factor needs no kernel call");
  detail::PlanBuilder b(tables.metric());
  std::string result = detail::emit_range(tables, i, j, b, i, j);
  b.plan.target = result;
  b.plan.total_cost = b.total;
  b.plan.result_shape = b.plan.calls.back().out_shape;
  return b.plan;
}

inline Plan construct_solution(const DPTables& tables) {
  return construct_solution(tables, 0, tables.length() - 1);
}

/// Solve and extract the full plan, failing loudly on unsolvable chains.
inline Plan solve_chain(const Chain& chain, const Registry& registry,
                        const CostMetric& metric,
                        const SolveOptions& options = {}) {
  DPTables t = solve(chain, registry, metric, options);
  if (!t.solvable())
    throw Error(ErrorKind::Unsolvable,
                "no parenthesization of the chain is computable with the "
                "given registry");
  return construct_solution(t);
}

} // namespace gmc
