#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "gmc/solver.hpp"

namespace gmc {

/// A parenthesization: a full binary tree over the chain's factor indices
/// with in-order leaves 0..n-1. Subtrees always cover contiguous ranges.
class ParenTree {
public:
  static ParenTree leaf(int index) {
    ParenTree t;
    t.leaf_ = index;
    return t;
  }

  static ParenTree node(ParenTree l, ParenTree r) {
    if (l.last_leaf() + 1 != r.first_leaf())
      throw Error(ErrorKind::IndexOutOfRange,
                  "parenthesization subtrees must cover adjacent ranges");
    ParenTree t;
    t.left_ = std::make_shared<ParenTree>(std::move(l));
    t.right_ = std::make_shared<ParenTree>(std::move(r));
    return t;
  }

  bool is_leaf() const { return !left_; }
  int leaf_index() const { return leaf_; }
  const ParenTree& left() const { return *left_; }
  const ParenTree& right() const { return *right_; }

  int first_leaf() const { return is_leaf() ? leaf_ : left_->first_leaf(); }
  int last_leaf() const { return is_leaf() ? leaf_ : right_->last_leaf(); }
  int leaf_count() const { return last_leaf() - first_leaf() + 1; }

  bool operator==(const ParenTree& o) const {
    if (is_leaf() != o.is_leaf()) return false;
    if (is_leaf()) return leaf_ == o.leaf_;
    return *left_ == *o.left_ && *right_ == *o.right_;
  }

  std::string str(const std::vector<std::string>& names) const {
    if (is_leaf()) return names.at(static_cast<std::size_t>(leaf_));
    std::string l = left_->str(names);
    std::string r = right_->str(names);
    auto wrap = [](const ParenTree& t, std::string s) {
      return t.is_leaf() ? s : "(" + s + ")";
    };
    return wrap(*left_, l) + "*" + wrap(*right_, r);
  }

private:
  int leaf_ = -1;
  std::shared_ptr<const ParenTree> left_, right_;
};

inline ParenTree left_deep_tree(std::size_t n) {
  ParenTree t = ParenTree::leaf(0);
  for (std::size_t i = 1; i < n; ++i)
    t = ParenTree::node(std::move(t), ParenTree::leaf(static_cast<int>(i)));
  return t;
}

/// All parenthesizations of leaves i..j, in deterministic order (outer loop
/// over the top split). Catalan growth; callers guard the length.
inline std::vector<ParenTree> enumerate_trees(int i, int j) {
  if (i == j) return {ParenTree::leaf(i)};
  std::vector<ParenTree> out;
  for (int k = i; k < j; ++k)
    for (const ParenTree& l : enumerate_trees(i, k))
      for (const ParenTree& r : enumerate_trees(k + 1, j))
        out.push_back(ParenTree::node(l, r));
  return out;
}

// ---------------------------------------------------------------------------
// Classic size-based chain DP
// ---------------------------------------------------------------------------

struct ClassicMcResult {
  long long cost = 0;
  ParenTree tree = ParenTree::leaf(0);
  std::vector<std::vector<long long>> costs; // minimal 2mnk totals per range
  std::vector<std::vector<int>> splits;
};

inline constexpr long long kClassicInfinity =
    std::numeric_limits<long long>::max();

namespace detail {

inline ParenTree classic_tree(const std::vector<std::vector<int>>& splits,
                              int i, int j) {
  if (i == j) return ParenTree::leaf(i);
  int k = splits[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return ParenTree::node(classic_tree(splits, i, k),
                         classic_tree(splits, k + 1, j));
}

} // namespace detail

/// The size-array chain algorithm: sizes has n+1 entries, factor i is
/// sizes[i] x sizes[i+1], and a product costs 2 * sizes[i] * sizes[k+1] *
/// sizes[j+1]. Returns the minimal total and the argmin tree.
inline ClassicMcResult classic_mc(const std::vector<Dim>& sizes) {
  if (sizes.size() < 3)
    throw Error(ErrorKind::ChainTooShort,
                "need at least two factors (three boundary sizes)");
  std::size_t n = sizes.size() - 1;
  ClassicMcResult r;
  r.costs.assign(n, std::vector<long long>(n, kClassicInfinity));
  r.splits.assign(n, std::vector<int>(n, -1));
  for (std::size_t i = 0; i < n; ++i) r.costs[i][i] = 0;
  for (std::size_t l = 1; l < n; ++l) {
    for (std::size_t i = 0; i + l < n; ++i) {
      std::size_t j = i + l;
      for (std::size_t k = i; k < j; ++k) {
        long long c = 2 * sizes[i] * sizes[k + 1] * sizes[j + 1];
        long long cost = r.costs[i][k] + r.costs[k + 1][j] + c;
        if (cost < r.costs[i][j]) {
          r.costs[i][j] = cost;
          r.splits[i][j] = static_cast<int>(k);
        }
      }
    }
  }
  r.cost = r.costs[0][n - 1];
  r.tree = detail::classic_tree(r.splits, 0, static_cast<int>(n) - 1);
  return r;
}

/// The parenthesization recorded in solved DP tables.
inline ParenTree solution_tree(const DPTables& t, std::size_t i,
                               std::size_t j) {
  if (i == j) return ParenTree::leaf(static_cast<int>(i));
  if (t.cost(i, j).is_unreachable())
    throw Error(ErrorKind::UnsolvableRange,
                "no solution recorded for factors " + std::to_string(i) +
                    ".." + std::to_string(j));
  std::size_t k = static_cast<std::size_t>(t.split(i, j));
  return ParenTree::node(solution_tree(t, i, k), solution_tree(t, k + 1, j));
}

inline ParenTree solution_tree(const DPTables& t) {
  return solution_tree(t, 0, t.length() - 1);
}

// ---------------------------------------------------------------------------
// Evaluating a fixed parenthesization against a registry
// ---------------------------------------------------------------------------

namespace detail {

struct TreeEval {
  ExprPtr view;
  std::string name;
};

inline std::optional<TreeEval> eval_tree_node(const ParenTree& t,
                                              const Chain& chain,
                                              const Registry& registry,
                                              const CostMetric& metric,
                                              PlanBuilder& b, bool is_root) {
  if (t.is_leaf()) {
    const Factor& f =
        chain.factors[static_cast<std::size_t>(t.leaf_index())];
    return TreeEval{factor_view(f), f.operand.name};
  }
  auto l = eval_tree_node(t.left(), chain, registry, metric, b, false);
  if (!l) return std::nullopt;
  auto r = eval_tree_node(t.right(), chain, registry, metric, b, false);
  if (!r) return std::nullopt;
  ExprPtr expr = Expr::product(l->view, r->view);
  std::optional<BestMatch> bm = best_match(expr, registry, metric);
  if (!bm) return std::nullopt;
  std::string out = is_root ? chain.target : b.fresh_name();
  b.add_call(*bm, l->name, r->name, out);
  Temporary tmp = create_tmp(expr, out);
  return TreeEval{Expr::temp_ref(std::make_shared<Temporary>(std::move(tmp))),
                  out};
}

} // namespace detail

/// Kernel-maps one fixed parenthesization bottom-up, with the same
/// temporary-expansion semantics as the solver. Returns nothing if some
/// exposed binary operation has no kernel.
inline std::optional<Plan> plan_for_tree(const Chain& chain,
                                         const ParenTree& tree,
                                         const Registry& registry,
                                         const CostMetric& metric) {
  if (tree.first_leaf() != 0 ||
      tree.last_leaf() + 1 != static_cast<int>(chain.length()))
    throw Error(ErrorKind::IndexOutOfRange,
                "parenthesization does not cover the chain");
  detail::PlanBuilder b(metric);
  auto res = detail::eval_tree_node(tree, chain, registry, metric, b, true);
  if (!res) return std::nullopt;
  b.plan.target = chain.target;
  b.plan.total_cost = b.total;
  b.plan.result_shape = b.plan.calls.back().out_shape;
  return b.plan;
}

/// Strict left-to-right evaluation (the default in Matlab-style systems).
inline Plan left_to_right(const Chain& chain, const Registry& registry,
                          const CostMetric& metric) {
  auto plan = plan_for_tree(chain, left_deep_tree(chain.length()), registry,
                            metric);
  if (!plan)
    throw Error(ErrorKind::Unsolvable,
                "left-to-right evaluation hits an uncomputable product");
  return *plan;
}

// ---------------------------------------------------------------------------
// Armadillo-style size heuristic
// ---------------------------------------------------------------------------

namespace detail {

struct HeuristicItem {
  ParenTree tree;
  Dim rows;
  Dim cols;
};

inline HeuristicItem combine(HeuristicItem a, HeuristicItem b) {
  return {ParenTree::node(std::move(a.tree), std::move(b.tree)), a.rows,
          b.cols};
}

inline HeuristicItem fold_block(std::vector<HeuristicItem> items) {
  switch (items.size()) {
  case 1: return std::move(items[0]);
  case 2: return combine(std::move(items[0]), std::move(items[1]));
  case 3: {
    // (AB)C iff AB is not larger (in elements) than BC.
    Dim ab = items[0].rows * items[1].cols;
    Dim bc = items[1].rows * items[2].cols;
    if (ab <= bc)
      return combine(combine(std::move(items[0]), std::move(items[1])),
                     std::move(items[2]));
    return combine(std::move(items[0]),
                   combine(std::move(items[1]), std::move(items[2])));
  }
  default: {
    // (ABC)D iff ABC is strictly smaller than BCD; the three-factor part
    // is then folded by the rule above. The top split is never (AB)(CD).
    Dim abc = items[0].rows * items[2].cols;
    Dim bcd = items[1].rows * items[3].cols;
    if (abc < bcd) {
      HeuristicItem head = fold_block(
          {std::move(items[0]), std::move(items[1]), std::move(items[2])});
      return combine(std::move(head), std::move(items[3]));
    }
    HeuristicItem tail = fold_block(
        {std::move(items[1]), std::move(items[2]), std::move(items[3])});
    return combine(std::move(items[0]), std::move(tail));
  }
  }
}

} // namespace detail

/// The simplified chain strategy used by expression-template libraries:
/// three- and four-factor groups are split by comparing element counts of
/// the candidate intermediates, and longer chains are folded left-to-right
/// in blocks of at most four (the leading block is grouped, treated as one
/// operand, and the fold repeats). The decision uses effective sizes only.
inline ParenTree armadillo_heuristic(const Chain& chain) {
  if (chain.length() < 2)
    throw Error(ErrorKind::ChainTooShort, "heuristic needs two factors");
  std::vector<detail::HeuristicItem> items;
  for (std::size_t i = 0; i < chain.length(); ++i) {
    Shape s = effective_shape(chain.factors[i]);
    items.push_back(
        {ParenTree::leaf(static_cast<int>(i)), s.rows, s.cols});
  }
  while (items.size() > 1) {
    std::size_t take = std::min<std::size_t>(4, items.size());
    std::vector<detail::HeuristicItem> block(
        std::make_move_iterator(items.begin()),
        std::make_move_iterator(items.begin() + static_cast<long>(take)));
    detail::HeuristicItem folded = detail::fold_block(std::move(block));
    items.erase(items.begin(), items.begin() + static_cast<long>(take));
    items.insert(items.begin(), std::move(folded));
  }
  return std::move(items[0].tree);
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

struct BruteForceResult {
  CostValue cost = CostValue::unreachable();
  std::optional<ParenTree> tree;
  std::size_t trees_enumerated = 0;
};

/// Exhaustive optimum over every parenthesization, evaluated with the same
/// registry, metric and temporary semantics as the solver. Guarded against
/// Catalan blow-up.
inline BruteForceResult brute_force_optimal(const Chain& chain,
                                            const Registry& registry,
                                            const CostMetric& metric,
                                            std::size_t max_length = 12) {
  if (chain.length() > max_length)
    throw Error(ErrorKind::ChainTooLong,
                "brute force capped at length " + std::to_string(max_length));
  BruteForceResult best;
  for (ParenTree& t :
       enumerate_trees(0, static_cast<int>(chain.length()) - 1)) {
    ++best.trees_enumerated;
    auto plan = plan_for_tree(chain, t, registry, metric);
    if (!plan) continue;
    if (!best.tree || plan->total_cost < best.cost) {
      best.cost = plan->total_cost;
      best.tree = std::move(t);
    }
  }
  return best;
}

} // namespace gmc
