#include <doctest.h>

#include <random>

#include "gmc/baselines.hpp"
#include "gmc/builtin_registries.hpp"
#include "support/generators.hpp"

using namespace gmc;

namespace {

Operand op(const char* name, Dim r, Dim c, PropertySet p = {}) {
  return Operand(name, Shape(r, c), p);
}

Chain plain_chain(const std::vector<Dim>& sizes) {
  std::vector<Factor> fs;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    fs.push_back({Operand("F" + std::to_string(i),
                          Shape(sizes[i], sizes[i + 1])),
                  UnaryMod::None});
  return make_chain("X", std::move(fs));
}

const std::vector<Dim> kFiveFactorSizes{130, 700, 383, 1340, 193, 900};

} // namespace

TEST_CASE("classic chain DP reproduces the known values") {
  ClassicMcResult r = classic_mc(kFiveFactorSizes);
  CHECK(r.cost == 315546400);
  CHECK(r.tree == left_deep_tree(5));

  ClassicMcResult small = classic_mc({10, 20, 30});
  CHECK(small.cost == 12000);
  CHECK(small.tree == ParenTree::node(ParenTree::leaf(0), ParenTree::leaf(1)));

  CHECK_THROWS_AS(classic_mc({10, 20}), Error);
}

TEST_CASE("a fixed parenthesization can be priced directly") {
  Chain chain = plain_chain(kFiveFactorSizes);
  // ((AB)(CD))E
  ParenTree forced = ParenTree::node(
      ParenTree::node(ParenTree::node(ParenTree::leaf(0), ParenTree::leaf(1)),
                      ParenTree::node(ParenTree::leaf(2), ParenTree::leaf(3))),
      ParenTree::leaf(4));
  auto plan = plan_for_tree(chain, forced, gemm_only_registry(), flop_metric());
  REQUIRE(plan.has_value());
  CHECK(plan->total_cost == CostValue::scalar(332189860));
  CHECK(plan->calls.size() == 4);
}

TEST_CASE("a right-nested tree yields the inner-to-outer call sequence") {
  // A (( B C ) D): T1 := B*C, T2 := T1*D, X := A*T2
  Chain chain = plain_chain({8, 6, 9, 4, 7});
  ParenTree tree = ParenTree::node(
      ParenTree::leaf(0),
      ParenTree::node(ParenTree::node(ParenTree::leaf(1), ParenTree::leaf(2)),
                      ParenTree::leaf(3)));
  auto plan = plan_for_tree(chain, tree, gemm_only_registry(), flop_metric());
  REQUIRE(plan.has_value());
  REQUIRE(plan->calls.size() == 3);
  CHECK(plan->calls[0].output == "T1");
  CHECK(plan->calls[0].left == "F1");
  CHECK(plan->calls[0].right == "F2");
  CHECK(plan->calls[1].output == "T2");
  CHECK(plan->calls[1].left == "T1");
  CHECK(plan->calls[1].right == "F3");
  CHECK(plan->calls[2].output == "X");
  CHECK(plan->calls[2].left == "F0");
  CHECK(plan->calls[2].right == "T2");
}

TEST_CASE("paren trees enforce contiguous in-order leaves") {
  CHECK_THROWS_AS(ParenTree::node(ParenTree::leaf(1), ParenTree::leaf(0)),
                  Error);
  CHECK_THROWS_AS(ParenTree::node(ParenTree::leaf(0), ParenTree::leaf(2)),
                  Error);
  ParenTree t = ParenTree::node(ParenTree::leaf(0),
                                ParenTree::node(ParenTree::leaf(1),
                                                ParenTree::leaf(2)));
  CHECK(t.str({"A", "B", "C"}) == "A*(B*C)");
  CHECK(t.leaf_count() == 3);
}

TEST_CASE("tree enumeration follows the Catalan numbers") {
  CHECK(enumerate_trees(0, 0).size() == 1);
  CHECK(enumerate_trees(0, 1).size() == 1);
  CHECK(enumerate_trees(0, 4).size() == 14);
  CHECK(enumerate_trees(0, 5).size() == 42);
}

TEST_CASE("left-to-right evaluation") {
  Chain chain = plain_chain(kFiveFactorSizes);
  Plan plan = left_to_right(chain, gemm_only_registry(), flop_metric());
  CHECK(plan.total_cost == CostValue::scalar(315546400)); // optimal here

  Operand a = op("A", 50, 50, {Property::FullRank});
  Operand b = op("B", 50, 50, {Property::FullRank});
  Chain solves = make_chain("X", {{a, UnaryMod::Inverse},
                                  {b, UnaryMod::Inverse},
                                  {op("C", 50, 20), UnaryMod::None}});
  try {
    left_to_right(solves, default_registry(), flop_metric());
    FAIL("expected Unsolvable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unsolvable);
  }
}

TEST_CASE("left-to-right pays for matrix-matrix products in vector chains") {
  // M1 M2 v: right-to-left is two matrix-vector products, left-to-right
  // starts with a full matrix-matrix product
  Chain chain = make_chain("X", {{op("M1", 60, 40), UnaryMod::None},
                                 {op("M2", 40, 50), UnaryMod::None},
                                 {op("v", 50, 1), UnaryMod::None}});
  DPTables t = solve(chain, default_registry(), flop_metric());
  Plan l2r = left_to_right(chain, default_registry(), flop_metric());
  CHECK(t.total_cost() == CostValue::scalar(2 * 40 * 50 + 2 * 60 * 40));
  CHECK(t.total_cost() < l2r.total_cost);
  CHECK(l2r.calls[0].kernel == "GEMM_NN");
}

TEST_CASE("left-to-right never beats the solver") {
  std::mt19937_64 eng(71);
  gmctest::ChainGenOptions opt = gmctest::large_scale_options();
  for (int trial = 0; trial < 50; ++trial) {
    gmctest::GeneratedProblem gp = gmctest::random_problem(eng, opt);
    DPTables t = solve(gp.chain, default_registry(), flop_metric());
    auto l2r = plan_for_tree(gp.chain, left_deep_tree(gp.chain.length()),
                             default_registry(), flop_metric());
    CostValue l2r_cost =
        l2r ? l2r->total_cost : CostValue::unreachable();
    CHECK(t.total_cost() <= l2r_cost);
  }
}

TEST_CASE("size heuristic: three and four factor rules") {
  SUBCASE("(AB)C when AB is the smaller intermediate") {
    // AB is 10x5 = 50 elements, BC is 20x30 = 600
    Chain c = plain_chain({10, 20, 5, 30});
    CHECK(armadillo_heuristic(c) ==
          ParenTree::node(ParenTree::node(ParenTree::leaf(0),
                                          ParenTree::leaf(1)),
                          ParenTree::leaf(2)));
  }
  SUBCASE("A(BC) when BC is smaller") {
    Chain c = plain_chain({30, 2, 40, 2});
    CHECK(armadillo_heuristic(c) ==
          ParenTree::node(ParenTree::leaf(0),
                          ParenTree::node(ParenTree::leaf(1),
                                          ParenTree::leaf(2))));
  }
  SUBCASE("(ABC)D when ABC is smaller than BCD") {
    // ABC: 5x8 = 40; BCD: 50x6 = 300
    Chain c = plain_chain({5, 50, 20, 8, 6});
    ParenTree t = armadillo_heuristic(c);
    REQUIRE(!t.is_leaf());
    CHECK(t.right().is_leaf());
    CHECK(t.right().leaf_index() == 3);
  }
  SUBCASE("A(BCD) otherwise") {
    Chain c = plain_chain({50, 5, 20, 8, 60});
    ParenTree t = armadillo_heuristic(c);
    REQUIRE(!t.is_leaf());
    CHECK(t.left().is_leaf());
    CHECK(t.left().leaf_index() == 0);
  }
}

TEST_CASE("size heuristic never splits a four-chain down the middle") {
  std::mt19937_64 eng(73);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Dim> sizes(5);
    for (Dim& s : sizes) s = static_cast<Dim>(1 + eng() % 100);
    ParenTree t = armadillo_heuristic(plain_chain(sizes));
    REQUIRE(!t.is_leaf());
    // the (AB)(CD) shape has two leaves on each side
    CHECK(!(t.left().leaf_count() == 2 && t.right().leaf_count() == 2));
  }
}

TEST_CASE("size heuristic folds longer chains into blocks of four") {
  Chain chain = plain_chain(kFiveFactorSizes);
  // ABC (130x193=25090 elements... recomputed: ABC is 130x1340) against
  // BCD (700x193): BCD is smaller -> A(BCD); then CD beats BC -> B(CD);
  // the folded block joins the trailing factor last.
  ParenTree expected = ParenTree::node(
      ParenTree::node(
          ParenTree::leaf(0),
          ParenTree::node(ParenTree::leaf(1),
                          ParenTree::node(ParenTree::leaf(2),
                                          ParenTree::leaf(3)))),
      ParenTree::leaf(4));
  CHECK(armadillo_heuristic(chain) == expected);
  // and the heuristic tree is strictly worse than the optimum on this chain
  auto plan = plan_for_tree(chain, armadillo_heuristic(chain),
                            gemm_only_registry(), flop_metric());
  REQUIRE(plan.has_value());
  CHECK(plan->total_cost == CostValue::scalar(381877520));
}

TEST_CASE("heuristic trees stay valid on modified chains") {
  std::mt19937_64 eng(79);
  gmctest::ChainGenOptions opt = gmctest::large_scale_options();
  opt.min_len = 2;
  opt.max_len = 10;
  for (int trial = 0; trial < 50; ++trial) {
    gmctest::GeneratedProblem gp = gmctest::random_problem(eng, opt);
    ParenTree t = armadillo_heuristic(gp.chain);
    CHECK(t.first_leaf() == 0);
    CHECK(t.last_leaf() + 1 == static_cast<int>(gp.chain.length()));
  }
}

TEST_CASE("brute force enumerates and matches the solver") {
  Chain chain = plain_chain({10, 20, 30});
  BruteForceResult r =
      brute_force_optimal(chain, gemm_only_registry(), flop_metric());
  CHECK(r.trees_enumerated == 1); // a two-factor chain has a single tree
  CHECK(r.cost == CostValue::scalar(solve(chain, gemm_only_registry(),
                                          flop_metric())
                                        .total_cost()
                                        .scalar_value()));

  BruteForceResult five = brute_force_optimal(plain_chain(kFiveFactorSizes),
                                              gemm_only_registry(),
                                              flop_metric());
  CHECK(five.trees_enumerated == 14);
  CHECK(five.cost == CostValue::scalar(315546400));

  std::vector<Dim> long_sizes(14, 4);
  CHECK_THROWS_AS(brute_force_optimal(plain_chain(long_sizes),
                                      gemm_only_registry(), flop_metric()),
                  Error);
}

TEST_CASE("classic DP equals brute force on plain chains") {
  std::mt19937_64 eng(83);
  std::vector<Dim> pool;
  for (Dim s = 10; s <= 300; s += 10) pool.push_back(s);
  for (int trial = 0; trial < 25; ++trial) {
    gmctest::GeneratedProblem gp =
        gmctest::random_plain_problem(eng, 2, 7, pool);
    ClassicMcResult classic = classic_mc(gp.chain.boundary_sizes());
    BruteForceResult brute = brute_force_optimal(gp.chain,
                                                 gemm_only_registry(),
                                                 flop_metric());
    CHECK(CostValue::scalar(static_cast<double>(classic.cost)) == brute.cost);
  }
}
