#include <doctest.h>

#include <random>

#include "gmc/builtin_registries.hpp"
#include "gmc/executor.hpp"
#include "support/generators.hpp"

using namespace gmc;

namespace {

Operand op(const char* name, Dim r, Dim c, PropertySet p = {}) {
  return Operand(name, Shape(r, c), p);
}

/// Solve a two-factor chain and execute its single call, returning counters.
OpCounts run_single(const Operand& a, UnaryMod am, const Operand& b,
                    UnaryMod bm, const char* expect_kernel,
                    std::uint64_t seed = 11) {
  Chain chain = make_chain("X", {{a, am}, {b, bm}});
  Plan plan = solve_chain(chain, default_registry(), flop_metric());
  REQUIRE(plan.calls.size() == 1);
  CHECK(plan.calls[0].kernel == expect_kernel);
  auto values = random_instantiate({a, b}, seed);
  ExecReport report;
  DenseMatrix got = execute_plan(plan, values, &report);
  DenseMatrix want = evaluate_naive(chain, values);
  CHECK(rel_frobenius_error(got, want) < 1e-10);
  return report.per_call.at(0);
}

} // namespace

TEST_CASE("random instantiation honors the declared structure") {
  Operand d = op("D", 5, 5, {Property::Diagonal});
  Operand s = op("S", 5, 5, {Property::SPD});
  Operand l = op("L", 6, 4, {Property::LowerTriangular, Property::FullRank});
  Operand y = op("Y", 4, 4, {Property::Symmetric});
  auto values = random_instantiate({d, s, l, y}, 0);

  const DenseMatrix& dm = values.at("D");
  for (Dim i = 0; i < 5; ++i)
    for (Dim j = 0; j < 5; ++j)
      if (i != j) CHECK(dm.at(i, j) == 0.0);

  CHECK_NOTHROW(linalg::cholesky(values.at("S")));

  const DenseMatrix& lm = values.at("L");
  for (Dim i = 0; i < 6; ++i)
    for (Dim j = i + 1; j < 4; ++j) CHECK(lm.at(i, j) == 0.0);
  CHECK(lm.at(0, 0) >= 5.0); // the full-rank dominance boost

  const DenseMatrix& ym = values.at("Y");
  for (Dim i = 0; i < 4; ++i)
    for (Dim j = 0; j < 4; ++j) CHECK(ym.at(i, j) == ym.at(j, i));

  auto again = random_instantiate({d, s, l, y}, 0);
  CHECK(rel_frobenius_error(again.at("S"), values.at("S")) == 0.0);
  auto other = random_instantiate({d, s, l, y}, 1);
  CHECK(rel_frobenius_error(other.at("S"), values.at("S")) > 0.0);
}

TEST_CASE("executing a product of identities is exact") {
  Operand a = op("A", 3, 3);
  Operand b = op("B", 3, 3);
  Chain chain = make_chain("X", {{a, UnaryMod::None}, {b, UnaryMod::None}});
  Plan plan = solve_chain(chain, default_registry(), flop_metric());
  std::map<std::string, DenseMatrix> values;
  DenseMatrix two = DenseMatrix::identity(3);
  for (Dim i = 0; i < 3; ++i) two.at(i, i) = 2.0;
  values.emplace("A", two);
  values.emplace("B", DenseMatrix::identity(3));
  DenseMatrix out = execute_plan(plan, values);
  for (Dim i = 0; i < 3; ++i)
    for (Dim j = 0; j < 3; ++j)
      CHECK(out.at(i, j) == (i == j ? 2.0 : 0.0));
}

TEST_CASE("counters track the cost model per kernel family") {
  // documented relations between counted work and the cost polynomials:
  //   gemm family   counted == 2mnk - mn           (model 2mnk)
  //   trmm family   counted == m^2 n / m n^2       (exact)
  //   symm family   counted == 2mnk - mn           (model m^2 n: halved)
  //   syrk          counted == m(m+1)(2k-1)/2      (model m^2 k)
  //   trsm family   counted == m^2 n / m n^2       (exact, divides included)
  //   posv/sysv/gesv: leading term matches, slack below m^2 + 2mn + 3m
  Dim m = 20, n = 15, k = 20;

  SUBCASE("gemm") {
    OpCounts c = run_single(op("A", 20, 20), UnaryMod::None, op("B", 20, 20),
                            UnaryMod::None, "GEMM_NN");
    CHECK(c.flops() == 2 * m * k * k - m * k); // n == k == 20 here
    CHECK(std::llabs(c.flops() - 16000) <= m * k);
  }
  SUBCASE("trmm left") {
    Operand l = op("L", 20, 20, {Property::LowerTriangular});
    OpCounts c = run_single(l, UnaryMod::None, op("B", 20, 15), UnaryMod::None,
                            "TRMM_LLN");
    CHECK(c.flops() == m * m * n);
  }
  SUBCASE("trmm transposed-upper gives the same count") {
    Operand u = op("U", 20, 20, {Property::UpperTriangular});
    OpCounts c = run_single(u, UnaryMod::Transpose, op("B", 20, 15),
                            UnaryMod::None, "TRMM_LUT");
    CHECK(c.flops() == m * m * n);
  }
  SUBCASE("trmm right") {
    Operand l = op("L", 15, 15, {Property::LowerTriangular});
    OpCounts c = run_single(op("B", 20, 15), UnaryMod::None, l,
                            UnaryMod::Transpose, "TRMM_RLT");
    CHECK(c.flops() == 20 * 15 * 15);
  }
  SUBCASE("symm counts the full product") {
    Operand s = op("S", 20, 20, {Property::Symmetric});
    OpCounts c = run_single(s, UnaryMod::None, op("B", 20, 15), UnaryMod::None,
                            "SYMM_L");
    CHECK(c.flops() == 2 * m * n * k - m * n); // twice the m^2 n model
  }
  SUBCASE("syrk computes one triangle") {
    Operand a = op("A", 20, 20);
    Chain chain = make_chain("X", {{a, UnaryMod::Transpose}, {a, UnaryMod::None}});
    Plan plan = solve_chain(chain, default_registry(), flop_metric());
    CHECK(plan.calls[0].kernel == "SYRK");
    auto values = random_instantiate({a}, 3);
    ExecReport report;
    DenseMatrix got = execute_plan(plan, values, &report);
    DenseMatrix want = evaluate_naive(chain, values);
    CHECK(rel_frobenius_error(got, want) < 1e-12);
    CHECK(report.total.flops() == m * (m + 1) * (2 * k - 1) / 2);
    CHECK(std::llabs(report.total.flops() - m * m * k) <= m * k + m * m);
  }
  SUBCASE("trsm is quadratic per right-hand side") {
    Operand l = op("L", 20, 20, {Property::LowerTriangular, Property::FullRank});
    OpCounts c = run_single(l, UnaryMod::Inverse, op("B", 20, 15),
                            UnaryMod::None, "TRSM_LLN");
    CHECK(c.flops() == m * m * n);
  }
  SUBCASE("solve factorizations match their leading terms") {
    struct Case {
      PropertySet props;
      UnaryMod mod;
      const char* kernel;
      double model;
    };
    Dim mm = 24, nn = 10;
    double mmd = static_cast<double>(mm), nnd = static_cast<double>(nn);
    std::vector<Case> cases = {
        {{Property::SPD}, UnaryMod::Inverse, "POSV",
         mmd * mmd * mmd / 3 + 2 * mmd * mmd * nnd},
        {{Property::Symmetric, Property::FullRank}, UnaryMod::Inverse, "SYSV",
         mmd * mmd * mmd / 3 + 2 * mmd * mmd * nnd},
        {{Property::FullRank}, UnaryMod::Inverse, "GESV_N",
         2 * mmd * mmd * mmd / 3 + 2 * mmd * mmd * nnd},
    };
    for (const Case& cs : cases) {
      Operand a = Operand("A", Shape(mm, mm), cs.props);
      OpCounts c = run_single(a, cs.mod, op("B", 24, 10), UnaryMod::None,
                              cs.kernel);
      double slack = mmd * mmd + 2 * mmd * nnd + 3 * mmd;
      CHECK(std::fabs(static_cast<double>(c.flops()) - cs.model) <= slack);
    }
  }
  SUBCASE("diagonal kernels are linear in the output") {
    Operand d = op("D", 20, 20, {Property::Diagonal, Property::FullRank});
    OpCounts scale = run_single(d, UnaryMod::None, op("B", 20, 15),
                                UnaryMod::None, "DIAGMM_L");
    CHECK(scale.flops() == m * n);
    OpCounts solve_c = run_single(d, UnaryMod::Inverse, op("B", 20, 15),
                                  UnaryMod::None, "DIAGSV_L");
    CHECK(solve_c.flops() == m * n);
  }
  SUBCASE("vector kernels") {
    OpCounts mv = run_single(op("A", 20, 15), UnaryMod::None, op("v", 15, 1),
                             UnaryMod::None, "GEMV_N");
    CHECK(mv.flops() == 2 * 20 * 15 - 20);
    OpCounts outer = run_single(op("u", 20, 1), UnaryMod::None, op("w", 15, 1),
                                UnaryMod::Transpose, "GER");
    CHECK(outer.flops() == 20 * 15); // k = 1: one product per entry
    OpCounts dot = run_single(op("u", 20, 1), UnaryMod::Transpose,
                              op("w2", 20, 1), UnaryMod::None, "DOT");
    CHECK(dot.flops() == 2 * 20 - 1);
  }
}

TEST_CASE("right-side solves execute through the transposed system") {
  Operand y = op("Y", 7, 12);
  SUBCASE("general") {
    Operand a = op("A", 12, 12, {Property::FullRank});
    run_single(y, UnaryMod::None, a, UnaryMod::Inverse, "GESV_RN");
    run_single(y, UnaryMod::None, a, UnaryMod::InverseTranspose, "GESV_RT");
  }
  SUBCASE("triangular") {
    Operand l = op("L", 12, 12, {Property::LowerTriangular, Property::FullRank});
    OpCounts c = run_single(y, UnaryMod::None, l, UnaryMod::Inverse, "TRSM_RLN");
    CHECK(c.flops() == 7 * 12 * 12); // m n^2 exactly
    run_single(y, UnaryMod::None, l, UnaryMod::InverseTranspose, "TRSM_RLT");
    Operand u = op("U", 12, 12, {Property::UpperTriangular, Property::FullRank});
    run_single(y, UnaryMod::None, u, UnaryMod::Inverse, "TRSM_RUN");
  }
  SUBCASE("symmetric and SPD") {
    Operand s = op("S", 12, 12, {Property::SPD});
    run_single(y, UnaryMod::None, s, UnaryMod::Inverse, "POSV_R");
    run_single(y, UnaryMod::None, s, UnaryMod::InverseTranspose, "POSV_RT");
    Operand m = op("M", 12, 12, {Property::Symmetric, Property::FullRank});
    run_single(y, UnaryMod::None, m, UnaryMod::Inverse, "SYSV_R");
  }
  SUBCASE("diagonal") {
    Operand d = op("D", 12, 12, {Property::Diagonal, Property::FullRank});
    OpCounts c = run_single(y, UnaryMod::None, d, UnaryMod::Inverse, "DIAGSV_R");
    CHECK(c.flops() == 7 * 12);
  }
  SUBCASE("left transposed solves") {
    Operand a = op("A", 7, 7, {Property::FullRank});
    Operand b = op("B", 7, 4);
    run_single(a, UnaryMod::InverseTranspose, b, UnaryMod::None, "GESV_T");
    Operand l = op("L", 7, 7, {Property::LowerTriangular, Property::FullRank});
    run_single(l, UnaryMod::InverseTranspose, b, UnaryMod::None, "TRSM_LLT");
  }
}

TEST_CASE("plan execution agrees with naive evaluation on random chains") {
  std::mt19937_64 eng(89);
  gmctest::ChainGenOptions opt = gmctest::numeric_scale_options();
  int executed = 0;
  for (int trial = 0; trial < 40; ++trial) {
    gmctest::GeneratedProblem gp = gmctest::random_problem(eng, opt);
    DPTables t = solve(gp.chain, default_registry(), flop_metric());
    if (!t.solvable()) continue;
    Plan plan = construct_solution(t);
    auto values = random_instantiate(gp.operands, 5000 + trial);
    DenseMatrix got = execute_plan(plan, values);
    DenseMatrix want = evaluate_naive(gp.chain, values);
    CHECK(rel_frobenius_error(got, want) < 1e-8);
    ++executed;
  }
  CHECK(executed > 15);
}

TEST_CASE("verify_plan aggregates trials into a report") {
  Operand a = op("A", 10, 10, {Property::SPD});
  Operand b = op("B", 10, 6);
  Chain chain = make_chain("X", {{a, UnaryMod::Inverse}, {b, UnaryMod::None}});
  Plan plan = solve_chain(chain, default_registry(), flop_metric());
  std::vector<TrialFailure> failures;
  ExecReport report = verify_plan(plan, chain, {a, b}, 17, 4, 1e-8, &failures);
  CHECK(report.pass);
  CHECK(failures.empty());
  CHECK(report.max_rel_error < 1e-10);
  CHECK(report.per_kernel.count("POSV") == 1);
  CHECK(report.per_call.size() == 4); // one call per trial
  // an unattainable tolerance flips the verdict
  CHECK(!verify_plan(plan, chain, {a, b}, 17, 2, 0.0).pass);
}

TEST_CASE("naive evaluation applies inverses as solves") {
  Operand a = op("A", 6, 6, {Property::FullRank});
  Operand v = op("v", 6, 1);
  auto values = random_instantiate({a, v}, 7);
  // A^-1 * A * v == v
  Chain chain = make_chain("X", {{a, UnaryMod::Inverse},
                                 {a, UnaryMod::None},
                                 {v, UnaryMod::None}});
  DenseMatrix out = evaluate_naive(chain, values);
  CHECK(rel_frobenius_error(out, values.at("v")) < 1e-10);

  // leftmost inverse against a later transposed factor
  Chain chain2 = make_chain("Y", {{a, UnaryMod::InverseTranspose},
                                  {a, UnaryMod::Transpose},
                                  {v, UnaryMod::None}});
  CHECK(rel_frobenius_error(evaluate_naive(chain2, values), values.at("v")) <
        1e-10);
}

TEST_CASE("singular systems are reported, not silently computed") {
  Operand a = op("A", 4, 4, {Property::FullRank});
  Operand b = op("B", 4, 2);
  Chain chain = make_chain("X", {{a, UnaryMod::Inverse}, {b, UnaryMod::None}});
  Plan plan = solve_chain(chain, default_registry(), flop_metric());
  std::map<std::string, DenseMatrix> values;
  values.emplace("A", DenseMatrix(4, 4, 0.0)); // exactly singular
  values.emplace("B", DenseMatrix(4, 2, 1.0));
  try {
    execute_plan(plan, values);
    FAIL("expected SingularSystem");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularSystem);
  }
  CHECK_THROWS_AS(evaluate_naive(chain, values), Error);
}

TEST_CASE("execution validates input shapes and presence") {
  Operand a = op("A", 4, 4);
  Operand b = op("B", 4, 2);
  Chain chain = make_chain("X", {{a, UnaryMod::None}, {b, UnaryMod::None}});
  Plan plan = solve_chain(chain, default_registry(), flop_metric());
  std::map<std::string, DenseMatrix> missing;
  missing.emplace("A", DenseMatrix(4, 4));
  CHECK_THROWS_AS(execute_plan(plan, missing), Error);
  std::map<std::string, DenseMatrix> wrong;
  wrong.emplace("A", DenseMatrix(4, 4));
  wrong.emplace("B", DenseMatrix(2, 4));
  try {
    execute_plan(plan, wrong);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }
}

TEST_CASE("expression evaluation handles every node kind") {
  Operand a = op("A", 5, 5, {Property::FullRank});
  auto values = random_instantiate({a}, 13);
  ExprPtr leaf = Expr::leaf(a);
  ExprPtr expr = Expr::product(
      Expr::modified(UnaryMod::Inverse, leaf),
      Expr::modified(UnaryMod::None, Expr::leaf(a)));
  DenseMatrix out = eval_expr(expr, values);
  CHECK(rel_frobenius_error(out, DenseMatrix::identity(5)) < 1e-12);
  Temporary tmp = create_tmp(expr, "T");
  CHECK(rel_frobenius_error(
            eval_expr(Expr::temp_ref(std::make_shared<Temporary>(tmp)), values),
            DenseMatrix::identity(5)) < 1e-12);
}
