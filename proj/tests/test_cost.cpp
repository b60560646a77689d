#include <doctest.h>

#include <random>

#include "gmc/cost.hpp"

using namespace gmc;

namespace {

CostValue random_cost(std::mt19937_64& eng, bool vector_mode) {
  if (eng() % 8 == 0) return CostValue::unreachable();
  auto draw = [&] { return static_cast<double>(eng() % 1000); };
  if (vector_mode) return CostValue::vector({draw(), draw()});
  return CostValue::scalar(draw());
}

} // namespace

TEST_CASE("cost formulas evaluate the expected polynomials") {
  CHECK(CostFormula::parse("2*m*n*k").eval({20, 20, 20}) == 16000);
  CHECK(CostFormula::parse("m^2*n").eval({20, 15, 20}) == 6000);
  CHECK(CostFormula::parse("2*m*n*k").eval({130, 383, 700}) == 69706000);
  CHECK(CostFormula::parse("(1/3)*m^3+2*m^2*n").eval({3, 2, 3}) ==
        doctest::Approx(9 + 36));
  CHECK(CostFormula::parse("2*k").eval({1, 1, 7}) == 14);
  CHECK(CostFormula::parse("m^2").eval({9, 1, 9}) == 81);
  CHECK(CostFormula::parse(" 2 * m * n ").eval({3, 4, 1}) == 24);
}

TEST_CASE("cost formula error paths") {
  CHECK_THROWS_AS(CostFormula::parse(""), Error);
  CHECK_THROWS_AS(CostFormula::parse("m+"), Error);
  CHECK_THROWS_AS(CostFormula::parse("q*m"), Error);
  CHECK_THROWS_AS(CostFormula::parse("(1/3*m"), Error);
  CHECK_THROWS_AS(CostFormula::parse("2*m*n*k").eval({0, 1, 1}), Error);
  try {
    CostFormula::parse("2*m").eval({-3, 1, 1});
    FAIL("expected NonPositiveDimension");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveDimension);
  }
}

TEST_CASE("cost values form a total order with unreachable at the top") {
  std::mt19937_64 eng(5);
  for (bool vector_mode : {false, true}) {
    for (int t = 0; t < 300; ++t) {
      CostValue a = random_cost(eng, vector_mode);
      CostValue b = random_cost(eng, vector_mode);
      CostValue c = random_cost(eng, vector_mode);
      // totality and antisymmetry
      CHECK((a < b || b < a || a == b));
      if (a < b) CHECK(!(b < a));
      // transitivity
      if (a < b && b < c) CHECK(a < c);
      // unreachable maximal and absorbing
      CHECK(a <= CostValue::unreachable());
      CHECK((a + CostValue::unreachable()).is_unreachable());
      // addition commutes and associates
      if (!vector_mode || true) {
        CHECK((a + b) == (b + a));
        CHECK(((a + b) + c) == (a + (b + c)));
      }
    }
  }
}

TEST_CASE("vector costs compare lexicographically") {
  CostValue a = CostValue::vector({1, 5});
  CostValue b = CostValue::vector({2, 0});
  CHECK(a < b);
  CHECK(CostValue::vector({1, 0}) < a);
  CHECK_THROWS_AS((void)(a < CostValue::scalar(1)), Error);
  CHECK_THROWS_AS((void)(a + CostValue::vector({1, 2, 3})), Error);
}

TEST_CASE("cost rendering is stable and integer-friendly") {
  CHECK(CostValue::scalar(315546400).str() == "315546400");
  CHECK(CostValue::unreachable().str() == "inf");
  CHECK(CostValue::vector({2, 3}).str() == "(2,3)");
}

TEST_CASE("table metric looks up measured costs") {
  std::string doc = "fallback nearest\n"
                    "cost GEMM_NN m=100 n=100 k=100 value=1.9e-4\n"
                    "cost GEMM_NN m=1000 n=1000 k=1000 value=9.1e-2\n";
  CostMetric m = table_metric(doc);
  CostFormula dummy = CostFormula::parse("1");
  CHECK(m.eval("GEMM_NN", dummy, {100, 100, 100}) ==
        CostValue::scalar(1.9e-4));
  // nearest bucket
  CHECK(m.eval("GEMM_NN", dummy, {120, 100, 100}) ==
        CostValue::scalar(1.9e-4));
  CHECK(m.eval("GEMM_NN", dummy, {900, 950, 1000}) ==
        CostValue::scalar(9.1e-2));
  try {
    m.eval("TRMM_LLN", dummy, {100, 100, 100});
    FAIL("expected MissingEntry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingEntry);
  }

  CostMetric strict = table_metric("fallback error\n"
                                   "cost GEMM_NN m=8 n=8 k=8 value=1.0\n");
  CHECK(strict.eval("GEMM_NN", dummy, {8, 8, 8}) == CostValue::scalar(1.0));
  CHECK_THROWS_AS(strict.eval("GEMM_NN", dummy, {9, 8, 8}), Error);

  CHECK_THROWS_AS(table_metric("cost GEMM_NN m=1 n=1 k=1 value=1\n"), Error);
  CHECK_THROWS_AS(table_metric("fallback sometimes\n"), Error);
  CHECK_THROWS_AS(table_metric("fallback nearest\ncost K m=1 n=1 k=1\n"),
                  Error);
}
