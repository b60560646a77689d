#include <doctest.h>

#include <random>

#include "gmc/executor.hpp"
#include "gmc/inference.hpp"
#include "support/generators.hpp"

using namespace gmc;

namespace {

Operand op(const char* name, Dim r, Dim c, PropertySet p = {}) {
  return Operand(name, Shape(r, c), p);
}

ExprPtr times(ExprPtr a, ExprPtr b) { return Expr::product(std::move(a), std::move(b)); }
ExprPtr t(ExprPtr e) { return Expr::modified(UnaryMod::Transpose, std::move(e)); }
ExprPtr inv(ExprPtr e) { return Expr::modified(UnaryMod::Inverse, std::move(e)); }

} // namespace

TEST_CASE("closure of the implication lattice") {
  PropertySet d = closure({Property::Diagonal});
  CHECK(d.contains(Property::LowerTriangular));
  CHECK(d.contains(Property::UpperTriangular));
  CHECK(d.contains(Property::Symmetric));
  CHECK(!d.contains(Property::SPD));

  PropertySet s = closure({Property::SPD});
  CHECK(s.contains(Property::Symmetric));
  CHECK(s.contains(Property::FullRank));

  CHECK(closure({}) == PropertySet{});
}

TEST_CASE("closure is monotone and idempotent") {
  std::mt19937_64 eng(3);
  for (int trial = 0; trial < 100; ++trial) {
    PropertySet s;
    for (Property p : all_properties())
      if (eng() % 2) s.insert(p);
    PropertySet c = closure(s);
    CHECK(s.subset_of(c));
    CHECK(closure(c) == c);
  }
}

TEST_CASE("transpose map is an involution, inverse map the identity") {
  for (Property p : all_properties()) {
    CHECK(transpose_property(transpose_property(p)) == p);
    CHECK(inverse_property(p) == p);
  }
  CHECK(transpose_property(Property::LowerTriangular) ==
        Property::UpperTriangular);
}

TEST_CASE("triangularity propagates through products and transposes") {
  Operand a = op("A", 6, 6, {Property::LowerTriangular});
  Operand b = op("B", 6, 6, {Property::UpperTriangular});
  // A * B^T with A lower and B upper: B^T is lower, so the product is lower
  ExprPtr e = times(Expr::leaf(a), t(Expr::leaf(b)));
  CHECK(has_property(e, Property::LowerTriangular));
  CHECK(!has_property(e, Property::UpperTriangular));

  CHECK(has_property(t(Expr::leaf(a)), Property::UpperTriangular));

  Operand u = op("U", 6, 6);
  Operand v = op("V", 6, 6);
  CHECK(!has_property(times(Expr::leaf(u), Expr::leaf(v)),
                      Property::LowerTriangular));
}

TEST_CASE("gram products are symmetric, and SPD with a full-rank gate") {
  SUBCASE("A^T A with A full rank") {
    Operand a = op("A", 20, 20, {Property::FullRank});
    ExprPtr e = times(t(Expr::leaf(a)), Expr::leaf(a));
    PropertySet props = infer_properties(e);
    CHECK(props.contains(Property::Symmetric));
    CHECK(props.contains(Property::SPD));
    CHECK(props.contains(Property::FullRank));
  }
  SUBCASE("without the rank assumption only symmetry is claimed") {
    Operand a = op("A", 20, 20);
    ExprPtr e = times(t(Expr::leaf(a)), Expr::leaf(a));
    PropertySet props = infer_properties(e);
    CHECK(props.contains(Property::Symmetric));
    CHECK(!props.contains(Property::SPD));
  }
  SUBCASE("tall full-rank: X^T X is SPD, X X^T is only symmetric") {
    Operand x = op("Xop", 30, 10, {Property::FullRank});
    ExprPtr gram = times(t(Expr::leaf(x)), Expr::leaf(x));
    CHECK(infer_properties(gram).contains(Property::SPD));
    ExprPtr outer = times(Expr::leaf(x), t(Expr::leaf(x)));
    CHECK(infer_properties(outer).contains(Property::Symmetric));
    CHECK(!infer_properties(outer).contains(Property::SPD));
  }
}

TEST_CASE("inverses preserve structure") {
  Operand l = op("L", 8, 8, {Property::LowerTriangular, Property::FullRank});
  CHECK(infer_properties(inv(Expr::leaf(l))).contains(Property::LowerTriangular));
  Operand s = op("S", 8, 8, {Property::SPD});
  CHECK(infer_properties(inv(Expr::leaf(s))).contains(Property::SPD));
  // an inverted expression is nonsingular wherever it is defined
  CHECK(infer_properties(inv(Expr::leaf(op("G", 8, 8))))
            .contains(Property::FullRank));
}

TEST_CASE("diagonal times diagonal stays diagonal") {
  Operand d1 = op("D1", 7, 7, {Property::Diagonal});
  Operand d2 = op("D2", 7, 7, {Property::Diagonal});
  PropertySet props = infer_properties(times(Expr::leaf(d1), Expr::leaf(d2)));
  CHECK(props.contains(Property::Diagonal));
  CHECK(props.contains(Property::Symmetric)); // via closure
  CHECK(props.contains(Property::LowerTriangular));
}

TEST_CASE("inference is independent of the association of the product") {
  Operand a = op("A", 9, 9, {Property::FullRank});
  Operand b = op("B", 9, 9, {Property::FullRank});
  // same factor sequence A^T B B^T A under two different trees
  ExprPtr left_heavy = times(times(times(t(Expr::leaf(a)), Expr::leaf(b)),
                                   t(Expr::leaf(b))),
                             Expr::leaf(a));
  ExprPtr balanced = times(times(t(Expr::leaf(a)), Expr::leaf(b)),
                           times(t(Expr::leaf(b)), Expr::leaf(a)));
  CHECK(infer_properties(left_heavy) == infer_properties(balanced));
  CHECK(infer_properties(balanced).contains(Property::SPD));
}

TEST_CASE("transpose involution and the symmetry rule") {
  std::mt19937_64 eng(17);
  gmctest::ChainGenOptions opt = gmctest::numeric_scale_options();
  for (int trial = 0; trial < 100; ++trial) {
    gmctest::GeneratedProblem gp = gmctest::random_problem(eng, opt);
    ExprPtr e = gmctest::random_expr(eng, gp);
    CHECK(infer_properties(transpose_of(transpose_of(e))) ==
          infer_properties(e));
    PropertySet gram = infer_properties(times(transpose_of(e), e));
    CHECK(gram.contains(Property::Symmetric));
    PropertySet outer = infer_properties(times(e, transpose_of(e)));
    CHECK(outer.contains(Property::Symmetric));
  }
}

TEST_CASE("temporaries expose the properties of their defining expression") {
  Operand a = op("A", 12, 12, {Property::FullRank});
  ExprPtr gram = times(t(Expr::leaf(a)), Expr::leaf(a));
  Temporary tmp = create_tmp(gram, "T0_1");
  CHECK(tmp.properties.contains(Property::SPD));
  ExprPtr ref = Expr::temp_ref(std::make_shared<Temporary>(tmp));
  CHECK(has_property(ref, Property::Symmetric));
  // a product of the temporary with its own transpose is recognized through
  // the expansion
  Operand b = op("B", 12, 12);
  ExprPtr prod = times(ref, Expr::leaf(b));
  CHECK(!has_property(prod, Property::Symmetric));
}

TEST_CASE("claimed properties hold numerically") {
  std::mt19937_64 eng(29);
  gmctest::ChainGenOptions opt = gmctest::numeric_scale_options();
  int spd_claims = 0;
  for (int trial = 0; trial < 60; ++trial) {
    gmctest::GeneratedProblem gp = gmctest::random_problem(eng, opt);
    ExprPtr e = gmctest::random_expr(eng, gp);
    PropertySet claimed = infer_properties(e);
    auto values = random_instantiate(gp.operands, 1000 + trial);
    DenseMatrix m = eval_expr(e, values);

    if (claimed.contains(Property::LowerTriangular))
      for (Dim i = 0; i < m.rows(); ++i)
        for (Dim j = i + 1; j < m.cols(); ++j)
          CHECK(std::fabs(m.at(i, j)) <= 1e-10);
    if (claimed.contains(Property::UpperTriangular))
      for (Dim i = 0; i < m.rows(); ++i)
        for (Dim j = 0; j < std::min(i, m.cols()); ++j)
          CHECK(std::fabs(m.at(i, j)) <= 1e-10);
    if (claimed.contains(Property::Diagonal))
      for (Dim i = 0; i < m.rows(); ++i)
        for (Dim j = 0; j < m.cols(); ++j)
          if (i != j) CHECK(std::fabs(m.at(i, j)) <= 1e-10);
    if (claimed.contains(Property::Symmetric)) {
      double scale = std::max(1.0, m.max_abs());
      for (Dim i = 0; i < m.rows(); ++i)
        for (Dim j = 0; j < i; ++j)
          CHECK(std::fabs(m.at(i, j) - m.at(j, i)) <= 1e-10 * scale);
    }
    if (claimed.contains(Property::SPD)) {
      ++spd_claims;
      CHECK_NOTHROW(linalg::cholesky(m));
    }
  }
  CHECK(spd_claims > 0); // the generator must exercise the SPD rule
}
