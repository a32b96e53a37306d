/*
   Copyright 2026 The ncert Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "doctest.h"
#include "ncert/evalnum.hpp"
#include "ncert/rexpr.hpp"
#include "test_support.hpp"

using namespace ncert;
using ncert::testing::random_point;
using ncert::testing::random_poly;
using ncert::testing::rel_diff;

namespace {

MatPoly P(const char* text) { return expand(parse(text)); }

LinearPencil interval_pencil() {
  // diag(1 + x, 1 - x)
  RealMatrix a0 = RealMatrix::Identity(2, 2);
  RealMatrix a1 = RealMatrix::Zero(2, 2);
  a1(0, 0) = 1;
  a1(1, 1) = -1;
  return LinearPencil(a0.cast<Complex>(), {a1.cast<Complex>()});
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("eval_expr examples") {
  Rng rng = derived_rng(1, 0);
  for (int t = 0; t < 10; ++t) {
    ExtendedPoint p(MatrixPoint{3, {random_hermitian(rng, 3)}});
    CHECK(rel_diff(eval_expr(parse("x1*x1^-1"), p), Matrix::Identity(3, 3)) < 1e-12);
  }
  ExtendedPoint zero(MatrixPoint{1, {Matrix::Zero(1, 1)}});
  CHECK(std::abs(eval_expr(parse("(2 - x1)^-1"), zero)(0, 0) - 0.5) < 1e-15);
  CHECK_THROWS_AS(eval_expr(parse("(x1 - x1)^-1"), zero), NotInDomain);
  ExtendedPoint one(MatrixPoint{1, {Matrix::Identity(1, 1)}});
  CHECK_THROWS_AS(eval_expr(parse("x1 + (1 - x1)^-1"), one), NotInDomain);
  CHECK(eval_expr(parse("[[1, x1], [x1, 1]]"), zero).rows() == 2);
}

TEST_CASE("eval_expr agrees with polynomial evaluation") {
  Rng rng = derived_rng(2, 0);
  const auto alphabet = make_alphabet(2, 1);
  for (int t = 0; t < 100; ++t) {
    MatPoly p = random_poly(rng, 1, 1, 4, alphabet, 6);
    RatExpr e = parse_expr(p.str());
    ExtendedPoint pt = random_point(rng, 3, 2, 1);
    REQUIRE(rel_diff(eval_expr(e, pt), eval_poly(p, pt)) < 1e-10);
  }
}

TEST_CASE("in_domain") {
  DomainSpec d = DomainSpec::poly_list({P("1 - x1^2")});
  DomainReport in = in_domain(d, MatrixPoint{1, {Matrix::Constant(1, 1, 0.5)}});
  CHECK(in.inside);
  CHECK(in.margin == doctest::Approx(0.75).epsilon(1e-14));
  DomainReport out = in_domain(d, MatrixPoint{1, {Matrix::Constant(1, 1, 2.0)}});
  CHECK_FALSE(out.inside);
  CHECK(out.margin == doctest::Approx(-3.0).epsilon(1e-14));

  DomainSpec pen = DomainSpec::pencil(interval_pencil());
  CHECK(in_domain(pen, MatrixPoint{2, {diag2(0.9, -0.9)}}).inside);
  CHECK(in_domain(pen, MatrixPoint{2, {diag2(0.9, -0.9)}}).margin == doctest::Approx(0.1));
  CHECK_FALSE(in_domain(pen, MatrixPoint{2, {diag2(1.2, 0.0)}}).inside);
  CHECK_THROWS_AS(in_domain(d, MatrixPoint{1, {Matrix::Zero(1, 1), Matrix::Zero(1, 1)}}), ShapeError);
}

TEST_CASE("sample_domain") {
  SUBCASE("scalar interval") {
    DomainSpec d = DomainSpec::poly_list({P("1 - x1^2")});
    for (const MatrixPoint& x : sample_domain(d, 1, 200, 5)) {
      REQUIRE(x.X[0](0, 0).real() >= -1.0 - 1e-12);
      REQUIRE(x.X[0](0, 0).real() <= 1.0 + 1e-12);
    }
  }
  SUBCASE("box") {
    DomainSpec d = DomainSpec::poly_list({P("1 - x1^2"), P("1 - x2^2")});
    auto xs = sample_domain(d, 3, 100, 6);
    REQUIRE(xs.size() == 100);
    for (const MatrixPoint& x : xs) {
      REQUIRE_NOTHROW(x.validate(1e-12));
      REQUIRE(in_domain(d, x).margin >= -1e-9);
    }
  }
  SUBCASE("pencil") {
    DomainSpec d = DomainSpec::pencil(interval_pencil());
    for (const MatrixPoint& x : sample_domain(d, 2, 100, 7)) REQUIRE(spectral_norm(x.X[0]) <= 1.0 + 1e-9);
  }
  SUBCASE("deterministic in the seed") {
    DomainSpec d = DomainSpec::poly_list({P("1 - x1^2")});
    auto a = sample_domain(d, 2, 5, 11);
    auto b = sample_domain(d, 2, 5, 11);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].X[0] == b[i].X[0]);
  }
  SUBCASE("empty domain exhausts") {
    DomainSpec d = DomainSpec::poly_list({P("1 - x1^2"), P("x1^2 - 4")});
    CHECK_THROWS_AS(sample_domain(d, 1, 1, 0), SamplingExhausted);
  }
}

TEST_CASE("domain monotonicity under small perturbations") {
  DomainSpec d = DomainSpec::poly_list({P("1 - x1^2"), P("1 - x2^2")});
  Rng rng = derived_rng(9, 0);
  int checked = 0;
  for (const MatrixPoint& x : sample_domain(d, 3, 300, 12)) {
    const double m = in_domain(d, x).margin;
    if (m <= 1e-6) continue;
    // 1 - x^2 has coefficient mass 2; ||X||<=1 so a shift of norm e moves x^2 by at most 2e + e^2
    const double eps = 0.45 * m / 2.0;
    MatrixPoint y = x;
    for (auto& xi : y.X) {
      Matrix h = random_hermitian(rng, 3);
      xi += eps * h / spectral_norm(h);
    }
    REQUIRE(in_domain(d, y).inside);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("pencil midpoint closure") {
  DomainSpec d = DomainSpec::pencil(interval_pencil());
  auto xs = sample_domain(d, 3, 200, 13);
  for (int k = 0; k < 100; ++k) {
    MatrixPoint mid{3, {(xs[2 * k].X[0] + xs[2 * k + 1].X[0]) / 2.0}};
    REQUIRE(in_domain(d, mid).inside);
  }
}

TEST_CASE("test_equivalence") {
  const std::vector<int> sizes{1, 2, 3, 4};
  auto v1 = test_equivalence(parse("x1*x1^-1"), parse("1"), sizes, 40, 1e-8, 0);
  CHECK_FALSE(v1.distinguished);
  CHECK(v1.evaluated > 0);

  auto v2 = test_equivalence(parse("x1*x2"), parse("x2*x1"), {2}, 20, 1e-8, 0);
  CHECK(v2.distinguished);
  REQUIRE(v2.witness.has_value());
  CHECK(v2.witness->n() == 2);
  CHECK(v2.witness_deviation > 1e-8);

  auto v3 = test_equivalence(parse("(1 + x1)^-1*x1"), parse("x1*(1 + x1)^-1"), sizes, 40, 1e-8, 0);
  CHECK_FALSE(v3.distinguished);

  CHECK_THROWS_AS(test_equivalence(parse("(x1 - x1)^-1"), parse("1"), sizes, 5, 1e-8, 0), NoCommonPoints);
}

TEST_CASE("sample_Zr") {
  const RatExpr g = parse_expr("3 - x1");
  const std::vector<RatExpr> g_lifted{g};
  Relation rel{1, MatPoly::identity(1), P("(3 - x1)*u1 - 1")};
  const std::vector<Relation> rels{rel};

  SUBCASE("inverse-type samples") {
    auto zs = sample_Zr(rels, interval_pencil(), g_lifted, 3, 50, 0);
    REQUIRE(zs.size() == 50);
    const RatExpr r = parse_expr("(3 - x1)^-1");
    for (const ZSample& z : zs) {
      CHECK(z.inverse_type);
      const Matrix m = eval_poly(rel.m, z.point);
      REQUIRE((m * z.v).norm() <= 1e-10 * z.v.norm());
      const Complex lifted = z.v.dot(eval_poly(P("u1"), z.point) * z.v);
      const Complex direct = z.v.dot(eval_expr(r, ExtendedPoint(z.point.base)) * z.v);
      REQUIRE(std::abs(lifted - direct) < 1e-8);
    }
  }
  SUBCASE("kernel samples") {
    auto zs = sample_Zr(rels, interval_pencil(), g_lifted, 3, 20, 1, ZFamily::Kernel);
    REQUIRE(zs.size() == 20);
    for (const ZSample& z : zs) {
      CHECK_FALSE(z.inverse_type);
      REQUIRE(relation_defect(rels, z.point, z.v) <= 1e-9);
      // U is not the inverse, yet (3 - X) U v = v
      CHECK(rel_diff(z.point.U[0], eval_expr(parse("(3 - x1)^-1"), ExtendedPoint(z.point.base))) > 1e-6);
    }
  }
}
