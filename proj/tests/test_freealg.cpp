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

#include <algorithm>

#include "doctest.h"
#include "ncert/evalnum.hpp"
#include "ncert/freealg.hpp"
#include "ncert/rexpr.hpp"
#include "test_support.hpp"

using namespace ncert;
using ncert::testing::random_point;
using ncert::testing::random_poly;
using ncert::testing::rel_diff;

namespace {
const Letter x1 = Letter::x(1);
const Letter x2 = Letter::x(2);
const Letter u1 = Letter::u(1);

MatPoly P(const char* text) { return expand(parse(text)); }
}  // namespace

TEST_CASE("letter order and adjoint") {
  CHECK(x1 < x2);
  CHECK(x2 < Letter::u(1));
  CHECK(Letter::u(1) < Letter::ustar(1));
  CHECK(Letter::ustar(1) < Letter::u(2));
  CHECK(x1.adjoint() == x1);
  CHECK(u1.adjoint() == Letter::ustar(1));
  CHECK(Letter::ustar(1).adjoint() == u1);
}

TEST_CASE("graded lexicographic word enumeration") {
  auto ws = words_up_to(make_alphabet(2, 0), 2);
  REQUIRE(ws.size() == 7);
  CHECK(ws[0].empty());
  CHECK(ws[1] == Word{x1});
  CHECK(ws[2] == Word{x2});
  CHECK(ws[3] == (Word{x1, x1}));
  CHECK(ws[6] == (Word{x2, x2}));
  CHECK(std::is_sorted(ws.begin(), ws.end()));
  CHECK(words_up_to(make_alphabet(1, 1), 3).size() == 40);
}

TEST_CASE("word adjoint is anti-multiplicative, exhaustively up to length 4") {
  const auto ws = words_up_to({x1, x2, u1}, 4);
  for (const Word& v : ws)
    for (const Word& w : ws) REQUIRE((v * w).adjoint() == w.adjoint() * v.adjoint());
  for (const Word& w : ws) REQUIRE(w.adjoint().adjoint() == w);
}

TEST_CASE("poly_add") {
  SUBCASE("additive inverse") {
    MatPoly p = NCPoly::letter(x1);
    CHECK(poly_add(p, -p).is_zero());
  }
  SUBCASE("distinct words stay distinct") {
    MatPoly p = poly_add(NCPoly::monomial(Word{x1, x2}), NCPoly::monomial(Word{x2, x1}));
    CHECK(p.terms().size() == 2);
  }
  SUBCASE("shape mismatch") { CHECK_THROWS_AS(poly_add(MatPoly(1, 1), MatPoly(2, 2)), ShapeError); }
}

TEST_CASE("poly_mul") {
  MatPoly p = poly_mul(NCPoly::letter(x1), NCPoly::letter(x2));
  REQUIRE(p.terms().size() == 1);
  CHECK(p.coeff(Word{x1, x2})(0, 0) == Complex(1.0));
  CHECK(poly_mul(P("1 + x1"), P("1 - x1")) == P("1 - x1^2"));
  CHECK_THROWS_AS(poly_mul(MatPoly(2, 3), MatPoly(2, 3)), ShapeError);
}

TEST_CASE("poly_adjoint reproduces the worked matrix example") {
  MatPoly p = P("[[7*i, 1000*x1*x2*x1 - x2^2], [x1^2 + x1*x2, 0]]");
  MatPoly expected = P("[[-7*i, x1^2 + x2*x1], [1000*x1*x2*x1 - x2^2, 0]]");
  CHECK(poly_adjoint(p) == expected);
  CHECK(poly_adjoint(P("u1*x1")) == P("x1*u1*"));
}

TEST_CASE("randomized algebra laws and evaluation homomorphism") {
  Rng rng = derived_rng(11, 0);
  const auto alphabet = make_alphabet(2, 1);
  for (int trial = 0; trial < 200; ++trial) {
    MatPoly p = random_poly(rng, 2, 2, 3, alphabet);
    MatPoly q = random_poly(rng, 2, 2, 3, alphabet);
    MatPoly r = random_poly(rng, 2, 1, 2, alphabet);
    REQUIRE(poly_adjoint(poly_adjoint(p)) == p);
    REQUIRE(poly_adjoint(p * q).distance(poly_adjoint(q) * poly_adjoint(p)) == 0.0);
    REQUIRE((p * (q * r)).distance((p * q) * r) < 1e-12);
    REQUIRE((p * (q + q)).distance(p * q + p * q) < 1e-12);
    ExtendedPoint pt = random_point(rng, 3, 2, 1);
    REQUIRE(rel_diff(eval_poly(p + q, pt), eval_poly(p, pt) + eval_poly(q, pt)) < 1e-10);
    REQUIRE(rel_diff(eval_poly(p * q, pt), eval_poly(p, pt) * eval_poly(q, pt)) < 1e-10);
    REQUIRE(rel_diff(eval_poly(poly_adjoint(p), pt), eval_poly(p, pt).adjoint()) < 1e-10);
    const MatPoly pq = p * q;
    for (const auto& [w, c] : pq.terms()) REQUIRE(c.norm() >= 1e-300);
  }
}

TEST_CASE("canonical text parses back to the same polynomial") {
  Rng rng = derived_rng(12, 0);
  const auto alphabet = make_alphabet(2, 1);
  for (int trial = 0; trial < 100; ++trial) {
    MatPoly p = random_poly(rng, 1 + trial % 2, 1 + trial % 3, 3, alphabet);
    REQUIRE(expand(parse(p.str())) == p);
  }
  CHECK(P("2 - x1^2").str() == "2 - x1^2");
  CHECK(P("x1*u1*").str() == "x1*u1*");
}

TEST_CASE("pencil_eval") {
  auto pencil = LinearPencil::monic({Matrix(Eigen::Vector2cd(1.0, -1.0).asDiagonal())});
  CHECK(pencil.is_monic());
  SUBCASE("identity at zero") {
    for (int n = 1; n <= 3; ++n) {
      MatrixPoint zero{n, {Matrix::Zero(n, n)}};
      CHECK((pencil_eval(pencil, zero) - Matrix::Identity(2 * n, 2 * n)).norm() == 0.0);
    }
  }
  SUBCASE("diagonal point") {
    MatrixPoint x{2, {Matrix(Eigen::Vector2cd(1.0, -1.0).asDiagonal())}};
    Matrix l = pencil_eval(pencil, x);
    Eigen::VectorXd diag = l.diagonal().real();
    std::sort(diag.data(), diag.data() + diag.size());
    CHECK(diag(0) == 0.0);
    CHECK(diag(1) == 0.0);
    CHECK(diag(2) == 2.0);
    CHECK(diag(3) == 2.0);
    CHECK((l - Matrix(l.diagonal().asDiagonal())).norm() == 0.0);
  }
  SUBCASE("Hermitian on random points") {
    Rng rng = derived_rng(5, 0);
    for (int t = 0; t < 20; ++t) {
      MatrixPoint x{3, {random_hermitian(rng, 3)}};
      CHECK(hermitian_defect(pencil_eval(pencil, x)) <= 1e-12);
    }
  }
  SUBCASE("arity mismatch") {
    MatrixPoint x{1, {Matrix::Zero(1, 1), Matrix::Zero(1, 1)}};
    CHECK_THROWS_AS(pencil_eval(pencil, x), ShapeError);
  }
  SUBCASE("non-Hermitian coefficients rejected") {
    Matrix a(2, 2);
    a << 0, 1, 0, 0;
    CHECK_THROWS_AS(LinearPencil::monic({a}), PreconditionError);
  }
  CHECK_FALSE(LinearPencil(2.0 * Matrix::Identity(2, 2), {Matrix::Identity(2, 2)}).is_monic());
}

TEST_CASE("ball constants") {
  CHECK(ball_constant(P("1 - x1^2"), x1).value() == 1.0);
  CHECK(ball_constant(P("4 - u1**u1"), u1).value() == 4.0);
  CHECK_FALSE(ball_constant(P("1 - x1^2"), x2).has_value());
  CHECK_FALSE(ball_constant(P("1 + x1^2"), x1).has_value());
  CHECK_FALSE(ball_constant(P("1 - x1*x2"), x1).has_value());
}
