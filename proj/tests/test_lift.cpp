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
#include "ncert/lift.hpp"
#include "test_support.hpp"

using namespace ncert;
using ncert::testing::rel_diff;

namespace {

MatPoly P(const char* text) { return expand(parse(text)); }

bool contains(const std::vector<RatExpr>& v, const RatExpr& e) { return std::find(v.begin(), v.end(), e) != v.end(); }

const DomainSpec& interval() {
  static const DomainSpec d = DomainSpec::poly_list({P("1 - x1^2")});
  return d;
}

}  // namespace

TEST_CASE("archimedean_check") {
  auto a = archimedean_check({P("1 - x1^2")}, 1);
  CHECK(a.pass);
  REQUIRE(a.constants.size() == 1);
  CHECK(*a.constants[0] == doctest::Approx(1.0));

  CHECK_FALSE(archimedean_check({P("1 - x1^2")}, 2).pass);
  CHECK_FALSE(archimedean_check({P("1 - x1^2"), P("x1*x2")}).pass);
  auto b = archimedean_check({P("3 - x1^2"), P("2 - x2^2"), P("x1*x2 + x2*x1")});
  CHECK(b.pass);
  CHECK(*b.constants[1] == doctest::Approx(2.0));
}

TEST_CASE("build_hat") {
  SUBCASE("single inverse") {
    LiftResult l = build_hat(parse("(2 - x1)^-1"));
    CHECK(l.hat_q == P("u1"));
    REQUIRE(l.g_list.size() == 1);
    CHECK(l.g_list[0] == parse_expr("2 - x1"));
  }
  SUBCASE("nested, innermost first") {
    LiftResult l = build_hat(parse("(1 + (2 - x1)^-1)^-1"));
    CHECK(l.hat_q == P("u2"));
    REQUIRE(l.u_arity == 2);
    CHECK(l.g_list[0] == parse_expr("2 - x1"));
    CHECK(l.g_list[1] == parse_expr("1 + u1"));
  }
  SUBCASE("sandwich") {
    LiftResult l = build_hat(parse("x1*(2 - x1)^-1*x1"));
    CHECK(l.hat_q == P("x1*u1*x1"));
    CHECK(l.hat_q_sa == P("0.5*x1*u1*x1 + 0.5*x1*u1**x1"));
  }
  SUBCASE("no inverses") {
    LiftResult l = build_hat(parse("1 - x1^2"));
    CHECK(l.u_arity == 0);
    CHECK(l.hat_q == P("1 - x1^2"));
  }
  SUBCASE("back substitution recovers q") {
    MatRatExpr q = parse("x1*(1 + (2 - x1)^-1)^-1 + 3");
    LiftResult l = build_hat(q);
    CHECK(substitute(l.hat_expr, l.back_substitution()) == q);
  }
}

TEST_CASE("lift soundness at inverse-type points") {
  for (const char* text : {"(2 - x1)^-1", "x1*(2 - x1)^-1*x1", "(1 + (2 - x1)^-1)^-1"}) {
    MatRatExpr q = parse(text);
    LiftResult l = build_hat(q);
    for (int n = 1; n <= 3; ++n) {
      for (const MatrixPoint& x : sample_domain(interval(), n, 50, 100 + n)) {
        ExtendedPoint p = inverse_type_point(x, l.g_list);
        const Matrix want = eval_expr(q, ExtendedPoint(x));
        REQUIRE(rel_diff(eval_poly(l.hat_q, p), want) < 1e-10);
        REQUIRE(rel_diff(eval_poly(l.hat_q_sa, p), want) < 1e-10);
      }
    }
  }
}

TEST_CASE("estimate_D") {
  const std::vector<int> sizes{1, 2, 3};
  DEstimate a = estimate_D({parse_expr("2 - x1")}, 1, interval(), sizes, 100, 0);
  CHECK(a.sup == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.D == doctest::Approx(4.0).epsilon(1e-12));
  DEstimate b = estimate_D({parse_expr("3 - x1")}, 1, interval(), sizes, 100, 0);
  CHECK(b.D == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(estimate_D({parse_expr("x1")}, 1, interval(), sizes, 100, 0), NotInDomain);
  // second inverse evaluated through the first: (1 + (2-X)^-1)^-1 has norm <= 1
  DEstimate c = estimate_D({parse_expr("2 - x1"), parse_expr("1 + u1")}, 2, interval(), sizes, 100, 0);
  CHECK(c.sup == doctest::Approx(0.5625).epsilon(1e-12));
}

TEST_CASE("build_O") {
  const std::vector<MatPoly> Pset{P("1 - x1^2")};
  LiftResult l = build_hat(parse("(2 - x1)^-1"));
  AugmentedSet o = build_O(Pset, l, {4.0});
  REQUIRE(o.O.size() == 6);
  for (const OElement& e : o.O) CHECK(e.poly.is_self_adjoint());
  CHECK(o.O[5].tag == OTag::NormCap);
  CHECK(o.O[5].poly == P("4 - u1**u1"));
  CHECK(o.O[2].poly == -o.O[1].poly);
  CHECK(o.O[4].poly == -o.O[3].poly);
  CHECK(o.O[1].label() == "RelationLeft(1,+)");
  CHECK(o.O[2].label() == "RelationLeft(1,-)");
  CHECK(archimedean_check({o.O[0].poly}, 1).pass);
  CHECK(ball_constant(o.O[5].poly, Letter::u(1)).value() == doctest::Approx(4.0));

  for (int n = 1; n <= 3; ++n) {
    for (const MatrixPoint& x : sample_domain(interval(), n, 50, 7 + n)) {
      ExtendedPoint p = inverse_type_point(x, l.g_list);
      for (const OElement& e : o.O) {
        const Matrix v = eval_poly(e.poly, p);
        if (e.tag == OTag::RelationLeft || e.tag == OTag::RelationRight) REQUIRE(v.norm() <= 1e-10);
        if (e.tag == OTag::NormCap) REQUIRE(min_eigenvalue(v) >= 3.0 - 1e-10);
      }
    }
  }
}

TEST_CASE("closure_Cr and build_Mr") {
  SUBCASE("x^-1") {
    ClosureSet c = closure_Cr(parse("x1^-1"));
    CHECK(contains(c.Cr, parse_expr("x1^-1")));
    CHECK(contains(c.Cr, parse_expr("x1*x1^-1")));
    CHECK(contains(c.Cr, parse_expr("1")));
    auto m = build_Mr(c);
    REQUIRE(m.size() == 1);
    CHECK(m[0].m == P("x1*u1 - 1"));
    CHECK(m[0].b == P("1"));
  }
  SUBCASE("polynomial") {
    ClosureSet c = closure_Cr(parse("1 - x1*x2 + x2^3"));
    CHECK(build_Mr(c).empty());
    CHECK(contains(c.Cr, parse_expr("x2")));
  }
  SUBCASE("(3-x)^-1") {
    auto m = build_Mr(closure_Cr(parse("(3 - x1)^-1")));
    REQUIRE(m.size() == 1);
    CHECK(m[0].m == P("(3 - x1)*u1 - 1"));
  }
  SUBCASE("nontrivial b") {
    auto m = build_Mr(closure_Cr(parse("(3 - x1)^-1*x1")));
    bool found = false;
    for (const Relation& rel : m) found = found || (rel.m == P("(3 - x1)*u1*x1 - x1") && rel.b == P("x1"));
    CHECK(found);
  }
  SUBCASE("fixpoint") {
    for (const char* text : {"x1^-1", "(3 - x1)^-1", "x1*(1 + (2 - x1)^-1)^-1*x2 + x2^-1", "[[x1^-1, 1], [1, (1 + x1)^-1]]"}) {
      ClosureSet c = closure_Cr(parse(text));
      for (const RatExpr& e : closure_rules(c.Cr)) REQUIRE(contains(c.Cr, e));
    }
  }
  SUBCASE("overflow") { CHECK_THROWS_AS(closure_Cr(parse("x1*x2*x3*(1 + x1*x2)^-1"), 3), ClosureOverflow); }
  SUBCASE("relations vanish at inverse-type points") {
    MatRatExpr r = parse("x1*(1 + (3 - x1)^-1)^-1*x1 + (3 - x1)^-1");
    ClosureSet c = closure_Cr(r);
    auto rels = build_Mr(c);
    CHECK(rels.size() >= 2);
    for (const MatrixPoint& x : sample_domain(interval(), 3, 40, 5)) {
      ExtendedPoint p = inverse_type_point(x, c.g_list);
      for (const Relation& rel : rels) REQUIRE(eval_poly(rel.m, p).norm() <= 1e-10);
      for (std::size_t i = 0; i < c.Cr.size(); ++i)
        REQUIRE(rel_diff(eval_expr(c.Ctilde[i], p), eval_expr(c.Cr[i], ExtendedPoint(x))) < 1e-10);
    }
  }
}
