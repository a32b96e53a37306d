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


#ifndef NCERT_LIFT_HPP
#define NCERT_LIFT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncert/evalnum.hpp"
#include "ncert/freealg.hpp"
#include "ncert/rexpr.hpp"

namespace ncert {

struct ArchimedeanVerdict {
  bool pass = false;
  /// constants[i-1] is C_i when some generator equals C_i - x_i^2.
  std::vector<std::optional<double>> constants;
  std::vector<std::string> problems;
};

/// `arity` = number of x letters that must be capped (0: infer from P).
ArchimedeanVerdict archimedean_check(const std::vector<MatPoly>& P, int arity = 0);

struct LiftResult {
  /// q with every inverse g_j^-1 replaced by u_j.
  MatRatExpr hat_expr{RatExpr()};
  MatPoly hat_q;
  /// (hat_q + hat_q^*) / 2; agrees with hat_q at inverse-type points when q is self-adjoint.
  MatPoly hat_q_sa;
  /// Inverse arguments, innermost first, with earlier inverses already lifted.
  std::vector<RatExpr> g_list;
  /// Same arguments as written in q.
  std::vector<RatExpr> g_original;
  int u_arity = 0;

  /// u_j -> g_j^-1 in terms of x only.
  Bindings back_substitution() const;
};

LiftResult build_hat(const MatRatExpr& q);

struct DEstimate {
  double D = 0.0;
  /// max ||g_j(X)^-1||^2 over the samples and where it was attained.
  double sup = 0.0;
  MatrixPoint argmax;
};

/// D_j = safety * max ||g_j^-1||^2 over domain samples at each size.
/// Earlier u letters in g_j are evaluated at g_1^-1 .. g_{j-1}^-1.
/// Throws NotInDomain when g_j is singular at a sample.
DEstimate estimate_D(const std::vector<RatExpr>& g_list, int j, const DomainSpec& dom,
                     const std::vector<int>& sizes, int samples, std::uint64_t seed, double safety = 4.0);

enum class OTag { FromP, RelationLeft, RelationRight, NormCap };

struct OElement {
  MatPoly poly;
  OTag tag = OTag::FromP;
  /// generator index into P for FromP, u index otherwise
  int index = 0;
  int sign = 1;

  std::string label() const;
};

struct AugmentedSet {
  std::vector<OElement> O;
  std::vector<double> D;

  std::vector<MatPoly> polys() const;
};

/// P together with +-(1 - u_j g_j)^*(1 - u_j g_j), +-(1 - g_j u_j)^*(1 - g_j u_j)
/// and D_j - u_j^* u_j.
AugmentedSet build_O(const std::vector<MatPoly>& P, const LiftResult& lift, const std::vector<double>& D);

struct ClosureSet {
  std::vector<RatExpr> Cr;
  std::vector<RatExpr> Ctilde;
  /// lifted inverse arguments aligned with u_1, u_2, ...
  std::vector<RatExpr> g_list;
  std::vector<RatExpr> g_original;
};

/// One pass of the four closure rules over `elements`.
std::vector<RatExpr> closure_rules(const std::vector<RatExpr>& elements);

/// Least set containing the entries of r and closed under the rules
/// ab => b, (a+b)c => ac and bc, a+b => a and b, a^-1 b => a a^-1 b.
/// Throws ClosureOverflow beyond max_size elements.
ClosureSet closure_Cr(const MatRatExpr& r, std::size_t max_size = 100000);

/// g_j u_j b - b for every element of Ctilde of the form g_j u_j b.
std::vector<Relation> build_Mr(const ClosureSet& c);

}  // namespace ncert

#endif  // NCERT_LIFT_HPP
