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

#ifndef NCERT_EVALNUM_HPP
#define NCERT_EVALNUM_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ncert/freealg.hpp"
#include "ncert/point.hpp"
#include "ncert/rexpr.hpp"

namespace ncert {

inline constexpr double kDefaultCondCap = 1e12;

Matrix eval_word(const Word& w, const ExtendedPoint& p);
/// sum_w C_w (x) w(X, U); result is (rows*n) x (cols*n).
Matrix eval_poly(const MatPoly& poly, const ExtendedPoint& p);

/// Recursive evaluation; Inverse nodes are solved after a conditioning check.
/// Throws NotInDomain when an inverse argument is singular or its condition
/// number exceeds cond_cap.
Matrix eval_expr(const RatExpr& e, const ExtendedPoint& p, double cond_cap = kDefaultCondCap);
Matrix eval_expr(const MatRatExpr& e, const ExtendedPoint& p, double cond_cap = kDefaultCondCap);

/// Positivity domain: either a list of self-adjoint polynomials or a pencil.
class DomainSpec {
 public:
  static DomainSpec poly_list(std::vector<MatPoly> polys, int arity = 0);
  static DomainSpec pencil(LinearPencil pencil);

  bool is_pencil() const { return std::holds_alternative<LinearPencil>(variant_); }
  const std::vector<MatPoly>& polys() const { return std::get<std::vector<MatPoly>>(variant_); }
  const LinearPencil& pencil_value() const { return std::get<LinearPencil>(variant_); }
  int arity() const { return arity_; }

  double psd_tolerance = 1e-9;

 private:
  DomainSpec(std::variant<std::vector<MatPoly>, LinearPencil> v, int arity)
      : variant_(std::move(v)), arity_(arity) {}
  std::variant<std::vector<MatPoly>, LinearPencil> variant_;
  int arity_;
};

struct DomainReport {
  bool inside = false;
  /// Smallest eigenvalue over all generators evaluated at the point.
  double margin = 0.0;
};

DomainReport in_domain(const DomainSpec& d, const MatrixPoint& x);

/// Per-coordinate operator-norm bound used to scale samples.
std::vector<double> coordinate_bounds(const DomainSpec& d);

/// Rejection sampling of `count` points of size n inside the domain.
/// Throws SamplingExhausted after 1e5 rejections.
std::vector<MatrixPoint> sample_domain(const DomainSpec& d, int n, int count, std::uint64_t seed);

class NoCommonPoints : public Error {
 public:
  using Error::Error;
};

struct EquivalenceVerdict {
  bool distinguished = false;
  int evaluated = 0;
  int skipped = 0;
  int distinguishing_trials = 0;
  double max_deviation = 0.0;
  std::optional<ExtendedPoint> witness;
  double witness_deviation = 0.0;
};

/// Randomized identity test on Hermitian tuples. One-sided: can only prove
/// that two expressions differ.
EquivalenceVerdict test_equivalence(const MatRatExpr& a, const MatRatExpr& b, const std::vector<int>& sizes,
                                    int trials, double tol, std::uint64_t seed);

/// One element g_j u_j b - b of the relation set, with its parts kept.
struct Relation {
  int j = 1;
  MatPoly b;
  MatPoly m;
};

struct ZSample {
  ExtendedPoint point;
  Vector v;
  /// True for points with U_j = g_j(X)^-1 exactly.
  bool inverse_type = true;
};

enum class ZFamily { InverseType, Kernel };

/// Samples of the relation variety over the pencil domain.
/// g_list holds the lifted inverse arguments (g_j may contain u_1..u_{j-1}).
/// `block` is the number of n-blocks in v.
std::vector<ZSample> sample_Zr(const std::vector<Relation>& relations, const LinearPencil& pencil,
                               const std::vector<RatExpr>& g_list, int n, int count, std::uint64_t seed,
                               ZFamily family = ZFamily::InverseType, int block = 1);

/// U_j = g_j(X, U_1..U_{j-1})^-1 for all j.
ExtendedPoint inverse_type_point(const MatrixPoint& x, const std::vector<RatExpr>& g_list,
                                 double cond_cap = kDefaultCondCap);

/// max over relations of ||(I_block (x) m(X,U)) v|| / ||v||
double relation_defect(const std::vector<Relation>& relations, const ExtendedPoint& p, const Vector& v);

}  // namespace ncert

#endif  // NCERT_EVALNUM_HPP
