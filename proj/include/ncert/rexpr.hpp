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

#ifndef NCERT_REXPR_HPP
#define NCERT_REXPR_HPP

#include <compare>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ncert/freealg.hpp"

namespace ncert {

/// Immutable syntax tree of a noncommutative rational expression.
///
/// Sum and Product nodes always carry at least two children. Inverse of the
/// literal zero is rejected on construction; every other degeneracy is left to
/// evaluation.
class RatExpr {
 public:
  enum class Kind { Scalar, Letter, Sum, Product, Inverse, Adjoint };

  RatExpr();  // Scalar(0)

  static RatExpr scalar(Complex c);
  static RatExpr letter(Letter l);
  static RatExpr x(int i) { return letter(Letter::x(i)); }
  static RatExpr u(int j) { return letter(Letter::u(j)); }
  static RatExpr ustar(int j) { return letter(Letter::ustar(j)); }
  static RatExpr sum(std::vector<RatExpr> terms);
  static RatExpr product(std::vector<RatExpr> factors);
  static RatExpr inverse(RatExpr arg);
  static RatExpr adjoint(RatExpr arg);

  /// Like sum()/product() but collapse zero or one operands instead of throwing.
  static RatExpr sum_of(std::vector<RatExpr> terms);
  static RatExpr product_of(std::vector<RatExpr> factors);

  Kind kind() const;
  Complex value() const;                      // Scalar
  const Letter& letter_value() const;         // Letter
  const std::vector<RatExpr>& children() const;  // Sum, Product, Inverse, Adjoint
  const RatExpr& arg() const { return children().front(); }

  bool is_scalar(Complex c) const { return kind() == Kind::Scalar && value() == c; }
  bool has_inverse() const;
  int max_x_index() const;
  int max_u_index() const;

  std::string str() const;

  friend bool operator==(const RatExpr& a, const RatExpr& b);
  friend std::strong_ordering operator<=>(const RatExpr& a, const RatExpr& b);

 private:
  struct Node;
  explicit RatExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

RatExpr operator+(const RatExpr& a, const RatExpr& b);
RatExpr operator-(const RatExpr& a, const RatExpr& b);
RatExpr operator*(const RatExpr& a, const RatExpr& b);

/// Matrix of rational expressions, row-major.
class MatRatExpr {
 public:
  MatRatExpr(RatExpr e);  // NOLINT(google-explicit-constructor)
  MatRatExpr(int rows, int cols, std::vector<RatExpr> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<RatExpr>& entries() const { return entries_; }
  const RatExpr& at(int i, int j) const { return entries_[static_cast<std::size_t>(i * cols_ + j)]; }
  bool is_square() const { return rows_ == cols_; }
  int max_x_index() const;
  int max_u_index() const;

  std::string str() const;
  friend bool operator==(const MatRatExpr&, const MatRatExpr&) = default;

 private:
  int rows_;
  int cols_;
  std::vector<RatExpr> entries_;
};

/// Parses the expression grammar; throws SyntaxError with a byte offset.
MatRatExpr parse(std::string_view text);
/// Parses text that must denote a single (1x1) expression.
RatExpr parse_expr(std::string_view text);

std::string print(const RatExpr& e);
std::string print(const MatRatExpr& e);

/// Pushes the involution to the leaves: scalars conjugate, x letters stay,
/// u letters swap with u*, products reverse (scalar factors kept in front),
/// inverses commute with the adjoint.
RatExpr adjoint_expr(const RatExpr& e);
MatRatExpr adjoint_expr(const MatRatExpr& e);
/// Removes Adjoint nodes without starring the whole expression.
RatExpr normalize_adjoints(const RatExpr& e);

/// Distinct arguments of Inverse nodes, innermost first.
std::vector<RatExpr> inverse_subterms(const MatRatExpr& e);
int inversion_count(const MatRatExpr& e);

using Bindings = std::map<RatExpr, RatExpr>;

/// Simultaneous replacement of subtrees structurally equal to a binding key.
RatExpr substitute(const RatExpr& e, const Bindings& bindings);
MatRatExpr substitute(const MatRatExpr& e, const Bindings& bindings);

/// Expands an inverse-free expression into a polynomial; throws PreconditionError
/// if an Inverse node remains.
NCPoly expand(const RatExpr& e);
MatPoly expand(const MatRatExpr& e);

/// Polynomial as an expression tree (through the canonical text form).
RatExpr to_expr(const NCPoly& p);
MatRatExpr to_expr(const MatPoly& p);

}  // namespace ncert

#endif  // NCERT_REXPR_HPP
