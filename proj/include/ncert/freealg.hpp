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

#ifndef NCERT_FREEALG_HPP
#define NCERT_FREEALG_HPP

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncert/types.hpp"

namespace ncert {

enum class LetterKind : std::uint8_t { X, U, UStar };

/// A generator of the free algebra. X letters are self-adjoint; U and UStar
/// letters are swapped by the involution.
struct Letter {
  LetterKind kind = LetterKind::X;
  int index = 1;

  static Letter x(int i) { return {LetterKind::X, i}; }
  static Letter u(int j) { return {LetterKind::U, j}; }
  static Letter ustar(int j) { return {LetterKind::UStar, j}; }

  Letter adjoint() const;
  bool is_x() const { return kind == LetterKind::X; }
  std::string str() const;

  friend bool operator==(const Letter&, const Letter&) = default;
  // x1 < ... < xd < u1 < u1* < u2 < u2* < ...
  friend std::strong_ordering operator<=>(const Letter& a, const Letter& b);
};

/// Finite product of letters; the empty word is the identity.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word one() { return {}; }

  int degree() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }
  const std::vector<Letter>& letters() const { return letters_; }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }

  /// Reverses the word and stars every letter.
  Word adjoint() const;
  Word operator*(const Word& other) const;

  /// Letters joined by '*', runs compressed as powers ("x1^2*u1*").
  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;
  /// Graded lexicographic order.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::vector<Letter> letters_;
};

/// All words over `alphabet` of degree <= max_degree, in graded-lex order.
std::vector<Word> words_up_to(const std::vector<Letter>& alphabet, int max_degree);

/// The alphabet x1..xd, u1, u1*, ..., uk, uk* in canonical order.
std::vector<Letter> make_alphabet(int num_x, int num_u);

/// Scalar noncommutative polynomial.
class NCPoly {
 public:
  using Terms = std::map<Word, Complex>;

  NCPoly() = default;
  NCPoly(Complex c);  // NOLINT(google-explicit-constructor)
  static NCPoly monomial(const Word& w, Complex c = 1.0);
  static NCPoly letter(Letter l) { return monomial(Word{l}); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  Complex coeff(const Word& w) const;

  NCPoly operator+(const NCPoly& o) const;
  NCPoly operator-(const NCPoly& o) const;
  NCPoly operator-() const;
  NCPoly operator*(const NCPoly& o) const;
  NCPoly operator*(Complex c) const;
  NCPoly adjoint() const;

  std::string str() const;
  friend bool operator==(const NCPoly&, const NCPoly&) = default;

 private:
  void add_term(const Word& w, Complex c);
  Terms terms_;
};

/// Matrix with noncommutative polynomial entries, stored as word -> coefficient matrix.
class MatPoly {
 public:
  using Terms = std::map<Word, Matrix>;

  MatPoly() : MatPoly(1, 1) {}
  MatPoly(int rows, int cols);
  MatPoly(const NCPoly& p);  // NOLINT(google-explicit-constructor)

  static MatPoly constant(const Matrix& c);
  static MatPoly identity(int n);
  static MatPoly monomial(const Word& w, const Matrix& c);
  static MatPoly from_entries(int rows, int cols, const std::vector<NCPoly>& entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  /// Coefficient matrix of `w` (zero if absent).
  Matrix coeff(const Word& w) const;
  NCPoly entry(int i, int j) const;

  /// Largest x index and u index appearing in any word.
  int max_x_index() const;
  int max_u_index() const;

  MatPoly operator+(const MatPoly& o) const;
  MatPoly operator-(const MatPoly& o) const;
  MatPoly operator-() const;
  MatPoly operator*(const MatPoly& o) const;
  MatPoly operator*(Complex c) const;
  MatPoly adjoint() const;

  /// Max entrywise |coefficient difference| over all words.
  double distance(const MatPoly& o) const;
  bool is_self_adjoint(double tol = 0.0) const;

  void add_term(const Word& w, const Matrix& c);

  std::string str() const;
  friend bool operator==(const MatPoly& a, const MatPoly& b);

 private:
  int rows_;
  int cols_;
  Terms terms_;
};

/// If p equals C*I - l^* l for some C > 0 (l an x letter or u letter), returns C.
std::optional<double> ball_constant(const MatPoly& p, const Letter& l, double tol = 1e-12);

MatPoly poly_add(const MatPoly& p, const MatPoly& q);
MatPoly poly_mul(const MatPoly& p, const MatPoly& q);
MatPoly poly_adjoint(const MatPoly& p);

/// L(x) = A0 + sum_i Ai x_i with Hermitian coefficients.
class LinearPencil {
 public:
  LinearPencil(Matrix a0, std::vector<Matrix> ai);

  /// Monic pencil I + sum_i Ai x_i.
  static LinearPencil monic(std::vector<Matrix> ai);

  int size() const { return static_cast<int>(a0_.rows()); }
  int arity() const { return static_cast<int>(ai_.size()); }
  const Matrix& a0() const { return a0_; }
  const std::vector<Matrix>& ai() const { return ai_; }
  bool is_monic() const;

  MatPoly to_matpoly() const;

 private:
  Matrix a0_;
  std::vector<Matrix> ai_;
};

struct MatrixPoint;

/// L(X) = A0 (x) I_n + sum_i Ai (x) X_i, symmetrized.
Matrix pencil_eval(const LinearPencil& pencil, const MatrixPoint& point);

/// Shortest round-tripping text for a double.
std::string format_double(double v);
/// Text for a complex scalar accepted by the expression parser.
std::string format_complex(Complex c);

}  // namespace ncert

#endif  // NCERT_FREEALG_HPP
