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

#include "ncert/freealg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ncert/linalg.hpp"
#include "ncert/point.hpp"

namespace ncert {

namespace {

constexpr double kPruneNorm = 1e-300;

int letter_rank_group(const Letter& l) { return l.kind == LetterKind::X ? 0 : 1; }

}  // namespace

Letter Letter::adjoint() const {
  switch (kind) {
    case LetterKind::X:
      return *this;
    case LetterKind::U:
      return ustar(index);
    case LetterKind::UStar:
      return u(index);
  }
  return *this;
}

std::string Letter::str() const {
  switch (kind) {
    case LetterKind::X:
      return "x" + std::to_string(index);
    case LetterKind::U:
      return "u" + std::to_string(index);
    case LetterKind::UStar:
      return "u" + std::to_string(index) + "*";
  }
  return {};
}

std::strong_ordering operator<=>(const Letter& a, const Letter& b) {
  if (auto c = letter_rank_group(a) <=> letter_rank_group(b); c != 0) return c;
  if (auto c = a.index <=> b.index; c != 0) return c;
  return (a.kind == LetterKind::UStar) <=> (b.kind == LetterKind::UStar);
}

Word Word::adjoint() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back(it->adjoint());
  return Word(std::move(out));
}

Word Word::operator*(const Word& other) const {
  std::vector<Letter> out = letters_;
  out.insert(out.end(), other.letters_.begin(), other.letters_.end());
  return Word(std::move(out));
}

std::string Word::str() const {
  if (letters_.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < letters_.size()) {
    std::size_t j = i;
    while (j < letters_.size() && letters_[j] == letters_[i]) ++j;
    if (!out.empty()) out += "*";
    out += letters_[i].str();
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                b.letters_.begin(), b.letters_.end());
}

std::vector<Letter> make_alphabet(int num_x, int num_u) {
  std::vector<Letter> out;
  for (int i = 1; i <= num_x; ++i) out.push_back(Letter::x(i));
  for (int j = 1; j <= num_u; ++j) {
    out.push_back(Letter::u(j));
    out.push_back(Letter::ustar(j));
  }
  return out;
}

std::vector<Word> words_up_to(const std::vector<Letter>& alphabet, int max_degree) {
  std::vector<Word> out{Word::one()};
  if (max_degree < 0) return {};
  std::vector<Word> layer{Word::one()};
  for (int d = 1; d <= max_degree; ++d) {
    std::vector<Word> next;
    next.reserve(layer.size() * alphabet.size());
    for (const Word& w : layer)
      for (const Letter& l : alphabet) next.push_back(w * Word{l});
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_complex(Complex c) {
  const double re = c.real() == 0.0 ? 0.0 : c.real();
  const double im = c.imag() == 0.0 ? 0.0 : c.imag();
  if (im == 0.0) return format_double(re);
  if (re == 0.0) return format_double(im) + "*i";
  if (im < 0) return format_double(re) + " - " + format_double(-im) + "*i";
  return format_double(re) + " + " + format_double(im) + "*i";
}

// ---------------------------------------------------------------- NCPoly

NCPoly::NCPoly(Complex c) {
  if (c != Complex(0.0)) terms_.emplace(Word::one(), c);
}

NCPoly NCPoly::monomial(const Word& w, Complex c) {
  NCPoly p;
  p.add_term(w, c);
  return p;
}

void NCPoly::add_term(const Word& w, Complex c) {
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    if (std::abs(c) >= kPruneNorm) terms_.emplace(w, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) < kPruneNorm) terms_.erase(it);
}

int NCPoly::degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

Complex NCPoly::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

NCPoly NCPoly::operator+(const NCPoly& o) const {
  NCPoly r = *this;
  for (const auto& [w, c] : o.terms_) r.add_term(w, c);
  return r;
}

NCPoly NCPoly::operator-(const NCPoly& o) const { return *this + (-o); }

NCPoly NCPoly::operator-() const { return *this * Complex(-1.0); }

NCPoly NCPoly::operator*(const NCPoly& o) const {
  NCPoly r;
  for (const auto& [w1, c1] : terms_)
    for (const auto& [w2, c2] : o.terms_) r.add_term(w1 * w2, c1 * c2);
  return r;
}

NCPoly NCPoly::operator*(Complex c) const {
  NCPoly r;
  for (const auto& [w, v] : terms_) r.add_term(w, v * c);
  return r;
}

NCPoly NCPoly::adjoint() const {
  NCPoly r;
  for (const auto& [w, c] : terms_) r.add_term(w.adjoint(), std::conj(c));
  return r;
}

std::string NCPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    bool negative = false;
    std::string text;
    if (c.imag() == 0.0) {
      negative = c.real() < 0;
      const double mag = std::abs(c.real());
      if (w.empty())
        text = format_double(mag);
      else if (mag == 1.0)
        text = w.str();
      else
        text = format_double(mag) + "*" + w.str();
    } else {
      text = "(" + format_complex(c) + ")";
      if (!w.empty()) text += "*" + w.str();
    }
    if (first)
      out += (negative ? "-" : "") + text;
    else
      out += (negative ? " - " : " + ") + text;
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------- MatPoly

MatPoly::MatPoly(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw ShapeError("MatPoly shape must be positive");
}

MatPoly::MatPoly(const NCPoly& p) : MatPoly(1, 1) {
  for (const auto& [w, c] : p.terms()) add_term(w, Matrix::Constant(1, 1, c));
}

MatPoly MatPoly::constant(const Matrix& c) {
  MatPoly p(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  p.add_term(Word::one(), c);
  return p;
}

MatPoly MatPoly::identity(int n) { return constant(Matrix::Identity(n, n)); }

MatPoly MatPoly::monomial(const Word& w, const Matrix& c) {
  MatPoly p(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  p.add_term(w, c);
  return p;
}

MatPoly MatPoly::from_entries(int rows, int cols, const std::vector<NCPoly>& entries) {
  if (static_cast<int>(entries.size()) != rows * cols)
    throw ShapeError("entry count does not match matrix shape");
  MatPoly p(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      for (const auto& [w, c] : entries[static_cast<std::size_t>(i * cols + j)].terms()) {
        Matrix m = Matrix::Zero(rows, cols);
        m(i, j) = c;
        p.add_term(w, m);
      }
  return p;
}

void MatPoly::add_term(const Word& w, const Matrix& c) {
  if (c.rows() != rows_ || c.cols() != cols_) throw ShapeError("coefficient shape mismatch");
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    if (c.norm() >= kPruneNorm) terms_.emplace(w, c);
    return;
  }
  it->second += c;
  if (it->second.norm() < kPruneNorm) terms_.erase(it);
}

int MatPoly::degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

Matrix MatPoly::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Matrix::Zero(rows_, cols_) : it->second;
}

NCPoly MatPoly::entry(int i, int j) const {
  NCPoly p;
  for (const auto& [w, c] : terms_)
    if (c(i, j) != Complex(0.0)) p = p + NCPoly::monomial(w, c(i, j));
  return p;
}

int MatPoly::max_x_index() const {
  int m = 0;
  for (const auto& [w, c] : terms_)
    for (const Letter& l : w.letters())
      if (l.is_x()) m = std::max(m, l.index);
  return m;
}

int MatPoly::max_u_index() const {
  int m = 0;
  for (const auto& [w, c] : terms_)
    for (const Letter& l : w.letters())
      if (!l.is_x()) m = std::max(m, l.index);
  return m;
}

MatPoly MatPoly::operator+(const MatPoly& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("poly_add: shape mismatch");
  MatPoly r = *this;
  for (const auto& [w, c] : o.terms_) r.add_term(w, c);
  return r;
}

MatPoly MatPoly::operator-(const MatPoly& o) const { return *this + (-o); }

MatPoly MatPoly::operator-() const { return *this * Complex(-1.0); }

MatPoly MatPoly::operator*(const MatPoly& o) const {
  if (cols_ != o.rows_) throw ShapeError("poly_mul: inner dimensions differ");
  MatPoly r(rows_, o.cols_);
  for (const auto& [w1, c1] : terms_)
    for (const auto& [w2, c2] : o.terms_) r.add_term(w1 * w2, c1 * c2);
  return r;
}

MatPoly MatPoly::operator*(Complex c) const {
  MatPoly r(rows_, cols_);
  for (const auto& [w, m] : terms_) r.add_term(w, m * c);
  return r;
}

MatPoly MatPoly::adjoint() const {
  MatPoly r(cols_, rows_);
  for (const auto& [w, c] : terms_) r.add_term(w.adjoint(), c.adjoint());
  return r;
}

double MatPoly::distance(const MatPoly& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("distance: shape mismatch");
  double worst = 0.0;
  for (const auto& [w, c] : terms_) {
    Matrix d = c - o.coeff(w);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  for (const auto& [w, c] : o.terms_)
    if (!terms_.contains(w)) worst = std::max(worst, c.cwiseAbs().maxCoeff());
  return worst;
}

bool MatPoly::is_self_adjoint(double tol) const {
  if (rows_ != cols_) return false;
  return distance(adjoint()) <= tol;
}

std::string MatPoly::str() const {
  if (rows_ == 1 && cols_ == 1) return entry(0, 0).str();
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << entry(i, j).str();
    os << "]";
  }
  os << "]";
  return os.str();
}

bool operator==(const MatPoly& a, const MatPoly& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.terms_.size() != b.terms_.size()) return false;
  auto it = b.terms_.begin();
  for (const auto& [w, c] : a.terms_) {
    if (!(w == it->first) || c != it->second) return false;
    ++it;
  }
  return true;
}

std::optional<double> ball_constant(const MatPoly& p, const Letter& l, double tol) {
  if (p.rows() != p.cols() || p.terms().size() != 2) return std::nullopt;
  const int m = p.rows();
  const Matrix eye = Matrix::Identity(m, m);
  const Word square = Word{l.adjoint()} * Word{l};
  auto it = p.terms().find(square);
  auto c0 = p.terms().find(Word::one());
  if (it == p.terms().end() || c0 == p.terms().end()) return std::nullopt;
  if ((it->second + eye).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  const Complex c = c0->second(0, 0);
  if ((c0->second - c * eye).cwiseAbs().maxCoeff() > tol || std::abs(c.imag()) > tol || c.real() <= 0)
    return std::nullopt;
  return c.real();
}

MatPoly poly_add(const MatPoly& p, const MatPoly& q) { return p + q; }
MatPoly poly_mul(const MatPoly& p, const MatPoly& q) { return p * q; }
MatPoly poly_adjoint(const MatPoly& p) { return p.adjoint(); }

// ---------------------------------------------------------------- LinearPencil

LinearPencil::LinearPencil(Matrix a0, std::vector<Matrix> ai) : a0_(std::move(a0)), ai_(std::move(ai)) {
  constexpr double tol = 1e-12;
  if (a0_.rows() == 0 || a0_.rows() != a0_.cols()) throw ShapeError("pencil A0 must be square");
  if (hermitian_defect(a0_) > tol) throw PreconditionError("pencil A0 is not Hermitian");
  for (const Matrix& a : ai_) {
    if (a.rows() != a0_.rows() || a.cols() != a0_.cols())
      throw ShapeError("pencil coefficient sizes differ");
    if (hermitian_defect(a) > tol) throw PreconditionError("pencil coefficient is not Hermitian");
  }
}

LinearPencil LinearPencil::monic(std::vector<Matrix> ai) {
  if (ai.empty()) throw ShapeError("monic pencil needs at least one coefficient");
  const auto k = ai.front().rows();
  return LinearPencil(Matrix::Identity(k, k), std::move(ai));
}

bool LinearPencil::is_monic() const {
  return (a0_ - Matrix::Identity(a0_.rows(), a0_.cols())).cwiseAbs().maxCoeff() <= 1e-12;
}

MatPoly LinearPencil::to_matpoly() const {
  MatPoly p = MatPoly::constant(a0_);
  for (std::size_t i = 0; i < ai_.size(); ++i)
    p.add_term(Word{Letter::x(static_cast<int>(i) + 1)}, ai_[i]);
  return p;
}

Matrix pencil_eval(const LinearPencil& pencil, const MatrixPoint& point) {
  if (point.arity() != pencil.arity()) throw ShapeError("pencil_eval: arity mismatch");
  const auto n = point.n;
  Matrix out = kron(pencil.a0(), Matrix::Identity(n, n));
  for (int i = 0; i < pencil.arity(); ++i)
    out += kron(pencil.ai()[static_cast<std::size_t>(i)], point.X[static_cast<std::size_t>(i)]);
  return hermitian_part(out);
}

}  // namespace ncert
