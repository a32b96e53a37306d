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

#include "ncert/rexpr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

namespace ncert {

struct RatExpr::Node {
  Kind kind = Kind::Scalar;
  Complex value{0.0, 0.0};
  Letter letter{};
  std::vector<RatExpr> children;
};

namespace {

std::strong_ordering compare_double(double a, double b) {
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

RatExpr::RatExpr() : node_(std::make_shared<const Node>()) {}

RatExpr RatExpr::scalar(Complex c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scalar;
  n->value = c;
  return RatExpr(std::move(n));
}

RatExpr RatExpr::letter(Letter l) {
  if (l.index <= 0) throw PreconditionError("letter index must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Letter;
  n->letter = l;
  return RatExpr(std::move(n));
}

RatExpr RatExpr::sum(std::vector<RatExpr> terms) {
  if (terms.size() < 2) throw PreconditionError("Sum needs at least two terms");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->children = std::move(terms);
  return RatExpr(std::move(n));
}

RatExpr RatExpr::product(std::vector<RatExpr> factors) {
  if (factors.size() < 2) throw PreconditionError("Product needs at least two factors");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->children = std::move(factors);
  return RatExpr(std::move(n));
}

RatExpr RatExpr::inverse(RatExpr arg) {
  if (arg.kind() == Kind::Scalar && arg.value() == Complex(0.0))
    throw PreconditionError("inverse of the literal zero");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Inverse;
  n->children.push_back(std::move(arg));
  return RatExpr(std::move(n));
}

RatExpr RatExpr::adjoint(RatExpr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Adjoint;
  n->children.push_back(std::move(arg));
  return RatExpr(std::move(n));
}

RatExpr RatExpr::sum_of(std::vector<RatExpr> terms) {
  if (terms.empty()) return scalar(0.0);
  if (terms.size() == 1) return terms.front();
  return sum(std::move(terms));
}

RatExpr RatExpr::product_of(std::vector<RatExpr> factors) {
  if (factors.empty()) return scalar(1.0);
  if (factors.size() == 1) return factors.front();
  return product(std::move(factors));
}

RatExpr::Kind RatExpr::kind() const { return node_->kind; }
Complex RatExpr::value() const { return node_->value; }
const Letter& RatExpr::letter_value() const { return node_->letter; }
const std::vector<RatExpr>& RatExpr::children() const { return node_->children; }

bool RatExpr::has_inverse() const {
  if (kind() == Kind::Inverse) return true;
  return std::any_of(children().begin(), children().end(), [](const RatExpr& c) { return c.has_inverse(); });
}

int RatExpr::max_x_index() const {
  if (kind() == Kind::Letter) return letter_value().is_x() ? letter_value().index : 0;
  int m = 0;
  for (const RatExpr& c : children()) m = std::max(m, c.max_x_index());
  return m;
}

int RatExpr::max_u_index() const {
  if (kind() == Kind::Letter) return letter_value().is_x() ? 0 : letter_value().index;
  int m = 0;
  for (const RatExpr& c : children()) m = std::max(m, c.max_u_index());
  return m;
}

std::string RatExpr::str() const { return print(*this); }

bool operator==(const RatExpr& a, const RatExpr& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const RatExpr& a, const RatExpr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = static_cast<int>(a.kind()) <=> static_cast<int>(b.kind()); c != 0) return c;
  switch (a.kind()) {
    case RatExpr::Kind::Scalar:
      if (auto c = compare_double(a.value().real(), b.value().real()); c != 0) return c;
      return compare_double(a.value().imag(), b.value().imag());
    case RatExpr::Kind::Letter:
      return a.letter_value() <=> b.letter_value();
    default:
      return std::lexicographical_compare_three_way(a.children().begin(), a.children().end(),
                                                    b.children().begin(), b.children().end());
  }
}

RatExpr operator+(const RatExpr& a, const RatExpr& b) { return RatExpr::sum({a, b}); }
RatExpr operator-(const RatExpr& a, const RatExpr& b) {
  return RatExpr::sum({a, RatExpr::product({RatExpr::scalar(-1.0), b})});
}
RatExpr operator*(const RatExpr& a, const RatExpr& b) { return RatExpr::product({a, b}); }

// ---------------------------------------------------------------- MatRatExpr

MatRatExpr::MatRatExpr(RatExpr e) : rows_(1), cols_(1), entries_{std::move(e)} {}

MatRatExpr::MatRatExpr(int rows, int cols, std::vector<RatExpr> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows <= 0 || cols <= 0 || static_cast<int>(entries_.size()) != rows * cols)
    throw ShapeError("MatRatExpr entry count does not match its shape");
}

int MatRatExpr::max_x_index() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, e.max_x_index());
  return m;
}

int MatRatExpr::max_u_index() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, e.max_u_index());
  return m;
}

std::string MatRatExpr::str() const { return print(*this); }

// ---------------------------------------------------------------- parser

namespace {

enum class Literal { None, Real, Imag };

struct FactorResult {
  RatExpr node;
  bool bare_number = false;
  bool bare_i = false;
  bool from_power = false;
};

struct TermResult {
  RatExpr node;
  Literal literal = Literal::None;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  MatRatExpr parse_all() {
    skip_ws();
    MatRatExpr out = peek() == '[' ? parse_matrix() : MatRatExpr(parse_expr());
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool starts_factor(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 'x' || c == 'u' ||
           c == 'i';
  }

  MatRatExpr parse_matrix() {
    const std::size_t start = pos_;
    expect('[');
    std::vector<std::vector<RatExpr>> rows;
    do {
      expect('[');
      std::vector<RatExpr> row{parse_expr()};
      skip_ws();
      while (peek() == ',') {
        ++pos_;
        row.push_back(parse_expr());
        skip_ws();
      }
      expect(']');
      rows.push_back(std::move(row));
      skip_ws();
    } while (peek() == ',' && (++pos_, true));
    expect(']');
    const std::size_t cols = rows.front().size();
    std::vector<RatExpr> entries;
    for (auto& r : rows) {
      if (r.size() != cols) throw SyntaxError("matrix rows have different lengths", start);
      entries.insert(entries.end(), r.begin(), r.end());
    }
    return MatRatExpr(static_cast<int>(rows.size()), static_cast<int>(cols), std::move(entries));
  }

  RatExpr parse_expr() {
    std::vector<TermResult> terms;
    terms.push_back(parse_term(false));
    bool last_foldable = terms.back().literal == Literal::Real;
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') break;
      ++pos_;
      TermResult t = parse_term(c == '-');
      if (last_foldable && t.literal == Literal::Imag) {
        // "a + b*i" denotes one complex scalar
        terms.back().node = RatExpr::scalar(terms.back().node.value() + t.node.value());
        terms.back().literal = Literal::None;
        last_foldable = false;
        continue;
      }
      last_foldable = t.literal == Literal::Real;
      terms.push_back(std::move(t));
    }
    if (terms.size() == 1) return terms.front().node;
    std::vector<RatExpr> nodes;
    for (auto& t : terms) nodes.push_back(std::move(t.node));
    return RatExpr::sum(std::move(nodes));
  }

  TermResult parse_term(bool negate) {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      negate = !negate;
    }
    std::vector<FactorResult> factors{parse_factor()};
    for (;;) {
      skip_ws();
      if (peek() != '*') break;
      ++pos_;
      factors.push_back(parse_factor());
    }
    const double sign = negate ? -1.0 : 1.0;
    if (factors.size() == 1 && factors[0].bare_number)
      return {RatExpr::scalar(sign * factors[0].node.value()), Literal::Real};
    if (factors.size() == 1 && factors[0].bare_i) return {RatExpr::scalar(sign * Complex(0, 1)), Literal::Imag};
    if (factors.size() == 2 && factors[0].bare_number && factors[1].bare_i)
      return {RatExpr::scalar(Complex(0.0, sign * factors[0].node.value().real())), Literal::Imag};

    std::vector<RatExpr> items;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      auto& f = factors[k];
      if (negate && k == 0 && f.bare_number) {
        items.push_back(RatExpr::scalar(-f.node.value()));
        negate = false;
        continue;
      }
      if (f.from_power) {
        const auto& ch = f.node.children();
        items.insert(items.end(), ch.begin(), ch.end());
      } else {
        items.push_back(std::move(f.node));
      }
    }
    if (negate) items.insert(items.begin(), RatExpr::scalar(-1.0));
    return {RatExpr::product_of(std::move(items)), Literal::None};
  }

  FactorResult parse_factor() {
    skip_ws();
    FactorResult f = parse_atom();
    for (;;) {
      skip_ws();
      if (peek() != '^') break;
      const std::size_t op_pos = pos_;
      ++pos_;
      skip_ws();
      if (peek() == '-') {
        ++pos_;
        skip_ws();
        if (peek() != '1' || (pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))))
          fail("expected '^-1'");
        ++pos_;
        if (f.node.kind() == RatExpr::Kind::Scalar && f.node.value() == Complex(0.0))
          throw SyntaxError("inverse of the literal zero", op_pos);
        f.node = RatExpr::inverse(std::move(f.node));
        f.from_power = false;
      } else if (peek() == '*') {
        ++pos_;
        f.node = RatExpr::adjoint(std::move(f.node));
        f.from_power = false;
      } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
        const int k = parse_int();
        if (k < 1) fail("exponent must be a positive integer");
        if (k > 1) {
          f.node = RatExpr::product(std::vector<RatExpr>(static_cast<std::size_t>(k), f.node));
          f.from_power = true;
        }
      } else {
        fail("expected '-1', '*' or a positive integer after '^'");
      }
      f.bare_number = false;
      f.bare_i = false;
    }
    return f;
  }

  int parse_int() {
    const std::size_t start = pos_;
    int value = 0;
    auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
    if (res.ec != std::errc()) {
      pos_ = start;
      fail("expected an integer");
    }
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return value;
  }

  FactorResult parse_atom() {
    skip_ws();
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (res.ec != std::errc()) fail("malformed number");
      pos_ = static_cast<std::size_t>(res.ptr - s_.data());
      return {RatExpr::scalar(v), true, false, false};
    }
    if (c == '(') {
      ++pos_;
      RatExpr e = parse_expr();
      expect(')');
      return {std::move(e), false, false, false};
    }
    if (c == 'i' && !next_is_alnum(pos_ + 1)) {
      ++pos_;
      return {RatExpr::scalar(Complex(0.0, 1.0)), false, true, false};
    }
    if (c == 'x' || c == 'u') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a letter index");
      const std::size_t at = pos_;
      const int idx = parse_int();
      if (idx < 1) throw SyntaxError("letter index must be positive", at);
      if (c == 'x') return {RatExpr::x(idx), false, false, false};
      // "u1*" is the starred letter unless the '*' is followed by another factor
      if (peek() == '*') {
        std::size_t look = pos_ + 1;
        while (look < s_.size() && std::isspace(static_cast<unsigned char>(s_[look]))) ++look;
        if (look >= s_.size() || !starts_factor(s_[look])) {
          ++pos_;
          return {RatExpr::ustar(idx), false, false, false};
        }
      }
      return {RatExpr::u(idx), false, false, false};
    }
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  bool next_is_alnum(std::size_t p) const {
    return p < s_.size() && std::isalnum(static_cast<unsigned char>(s_[p]));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printer

bool is_real_scalar(const RatExpr& e) { return e.kind() == RatExpr::Kind::Scalar && e.value().imag() == 0.0; }
bool is_nonneg_real_scalar(const RatExpr& e) { return is_real_scalar(e) && !(e.value().real() < 0.0); }

std::string print_expr(const RatExpr& e);
std::string print_term(const RatExpr& e);
std::string print_factor(const RatExpr& f, bool leading);

std::string join_factors(const std::vector<RatExpr>& fs, std::size_t from, bool first_leading) {
  std::string out;
  for (std::size_t k = from; k < fs.size(); ++k) {
    if (k > from) out += "*";
    out += print_factor(fs[k], k == from && first_leading);
  }
  return out;
}

std::string print_postfix_operand(const RatExpr& a) {
  if (a.kind() == RatExpr::Kind::Letter || is_nonneg_real_scalar(a)) return print_factor(a, true);
  return "(" + print_expr(a) + ")";
}

std::string print_factor(const RatExpr& f, bool leading) {
  switch (f.kind()) {
    case RatExpr::Kind::Scalar:
      if (f.value().imag() != 0.0) return "(" + format_complex(f.value()) + ")";
      if (f.value().real() < 0.0 && !leading) return "(" + format_double(f.value().real()) + ")";
      return format_double(f.value().real());
    case RatExpr::Kind::Letter:
      return f.letter_value().str();
    case RatExpr::Kind::Sum:
      return "(" + print_expr(f) + ")";
    case RatExpr::Kind::Product:
      return "(" + print_term(f) + ")";
    case RatExpr::Kind::Inverse:
      return print_postfix_operand(f.arg()) + "^-1";
    case RatExpr::Kind::Adjoint:
      return print_postfix_operand(f.arg()) + "^*";
  }
  return {};
}

std::string print_term(const RatExpr& e) {
  switch (e.kind()) {
    case RatExpr::Kind::Scalar:
      return format_complex(e.value());
    case RatExpr::Kind::Sum:
      return "(" + print_expr(e) + ")";
    case RatExpr::Kind::Product: {
      const auto& fs = e.children();
      if (fs[0].is_scalar(-1.0) && !is_nonneg_real_scalar(fs[1])) return "-" + join_factors(fs, 1, false);
      return join_factors(fs, 0, true);
    }
    default:
      return print_factor(e, true);
  }
}

std::string print_sum_child(const RatExpr& c, bool first) {
  if (c.kind() == RatExpr::Kind::Sum) return (first ? "(" : " + (") + print_expr(c) + ")";
  if (c.kind() == RatExpr::Kind::Scalar && c.value().imag() != 0.0)
    return (first ? "(" : " + (") + format_complex(c.value()) + ")";
  if (first) return print_term(c);
  if (c.kind() == RatExpr::Kind::Scalar && c.value().real() < 0.0)
    return " - " + format_double(-c.value().real());
  if (c.kind() == RatExpr::Kind::Product && is_real_scalar(c.children()[0]) && c.children()[0].value().real() < 0.0) {
    const auto& fs = c.children();
    const double v = fs[0].value().real();
    if (v == -1.0 && !is_nonneg_real_scalar(fs[1])) return " - " + join_factors(fs, 1, false);
    if (v != -1.0) return " - " + format_double(-v) + "*" + join_factors(fs, 1, false);
  }
  return " + " + print_term(c);
}

std::string print_expr(const RatExpr& e) {
  if (e.kind() != RatExpr::Kind::Sum) return print_term(e);
  std::string out;
  bool first = true;
  for (const RatExpr& c : e.children()) {
    out += print_sum_child(c, first);
    first = false;
  }
  return out;
}

RatExpr push_adjoint(const RatExpr& e, bool starred) {
  using K = RatExpr::Kind;
  switch (e.kind()) {
    case K::Scalar:
      return starred ? RatExpr::scalar(std::conj(e.value())) : e;
    case K::Letter:
      return starred ? RatExpr::letter(e.letter_value().adjoint()) : e;
    case K::Sum: {
      std::vector<RatExpr> out;
      for (const auto& c : e.children()) out.push_back(push_adjoint(c, starred));
      return RatExpr::sum(std::move(out));
    }
    case K::Product: {
      std::vector<RatExpr> scalars;
      std::vector<RatExpr> rest;
      if (!starred) {
        for (const auto& c : e.children()) rest.push_back(push_adjoint(c, false));
        return RatExpr::product(std::move(rest));
      }
      for (const auto& c : e.children())
        (c.kind() == K::Scalar ? scalars : rest).push_back(push_adjoint(c, true));
      std::reverse(rest.begin(), rest.end());
      scalars.insert(scalars.end(), rest.begin(), rest.end());
      return RatExpr::product(std::move(scalars));
    }
    case K::Inverse:
      return RatExpr::inverse(push_adjoint(e.arg(), starred));
    case K::Adjoint:
      return push_adjoint(e.arg(), !starred);
  }
  return e;
}

void collect_inverses(const RatExpr& e, std::vector<RatExpr>& out, std::set<RatExpr>& seen) {
  for (const RatExpr& c : e.children()) collect_inverses(c, out, seen);
  if (e.kind() == RatExpr::Kind::Inverse && seen.insert(e.arg()).second) out.push_back(e.arg());
}

}  // namespace

MatRatExpr parse(std::string_view text) { return Parser(text).parse_all(); }

RatExpr parse_expr(std::string_view text) {
  MatRatExpr m = parse(text);
  if (m.rows() != 1 || m.cols() != 1) throw ShapeError("expected a scalar expression, got a matrix");
  return m.entries().front();
}

std::string print(const RatExpr& e) { return print_expr(e); }

std::string print(const MatRatExpr& e) {
  if (e.rows() == 1 && e.cols() == 1) return print_expr(e.entries().front());
  std::string out = "[";
  for (int i = 0; i < e.rows(); ++i) {
    out += i ? ", [" : "[";
    for (int j = 0; j < e.cols(); ++j) out += (j ? ", " : "") + print_expr(e.at(i, j));
    out += "]";
  }
  return out + "]";
}

RatExpr adjoint_expr(const RatExpr& e) { return push_adjoint(e, true); }

MatRatExpr adjoint_expr(const MatRatExpr& e) {
  std::vector<RatExpr> out;
  for (int j = 0; j < e.cols(); ++j)
    for (int i = 0; i < e.rows(); ++i) out.push_back(adjoint_expr(e.at(i, j)));
  return MatRatExpr(e.cols(), e.rows(), std::move(out));
}

RatExpr normalize_adjoints(const RatExpr& e) { return push_adjoint(e, false); }

std::vector<RatExpr> inverse_subterms(const MatRatExpr& e) {
  std::vector<RatExpr> out;
  std::set<RatExpr> seen;
  for (const RatExpr& entry : e.entries()) collect_inverses(entry, out, seen);
  return out;
}

int inversion_count(const MatRatExpr& e) { return static_cast<int>(inverse_subterms(e).size()); }

RatExpr substitute(const RatExpr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  if (auto it = bindings.find(e); it != bindings.end()) return it->second;
  using K = RatExpr::Kind;
  switch (e.kind()) {
    case K::Scalar:
    case K::Letter:
      return e;
    case K::Sum:
    case K::Product: {
      std::vector<RatExpr> out;
      for (const auto& c : e.children()) out.push_back(substitute(c, bindings));
      return e.kind() == K::Sum ? RatExpr::sum(std::move(out)) : RatExpr::product(std::move(out));
    }
    case K::Inverse:
      return RatExpr::inverse(substitute(e.arg(), bindings));
    case K::Adjoint:
      return RatExpr::adjoint(substitute(e.arg(), bindings));
  }
  return e;
}

MatRatExpr substitute(const MatRatExpr& e, const Bindings& bindings) {
  std::vector<RatExpr> out;
  for (const auto& entry : e.entries()) out.push_back(substitute(entry, bindings));
  return MatRatExpr(e.rows(), e.cols(), std::move(out));
}

NCPoly expand(const RatExpr& e) {
  using K = RatExpr::Kind;
  switch (e.kind()) {
    case K::Scalar:
      return NCPoly(e.value());
    case K::Letter:
      return NCPoly::letter(e.letter_value());
    case K::Sum: {
      NCPoly p;
      for (const auto& c : e.children()) p = p + expand(c);
      return p;
    }
    case K::Product: {
      NCPoly p(1.0);
      for (const auto& c : e.children()) p = p * expand(c);
      return p;
    }
    case K::Inverse:
      throw PreconditionError("cannot expand an expression containing an inverse: " + print(e));
    case K::Adjoint:
      return expand(e.arg()).adjoint();
  }
  return {};
}

MatPoly expand(const MatRatExpr& e) {
  std::vector<NCPoly> entries;
  for (const auto& entry : e.entries()) entries.push_back(expand(entry));
  return MatPoly::from_entries(e.rows(), e.cols(), entries);
}

RatExpr to_expr(const NCPoly& p) { return parse_expr(p.str()); }

MatRatExpr to_expr(const MatPoly& p) { return parse(p.str()); }

}  // namespace ncert
