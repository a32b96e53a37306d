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

#include "ncert/evalnum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncert/linalg.hpp"

namespace ncert {

namespace {

constexpr int kMaxRejections = 100000;

const Matrix& letter_matrix(const Letter& l, const ExtendedPoint& p, Matrix& scratch) {
  const auto idx = static_cast<std::size_t>(l.index - 1);
  if (l.is_x()) {
    if (idx >= p.base.X.size()) throw ShapeError("point has no matrix for " + l.str());
    return p.base.X[idx];
  }
  if (idx >= p.U.size()) throw ShapeError("point has no matrix for " + l.str());
  if (l.kind == LetterKind::U) return p.U[idx];
  scratch = p.U[idx].adjoint();
  return scratch;
}

Matrix invert_checked(const Matrix& a, const RatExpr& arg, double cond_cap) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || !(smax / smin <= cond_cap)) throw NotInDomain(print(arg));
  return a.partialPivLu().inverse();
}

}  // namespace

void MatrixPoint::validate(double tol) const {
  for (const Matrix& x : X) {
    if (x.rows() != n || x.cols() != n) throw ShapeError("matrix point entries must be n x n");
    if (hermitian_defect(x) > tol) throw PreconditionError("matrix point entries must be Hermitian");
  }
}

Matrix eval_word(const Word& w, const ExtendedPoint& p) {
  const int n = p.n();
  Matrix out = Matrix::Identity(n, n);
  Matrix scratch;
  for (const Letter& l : w.letters()) out = out * letter_matrix(l, p, scratch);
  return out;
}

Matrix eval_poly(const MatPoly& poly, const ExtendedPoint& p) {
  const int n = p.n();
  Matrix out = Matrix::Zero(poly.rows() * n, poly.cols() * n);
  for (const auto& [w, c] : poly.terms()) out += kron(c, eval_word(w, p));
  return out;
}

Matrix eval_expr(const RatExpr& e, const ExtendedPoint& p, double cond_cap) {
  using K = RatExpr::Kind;
  const int n = p.n();
  switch (e.kind()) {
    case K::Scalar:
      return e.value() * Matrix::Identity(n, n);
    case K::Letter: {
      Matrix scratch;
      return letter_matrix(e.letter_value(), p, scratch);
    }
    case K::Sum: {
      Matrix out = Matrix::Zero(n, n);
      for (const auto& c : e.children()) out += eval_expr(c, p, cond_cap);
      return out;
    }
    case K::Product: {
      Matrix out = eval_expr(e.children().front(), p, cond_cap);
      for (std::size_t k = 1; k < e.children().size(); ++k) out = out * eval_expr(e.children()[k], p, cond_cap);
      return out;
    }
    case K::Inverse:
      return invert_checked(eval_expr(e.arg(), p, cond_cap), e.arg(), cond_cap);
    case K::Adjoint:
      return eval_expr(e.arg(), p, cond_cap).adjoint();
  }
  return {};
}

Matrix eval_expr(const MatRatExpr& e, const ExtendedPoint& p, double cond_cap) {
  const int n = p.n();
  Matrix out(e.rows() * n, e.cols() * n);
  for (int i = 0; i < e.rows(); ++i)
    for (int j = 0; j < e.cols(); ++j) out.block(i * n, j * n, n, n) = eval_expr(e.at(i, j), p, cond_cap);
  return out;
}

// ---------------------------------------------------------------- domains

DomainSpec DomainSpec::poly_list(std::vector<MatPoly> polys, int arity) {
  int inferred = 0;
  for (const MatPoly& p : polys) {
    if (!p.is_self_adjoint(1e-12)) throw PreconditionError("domain generator is not self-adjoint: " + p.str());
    if (p.max_u_index() > 0) throw PreconditionError("domain generators may only use x letters");
    inferred = std::max(inferred, p.max_x_index());
  }
  if (arity == 0) arity = inferred;
  if (arity < inferred) throw ShapeError("domain arity smaller than the letters used");
  return DomainSpec(std::move(polys), arity);
}

DomainSpec DomainSpec::pencil(LinearPencil pencil) {
  const int arity = pencil.arity();
  return DomainSpec(std::move(pencil), arity);
}

DomainReport in_domain(const DomainSpec& d, const MatrixPoint& x) {
  if (x.arity() != d.arity()) throw ShapeError("in_domain: arity mismatch");
  double margin = std::numeric_limits<double>::infinity();
  if (d.is_pencil()) {
    margin = min_eigenvalue(pencil_eval(d.pencil_value(), x));
  } else {
    for (const MatPoly& p : d.polys()) margin = std::min(margin, min_eigenvalue(eval_poly(p, ExtendedPoint(x))));
  }
  return {margin >= -d.psd_tolerance, margin};
}

std::vector<double> coordinate_bounds(const DomainSpec& d) {
  std::vector<double> bounds(static_cast<std::size_t>(d.arity()), std::numeric_limits<double>::infinity());
  if (d.is_pencil()) {
    // extent of {t : A0 + t Ai >= 0} along each axis, for monic pencils
    for (int i = 0; i < d.arity(); ++i) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(d.pencil_value().ai()[static_cast<std::size_t>(i)],
                                               Eigen::EigenvaluesOnly);
      const double lmax = es.eigenvalues().maxCoeff();
      const double lmin = es.eigenvalues().minCoeff();
      double b = 0.0;
      if (lmax > 1e-12) b = std::max(b, 1.0 / lmax);
      if (lmin < -1e-12) b = std::max(b, -1.0 / lmin);
      if (lmax <= 1e-12 || lmin >= -1e-12) b = std::numeric_limits<double>::infinity();
      bounds[static_cast<std::size_t>(i)] = b;
    }
  } else {
    for (const MatPoly& p : d.polys())
      for (int i = 1; i <= d.arity(); ++i)
        if (auto c = ball_constant(p, Letter::x(i)))
          bounds[static_cast<std::size_t>(i - 1)] = std::min(bounds[static_cast<std::size_t>(i - 1)], std::sqrt(*c));
  }
  for (double b : bounds)
    if (!std::isfinite(b)) throw PreconditionError("domain is not bounded in every coordinate");
  return bounds;
}

namespace {

/// Hermitian matrix with Haar eigenbasis and eigenvalues in [-b, b]; a share of
/// eigenvalues sits exactly at -b, 0 or b so extremal points get sampled.
Matrix bounded_hermitian(Rng& rng, int n, double b) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RealVector lambda(n);
  for (int k = 0; k < n; ++k) {
    const double r = unit(rng);
    if (r < 0.15)
      lambda(k) = -b;
    else if (r < 0.30)
      lambda(k) = b;
    else if (r < 0.40)
      lambda(k) = 0.0;
    else
      lambda(k) = b * (2.0 * unit(rng) - 1.0);
  }
  const Matrix q = random_unitary(rng, n);
  return hermitian_part(q * lambda.cast<Complex>().asDiagonal() * q.adjoint());
}

}  // namespace

std::vector<MatrixPoint> sample_domain(const DomainSpec& d, int n, int count, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("sample size must be positive");
  const std::vector<double> bounds = coordinate_bounds(d);
  std::vector<MatrixPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  int rejections = 0;
  for (int s = 0; s < count; ++s) {
    Rng rng = derived_rng(seed, static_cast<std::uint64_t>(s));
    for (;;) {
      MatrixPoint x{n, {}};
      for (double b : bounds) x.X.push_back(bounded_hermitian(rng, n, b));
      if (in_domain(d, x).inside) {
        out.push_back(std::move(x));
        break;
      }
      if (++rejections >= kMaxRejections)
        throw SamplingExhausted("sample_domain: too many rejections");
    }
  }
  return out;
}

// ---------------------------------------------------------------- equivalence

EquivalenceVerdict test_equivalence(const MatRatExpr& a, const MatRatExpr& b, const std::vector<int>& sizes,
                                    int trials, double tol, std::uint64_t seed) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("test_equivalence: shape mismatch");
  const int d = std::max(a.max_x_index(), b.max_x_index());
  const int k = std::max(a.max_u_index(), b.max_u_index());
  EquivalenceVerdict verdict;
  for (int n : sizes) {
    for (int t = 0; t < trials; ++t) {
      Rng rng = derived_rng(seed, static_cast<std::uint64_t>(n) * 1000003u + static_cast<std::uint64_t>(t));
      ExtendedPoint p(MatrixPoint{n, {}});
      for (int i = 0; i < d; ++i) p.base.X.push_back(random_hermitian(rng, n));
      for (int j = 0; j < k; ++j) p.U.push_back(random_gaussian(rng, n, n));
      Matrix ea;
      Matrix eb;
      try {
        ea = eval_expr(a, p);
        eb = eval_expr(b, p);
      } catch (const NotInDomain&) {
        ++verdict.skipped;
        continue;
      }
      ++verdict.evaluated;
      const double scale = 1.0 + std::max(ea.norm(), eb.norm());
      const double dev = (ea - eb).norm() / scale;
      verdict.max_deviation = std::max(verdict.max_deviation, dev);
      if (dev > tol) {
        ++verdict.distinguishing_trials;
        if (!verdict.witness) {
          verdict.witness = p;
          verdict.witness_deviation = dev;
        }
      }
    }
  }
  if (verdict.evaluated == 0) throw NoCommonPoints("no sampled point lies in both domains");
  verdict.distinguished = verdict.distinguishing_trials > 0;
  return verdict;
}

// ---------------------------------------------------------------- Z_r sampling

ExtendedPoint inverse_type_point(const MatrixPoint& x, const std::vector<RatExpr>& g_list, double cond_cap) {
  ExtendedPoint p(x);
  for (const RatExpr& g : g_list) {
    const Matrix gv = eval_expr(g, p, cond_cap);
    p.U.push_back(invert_checked(gv, g, cond_cap));
  }
  return p;
}

double relation_defect(const std::vector<Relation>& relations, const ExtendedPoint& p, const Vector& v) {
  const double vn = v.norm();
  double worst = 0.0;
  const int n = p.n();
  const auto block = v.size() / n;
  for (const Relation& r : relations) {
    const Matrix m = eval_poly(r.m, p);
    const Matrix full = kron(Matrix::Identity(block, block), m);
    worst = std::max(worst, (full * v).norm() / vn);
  }
  return worst;
}

namespace {

Vector random_unit_vector(Rng& rng, int len) {
  Vector v = random_gaussian(rng, len, 1);
  return v / v.norm();
}

std::optional<ZSample> kernel_sample(const std::vector<Relation>& relations, const MatrixPoint& x,
                                     const std::vector<RatExpr>& g_list, int block, Rng& rng) {
  const int n = x.n;
  const Vector v0 = random_unit_vector(rng, n * block);
  // columns of V are the n-blocks of v0
  Matrix vmat(n, block);
  for (int c = 0; c < block; ++c) vmat.col(c) = v0.segment(c * n, n);

  ExtendedPoint p(x);
  bool perturbed = false;
  for (std::size_t j = 0; j < g_list.size(); ++j) {
    const Matrix gv = eval_expr(g_list[j], p);
    Matrix exact;
    try {
      exact = invert_checked(gv, g_list[j], kDefaultCondCap);
    } catch (const NotInDomain&) {
      return std::nullopt;
    }
    ExtendedPoint probe = p;
    probe.U.push_back(exact);
    for (std::size_t rest = j + 1; rest < g_list.size(); ++rest) probe.U.push_back(Matrix::Identity(n, n));
    // span of b(X,U) v over the relations attached to u_{j+1}
    std::vector<Vector> span;
    for (const Relation& r : relations) {
      if (r.j != static_cast<int>(j) + 1) continue;
      const Matrix bm = eval_poly(r.b, probe);
      const Matrix bv = bm * vmat;
      for (int c = 0; c < block; ++c) span.push_back(bv.col(c));
    }
    Matrix proj = Matrix::Zero(n, n);
    if (!span.empty()) {
      Matrix s(n, static_cast<Eigen::Index>(span.size()));
      for (std::size_t c = 0; c < span.size(); ++c) s.col(static_cast<Eigen::Index>(c)) = span[c];
      Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeThinU);
      const auto& sv = svd.singularValues();
      for (Eigen::Index c = 0; c < sv.size(); ++c)
        if (sv(c) > 1e-12 * std::max(1.0, sv(0))) proj += svd.matrixU().col(c) * svd.matrixU().col(c).adjoint();
    }
    const Matrix complement = Matrix::Identity(n, n) - proj;
    Matrix delta = random_gaussian(rng, n, n) * complement;
    if (delta.norm() > 1e-8) {
      delta *= spectral_norm(exact) / spectral_norm(delta);
      perturbed = true;
    } else {
      delta.setZero();
    }
    p.U.push_back(exact + delta);
  }
  if (!perturbed) return std::nullopt;

  // numerical common kernel of the stacked relations
  std::vector<Matrix> stacked;
  Eigen::Index total_rows = 0;
  for (const Relation& r : relations) {
    stacked.push_back(kron(Matrix::Identity(block, block), eval_poly(r.m, p)));
    total_rows += stacked.back().rows();
  }
  if (stacked.empty()) return std::nullopt;
  Matrix big(total_rows, n * block);
  Eigen::Index row = 0;
  for (const Matrix& m : stacked) {
    big.block(row, 0, m.rows(), m.cols()) = m;
    row += m.rows();
  }
  Eigen::JacobiSVD<Matrix> svd(big, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index last = std::min<Eigen::Index>(sv.size(), big.cols()) - 1;
  const double smallest = big.rows() < big.cols() ? 0.0 : sv(last);
  if (smallest > 1e-10) return std::nullopt;
  const Eigen::Index kernel_col = big.rows() < big.cols() ? big.cols() - 1 : last;
  Vector v = svd.matrixV().col(kernel_col);
  return ZSample{std::move(p), std::move(v), false};
}

}  // namespace

std::vector<ZSample> sample_Zr(const std::vector<Relation>& relations, const LinearPencil& pencil,
                               const std::vector<RatExpr>& g_list, int n, int count, std::uint64_t seed,
                               ZFamily family, int block) {
  const DomainSpec dom = DomainSpec::pencil(pencil);
  std::vector<ZSample> out;
  int attempts = 0;
  std::uint64_t batch = 0;
  while (static_cast<int>(out.size()) < count) {
    const std::vector<MatrixPoint> xs = sample_domain(dom, n, count, seed + 7919u * batch++);
    for (std::size_t s = 0; s < xs.size() && static_cast<int>(out.size()) < count; ++s) {
      if (++attempts > kMaxRejections) throw SamplingExhausted("sample_Zr: no admissible sample found");
      Rng rng = derived_rng(seed ^ 0x5a5a5a5aULL, static_cast<std::uint64_t>(attempts));
      std::optional<ZSample> z;
      if (family == ZFamily::InverseType) {
        try {
          ExtendedPoint p = inverse_type_point(xs[s], g_list);
          z = ZSample{std::move(p), random_unit_vector(rng, n * block), true};
        } catch (const NotInDomain&) {
          continue;
        }
      } else {
        z = kernel_sample(relations, xs[s], g_list, block, rng);
      }
      if (!z) continue;
      if (relation_defect(relations, z->point, z->v) > 1e-9) continue;
      out.push_back(std::move(*z));
    }
    if (family == ZFamily::Kernel && out.empty() && attempts >= 20 * count)
      throw SamplingExhausted("sample_Zr: no kernel points found");
  }
  return out;
}

}  // namespace ncert
