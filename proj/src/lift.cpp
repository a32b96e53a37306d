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


#include "ncert/lift.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ncert/linalg.hpp"

namespace ncert {

ArchimedeanVerdict archimedean_check(const std::vector<MatPoly>& P, int arity) {
  ArchimedeanVerdict v;
  int d = arity;
  for (const MatPoly& p : P) {
    d = std::max(d, p.max_x_index());
    if (p.max_u_index() > 0) v.problems.push_back("generator " + p.str() + " contains u letters");
    if (p.rows() != p.cols() || !p.is_self_adjoint(1e-12))
      v.problems.push_back("generator " + p.str() + " is not self-adjoint");
  }
  v.constants.assign(static_cast<std::size_t>(d), std::nullopt);
  for (int i = 1; i <= d; ++i) {
    for (const MatPoly& p : P) {
      if (auto c = ball_constant(p, Letter::x(i), 1e-12)) {
        v.constants[static_cast<std::size_t>(i - 1)] = *c;
        break;
      }
    }
    if (!v.constants[static_cast<std::size_t>(i - 1)])
      v.problems.push_back("no generator of the form C - x" + std::to_string(i) + "^2");
  }
  v.pass = v.problems.empty();
  return v;
}

// ---------------------------------------------------------------- lifting

namespace {

Bindings u_bindings(const std::vector<RatExpr>& gs) {
  Bindings b;
  for (std::size_t j = 0; j < gs.size(); ++j) b.emplace(RatExpr::inverse(gs[j]), RatExpr::u(static_cast<int>(j) + 1));
  return b;
}

}  // namespace

Bindings LiftResult::back_substitution() const {
  Bindings b;
  for (std::size_t j = 0; j < g_original.size(); ++j) {
    const int idx = static_cast<int>(j) + 1;
    const RatExpr inv = RatExpr::inverse(g_original[j]);
    b.emplace(RatExpr::u(idx), inv);
    b.emplace(RatExpr::ustar(idx), RatExpr::adjoint(inv));
  }
  return b;
}

LiftResult build_hat(const MatRatExpr& q) {
  LiftResult out{q, MatPoly(q.rows(), q.cols()), MatPoly(q.rows(), q.cols()), {}, {}, 0};
  out.g_original = inverse_subterms(q);
  const Bindings to_u = u_bindings(out.g_original);
  for (const RatExpr& g : out.g_original) out.g_list.push_back(substitute(g, to_u));
  out.u_arity = static_cast<int>(out.g_list.size());
  out.hat_expr = substitute(q, to_u);
  out.hat_q = expand(out.hat_expr);
  if (q.is_square()) out.hat_q_sa = (out.hat_q + out.hat_q.adjoint()) * Complex(0.5);
  return out;
}

DEstimate estimate_D(const std::vector<RatExpr>& g_list, int j, const DomainSpec& dom,
                     const std::vector<int>& sizes, int samples, std::uint64_t seed, double safety) {
  if (j < 1 || j > static_cast<int>(g_list.size())) throw PreconditionError("estimate_D: index out of range");
  const std::vector<RatExpr> earlier(g_list.begin(), g_list.begin() + (j - 1));
  const RatExpr inv = RatExpr::inverse(g_list[static_cast<std::size_t>(j - 1)]);
  DEstimate est;
  bool any = false;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    for (const MatrixPoint& x : sample_domain(dom, sizes[s], samples, seed + 104729u * s)) {
      const ExtendedPoint p = inverse_type_point(x, earlier);
      const double nrm = spectral_norm(eval_expr(inv, p));
      if (!any || nrm * nrm > est.sup) {
        est.sup = nrm * nrm;
        est.argmax = x;
        any = true;
      }
    }
  }
  est.D = safety * est.sup;
  return est;
}

std::string OElement::label() const {
  const std::string s = sign > 0 ? "+" : "-";
  switch (tag) {
    case OTag::FromP:
      return "FromP(" + std::to_string(index) + ")";
    case OTag::RelationLeft:
      return "RelationLeft(" + std::to_string(index) + "," + s + ")";
    case OTag::RelationRight:
      return "RelationRight(" + std::to_string(index) + "," + s + ")";
    case OTag::NormCap:
      return "NormCap(" + std::to_string(index) + ")";
  }
  return "";
}

std::vector<MatPoly> AugmentedSet::polys() const {
  std::vector<MatPoly> out;
  for (const auto& o : O) out.push_back(o.poly);
  return out;
}

AugmentedSet build_O(const std::vector<MatPoly>& P, const LiftResult& lift, const std::vector<double>& D) {
  if (D.size() != lift.g_list.size()) throw PreconditionError("build_O: one D per inverse is required");
  AugmentedSet out;
  out.D = D;
  for (std::size_t i = 0; i < P.size(); ++i) out.O.push_back({P[i], OTag::FromP, static_cast<int>(i) + 1, 1});
  const MatPoly one = MatPoly::identity(1);
  for (std::size_t k = 0; k < lift.g_list.size(); ++k) {
    const int j = static_cast<int>(k) + 1;
    const MatPoly g = expand(MatRatExpr(lift.g_list[k]));
    const MatPoly u = NCPoly::letter(Letter::u(j));
    const MatPoly a = one - u * g;
    const MatPoly b = one - g * u;
    const MatPoly left = a.adjoint() * a;
    const MatPoly right = b.adjoint() * b;
    out.O.push_back({left, OTag::RelationLeft, j, 1});
    out.O.push_back({-left, OTag::RelationLeft, j, -1});
    out.O.push_back({right, OTag::RelationRight, j, 1});
    out.O.push_back({-right, OTag::RelationRight, j, -1});
    out.O.push_back({one * Complex(D[k]) - u.adjoint() * u, OTag::NormCap, j, 1});
  }
  return out;
}

// ---------------------------------------------------------------- closure

std::vector<RatExpr> closure_rules(const std::vector<RatExpr>& elements) {
  using K = RatExpr::Kind;
  std::vector<RatExpr> out;
  for (const RatExpr& e : elements) {
    // every element is e*1, so 1 is always a suffix
    out.push_back(RatExpr::scalar(1.0));
    switch (e.kind()) {
      case K::Product: {
        const auto& f = e.children();
        for (std::size_t i = 1; i < f.size(); ++i)
          out.push_back(RatExpr::product_of(std::vector<RatExpr>(f.begin() + static_cast<std::ptrdiff_t>(i), f.end())));
        if (f[0].kind() == K::Sum) {
          for (const RatExpr& s : f[0].children()) {
            std::vector<RatExpr> g{s};
            g.insert(g.end(), f.begin() + 1, f.end());
            out.push_back(RatExpr::product(std::move(g)));
          }
        }
        if (f[0].kind() == K::Inverse) {
          std::vector<RatExpr> g{f[0].arg()};
          g.insert(g.end(), f.begin(), f.end());
          out.push_back(RatExpr::product(std::move(g)));
        }
        break;
      }
      case K::Sum:
        for (const RatExpr& s : e.children()) out.push_back(s);
        break;
      case K::Inverse:
        out.push_back(RatExpr::product({e.arg(), e}));
        break;
      default:
        break;
    }
  }
  return out;
}

ClosureSet closure_Cr(const MatRatExpr& r, std::size_t max_size) {
  ClosureSet c;
  std::set<RatExpr> seen;
  std::vector<RatExpr> frontier;
  auto add = [&](const RatExpr& e) {
    if (!seen.insert(e).second) return;
    if (seen.size() > max_size) throw ClosureOverflow("closure exceeds " + std::to_string(max_size) + " elements");
    c.Cr.push_back(e);
    frontier.push_back(e);
  };
  for (const RatExpr& e : r.entries()) add(e);
  while (!frontier.empty()) {
    const std::vector<RatExpr> batch = std::move(frontier);
    frontier.clear();
    for (const RatExpr& e : closure_rules(batch)) add(e);
  }
  c.g_original = inverse_subterms(r);
  const Bindings to_u = u_bindings(c.g_original);
  for (const RatExpr& g : c.g_original) c.g_list.push_back(substitute(g, to_u));
  for (const RatExpr& e : c.Cr) c.Ctilde.push_back(substitute(e, to_u));
  return c;
}

std::vector<Relation> build_Mr(const ClosureSet& c) {
  std::vector<Relation> out;
  std::set<RatExpr> done;
  for (const RatExpr& e : c.Ctilde) {
    if (e.kind() != RatExpr::Kind::Product) continue;
    const auto& f = e.children();
    for (std::size_t k = 0; k < c.g_list.size(); ++k) {
      const int j = static_cast<int>(k) + 1;
      if (!(f[0] == c.g_list[k]) || !(f[1] == RatExpr::u(j))) continue;
      const RatExpr b = RatExpr::product_of(std::vector<RatExpr>(f.begin() + 2, f.end()));
      if (!done.insert(e).second) continue;
      const MatPoly bp = expand(MatRatExpr(b));
      const MatPoly gp = expand(MatRatExpr(c.g_list[k]));
      const MatPoly m = gp * MatPoly(NCPoly::letter(Letter::u(j))) * bp - bp;
      if (!m.is_zero()) out.push_back({j, bp, m});
    }
  }
  return out;
}

}  // namespace ncert
