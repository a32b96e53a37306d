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


#include "ncert/sos.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ncert/linalg.hpp"

namespace ncert {

namespace {

// coef * G_block[r][c] (block >= 0) or coef * f[free] (block < 0)
struct Term {
  int block;
  int r;
  int c;
  int free;
  Complex coef;
};

bool is_zero(Complex c) { return c.real() == 0.0 && c.imag() == 0.0; }

MatPoly widen(const MatPoly& g, int m) {
  if (g.cols() == m) return g;
  if (g.rows() != 1 || g.cols() != 1) throw ShapeError("ideal generator must be scalar or have " + std::to_string(m) + " columns");
  MatPoly out(m, m);
  for (const auto& [w, c] : g.terms()) out.add_term(w, c(0, 0) * Matrix::Identity(m, m));
  return out;
}

class Accumulator {
 public:
  explicit Accumulator(int m) : m_(m) {}

  // Terms are kept only for one word of each {w, w^*} pair and, for w = w^*,
  // for the upper triangle; the rest are conjugates.
  std::vector<Term>* slot(const Word& w, int alpha, int beta) {
    auto it = acc_.find(w);
    if (it == acc_.end()) {
      const Word wa = w.adjoint();
      if (wa < w) return nullptr;
      it = acc_.emplace(w, Entry{wa == w, std::vector<std::vector<Term>>(static_cast<std::size_t>(m_ * m_))}).first;
    }
    if (it->second.self_adjoint && alpha > beta) return nullptr;
    return &it->second.terms[static_cast<std::size_t>(alpha * m_ + beta)];
  }

  struct Entry {
    bool self_adjoint;
    std::vector<std::vector<Term>> terms;
  };
  const std::map<Word, Entry>& entries() const { return acc_; }

 private:
  int m_;
  std::map<Word, Entry> acc_;
};

int floor_half(int d) { return d / 2; }

}  // namespace

GramProblem build_gram_problem(const MatPoly& q, const std::vector<MatPoly>& gens,
                               const std::vector<MatPoly>& ideal_gens, int delta) {
  if (q.rows() != q.cols()) throw ShapeError("target must be square");
  if (!q.is_self_adjoint(1e-12)) throw PreconditionError("target must be self-adjoint");
  if (delta < 0) throw PreconditionError("delta must be nonnegative");
  GramProblem p;
  p.target = q;
  p.m = q.rows();
  p.delta = delta;
  p.gens = gens;
  const int m = p.m;

  int dx = q.max_x_index();
  int du = q.max_u_index();
  for (const MatPoly& g : gens) {
    if (g.rows() != g.cols()) throw ShapeError("generators must be square");
    dx = std::max(dx, g.max_x_index());
    du = std::max(du, g.max_u_index());
  }
  for (const MatPoly& g : ideal_gens) {
    p.ideal_gens.push_back(widen(g, m));
    dx = std::max(dx, g.max_x_index());
    du = std::max(du, g.max_u_index());
  }
  p.alphabet = make_alphabet(dx, du);

  p.blocks.push_back({-1, 1, words_up_to(p.alphabet, delta)});
  for (std::size_t j = 0; j < gens.size(); ++j) {
    const int dj = delta - floor_half(gens[j].degree());
    if (dj >= 0) p.blocks.push_back({static_cast<int>(j), gens[j].rows(), words_up_to(p.alphabet, dj)});
  }
  for (const GramBlock& b : p.blocks) p.sdp.block_dims.push_back(static_cast<int>(b.basis.size()) * b.k * m);

  int num_free = 0;
  for (std::size_t k = 0; k < p.ideal_gens.size(); ++k) {
    const MatPoly& g = p.ideal_gens[k];
    const int dk = 2 * delta + 1 - g.degree();
    if (dk < 0 || g.is_zero()) continue;
    IdealBlock ib{static_cast<int>(k), g, words_up_to(p.alphabet, dk), num_free};
    num_free += static_cast<int>(ib.basis.size()) * g.rows() * m * 2;
    p.ideals.push_back(std::move(ib));
  }
  p.sdp.num_free = num_free;

  Accumulator acc(m);
  const MatPoly one = MatPoly::identity(1);
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const GramBlock& blk = p.blocks[bi];
    const MatPoly& gen = blk.gen < 0 ? one : gens[static_cast<std::size_t>(blk.gen)];
    const int k = blk.k;
    const auto nb = static_cast<int>(blk.basis.size());
    for (int a = 0; a < nb; ++a) {
      const Word wa = blk.basis[static_cast<std::size_t>(a)].adjoint();
      for (const auto& [v, pv] : gen.terms()) {
        const Word left = wa * v;
        for (int b = 0; b < nb; ++b) {
          const Word w = left * blk.basis[static_cast<std::size_t>(b)];
          for (int al = 0; al < m; ++al) {
            for (int be = 0; be < m; ++be) {
              std::vector<Term>* s = acc.slot(w, al, be);
              if (!s) continue;
              for (int l = 0; l < k; ++l)
                for (int l2 = 0; l2 < k; ++l2)
                  if (!is_zero(pv(l, l2)))
                    s->push_back({static_cast<int>(bi), (a * k + l) * m + al, (b * k + l2) * m + be, -1, pv(l, l2)});
            }
          }
        }
      }
    }
  }
  const Complex I(0.0, 1.0);
  for (const IdealBlock& ib : p.ideals) {
    const int pr = ib.gen.rows();
    const auto nb = static_cast<int>(ib.basis.size());
    auto xidx = [&](int a, int l, int col) { return ib.free_offset + ((a * pr + l) * m + col) * 2; };
    for (int a = 0; a < nb; ++a) {
      const Word& wa = ib.basis[static_cast<std::size_t>(a)];
      for (const auto& [v, mv] : ib.gen.terms()) {
        // iota^* m: word wa^* v, entry sum_l conj(J_a[l][al]) M_v[l][be]
        const Word w1 = wa.adjoint() * v;
        // m^* iota: word v^* wa, entry sum_l conj(M_v[l][al]) J_a[l][be]
        const Word w2 = v.adjoint() * wa;
        for (int al = 0; al < m; ++al) {
          for (int be = 0; be < m; ++be) {
            if (std::vector<Term>* s = acc.slot(w1, al, be)) {
              for (int l = 0; l < pr; ++l) {
                const Complex c = mv(l, be);
                if (is_zero(c)) continue;
                s->push_back({-1, 0, 0, xidx(a, l, al), c});
                s->push_back({-1, 0, 0, xidx(a, l, al) + 1, -I * c});
              }
            }
            if (std::vector<Term>* s = acc.slot(w2, al, be)) {
              for (int l = 0; l < pr; ++l) {
                const Complex c = std::conj(mv(l, al));
                if (is_zero(c)) continue;
                s->push_back({-1, 0, 0, xidx(a, l, be), c});
                s->push_back({-1, 0, 0, xidx(a, l, be) + 1, I * c});
              }
            }
          }
        }
      }
    }
  }

  // every word of q must be reachable
  for (const auto& [w, c] : q.terms()) {
    if (w.adjoint() < w) continue;
    for (int al = 0; al < m; ++al)
      for (int be = 0; be < m; ++be) {
        if (is_zero(c(al, be))) continue;
        const auto it = acc.entries().find(w);
        const bool empty = it == acc.entries().end() ||
                           (!(it->second.self_adjoint && al > be) &&
                            it->second.terms[static_cast<std::size_t>(al * m + be)].empty());
        if (empty)
          throw DegreeTooSmall("word " + w.str() + " of the target is not reachable at delta " + std::to_string(delta));
      }
  }

  for (const auto& [w, entry] : acc.entries()) {
    const Matrix qc = q.coeff(w);
    for (int al = 0; al < m; ++al) {
      for (int be = 0; be < m; ++be) {
        if (entry.self_adjoint && al > be) continue;
        const auto& terms = entry.terms[static_cast<std::size_t>(al * m + be)];
        if (terms.empty()) continue;
        for (int part = 0; part < 2; ++part) {
          const bool imag = part == 1;
          if (imag && entry.self_adjoint && al == be) continue;
          SdpRow row;
          for (const Term& t : terms) {
            if (t.block >= 0) {
              row.entries.push_back({t.block, t.r, t.c, imag ? -I * t.coef : t.coef});
            } else {
              const double v = imag ? t.coef.imag() : t.coef.real();
              if (v != 0.0) row.free.emplace_back(t.free, v);
            }
          }
          if (row.entries.empty() && row.free.empty()) {
            const double rhs = imag ? qc(al, be).imag() : qc(al, be).real();
            if (rhs != 0.0)
              throw DegreeTooSmall("word " + w.str() + " of the target is not reachable at delta " + std::to_string(delta));
            continue;
          }
          row.rhs = imag ? qc(al, be).imag() : qc(al, be).real();
          p.sdp.rows.push_back(std::move(row));
          p.rows.push_back({w, al, be, imag});
        }
      }
    }
  }
  return p;
}

MatPoly gram_image(const GramProblem& p, const std::vector<Matrix>& blocks, const RealVector& free) {
  const int m = p.m;
  std::map<Word, Matrix> coef;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const GramRow& gr = p.rows[i];
    const SdpRow& row = p.sdp.rows[i];
    double v = 0.0;
    for (const SdpEntry& e : row.entries) v += (e.coef * blocks[static_cast<std::size_t>(e.block)](e.row, e.col)).real();
    for (const auto& [idx, c] : row.free) v += c * free(idx);
    auto it = coef.try_emplace(gr.word, Matrix::Zero(m, m)).first;
    if (gr.imag)
      it->second(gr.alpha, gr.beta) += Complex(0.0, v);
    else
      it->second(gr.alpha, gr.beta) += v;
  }
  MatPoly out(m, m);
  for (auto& [w, c] : coef) {
    const Word wa = w.adjoint();
    if (wa == w) {
      for (int al = 0; al < m; ++al)
        for (int be = 0; be < al; ++be) c(al, be) = std::conj(c(be, al));
      out.add_term(w, c);
    } else {
      out.add_term(w, c);
      out.add_term(wa, c.adjoint());
    }
  }
  return out;
}

GramSolution solve_gram(const GramProblem& p, double tol) {
  SdpOptions opt;
  opt.tol = tol;
  const SdpResult r = solve_sdp(p.sdp, opt);
  return {r.status == SdpStatus::Feasible, r.blocks, r.free, r.margin, r.residual};
}

Certificate extract_certificate(const GramProblem& p, const GramSolution& s, double rank_tol) {
  const int m = p.m;
  Certificate cert;
  cert.delta = p.delta;
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const GramBlock& blk = p.blocks[bi];
    const Matrix h = hermitian_part(s.blocks[bi]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e) {
      const double lam = es.eigenvalues()(e);
      if (!(lam > rank_tol)) continue;
      const Vector v = std::sqrt(lam) * es.eigenvectors().col(e);
      MatPoly f(blk.k, m);
      for (std::size_t a = 0; a < blk.basis.size(); ++a) {
        Matrix ra(blk.k, m);
        for (int l = 0; l < blk.k; ++l)
          for (int al = 0; al < m; ++al)
            ra(l, al) = std::conj(v((static_cast<Eigen::Index>(a) * blk.k + l) * m + al));
        f.add_term(blk.basis[a], ra);
      }
      if (f.is_zero()) continue;
      if (blk.gen < 0)
        cert.sos.push_back(std::move(f));
      else
        cert.weighted.push_back({blk.gen, std::move(f)});
    }
  }
  for (const IdealBlock& ib : p.ideals) {
    const int pr = ib.gen.rows();
    MatPoly iota(pr, m);
    for (std::size_t a = 0; a < ib.basis.size(); ++a) {
      Matrix ja(pr, m);
      for (int l = 0; l < pr; ++l)
        for (int al = 0; al < m; ++al) {
          const int x = ib.free_offset + ((static_cast<int>(a) * pr + l) * m + al) * 2;
          ja(l, al) = Complex(s.free(x), s.free(x + 1));
        }
      iota.add_term(ib.basis[a], ja);
    }
    if (!iota.is_zero()) cert.ideal.push_back({ib.index, ib.gen, std::move(iota)});
  }
  cert.residual = verify_certificate(p.target, cert, p.gens);
  return cert;
}

MatPoly certificate_expansion(const Certificate& c, const std::vector<MatPoly>& gens, int size) {
  MatPoly out(size, size);
  for (const MatPoly& s : c.sos) out = out + s.adjoint() * s;
  for (const WeightedFactor& w : c.weighted) out = out + w.r.adjoint() * gens.at(static_cast<std::size_t>(w.gen)) * w.r;
  for (const IdealFactor& f : c.ideal) out = out + f.iota.adjoint() * f.m + f.m.adjoint() * f.iota;
  return out;
}

double verify_certificate(const MatPoly& q, const Certificate& c, const std::vector<MatPoly>& gens) {
  return certificate_expansion(c, gens, q.rows()).distance(q);
}

PositivityReport check_positivity(const MatRatExpr& e, const DomainSpec& dom, const std::vector<int>& sizes, int count,
                                  std::uint64_t seed) {
  PositivityReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    for (const MatrixPoint& x : sample_domain(dom, sizes[s], count, seed + 7919u * s)) {
      const double lam = min_eigenvalue(eval_expr(e, ExtendedPoint(x)));
      ++rep.evaluated;
      if (lam < rep.min_eigenvalue) {
        rep.min_eigenvalue = lam;
        rep.witness = x;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------- pipelines

namespace {

double factor_weight(const MatPoly& r) {
  double w = 0.0;
  for (const auto& [word, c] : r.terms()) w += c.squaredNorm();
  return w;
}

// retry at the same delta without generators that carry almost no weight
Certificate drop_idle_generators(const MatPoly& q, const std::vector<MatPoly>& gens,
                                 const std::vector<MatPoly>& ideal_gens, Certificate cert, const CertifyOptions& opt) {
  if (cert.weighted.empty()) return cert;
  std::vector<double> weight(gens.size(), 0.0);
  double total = 0.0;
  for (const MatPoly& s : cert.sos) total += factor_weight(s);
  for (const WeightedFactor& w : cert.weighted) {
    const double v = factor_weight(w.r);
    weight[static_cast<std::size_t>(w.gen)] += v;
    total += v;
  }
  std::vector<int> keep;
  for (std::size_t j = 0; j < gens.size(); ++j)
    if (weight[j] > 1e-3 * total) keep.push_back(static_cast<int>(j));
  bool idle = false;
  for (const WeightedFactor& w : cert.weighted)
    if (std::find(keep.begin(), keep.end(), w.gen) == keep.end()) idle = true;
  if (!idle) return cert;
  std::vector<MatPoly> sub;
  for (int j : keep) sub.push_back(gens[static_cast<std::size_t>(j)]);
  try {
    const GramProblem prob = build_gram_problem(q, sub, ideal_gens, cert.delta);
    const GramSolution sol = solve_gram(prob, opt.sdp_tol);
    if (!sol.feasible) return cert;
    Certificate c = extract_certificate(prob, sol, opt.rank_tol);
    for (WeightedFactor& w : c.weighted) w.gen = keep[static_cast<std::size_t>(w.gen)];
    c.residual = verify_certificate(q, c, gens);
    if (c.residual <= std::max(cert.residual, opt.accept_residual * 1e-2)) return c;
  } catch (const Error&) {
  }
  return cert;
}

}  // namespace

Certificate certify_with(const MatPoly& q, const std::vector<MatPoly>& gens, const std::vector<MatPoly>& ideal_gens,
                         int delta_max, const CertifyOptions& opt) {
  if (q.is_zero()) return Certificate{};
  std::vector<DeltaAttempt> attempts;
  const int start = (q.degree() + 1) / 2;
  for (int delta = start; delta <= delta_max; ++delta) {
    try {
      const GramProblem prob = build_gram_problem(q, gens, ideal_gens, delta);
      const GramSolution sol = solve_gram(prob, opt.sdp_tol);
      DeltaAttempt at{delta, sol.margin, sol.feasible ? "" : "infeasible"};
      if (sol.feasible) {
        Certificate cert = extract_certificate(prob, sol, opt.rank_tol);
        if (cert.residual <= opt.accept_residual) return drop_idle_generators(q, gens, ideal_gens, std::move(cert), opt);
        at.note = "residual " + format_double(cert.residual) + " after extraction";
      }
      attempts.push_back(std::move(at));
    } catch (const DegreeTooSmall& e) {
      attempts.push_back({delta, -std::numeric_limits<double>::infinity(), e.what()});
    } catch (const SolverStalled& e) {
      attempts.push_back({delta, std::numeric_limits<double>::quiet_NaN(), e.what()});
    }
  }
  throw NotCertified("no certificate found up to delta " + std::to_string(delta_max), delta_max, std::move(attempts),
                     std::nullopt);
}

namespace {

int poly_arity(const std::vector<MatPoly>& P, int at_least) {
  int d = at_least;
  for (const MatPoly& p : P) d = std::max(d, p.max_x_index());
  return d;
}

void require_archimedean(const std::vector<MatPoly>& P, int arity) {
  const ArchimedeanVerdict v = archimedean_check(P, arity);
  if (!v.pass) {
    std::string msg = "P is not Archimedean:";
    for (const auto& s : v.problems) msg += " " + s + ";";
    throw PreconditionError(msg);
  }
}

double rel_dev(const Matrix& a, const Matrix& b) { return (a - b).norm() / (1.0 + b.norm()); }

// Entrywise product of a 1x1 expression with a matrix of expressions.
MatRatExpr scale_left(const RatExpr& s, const MatRatExpr& m) {
  std::vector<RatExpr> out;
  for (const RatExpr& e : m.entries()) out.push_back(RatExpr::product({s, e}));
  return MatRatExpr(m.rows(), m.cols(), std::move(out));
}

// (k x 1) times (1 x m)
MatRatExpr outer(const MatRatExpr& col, const MatRatExpr& row) {
  std::vector<RatExpr> out;
  for (int i = 0; i < col.rows(); ++i)
    for (int j = 0; j < row.cols(); ++j) out.push_back(RatExpr::product({col.at(i, 0), row.at(0, j)}));
  return MatRatExpr(col.rows(), row.cols(), std::move(out));
}

std::vector<MatrixPoint> verification_points(const DomainSpec& dom, const CertifyOptions& opt, std::uint64_t salt) {
  std::vector<MatrixPoint> out;
  const int per = std::max(1, opt.verify_samples / static_cast<int>(std::max<std::size_t>(1, opt.sizes.size())));
  for (std::size_t s = 0; s < opt.sizes.size(); ++s) {
    auto xs = sample_domain(dom, opt.sizes[s], per, opt.seed + salt + 31u * s);
    out.insert(out.end(), xs.begin(), xs.end());
  }
  return out;
}

}  // namespace

Certificate certify_polynomial(const MatPoly& q, const std::vector<MatPoly>& P, int delta_max,
                               const CertifyOptions& opt) {
  if (q.max_u_index() > 0) throw PreconditionError("certify_polynomial: target contains u letters");
  if (q.rows() != q.cols() || !q.is_self_adjoint(1e-12)) throw PreconditionError("target must be self-adjoint");
  const int arity = poly_arity(P, q.max_x_index());
  require_archimedean(P, arity);
  try {
    Certificate c = certify_with(q, P, {}, delta_max, opt);
    c.pipeline = "polynomial";
    return c;
  } catch (const NotCertified& e) {
    const PositivityReport w =
        check_positivity(to_expr(q), DomainSpec::poly_list(P, arity), opt.sizes, opt.samples, opt.seed);
    throw NotCertified(e.what(), delta_max, e.attempts(), w);
  }
}

RationalCertificate certify_rational(const MatRatExpr& q, const std::vector<MatPoly>& P, int delta_max,
                                     const CertifyOptions& opt) {
  if (!q.is_square()) throw ShapeError("target must be square");
  if (q.max_u_index() > 0) throw PreconditionError("target must not contain u letters");
  const int arity = poly_arity(P, q.max_x_index());
  require_archimedean(P, arity);
  const DomainSpec dom = DomainSpec::poly_list(P, arity);

  RationalCertificate rc;
  const PositivityReport pos = check_positivity(q, dom, opt.sizes, opt.samples, opt.seed);
  rc.sampled_min = pos.min_eigenvalue;
  if (pos.min_eigenvalue < -opt.sdp_tol)
    throw NotCertified("target has a negative eigenvalue at a domain sample", delta_max, {}, pos);
  if (pos.min_eigenvalue < opt.flat_warning)
    rc.warnings.push_back("sampled minimum " + format_double(pos.min_eigenvalue) +
                          " is close to zero; the SDP may stall");
  if (pos.witness) {
    const Matrix v = eval_expr(q, ExtendedPoint(*pos.witness));
    if (hermitian_defect(v) > 1e-8 * (1.0 + v.norm())) throw PreconditionError("target is not self-adjoint");
  }

  rc.lift = build_hat(q);
  std::vector<double> D;
  for (int j = 1; j <= rc.lift.u_arity; ++j)
    D.push_back(estimate_D(rc.lift.g_list, j, dom, opt.sizes, opt.samples, opt.seed + 1000u * j, opt.safety).D);

  std::vector<DeltaAttempt> attempts;
  bool ok = false;
  const int doublings = rc.lift.u_arity == 0 ? 0 : opt.max_doublings;
  for (int t = 0; t <= doublings && !ok; ++t) {
    rc.O = build_O(P, rc.lift, D);
    try {
      rc.cert = certify_with(rc.lift.hat_q_sa, rc.O.polys(), {}, delta_max, opt);
      ok = true;
    } catch (const NotCertified& e) {
      for (DeltaAttempt a : e.attempts()) {
        if (!D.empty()) a.note += (a.note.empty() ? "" : "; ") + std::string("D1 = ") + format_double(D[0]);
        attempts.push_back(std::move(a));
      }
      for (double& d : D) d *= 2.0;
    }
  }
  if (!ok) throw NotCertified("no certificate over (x, u) up to delta " + std::to_string(delta_max), delta_max, attempts, pos);
  rc.cert.pipeline = "rational";

  const MatPoly expansion = certificate_expansion(rc.cert, rc.O.polys(), q.rows());
  for (const MatrixPoint& x : verification_points(dom, opt, 17)) {
    const ExtendedPoint p = inverse_type_point(x, rc.lift.g_list);
    rc.agreement = std::max(rc.agreement, rel_dev(eval_poly(expansion, p), eval_expr(q, ExtendedPoint(x))));
  }
  return rc;
}

AssembledCertificate assemble_rational_certificate(const RationalCertificate& rc, const std::vector<MatPoly>& P,
                                                   int delta_max, const CertifyOptions& opt) {
  AssembledCertificate out;
  const Bindings back = rc.lift.back_substitution();
  auto sub = [&](const MatPoly& f) { return substitute(to_expr(f), back); };
  const MatRatExpr q = substitute(rc.lift.hat_expr, back);
  const int arity = poly_arity(P, q.max_x_index());
  const DomainSpec dom = DomainSpec::poly_list(P, arity);

  std::vector<MatrixPoint> relation_points;
  for (int n : opt.sizes) {
    auto xs = sample_domain(dom, n, std::max(1, 20 / static_cast<int>(opt.sizes.size())), opt.seed + 23u * n);
    relation_points.insert(relation_points.end(), xs.begin(), xs.end());
  }

  // recursive certificates of D_j g_j^* g_j - 1, built on demand
  std::map<int, AssembledCertificate> caps;
  auto cap_certificate = [&](int j) -> const AssembledCertificate& {
    if (auto it = caps.find(j); it != caps.end()) return it->second;
    const RatExpr& g = rc.lift.g_original[static_cast<std::size_t>(j - 1)];
    const RatExpr target = RatExpr::sum(
        {RatExpr::product({RatExpr::scalar(rc.O.D[static_cast<std::size_t>(j - 1)]), adjoint_expr(g), g}),
         RatExpr::scalar(-1.0)});
    AssembledCertificate sub_cert;
    if (!target.has_inverse()) {
      const Certificate pc = certify_polynomial(expand(target), P, delta_max, opt);
      for (const MatPoly& s : pc.sos) sub_cert.sos.push_back(to_expr(s));
      for (const WeightedFactor& w : pc.weighted) sub_cert.weighted.emplace_back(w.gen, to_expr(w.r));
    } else {
      sub_cert = assemble_rational_certificate(certify_rational(target, P, delta_max, opt), P, delta_max, opt);
    }
    sub_cert.recursive_targets.insert(sub_cert.recursive_targets.begin(), print(target));
    return caps.emplace(j, std::move(sub_cert)).first->second;
  };

  for (const MatPoly& s : rc.cert.sos) out.sos.push_back(sub(s));
  for (const WeightedFactor& w : rc.cert.weighted) {
    const OElement& o = rc.O.O.at(static_cast<std::size_t>(w.gen));
    switch (o.tag) {
      case OTag::FromP:
        out.weighted.emplace_back(o.index - 1, sub(w.r));
        break;
      case OTag::RelationLeft:
      case OTag::RelationRight: {
        const MatPoly term = w.r.adjoint() * o.poly * w.r;
        for (const MatrixPoint& x : relation_points) {
          const ExtendedPoint p = inverse_type_point(x, rc.lift.g_list);
          out.relation_defect = std::max(out.relation_defect, eval_poly(term, p).norm());
        }
        break;
      }
      case OTag::NormCap: {
        const AssembledCertificate& cap = cap_certificate(o.index);
        const MatRatExpr y =
            scale_left(RatExpr::inverse(rc.lift.g_original[static_cast<std::size_t>(o.index - 1)]), sub(w.r));
        for (const MatRatExpr& s : cap.sos) out.sos.push_back(outer(s, y));
        for (const auto& [gen, r] : cap.weighted) out.weighted.emplace_back(gen, outer(r, y));
        break;
      }
    }
  }
  for (const auto& [j, cap] : caps) {
    out.recursive_targets.insert(out.recursive_targets.end(), cap.recursive_targets.begin(), cap.recursive_targets.end());
    out.relation_defect = std::max(out.relation_defect, cap.relation_defect);
  }

  for (const MatrixPoint& x : verification_points(dom, opt, 29)) {
    const Matrix want = eval_expr(q, ExtendedPoint(x));
    Matrix got = assembled_value(out, P, x);
    if (got.size() == 0) got = Matrix::Zero(want.rows(), want.cols());
    out.agreement = std::max(out.agreement, rel_dev(got, want));
  }
  return out;
}

Matrix assembled_value(const AssembledCertificate& c, const std::vector<MatPoly>& P, const MatrixPoint& x) {
  Matrix total;
  auto add = [&](const Matrix& m) {
    if (total.size() == 0)
      total = m;
    else
      total += m;
  };
  const ExtendedPoint p(x);
  for (const MatRatExpr& s : c.sos) {
    const Matrix v = eval_expr(s, p);
    add(v.adjoint() * v);
  }
  for (const auto& [gen, r] : c.weighted) {
    const Matrix v = eval_expr(r, p);
    add(v.adjoint() * eval_poly(P.at(static_cast<std::size_t>(gen)), p) * v);
  }
  return total;
}

PencilCertificate certify_pencil_rational(const MatRatExpr& r, const LinearPencil& L, int delta_max,
                                          const CertifyOptions& opt) {
  if (!L.is_monic()) throw NonMonicPencil("the pencil must satisfy L(0) = I");
  if (!r.is_square()) throw ShapeError("target must be square");
  if (r.max_u_index() > 0) throw PreconditionError("target must not contain u letters");
  if (r.max_x_index() > L.arity()) throw PreconditionError("target uses more letters than the pencil");
  const DomainSpec dom = DomainSpec::pencil(L);

  const PositivityReport pos = check_positivity(r, dom, opt.sizes, opt.samples, opt.seed);
  if (pos.min_eigenvalue < -opt.sdp_tol)
    throw NotCertified("target has a negative eigenvalue at a domain sample", delta_max, {}, pos);

  PencilCertificate pc;
  pc.lift = build_hat(r);
  const ClosureSet closure = closure_Cr(r);
  pc.Mr = build_Mr(closure);
  std::vector<MatPoly> ideal;
  for (const Relation& rel : pc.Mr) ideal.push_back(rel.m);
  const std::vector<MatPoly> gens{L.to_matpoly()};
  try {
    pc.cert = certify_with(pc.lift.hat_q_sa, gens, ideal, delta_max, opt);
  } catch (const NotCertified& e) {
    throw NotCertified(e.what(), delta_max, e.attempts(), pos);
  }
  pc.cert.pipeline = "pencil";

  const Bindings back = pc.lift.back_substitution();
  for (const MatPoly& s : pc.cert.sos) pc.sos.push_back(substitute(to_expr(s), back));
  for (const WeightedFactor& w : pc.cert.weighted) pc.weighted.push_back(substitute(to_expr(w.r), back));

  const int m = r.rows();
  MatPoly ideal_part(m, m);
  for (const IdealFactor& f : pc.cert.ideal) ideal_part = ideal_part + f.iota.adjoint() * f.m + f.m.adjoint() * f.iota;

  const MatPoly Lp = L.to_matpoly();
  for (const MatrixPoint& x : verification_points(dom, opt, 41)) {
    const ExtendedPoint p = inverse_type_point(x, pc.lift.g_list);
    pc.ideal_defect = std::max(pc.ideal_defect, eval_poly(ideal_part, p).norm());
    const Matrix want = eval_expr(r, ExtendedPoint(x));
    Matrix got = Matrix::Zero(want.rows(), want.cols());
    for (const MatRatExpr& s : pc.sos) {
      const Matrix v = eval_expr(s, ExtendedPoint(x));
      got += v.adjoint() * v;
    }
    for (const MatRatExpr& w : pc.weighted) {
      const Matrix v = eval_expr(w, ExtendedPoint(x));
      got += v.adjoint() * eval_poly(Lp, ExtendedPoint(x)) * v;
    }
    pc.agreement = std::max(pc.agreement, rel_dev(got, want));
  }

  if (!pc.Mr.empty() && !ideal_part.is_zero()) {
    try {
      const int n = opt.sizes.empty() ? 2 : opt.sizes.back();
      for (const ZSample& z : sample_Zr(pc.Mr, L, pc.lift.g_list, n, 20, opt.seed + 53, ZFamily::Kernel, m)) {
        const Complex val = z.v.dot(eval_poly(ideal_part, z.point) * z.v);
        pc.zr_defect = std::max(pc.zr_defect, std::abs(val) / z.v.squaredNorm());
      }
    } catch (const SamplingExhausted&) {
      pc.zr_defect = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return pc;
}

}  // namespace ncert
