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


#include "ncert/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseQR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ncert/freealg.hpp"
#include "ncert/linalg.hpp"

namespace ncert {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// One half of a Hermitian constraint matrix: A += w * E_{p,q}.
struct Half {
  int row;
  int p;
  int q;
  Complex w;
};

struct Problem {
  int m = 0;                      // independent rows
  int nf = 0;                     // independent free columns
  std::vector<int> dims;          // internal blocks; the last one is tau
  std::vector<std::vector<Half>> halves;  // per block
  RealMatrix B;                   // m x nf
  RealVector b;
  std::vector<double> cost;       // C_k = cost[k] * I
};

int coord_count(const std::vector<int>& dims) {
  int n = 0;
  for (int d : dims) n += d * d;
  return n;
}

std::vector<int> coord_offsets(const std::vector<int>& dims) {
  std::vector<int> off;
  int n = 0;
  for (int d : dims) {
    off.push_back(n);
    n += d * d;
  }
  return off;
}

// Real coordinates of a Hermitian d x d block: diagonal, then (re, im) of the upper triangle.
int coord_diag(int d, int r) {
  (void)d;
  return r;
}
int coord_re(int d, int r, int c) { return d + r * d - r * (r + 1) / 2 + (c - r - 1); }
int coord_im(int d, int r, int c) { return coord_re(d, r, c) + d * (d - 1) / 2; }

// Row of the map W -> Re sum coef W[r][c] in real coordinates.
void add_coords(const SdpEntry& e, int d, int base, std::vector<Eigen::Triplet<double>>& out, int row) {
  if (e.row == e.col) {
    out.emplace_back(row, base + coord_diag(d, e.row), e.coef.real());
  } else if (e.row < e.col) {
    out.emplace_back(row, base + coord_re(d, e.row, e.col), e.coef.real());
    out.emplace_back(row, base + coord_im(d, e.row, e.col), -e.coef.imag());
  } else {
    out.emplace_back(row, base + coord_re(d, e.col, e.row), e.coef.real());
    out.emplace_back(row, base + coord_im(d, e.col, e.row), e.coef.imag());
  }
}

std::vector<Matrix> apply_At(const Problem& pr, const RealVector& y) {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < pr.dims.size(); ++k) {
    Matrix s = Matrix::Zero(pr.dims[k], pr.dims[k]);
    for (const Half& h : pr.halves[k]) s(h.p, h.q) += y(h.row) * h.w;
    out.push_back(std::move(s));
  }
  return out;
}

// Re tr(A_i Y) for general Y
RealVector apply_A(const Problem& pr, const std::vector<Matrix>& Y) {
  RealVector out = RealVector::Zero(pr.m);
  for (std::size_t k = 0; k < pr.dims.size(); ++k)
    for (const Half& h : pr.halves[k]) out(h.row) += (h.w * Y[k](h.q, h.p)).real();
  return out;
}

double inner(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].adjoint() * b[k]).trace().real();
  return s;
}

Matrix herm(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

// Largest alpha with X + alpha dX >= 0 (inf if unbounded).
double max_step(const std::vector<Matrix>& X, const std::vector<Matrix>& dX) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < X.size(); ++k) {
    Eigen::LLT<Matrix> llt(X[k]);
    const Matrix linv = llt.matrixL().solve(Matrix::Identity(X[k].rows(), X[k].cols()));
    const Matrix t = herm(linv * dX[k] * linv.adjoint());
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(t, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

Matrix inverse_hpd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

struct Direction {
  std::vector<Matrix> dX;
  std::vector<Matrix> dS;
  RealVector dy;
  RealVector df;
};

class NormalSystem {
 public:
  NormalSystem(const Problem& pr, const std::vector<Matrix>& X, const std::vector<Matrix>& Sinv) : pr_(pr) {
    RealMatrix M = RealMatrix::Zero(pr.m, pr.m);
    for (std::size_t k = 0; k < pr.dims.size(); ++k) {
      const auto& hs = pr.halves[k];
      const Matrix& x = X[k];
      const Matrix& si = Sinv[k];
      for (const Half& e : hs)
        for (const Half& f : hs) M(e.row, f.row) += (e.w * f.w * x(e.q, f.p) * si(f.q, e.p)).real();
    }
    M = (M + M.transpose()).eval() * 0.5;
    double shift = 0.0;
    const double scale = std::max(1e-300, M.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 8; ++attempt) {
      llt_.compute(shift > 0 ? RealMatrix(M + shift * RealMatrix::Identity(pr.m, pr.m)) : M);
      if (llt_.info() == Eigen::Success) break;
      shift = shift > 0 ? shift * 100 : 1e-14 * scale;
    }
    if (pr.nf > 0) {
      MinvB_ = llt_.solve(pr.B);
      schur_.compute(pr.B.transpose() * MinvB_);
    }
  }

  // M dy + B df = h, B^T dy = g
  void solve(const RealVector& h, const RealVector& g, RealVector& dy, RealVector& df) const {
    const RealVector minvh = llt_.solve(h);
    if (pr_.nf > 0) {
      df = schur_.solve(pr_.B.transpose() * minvh - g);
      dy = minvh - MinvB_ * df;
    } else {
      df = RealVector::Zero(0);
      dy = minvh;
    }
  }

 private:
  const Problem& pr_;
  Eigen::LLT<RealMatrix> llt_;
  RealMatrix MinvB_;
  Eigen::LDLT<RealMatrix> schur_;
};

// HKM direction for complementarity target G (dX = G - herm(X dS S^-1)).
Direction direction(const Problem& pr, const NormalSystem& ns, const std::vector<Matrix>& X,
                    const std::vector<Matrix>& Sinv, const std::vector<Matrix>& G, const RealVector& rp,
                    const std::vector<Matrix>& Rd, const RealVector& rf) {
  const std::size_t K = X.size();
  std::vector<Matrix> corr(K);
  for (std::size_t k = 0; k < K; ++k) corr[k] = X[k] * Rd[k] * Sinv[k] - G[k];
  const RealVector h = rp + apply_A(pr, corr);
  Direction d;
  ns.solve(h, rf, d.dy, d.df);
  const std::vector<Matrix> aty = apply_At(pr, d.dy);
  d.dS.resize(K);
  d.dX.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    d.dS[k] = herm(Rd[k] - aty[k]);
    d.dX[k] = herm(G[k] - X[k] * d.dS[k] * Sinv[k]);
  }
  return d;
}

struct IpmOutput {
  std::vector<Matrix> X;
  RealVector f;
  int iterations = 0;
  double merit = std::numeric_limits<double>::infinity();
  bool converged = false;
};

IpmOutput run_ipm(const Problem& pr, const SdpOptions& opt) {
  const std::size_t K = pr.dims.size();
  int N = 0;
  for (int d : pr.dims) N += d;
  const double eps = std::min(1e-10, opt.tol * 1e-2);
  const double bnorm = pr.b.size() ? pr.b.cwiseAbs().maxCoeff() : 0.0;
  double cnorm = 0.0;
  for (double c : pr.cost) cnorm = std::max(cnorm, std::abs(c));

  const double xi = std::max(10.0, std::sqrt(static_cast<double>(N)) * (1.0 + bnorm));
  const double eta = std::max(10.0, std::sqrt(static_cast<double>(N)) * (1.0 + cnorm));
  std::vector<Matrix> X(K), S(K), C(K);
  for (std::size_t k = 0; k < K; ++k) {
    X[k] = xi * Matrix::Identity(pr.dims[k], pr.dims[k]);
    S[k] = eta * Matrix::Identity(pr.dims[k], pr.dims[k]);
    C[k] = pr.cost[k] * Matrix::Identity(pr.dims[k], pr.dims[k]);
  }
  RealVector y = RealVector::Zero(pr.m);
  RealVector f = RealVector::Zero(pr.nf);

  IpmOutput out;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 0; it < opt.iter_cap; ++it) {
    out.iterations = it + 1;
    const RealVector rp = pr.b - apply_A(pr, X) - (pr.nf ? RealVector(pr.B * f) : RealVector::Zero(pr.m));
    const std::vector<Matrix> aty = apply_At(pr, y);
    std::vector<Matrix> Rd(K);
    double rd_norm = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      Rd[k] = C[k] - S[k] - aty[k];
      rd_norm = std::max(rd_norm, Rd[k].cwiseAbs().maxCoeff());
    }
    const RealVector rf = pr.nf ? RealVector(-pr.B.transpose() * y) : RealVector::Zero(0);
    const double pobj = inner(C, X);
    const double dobj = pr.b.dot(y);
    const double mu = inner(X, S) / N;
    const double pinf = rp.size() ? rp.cwiseAbs().maxCoeff() / (1.0 + bnorm) : 0.0;
    const double dinf = std::max(rd_norm, rf.size() ? rf.cwiseAbs().maxCoeff() : 0.0) / (1.0 + cnorm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    // best iterate so far
    const double merit = std::max({pinf, dinf, gap});
    if (merit < 0.5 * best) {
      best = merit;
      since_best = 0;
      out.X = X;
      out.f = f;
      out.merit = merit;
    } else if (++since_best >= 8) {
      break;
    }
    if (merit < eps) {
      out.converged = true;
      break;
    }

    std::vector<Matrix> Sinv(K);
    for (std::size_t k = 0; k < K; ++k) Sinv[k] = herm(inverse_hpd(S[k]));
    const NormalSystem ns(pr, X, Sinv);

    // predictor
    std::vector<Matrix> G(K);
    for (std::size_t k = 0; k < K; ++k) G[k] = -X[k];
    const Direction aff = direction(pr, ns, X, Sinv, G, rp, Rd, rf);
    const double ap = std::min(1.0, max_step(X, aff.dX));
    const double ad = std::min(1.0, max_step(S, aff.dS));
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      mu_aff += ((X[k] + ap * aff.dX[k]).adjoint() * (S[k] + ad * aff.dS[k])).trace().real();
    mu_aff /= N;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // corrector
    for (std::size_t k = 0; k < K; ++k) G[k] = sigma * mu * Sinv[k] - X[k] - aff.dX[k] * aff.dS[k] * Sinv[k];
    const Direction d = direction(pr, ns, X, Sinv, G, rp, Rd, rf);
    const double gamma = 0.9 + 0.09 * std::min(ap, ad);
    const double step_p = std::min(1.0, gamma * max_step(X, d.dX));
    const double step_d = std::min(1.0, gamma * max_step(S, d.dS));
    for (std::size_t k = 0; k < K; ++k) {
      X[k] = herm(X[k] + step_p * d.dX[k]);
      S[k] = herm(S[k] + step_d * d.dS[k]);
    }
    if (pr.nf) f += step_p * d.df;
    y += step_d * d.dy;
    if (step_p < 1e-12 && step_d < 1e-12) break;
  }
  return out;
}

double blocks_margin(const std::vector<Matrix>& blocks) {
  double m = std::numeric_limits<double>::infinity();
  for (const Matrix& b : blocks) m = std::min(m, min_eigenvalue(b));
  return m;
}

}  // namespace

double sdp_residual(const SdpInstance& inst, const std::vector<Matrix>& blocks, const RealVector& free) {
  double worst = 0.0;
  for (const SdpRow& row : inst.rows) {
    double v = 0.0;
    for (const SdpEntry& e : row.entries) v += (e.coef * blocks[static_cast<std::size_t>(e.block)](e.row, e.col)).real();
    for (const auto& [idx, c] : row.free) v += c * free(idx);
    worst = std::max(worst, std::abs(v - row.rhs));
  }
  return worst;
}

Matrix nearest_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm(m));
  const RealVector lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

SdpResult solve_sdp(const SdpInstance& inst, const SdpOptions& opt) {
  const int K = static_cast<int>(inst.block_dims.size());
  const int rows = static_cast<int>(inst.rows.size());
  for (const SdpRow& row : inst.rows) {
    for (const SdpEntry& e : row.entries) {
      if (e.block < 0 || e.block >= K || e.row < 0 || e.col < 0 || e.row >= inst.block_dims[e.block] ||
          e.col >= inst.block_dims[e.block])
        throw ShapeError("sdp entry outside its block");
    }
    for (const auto& fc : row.free)
      if (fc.first < 0 || fc.first >= inst.num_free) throw ShapeError("sdp free index out of range");
  }

  // full constraint matrix in real coordinates [W coords | free]
  const std::vector<int> offs = coord_offsets(inst.block_dims);
  const int ncoord = coord_count(inst.block_dims);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < rows; ++i) {
    for (const SdpEntry& e : inst.rows[i].entries) add_coords(e, inst.block_dims[e.block], offs[e.block], trip, i);
    for (const auto& [idx, c] : inst.rows[i].free) trip.emplace_back(i, ncoord + idx, c);
  }
  SpMat A(rows, ncoord + inst.num_free);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  // independent rows: column-pivoted sparse QR of A^T
  std::vector<int> keep;
  if (rows > 0) {
    SpMat at = A.transpose();
    at.makeCompressed();
    Eigen::SparseQR<SpMat, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(1e-10);
    qr.compute(at);
    if (qr.info() != Eigen::Success) throw SolverStalled("sdp: QR of the constraint matrix failed");
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index r = 0; r < qr.rank(); ++r) keep.push_back(perm(r));
    std::sort(keep.begin(), keep.end());
  }

  Problem pr;
  pr.m = static_cast<int>(keep.size());
  pr.dims = inst.block_dims;
  pr.dims.push_back(1);  // tau
  pr.halves.assign(pr.dims.size(), {});
  pr.b = RealVector::Zero(pr.m);
  pr.cost.assign(pr.dims.size(), opt.trace_weight);
  pr.cost.back() = 1.0;
  RealMatrix Bfull = RealMatrix::Zero(pr.m, inst.num_free);
  for (int i = 0; i < pr.m; ++i) {
    const SdpRow& row = inst.rows[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])];
    double identity_part = 0.0;
    for (const SdpEntry& e : row.entries) {
      auto& hs = pr.halves[static_cast<std::size_t>(e.block)];
      hs.push_back({i, e.col, e.row, e.coef * 0.5});
      hs.push_back({i, e.row, e.col, std::conj(e.coef) * 0.5});
      if (e.row == e.col) identity_part += e.coef.real();
    }
    // W = Z + (1 - tau) I
    if (identity_part != 0.0) pr.halves.back().push_back({i, 0, 0, Complex(-identity_part)});
    pr.b(i) = row.rhs - identity_part;
    for (const auto& [idx, c] : row.free) Bfull(i, idx) += c;
  }
  // independent free columns
  std::vector<int> free_cols;
  if (inst.num_free > 0 && pr.m > 0) {
    Eigen::ColPivHouseholderQR<RealMatrix> qr(Bfull);
    qr.setThreshold(1e-10);
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index c = 0; c < qr.rank(); ++c) free_cols.push_back(perm(c));
    std::sort(free_cols.begin(), free_cols.end());
  }
  pr.nf = static_cast<int>(free_cols.size());
  pr.B.resize(pr.m, pr.nf);
  for (int c = 0; c < pr.nf; ++c) pr.B.col(c) = Bfull.col(free_cols[static_cast<std::size_t>(c)]);

  SdpResult res;
  bool stalled = false;
  std::vector<Matrix> W(static_cast<std::size_t>(K));
  RealVector f = RealVector::Zero(inst.num_free);
  if (pr.m > 0) {
    const IpmOutput ipm = run_ipm(pr, opt);
    res.iterations = ipm.iterations;
    const double tau = ipm.X.back()(0, 0).real();
    for (int k = 0; k < K; ++k)
      W[k] = ipm.X[k] + (1.0 - tau) * Matrix::Identity(inst.block_dims[k], inst.block_dims[k]);
    for (int c = 0; c < pr.nf; ++c) f(free_cols[static_cast<std::size_t>(c)]) = ipm.f(c);
    stalled = !ipm.converged && ipm.merit > std::sqrt(opt.tol);
  } else {
    for (int k = 0; k < K; ++k) W[k] = Matrix::Identity(inst.block_dims[k], inst.block_dims[k]);
  }

  // minimal-norm correction onto the independent rows
  if (opt.polish && pr.m > 0) {
    SpMat Ak(pr.m, A.cols());
    {
      std::vector<Eigen::Triplet<double>> t2;
      Eigen::SparseMatrix<double, Eigen::RowMajor> rm = A;
      for (int i = 0; i < pr.m; ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, keep[static_cast<std::size_t>(i)]); it; ++it)
          t2.emplace_back(i, static_cast<int>(it.col()), it.value());
      Ak.setFromTriplets(t2.begin(), t2.end());
    }
    RealVector r(pr.m);
    for (int i = 0; i < pr.m; ++i) {
      const SdpRow& row = inst.rows[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])];
      double v = 0.0;
      for (const SdpEntry& e : row.entries) v += (e.coef * W[static_cast<std::size_t>(e.block)](e.row, e.col)).real();
      for (const auto& [idx, c] : row.free) v += c * f(idx);
      r(i) = row.rhs - v;
    }
    const SpMat AAt = Ak * SpMat(Ak.transpose());
    Eigen::SimplicialLDLT<SpMat> ldlt(AAt);
    if (ldlt.info() == Eigen::Success) {
      const RealVector delta = Ak.transpose() * RealVector(ldlt.solve(r));
      std::vector<Matrix> W2 = W;
      RealVector f2 = f;
      for (int k = 0; k < K; ++k) {
        const int d = inst.block_dims[k];
        const int base = offs[k];
        for (int a = 0; a < d; ++a) {
          W2[k](a, a) += delta(base + coord_diag(d, a));
          for (int c = a + 1; c < d; ++c) {
            const Complex z(delta(base + coord_re(d, a, c)), delta(base + coord_im(d, a, c)));
            W2[k](a, c) += z;
            W2[k](c, a) += std::conj(z);
          }
        }
      }
      for (int c = 0; c < inst.num_free; ++c) f2(c) += delta(ncoord + c);
      if (sdp_residual(inst, W2, f2) < sdp_residual(inst, W, f)) {
        W = std::move(W2);
        f = std::move(f2);
      }
    }
  }

  if (stalled && sdp_residual(inst, W, f) > opt.tol)
    throw SolverStalled("sdp: no convergence within " + std::to_string(opt.iter_cap) + " iterations");
  res.blocks = std::move(W);
  res.free = std::move(f);
  res.margin = blocks_margin(res.blocks);
  res.residual = sdp_residual(inst, res.blocks, res.free);
  res.status = (res.residual <= opt.tol && res.margin >= -opt.tol) ? SdpStatus::Feasible : SdpStatus::Infeasible;
  return res;
}

void dump_sdp(const SdpInstance& inst, std::ostream& out) {
  out << "blocks";
  for (int d : inst.block_dims) out << ' ' << d;
  out << "\nfree " << inst.num_free << "\nrows " << inst.rows.size() << '\n';
  for (const SdpRow& row : inst.rows) {
    out << format_double(row.rhs);
    for (const SdpEntry& e : row.entries)
      out << " ; " << e.block << ' ' << e.row << ' ' << e.col << ' ' << format_double(e.coef.real()) << ' '
          << format_double(e.coef.imag());
    for (const auto& [idx, c] : row.free) out << " ; f " << idx << ' ' << format_double(c);
    out << '\n';
  }
}

}  // namespace ncert
