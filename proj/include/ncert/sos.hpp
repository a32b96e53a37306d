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


#ifndef NCERT_SOS_HPP
#define NCERT_SOS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncert/evalnum.hpp"
#include "ncert/freealg.hpp"
#include "ncert/lift.hpp"
#include "ncert/sdp.hpp"

namespace ncert {

/// One PSD unknown: the SOS block (gen < 0) or the block weighted by gens[gen].
/// Entry (a, l, alpha) of the block is indexed (a * k + l) * m + alpha.
struct GramBlock {
  int gen = -1;
  int k = 1;
  std::vector<Word> basis;
};

/// Free coefficients of iota = sum_a w_a (x) J_a, J_a of size p x m.
struct IdealBlock {
  int index = 0;
  /// the ideal generator, widened to m_k (x) I_m when it is scalar
  MatPoly gen;
  std::vector<Word> basis;
  int free_offset = 0;
};

struct GramRow {
  Word word;
  int alpha = 0;
  int beta = 0;
  bool imag = false;
};

struct GramProblem {
  MatPoly target;
  int m = 1;
  int delta = 0;
  std::vector<Letter> alphabet;
  std::vector<MatPoly> gens;
  std::vector<MatPoly> ideal_gens;
  std::vector<GramBlock> blocks;
  std::vector<IdealBlock> ideals;
  std::vector<GramRow> rows;
  SdpInstance sdp;
};

/// Coefficient matching for q = sum s^*s + sum r^* p r + sum iota^* m + m^* iota.
/// Weighted blocks use words of degree <= delta - floor(deg p / 2), ideal
/// multipliers degree <= 2 delta + 1 - deg m. Throws DegreeTooSmall when a
/// word of q cannot be produced.
GramProblem build_gram_problem(const MatPoly& q, const std::vector<MatPoly>& gens,
                               const std::vector<MatPoly>& ideal_gens, int delta);

/// Coefficients the constraint map assigns to an assignment of the unknowns.
MatPoly gram_image(const GramProblem& p, const std::vector<Matrix>& blocks, const RealVector& free);

struct GramSolution {
  bool feasible = false;
  std::vector<Matrix> blocks;
  RealVector free;
  double margin = 0.0;
  double residual = 0.0;
};

GramSolution solve_gram(const GramProblem& p, double tol = 1e-8);

struct WeightedFactor {
  int gen = 0;
  MatPoly r;
};

struct IdealFactor {
  int index = 0;
  MatPoly m;
  MatPoly iota;
};

struct Certificate {
  std::string pipeline;
  int delta = 0;
  std::vector<MatPoly> sos;
  std::vector<WeightedFactor> weighted;
  std::vector<IdealFactor> ideal;
  double residual = 0.0;
};

Certificate extract_certificate(const GramProblem& p, const GramSolution& s, double rank_tol = 1e-9);

/// sum s^*s + sum r^* gens[gen] r + sum iota^* m + m^* iota, as a size x size matrix
MatPoly certificate_expansion(const Certificate& c, const std::vector<MatPoly>& gens, int size);

/// Max coefficient deviation between q and the expansion.
double verify_certificate(const MatPoly& q, const Certificate& c, const std::vector<MatPoly>& gens);

struct PositivityReport {
  double min_eigenvalue = 0.0;
  std::optional<MatrixPoint> witness;
  int evaluated = 0;
};

/// Min eigenvalue of the Hermitian part of e over domain samples.
PositivityReport check_positivity(const MatRatExpr& e, const DomainSpec& dom, const std::vector<int>& sizes, int count,
                                  std::uint64_t seed);

struct DeltaAttempt {
  int delta = 0;
  /// best solver margin; -inf when the degree was too small
  double margin = 0.0;
  std::string note;
};

class NotCertified : public Error {
 public:
  NotCertified(const std::string& what, int delta_max, std::vector<DeltaAttempt> attempts,
               std::optional<PositivityReport> witness)
      : Error(what), delta_max_(delta_max), attempts_(std::move(attempts)), witness_(std::move(witness)) {}
  int delta_max() const { return delta_max_; }
  const std::vector<DeltaAttempt>& attempts() const { return attempts_; }
  const std::optional<PositivityReport>& witness() const { return witness_; }

 private:
  int delta_max_;
  std::vector<DeltaAttempt> attempts_;
  std::optional<PositivityReport> witness_;
};

struct CertifyOptions {
  std::vector<int> sizes{1, 2, 3};
  int samples = 200;
  std::uint64_t seed = 0;
  double sdp_tol = 1e-8;
  double accept_residual = 1e-6;
  double rank_tol = 1e-9;
  int max_doublings = 4;
  double safety = 4.0;
  int verify_samples = 100;
  /// sampled minimum below this triggers a warning
  double flat_warning = 1e-4;
};

/// Sweeps delta from ceil(deg q / 2) to delta_max; the first verified
/// certificate wins. Throws NotCertified with the per-delta margins.
Certificate certify_with(const MatPoly& q, const std::vector<MatPoly>& gens, const std::vector<MatPoly>& ideal_gens,
                         int delta_max, const CertifyOptions& opt = {});

Certificate certify_polynomial(const MatPoly& q, const std::vector<MatPoly>& P, int delta_max,
                               const CertifyOptions& opt = {});

struct RationalCertificate {
  /// over (x, u), generators O.polys()
  Certificate cert;
  LiftResult lift;
  AugmentedSet O;
  double sampled_min = 0.0;
  /// max relative deviation of the certificate from q at inverse-type samples
  double agreement = 0.0;
  std::vector<std::string> warnings;
};

RationalCertificate certify_rational(const MatRatExpr& q, const std::vector<MatPoly>& P, int delta_max,
                                     const CertifyOptions& opt = {});

/// Certificate whose factors are rational expressions in x and whose
/// generators are the elements of P.
struct AssembledCertificate {
  std::vector<MatRatExpr> sos;
  /// (index into P, factor)
  std::vector<std::pair<int, MatRatExpr>> weighted;
  /// max norm of the dropped relation terms at inverse-type samples
  double relation_defect = 0.0;
  /// max relative deviation from q at domain samples
  double agreement = 0.0;
  /// one entry per norm cap: the certified D g^* g - 1
  std::vector<std::string> recursive_targets;
};

AssembledCertificate assemble_rational_certificate(const RationalCertificate& rc, const std::vector<MatPoly>& P,
                                                   int delta_max, const CertifyOptions& opt = {});

/// Evaluates sum s^*s + sum r^* P r at a point.
Matrix assembled_value(const AssembledCertificate& c, const std::vector<MatPoly>& P, const MatrixPoint& x);

struct PencilCertificate {
  /// over (x, u), generator [L], ideal generators Mr
  Certificate cert;
  LiftResult lift;
  std::vector<Relation> Mr;
  /// factors after u_j -> g_j^-1
  std::vector<MatRatExpr> sos;
  std::vector<MatRatExpr> weighted;
  /// max norm of the ideal terms at inverse-type samples
  double ideal_defect = 0.0;
  /// max |<(iota^* m + m^* iota) v, v>| / |v|^2 on kernel samples of Z_r
  double zr_defect = 0.0;
  double agreement = 0.0;
};

PencilCertificate certify_pencil_rational(const MatRatExpr& r, const LinearPencil& L, int delta_max,
                                          const CertifyOptions& opt = {});

}  // namespace ncert

#endif  // NCERT_SOS_HPP
