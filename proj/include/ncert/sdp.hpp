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


#ifndef NCERT_SDP_HPP
#define NCERT_SDP_HPP

#include <iosfwd>
#include <vector>

#include "ncert/types.hpp"

namespace ncert {

/// Re(coef * W[row][col]) for the Hermitian block W = blocks[block].
struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  Complex coef;
};

/// sum of entries + sum free[i].second * f[free[i].first] == rhs
struct SdpRow {
  std::vector<SdpEntry> entries;
  std::vector<std::pair<int, double>> free;
  double rhs = 0.0;
};

/// Find Hermitian PSD blocks and real free variables satisfying the rows,
/// maximizing the smallest eigenvalue over all blocks.
struct SdpInstance {
  std::vector<int> block_dims;
  int num_free = 0;
  std::vector<SdpRow> rows;
};

struct SdpOptions {
  double tol = 1e-8;
  int iter_cap = 150;
  /// weight of sum tr(W) in the objective; keeps solutions bounded
  double trace_weight = 1e-7;
  bool polish = true;
};

enum class SdpStatus { Feasible, Infeasible };

struct SdpResult {
  SdpStatus status = SdpStatus::Infeasible;
  std::vector<Matrix> blocks;
  RealVector free;
  /// min eigenvalue over all blocks (+inf without blocks)
  double margin = 0.0;
  /// max |row residual|
  double residual = 0.0;
  int iterations = 0;
};

/// Primal-dual interior point method (HKM direction, Mehrotra corrector) on
///   min (1 - t) + w * sum tr(W_k)   s.t. rows, W_k - t I >= 0.
/// Infeasible when the equalities are inconsistent or the best margin is
/// below -tol. Throws SolverStalled when the iteration cap is hit.
SdpResult solve_sdp(const SdpInstance& inst, const SdpOptions& opt = {});

/// Max |row residual| of an assignment.
double sdp_residual(const SdpInstance& inst, const std::vector<Matrix>& blocks, const RealVector& free);

/// Frobenius-nearest PSD matrix (eigenvalue clipping at 0).
Matrix nearest_psd(const Matrix& m);

/// One equality row per line: rhs, then "b r c re im" entries, then "f idx coef".
void dump_sdp(const SdpInstance& inst, std::ostream& out);

}  // namespace ncert

#endif  // NCERT_SDP_HPP
