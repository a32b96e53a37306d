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


#ifndef NCERT_SDP_INSTANCES_HPP
#define NCERT_SDP_INSTANCES_HPP

#include <algorithm>
#include <random>

#include "ncert/linalg.hpp"
#include "ncert/sdp.hpp"

namespace ncert::testing {

// Random instance around a known PSD point (feasible) or with random right-hand sides.
inline SdpInstance random_instance(Rng& rng, bool feasible) {
  std::uniform_int_distribution<int> nblocks(1, 3), dim(1, 20), nfree(0, 3);
  std::normal_distribution<double> gauss;
  SdpInstance inst;
  const int k = nblocks(rng);
  int total = 0;
  for (int b = 0; b < k && total < 20; ++b) {
    const int d = std::min(dim(rng), 20 - total);
    inst.block_dims.push_back(d);
    total += d;
  }
  inst.num_free = nfree(rng);
  std::vector<Matrix> w0;
  for (int d : inst.block_dims) {
    Matrix g = random_gaussian(rng, d, std::max(1, d - 1));
    w0.push_back(g * g.adjoint());
  }
  RealVector f0(inst.num_free);
  for (int i = 0; i < inst.num_free; ++i) f0(i) = gauss(rng);
  std::uniform_int_distribution<int> rows(1, 2 * total), nnz(1, 6);
  const int m = rows(rng);
  for (int r = 0; r < m; ++r) {
    SdpRow sr;
    const int z = nnz(rng);
    for (int t = 0; t < z; ++t) {
      const int b = std::uniform_int_distribution<int>(0, static_cast<int>(inst.block_dims.size()) - 1)(rng);
      std::uniform_int_distribution<int> idx(0, inst.block_dims[b] - 1);
      sr.entries.push_back({b, idx(rng), idx(rng), Complex(gauss(rng), gauss(rng))});
    }
    for (int i = 0; i < inst.num_free; ++i)
      if (gauss(rng) > 0.5) sr.free.emplace_back(i, gauss(rng));
    double v = 0.0;
    for (const SdpEntry& e : sr.entries) v += (e.coef * w0[e.block](e.row, e.col)).real();
    for (const auto& [i, c] : sr.free) v += c * f0(i);
    sr.rhs = feasible ? v : 10 * gauss(rng);
    inst.rows.push_back(std::move(sr));
  }
  return inst;
}

}  // namespace ncert::testing

#endif  // NCERT_SDP_INSTANCES_HPP
