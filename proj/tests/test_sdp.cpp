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

#include <sstream>

#include "doctest.h"
#include "ncert/linalg.hpp"
#include "ncert/sdp.hpp"
#include "sdp_instances.hpp"

using namespace ncert;

namespace {

SdpRow row(std::vector<SdpEntry> e, double rhs) { return {std::move(e), {}, rhs}; }

}  // namespace

TEST_CASE("scalar examples") {
  SdpInstance a{{1}, 0, {row({{0, 0, 0, 1.0}}, 2.0)}};
  SdpResult ra = solve_sdp(a);
  CHECK(ra.status == SdpStatus::Feasible);
  CHECK(ra.blocks[0](0, 0).real() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(ra.margin == doctest::Approx(2.0).epsilon(1e-10));

  SdpInstance b{{1}, 0, {row({{0, 0, 0, 1.0}}, -1.0)}};
  CHECK(solve_sdp(b).status == SdpStatus::Infeasible);

  // inconsistent equalities
  SdpInstance c{{2}, 0, {row({{0, 0, 0, 1.0}}, 1.0), row({{0, 0, 0, 2.0}}, 3.0)}};
  CHECK(solve_sdp(c).status == SdpStatus::Infeasible);
  // dependent but consistent
  SdpInstance d{{2}, 0, {row({{0, 0, 0, 1.0}}, 1.0), row({{0, 0, 0, 2.0}}, 2.0), row({{0, 1, 1, 1.0}}, 1.0)}};
  SdpResult rd = solve_sdp(d);
  CHECK(rd.status == SdpStatus::Feasible);
  CHECK(rd.residual < 1e-10);
}

TEST_CASE("Gram instance of 2 - x^2 over 1 - x^2") {
  // SOS block over {1, x}, weighted block over {1}
  SdpInstance inst{{2, 1}, 0, {}};
  inst.rows.push_back(row({{0, 0, 0, 1.0}, {1, 0, 0, 1.0}}, 2.0));  // word 1
  inst.rows.push_back(row({{0, 0, 1, 2.0}}, 0.0));                  // word x
  inst.rows.push_back(row({{0, 0, 1, Complex(0, 2)}}, 0.0));        // Im part
  inst.rows.push_back(row({{0, 1, 1, 1.0}, {1, 0, 0, -1.0}}, -1.0));  // word x^2
  SdpResult r = solve_sdp(inst);
  REQUIRE(r.status == SdpStatus::Feasible);
  CHECK(r.margin == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.residual < 1e-10);
}

TEST_CASE("free variables") {
  // w + f1 - f2 = 1, f1 + f2 = 4, w >= t
  SdpInstance inst{{1}, 2, {}};
  inst.rows.push_back({{{0, 0, 0, 1.0}}, {{0, 1.0}, {1, -1.0}}, 1.0});
  inst.rows.push_back({{}, {{0, 1.0}, {1, 1.0}}, 4.0});
  SdpResult r = solve_sdp(inst);
  REQUIRE(r.status == SdpStatus::Feasible);
  CHECK(r.residual < 1e-9);
  CHECK(r.margin >= 0.0);
}

TEST_CASE("iteration cap") {
  Rng rng = derived_rng(5, 0);
  SdpInstance inst = testing::random_instance(rng, true);
  SdpOptions opt;
  opt.iter_cap = 1;
  opt.polish = false;
  CHECK_THROWS_AS(solve_sdp(inst, opt), SolverStalled);
}

TEST_CASE("nearest_psd") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = -1;
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 1;
  CHECK((nearest_psd(m) - want).norm() < 1e-15);

  Rng rng = derived_rng(6, 0);
  for (int t = 0; t < 50; ++t) {
    Matrix g = random_gaussian(rng, 6, 4);
    Matrix psd = g * g.adjoint();
    REQUIRE((nearest_psd(psd) - psd).norm() <= 1e-14 * (1 + psd.norm()) * 10);
    Matrix h = random_hermitian(rng, 6);
    Matrix p = nearest_psd(h);
    REQUIRE(min_eigenvalue(p) >= -1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const double neg = es.eigenvalues().cwiseMin(0.0).norm();
    REQUIRE(std::abs((h - p).norm() - neg) < 1e-10);
    REQUIRE((nearest_psd(p) - p).norm() < 1e-10);
    Matrix h2 = random_hermitian(rng, 6);
    REQUIRE((nearest_psd(h) - nearest_psd(h2)).norm() <= (h - h2).norm() + 1e-12);
  }
}

TEST_CASE("contract on random instances") {
  Rng rng = derived_rng(7, 0);
  int feasible = 0;
  for (int t = 0; t < 200; ++t) {
    const bool want_feasible = t % 4 != 3;
    SdpInstance inst = testing::random_instance(rng, want_feasible);
    SdpResult r;
    try {
      r = solve_sdp(inst);
    } catch (const SolverStalled&) {
      continue;
    }
    if (r.status == SdpStatus::Feasible) {
      ++feasible;
      REQUIRE(r.residual <= 1e-8);
      REQUIRE(r.margin >= -1e-8);
      REQUIRE(sdp_residual(inst, r.blocks, r.free) == r.residual);
    }
    if (want_feasible) CHECK(r.status == SdpStatus::Feasible);
  }
  CHECK(feasible >= 140);
}

TEST_CASE("determinism and dump") {
  Rng rng = derived_rng(8, 0);
  SdpInstance inst = testing::random_instance(rng, true);
  SdpResult a = solve_sdp(inst);
  SdpResult b = solve_sdp(inst);
  REQUIRE(a.blocks.size() == b.blocks.size());
  for (std::size_t k = 0; k < a.blocks.size(); ++k) CHECK(a.blocks[k] == b.blocks[k]);
  CHECK(a.free == b.free);
  std::ostringstream out;
  dump_sdp(inst, out);
  CHECK(out.str().rfind("blocks", 0) == 0);
}
