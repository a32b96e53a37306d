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

#ifndef NCERT_LINALG_HPP
#define NCERT_LINALG_HPP

#include <cstdint>
#include <random>

#include "ncert/types.hpp"

namespace ncert {

Matrix kron(const Matrix& a, const Matrix& b);

/// max |M - M^*| entrywise
double hermitian_defect(const Matrix& m);
Matrix hermitian_part(const Matrix& m);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

using Rng = std::mt19937_64;

/// Deterministic generator for sample `index` of a run seeded with `seed`.
Rng derived_rng(std::uint64_t seed, std::uint64_t index);

Matrix random_gaussian(Rng& rng, int rows, int cols);
/// Haar-distributed unitary via QR of a complex Gaussian matrix.
Matrix random_unitary(Rng& rng, int n);
/// GUE-like Hermitian matrix (X + X^*)/2 with standard complex Gaussian X.
Matrix random_hermitian(Rng& rng, int n);

}  // namespace ncert

#endif  // NCERT_LINALG_HPP
