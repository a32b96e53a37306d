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

#ifndef NCERT_POINT_HPP
#define NCERT_POINT_HPP

#include <vector>

#include "ncert/types.hpp"

namespace ncert {

/// A tuple of Hermitian n x n matrices, one per x letter.
struct MatrixPoint {
  int n = 1;
  std::vector<Matrix> X;

  int arity() const { return static_cast<int>(X.size()); }
  /// Throws PreconditionError unless every X_i is n x n and Hermitian within tol.
  void validate(double tol = 1e-12) const;
};

/// A MatrixPoint together with general n x n matrices for the u letters.
/// The letter u_j* always evaluates to U_j^*.
struct ExtendedPoint {
  MatrixPoint base;
  std::vector<Matrix> U;

  ExtendedPoint() = default;
  ExtendedPoint(MatrixPoint b) : base(std::move(b)) {}  // NOLINT(google-explicit-constructor)
  ExtendedPoint(MatrixPoint b, std::vector<Matrix> u) : base(std::move(b)), U(std::move(u)) {}

  int n() const { return base.n; }
};

}  // namespace ncert

#endif  // NCERT_POINT_HPP
