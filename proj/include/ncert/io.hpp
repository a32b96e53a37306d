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


#ifndef NCERT_IO_HPP
#define NCERT_IO_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "ncert/sos.hpp"

namespace ncert {

using Json = nlohmann::ordered_json;

/// Rows of entries; an entry is a number or [re, im].
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// {"A0": matrix, "Ai": [matrix, ...]}
Json pencil_to_json(const LinearPencil& L);
LinearPencil pencil_from_json(const Json& j);

/// {"n": int, "X": [matrix, ...], "U": [matrix, ...]}
Json point_to_json(const ExtendedPoint& p);
ExtendedPoint point_from_json(const Json& j);

/// Self-describing certificate record: the target and generators are stored
/// in printed form so the record can be re-verified without the pipeline.
Json certificate_to_json(const Certificate& c, const MatPoly& target, const std::vector<MatPoly>& generators,
                         const Bindings& substitution = {});

struct CertificateRecord {
  MatPoly target;
  std::vector<MatPoly> generators;
  Certificate cert;
};

CertificateRecord certificate_from_json(const Json& j);

}  // namespace ncert

#endif  // NCERT_IO_HPP
