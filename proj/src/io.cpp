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


#include "ncert/io.hpp"

namespace ncert {

namespace {

Json complex_to_json(Complex c) {
  if (c.imag() == 0.0) return c.real();
  return Json::array({c.real(), c.imag()});
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw PreconditionError("matrix entry must be a number or [re, im]");
}

MatPoly parse_poly(const Json& j) {
  if (!j.is_string()) throw PreconditionError("expected a printed polynomial");
  return expand(parse(j.get<std::string>()));
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw PreconditionError("matrix must be a nonempty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw PreconditionError("matrix rows have different lengths");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

Json pencil_to_json(const LinearPencil& L) {
  Json ai = Json::array();
  for (const Matrix& a : L.ai()) ai.push_back(matrix_to_json(a));
  return Json{{"A0", matrix_to_json(L.a0())}, {"Ai", ai}};
}

LinearPencil pencil_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("A0") || !j.contains("Ai") || !j["Ai"].is_array())
    throw PreconditionError("pencil must be an object with A0 and Ai");
  std::vector<Matrix> ai;
  for (const Json& a : j["Ai"]) ai.push_back(matrix_from_json(a));
  return LinearPencil(matrix_from_json(j["A0"]), std::move(ai));
}

Json point_to_json(const ExtendedPoint& p) {
  Json x = Json::array();
  for (const Matrix& m : p.base.X) x.push_back(matrix_to_json(m));
  Json out{{"n", p.n()}, {"X", x}};
  if (!p.U.empty()) {
    Json u = Json::array();
    for (const Matrix& m : p.U) u.push_back(matrix_to_json(m));
    out["U"] = u;
  }
  return out;
}

ExtendedPoint point_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("X") || !j["X"].is_array()) throw PreconditionError("point must have an X list");
  ExtendedPoint p;
  for (const Json& m : j["X"]) p.base.X.push_back(matrix_from_json(m));
  if (j.contains("U"))
    for (const Json& m : j["U"]) p.U.push_back(matrix_from_json(m));
  if (j.contains("n"))
    p.base.n = j["n"].get<int>();
  else if (!p.base.X.empty())
    p.base.n = static_cast<int>(p.base.X[0].rows());
  else if (!p.U.empty())
    p.base.n = static_cast<int>(p.U[0].rows());
  p.base.validate(1e-9);
  for (const Matrix& u : p.U)
    if (u.rows() != p.base.n || u.cols() != p.base.n) throw ShapeError("U matrices must be n x n");
  return p;
}

Json certificate_to_json(const Certificate& c, const MatPoly& target, const std::vector<MatPoly>& generators,
                         const Bindings& substitution) {
  Json gens = Json::array();
  for (const MatPoly& g : generators) gens.push_back(g.str());
  Json sos = Json::array();
  for (const MatPoly& s : c.sos) sos.push_back(s.str());
  Json weighted = Json::array();
  for (const WeightedFactor& w : c.weighted) weighted.push_back({{"gen", w.gen}, {"r", w.r.str()}});
  Json ideal = Json::array();
  for (const IdealFactor& f : c.ideal) ideal.push_back({{"m", f.m.str()}, {"iota", f.iota.str()}});
  Json sub = Json::object();
  for (const auto& [k, v] : substitution) sub[print(k)] = print(v);
  return Json{{"pipeline", c.pipeline}, {"delta", c.delta},     {"target", target.str()},
              {"generators", gens},     {"sos", sos},           {"weighted", weighted},
              {"ideal", ideal},         {"residual", c.residual}, {"substitution", sub}};
}

CertificateRecord certificate_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("target")) throw PreconditionError("certificate record needs a target");
  CertificateRecord rec;
  rec.target = parse_poly(j["target"]);
  rec.cert.pipeline = j.value("pipeline", "");
  rec.cert.delta = j.value("delta", 0);
  rec.cert.residual = j.value("residual", 0.0);
  if (j.contains("generators"))
    for (const Json& g : j["generators"]) rec.generators.push_back(parse_poly(g));
  if (j.contains("sos"))
    for (const Json& s : j["sos"]) rec.cert.sos.push_back(parse_poly(s));
  if (j.contains("weighted"))
    for (const Json& w : j["weighted"]) {
      const int gen = w.at("gen").get<int>();
      if (gen < 0 || gen >= static_cast<int>(rec.generators.size()))
        throw PreconditionError("weighted factor refers to a missing generator");
      rec.cert.weighted.push_back({gen, parse_poly(w.at("r"))});
    }
  if (j.contains("ideal"))
    for (const Json& f : j["ideal"]) {
      IdealFactor fac;
      fac.index = static_cast<int>(rec.cert.ideal.size());
      fac.m = parse_poly(f.at("m"));
      fac.iota = parse_poly(f.at("iota"));
      rec.cert.ideal.push_back(std::move(fac));
    }
  return rec;
}

}  // namespace ncert
