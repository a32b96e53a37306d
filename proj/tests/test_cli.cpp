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


#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ncert/cli.hpp"
#include "ncert/io.hpp"
#include "test_support.hpp"

using namespace ncert;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ncert");
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_file(const std::string& name, const std::string& content = "") {
  const auto path = std::filesystem::temp_directory_path() / ("ncert_test_" + name);
  if (!content.empty()) std::ofstream(path) << content;
  return path.string();
}

const char* kPencil = R"({"A0": [[1, 0], [0, 1]], "Ai": [[[1, 0], [0, -1]]]})";

}  // namespace

TEST_CASE("json round trips") {
  Rng rng(5);
  const Matrix m = random_gaussian(rng, 3, 2);
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  CHECK(matrix_from_json(Json::parse("[[1, [0, 2]], [3, 4]]"))(0, 1) == Complex(0.0, 2.0));
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2], [3]]")), PreconditionError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[\"a\"]]")), PreconditionError);

  const LinearPencil L = pencil_from_json(Json::parse(kPencil));
  CHECK(L.is_monic());
  CHECK(pencil_from_json(pencil_to_json(L)).to_matpoly() == L.to_matpoly());

  ExtendedPoint p(MatrixPoint{2, {random_hermitian(rng, 2)}}, {random_gaussian(rng, 2, 2)});
  const ExtendedPoint q = point_from_json(point_to_json(p));
  CHECK(q.n() == 2);
  CHECK(q.base.X[0] == p.base.X[0]);
  CHECK(q.U[0] == p.U[0]);
  CHECK_THROWS_AS(point_from_json(Json::parse(R"({"X": [[[0, 1], [2, 0]]]})")), PreconditionError);
}

TEST_CASE("certificate json round trip") {
  Certificate c;
  c.pipeline = "polynomial";
  c.delta = 1;
  c.sos.push_back(expand(parse("1")));
  c.weighted.push_back({0, expand(parse("1"))});
  const MatPoly q = expand(parse("2 - x1^2"));
  const CertificateRecord rec = certificate_from_json(certificate_to_json(c, q, {expand(parse("1 - x1^2"))}));
  CHECK(rec.target == q);
  CHECK(rec.cert.sos.size() == 1);
  CHECK(verify_certificate(rec.target, rec.cert, rec.generators) == 0.0);

  Json bad = certificate_to_json(c, q, {});
  CHECK_THROWS_AS(certificate_from_json(bad), PreconditionError);
}

TEST_CASE("cli equiv") {
  const Run a = run({"equiv", "x1*x1^-1", "1", "--json"});
  CHECK(a.code == 0);
  CHECK(a.json()["verdict"] == "equivalent-so-far");
  CHECK(a.json()["config"]["sizes"] == Json::array({1, 2, 3, 4}));

  const Run b = run({"equiv", "x1*x2", "x2*x1", "--sizes", "2", "--json"});
  CHECK(b.code == 2);
  CHECK(b.json()["verdict"] == "distinguished");
  CHECK(b.json()["distinguishing_trials"].get<int>() >= 19);
}

TEST_CASE("cli certify, verify and check-pos") {
  SUBCASE("rational") {
    const std::string path = temp_file("rational.json");
    const Run r = run({"certify", "(2-x1)^-1", "--P", "1 - x1^2", "--delta-max", "3", "--json", "-o", path});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    const Json j = Json::parse(in);
    CHECK(j["status"] == "certified");
    CHECK(j["certificate"]["pipeline"] == "rational");
    CHECK(j["certificate"]["substitution"]["u1"] == "(2 - x1)^-1");
    CHECK(j["certificate"]["residual"].get<double>() <= 1e-6);
    CHECK(j["agreement"].get<double>() <= 1e-6);
    CHECK(j["assembled"]["agreement"].get<double>() <= 1e-6);

    const Run v = run({"verify", path, "--json"});
    CHECK(v.code == 0);
    CHECK(v.json()["residual"].get<double>() <= 1e-6);

    Json tampered = j;
    tampered["certificate"]["sos"][0] = "1 + x1";
    const std::string bad = temp_file("tampered.json", tampered.dump());
    const Run t = run({"verify", bad, "--json"});
    CHECK(t.code == 2);
    CHECK(t.json()["status"] == "rejected");
  }
  SUBCASE("polynomial and not certified") {
    CHECK(run({"certify", "2 - x1^2", "--P", "1 - x1^2"}).code == 0);
    const Run r = run({"certify", "x1", "--P", "1 - x1^2", "--delta-max", "2", "--json"});
    CHECK(r.code == 2);
    CHECK(r.json()["status"] == "not_certified");
    CHECK(r.json()["witness"]["min_eigenvalue"].get<double>() < 0.0);
  }
  SUBCASE("pencil") {
    const std::string L = temp_file("pencil.json", kPencil);
    const Run r = run({"certify", "(3-x1)^-1", "--pencil", L, "--json"});
    REQUIRE(r.code == 0);
    CHECK(r.json()["certificate"]["pipeline"] == "pencil");
    CHECK(r.json()["relations"][0] == "-1 + 3*u1 - x1*u1");
    CHECK(r.json()["agreement"].get<double>() <= 1e-6);
    CHECK(run({"certify", "x1", "--pencil", L}).code == 2);
  }
  SUBCASE("check-pos") {
    const Run r = run({"check-pos", "x1", "--P", "1 - x1^2", "--json"});
    CHECK(r.code == 2);
    CHECK(r.json()["min_eigenvalue"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(run({"check-pos", "(2 - x1)^-1", "--P", "1 - x1^2"}).code == 0);
  }
}

TEST_CASE("cli reports are reproducible and embed the config") {
  const std::vector<std::string> args{"certify", "(2-x1)^-1", "--P", "1 - x1^2", "--json"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Json cfg = a.json()["config"];
  CHECK(cfg["seed"] == 0);
  CHECK(cfg["delta_max"] == 3);
  CHECK(cfg["sdp_tol"] == 1e-8);
  CHECK(cfg["sizes"] == Json::array({1, 2, 3}));
  CHECK(run({"sample-domain", "--P", "1 - x1^2", "--json"}).out ==
        run({"sample-domain", "--P", "1 - x1^2", "--json"}).out);
  CHECK(run({"sample-domain", "--P", "1 - x1^2", "--seed", "1", "--json"}).out !=
        run({"sample-domain", "--P", "1 - x1^2", "--json"}).out);
}

TEST_CASE("cli other commands") {
  const Run p = run({"parse", "x1*(1 - x1)^-1", "--json"});
  CHECK(p.code == 0);
  CHECK(p.json()["inversion_count"] == 1);
  CHECK(run({"parse", "(x1 + x2)^2", "--json"}).json()["expanded"] == "x1^2 + x1*x2 + x2*x1 + x2^2");

  const Run e = run({"eval", "[[x1, 1], [1, x1]]", "--x", "[[2]]", "--json"});
  CHECK(e.code == 0);
  CHECK(matrix_from_json(e.json()["value"]) == Matrix{{2.0, 1.0}, {1.0, 2.0}});
  CHECK(run({"eval", "(1 - x1)^-1", "--x", "[[1]]"}).code == 1);

  const Run s = run({"sample-domain", "--pencil", temp_file("pencil2.json", kPencil), "--n", "3", "--count", "4",
                     "--json"});
  CHECK(s.code == 0);
  CHECK(s.json()["points"].size() == 4);
  for (const Json& pt : s.json()["points"]) CHECK(pt["margin"].get<double>() >= -1e-9);

  const Run l = run({"lift", "(2 - x1)^-1", "--P", "1 - x1^2", "--json"});
  CHECK(l.code == 0);
  CHECK(l.json()["hat_q"] == "u1");
  CHECK(l.json()["D"][0].get<double>() == doctest::Approx(4.0));
  CHECK(l.json()["O"].size() == 6);
}

TEST_CASE("cli errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"certify", "x1"}).code == 1);
  CHECK(run({"certify", "x1", "--P", "1 - x1^2", "--pencil", "nope.json"}).code == 1);
  CHECK(run({"certify", "x1^(", "--P", "1 - x1^2"}).code == 1);
  const Run r = run({"check-pos", "x1", "--pencil", "/nonexistent/pencil.json", "--json"});
  CHECK(r.code == 1);
  CHECK(r.json()["error"] == "UsageError");
  CHECK(run({"--help"}).code == 0);
}
