#include "colligo/json_io.hpp"

#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

namespace colligo {
namespace {

// Runs f and returns the path of the InputError it throws.
template <typename F>
std::string ErrorPath(F&& f) {
  try {
    f();
  } catch (const InputError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    return e.path();
  }
  ADD_FAILURE() << "expected InputError";
  return "";
}

GTEST_TEST(ComplexFromJson, PairsAndBareNumbers) {
  EXPECT_EQ(complex_from_json(Json::parse("[1.5, -2]"), ""), cplx(1.5, -2));
  EXPECT_EQ(complex_from_json(Json::parse("0.25"), ""), cplx(0.25, 0));
  EXPECT_EQ(ErrorPath([] { complex_from_json(Json::parse("[1, 2, 3]"), "/x"); }), "/x");
  EXPECT_EQ(ErrorPath([] { complex_from_json(Json::parse("[1, \"a\"]"), "/x"); }), "/x/1");
}

GTEST_TEST(MatrixFromJson, ShapeChecks) {
  const MatrixXc m = matrix_from_json(Json::parse("[[1, [0, 1]], [2, 3]]"), "");
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(0, 1), cplx(0, 1));

  // Zero rows keeps the requested column count.
  EXPECT_EQ(matrix_from_json(Json::array(), "", 0, 3).cols(), 3);

  EXPECT_EQ(ErrorPath([] { matrix_from_json(Json::parse("[[1, 2], [3]]"), "/M"); }), "/M/1");
  EXPECT_EQ(ErrorPath([] { matrix_from_json(Json::parse("[[1, 2]]"), "/M", 2, 2); }), "/M");
  EXPECT_EQ(ErrorPath([] { matrix_from_json(Json::parse("[[1, 2]]"), "/M", 1, 3); }),
            "/M/0");
  EXPECT_EQ(ErrorPath([] { matrix_from_json(Json::parse("{}"), "/M"); }), "/M");
}

GTEST_TEST(Colligation, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int d = 1 + seed % 3;
    const Colligation u =
        random_colligation(d, seed % 4, 2 + seed % 2, 1 + seed % 2, Verdict::Contractive, seed);
    // Text round trip through the default number formatting.
    const Colligation v = colligation_from_json(Json::parse(to_json(u).dump()));
    EXPECT_EQ(v.d, u.d);
    EXPECT_EQ(v.n, u.n);
    EXPECT_EQ(v.op(), u.op());
  }
}

GTEST_TEST(Colligation, ErrorPaths) {
  Json j = to_json(fixtures::constant_row());
  j["B"][1][0][1] = "x";
  EXPECT_EQ(ErrorPath([&] { colligation_from_json(j); }), "/B/1/0/1");

  j = to_json(fixtures::constant_row());
  j.erase("C");
  EXPECT_EQ(ErrorPath([&] { colligation_from_json(j); }), "/C");

  j = to_json(fixtures::constant_row());
  j["A"].erase(1);
  EXPECT_EQ(ErrorPath([&] { colligation_from_json(j); }), "/A");

  j = to_json(fixtures::constant_row());
  j["n"] = -1;
  EXPECT_EQ(ErrorPath([&] { colligation_from_json(j); }), "/n");

  j = to_json(fixtures::constant_row());
  j["D"] = Json::parse("[[0, 1, 2]]");
  EXPECT_EQ(ErrorPath([&] { colligation_from_json(j, "/first"); }), "/first/D/0");
}

GTEST_TEST(Points, ParseAndCheckDimension) {
  const std::vector<Point> pts =
      points_from_json(Json::parse("[[[0.1, 0], 0.2], [0, [0, 0.3]]]"), 2);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1](1), cplx(0, 0.3));
  EXPECT_EQ(ErrorPath([] { points_from_json(Json::parse("[[0.1, 0.2], [0.3]]"), 2); }), "/1");
}

GTEST_TEST(Witnesses, RoundTrip) {
  Rng rng(3);
  CoincidenceWitness w{random_unitary(3, rng), random_unitary(2, rng), 1.5e-13};
  const CoincidenceWitness back =
      coincidence_witness_from_json(Json::parse(to_json(w).dump()));
  EXPECT_EQ(back.alpha, w.alpha);
  EXPECT_EQ(back.beta, w.beta);
  EXPECT_EQ(back.residual, w.residual);

  UnitaryCoincidenceWitness u;
  u.Lambda = random_unitary(2, rng);
  u.Omega1 = random_unitary(4, rng);
  u.Omega2 = random_unitary(1, rng);
  u.pad_dim = 1;
  u.padded_side = Side::Second;
  const UnitaryCoincidenceWitness ub = unitary_witness_from_json(to_json(u));
  EXPECT_EQ(ub.Omega1, u.Omega1);
  EXPECT_EQ(ub.pad_dim, 1);
  EXPECT_EQ(ub.padded_side, Side::Second);

  Json bad = to_json(u);
  bad["padded_side"] = "left";
  EXPECT_EQ(ErrorPath([&] { unitary_witness_from_json(bad); }), "/padded_side");
}

GTEST_TEST(ReadJsonFile, MissingAndMalformed) {
  EXPECT_EQ(ErrorPath([] { read_json_file("/nonexistent/colligation.json"); }),
            "/nonexistent/colligation.json");

  const std::string file = ::testing::TempDir() + "json_io_malformed.json";
  std::ofstream(file) << "{\"d\": 1,";
  EXPECT_EQ(ErrorPath([&] { read_json_file(file); }), file);
  std::remove(file.c_str());
}

}  // namespace
}  // namespace colligo
