#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "colligo/json_io.hpp"

namespace colligo {
namespace {

struct CliRun {
  int status = -1;
  std::string out;
  Json json() const { return Json::parse(out); }
};

CliRun Cli(const std::string& args) {
  const std::string cmd = std::string(COLLIGO_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.out.append(buf.data(), got);
  }
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string TempText(const std::string& name, const std::string& contents) {
  const std::string file = ::testing::TempDir() + "colligo_cli_" + name;
  std::ofstream(file) << contents;
  return file;
}

std::string Temp(const std::string& name, const Json& j) { return TempText(name, j.dump()); }

GTEST_TEST(Cli, ClassifyAndEvalShift) {
  const std::string shift = Temp("shift.json", to_json(fixtures::shift()));
  const CliRun c = Cli("classify " + shift);
  ASSERT_EQ(c.status, 0);
  EXPECT_EQ(c.json()["verdict"], "Unitary");

  const CliRun e = Cli("--z 0.5 eval " + shift);
  ASSERT_EQ(e.status, 0);
  EXPECT_EQ(e.json(), Json::parse("[[[0.5, 0.0]]]"));
}

GTEST_TEST(Cli, InfeasibleGeneratorIsAnInputError) {
  const CliRun r = Cli("gen unitary --d 2 --n 1 --p 1 --q 1");
  EXPECT_EQ(r.status, 3);
  const Json j = r.json();
  EXPECT_EQ(j["code"], "DimensionMismatch");
  EXPECT_TRUE(j.contains("message"));
  EXPECT_TRUE(j.contains("path"));
}

GTEST_TEST(Cli, MalformedInputReportsPath) {
  Json j = to_json(fixtures::shift());
  j["C"] = Json::parse("[[1, 2]]");
  const CliRun r = Cli("classify " + Temp("bad.json", j));
  EXPECT_EQ(r.status, 3);
  EXPECT_EQ(r.json()["path"], "/C/0");

  const CliRun missing = Cli("classify /nonexistent.json");
  EXPECT_EQ(missing.status, 3);
}

GTEST_TEST(Cli, GeneratedPairVerifies) {
  const CliRun gen = Cli("--seed 7 gen pair --d 2 --n 2 --p 3 --q 1");
  ASSERT_EQ(gen.status, 0);
  const Json pair = gen.json();
  const std::string phi = Temp("phi.json", pair["phi"]);
  const std::string psi = Temp("psi.json", pair["psi"]);
  const std::string w =
      Temp("w.json", Json{{"alpha", pair["alpha"]}, {"beta", pair["beta"]}});
  const CliRun v = Cli("witness-verify " + phi + " " + psi + " " + w);
  EXPECT_EQ(v.status, 0);
  EXPECT_TRUE(v.json()["passed"].get<bool>());

  // A witness for the wrong pair fails with exit 1.
  const CliRun bad = Cli("witness-verify " + psi + " " + phi + " " + w);
  EXPECT_EQ(bad.status, 1);
  EXPECT_FALSE(bad.json()["passed"].get<bool>());
}

GTEST_TEST(Cli, CoincideThenVerify) {
  const Json pair = Cli("--seed 11 gen pair --d 2 --n 2 --p 4 --q 1").json();
  const std::string phi = Temp("cphi.json", pair["phi"]);
  const std::string psi = Temp("cpsi.json", pair["psi"]);
  const CliRun c = Cli("coincide " + phi + " " + psi);
  ASSERT_EQ(c.status, 0);
  const Json out = c.json();
  EXPECT_EQ(out["verdict"], "coincident");
  for (const char* key : {"alpha", "beta", "Lambda", "Omega1", "Omega2", "pad_dim",
                          "padded_side", "residuals", "kernel_dims"}) {
    EXPECT_TRUE(out.contains(key)) << key;
  }
  const CliRun v = Cli("witness-verify " + phi + " " + psi + " " + Temp("cw.json", out));
  EXPECT_EQ(v.status, 0);
  EXPECT_LE(v.json()["residual"].get<double>(), 1e-8);
}

GTEST_TEST(Cli, NotCoincidentExitsOne) {
  const CliRun r = Cli("coincide " + Temp("s.json", to_json(fixtures::shift())) + " " +
                       Temp("s2.json", to_json(fixtures::z_squared())));
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.json()["verdict"], "not_coincident");
}

GTEST_TEST(Cli, OutputIsReproducible) {
  const std::string args = "--seed 5 gen model --d 2 --n 3 --p 4 --q 1";
  const CliRun a = Cli(args);
  const CliRun b = Cli(args);
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);

  const std::string u = Temp("m.json", a.json());
  EXPECT_EQ(Cli("model " + u).out, Cli("model " + u).out);
  const CliRun m = Cli("model " + u);
  EXPECT_EQ(m.status, 0);
  EXPECT_TRUE(m.json()["passed"].get<bool>());
}

GTEST_TEST(Cli, GramAndJreduce) {
  const std::string shift = Temp("gshift.json", to_json(fixtures::shift()));
  const std::string pts = TempText("pts.json", "[[0.1], [[0, 0.5]]]");
  const CliRun g = Cli("gram " + shift + " " + pts);
  ASSERT_EQ(g.status, 0);
  EXPECT_TRUE(g.json()["psd"].get<bool>());
  EXPECT_EQ(g.json()["gram"].size(), 2u);

  const CliRun j = Cli("jreduce " + shift);
  ASSERT_EQ(j.status, 0);
  EXPECT_EQ(j.json()["n_space_dim"], 1);
}

GTEST_TEST(Cli, UsageErrorsExitThree) {
  EXPECT_EQ(Cli("").status, 3);
  EXPECT_EQ(Cli("no-such-command").status, 3);
}

}  // namespace
}  // namespace colligo
