#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "kcontract/io/model_spec.hpp"

using kc::io::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(KC_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("kcontract_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, Counts) {
  const Outcome r = run("counts --n 10 --k 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out), json::parse(R"({"N1":1036,"N2":92})"));
}

TEST(Cli, AnalyzeLin) {
  const std::string m = write_temp("diag.json", R"({"kind":"linear","A":[[1,0],[0,-3]]})");
  Outcome r = run("analyze-lin --model " + m + " --k 2");
  EXPECT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("verdict"), "accept");
  EXPECT_NEAR(j.at("margins")[0].at("margin").get<double>(), -2.0, 1e-12);
  EXPECT_EQ(j.at("inputs_digest").get<std::string>().size(), 16u);
  r = run("analyze-lin --model " + m + " --k 1");
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("counts --n 3").code, 2);
  EXPECT_EQ(run("analyze-lin --model /nonexistent.json --k 2").code, 2);
  const std::string bad = write_temp("bad.json", R"({"kind":"linear","A":[[1,2]]})");
  EXPECT_EQ(run("analyze-lin --model " + bad + " --k 1").code, 2);
  const std::string nl = write_temp("nl.json", R"({"kind":"nonlinear","dim":1,"f":["-x1"],"A0":[[-1]]})");
  EXPECT_EQ(run("analyze-lin --model " + nl + " --k 1").code, 2);
  EXPECT_EQ(run("reproduce lorenz").code, 2);
}

TEST(Cli, CertifyAndVerifyLinear) {
  const std::string m = write_temp("lin3.json", R"({"kind":"linear","A":[[1,2,0],[-1,-3,1],[0,0,-2]]})");
  const auto cert = (std::filesystem::temp_directory_path() / "kcontract_test_cert.json").string();
  Outcome r = run("certify-lin --model " + m + " --k 2 --out " + cert);
  EXPECT_EQ(r.code, 0);
  r = run("certify-lin --model " + m + " --k 2 --cert " + cert);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(run("certify-lin --model " + m + " --k 1").code, 1);
}

TEST(Cli, SynthLinAndStabilizable) {
  const std::string m = write_temp("di.json", R"({"kind":"linear","A":[[0,1],[0,0]],"B":[[0],[1]]})");
  EXPECT_EQ(run("stabilizable --model " + m + " --k 1").code, 0);
  const Outcome r = run("synth-lin --model " + m + " --k 1 --rho 10");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("K")[0].size(), 2u);
  const std::string u = write_temp("unc.json", R"({"kind":"linear","A":[[1,0],[0,1]],"B":[[0],[0]]})");
  EXPECT_EQ(run("stabilizable --model " + u + " --k 2").code, 1);
  EXPECT_EQ(run("synth-lin --model " + u + " --k 2").code, 1);
}

TEST(Cli, VerifyNlPrinted) {
  const Outcome r = run("verify-nl --model rossler_mod --cert " + std::string(KC_DATA_DIR) +
                    "/certificates/rossler_mod_printed.json");
  // default box [-2,2]^3 is far larger than the attractor
  EXPECT_EQ(r.code, 1);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("slack"), 1e-2);
}

TEST(Cli, SimulateWritesCsv) {
  const std::string m = write_temp("decay.json", R"({"kind":"linear","A":[[-1,0],[0,-2]]})");
  const auto csv = (std::filesystem::temp_directory_path() / "kcontract_test_trace.csv").string();
  const Outcome r = run("simulate --model " + m + " --x0 1,1 --t 1 --h 0.01 --compound 1 --out " + csv);
  EXPECT_EQ(r.code, 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x1,x2,compound_norm");
  EXPECT_EQ(run("simulate --model " + m + " --x0 1,1,1 --t 1").code, 2);
}

TEST(Cli, VolumeAndDeterminism) {
  const std::string m = write_temp("vol.json", R"({"kind":"linear","A":[[-1,0],[0,-2]]})");
  const Outcome a = run("volume --model " + m + " --grid 64 --t 1 --x0 0,0");
  const Outcome b = run("volume --model " + m + " --grid 64 --t 1 --x0 0,0");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NEAR(json::parse(a.out).at("volume_final").get<double>(), std::exp(-3.0), 1e-2);
}
