#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "loopaccel/cli.hpp"
#include "support.hpp"

using namespace loopaccel;
using namespace testing_support;
using json = nlohmann::ordered_json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "loop-accel");
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string loop_file(const char* name) { return corpus(std::string(name) + ".loop"); }

TEST(Cli, AccelerateNonDec) {
  CliRun r = cli({"accelerate", loop_file("t_nondec")});
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("acceleration: accelerated"), std::string::npos);
  EXPECT_NE(r.out.find("exact: true"), std::string::npos);
  EXPECT_NE(r.out.find("x1 - n + 1 > 0"), std::string::npos);
  EXPECT_NE(r.out.find("x2 > 0"), std::string::npos);
}

TEST(Cli, NontermFixpointJson) {
  CliRun r = cli({"nonterm", loop_file("t_fixpoint"), "--format", "json"});
  ASSERT_EQ(r.code, kExitSuccess) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j.begin().key(), "schema");
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["mode"], "nonterm");
  EXPECT_EQ(j["nonterm"]["status"], "certificate");
  auto clauses = j["nonterm"]["certificate"]["clauses"].get<std::vector<std::string>>();
  EXPECT_EQ(clauses, (std::vector<std::string>{"x1 > 0", "x1 - x2 == 0"}));
  auto w = j["nonterm"]["certificate"]["witness"];
  EXPECT_EQ(w["x1"], w["x2"]);
  EXPECT_EQ(j["nonterm"]["certificate"]["simulated_steps"], 1000);
}

TEST(Cli, NontermFailsOnTerminatingLoop) {
  CliRun r = cli({"nonterm", loop_file("t_nondec")});
  EXPECT_EQ(r.code, kExitAnalysisFailed);
  EXPECT_NE(r.out.find("no certificate found"), std::string::npos);
}

TEST(Cli, NonTriangularFailsWithLeftover) {
  CliRun r = cli({"accelerate", loop_file("rotation"), "--format", "json"});
  EXPECT_EQ(r.code, kExitAnalysisFailed);
  json j = json::parse(r.out);
  EXPECT_EQ(j["accelerate"]["status"], "failed");
  EXPECT_FALSE(j["accelerate"]["leftover"].empty());
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(cli({"accelerate", "-"}, "vars: x; guard: x > 0; update: x := x / 2").code, kExitInputError);
  EXPECT_EQ(cli({"accelerate", "/no/such/file.loop"}).code, kExitInputError);
  EXPECT_EQ(cli({"accelerate"}).code, kExitInputError);
  EXPECT_EQ(cli({"frobnicate", loop_file("t_inc")}).code, kExitInputError);
  EXPECT_EQ(cli({"accelerate", loop_file("t_inc"), "--format", "xml"}).code, kExitInputError);
  EXPECT_EQ(cli({"accelerate", loop_file("t_inc"), "--timeout", "0"}).code, kExitInputError);
  CliRun bad = cli({"nonterm", "-", "--format", "json"}, "vars: x; guard: y > 0; update: x := x");
  EXPECT_EQ(bad.code, kExitInputError);
  EXPECT_EQ(json::parse(bad.out)["error"]["kind"], "input");
}

TEST(Cli, SolverErrors) {
  EXPECT_EQ(cli({"accelerate", loop_file("t_inc"), "--solver", "/nonexistent/z3"}).code, kExitSolverError);
  EXPECT_EQ(cli({"nonterm", loop_file("t_inc"), "--solver", "/bin/sh", "--solver-arg", "-c", "--solver-arg",
                 "echo nonsense; sleep 5"})
                .code,
            kExitSolverError);
}

TEST(Cli, Stdin) {
  CliRun r = cli({"nonterm", "-"}, "vars: x; guard: x > 0; update: x := x + 1;");
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("nonterm: certificate found"), std::string::npos);
}

TEST(Cli, BothMode) {
  CliRun r = cli({"both", loop_file("t_evinc"), "--format", "json"});
  EXPECT_EQ(r.code, kExitSuccess);
  json j = json::parse(r.out);
  EXPECT_EQ(j["nonterm"]["status"], "certificate");
  EXPECT_EQ(j["accelerate"]["status"], "accelerated");
  EXPECT_EQ(j["accelerate"]["exact"], false);
  // Nonterm section comes first.
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  auto pos = [&](const std::string& k) { return std::find(keys.begin(), keys.end(), k) - keys.begin(); };
  EXPECT_LT(pos("nonterm"), pos("accelerate"));
  EXPECT_EQ(cli({"both", loop_file("rotation")}).code, kExitAnalysisFailed);
  EXPECT_EQ(cli({"both", loop_file("t_exp")}).code, kExitSuccess);
}

TEST(Cli, VerifyReports) {
  CliRun r = cli({"both", loop_file("t_evinc"), "--verify", "--format", "json"});
  EXPECT_EQ(r.code, kExitSuccess);
  json v = json::parse(r.out)["verification"];
  EXPECT_EQ(v["accelerate"]["soundness_violations"], 0);
  EXPECT_GT(v["accelerate"]["exactness_violations"].get<int>(), 0);
  EXPECT_EQ(v["accelerate"]["box"], 3);
  EXPECT_EQ(v["nonterm"]["soundness_violations"], 0);
  EXPECT_EQ(v["nonterm"]["recurrence_violations"], 0);
  EXPECT_EQ(v["nonterm"]["models"], 11);
  CliRun t = cli({"accelerate", loop_file("t_2cinvs"), "--verify", "--box", "2", "--max-n", "5"});
  EXPECT_EQ(t.code, kExitSuccess);
  EXPECT_NE(t.out.find("soundness violations 0"), std::string::npos) << t.out;
}

TEST(Cli, Trace) {
  CliRun r = cli({"accelerate", loop_file("t_nondec"), "--trace", "--format", "json"});
  json trace = json::parse(r.out)["accelerate"]["trace"];
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_EQ(trace[0]["title"], "Conditional Acceleration via Monotonic Increase");
  EXPECT_EQ(trace[1]["technique"], "monotonic-decrease");
  ASSERT_FALSE(trace[0]["queries"].empty());
  EXPECT_EQ(trace[0]["queries"][0]["verdict"], "proved");
  CliRun text = cli({"nonterm", loop_file("nt_four"), "--trace"});
  EXPECT_NE(text.out.find("Non-Termination via Fixpoints"), std::string::npos);
}

TEST(Cli, Smtlib) {
  CliRun r = cli({"accelerate", loop_file("t_exp"), "--format", "smtlib"});
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("(set-logic QF_NIA)"), std::string::npos);
  EXPECT_NE(r.out.find("(assert (> (+ (- x1 n) 1) 0))"), std::string::npos);
  // Exponential bindings only survive as comments.
  std::istringstream lines(r.out);
  bool saw_binding = false;
  for (std::string line; std::getline(lines, line);) {
    if (line.find("2^n") == std::string::npos) continue;
    saw_binding = true;
    EXPECT_EQ(line.rfind(";", 0), 0u) << line;
  }
  EXPECT_TRUE(saw_binding);
}

TEST(Cli, DisableAndMetering) {
  CliRun nomi = cli({"accelerate", loop_file("t_nondec"), "--disable", "monotonic-increase", "--format", "json"});
  EXPECT_EQ(json::parse(nomi.out)["accelerate"]["status"], "accelerated");
  CliRun mf = cli({"accelerate", loop_file("t_exp"), "--disable", "monotonic-decrease", "--disable", "eventual-decrease",
                "--disable", "eventual-increase", "--metering-function", "x1", "--format", "json", "--trace"});
  json j = json::parse(mf.out)["accelerate"];
  EXPECT_EQ(j["status"], "accelerated");
  EXPECT_EQ(j["trace"].back()["technique"], "metering-function");
  EXPECT_EQ(cli({"accelerate", loop_file("t_exp"), "--metering-function", "x1/2"}).code, kExitInputError);
  EXPECT_EQ(cli({"accelerate", loop_file("t_exp"), "--disable", "magic"}).code, kExitInputError);
}

TEST(Cli, Deterministic) {
  for (const char* mode : {"accelerate", "nonterm", "both"}) {
    CliRun a = cli({mode, loop_file("nt_four"), "--format", "json", "--trace"});
    CliRun b = cli({mode, loop_file("nt_four"), "--format", "json", "--trace"});
    EXPECT_EQ(a.out, b.out) << mode;
  }
}

TEST(Cli, BatchModeMatchesSingleRuns) {
  CliRun serial = cli({"both", LOOPACCEL_CORPUS_DIR, "--format", "json"});
  CliRun parallel = cli({"both", LOOPACCEL_CORPUS_DIR, "--format", "json", "--jobs", "4"});
  EXPECT_EQ(serial.out, parallel.out);
  // rotation fails, so the batch reports failure.
  EXPECT_EQ(serial.code, kExitAnalysisFailed);
  json j = json::parse(serial.out);
  EXPECT_EQ(j["schema"], 1);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(LOOPACCEL_CORPUS_DIR))
    files += e.path().extension() == ".loop";
  ASSERT_EQ(j["results"].size(), files);
  for (const auto& r : j["results"]) {
    std::string input = r["input"];
    CliRun single = cli({"both", input, "--format", "json"});
    EXPECT_EQ(json::parse(single.out), r) << input;
  }
}

TEST(Cli, Binary) {
  // The installed entry point forwards exit codes unchanged.
  auto status = [](const std::string& cmd) {
    int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  std::string bin = LOOPACCEL_CLI_BINARY;
  EXPECT_EQ(status(bin + " accelerate " + loop_file("t_nondec")), 0);
  EXPECT_EQ(status(bin + " nonterm " + loop_file("t_nondec")), 1);
  EXPECT_EQ(status("echo 'vars: x; guard: x != 0; update: x := x' | " + bin + " nonterm -"), 2);
  EXPECT_EQ(status("LOOPACCEL_SMT_BIN=/nonexistent " + bin + " nonterm " + loop_file("t_inc")), 3);
  EXPECT_EQ(status(bin + " --help"), 0);
}

}  // namespace
