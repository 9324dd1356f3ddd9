#include "loopaccel/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "loopaccel/report.hpp"

namespace loopaccel {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string mode;
  std::string input;
  std::string solver;
  std::vector<std::string> solver_args;
  int timeout_ms = 10000;
  bool verify = false;
  std::int64_t box = -1;  // -1: pick by dimension
  std::int64_t max_n = 10;
  std::size_t sim_steps = 1000;
  std::string format = "text";
  bool trace = false;
  unsigned jobs = 1;
  std::string metering;
  std::vector<std::string> disabled;
};

struct Outcome {
  int code = kExitSuccess;
  std::string text;  // text or smtlib rendering
  json doc;
  std::string error;
};

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg = SolverConfig::from_environment();
  if (!o.solver.empty()) cfg.binary = o.solver;
  cfg.args = o.solver_args;
  cfg.timeout_ms = o.timeout_ms;
  return cfg;
}

template <typename T>
std::vector<Technique> without(std::vector<Technique> list, const T& disabled) {
  for (const auto& id : disabled) {
    auto t = technique_from_id(id);
    list.erase(std::remove(list.begin(), list.end(), *t), list.end());
  }
  return list;
}

Outcome analyze(const std::string& label, const std::string& source, const Options& o) {
  Outcome res;
  res.doc = {{"schema", kSchemaVersion}, {"input", label}, {"mode", o.mode}};
  Loop loop;
  std::optional<PolyExp> mf;
  try {
    loop = parse_loop(source);
    if (!o.metering.empty()) mf = parse_polynomial(o.metering, loop.vars);
  } catch (const Error& e) {
    res.code = kExitInputError;
    res.error = label + ": " + e.what();
    res.doc["error"] = {{"kind", "input"}, {"message", e.what()}};
    return res;
  }
  res.doc["loop"] = loop_json(loop);

  std::ostringstream text;
  if (o.format == "text") text << "input: " << label << "\n";
  bool any_success = false;
  bool unsound = false;
  try {
    SmtClient smt(solver_config(o));
    json verification = json::object();
    if (o.mode == "nonterm" || o.mode == "both") {
      NontermConfig cfg;
      cfg.sim_steps = o.sim_steps;
      cfg.priorities = without(cfg.priorities, o.disabled);
      NontermResult r = prove_nonterm(loop, smt, cfg);
      any_success = any_success || r.success();
      res.doc["nonterm"] = to_json(r, o.trace);
      if (o.format == "text") text << render_text(r, o.trace);
      if (o.format == "smtlib") text << render_smtlib(r);
      if (o.verify && r.success()) {
        try {
          VerifyReport rep = verify_certificate(loop, *r.certificate, o.sim_steps, smt, 10);
          unsound = unsound || !rep.sound() || rep.recurrence_count > 0;
          verification["nonterm"] = to_json(rep);
          if (o.format == "text") text << render_text(rep);
        } catch (const WitnessRejected& e) {
          unsound = true;
          verification["nonterm"] = {{"kind", "certificate"}, {"rejected", e.what()}, {"step", e.step()}};
          if (o.format == "text") text << "verify (certificate): witness rejected: " << e.what() << "\n";
        }
      }
    }
    if (o.mode == "accelerate" || o.mode == "both") {
      AccelConfig cfg;
      cfg.priorities = without(cfg.priorities, o.disabled);
      if (mf) {
        cfg.metering_function = mf;
        cfg.priorities.push_back(Technique::MeteringFunction);
      }
      AccelResult r = accelerate(loop, smt, cfg);
      any_success = any_success || r.success;
      res.doc["accelerate"] = to_json(r, o.trace);
      if (o.format == "text") text << render_text(r, o.trace);
      if (o.format == "smtlib") text << render_smtlib(r);
      if (o.verify && r.cf) {
        std::int64_t box = o.box >= 0 ? o.box : default_box(loop.dimension());
        VerifyReport rep = verify_acceleration(loop, r, box, o.max_n);
        unsound = unsound || !rep.sound() || (r.exact && rep.exactness_count > 0);
        verification["accelerate"] = to_json(rep);
        if (o.format == "text") text << render_text(rep);
      }
    }
    if (o.verify) res.doc["verification"] = verification;
  } catch (const SolverUnavailable& e) {
    res.code = kExitSolverError;
    res.error = std::string("solver unavailable: ") + e.what();
    res.doc["error"] = {{"kind", "solver"}, {"message", res.error}};
    return res;
  } catch (const ProtocolError& e) {
    res.code = kExitSolverError;
    res.error = std::string("solver protocol error: ") + e.what();
    res.doc["error"] = {{"kind", "solver"}, {"message", res.error}};
    return res;
  } catch (const Error& e) {
    res.code = kExitAnalysisFailed;
    res.error = label + ": " + e.what();
    res.doc["error"] = {{"kind", "analysis"}, {"message", e.what()}};
    return res;
  }
  res.code = (any_success && !unsound) ? kExitSuccess : kExitAnalysisFailed;
  res.text = text.str();
  return res;
}

int worst(int a, int b) { return std::max(a, b); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Loop acceleration and non-termination proving for single-path integer loops", "loop-accel"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--solver", o.solver, "SMT-LIB2 solver binary (default: $LOOPACCEL_SMT_BIN or z3)");
  app.add_option("--solver-arg", o.solver_args, "Extra solver argument; repeatable, replaces the defaults")
      ->allow_extra_args(false);
  app.add_option("--timeout", o.timeout_ms, "Per-query timeout in milliseconds")->check(CLI::PositiveNumber);
  app.add_flag("--verify", o.verify, "Check results with the brute-force oracle");
  app.add_option("--box", o.box, "Grid half-width for verification")->check(CLI::NonNegativeNumber);
  app.add_option("--max-n", o.max_n, "Largest iteration count checked during verification")
      ->check(CLI::PositiveNumber);
  app.add_option("--sim-steps", o.sim_steps, "Steps simulated from certificate models")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "smtlib"}));
  app.add_flag("--trace", o.trace, "Include proof steps and solver queries");
  app.add_option("--jobs", o.jobs, "Parallel workers for directory input")->check(CLI::PositiveNumber);
  app.add_option("--metering-function", o.metering, "Metering function tried after the other techniques");
  std::vector<std::string> ids;
  for (auto t : {Technique::MonotonicIncrease, Technique::MonotonicDecrease, Technique::EventualDecrease,
                 Technique::EventualIncrease, Technique::Fixpoint}) {
    ids.push_back(technique_id(t));
  }
  app.add_option("--disable", o.disabled, "Technique to leave out; repeatable")
      ->check(CLI::IsMember(ids))
      ->allow_extra_args(false);
  for (const char* mode : {"accelerate", "nonterm", "both"}) {
    auto* sub = app.add_subcommand(mode, std::string(mode == std::string("both") ? "Prove non-termination, then accelerate"
                                                     : mode == std::string("nonterm") ? "Prove non-termination"
                                                                                      : "Accelerate the loop"));
    sub->add_option("input", o.input, "Loop file, '-' for stdin, or a directory of .loop files")->required();
    sub->callback([&o, mode] { o.mode = mode; });
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitInputError;
  }

  // Collect inputs.
  std::vector<std::pair<std::string, std::string>> inputs;  // label, source
  bool batch = false;
  if (o.input == "-") {
    std::stringstream buf;
    buf << in.rdbuf();
    inputs.emplace_back("<stdin>", buf.str());
  } else {
    std::error_code ec;
    if (fs::is_directory(o.input, ec)) {
      batch = true;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(o.input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".loop") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        std::ifstream s(f);
        std::stringstream buf;
        buf << s.rdbuf();
        inputs.emplace_back(f.string(), buf.str());
      }
    } else {
      std::ifstream s(o.input);
      if (!s) {
        err << "error: cannot read " << o.input << "\n";
        return kExitInputError;
      }
      std::stringstream buf;
      buf << s.rdbuf();
      inputs.emplace_back(o.input, buf.str());
    }
  }

  std::vector<Outcome> outcomes(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      outcomes[i] = analyze(inputs[i].first, inputs[i].second, o);
    }
  };
  unsigned n_workers = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(inputs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kExitSuccess;
  json batch_doc = {{"schema", kSchemaVersion}, {"mode", o.mode}, {"results", json::array()}};
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& r = outcomes[i];
    code = worst(code, r.code);
    if (!r.error.empty()) err << "error: " << r.error << "\n";
    if (o.format == "json") {
      if (batch) {
        batch_doc["results"].push_back(r.doc);
      } else {
        out << r.doc.dump(2) << "\n";
      }
    } else {
      if (batch && i > 0) out << "\n";
      out << r.text;
    }
  }
  if (batch && o.format == "json") out << batch_doc.dump(2) << "\n";
  return code;
}

}  // namespace loopaccel
