#include "hoterm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "hoterm/search.hpp"
#include "hoterm/thf.hpp"

#ifndef HOTERM_DEFAULT_SOLVER
#define HOTERM_DEFAULT_SOLVER "z3 -in"
#endif

namespace hoterm {

namespace {

struct RunConfig {
  std::string mode;  // prove or check
  std::vector<std::string> inputs;
  std::string backend = "smt";
  std::string solver = HOTERM_DEFAULT_SOLVER;
  double timeout = 60;
  std::string params_path;
  bool print_proof = false;
  std::string dump_smt;
  bool no_timing = false;
  bool stats = false;
  int jobs = 1;
};

struct Report {
  std::string text;
  std::string error;
  int code = ExitError;
};

std::string commented(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out += "% " + line + "\n";
  return out;
}

Report run_one(const RunConfig& cfg, const std::string& path) {
  Report r;
  std::ostringstream body;
  auto start = std::chrono::steady_clock::now();
  SearchResult res;
  Problem p;
  try {
    p = load_problem_file(path);
    if (cfg.mode == "check") {
      res = check_params(p, load_params_file(cfg.params_path, p));
    } else {
      SearchConfig sc;
      sc.backend = cfg.backend == "enum" ? Backend::Enum : Backend::Smt;
      sc.solver_command = cfg.solver;
      sc.timeout_seconds = cfg.timeout;
      sc.dump_smt_path = cfg.dump_smt;
      res = prove(p, sc);
    }
  } catch (const SoundnessError& e) {
    r.text = "ERROR\n";
    r.error = path + ": internal soundness error: " + e.what();
    return r;
  } catch (const std::exception& e) {
    r.text = "ERROR\n";
    r.error = path + ": " + e.what();
    return r;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool yes = res.verdict == Verdict::Proved;
  r.code = yes ? ExitYes : ExitMaybe;
  body << (yes ? "YES" : "MAYBE") << "\n";
  if (!cfg.no_timing) body << "% time: " << std::fixed << std::setprecision(3) << secs << "\n";
  for (const auto& d : res.diagnostics) body << "% " << d << "\n";
  if (cfg.stats) {
    const auto& s = res.stats;
    double rate = s.judgments + s.memo_hits ? static_cast<double>(s.memo_hits) / static_cast<double>(s.judgments + s.memo_hits) : 0;
    body << "% stats: judgments " << s.judgments << ", memo hits " << s.memo_hits << " (" << std::fixed
         << std::setprecision(1) << 100 * rate << "%)";
    if (cfg.mode == "prove" && cfg.backend == "smt")
      body << ", definitions " << s.definitions << ", script bytes " << s.script_bytes;
    if (cfg.mode == "prove" && cfg.backend == "enum") body << ", candidates " << s.candidates;
    body << "\n";
  }
  if (yes && cfg.print_proof) {
    body << "% parameters\n" << format_params(*res.params, p);
    for (std::size_t i = 0; i < p.rules.size(); ++i)
      body << "% rule " << p.rules[i].name << "\n" << commented(format_trace(res.traces[i]));
  }
  r.text = body.str();
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Termination prover for higher-order rewrite systems", "hoterm"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("files", cfg.inputs, "Problem files in the THF subset")->required()->check(CLI::ExistingFile);
    sub->add_option("--backend", cfg.backend, "Search backend")->check(CLI::IsMember({"smt", "enum"}));
    sub->add_option("--solver", cfg.solver, "SMT solver command, run through /bin/sh");
    sub->add_option("--timeout", cfg.timeout, "Solver timeout in seconds")->check(CLI::PositiveNumber);
    sub->add_option("--params", cfg.params_path, "Parameter file (check mode)");
    sub->add_flag("--print-proof", cfg.print_proof, "Print the parameters and one proof per rule");
    sub->add_option("--dump-smt", cfg.dump_smt, "Write the SMT script to this file");
    sub->add_flag("--no-timing", cfg.no_timing, "Omit the time line");
    sub->add_flag("--stats", cfg.stats, "Print judgment counts and memo hit rates");
    sub->add_option("--jobs", cfg.jobs, "Files processed concurrently")->check(CLI::PositiveNumber);
  };
  auto* prove_cmd = app.add_subcommand("prove", "Search for parameters that orient every rule");
  auto* check_cmd = app.add_subcommand("check", "Orient every rule with the given parameters");
  add_common(prove_cmd);
  add_common(check_cmd);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitYes;
  } catch (const CLI::ParseError& e) {
    out << "ERROR\n";
    err << "hoterm: " << e.what() << "\n";
    return ExitError;
  }
  cfg.mode = prove_cmd->parsed() ? "prove" : "check";
  auto config_error = [&](const std::string& msg) {
    out << "ERROR\n";
    err << "hoterm: " << msg << "\n";
    return ExitError;
  };
  if (cfg.mode == "check" && cfg.params_path.empty()) return config_error("check mode requires --params");
  if (cfg.mode == "prove" && !cfg.params_path.empty()) return config_error("--params is only allowed in check mode");
  if (!cfg.dump_smt.empty() && (cfg.mode != "prove" || cfg.backend != "smt"))
    return config_error("--dump-smt needs prove mode with the smt backend");
  if (!cfg.dump_smt.empty() && cfg.inputs.size() > 1) return config_error("--dump-smt takes a single input file");

  std::vector<Report> reports(cfg.inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next++) < cfg.inputs.size();) reports[i] = run_one(cfg, cfg.inputs[i]);
  };
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), cfg.inputs.size());
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = ExitYes;
  bool many = cfg.inputs.size() > 1;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (many) out << (i ? "\n" : "") << "% file: " << cfg.inputs[i] << "\n";
    out << reports[i].text;
    if (!reports[i].error.empty()) err << "hoterm: " << reports[i].error << "\n";
    code = std::max(code, reports[i].code);
  }
  return code;
}

}  // namespace hoterm
