// qnls <subcommand> --config <path> [--out <dir>] [--seed <n>] [--threads <n>]
//
// Exit codes: 0 success, 1 threshold failure (report written), 2 usage or
// configuration error (nothing written).

#include "qnls/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

namespace {

using Runner = std::function<qnls::ExperimentReport(const qnls::Config&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m = {
      {"identity", qnls::run_identity}, {"simulate", qnls::run_simulate}, {"decompose", qnls::run_decompose},
      {"rates", qnls::run_rates},       {"mnorm", qnls::run_mnorm},       {"lipschitz", qnls::run_lipschitz},
      {"subst", qnls::run_subst},
  };
  return m;
}

qnls::ExperimentReport run_guarded(const std::string& id, const Runner& run, const qnls::Config& cfg) {
  try {
    return run(cfg);
  } catch (const std::exception& e) {
    // Blow-up and other runtime aborts still leave a report behind.
    auto r = qnls::new_report(id, cfg);
    r.check("completed", 0.0, "run finishes", false, e.what());
    r.finished = qnls::utc_now();
    return r;
  }
}

void print_checks(const qnls::ExperimentReport& r) {
  for (const auto& c : r.checks)
    std::cout << "  " << (c.pass ? "ok   " : "FAIL ") << r.id << "." << c.name << " = " << qnls::format_real(c.value)
              << " (" << c.condition << ")" << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
}

int run_all(const qnls::Config& cfg, const std::filesystem::path& out) {
  qnls::ExperimentReport summary = qnls::new_report("acceptance", cfg);
  qnls::Table tab{"criteria", {"criterion", "title", "pass", "summary"}, {}};
  for (const auto& crit : qnls::acceptance_criteria()) {
    const auto r = run_guarded(crit.id, crit.run, cfg);
    qnls::write_report(r, out);
    const std::string line = qnls::summarize(r);
    std::cout << (r.ok() ? "PASS" : "FAIL") << " criterion " << crit.number << " (" << crit.title << "): " << line
              << std::endl;
    tab.add({static_cast<long long>(crit.number), crit.title, std::string(r.ok() ? "PASS" : "FAIL"), line});
    summary.check("criterion_" + std::to_string(crit.number), r.ok() ? 1.0 : 0.0, "== 1", r.ok(), crit.title);
  }
  summary.tables.push_back(std::move(tab));
  summary.finished = qnls::utc_now();
  qnls::write_report(summary, out);
  return summary.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for a quadratic derivative Schrodinger equation"};
  std::string sub, config_path, out_dir = "qnls_out";
  long long seed = -1, threads = -1;
  app.add_option("subcommand", sub, "identity | simulate | decompose | rates | mnorm | lipschitz | subst | all")
      ->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory (QNLS_OUT overrides)");
  app.add_option("--seed", seed, "overrides run.seed");
  app.add_option("--threads", threads, "overrides run.threads");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (sub != "all" && !runners().count(sub)) {
    std::cerr << "qnls: unknown subcommand '" << sub << "'\n";
    return 2;
  }

  qnls::Config cfg;
  try {
    cfg = qnls::Config::load(config_path);
    if (seed >= 0) cfg.set("run.seed", std::to_string(seed));
    if (threads >= 0) cfg.set("run.threads", std::to_string(threads));
    qnls::validate(cfg);
  } catch (const qnls::ConfigError& e) {
    std::cerr << "qnls: " << e.what() << "\n";
    return 2;
  }
  if (const char* env = std::getenv("QNLS_OUT"); env && *env) out_dir = env;
  const std::filesystem::path out(out_dir);

  try {
    if (sub == "all") return run_all(cfg, out);
    const auto r = run_guarded(sub, runners().at(sub), cfg);
    qnls::write_report(r, out);
    std::cout << (r.ok() ? "PASS " : "FAIL ") << sub << "\n";
    print_checks(r);
    return r.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    // Only reachable when writing artifacts fails.
    std::cerr << "qnls: " << e.what() << "\n";
    return 1;
  }
}
