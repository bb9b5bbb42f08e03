#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "zsdim/checklist.hpp"
#include "zsdim/commands.hpp"

namespace {

using zsdim::cli::Report;
using zsdim::cli::RunConfig;

struct Flags {
  std::string config;
  std::string instance;
  std::size_t n_max = 0;
  std::size_t depth_cap = 0;
  std::size_t budget = 0;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file (keys mirror the flags)");
  cmd->add_option("--instance", f.instance, "preset name (NAME or NAME:d) or path to an instance JSON");
  cmd->add_option("--n-max", f.n_max, "largest n for shatter profiles");
  cmd->add_option("--depth-cap", f.depth_cap, "largest tree depth for Littlestone searches");
  cmd->add_option("--budget", f.budget, "stream points scanned per search");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&f](std::uint64_t s) {
        f.seed = s;
        f.seed_set = true;
      },
      "seed for randomized checks");
}

RunConfig build_config(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg.merge(zsdim::cli::read_json_file(f.config));
  if (!f.instance.empty()) {
    cfg.instance = f.instance;
    cfg.instance_given = true;
  }
  if (f.n_max) cfg.n_max = f.n_max;
  if (f.depth_cap) cfg.depth_cap = f.depth_cap;
  if (f.budget) cfg.budget = f.budget;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.format.empty()) cfg.format = f.format;
  if (f.seed_set) cfg.seed = f.seed;
  cfg.validate();
  return cfg;
}

void emit(const Report& r, const RunConfig& cfg) {
  if (cfg.format == "csv" && r.results.contains("csv")) {
    std::cout << r.results["csv"].get<std::string>();
  } else if (cfg.format == "csv") {
    std::cout << "check,assertion,passed\n";
    for (const auto& c : r.checks) std::cout << '"' << c.name << "\"," << c.assertion << ',' << (c.passed ? "true" : "false") << '\n';
  } else {
    std::cout << r.to_json().dump(2) << '\n';
  }
  for (const auto& c : r.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << '\n';
  }
  if (!cfg.out.empty() && r.command != "export") {
    zsdim::cli::write_file(cfg.out, r.command + ".json", r.to_json().dump(2) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact VC and Littlestone dimensions of zero-set families"};
  app.require_subcommand(1);
  Flags flags;
  auto* analyze = app.add_subcommand("analyze", "independence, trace family, dimensions and profiles");
  auto* shatter = app.add_subcommand("shatter-fn", "pi(n) and rho(n) against C(n, <= d-1)");
  auto* verify = app.add_subcommand("verify-paper", "run the theorem checklist");
  auto* exporter = app.add_subcommand("export", "write CSV tables and JSON bundles");
  auto* bundle = app.add_subcommand("verify-bundle", "re-check an exported bundle");
  for (auto* c : {analyze, shatter, verify, exporter}) add_common(c, flags);
  std::string bundle_path;
  bundle->add_option("path", bundle_path, "bundle file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : zsdim::cli::kInvalidInput;
  }

  try {
    if (*bundle) {
      const Report r = zsdim::cli::cmd_verify_bundle(bundle_path);
      RunConfig cfg;
      emit(r, cfg);
      return r.exit_code();
    }
    const RunConfig cfg = build_config(flags);
    Report r;
    if (*analyze) {
      r = zsdim::cli::cmd_analyze(cfg);
    } else if (*shatter) {
      r = zsdim::cli::cmd_shatter_fn(cfg);
    } else if (*verify) {
      r = zsdim::cli::cmd_verify_paper(cfg);
    } else {
      r = zsdim::cli::cmd_export(cfg);
    }
    emit(r, cfg);
    return r.exit_code();
  } catch (const zsdim::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return zsdim::cli::kInvalidInput;
  } catch (const zsdim::ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return zsdim::cli::kResourceLimit;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return zsdim::cli::kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return zsdim::cli::kAssertionFailed;
  }
}
