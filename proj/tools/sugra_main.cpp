// sugra: list catalog backgrounds, verify catalog ids or background files.
//
// Exit codes: 0 pass, 1 fail, 2 input error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "sugra/background_file.hpp"
#include "sugra/catalog.hpp"
#include "sugra/report.hpp"

namespace {

using namespace sugra;

struct VerifyArgs {
  std::string target;
  std::optional<std::size_t> points;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string perturb;
  std::vector<std::string> params;
  std::string out;
  bool json = false;
  unsigned jobs = 0;
  bool no_timing = false;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SUGRA_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw InputError("SUGRA_SEED must be a non-negative integer");
    return v;
  }
  return 42;
}

BuildOptions build_options(const VerifyArgs& a, const CatalogInfo& info) {
  BuildOptions opts;
  for (const auto& p : a.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects KEY=EXPR, got '" + p + "'");
    opts.params[p.substr(0, eq)] = p.substr(eq + 1);
  }
  if (!a.perturb.empty()) {
    auto colon = a.perturb.find(':');
    std::string key = colon == std::string::npos ? info.perturb_key : a.perturb.substr(0, colon);
    std::string factor = colon == std::string::npos ? a.perturb : a.perturb.substr(colon + 1);
    char* end = nullptr;
    double f = std::strtod(factor.c_str(), &end);
    if (factor.empty() || *end != '\0') throw InputError("--perturb expects KEY:FACTOR, got '" + a.perturb + "'");
    opts.perturb = std::make_pair(key, f);
  }
  return opts;
}

int cmd_list() {
  for (const auto& info : catalog()) {
    std::cout << info.id << "\n  " << info.description << "\n";
    for (const auto& p : info.params) {
      std::cout << "    " << p.name << " = " << (p.default_value.empty() ? "(derived)" : p.default_value) << "  "
                << p.doc << "\n";
    }
  }
  return 0;
}

int cmd_verify(const VerifyArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<BackgroundFile> file;
  Background bg = [&] {
    if (const CatalogInfo* info = find_catalog_entry(a.target)) return build_background(a.target, build_options(a, *info));
    if (!std::filesystem::exists(a.target)) throw InputError("unknown background '" + a.target + "'");
    if (!a.perturb.empty() || !a.params.empty()) {
      throw InputError("--perturb and --param apply to catalog ids only");
    }
    file = parse_background_file(a.target);
    return file->background;
  }();

  Report r;
  r.id = bg.id;
  r.description = bg.description;
  r.seed = a.seed ? *a.seed : (file && file->seed ? *file->seed : default_seed());
  r.points = a.points ? *a.points : (file && file->points ? *file->points : 100);
  r.tolerance = a.tol ? *a.tol : (file && file->tolerance ? *file->tolerance : 1e-8);
  if (r.points == 0) throw InputError("--points must be positive");
  if (!(r.tolerance > 0.0)) throw InputError("--tol must be positive");

  VerifyOptions vo;
  vo.tolerance = r.tolerance;
  vo.jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
  r.residuals = verify(bg, SamplePlan{r.points, r.seed}, vo);
  if (!a.no_timing) {
    r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }

  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw InputError("cannot write '" + a.out + "'");
    out << format_json(r);
  }
  std::cout << (a.json ? format_json(r) : format_text(r, bg.chart));
  return r.residuals.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifier for eleven-dimensional supergravity backgrounds of product type"};
  app.require_subcommand(1);

  app.add_subcommand("list", "List catalog backgrounds and their parameters");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Verify a catalog id or a background file");
  verify_cmd->add_option("target", va.target, "Catalog id or path to a .bg file")->required();
  verify_cmd->add_option("--points", va.points, "Sample points (default 100)");
  verify_cmd->add_option("--seed", va.seed, "Sampling seed (default 42, or SUGRA_SEED)");
  verify_cmd->add_option("--tol", va.tol, "Residual tolerance (default 1e-8)");
  verify_cmd->add_option("--perturb", va.perturb, "Scale a builder parameter, KEY:FACTOR");
  verify_cmd->add_option("--param", va.params, "Override a builder parameter, KEY=EXPR");
  verify_cmd->add_option("--out", va.out, "Also write the JSON report to this path");
  verify_cmd->add_flag("--json", va.json, "Print the JSON report instead of the table");
  verify_cmd->add_option("--jobs", va.jobs, "Worker threads (default: hardware parallelism)");
  verify_cmd->add_flag("--no-timing", va.no_timing, "Report 0 ms so that output is reproducible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    return cmd_verify(va);
  } catch (const sugra::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
