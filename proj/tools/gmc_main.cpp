// Command-line frontend: solve | compare | check | kernels.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gmc/gmc.hpp"

namespace {

struct OutputTarget {
  std::string path;

  int run(const std::function<int(std::ostream&)>& body) {
    if (path.empty()) return body(std::cout);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << path << "\n";
      return gmc::kExitParse;
    }
    return body(f);
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized matrix-chain compiler"};
  app.require_subcommand(1);

  gmc::DriverOptions opt;
  std::string problem;
  OutputTarget target;

  auto add_common = [&](CLI::App* cmd, bool needs_problem) {
    if (needs_problem)
      cmd->add_option("problem", problem, "problem file")->required();
    cmd->add_option("--registry", opt.registry_path,
                    "kernel registry file (default: built-in)");
    cmd->add_option("--metric", opt.metric_spec,
                    "cost metric: flops | table:<file>");
    cmd->add_option("--out", target.path, "write output to a file");
  };

  CLI::App* solve = app.add_subcommand("solve", "compile a chain to kernel calls");
  add_common(solve, true);
  solve->add_option("--format", opt.format, "output format: text | blas | ir");

  CLI::App* compare =
      app.add_subcommand("compare", "cost comparison against baseline strategies");
  add_common(compare, true);
  compare->add_option("--force-tree", opt.force_tree,
                      "also price a fixed parenthesization, e.g. \"((A*B)*C)*D\"");

  CLI::App* check =
      app.add_subcommand("check", "numeric verification against naive evaluation");
  add_common(check, true);
  check->add_option("--seed", opt.seed, "base seed for instantiation");
  check->add_option("--trials", opt.trials, "number of random trials");
  check->add_option("--tolerance", opt.tolerance,
                    "relative Frobenius error bound");

  CLI::App* kernels = app.add_subcommand("kernels", "list the kernel registry");
  add_common(kernels, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : gmc::kExitUsage;
  }

  if (solve->parsed())
    return target.run(
        [&](std::ostream& out) { return gmc::run_solve(problem, opt, out, std::cerr); });
  if (compare->parsed())
    return target.run(
        [&](std::ostream& out) { return gmc::run_compare(problem, opt, out, std::cerr); });
  if (check->parsed())
    return target.run(
        [&](std::ostream& out) { return gmc::run_check(problem, opt, out, std::cerr); });
  if (kernels->parsed())
    return target.run(
        [&](std::ostream& out) { return gmc::run_kernels(opt, out, std::cerr); });
  return gmc::kExitUsage;
}
