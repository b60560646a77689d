#pragma once

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gmc/baselines.hpp"
#include "gmc/builtin_registries.hpp"
#include "gmc/codegen.hpp"
#include "gmc/executor.hpp"

namespace gmc {

/// Stable exit-code contract of the command-line frontend.
enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitUnsolvable = 3,
  kExitNumeric = 4,
};

struct DriverOptions {
  std::string registry_path;         // empty: built-in default registry
  std::string metric_spec = "flops"; // flops | table:<file>
  std::string format = "text";       // text | blas | ir
  std::uint64_t seed = 0;
  int trials = 10;
  std::string force_tree; // compare: extra row with a fixed parenthesization
  double tolerance = 1e-8;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::SyntaxError, "cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Registry registry_for(const DriverOptions& opt) {
  if (opt.registry_path.empty()) return default_registry();
  return load_registry(read_file(opt.registry_path));
}

inline CostMetric metric_for(const DriverOptions& opt) {
  if (opt.metric_spec == "flops") return flop_metric();
  if (opt.metric_spec.rfind("table:", 0) == 0)
    return table_metric(read_file(opt.metric_spec.substr(6)));
  throw Error(ErrorKind::SyntaxError,
              "unknown metric '" + opt.metric_spec +
                  "' (expected flops or table:<file>)");
}

inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
  case ErrorKind::Unsolvable:
  case ErrorKind::UnsolvableRange:
    return kExitUnsolvable;
  case ErrorKind::SingularSystem:
    return kExitNumeric;
  default:
    return kExitParse;
  }
}

/// Parses "((A*B)*(C*D))*E" into a ParenTree over the chain's factors,
/// requiring the leaf names to appear in chain order.
inline ParenTree parse_tree_spec(const std::string& text, const Chain& chain) {
  struct TreeCursor {
    const std::string& s;
    std::size_t pos = 0;
    const Chain& chain;
    std::size_t next_leaf = 0;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    }
    ParenTree parse_expr() {
      ParenTree t = parse_term();
      skip_ws();
      while (pos < s.size() && s[pos] == '*') {
        ++pos;
        t = ParenTree::node(std::move(t), parse_term());
        skip_ws();
      }
      return t;
    }
    ParenTree parse_term() {
      skip_ws();
      if (pos < s.size() && s[pos] == '(') {
        ++pos;
        ParenTree t = parse_expr();
        skip_ws();
        if (pos >= s.size() || s[pos] != ')')
          throw Error(ErrorKind::SyntaxError, "expected ')' in tree spec");
        ++pos;
        return t;
      }
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      if (start == pos)
        throw Error(ErrorKind::SyntaxError, "expected a factor name in tree spec");
      std::string name = s.substr(start, pos - start);
      if (next_leaf >= chain.length() ||
          chain.factors[next_leaf].operand.name != name)
        throw Error(ErrorKind::SyntaxError,
                    "tree spec names must follow the chain order; got '" +
                        name + "'");
      return ParenTree::leaf(static_cast<int>(next_leaf++));
    }
  };
  TreeCursor c{text, 0, chain, 0};
  ParenTree t = c.parse_expr();
  c.skip_ws();
  if (c.pos != text.size())
    throw Error(ErrorKind::SyntaxError, "trailing input in tree spec");
  if (c.next_leaf != chain.length())
    throw Error(ErrorKind::SyntaxError,
                "tree spec does not cover every chain factor");
  return t;
}

inline std::vector<std::string> chain_names(const Chain& chain) {
  std::vector<std::string> names;
  for (const Factor& f : chain.factors)
    names.push_back(f.operand.name + mod_suffix(f.mod));
  return names;
}

} // namespace detail

/// solve: parse, run the solver, emit the plan in the requested format.
inline int run_solve(const std::string& problem_path, const DriverOptions& opt,
                     std::ostream& out, std::ostream& err) {
  try {
    ProblemFile pf = parse_problem(detail::read_file(problem_path));
    for (const std::string& w : pf.warnings) err << "warning: " << w << "\n";
    Registry reg = detail::registry_for(opt);
    CostMetric metric = detail::metric_for(opt);
    Plan plan = solve_chain(pf.assignment, reg, metric);
    if (opt.format == "ir") {
      out << emit_ir(plan);
    } else if (opt.format == "blas") {
      out << emit_blas_calls(plan);
      out << "# total cost (" << metric.name << "): " << plan.total_cost.str()
          << "\n";
    } else if (opt.format == "text") {
      out << "# " << pf.assignment.target << " :=";
      for (const Factor& f : pf.assignment.factors)
        out << " " << f.operand.name << mod_suffix(f.mod)
            << (&f == &pf.assignment.factors.back() ? "" : " *");
      out << "\n";
      out << emit_text_plan(plan);
      out << "# total cost (" << metric.name << "): " << plan.total_cost.str()
          << "\n";
    } else {
      err << "error: unknown format '" << opt.format << "'\n";
      return kExitUsage;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  }
}

/// compare: cost of the solver against the baseline strategies.
inline int run_compare(const std::string& problem_path,
                       const DriverOptions& opt, std::ostream& out,
                       std::ostream& err) {
  try {
    ProblemFile pf = parse_problem(detail::read_file(problem_path));
    for (const std::string& w : pf.warnings) err << "warning: " << w << "\n";
    const Chain& chain = pf.assignment;
    Registry reg = detail::registry_for(opt);
    CostMetric metric = detail::metric_for(opt);
    std::vector<std::string> names = detail::chain_names(chain);

    DPTables gmc_tables = solve(chain, reg, metric);
    CostValue gmc_cost = gmc_tables.total_cost();

    struct Row {
      std::string strategy;
      CostValue cost = CostValue::unreachable();
      std::string tree = "-";
    };
    std::vector<Row> rows;
    {
      Row r{"gmc", gmc_cost};
      if (gmc_tables.solvable()) r.tree = solution_tree(gmc_tables).str(names);
      rows.push_back(std::move(r));
    }
    {
      Row r{"classic-gemm-only"};
      DPTables t = solve(chain, gemm_only_registry(), metric);
      if (t.solvable()) {
        r.cost = t.total_cost();
        r.tree = solution_tree(t).str(names);
      }
      rows.push_back(std::move(r));
    }
    {
      Row r{"left-to-right"};
      ParenTree t = left_deep_tree(chain.length());
      if (auto p = plan_for_tree(chain, t, reg, metric)) {
        r.cost = p->total_cost;
        r.tree = t.str(names);
      }
      rows.push_back(std::move(r));
    }
    {
      Row r{"armadillo"};
      ParenTree t = armadillo_heuristic(chain);
      r.tree = t.str(names);
      if (auto p = plan_for_tree(chain, t, reg, metric)) r.cost = p->total_cost;
      rows.push_back(std::move(r));
    }
    if (!opt.force_tree.empty()) {
      Row r{"forced"};
      ParenTree t = detail::parse_tree_spec(opt.force_tree, chain);
      r.tree = t.str(names);
      if (auto p = plan_for_tree(chain, t, reg, metric)) r.cost = p->total_cost;
      rows.push_back(std::move(r));
    }

    out << std::left << std::setw(18) << "strategy" << std::setw(16) << "cost"
        << std::setw(9) << "ratio"
        << "parenthesization\n";
    for (const Row& r : rows) {
      std::string cost_str =
          r.cost.is_unreachable() ? "unsolvable" : r.cost.str();
      std::string ratio = "-";
      if (!r.cost.is_unreachable() && !gmc_cost.is_unreachable() &&
          r.cost.is_scalar() && gmc_cost.is_scalar() &&
          gmc_cost.scalar_value() > 0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f",
                      r.cost.scalar_value() / gmc_cost.scalar_value());
        ratio = buf;
      }
      out << std::left << std::setw(18) << r.strategy << std::setw(16)
          << cost_str << std::setw(9) << ratio << r.tree << "\n";
    }
    if (!gmc_tables.solvable()) {
      err << "error: chain is unsolvable with the given registry\n";
      return kExitUnsolvable;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  }
}

/// check: execute the plan on random instantiations and compare against the
/// naive reference evaluation.
inline int run_check(const std::string& problem_path, const DriverOptions& opt,
                     std::ostream& out, std::ostream& err) {
  try {
    ProblemFile pf = parse_problem(detail::read_file(problem_path));
    for (const std::string& w : pf.warnings) err << "warning: " << w << "\n";
    Registry reg = detail::registry_for(opt);
    CostMetric metric = detail::metric_for(opt);
    Plan plan = solve_chain(pf.assignment, reg, metric);
    out << "plan: " << plan.calls.size() << " kernel calls, total cost ("
        << metric.name << "): " << plan.total_cost.str() << "\n";
    out << "trials: " << opt.trials << ", base seed: " << opt.seed << "\n";

    std::vector<TrialFailure> failures;
    ExecReport report = verify_plan(plan, pf.assignment, pf.definitions,
                                    opt.seed, opt.trials, opt.tolerance,
                                    &failures);
    for (const TrialFailure& f : failures)
      err << "trial " << f.trial << ": " << f.message
          << " (re-drawn once, still singular)\n";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", report.max_rel_error);
    out << "max relative error: " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.0e", opt.tolerance);
    out << "result: " << (report.pass ? "PASS" : "FAIL") << " (tolerance "
        << buf << ")\n";
    if (!failures.empty())
      err << "error: " << failures.size() << " trial(s) hit singular systems\n";
    return report.pass ? kExitOk : kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  }
}

/// kernels: list the registry.
inline int run_kernels(const DriverOptions& opt, std::ostream& out,
                       std::ostream& err) {
  try {
    Registry reg = detail::registry_for(opt);
    for (const KernelPtr& k : reg.kernels()) {
      out << std::left << std::setw(12) << k->name << std::setw(11)
          << pattern_info(k->pattern).token << std::setw(44)
          << k->constraints_str() << k->cost.text() << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  }
}

} // namespace gmc
