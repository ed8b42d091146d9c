#include "toeplitz_forge/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "toeplitz_forge/analysis.hpp"
#include "toeplitz_forge/cli/records.hpp"
#include "toeplitz_forge/cli/verify_suite.hpp"
#include "toeplitz_forge/errors.hpp"
#include "toeplitz_forge/plan_io.hpp"
#include "toeplitz_forge/toeplitz.hpp"

namespace toeplitz_forge::cli {
namespace {

class IoError : public Error {
 public:
  using Error::Error;
};

OutputFormat format_or(const RunConfig& config, OutputFormat fallback) { return config.format.value_or(fallback); }

// Calls fn with the file at path, or with fallback when path is empty.
template <typename Fn>
void with_stream(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    fallback.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  fn(file);
  file.flush();
  if (!file) throw IoError("write to " + path + " failed");
}

ConstructionPlan load_plan(const RunConfig& config, bool require_certified) {
  ConstructionPlan plan;
  if (!config.plan_path.empty()) {
    std::ifstream in(config.plan_path, std::ios::binary);
    if (!in) throw IoError("cannot open plan " + config.plan_path);
    plan = read_plan(in);
  } else if (!config.toy_preset.empty()) {
    plan = toy_preset(config.toy_preset);
  } else {
    throw InvalidArgument("command needs --plan or --toy-preset");
  }
  if (require_certified) {
    for (const auto& c : plan.certificates) {
      if (c.verdict != Verdict::kTrue) {
        throw CertificationFailure("level " + std::to_string(c.level) + " " + c.name + ": " + c.detail);
      }
    }
  }
  return plan;
}

struct TheoremInputs {
  std::uint64_t k;
  std::size_t d;
  Rational h;
  PlannerOptions options;
};

TheoremInputs theorem_inputs(const RunConfig& config) {
  if (!config.k || !config.d || config.h.empty()) throw InvalidArgument("planning needs --k, --d and --h");
  TheoremInputs in{*config.k, *config.d, parse_rational(config.h), {}};
  in.options.digit_budget = config.digit_budget;
  in.options.symbolic_levels = config.symbolic_levels;
  in.options.lambda_iterations = config.lambda_iterations;
  in.options.tail_base = config.tail_base;
  in.options.tail_start = config.tail_start;
  return in;
}

void write_report(const RunConfig& config, std::ostream& err, const ConstructionPlan& plan,
                  const std::string& preamble) {
  with_stream(config.report, err, [&](std::ostream& s) {
    if (format_or(config, OutputFormat::kText) == OutputFormat::kRecords) {
      RecordWriter w(s);
      for (const auto& c : plan.certificates) w.certificate(c.level, c.name, to_string(c.verdict), c.detail);
      return;
    }
    s << preamble << certification_report(plan);
  });
}

int cmd_plan(const RunConfig& config, std::ostream& out, std::ostream& err) {
  ConstructionPlan plan;
  if (!config.toy_preset.empty()) {
    plan = toy_preset(config.toy_preset);
  } else {
    TheoremInputs in = theorem_inputs(config);
    plan = plan_theorem(in.k, in.d, in.h, in.options);
  }
  with_stream(config.out, out, [&](std::ostream& s) { write_plan(s, plan); });
  write_report(config, err, plan, "");
  return kExitOk;
}

int cmd_small_alphabet(const RunConfig& config, std::ostream& out, std::ostream& err) {
  TheoremInputs in = theorem_inputs(config);
  SmallAlphabetResult result = small_alphabet_pipeline(in.k, in.d, in.h, in.options);
  with_stream(config.out, out, [&](std::ostream& s) { write_plan(s, result.plan); });
  std::ostringstream pre;
  pre << "block side " << result.choice.side << ", block size s = " << result.choice.size << ", alphabet K = "
      << result.choice.alphabet << ", entropy bound " << result.choice.bound.str(12) << "\n";
  write_report(config, err, result.plan, pre.str());
  return kExitOk;
}

int cmd_patch(const RunConfig& config, std::ostream& out, bool render) {
  const ConstructionPlan plan = load_plan(config, true);
  const ArrayHandle handle = ArrayHandle::from_plan(plan, config.depth_budget);
  const FundamentalDomain box = config.box.empty() ? handle.family().domain(config.level.value_or(1))
                                                   : parse_box(config.box, handle.dim());
  const Patch p = patch(handle, box, PatchOptions{config.cell_budget, config.threads});
  const OutputFormat format = format_or(config, render ? OutputFormat::kPgm : OutputFormat::kText);
  with_stream(config.out, out, [&](std::ostream& s) {
    switch (format) {
      case OutputFormat::kText:
        write_patch_text(s, p);
        break;
      case OutputFormat::kPgm:
        write_patch_pgm(s, p, handle.alphabet_size());
        break;
      case OutputFormat::kRecords:
        RecordWriter(s).patch(p);
        break;
    }
  });
  return kExitOk;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
  if (config.point.empty()) throw InvalidArgument("eval needs --point");
  const ConstructionPlan plan = load_plan(config, true);
  const ArrayHandle handle = ArrayHandle::from_plan(plan, config.depth_budget);
  const LatticeVector g = LatticeVector::parse(config.point);
  if (g.dim() != handle.dim()) throw InvalidArgument("point dimension differs from the plan");
  const Letter letter = handle(g);
  const int level = min_zero_level(handle.family(), g, config.depth_budget);
  with_stream(config.out, out, [&](std::ostream& s) {
    if (format_or(config, OutputFormat::kText) == OutputFormat::kRecords) {
      RecordWriter(s).letter(g, letter, level);
    } else {
      s << "x" << g.str() << " = " << letter << " (least vanishing level " << level << ")\n";
    }
  });
  return kExitOk;
}

int cmd_census(const RunConfig& config, std::ostream& out) {
  if (!config.level) throw InvalidArgument("census needs --level");
  const int t = *config.level;
  const ConstructionPlan plan = load_plan(config, true);
  const ArrayHandle handle = ArrayHandle::from_plan(plan, config.depth_budget);
  const CensusOptions options{config.cell_budget, config.threads, config.window_level};
  const Census c = census(handle, t, options);
  std::string certified = "unknown";
  try {
    certified = census_count(handle, t).str();
  } catch (const Error&) {
  }
  std::optional<FrequencyReport> freq;
  if (config.frequencies) {
    freq = unique_ergodicity_probe(handle, t, ProbeOptions{config.samples, config.seed, options});
  }
  with_stream(config.out, out, [&](std::ostream& s) {
    if (format_or(config, OutputFormat::kText) == OutputFormat::kRecords) {
      RecordWriter w(s);
      w.census_summary(c, certified);
      for (std::size_t i = 0; i < c.size(); ++i) w.block(c.blocks()[i], i);
      if (freq) {
        for (std::size_t b = 0; b < freq->rows.size(); ++b) {
          for (std::size_t col = 0; col < freq->columns.size(); ++col) {
            w.frequency(freq->t, freq->s, b, col, freq->column_positions[col], freq->table[b][col]);
          }
        }
      }
      return;
    }
    s << "level " << t << " census: " << c.size() << " blocks over " << c.positions().get_str(10)
      << " aligned positions of D_" << c.window_level() << ", certified count " << certified << "\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
      s << "block " << i << ":";
      for (Letter l : c.blocks()[i].letters) s << ' ' << l;
      s << "\n";
    }
    if (freq) {
      s << "frequencies against " << freq->columns.size() << " level-" << freq->s << " blocks: "
        << (freq->passed ? "constant" : "NOT constant") << ", ap in [" << to_string(freq->min) << ", "
        << to_string(freq->max) << "]\n";
    }
  });
  return freq && !freq->passed ? kExitVerification : kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ConstructionPlan plan = load_plan(config, false);
  SuiteOptions options;
  options.seed = config.seed;
  options.samples = config.samples;
  options.cell_budget = config.cell_budget;
  options.threads = config.threads;
  options.depth_budget = config.depth_budget;
  const SuiteReport report = run_verify_suite(plan, options);
  std::size_t skipped = 0;
  for (const auto& c : report.checks) skipped += c.skipped ? 1 : 0;
  with_stream(config.out, out, [&](std::ostream& s) {
    if (format_or(config, OutputFormat::kText) == OutputFormat::kRecords) {
      RecordWriter w(s);
      for (const auto& c : report.checks) w.check(c.name, c.passed, c.skipped, c.detail);
      w.summary("verify", report.passed(), report.checks.size(), report.failures());
      return;
    }
    for (const auto& c : report.checks) {
      s << (c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
    }
    s << "verify: " << report.checks.size() << " checks, " << report.failures() << " failed, " << skipped
      << " skipped\n";
  });
  if (const SuiteCheck* f = report.first_failure()) {
    err << "first failure: " << f->name << ": " << f->detail << "\n";
    if (report.stopped_at_certification) err << "certification failed; no evaluation was run\n";
    return kExitVerification;
  }
  return kExitOk;
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::string& c = config.command;
  if (c == "plan") return cmd_plan(config, out, err);
  if (c == "small-alphabet") return cmd_small_alphabet(config, out, err);
  if (c == "patch") return cmd_patch(config, out, false);
  if (c == "render") return cmd_patch(config, out, true);
  if (c == "eval") return cmd_eval(config, out);
  if (c == "census") return cmd_census(config, out);
  if (c == "verify") return cmd_verify(config, out, err);
  throw InvalidArgument("unknown command '" + c + "'");
}

int report_error(std::ostream& err, const char* kind, const std::exception& e, int code) {
  RecordWriter(err).error(kind, e.what(), code);
  return code;
}

}  // namespace

FundamentalDomain parse_box(const std::string& text, std::size_t dim) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw FormatError("box must be 'corner:sides', got '" + text + "'");
  const LatticeVector lower = LatticeVector::parse(text.substr(0, colon));
  const LatticeVector sides = LatticeVector::parse(text.substr(colon + 1));
  if (lower.dim() != dim || sides.dim() != dim) {
    throw InvalidArgument("box '" + text + "' does not have dimension " + std::to_string(dim));
  }
  for (const auto& s : sides.coords()) {
    if (s <= 0) throw InvalidArgument("box sides must be positive");
  }
  return FundamentalDomain(0, lower, sides.coords());
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(config, out, err);
  } catch (const InfeasibleEntropy& e) {
    return report_error(err, "InfeasibleEntropy", e, kExitInfeasible);
  } catch (const InvalidArgument& e) {
    return report_error(err, "InvalidArgument", e, kExitInfeasible);
  } catch (const DepthBudgetExceeded& e) {
    return report_error(err, "DepthBudgetExceeded", e, kExitBudget);
  } catch (const BudgetExceeded& e) {
    return report_error(err, "BudgetExceeded", e, kExitBudget);
  } catch (const CertificationFailure& e) {
    return report_error(err, "CertificationFailure", e, kExitVerification);
  } catch (const FormatError& e) {
    return report_error(err, "FormatError", e, kExitFormat);
  } catch (const IoError& e) {
    return report_error(err, "IoError", e, kExitFormat);
  } catch (const std::exception& e) {
    return report_error(err, "InternalError", e, 1);
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Toeplitz array planner, evaluator and checker", "toeplitz-forge"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  const std::map<std::string, OutputFormat> formats{
      {"txt", OutputFormat::kText}, {"pgm", OutputFormat::kPgm}, {"records", OutputFormat::kRecords}};
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", config.format, "Output format")->transform(CLI::CheckedTransformer(formats));
    sub->add_option("--out", config.out, "Output file (stdout when absent)");
  };
  auto add_parameters = [&](CLI::App* sub) {
    sub->add_option("--k", config.k, "Alphabet size")->check(CLI::PositiveNumber);
    sub->add_option("--d", config.d, "Dimension")->check(CLI::PositiveNumber);
    sub->add_option("--h", config.h, "Target entropy, decimal or p/q");
    sub->add_option("-M,--tail-base", config.tail_base, "Override of M");
    sub->add_option("-N,--tail-start", config.tail_start, "Override of N");
    sub->add_option("--lambda-iterations", config.lambda_iterations, "Iterations for the entropy lower bound");
    sub->add_option("--digit-budget", config.digit_budget, "Decimal digits kept exact")->check(CLI::PositiveNumber);
    sub->add_option("--symbolic-levels", config.symbolic_levels, "Levels planned past the exact prefix");
    sub->add_option("--report", config.report, "Certificate report file (stderr when absent)");
    add_format(sub);
  };
  auto add_source = [&](CLI::App* sub) {
    auto* plan = sub->add_option("--plan", config.plan_path, "Plan file");
    sub->add_option("--toy-preset", config.toy_preset, "Built-in toy plan")->excludes(plan);
    sub->add_option("--depth-budget", config.depth_budget, "Deepest level evaluated")->check(CLI::PositiveNumber);
    sub->add_option("--cell-budget", config.cell_budget, "Largest number of cells materialized")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber);
    add_format(sub);
  };

  auto* plan = app.add_subcommand("plan", "Plan a construction and certify it");
  add_parameters(plan);
  plan->add_option("--toy-preset", config.toy_preset, "Emit a built-in toy plan");
  auto* theorem = app.add_subcommand("small-alphabet", "Plan a block-substituted construction over a small alphabet");
  add_parameters(theorem);
  for (const char* name : {"patch", "render"}) {
    auto* sub = app.add_subcommand(name, std::string(name) == "patch" ? "Export letters over a box"
                                                                       : "Render a box as a grayscale image");
    add_source(sub);
    sub->add_option("--box", config.box, "Box as 'x0,y0:w,h'");
    sub->add_option("--level", config.level, "Export D_level when no box is given");
  }
  auto* eval = app.add_subcommand("eval", "Evaluate the array at one point");
  add_source(eval);
  eval->add_option("--point", config.point, "Point as 'a,b'")->required();
  auto* cen = app.add_subcommand("census", "List the aligned blocks of a level");
  add_source(cen);
  cen->add_option("--level", config.level, "Block level")->required();
  cen->add_option("--window-level", config.window_level, "Level of the scanned window");
  cen->add_flag("--frequencies", config.frequencies, "Also probe block frequencies");
  cen->add_option("--samples", config.samples, "Sampled windows for the frequency probe");
  cen->add_option("--seed", config.seed, "Seed for sampled windows");
  auto* verify = app.add_subcommand("verify", "Run every check on a plan");
  add_source(verify);
  verify->add_option("--seed", config.seed, "Seed for sampled points");
  verify->add_option("--samples", config.samples, "Sampled points per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    RecordWriter(err).error("InvalidArgument", e.what(), kExitInfeasible);
    return kExitInfeasible;
  }
  for (const auto* sub : app.get_subcommands()) config.command = sub->get_name();
  return run(config, out, err);
}

}  // namespace toeplitz_forge::cli
