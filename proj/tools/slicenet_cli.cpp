// slicenet: optimize, evaluate and verify propagation strategies for sliced
// sensor networks.
//
// Exit codes: 0 ok, 1 input error, 2 internal assertion, 3 verification or
// statistical failure.

#include "slicenet/documents.hpp"
#include "slicenet/evaluator.hpp"
#include "slicenet/optimizer.hpp"
#include "slicenet/simulator.hpp"

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace {

using namespace slicenet;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kInternalError = 2;
constexpr int kVerifyFailure = 3;

struct Options {
  std::string spec_path;
  std::string result_path;
  std::string output;
  double tolerance = 1e-9;
  double step = 0.01;
  std::size_t replications = 100000;
  std::uint64_t seed = 0;
  int jobs = 0;
  double sigmas = 3.0;
  bool round_g = false;
  std::vector<double> p;
};

std::string join(const std::vector<double>& values) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << values[i];
  return os.str();
}

std::string lifespan_text(const Lifespan& life) {
  if (life.is_unbounded()) return "unbounded";
  std::ostringstream os;
  os << std::setprecision(12) << life.value();
  return os.str();
}

void emit(const Options& opt, const std::string& text) {
  if (opt.output.empty()) {
    std::cout << text;
  } else {
    write_text_file(opt.output, text);
  }
}

void print_summary(std::ostream& os, const ResultDocument& doc) {
  os << "p         = " << join(doc.strategy.p) << "\n"
     << "e         = " << join(doc.profile.per_sensor) << "\n"
     << "lifespan  = " << lifespan_text(doc.profile.lifespan()) << "\n"
     << "balanced  = " << (doc.balanced ? "yes" : "no") << "\n"
     << "optimal   = " << (doc.optimality.optimal ? "yes" : "no") << "\n";
}

int cmd_optimize(const Options& opt) {
  const Tolerance tol{opt.tolerance};
  auto input = parse_spec_document(read_text_file(opt.spec_path));
  auto best = compute_optimal(input.spec, tol);
  auto doc = make_result("optimize", std::move(input), best.strategy, tol, best.flow);
  doc.open_recursion_starts = best.open_recursion_starts;
  emit(opt, write_result_document(doc));
  if (!opt.output.empty()) print_summary(std::cout, doc);
  return kOk;
}

int cmd_evaluate(const Options& opt) {
  const Tolerance tol{opt.tolerance};
  auto input = parse_spec_document(read_text_file(opt.spec_path));
  auto doc = make_result("evaluate", std::move(input), Strategy{opt.p}, tol);
  emit(opt, write_result_document(doc));
  if (!opt.output.empty()) print_summary(std::cout, doc);
  return kOk;
}

int cmd_verify(const Options& opt, bool tolerance_given) {
  const auto doc = parse_result_document(read_text_file(opt.result_path));
  const Tolerance tol{tolerance_given ? opt.tolerance : doc.tolerance};
  const auto outcome = verify_result(doc, tol);
  const auto& r = outcome.report;
  auto cond = [](const std::optional<bool>& c) {
    return c ? (*c ? "holds" : "VIOLATED") : "void";
  };
  std::cout << "tolerance        " << tol.rel << "\n"
            << "max e            " << std::setprecision(12) << r.max_value << "\n"
            << "peak last slice  " << r.peak_last + 1 << "\n"
            << "below edge slice "
            << (r.below_edge ? std::to_string(*r.below_edge + 1) : std::string("none")) << "\n"
            << "left_condition   " << cond(r.left_condition) << "\n"
            << "right_condition  " << cond(r.right_condition) << "\n"
            << "balanced         " << (outcome.balanced ? "yes" : "no") << "\n";
  if (outcome.ok) {
    std::cout << "verified: optimal\n";
    return kOk;
  }
  std::cout << outcome.detail << "verification failed: " << outcome.violated << "\n";
  return kVerifyFailure;
}

int cmd_oracle(const Options& opt) {
  const Tolerance tol{opt.tolerance};
  const auto input = parse_spec_document(read_text_file(opt.spec_path));
  const auto& spec = input.spec;
  const auto oracle = brute_force_oracle(spec, opt.step, opt.jobs);
  const auto best = compute_optimal(spec, tol);
  const auto life = best.profile.lifespan();

  const double slack = oracle_lifespan_slack(spec, opt.step, oracle.peak);
  std::cout << std::setprecision(12)
            << "grid step          " << opt.step << " (" << oracle.evaluated << " points)\n"
            << "oracle    p        " << join(oracle.strategy.p) << "\n"
            << "oracle    lifespan " << lifespan_text(oracle.lifespan) << "\n"
            << "optimizer p        " << join(best.strategy.p) << "\n"
            << "optimizer lifespan " << lifespan_text(life) << "\n";
  if (oracle.lifespan.is_unbounded() || life.is_unbounded()) {
    const bool ok = life.is_unbounded();
    std::cout << (ok ? "optimizer matches oracle\n" : "optimizer loses to oracle\n");
    return ok ? kOk : kVerifyFailure;
  }
  const double gap = life.value() - oracle.lifespan.value();
  std::cout << "lifespan gap       " << gap << "\n"
            << "slack bound        " << slack << "\n";
  if (gap < -slack) {
    std::cout << "optimizer loses to oracle beyond slack\n";
    return kVerifyFailure;
  }
  std::cout << "optimizer within slack of oracle\n";
  return kOk;
}

int cmd_simulate(const Options& opt) {
  const auto input = parse_spec_document(read_text_file(opt.spec_path));
  const auto doc = parse_result_document(read_text_file(opt.result_path));
  if (doc.input_hash != spec_hash(input.spec))
    throw InvalidInput("result document was produced for a different spec (hash mismatch)");

  SimConfig config;
  config.replications = opt.replications;
  config.seed = opt.seed;
  config.jobs = opt.jobs;
  config.tolerance_sigmas = opt.sigmas;
  config.rounding = opt.round_g ? CountRounding::nearest : CountRounding::reject_fractional;

  const auto sim = simulate(input.spec, doc.strategy, config);
  const auto simulated = sim.simulated_spec(input.spec);
  const auto analytic = evaluate_strategy({simulated, doc.strategy}).profile;
  const auto cmp = compare(analytic, sim, config, Tolerance{doc.tolerance});

  if (sim.rounded) {
    std::cout << "note: g rounded to integers for simulation:";
    for (auto c : sim.counts) std::cout << " " << c;
    std::cout << "\n";
  }
  std::cout << "replications " << sim.replications << ", seed " << config.seed << ", threshold "
            << config.tolerance_sigmas << " sigma\n";
  std::cout << std::left << std::setw(7) << "slice" << std::setw(16) << "analytic e"
            << std::setw(16) << "empirical e" << std::setw(14) << "std error" << "z\n";
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    std::cout << std::left << std::setw(7) << i + 1 << std::setprecision(8) << std::setw(16)
              << analytic.per_sensor[i] << std::setw(16) << sim.mean_per_sensor[i]
              << std::setw(14) << sim.std_error[i] << std::setprecision(4) << cmp.z[i] << "\n";
  }
  std::cout << "worst slice " << cmp.worst_slice + 1 << "\n";
  switch (cmp.verdict) {
    case SimVerdict::pass:
      std::cout << "pass\n";
      return kOk;
    case SimVerdict::statistical_reject:
      std::cout << "fail: statistical rejection\n";
      return kVerifyFailure;
    case SimVerdict::model_mismatch:
      std::cout << "fail: model mismatch (zero standard error, nonzero discrepancy)\n";
      return kVerifyFailure;
  }
  return kInternalError;
}

int cmd_profile_csv(const Options& opt) {
  const auto doc = parse_result_document(read_text_file(opt.result_path));
  emit(opt, profile_csv(doc));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifespan-maximizing data propagation for sliced sensor networks"};
  app.require_subcommand(1);
  Options opt;

  auto add_tolerance = [&](CLI::App* cmd) {
    return cmd->add_option("--tolerance", opt.tolerance, "Relative comparison tolerance")
        ->envname("SLICENET_TOLERANCE")
        ->check(CLI::PositiveNumber);
  };
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", opt.output, "Output path (default: stdout)");
  };
  auto add_jobs = [&](CLI::App* cmd) {
    cmd->add_option("--jobs", opt.jobs, "Worker threads (0: OpenMP default)")
        ->envname("SLICENET_JOBS")
        ->check(CLI::NonNegativeNumber);
  };

  auto* optimize = app.add_subcommand("optimize", "Compute the optimal strategy for a spec");
  optimize->add_option("spec", opt.spec_path, "Spec document")->required();
  add_output(optimize);
  add_tolerance(optimize);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a given strategy on a spec");
  evaluate->add_option("spec", opt.spec_path, "Spec document")->required();
  evaluate->add_option("--p", opt.p, "Sliding probabilities, comma separated")
      ->required()
      ->delimiter(',');
  add_output(evaluate);
  add_tolerance(evaluate);

  auto* verify = app.add_subcommand("verify", "Re-check a result document");
  verify->add_option("result", opt.result_path, "Result document")->required();
  auto* verify_tol = add_tolerance(verify);

  auto* oracle = app.add_subcommand("oracle", "Compare the optimizer with a grid search");
  oracle->add_option("spec", opt.spec_path, "Spec document")->required();
  oracle->add_option("--step", opt.step, "Grid step in (0, 1]")
      ->envname("SLICENET_STEP")
      ->check(CLI::Range(0.0, 1.0));
  add_tolerance(oracle);
  add_jobs(oracle);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of a result");
  simulate->add_option("spec", opt.spec_path, "Spec document")->required();
  simulate->add_option("result", opt.result_path, "Result document")->required();
  simulate->add_option("--replications", opt.replications, "Replications")
      ->envname("SLICENET_REPLICATIONS")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", opt.seed, "Random seed")->envname("SLICENET_SEED");
  simulate->add_option("--sigmas", opt.sigmas, "Rejection threshold in standard errors")
      ->envname("SLICENET_SIGMAS")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--round-g", opt.round_g, "Round fractional g to the nearest integer");
  add_jobs(simulate);

  auto* csv = app.add_subcommand("profile-csv", "Write the per-slice table as CSV");
  csv->add_option("result", opt.result_path, "Result document")->required();
  add_output(csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*optimize) return cmd_optimize(opt);
    if (*evaluate) return cmd_evaluate(opt);
    if (*verify) return cmd_verify(opt, verify_tol->count() > 0 ||
                                            std::getenv("SLICENET_TOLERANCE") != nullptr);
    if (*oracle) return cmd_oracle(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*csv) return cmd_profile_csv(opt);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}
