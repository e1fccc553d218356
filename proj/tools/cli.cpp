#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace loopgrad::cli {

using io::json;

double default_tolerance(double fallback) {
  if (const char* env = std::getenv("LOOPGRAD_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return fallback;
}

namespace {

double tolerance(const JobSpec& job, double fallback) {
  const double t = job.tol ? *job.tol : default_tolerance(fallback);
  if (!(t > 0.0)) fail(ErrorKind::SchemaError, "tolerance must be positive");
  return t;
}

const std::string& require_input(const JobSpec& job) {
  if (job.input.empty()) fail(ErrorKind::IoError, job.command + " needs --input");
  return job.input;
}

RunResult run_algebra(const JobSpec& job) {
  return {0, io::algebra_to_json(*build_algebra(job.algebra)), {}};
}

json seminorm_report(const LoopElement& xi) {
  json out = json::array();
  for (int m = 1; m <= 4; ++m) {
    const auto est = seminorm_estimate(xi, m);
    out.push_back(json{{"m", m}, {"value", est.value}, {"upper_bound", est.upper_bound}});
  }
  return out;
}

RunResult run_loop(const JobSpec& job) {
  const json doc = io::read_document(require_input(job));
  const double tol = tolerance(job, kDefaultTol);
  if (job.action == "validate") {
    const LoopElement xi = io::loop_element_from_json(doc, tol);
    json rep{{"schema", io::kSchema},
             {"status", "ok"},
             {"algebra", xi.algebra()->label()},
             {"K", xi.twist()->K()},
             {"mode_count", xi.modes().size()},
             {"max_abs_mode", xi.max_abs_mode()},
             {"twist_residual", xi.twist_residual()},
             {"seminorms", seminorm_report(xi)}};
    return {0, rep, {}};
  }
  if (job.action == "bracket") {
    const TwistPtr tw = io::twist_from_json(doc, tol);
    LoopElement x = LoopElement::zero(tw);
    LoopElement y = LoopElement::zero(tw);
    try {
      x = io::modes_from_json(tw, doc.at("x").at("modes"), tol);
      y = io::modes_from_json(tw, doc.at("y").at("modes"), tol);
    } catch (const json::exception& e) {
      fail(ErrorKind::SchemaError, std::string("bracket input needs x.modes and y.modes: ") + e.what());
    }
    const LoopElement b = loop_bracket(x, y);
    json bounds = json::array();
    for (int m = 1; m <= 4; ++m) {
      const auto r = check_bracket_bound(x, y, m);
      bounds.push_back(json{{"m", m}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ok", r.ok}});
    }
    json rep = io::loop_element_to_json(b);
    rep["status"] = "ok";
    rep["bracket_bound"] = bounds;
    return {0, rep, {}};
  }
  fail(ErrorKind::SchemaError, "loop needs an action: validate or bracket");
}

RunResult run_grading(const JobSpec& job) {
  if (job.action != "verify") fail(ErrorKind::SchemaError, "grading needs the action verify");
  const json doc = io::read_document(require_input(job));
  const GradingOperator Q = io::operator_from_json(doc, kDefaultTol);
  const int N = job.window.value_or(std::max(4, Q.eta().max_abs_mode()));
  if (N < Q.eta().max_abs_mode()) {
    fail(ErrorKind::SchemaError, "window " + std::to_string(N) + " is smaller than the largest input mode " +
                                     std::to_string(Q.eta().max_abs_mode()));
  }
  const GradationTable table = grading_subspaces(Q, N, tolerance(job, 1e-6));
  const double bracket = gradation_bracket_residual(table, Q);
  std::ostringstream os;
  os << "degree  dim\n";
  for (const auto& e : table.entries) os << std::setw(6) << e.degree << "  " << e.basis.size() << "\n";
  return {0, io::table_to_json(table, bracket), os.str()};
}

RunResult run_normalize(const JobSpec& job) {
  const json doc = io::read_document(require_input(job));
  const GradingOperator Q = io::operator_from_json(doc, kDefaultTol);
  NormalizeOptions opts;
  opts.integrality_tol = tolerance(job, 1e-6);
  if (job.steps < 8) fail(ErrorKind::SchemaError, "--steps must be at least 8");
  opts.ode.steps = job.steps;
  const NormalizationResult r = normalize(Q, opts);
  std::ostringstream os;
  os << "K' = " << r.K_prime << ", kappa = " << r.kappa << ", dims per Z_" << r.K_prime << " class:";
  for (int d : r.dims) os << " " << d;
  os << "\n";
  return {0, io::normalization_to_json(r), os.str()};
}

RunResult run_classify(const JobSpec& job) {
  const ClassificationReport rep = classify(build_algebra(job.algebra), job.order, job.twist);
  std::ostringstream os;
  os << rep.algebra << ", K = " << rep.K << ", r = " << rep.r << ": " << rep.entries.size() << " classes";
  if (rep.oracle_count) os << " (oracle " << *rep.oracle_count << (rep.oracle_agreement ? ", agree" : ", DISAGREE") << ")";
  os << "\n";
  os << std::left << std::setw(20) << "label" << std::setw(7) << "order" << "dims" << std::setw(0) << "\n";
  for (const auto& e : rep.entries) {
    std::ostringstream dims;
    for (std::size_t i = 0; i < e.dims.size(); ++i) dims << (i ? " " : "") << e.dims[i];
    os << std::left << std::setw(20) << e.label.to_string() << std::setw(7) << e.order << dims.str() << "\n";
  }
  return {0, io::classification_to_json(rep), os.str()};
}

RunResult run_selfcheck(const JobSpec& job) {
  json rep = selfcheck_report(job.seed);
  const bool ok = rep["pass"].get<bool>();
  std::ostringstream os;
  for (const auto& c : rep["checks"]) {
    os << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << "\n";
  }
  return {ok ? 0 : 1, rep, os.str()};
}

}  // namespace

RunResult run(const JobSpec& job) {
  try {
    if (job.command == "algebra") return run_algebra(job);
    if (job.command == "loop") return run_loop(job);
    if (job.command == "grading") return run_grading(job);
    if (job.command == "normalize") return run_normalize(job);
    if (job.command == "classify") return run_classify(job);
    if (job.command == "selfcheck") return run_selfcheck(job);
    fail(ErrorKind::SchemaError, "unknown command '" + job.command + "'");
  } catch (const Error& e) {
    return {is_mathematical_rejection(e.kind()) ? 2 : 1, io::error_to_json(e), {}};
  } catch (const std::exception& e) {
    return {1, json{{"schema", io::kSchema}, {"status", "error"}, {"error", "NumericalFailure"}, {"message", e.what()}}, {}};
  }
}

int main(int argc, char** argv) {
  CLI::App app{"loopgrad: twisted loop algebras, grading operators and their normal forms"};
  app.require_subcommand(1);
  JobSpec job;
  double tol = 0.0;
  int window = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", job.input, "input JSON document");
    sub->add_option("--output", job.output, "write the JSON report here instead of stdout");
    sub->add_option("--tol", tol, "tolerance (default: LOOPGRAD_TOL or the command default)");
    sub->add_option("--window", window, "mode window radius");
    sub->add_option("--steps", job.steps, "ODE steps per period");
    sub->add_option("--seed", job.seed, "random seed");
    sub->add_option("--algebra", job.algebra, "A1, A2, A3 or A4");
    sub->add_option("--order", job.order, "automorphism order K");
    sub->add_option("--twist", job.twist, "twist order r (1 or 2)");
  };

  auto* alg = app.add_subcommand("algebra", "structure constants and checks of a simple Lie algebra");
  add_common(alg);
  auto* loop = app.add_subcommand("loop", "loop element operations");
  loop->require_subcommand(1);
  for (const char* a : {"validate", "bracket"}) {
    auto* s = loop->add_subcommand(a, std::string(a) == "validate" ? "check the twist constraint and seminorms"
                                                                    : "bracket two loop elements");
    add_common(s);
  }
  auto* grading = app.add_subcommand("grading", "grading operators");
  grading->require_subcommand(1);
  add_common(grading->add_subcommand("verify", "grading subspaces on a mode window"));
  add_common(app.add_subcommand("normalize", "reduce a grading operator to standard form"));
  add_common(app.add_subcommand("classify", "finite-order automorphism classes via Kac labels"));
  add_common(app.add_subcommand("selfcheck", "run the invariant suite"));

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : app.get_subcommands()) {
    job.command = sub->get_name();
    for (auto* inner : sub->get_subcommands()) job.action = inner->get_name();
  }
  if (tol > 0.0) job.tol = tol;
  if (window >= 0) job.window = window;

  const RunResult r = run(job);
  const std::string text = io::dump(r.report);
  if (job.output.empty()) {
    std::cout << text;
    if (!r.table.empty()) std::cerr << r.table;
  } else {
    std::ofstream out(job.output);
    if (!out) {
      std::cerr << "cannot write '" << job.output << "'\n";
      return 1;
    }
    out << text;
    if (!r.table.empty()) std::cout << r.table;
  }
  if (r.exit_code != 0 && r.report.contains("message")) std::cerr << r.report["error"].get<std::string>() << ": " << r.report["message"].get<std::string>() << "\n";
  return r.exit_code;
}

}  // namespace loopgrad::cli
