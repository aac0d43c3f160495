#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "grid_io.hpp"
#include "tvmax/error.hpp"
#include "tvmax/oracle.hpp"
#include "tvmax/simplex.hpp"
#include "tvmax/tvmax.hpp"
#include "tvmax/version.hpp"

namespace tvmax::cli {

namespace {

inline constexpr double kCheckTolerance = 1e-5;

// Usage error detected after parsing (exit 3).
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind(std::move(kind)) {}
  std::string kind;
};

struct InputFlags {
  std::string input;
  std::string format;
};

struct TransformFlags {
  std::string transform = "tvmax";
  double lambda = kDefaultLambda;
  double tol = 1e-7;
  std::size_t max_iter = 100;
  bool flatten = false;
};

void add_input_flags(CLI::App& cmd, InputFlags& f) {
  cmd.add_option("--input", f.input, "Score grid (CSV or JSON)")->required();
  cmd.add_option("--format", f.format, "csv or json; default from the file extension")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_transform_flags(CLI::App& cmd, TransformFlags& f) {
  cmd.add_option("--transform", f.transform, "softmax, sparsemax, fusedmax1d or tvmax")
      ->check(CLI::IsMember({"softmax", "sparsemax", "fusedmax1d", "tvmax"}));
  cmd.add_option("--lambda", f.lambda, "Fusion strength");
  cmd.add_option("--tol", f.tol, "Dykstra stopping tolerance (infinity norm)");
  cmd.add_option("--max-iter", f.max_iter, "Dykstra iteration budget");
  cmd.add_flag("--flatten", f.flatten, "Run fusedmax1d on the row-major flattening of a grid");
}

ScoreGrid load(const std::string& path, const std::string& format) {
  GridFormat fmt;
  if (format == "csv") {
    fmt = GridFormat::kCsv;
  } else if (format == "json") {
    fmt = GridFormat::kJson;
  } else if (auto guessed = format_from_extension(path)) {
    fmt = *guessed;
  } else {
    throw UsageError("invalid-flags", "cannot infer the format of " + path + "; pass --format");
  }
  return read_grid(path, fmt);
}

// A transform applied to a grid. `result` is empty for softmax, which has no
// prox stage.
struct Evaluation {
  ScoreGrid distribution;
  std::optional<TvmaxResult> result;
};

Evaluation evaluate(const ScoreGrid& z, const TransformFlags& f) {
  if (!(f.lambda >= 0.0) || !std::isfinite(f.lambda)) {
    throw UsageError("invalid-flags", "--lambda must be a finite nonnegative number");
  }
  if (!(f.tol > 0.0)) throw UsageError("invalid-flags", "--tol must be positive");
  if (f.max_iter < 1) throw UsageError("invalid-flags", "--max-iter must be at least 1");

  Evaluation ev;
  if (f.transform == "softmax") {
    ev.distribution = ScoreGrid(z.rows(), z.cols(), softmax(z.values()));
    return ev;
  }
  TvmaxResult r;
  if (f.transform == "sparsemax") {
    r = tvmax_forward(z, 0.0);
  } else if (f.transform == "fusedmax1d") {
    if (z.rows() > 1 && !f.flatten) {
      throw UsageError("invalid-flags", "fusedmax1d needs a single-row grid or --flatten");
    }
    r = fusedmax1d_forward(z.values(), f.lambda);
    r.distribution = ScoreGrid(z.rows(), z.cols(), r.distribution.data());
  } else {
    r = tvmax_forward(z, f.lambda, {f.tol, f.max_iter, kDefaultFuseTol});
  }
  ev.distribution = r.distribution;
  ev.result = std::move(r);
  return ev;
}

void emit(const std::string& output, const std::string& text, std::ostream& out) {
  if (output.empty()) {
    out << text;
  } else {
    write_file(output, text);
  }
}

double transform_lambda(const TransformFlags& f) {
  return f.transform == "sparsemax" || f.transform == "softmax" ? 0.0 : f.lambda;
}

struct TransformCmd {
  InputFlags in;
  TransformFlags tf;
  std::string output;
  std::string heatmap;
  bool groups = false;

  int run(std::ostream& out) const {
    const ScoreGrid z = load(in.input, in.format);
    const Evaluation ev = evaluate(z, tf);

    JsonGridFields json;
    json.rows = z.rows();
    json.cols = z.cols();
    json.data = ev.distribution.values();
    json.transform = tf.transform;
    json.lambda = transform_lambda(tf);

    const auto support = sparsemax_support(ev.distribution.values());
    std::string diag = "{\"support_size\": " + std::to_string(support.support_size);
    if (ev.result) {
      const TvmaxResult& r = *ev.result;
      diag += ", \"num_groups\": " + std::to_string(r.partition.num_groups()) +
              ", \"iterations\": " + std::to_string(r.iterations) +
              ", \"residual\": " + format_number(r.residual) +
              ", \"converged\": " + (r.converged ? "true" : "false");
    }
    diag += "}";
    json.extra.push_back({"diagnostics", diag});
    if (groups) {
      if (!ev.result) throw UsageError("invalid-flags", "--groups is not available for softmax");
      json.extra.push_back({"groups", render_int_array(ev.result->partition.group_id)});
    }

    emit(output, render_json(json), out);
    if (!heatmap.empty()) write_file(heatmap, render_pgm(ev.distribution));
    return kOk;
  }
};

struct VjpCmd {
  InputFlags in;
  TransformFlags tf;
  std::string cotangent;
  std::string cotangent_format;
  std::string output;

  int run(std::ostream& out) const {
    const ScoreGrid z = load(in.input, in.format);
    const ScoreGrid dp = load(cotangent, cotangent_format);
    if (!dp.same_shape(z)) {
      throw UsageError("shape-mismatch", "cotangent is " + std::to_string(dp.rows()) + "x" +
                                             std::to_string(dp.cols()) + ", grid is " +
                                             std::to_string(z.rows()) + "x" +
                                             std::to_string(z.cols()));
    }
    const Evaluation ev = evaluate(z, tf);
    const std::vector<double> dz = ev.result ? tvmax_vjp(*ev.result, dp.values())
                                             : softmax_vjp(ev.distribution.values(), dp.values());
    JsonGridFields json;
    json.rows = z.rows();
    json.cols = z.cols();
    json.data = dz;
    json.transform = tf.transform;
    json.lambda = transform_lambda(tf);
    emit(output, render_json(json), out);
    return kOk;
  }
};

struct CheckCmd {
  InputFlags in;
  double lambda = kDefaultLambda;
  double tol = 1e-7;
  std::size_t max_iter = 100;
  bool corrupt = false;

  int run(std::ostream& out) const {
    const ScoreGrid z = load(in.input, in.format);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw UsageError("invalid-flags", "--lambda must be a finite nonnegative number");
    }
    const OracleConfig cfg = OracleConfig::from_env();
    if (z.size() > cfg.small_instance_limit) {
      throw UsageError("unsupported-size", "check is limited to grids of at most " +
                                               std::to_string(cfg.small_instance_limit) +
                                               " cells");
    }
    TvmaxResult fast = tvmax_forward(z, lambda, {tol, max_iter, kDefaultFuseTol});
    if (corrupt) {
      // Negative control: move a little mass between two cells.
      auto p = fast.distribution.values();
      const std::size_t top = std::max_element(p.begin(), p.end()) - p.begin();
      const double shift = std::min(1e-3, p[top]);
      p[top] -= shift;
      p[(top + 1) % p.size()] += shift;
      if (p.size() == 1) p[0] += 1e-3;
    }

    const FusionGraph graph = FusionGraph::grid(z.rows(), z.cols());
    const std::vector<double> reference = oracle_constrained(z.values(), graph, lambda, cfg);
    double deviation = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
      deviation = std::max(deviation, std::abs(reference[i] - fast.distribution.values()[i]));
    }
    const OptimalityReport kkt = subgradient_residual(z.values(), fast.prox_w_star.values(), graph,
                                                      lambda, kDefaultFuseTol);
    const bool pass = deviation <= kCheckTolerance;
    out << "max_deviation " << format_number(deviation) << "\n"
        << "kkt_residual " << format_number(kkt.kkt_residual) << "\n"
        << "status " << (pass ? "pass" : "fail") << "\n";
    return pass ? kOk : kCheckFailed;
  }
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int fail(std::ostream& err, int code, const std::string& kind, const std::string& why) {
  err << "error: " << kind << ": " << one_line(why) << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse and structured attention transforms over score grids", "tvmax"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  TransformCmd transform;
  auto* t = app.add_subcommand("transform", "Map a score grid to an attention distribution");
  add_input_flags(*t, transform.in);
  add_transform_flags(*t, transform.tf);
  t->add_option("--output", transform.output, "JSON output path (default stdout)");
  t->add_option("--heatmap", transform.heatmap, "Write a PGM heatmap of the distribution");
  t->add_flag("--groups", transform.groups, "Include fused-group labels in the output");

  VjpCmd vjp;
  auto* v = app.add_subcommand("vjp", "Vector-Jacobian product of a transform");
  add_input_flags(*v, vjp.in);
  add_transform_flags(*v, vjp.tf);
  v->add_option("--cotangent", vjp.cotangent, "Cotangent grid, same shape as --input")
      ->required();
  v->add_option("--cotangent-format", vjp.cotangent_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  v->add_option("--output", vjp.output, "JSON output path (default stdout)");

  CheckCmd check;
  auto* c = app.add_subcommand("check", "Compare TVmax against the reference solver");
  add_input_flags(*c, check.in);
  c->add_option("--lambda", check.lambda, "Fusion strength");
  c->add_option("--tol", check.tol, "Dykstra stopping tolerance");
  c->add_option("--max-iter", check.max_iter, "Dykstra iteration budget");
  c->add_flag("--test-corrupt-fast-path", check.corrupt)->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kInvalidUsage, "invalid-flags", e.what());
  }

  try {
    if (*t) return transform.run(out);
    if (*v) return vjp.run(out);
    return check.run(out);
  } catch (const MalformedInput& e) {
    return fail(err, kMalformedInput, "malformed-input", e.what());
  } catch (const UsageError& e) {
    return fail(err, kInvalidUsage, e.kind, e.what());
  } catch (const InvalidParameter& e) {
    return fail(err, kInvalidUsage, e.kind(), e.what());
  } catch (const UnsupportedSize& e) {
    return fail(err, kInvalidUsage, e.kind(), e.what());
  } catch (const InvalidInput& e) {
    return fail(err, kMalformedInput, e.kind(), e.what());
  } catch (const Error& e) {
    return fail(err, kNumericalFailure, e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(err, kNumericalFailure, "internal", e.what());
  }
}

}  // namespace tvmax::cli
