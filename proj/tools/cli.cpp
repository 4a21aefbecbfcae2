#include "cli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "matrix_io.hpp"
#include "report.hpp"
#include "svarid/error.hpp"
#include "svarid/identifier.hpp"

namespace svarid::cli {

namespace {

constexpr std::string_view kCounterexample = R"(# Zeros on A0 at (2,1) and (3,1) imply a zero on IR0 at (1,2),
# so the IR0 restriction adds no information.
n = 3
p = 1
block A0
  x x x
  0 x x
  0 x x
block IR0
  x 0 x
  x x x
  x x x
)";

IdentifierOptions identifier_options(const RunConfig& cfg) {
  IdentifierOptions opts;
  if (cfg.tol) opts.tolerance = RankTolerance::relative(*cfg.tol);
  return opts;
}

CheckConfig check_config(const RunConfig& cfg) {
  CheckConfig check;
  check.draws = cfg.draws;
  check.seed = cfg.seed;
  check.identifier = identifier_options(cfg);
  return check;
}

RestrictionSpec load_spec(const RunConfig& cfg) {
  if (cfg.spec_path.empty()) throw Error(Errc::InvalidArgument, "no restriction spec given (use --spec PATH)");
  return load_spec_file(cfg.spec_path);
}

/// Reduced form from --sigma/--b, or draw 0 of the sampler.
ReducedFormParams reduced_form_input(const RunConfig& cfg, const RestrictionSpec& spec, std::string& source) {
  const ModelDims dims = spec.dims;
  if (!cfg.sigma_path) {
    if (cfg.b_path) throw Error(Errc::InvalidArgument, "--b requires --sigma");
    source = "sampled";
    return draw_reduced_form(SamplerConfig{dims, 0.1, 1.0, cfg.seed}, 0);
  }
  source = "file";
  Matrix sigma = read_matrix_file(*cfg.sigma_path);
  Matrix b = cfg.b_path ? read_matrix_file(*cfg.b_path) : Matrix::Zero(dims.m(), dims.n);
  return ReducedFormParams(dims, std::move(b), std::move(sigma));
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

std::string column_line(const ColumnDiagnostic& d) {
  std::ostringstream s;
  s << "j=" << d.j << " (column " << d.column << "): rank " << d.rank << " / required " << d.required_rank << "  "
    << to_string(d.status);
  if (d.status == ColumnStatus::Redundant) s << " (null dimension " << d.null_dimension << ")";
  return s.str();
}

void print_header(std::ostream& out, const std::string& spec_path, const RestrictionSpec& spec,
                  const CompiledRestrictions& c) {
  out << "spec: " << spec_path << " (n = " << spec.dims.n << ", p = " << spec.dims.p << ", blocks:";
  for (const auto& b : spec.blocks) out << ' ' << b.id.name();
  out << ")\n";
  out << "processing order of columns:";
  for (int original : c.permutation) out << ' ' << original + 1;
  out << "\nq = (";
  for (std::size_t j = 0; j < c.q.size(); ++j) out << (j ? ", " : "") << c.q[j];
  out << "), total restrictions " << c.total << ", n(n-1)/2 = " << c.n * (c.n - 1) / 2 << '\n';
}

void print_count(std::ostream& out, const CompiledRestrictions& c, const CountCondition& cc) {
  out << "counting condition q_j = n - j:\n";
  for (int j = 0; j < c.n; ++j)
    out << "  j=" << j + 1 << " (column " << c.permutation[static_cast<std::size_t>(j)] + 1
        << "): q = " << c.q[static_cast<std::size_t>(j)] << ", required " << c.n - j - 1 << "  "
        << (cc.per_column[static_cast<std::size_t>(j)] ? "pass" : "FAIL") << '\n';
  out << "  overall: " << (cc.overall ? "pass (necessary, not sufficient)" : "FAIL") << '\n';
}

void print_cross_check(std::ostream& out, const CrossCheckResult& t) {
  out << "M_j rank cross-check at a restricted point:";
  for (std::size_t j = 0; j < t.ranks.size(); ++j) out << (j ? "," : "") << " rank(M_" << j + 1 << ") = " << t.ranks[j];
  out << "; total " << t.total_restrictions << " vs " << t.total_required << ": " << (t.pass ? "pass" : "FAIL")
      << '\n';
}

void print_explanation(std::ostream& out, const RedundancyExplanation& e, const RestrictionSpec& spec) {
  out << "redundant restrictions at j=" << e.j << " (column " << e.column << "), rank " << e.rank << " < "
      << e.required_rank << ":\n";
  if (e.implied.empty()) out << "  (no single restriction is implied; the prior columns are mutually dependent)\n";
  for (const auto& item : e.implied) {
    out << "  " << describe(item.cell, spec) << " is implied by other restrictions";
    if (item.implied_by.empty()) {
      out << " (its row of f vanishes identically)";
    } else {
      out << ":";
      for (std::size_t i = 0; i < item.implied_by.size(); ++i)
        out << (i ? ", " : " ") << describe(item.implied_by[i], spec);
    }
    out << '\n';
  }
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::ExactlyIdentified: return kExitOk;
    case Verdict::InconclusiveDrawDisagreement: return kExitInconclusive;
    case Verdict::NotIdentifiedCountFailure:
    case Verdict::NotIdentifiedRedundancy: return kExitNotIdentified;
  }
  return kExitNotIdentified;
}

/// A point of the restricted set reached from draw 0 of the sampler.
std::optional<CrossCheckResult> cross_check(const RestrictionSpec& spec, const CompiledRestrictions& c,
                                          const ReducedFormParams& r, std::uint64_t pick_seed,
                                          const IdentifierOptions& opts) {
  const RotationResult rot = construct_rotation(r, c, spec, OnRedundancy::PickArbitrary, pick_seed, opts);
  const StructuralParams restricted = baseline_structural(r).rotated(*rot.p);
  return rank_cross_check(restricted, c, spec, opts);
}

}  // namespace

std::string_view counterexample_spec_text() { return kCounterexample; }

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  if (cfg.draws < 2) throw Error(Errc::InvalidArgument, "--draws must be at least 2");
  const RestrictionSpec spec = load_spec(cfg);
  const IdentificationReport report = check_exact_identification(spec, check_config(cfg));
  const auto opts = identifier_options(cfg);

  std::optional<CrossCheckResult> cross;
  std::optional<RedundancyExplanation> explanation;
  if (report.count.overall) {
    const ReducedFormParams r0 = draw_reduced_form(SamplerConfig{spec.dims, 0.1, 1.0, cfg.seed}, 0);
    cross = cross_check(spec, report.compiled, r0, cfg.seed, opts);
    if (report.verdict == Verdict::NotIdentifiedRedundancy)
      explanation = explain_redundancy(r0, report.compiled, spec, opts);
  }

  if (cfg.format == Format::Json) {
    write_json(out, check_json(cfg.spec_path, spec, report, cross, explanation));
    return verdict_exit(report.verdict);
  }

  print_header(out, cfg.spec_path, spec, report.compiled);
  print_count(out, report.compiled, report.count);
  if (!report.note.empty()) out << "note: " << report.note << '\n';
  if (!report.draws.empty()) {
    out << "non-redundancy rank checks (M = " << report.draws.size() << ", seed " << cfg.seed << "):\n";
    for (const auto& d : report.draws) {
      out << "  draw " << d.index << ": " << (d.pass ? "pass" : "FAIL") << '\n';
      for (const auto& col : d.rotation.per_column) out << "    " << column_line(col) << '\n';
    }
  }
  if (cross) print_cross_check(out, *cross);
  if (explanation) print_explanation(out, *explanation, spec);
  out << "verdict: " << to_string(report.verdict) << '\n';
  return verdict_exit(report.verdict);
}

int cmd_rotate(const RunConfig& cfg, std::ostream& out) {
  const RestrictionSpec spec = load_spec(cfg);
  const CompiledRestrictions c = compile(spec);
  std::string source;
  const ReducedFormParams r = reduced_form_input(cfg, spec, source);
  const auto opts = identifier_options(cfg);

  const RotationResult rot = construct_rotation(r, c, spec, OnRedundancy::PickArbitrary, cfg.seed, opts);
  const Matrix& p = *rot.p;
  const StructuralParams base = baseline_structural(r);
  const StructuralParams rotated = base.rotated(p);
  const double residual = restriction_residual(rotated, c, spec);
  const double orthogonality = max_abs(p.transpose() * p - Matrix::Identity(p.rows(), p.cols()));
  const ReducedFormParams back = to_reduced_form(rotated);
  const double reduced_error = std::max(max_abs(back.b() - r.b()), max_abs(back.sigma() - r.sigma()));

  std::vector<int> redundant;
  for (const auto& d : rot.per_column)
    if (d.status == ColumnStatus::Redundant) redundant.push_back(d.j);

  if (cfg.format == Format::Json) {
    Json j = header_json("rotate", cfg.spec_path, spec, c);
    j["source"] = source;
    j["seed"] = cfg.seed;
    j["unique"] = rot.unique;
    Json cols = Json::array();
    for (const auto& d : rot.per_column) cols.push_back(to_json(d));
    j["columns"] = std::move(cols);
    j["sign_flips"] = rot.sign_flips;
    j["P"] = to_json(p);
    j["residual"] = residual;
    j["orthogonality_error"] = orthogonality;
    j["reduced_form_error"] = reduced_error;
    j["A0"] = to_json(rotated.a0());
    j["Aplus"] = to_json(rotated.aplus());
    if (!rot.unique) j["warning"] = "rotation is not unique: restrictions are redundant at this point";
    write_json(out, j);
    return kExitOk;
  }

  print_header(out, cfg.spec_path, spec, c);
  out << "reduced form: " << source << (source == "sampled" ? " (seed " + std::to_string(cfg.seed) + ")" : "")
      << '\n';
  out << "columns:\n";
  for (const auto& d : rot.per_column) out << "  " << column_line(d) << '\n';
  if (!rot.unique) {
    out << "WARNING: P is NOT unique. Null space of Qt_j has dimension > 1 at j =";
    for (int j : redundant) out << ' ' << j;
    out << "; an arbitrary admissible vector was chosen. The restrictions do not identify this model.\n";
  }
  out << "P:\n" << pretty_matrix(p);
  out << "restriction residual: " << fmt_num(residual, 3) << '\n';
  out << "max |P'P - I|: " << fmt_num(orthogonality, 3) << '\n';
  out << "max reduced-form error of (A0 P, A+ P): " << fmt_num(reduced_error, 3) << '\n';
  out << "A0 P:\n" << pretty_matrix(rotated.a0());
  out << "A+ P:\n" << pretty_matrix(rotated.aplus());
  return kExitOk;
}

int cmd_explain(const RunConfig& cfg, std::ostream& out) {
  if (cfg.draws < 2) throw Error(Errc::InvalidArgument, "--draws must be at least 2");
  const RestrictionSpec spec = load_spec(cfg);
  const IdentificationReport report = check_exact_identification(spec, check_config(cfg));
  const auto opts = identifier_options(cfg);

  Json j = header_json("explain", cfg.spec_path, spec, report.compiled);
  j["verdict"] = std::string(to_string(report.verdict));
  auto finish = [&](const std::string& message, int code) {
    if (cfg.format == Format::Json) {
      j["message"] = message;
      write_json(out, j);
    } else {
      out << message << '\n';
    }
    return code;
  };

  switch (report.verdict) {
    case Verdict::ExactlyIdentified:
      return finish("exactly identified: no redundant restrictions to explain", kExitNotIdentified);
    case Verdict::NotIdentifiedCountFailure:
      return finish("counting condition fails (" + report.note + "); run 'check' for the count diagnostics",
                    kExitNotIdentified);
    case Verdict::InconclusiveDrawDisagreement:
      return finish("draws disagree; run 'check' for per-draw diagnostics", kExitInconclusive);
    case Verdict::NotIdentifiedRedundancy: break;
  }

  std::string source;
  const ReducedFormParams r = reduced_form_input(cfg, spec, source);
  const auto explanation = explain_redundancy(r, report.compiled, spec, opts);
  if (!explanation)
    return finish("no rank deficiency at the chosen reduced-form point", kExitInconclusive);

  if (cfg.format == Format::Json) {
    j["source"] = source;
    j["redundancy"] = to_json(*explanation, spec);
    write_json(out, j);
    return kExitOk;
  }
  print_header(out, cfg.spec_path, spec, report.compiled);
  out << "reduced form: " << source << '\n';
  print_explanation(out, *explanation, spec);
  out << "verdict: " << to_string(report.verdict) << '\n';
  return kExitOk;
}

int cmd_demo(const RunConfig& cfg, std::ostream& out) {
  const RestrictionSpec spec = parse_spec(kCounterexample);
  const CompiledRestrictions c = compile(spec);
  const CountCondition cc = count_condition(c);
  const auto opts = identifier_options(cfg);
  const int n = spec.dims.n;

  // Sigma = I so that every Cholesky entry equals 1.
  const ReducedFormParams r(spec.dims, Matrix::Zero(spec.dims.m(), n), Matrix::Identity(n, n));
  const StructuralParams base = baseline_structural(r);
  const Matrix f = assemble_f(base, spec);

  const Matrix qt1 = q_tilde(1, c, f, {});
  const NullVectorResult nv1 = unit_null_vector(qt1, opts.tolerance);
  const Vector p1 = sign_normalize(nv1.vector, c.permutation[0], base.a0()).p;
  const std::vector<Vector> prior{p1};
  const Matrix qt2 = q_tilde(2, c, f, prior);
  const NullVectorResult nv2 = unit_null_vector(qt2, opts.tolerance);

  const auto cross = cross_check(spec, c, r, cfg.seed, opts);
  CheckConfig check = check_config(cfg);
  check.draws = std::max(cfg.draws, 2);
  const IdentificationReport report = check_exact_identification(spec, check);
  const auto explanation = explain_redundancy(r, c, spec, opts);

  if (cfg.format == Format::Json) {
    Json j = header_json("demo", "<builtin counterexample>", spec, c);
    j["count_condition"] = to_json(cc);
    j["total_restrictions"] = c.total;
    j["required"] = n * (n - 1) / 2;
    j["qtilde_1"] = to_json(qt1);
    j["rank_qtilde_1"] = nv1.rank;
    j["p_1"] = to_json(p1);
    j["qtilde_2"] = to_json(qt2);
    j["rank_qtilde_2"] = nv2.rank;
    j["null_dimension_2"] = nv2.null_dimension;
    j["rank_cross_check"] = to_json(*cross);
    if (explanation) j["redundancy"] = to_json(*explanation, spec);
    j["verdict"] = std::string(to_string(report.verdict));
    write_json(out, j);
    return kExitOk;
  }

  out << "Built-in example: three variables, zeros on A0 and on IR0 = (A0^-1)'\n\n" << kCounterexample << '\n';
  print_header(out, "<builtin counterexample>", spec, c);
  print_count(out, c, cc);
  out << "\nRecursive point at Sigma = I (all Cholesky entries 1), f = [A0; IR0]:\n" << pretty_matrix(f);
  out << "\nQt_1 = selected rows of f for column 1:\n" << pretty_matrix(qt1);
  out << "rank(Qt_1) = " << nv1.rank << " (required " << n - 1 << ")\n";
  out << "p1 = " << pretty_vector(p1) << "\n";
  out << "\nQt_2 = [selected rows of f for column 2; p1']:\n" << pretty_matrix(qt2);
  out << "rank(Qt_2) = " << nv2.rank << " < " << n - 1 << ": p2 is not unique (null dimension "
      << nv2.null_dimension << ")\n\n";
  print_cross_check(out, *cross);
  if (explanation) print_explanation(out, *explanation, spec);
  out << "\nrandomized check over " << report.draws.size() << " reduced-form draws: ";
  const auto failed = std::count_if(report.draws.begin(), report.draws.end(), [](const auto& d) { return !d.pass; });
  out << failed << " of " << report.draws.size() << " fail\n";
  out << "verdict: " << to_string(report.verdict) << '\n';
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact identification checks for zero restrictions in structural VARs", "svar-ident"};
  RunConfig cfg;
  std::string command;
  std::string positional_spec;
  std::string format = "text";

  app.add_option("command", command, "check | rotate | demo | explain")
      ->required()
      ->check(CLI::IsMember({"check", "rotate", "demo", "explain"}));
  app.add_option("spec_file", positional_spec, "restriction spec (same as --spec)");
  app.add_option("--spec", cfg.spec_path, "restriction spec file");
  app.add_option("--draws", cfg.draws, "number of reduced-form draws M (>= 2)")->capture_default_str();
  app.add_option("--seed", cfg.seed, "base random seed")->capture_default_str();
  app.add_option("--sigma", cfg.sigma_path, "Sigma matrix file (rotate, explain)");
  app.add_option("--b", cfg.b_path, "B matrix file (rotate, explain)");
  app.add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_option("--tol", cfg.tol, "relative rank tolerance factor")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (!positional_spec.empty()) {
    if (!cfg.spec_path.empty() && cfg.spec_path != positional_spec) {
      err << "error: spec given both positionally and with --spec\n";
      return kExitUsage;
    }
    cfg.spec_path = positional_spec;
  }
  cfg.format = format == "json" ? Format::Json : Format::Text;
  if (command == "check") cfg.command = Command::Check;
  else if (command == "rotate") cfg.command = Command::Rotate;
  else if (command == "demo") cfg.command = Command::Demo;
  else cfg.command = Command::Explain;

  try {
    switch (cfg.command) {
      case Command::Check: return cmd_check(cfg, out);
      case Command::Rotate: return cmd_rotate(cfg, out);
      case Command::Demo: return cmd_demo(cfg, out);
      case Command::Explain: return cmd_explain(cfg, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::Infeasible:
      case Errc::PreconditionCountFailure: return kExitNotIdentified;
      default: return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace svarid::cli
