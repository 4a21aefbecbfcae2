#include "svarid/identifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "svarid/error.hpp"

namespace svarid {

std::string_view to_string(ColumnStatus status) {
  switch (status) {
    case ColumnStatus::Unique: return "Unique";
    case ColumnStatus::Redundant: return "Redundant";
    case ColumnStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ExactlyIdentified: return "ExactlyIdentified";
    case Verdict::NotIdentifiedCountFailure: return "NotIdentified_CountFailure";
    case Verdict::NotIdentifiedRedundancy: return "NotIdentified_Redundancy";
    case Verdict::InconclusiveDrawDisagreement: return "Inconclusive_DrawDisagreement";
  }
  return "Unknown";
}

CountCondition count_condition(const CompiledRestrictions& c) {
  CountCondition out;
  out.overall = true;
  for (int j = 0; j < c.n; ++j) {
    const bool ok = c.q[static_cast<std::size_t>(j)] == c.n - (j + 1);
    out.per_column.push_back(ok);
    out.overall = out.overall && ok;
  }
  return out;
}

Matrix q_tilde(int j, const CompiledRestrictions& c, const Matrix& f_val, std::span<const Vector> prior) {
  if (j < 1 || j > c.n) throw Error(Errc::InvalidArgument, "q_tilde: column index out of range");
  if (f_val.rows() != c.k || f_val.cols() != c.n) throw Error(Errc::DimensionMismatch, "q_tilde: f has wrong shape");
  if (static_cast<int>(prior.size()) != j - 1)
    throw Error(Errc::InvalidArgument, "q_tilde: need exactly j - 1 prior vectors");

  const auto idx = static_cast<std::size_t>(j - 1);
  const Eigen::Index restricted = c.q_bar[idx].rows();
  Matrix out(restricted + static_cast<Eigen::Index>(prior.size()), c.n);
  if (c.is_selection()) {
    const auto& rows = c.selected_rows[idx];
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = f_val.row(rows[r]);
  } else if (restricted > 0) {
    out.topRows(restricted) = c.q_bar[idx] * f_val;
  }
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (prior[i].size() != c.n) throw Error(Errc::DimensionMismatch, "q_tilde: prior vector has wrong length");
    out.row(restricted + static_cast<Eigen::Index>(i)) = prior[i].transpose();
  }
  return out;
}

SignNormalized sign_normalize(const Vector& p, int index, const Matrix& a0) {
  const double tol = 1e-12 * std::max(1.0, max_abs(a0));
  const double lead = a0.row(index).dot(p);
  bool flip = false;
  if (std::abs(lead) > tol) {
    flip = lead < 0.0;
  } else {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (std::abs(p(i)) > 1e-12) {
        flip = p(i) < 0.0;
        break;
      }
    }
  }
  return {flip ? Vector(-p) : p, flip};
}

namespace {

struct Sequence {
  Matrix f;
  Matrix a0;
  std::vector<Vector> prior;
  RotationResult result;
  bool aborted = false;
};

void require_count(const CompiledRestrictions& c) {
  const auto cc = count_condition(c);
  if (cc.overall) return;
  std::ostringstream msg;
  msg << "counting condition q_j = n - j fails (q =";
  for (int q : c.q) msg << ' ' << q;
  msg << ")";
  throw Error(Errc::PreconditionCountFailure, msg.str());
}

Vector arbitrary_unit(const Matrix& basis, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w(basis.cols());
  do {
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normal(rng);
  } while (w.norm() < 1e-8);
  Vector p = basis * w;
  return p / p.norm();
}

Sequence run_sequence(const ReducedFormParams& r, const CompiledRestrictions& c, const RestrictionSpec& spec,
                      OnRedundancy mode, std::uint64_t pick_seed, const IdentifierOptions& opts) {
  if (r.dims() != spec.dims || c.n != spec.dims.n || c.k != spec.k())
    throw Error(Errc::DimensionMismatch, "reduced form, spec and compiled restrictions disagree on dimensions");
  require_count(c);

  const StructuralParams base = baseline_structural(r);
  Sequence seq{assemble_f(base, spec), base.a0(), {}, {}, false};
  const int n = c.n;
  seq.result.unique = true;

  for (int j = 1; j <= n; ++j) {
    const Matrix qt = q_tilde(j, c, seq.f, seq.prior);
    const NullVectorResult nv = unit_null_vector(qt, opts.tolerance);
    const int original = c.permutation[static_cast<std::size_t>(j - 1)];

    ColumnDiagnostic d;
    d.j = j;
    d.column = original + 1;
    d.qtilde_rows = static_cast<int>(qt.rows());
    d.rank = nv.rank;
    d.required_rank = n - 1;
    d.null_dimension = nv.null_dimension;
    d.singular_values = nv.singular;

    Vector pj;
    switch (nv.status) {
      case NullStatus::Unique:
        d.status = ColumnStatus::Unique;
        pj = nv.vector;
        break;
      case NullStatus::RankDeficient:
        d.status = ColumnStatus::Redundant;
        seq.result.unique = false;
        if (mode == OnRedundancy::PickArbitrary)
          pj = arbitrary_unit(nv.basis, draw_seed(pick_seed, static_cast<std::uint64_t>(j)));
        break;
      case NullStatus::NoNullVector:
        d.status = ColumnStatus::Infeasible;
        seq.result.unique = false;
        break;
    }
    seq.result.per_column.push_back(std::move(d));

    if (pj.size() == 0) {
      seq.aborted = true;
      return seq;
    }
    auto normalized = sign_normalize(pj, original, seq.a0);
    seq.result.sign_flips.push_back(normalized.flipped ? -1 : 1);
    seq.prior.push_back(std::move(normalized.p));
  }

  Matrix p(n, n);
  for (int j = 0; j < n; ++j) p.col(c.permutation[static_cast<std::size_t>(j)]) = seq.prior[static_cast<std::size_t>(j)];
  seq.result.p = std::move(p);
  return seq;
}

}  // namespace

RotationResult nonredundancy_at(const ReducedFormParams& r, const CompiledRestrictions& c, const RestrictionSpec& spec,
                                const IdentifierOptions& opts) {
  return run_sequence(r, c, spec, OnRedundancy::Abort, 0, opts).result;
}

RotationResult construct_rotation(const ReducedFormParams& r, const CompiledRestrictions& c,
                                  const RestrictionSpec& spec, OnRedundancy mode, std::uint64_t pick_seed,
                                  const IdentifierOptions& opts) {
  Sequence seq = run_sequence(r, c, spec, mode, pick_seed, opts);
  const auto& last = seq.result.per_column.back();
  if (last.status == ColumnStatus::Infeasible)
    throw Error(Errc::Infeasible, "restrictions cannot be satisfied at this point: Qt_" + std::to_string(last.j) +
                                      " has full column rank");
  return std::move(seq.result);
}

Matrix m_matrix(int j, const CompiledRestrictions& c, const Matrix& f) {
  if (j < 1 || j > c.n) throw Error(Errc::InvalidArgument, "m_matrix: column index out of range");
  const int n = c.n;
  Matrix permuted(f.rows(), n);
  for (int i = 0; i < n; ++i) permuted.col(i) = f.col(c.permutation[static_cast<std::size_t>(i)]);
  Matrix m = Matrix::Zero(c.k + j, n);
  m.topRows(c.k) = c.q_matrices[static_cast<std::size_t>(j - 1)] * permuted;
  m.bottomLeftCorner(j, j).setIdentity();
  return m;
}

CrossCheckResult rank_cross_check(const StructuralParams& s_restricted, const CompiledRestrictions& c,
                              const RestrictionSpec& spec, const IdentifierOptions& opts) {
  const double residual = restriction_residual(s_restricted, c, spec);
  if (!(residual <= 1e-8)) {
    std::ostringstream msg;
    msg << "point is not in the restricted set (residual " << residual << ")";
    throw Error(Errc::NotInR, msg.str());
  }
  const Matrix f = assemble_f(s_restricted, spec);
  CrossCheckResult out;
  out.total_restrictions = c.total;
  out.total_required = c.n * (c.n - 1) / 2;
  out.pass = out.total_restrictions == out.total_required;
  for (int j = 1; j <= c.n; ++j) {
    const int rank = numerical_rank(m_matrix(j, c, f), opts.tolerance);
    out.ranks.push_back(rank);
    out.pass = out.pass && rank == c.n;
  }
  return out;
}

IdentificationReport check_exact_identification(const RestrictionSpec& spec, const CheckConfig& cfg) {
  if (cfg.draws < 2) throw Error(Errc::InvalidArgument, "at least two reduced-form draws are required");

  IdentificationReport report;
  report.compiled = compile(spec);
  const auto& c = report.compiled;
  report.count = count_condition(c);
  report.total_restrictions = c.total;
  report.total_required = c.n * (c.n - 1) / 2;

  if (!report.count.overall) {
    std::ostringstream note;
    note << "counting condition q_j = n - j fails at column(s)";
    for (int j = 0; j < c.n; ++j)
      if (!report.count.per_column[static_cast<std::size_t>(j)]) note << ' ' << j + 1;
    if (report.total_restrictions > report.total_required)
      note << "; " << report.total_restrictions << " restrictions exceed n(n-1)/2 = " << report.total_required
           << " (over-identifying restrictions are not analyzed)";
    else if (report.total_restrictions < report.total_required)
      note << "; " << report.total_restrictions << " restrictions are fewer than n(n-1)/2 = "
           << report.total_required;
    else
      note << "; the total matches n(n-1)/2 but is distributed unevenly across columns";
    report.note = note.str();
    report.verdict = Verdict::NotIdentifiedCountFailure;
    return report;
  }

  SamplerConfig sampler{spec.dims, cfg.diag_floor, cfg.scale, cfg.seed};
  int passed = 0;
  for (int m = 0; m < cfg.draws; ++m) {
    const auto index = static_cast<std::uint64_t>(m);
    DrawOutcome draw;
    draw.index = index;
    draw.seed = draw_seed(cfg.seed, index);
    draw.rotation = nonredundancy_at(draw_reduced_form(sampler, index), c, spec, cfg.identifier);
    draw.pass = draw.rotation.unique;
    passed += draw.pass ? 1 : 0;
    report.draws.push_back(std::move(draw));
  }

  if (passed == cfg.draws) report.verdict = Verdict::ExactlyIdentified;
  else if (passed == 0) report.verdict = Verdict::NotIdentifiedRedundancy;
  else report.verdict = Verdict::InconclusiveDrawDisagreement;
  return report;
}

std::optional<RedundancyExplanation> explain_redundancy(const ReducedFormParams& r, const CompiledRestrictions& c,
                                                        const RestrictionSpec& spec, const IdentifierOptions& opts) {
  if (!c.is_selection()) throw Error(Errc::InvalidArgument, "explain_redundancy needs selection-row restrictions");
  const Sequence seq = run_sequence(r, c, spec, OnRedundancy::Abort, 0, opts);
  if (!seq.aborted) return std::nullopt;

  const auto& failing = seq.result.per_column.back();
  RedundancyExplanation out;
  out.j = failing.j;
  out.column = failing.column;
  out.rank = failing.rank;
  out.required_rank = failing.required_rank;

  const Matrix qt = q_tilde(failing.j, c, seq.f, seq.prior);
  const auto idx = static_cast<std::size_t>(failing.j - 1);
  const int restricted = static_cast<int>(c.selected_rows[idx].size());
  const int rows = static_cast<int>(qt.rows());

  for (int i = 0; i < restricted; ++i) {
    Matrix others(rows - 1, qt.cols());
    std::vector<int> source;  // row of qt behind each row of others
    for (int t = 0, o = 0; t < rows; ++t) {
      if (t == i) continue;
      others.row(o++) = qt.row(t);
      source.push_back(t);
    }
    const bool dependent =
        qt.row(i).squaredNorm() == 0.0 ||
        (others.rows() > 0 && numerical_rank(others, opts.tolerance) == numerical_rank(qt, opts.tolerance));
    if (!dependent) continue;

    ImpliedRestriction implied;
    implied.cell = c.cell(failing.j - 1, i);
    if (others.rows() > 0 && qt.row(i).squaredNorm() > 0.0) {
      const Vector target = qt.row(i).transpose();
      const Vector coef = others.transpose().completeOrthogonalDecomposition().solve(target);
      const double cut = 1e-8 * std::max(1.0, coef.cwiseAbs().maxCoeff());
      for (int o = 0; o < static_cast<int>(coef.size()); ++o) {
        if (std::abs(coef(o)) <= cut) continue;
        const int t = source[static_cast<std::size_t>(o)];
        if (t < restricted) {
          implied.implied_by.push_back(c.cell(failing.j - 1, t));
        } else {
          const int prior_col = t - restricted;  // p_{prior_col + 1} came from column prior_col
          const auto& rows_l = c.selected_rows[static_cast<std::size_t>(prior_col)];
          for (int s = 0; s < static_cast<int>(rows_l.size()); ++s) implied.implied_by.push_back(c.cell(prior_col, s));
        }
      }
    }
    out.implied.push_back(std::move(implied));
  }
  return out;
}

}  // namespace svarid
