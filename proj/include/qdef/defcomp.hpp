#pragma once

#include <qdef/chan.hpp>
#include <qdef/expmodel.hpp>
#include <qdef/sdpsolve.hpp>
#include <qdef/util.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace qdef {

/// Result of the randomization-criterion optimization: the deficiency value,
/// the optimizing channel, honest per-label trace-norm errors minus the
/// allowed budget, and the raw solver diagnostics.
struct DeficiencyReport {
  double value = 0.0;
  ChoiMatrix channel;
  std::vector<std::string> labels;
  std::vector<double> per_label_error;
  Solution solver;
};

/// min over CPTP J of max_theta ( || J(rho_theta) - sigma_theta ||_1 - e_theta ),
/// solved as a cone program: minimize t with, per label,
///   J(rho) - P + N = sigma,  tr(P + N) + s - t = e,  J, P, N PSD, s >= 0,
/// plus trace preservation of J. The epigraph variable is shifted by
/// min_theta e_theta so it stays a cone variable.
inline DeficiencyReport quantum_deficiency(const Experiment& E, const Experiment& F,
                                           const DeficiencyProfile& profile,
                                           const SolveOptions& opts = {}) {
  require_valid(E, "quantum_deficiency");
  require_valid(F, "quantum_deficiency");
  require_same_labels(E.labels, F.labels, "quantum_deficiency");
  if (!profile.labels.empty()) require_same_labels(E.labels, profile.labels, "quantum_deficiency profile");
  const int T = E.size();
  std::vector<double> e(T, 0.0);
  if (!profile.labels.empty()) e = profile.e;
  const int din = E.dim, dout = F.dim;
  const double offset = *std::min_element(e.begin(), e.end());

  ConeProblem p;
  const int Jb = p.add_block(din * dout);
  std::vector<int> Pb(T), Nb(T), Sb(T);
  for (int i = 0; i < T; ++i) {
    Pb[i] = p.add_block(dout);
    Nb[i] = p.add_block(dout);
  }
  for (int i = 0; i < T; ++i) Sb[i] = p.add_scalar_block();
  const int Tb = p.add_scalar_block();
  p.set_objective_scalar(Tb, 1.0);

  const int tp_eq = p.add_matrix_equation(Mat::identity(din));
  p.add_equation_term(tp_eq, din, Jb,
                      [&](const Mat& basis) { return partial_trace(basis, dout, din, 1); });

  for (int i = 0; i < T; ++i) {
    const Mat rho = E.states[i].hermitized();
    const int eq = p.add_matrix_equation(F.states[i].hermitized());
    p.add_equation_term(eq, dout, Jb, [&](const Mat& basis) {
      return apply(ChoiMatrix{din, dout, basis}, rho).hermitized();
    });
    p.add_equation_identity(eq, Pb[i], -1.0);
    p.add_equation_identity(eq, Nb[i], 1.0);

    const int row = p.add_row(e[i] - offset);
    p.set_row_block(row, Pb[i], Mat::identity(dout));
    p.set_row_block(row, Nb[i], Mat::identity(dout));
    p.set_row_scalar(row, Sb[i], 1.0);
    p.set_row_scalar(row, Tb, -1.0);
  }

  Solution sol = solve(p, opts);

  DeficiencyReport rep;
  rep.labels = E.labels;
  rep.channel = ChoiMatrix{din, dout, sol.block_matrix(Jb).hermitized()};
  rep.value = sol.block_scalar(Tb) - offset;
  for (int i = 0; i < T; ++i) {
    const Mat delta = (apply(rep.channel, E.states[i]) - F.states[i]).hermitized();
    rep.per_label_error.push_back(trace_norm(delta, 1e-6) - e[i]);
  }
  rep.solver = std::move(sol);
  return rep;
}

inline DeficiencyReport quantum_deficiency(const Experiment& E, const Experiment& F,
                                           const SolveOptions& opts = {}) {
  return quantum_deficiency(E, F, DeficiencyProfile::zero(E.labels), opts);
}

/// True iff the optimized deficiency value is at most check_tol.
inline std::pair<bool, DeficiencyReport> check_e_deficient(const Experiment& E, const Experiment& F,
                                                           const DeficiencyProfile& profile,
                                                           const SolveOptions& opts = {},
                                                           double check_tol = 1e-6) {
  DeficiencyReport rep = quantum_deficiency(E, F, profile, opts);
  return {rep.value <= check_tol, std::move(rep)};
}

// ---------------------------------------------------------------------------

struct BayesGapReport {
  double gap = 0.0;
  double optimal_risk = 0.0;
  double reference_risk = 0.0;
  ChoiMatrix channel;
  Solution solver;
};

/// inf over CPTP D' of the average risk on E minus the average risk of the
/// given decision D on F, for loss operators L and prior pi.
inline BayesGapReport bayes_risk_gap(const Experiment& E, const Experiment& F, const LossFamily& L,
                                     const ChoiMatrix& D, const Prior& pi,
                                     const SolveOptions& opts = {}) {
  require_valid(E, "bayes_risk_gap");
  require_valid(F, "bayes_risk_gap");
  require_same_labels(E.labels, F.labels, "bayes_risk_gap");
  require_same_labels(E.labels, L.labels, "bayes_risk_gap loss");
  require_same_labels(E.labels, pi.labels, "bayes_risk_gap prior");
  if (!validate(L).valid()) throw std::invalid_argument("bayes_risk_gap: invalid loss family");
  if (!validate(pi).valid()) throw std::invalid_argument("bayes_risk_gap: invalid prior");
  if (D.d_in != F.dim || D.d_out != L.dim_decision)
    throw std::invalid_argument("bayes_risk_gap: decision channel dimensions mismatch");

  const int T = E.size();
  const int din = E.dim, dd = L.dim_decision;

  double reference = 0.0;
  for (int i = 0; i < T; ++i)
    reference += pi.weights[i] * (L.operators[i] * apply(D, F.states[i])).trace().real();

  // objective tr(J M) with M = sum_theta pi L (x) rho^T
  Mat M(dd * din, dd * din);
  for (int i = 0; i < T; ++i)
    M += tensor(L.operators[i], E.states[i].transpose()) * cplx(pi.weights[i]);
  M = M.hermitized();

  ConeProblem p;
  const int Jb = p.add_block(din * dd);
  p.set_objective(Jb, M);
  const int tp_eq = p.add_matrix_equation(Mat::identity(din));
  p.add_equation_term(tp_eq, din, Jb,
                      [&](const Mat& basis) { return partial_trace(basis, dd, din, 1); });

  Solution sol = solve(p, opts);

  BayesGapReport rep;
  rep.channel = ChoiMatrix{din, dd, sol.block_matrix(Jb).hermitized()};
  rep.optimal_risk = sol.objective_value;
  rep.reference_risk = reference;
  rep.gap = rep.optimal_risk - reference;
  rep.solver = std::move(sol);
  return rep;
}

// ---------------------------------------------------------------------------

struct BinaryGrid {
  double s_min = 1e-3;
  double s_max = 1e3;
  int points = 200;
  double bracket_width = 1e-10;
};

/// Scan of the two-decision trace-norm criterion
///   || rho0 - s rho1 ||_1 >= || sigma0 - s sigma1 ||_1 - e0 - s e1
/// over s >= 0, with golden-section refinement around the worst grid points.
struct BinaryCriterionReport {
  std::vector<double> s_grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double min_margin = 0.0;
  double worst_s = 0.0;
  double uniform_e = 0.0;
  double uniform_e_s = 0.0;
  bool holds = false;
};

namespace detail {

/// s >= 0 where det(a - s b) = 0: the trace-norm curves kink exactly at these
/// generalized eigenvalues, so the scan grid is seeded with them.
inline std::vector<double> pencil_kinks(const Mat& a, const Mat& b) {
  const int d = a.rows();
  Spectrum sb = hermitian_spectrum(b, 1e-6);
  std::vector<double> inv_sqrt(d);
  const double floor_val = 1e-14 * std::max(1.0, sb.eigenvalues.back());
  for (int i = 0; i < d; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(std::max(sb.eigenvalues[i], floor_val));
  const Mat w = spectral_apply(sb, inv_sqrt);
  Spectrum sp = hermitian_spectrum((w * a * w).hermitized(), 1e-6);
  std::vector<double> kinks;
  for (double lam : sp.eigenvalues)
    if (lam > 0.0 && std::isfinite(lam)) kinks.push_back(lam);
  return kinks;
}

}  // namespace detail

inline BinaryCriterionReport binary_trace_criterion(const Experiment& E, const Experiment& F,
                                                    double e0, double e1,
                                                    const BinaryGrid& grid = {},
                                                    double margin_tol = 1e-6) {
  require_valid(E, "binary_trace_criterion");
  require_valid(F, "binary_trace_criterion");
  if (E.size() != 2 || F.size() != 2)
    throw std::invalid_argument("binary_trace_criterion: experiments must have exactly 2 labels");
  if (grid.points < 2 || grid.s_min <= 0.0 || grid.s_max <= grid.s_min)
    throw std::invalid_argument("binary_trace_criterion: bad grid");

  const Mat r0 = E.states[0].hermitized(), r1 = E.states[1].hermitized();
  const Mat q0 = F.states[0].hermitized(), q1 = F.states[1].hermitized();
  auto lhs_norm = [&](double s) { return trace_norm((r0 - r1 * cplx(s)).hermitized(), 1e-6); };
  auto rhs_norm = [&](double s) { return trace_norm((q0 - q1 * cplx(s)).hermitized(), 1e-6); };
  auto margin = [&](double s) { return lhs_norm(s) - (rhs_norm(s) - e0 - s * e1); };
  auto gain = [&](double s) { return (rhs_norm(s) - lhs_norm(s)) / (1.0 + s); };

  BinaryCriterionReport rep;
  std::vector<double> sgrid;
  sgrid.push_back(0.0);
  const double ratio = std::log(grid.s_max / grid.s_min) / (grid.points - 1);
  for (int i = 0; i < grid.points; ++i) sgrid.push_back(grid.s_min * std::exp(ratio * i));
  for (double s : detail::pencil_kinks(r0, r1))
    if (s <= grid.s_max) sgrid.push_back(s);
  for (double s : detail::pencil_kinks(q0, q1))
    if (s <= grid.s_max) sgrid.push_back(s);
  std::sort(sgrid.begin(), sgrid.end());

  std::vector<double> mvals(sgrid.size()), gvals(sgrid.size());
  for (std::size_t i = 0; i < sgrid.size(); ++i) {
    mvals[i] = margin(sgrid[i]);
    gvals[i] = gain(sgrid[i]);
  }

  // candidates: every discrete local extremum, best values first, capped
  auto pick_indices = [](const std::vector<double>& vals, bool smallest) {
    std::vector<std::size_t> idx;
    const double band = 1e-15;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const bool left_ok = i == 0 || (smallest ? vals[i] <= vals[i - 1] + band
                                               : vals[i] >= vals[i - 1] - band);
      const bool right_ok = i + 1 == vals.size() || (smallest ? vals[i] <= vals[i + 1] + band
                                                              : vals[i] >= vals[i + 1] - band);
      if (left_ok && right_ok) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return smallest ? vals[a] < vals[b] : vals[a] > vals[b];
    });
    if (idx.size() > 16) idx.resize(16);
    return idx;
  };

  double min_margin = mvals[0];
  double worst_s = sgrid[0];
  for (std::size_t i = 1; i < sgrid.size(); ++i)
    if (mvals[i] < min_margin) {
      min_margin = mvals[i];
      worst_s = sgrid[i];
    }
  std::vector<double> refined;
  for (std::size_t i : pick_indices(mvals, true)) {
    const double lo = i == 0 ? 0.0 : sgrid[i - 1];
    const double hi = i + 1 < sgrid.size() ? sgrid[i + 1] : sgrid[i];
    ScalarOpt opt = golden_section_minimize(margin, lo, hi, grid.bracket_width);
    refined.push_back(opt.x);
    if (opt.value < min_margin) {
      min_margin = opt.value;
      worst_s = opt.x;
    }
  }

  double best_gain = gvals[0];
  double best_gain_s = sgrid[0];
  for (std::size_t i = 1; i < sgrid.size(); ++i)
    if (gvals[i] > best_gain) {
      best_gain = gvals[i];
      best_gain_s = sgrid[i];
    }
  for (std::size_t i : pick_indices(gvals, false)) {
    const double lo = i == 0 ? 0.0 : sgrid[i - 1];
    const double hi = i + 1 < sgrid.size() ? sgrid[i + 1] : sgrid[i];
    ScalarOpt opt = golden_section_maximize(gain, lo, hi, grid.bracket_width);
    refined.push_back(opt.x);
    if (opt.value > best_gain) {
      best_gain = opt.value;
      best_gain_s = opt.x;
    }
  }
  // the s -> infinity limit of the gain, evaluated explicitly
  const double gain_inf = trace_norm(q1, 1e-6) - trace_norm(r1, 1e-6);
  if (gain_inf > best_gain) {
    best_gain = gain_inf;
    best_gain_s = std::numeric_limits<double>::infinity();
  }

  for (double s : refined) sgrid.push_back(s);
  std::sort(sgrid.begin(), sgrid.end());
  rep.s_grid = sgrid;
  for (double s : sgrid) {
    rep.lhs.push_back(lhs_norm(s));
    rep.rhs.push_back(rhs_norm(s) - e0 - s * e1);
  }
  rep.min_margin = min_margin;
  rep.worst_s = worst_s;
  rep.uniform_e = std::max(0.0, best_gain);
  rep.uniform_e_s = best_gain_s;
  rep.holds = min_margin >= -margin_tol;
  return rep;
}

/// For qubit pairs the zero-budget trace-norm criterion characterizes exact
/// channel transformability; this runs it with e = 0.
inline std::pair<bool, BinaryCriterionReport> alberti_uhlmann_check(const Experiment& E,
                                                                    const Experiment& F,
                                                                    const BinaryGrid& grid = {},
                                                                    double margin_tol = 1e-6) {
  if (E.dim != 2 || F.dim != 2)
    throw std::invalid_argument("alberti_uhlmann_check: qubit experiments expected");
  BinaryCriterionReport rep = binary_trace_criterion(E, F, 0.0, 0.0, grid, margin_tol);
  const bool ok = rep.holds;
  return {ok, std::move(rep)};
}

// ---------------------------------------------------------------------------

struct ClassicalDeficiencyReport {
  double value = 0.0;
  std::vector<std::vector<double>> channel;  // row-major, columns stochastic
  std::vector<double> per_label_error;
  Solution solver;
};

/// min over column-stochastic matrices of max_theta l1(Lambda P_theta - Q_theta),
/// as a pure LP in the cone solver.
inline ClassicalDeficiencyReport classical_deficiency(const std::vector<std::vector<double>>& P,
                                                      const std::vector<std::vector<double>>& Q,
                                                      const SolveOptions& opts = {}) {
  if (P.empty() || Q.empty() || P.size() != Q.size())
    throw std::invalid_argument("classical_deficiency: label counts differ");
  const int T = static_cast<int>(P.size());
  const int kp = static_cast<int>(P.front().size());
  const int kq = static_cast<int>(Q.front().size());
  auto check_stochastic = [](const std::vector<std::vector<double>>& V, int k, const char* who) {
    for (const auto& v : V) {
      if (static_cast<int>(v.size()) != k)
        throw std::invalid_argument(std::string(who) + ": inconsistent outcome counts");
      double sum = 0.0;
      for (double x : v) {
        if (x < -1e-9) throw std::invalid_argument(std::string(who) + ": negative entry");
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-7)
        throw std::invalid_argument(std::string(who) + ": column does not sum to one");
    }
  };
  check_stochastic(P, kp, "classical_deficiency P");
  check_stochastic(Q, kq, "classical_deficiency Q");

  ConeProblem prob;
  std::vector<int> Lb(static_cast<std::size_t>(kq) * kp);  // Lambda[i][j], i out, j in
  for (auto& blk : Lb) blk = prob.add_scalar_block();
  std::vector<std::vector<int>> pb(T), nb(T);
  for (int t = 0; t < T; ++t) {
    pb[t].resize(kq);
    nb[t].resize(kq);
    for (int i = 0; i < kq; ++i) pb[t][i] = prob.add_scalar_block();
    for (int i = 0; i < kq; ++i) nb[t][i] = prob.add_scalar_block();
  }
  std::vector<int> sb(T);
  for (int t = 0; t < T; ++t) sb[t] = prob.add_scalar_block();
  const int tb = prob.add_scalar_block();
  prob.set_objective_scalar(tb, 1.0);

  for (int j = 0; j < kp; ++j) {  // columns of Lambda sum to one
    const int row = prob.add_row(1.0);
    for (int i = 0; i < kq; ++i) prob.set_row_scalar(row, Lb[i * kp + j], 1.0);
  }
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < kq; ++i) {
      const int row = prob.add_row(Q[t][i]);
      for (int j = 0; j < kp; ++j) prob.set_row_scalar(row, Lb[i * kp + j], P[t][j]);
      prob.set_row_scalar(row, pb[t][i], -1.0);
      prob.set_row_scalar(row, nb[t][i], 1.0);
    }
    const int row = prob.add_row(0.0);
    for (int i = 0; i < kq; ++i) {
      prob.set_row_scalar(row, pb[t][i], 1.0);
      prob.set_row_scalar(row, nb[t][i], 1.0);
    }
    prob.set_row_scalar(row, sb[t], 1.0);
    prob.set_row_scalar(row, tb, -1.0);
  }

  Solution sol = solve(prob, opts);

  ClassicalDeficiencyReport rep;
  rep.value = sol.block_scalar(tb);
  rep.channel.assign(kq, std::vector<double>(kp, 0.0));
  for (int i = 0; i < kq; ++i)
    for (int j = 0; j < kp; ++j) rep.channel[i][j] = sol.block_scalar(Lb[i * kp + j]);
  for (int t = 0; t < T; ++t) {
    double err = 0.0;
    for (int i = 0; i < kq; ++i) {
      double v = -Q[t][i];
      for (int j = 0; j < kp; ++j) v += rep.channel[i][j] * P[t][j];
      err += std::abs(v);
    }
    rep.per_label_error.push_back(err);
  }
  rep.solver = std::move(sol);
  return rep;
}

}  // namespace qdef
