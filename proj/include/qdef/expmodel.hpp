#pragma once

#include <qdef/matcore.hpp>

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace qdef {

/// A quantum experiment: a Hilbert-space dimension and an ordered family of
/// density matrices indexed by parameter labels.
struct Experiment {
  int dim = 0;
  std::vector<std::string> labels;
  std::vector<Mat> states;

  int size() const { return static_cast<int>(labels.size()); }

  int index_of(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
      if (labels[i] == label) return i;
    return -1;
  }
};

/// Hermitian loss operators 0 <= L <= 1 on a decision space, one per label.
struct LossFamily {
  int dim_decision = 0;
  std::vector<std::string> labels;
  std::vector<Mat> operators;

  int size() const { return static_cast<int>(labels.size()); }
};

/// Per-label allowed errors e, each in [0, 1].
struct DeficiencyProfile {
  std::vector<std::string> labels;
  std::vector<double> e;

  static DeficiencyProfile zero(const std::vector<std::string>& labels) {
    return {labels, std::vector<double>(labels.size(), 0.0)};
  }
  static DeficiencyProfile uniform(const std::vector<std::string>& labels, double value) {
    return {labels, std::vector<double>(labels.size(), value)};
  }
};

/// Finite-support prior over the labels; weights sum to one.
struct Prior {
  std::vector<std::string> labels;
  std::vector<double> weights;
};

struct Violation {
  std::string what;
  std::string label;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

/// Lists every invariant violation with its magnitude; empty iff valid.
inline ValidationReport validate(const Experiment& e, double tol = 1e-9) {
  ValidationReport rep;
  if (e.dim < 1) rep.violations.push_back({"dimension must be >= 1", "", static_cast<double>(1 - e.dim)});
  if (e.labels.empty()) rep.violations.push_back({"experiment has no labels", "", 1.0});
  if (e.labels.size() != e.states.size())
    rep.violations.push_back({"label/state count mismatch", "",
                              std::abs(static_cast<double>(e.labels.size()) - static_cast<double>(e.states.size()))});
  for (int i = 0; i < e.size() && i < static_cast<int>(e.states.size()); ++i) {
    const std::string& lab = e.labels[i];
    for (int j = 0; j < i; ++j)
      if (e.labels[j] == lab) {
        rep.violations.push_back({"duplicate label", lab, 1.0});
        break;
      }
    const Mat& rho = e.states[i];
    if (rho.rows() != e.dim || rho.cols() != e.dim) {
      rep.violations.push_back({"state dimension mismatch", lab,
                                std::abs(static_cast<double>(rho.rows() - e.dim))});
      continue;
    }
    const double hdef = rho.hermiticity_defect();
    if (hdef > tol) {
      rep.violations.push_back({"state not Hermitian", lab, hdef});
      continue;
    }
    Spectrum sp = hermitian_spectrum(rho, std::max(tol, 1e-10));
    if (sp.eigenvalues.front() < -tol)
      rep.violations.push_back({"state not positive semidefinite", lab, -sp.eigenvalues.front()});
    const double tdev = std::abs(rho.trace().real() - 1.0);
    if (tdev > tol) rep.violations.push_back({"trace deviation", lab, tdev});
  }
  return rep;
}

inline ValidationReport validate(const LossFamily& l, double tol = 1e-9) {
  ValidationReport rep;
  if (l.dim_decision < 1) rep.violations.push_back({"decision dimension must be >= 1", "", 1.0});
  if (l.labels.size() != l.operators.size())
    rep.violations.push_back({"label/operator count mismatch", "", 1.0});
  for (int i = 0; i < l.size() && i < static_cast<int>(l.operators.size()); ++i) {
    const Mat& op = l.operators[i];
    if (op.rows() != l.dim_decision || op.cols() != l.dim_decision) {
      rep.violations.push_back({"operator dimension mismatch", l.labels[i], 0.0});
      continue;
    }
    if (op.hermiticity_defect() > tol) {
      rep.violations.push_back({"operator not Hermitian", l.labels[i], op.hermiticity_defect()});
      continue;
    }
    Spectrum sp = hermitian_spectrum(op, std::max(tol, 1e-10));
    if (sp.eigenvalues.front() < -tol)
      rep.violations.push_back({"loss operator not positive", l.labels[i], -sp.eigenvalues.front()});
    if (sp.eigenvalues.back() > 1.0 + tol)
      rep.violations.push_back({"loss operator norm exceeds one", l.labels[i], sp.eigenvalues.back() - 1.0});
  }
  return rep;
}

inline ValidationReport validate(const Prior& p, double tol = 1e-12) {
  ValidationReport rep;
  if (p.labels.size() != p.weights.size())
    rep.violations.push_back({"label/weight count mismatch", "", 1.0});
  double sum = 0.0;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    if (p.weights[i] < -tol)
      rep.violations.push_back({"negative weight", p.labels[i], -p.weights[i]});
    sum += p.weights[i];
  }
  if (std::abs(sum - 1.0) > tol) rep.violations.push_back({"weights do not sum to one", "", std::abs(sum - 1.0)});
  return rep;
}

inline ValidationReport validate(const DeficiencyProfile& p) {
  ValidationReport rep;
  if (p.labels.size() != p.e.size()) rep.violations.push_back({"label/value count mismatch", "", 1.0});
  for (std::size_t i = 0; i < p.e.size(); ++i) {
    if (p.e[i] < 0.0) rep.violations.push_back({"negative error budget", p.labels[i], -p.e[i]});
    if (p.e[i] > 1.0) rep.violations.push_back({"error budget exceeds one", p.labels[i], p.e[i] - 1.0});
  }
  return rep;
}

inline void require_valid(const Experiment& e, const char* who, double tol = 1e-8) {
  ValidationReport r = validate(e, tol);
  if (!r.valid())
    throw std::invalid_argument(std::string(who) + ": invalid experiment (" +
                                r.violations.front().what + ")");
}

// ---------------------------------------------------------------------------
// Bloch helpers (qubits): rho = (1 + v . sigma)/2.

inline Mat bloch_to_state(double x, double y, double z, double tol = 1e-12) {
  const double nrm = std::sqrt(x * x + y * y + z * z);
  if (nrm > 1.0 + tol) throw std::invalid_argument("bloch_to_state: vector lies outside the Bloch ball");
  Mat rho(2, 2);
  rho(0, 0) = (1.0 + z) / 2.0;
  rho(1, 1) = (1.0 - z) / 2.0;
  rho(0, 1) = cplx(x, -y) / 2.0;
  rho(1, 0) = cplx(x, y) / 2.0;
  return rho;
}

inline Mat bloch_to_state(const std::array<double, 3>& v, double tol = 1e-12) {
  return bloch_to_state(v[0], v[1], v[2], tol);
}

inline std::array<double, 3> state_to_bloch(const Mat& rho) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw std::invalid_argument("state_to_bloch: qubit state expected");
  const Mat h = rho.hermitized();
  return {2.0 * h(1, 0).real(), 2.0 * h(1, 0).imag(), (h(0, 0) - h(1, 1)).real()};
}

// ---------------------------------------------------------------------------

/// Replaces each state by its diagonal part in the given basis; idempotent.
inline Experiment dephase(const Experiment& e, const Mat& basis, double tol = 1e-9) {
  if (basis.rows() != e.dim || basis.cols() != e.dim)
    throw std::invalid_argument("dephase: basis dimension mismatch");
  if ((basis.adjoint() * basis - Mat::identity(e.dim)).frobenius_norm() > tol * e.dim)
    throw std::invalid_argument("dephase: basis is not unitary");
  Experiment out = e;
  for (Mat& rho : out.states) {
    Mat r = basis.adjoint() * rho * basis;
    Mat diag(e.dim, e.dim);
    for (int i = 0; i < e.dim; ++i) diag(i, i) = r(i, i).real();
    rho = basis * diag * basis.adjoint();
  }
  return out;
}

/// Embeds stochastic vectors as a commuting experiment of diagonal states.
inline Experiment classical_to_experiment(const std::vector<std::vector<double>>& dists,
                                          std::vector<std::string> labels = {},
                                          double tol = 1e-9) {
  if (dists.empty()) throw std::invalid_argument("classical_to_experiment: no distributions");
  const int k = static_cast<int>(dists.front().size());
  if (k < 1) throw std::invalid_argument("classical_to_experiment: empty distribution");
  if (labels.empty())
    for (std::size_t i = 0; i < dists.size(); ++i) labels.push_back(std::to_string(i));
  if (labels.size() != dists.size())
    throw std::invalid_argument("classical_to_experiment: label count mismatch");
  Experiment e;
  e.dim = k;
  e.labels = std::move(labels);
  for (const auto& p : dists) {
    if (static_cast<int>(p.size()) != k)
      throw std::invalid_argument("classical_to_experiment: inconsistent outcome counts");
    double sum = 0.0;
    for (double v : p) {
      if (v < -tol) throw std::invalid_argument("classical_to_experiment: negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > std::max(tol, 1e-9))
      throw std::invalid_argument("classical_to_experiment: distribution does not sum to one");
    Mat rho(k, k);
    for (int i = 0; i < k; ++i) rho(i, i) = std::max(0.0, p[i]);
    e.states.push_back(std::move(rho));
  }
  return e;
}

/// Diagonal of each state in the computational basis, as stochastic vectors.
inline std::vector<std::vector<double>> experiment_to_classical(const Experiment& e,
                                                                double offdiag_tol = 1e-9) {
  std::vector<std::vector<double>> out;
  for (const Mat& rho : e.states) {
    for (int i = 0; i < e.dim; ++i)
      for (int j = 0; j < e.dim; ++j)
        if (i != j && std::abs(rho(i, j)) > offdiag_tol)
          throw std::invalid_argument("experiment_to_classical: state is not diagonal");
    std::vector<double> p(e.dim);
    for (int i = 0; i < e.dim; ++i) p[i] = rho(i, i).real();
    out.push_back(std::move(p));
  }
  return out;
}

inline void require_same_labels(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": label sets differ");
}

}  // namespace qdef
