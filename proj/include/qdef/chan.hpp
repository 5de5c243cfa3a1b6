#pragma once

#include <qdef/expmodel.hpp>
#include <qdef/matcore.hpp>

#include <utility>
#include <vector>

namespace qdef {

/// Choi representation of a channel, J = sum_ij Phi(|i><j|) (x) |i><j| with
/// the output factor first. CPTP means J is PSD and its partial trace over
/// the output factor equals the identity on the input space.
struct ChoiMatrix {
  int d_in = 0;
  int d_out = 0;
  Mat J;
};

struct CptpReport {
  double cp_violation = 0.0;  // most negative eigenvalue of J, clipped at 0
  double tp_defect = 0.0;     // || tr_out J - I ||_F
  bool ok(double tol = 1e-9) const { return cp_violation <= tol && tp_defect <= tol; }
};

inline CptpReport check_cptp(const ChoiMatrix& c, double herm_tol = 1e-8) {
  if (c.J.rows() != c.d_in * c.d_out || !c.J.square())
    throw std::invalid_argument("check_cptp: Choi dimension mismatch");
  CptpReport rep;
  rep.cp_violation = std::max(0.0, -min_eigenvalue(c.J, herm_tol));
  Mat tr_out = partial_trace(c.J, c.d_out, c.d_in, 1);
  rep.tp_defect = (tr_out - Mat::identity(c.d_in)).frobenius_norm();
  return rep;
}

/// Action of the channel: tr_in[ J (1 (x) rho^T) ].
inline Mat apply(const ChoiMatrix& c, const Mat& rho) {
  if (rho.rows() != c.d_in || rho.cols() != c.d_in)
    throw std::invalid_argument("apply: state dimension mismatch");
  const Mat rt = rho.transpose();
  Mat out(c.d_out, c.d_out);
  for (int a = 0; a < c.d_out; ++a)
    for (int b = 0; b < c.d_out; ++b) {
      cplx s = 0.0;
      for (int j = 0; j < c.d_in; ++j)
        for (int k = 0; k < c.d_in; ++k) s += c.J(a * c.d_in + j, b * c.d_in + k) * rt(k, j);
      out(a, b) = s;
    }
  return out;
}

inline Experiment apply(const ChoiMatrix& c, const Experiment& e) {
  Experiment out;
  out.dim = c.d_out;
  out.labels = e.labels;
  for (const Mat& rho : e.states) out.states.push_back(apply(c, rho).hermitized());
  return out;
}

inline ChoiMatrix choi_of_kraus(const std::vector<Mat>& kraus, int d_in, int d_out) {
  ChoiMatrix c{d_in, d_out, Mat(d_in * d_out, d_in * d_out)};
  for (const Mat& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in)
      throw std::invalid_argument("choi_of_kraus: operator shape mismatch");
    // vec(K) vec(K)^dagger in the (out (x) in) ordering
    std::vector<cplx> v(static_cast<std::size_t>(d_in) * d_out);
    for (int a = 0; a < d_out; ++a)
      for (int i = 0; i < d_in; ++i) v[a * d_in + i] = k(a, i);
    for (std::size_t p = 0; p < v.size(); ++p)
      for (std::size_t q = 0; q < v.size(); ++q) c.J(p, q) += v[p] * std::conj(v[q]);
  }
  return c;
}

inline ChoiMatrix identity_choi(int d) { return choi_of_kraus({Mat::identity(d)}, d, d); }

/// Depolarizing family Phi(X) = (1-lambda) (tr X)/d 1 + lambda V^dagger X V.
inline ChoiMatrix choi_of_depolarizing(int d, double lam, const Mat& V) {
  if (lam < 0.0 || lam > 1.0)
    throw std::invalid_argument("choi_of_depolarizing: lambda must lie in [0, 1]");
  if (V.rows() != d || V.cols() != d ||
      (V.adjoint() * V - Mat::identity(d)).frobenius_norm() > 1e-9 * d)
    throw std::invalid_argument("choi_of_depolarizing: V is not unitary");
  ChoiMatrix c{d, d, Mat(d * d, d * d)};
  const Mat vd = V.adjoint();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat eij(d, d);
      eij(i, j) = 1.0;
      Mat img = vd * eij * V * cplx(lam);
      if (i == j)
        for (int a = 0; a < d; ++a) img(a, a) += (1.0 - lam) / d;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) c.J(a * d + i, b * d + j) = img(a, b);
    }
  c.J = c.J.hermitized();
  return c;
}

/// Mixture of discrete Weyl conjugations with weights p over the d^2 pairs
/// (t, s) in row-major order.
inline ChoiMatrix choi_of_pauli_mixture(int d, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != d * d)
    throw std::invalid_argument("choi_of_pauli_mixture: weight count must be d^2");
  double sum = 0.0;
  for (double w : p) {
    if (w < -1e-12) throw std::invalid_argument("choi_of_pauli_mixture: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("choi_of_pauli_mixture: weights must sum to one");
  std::vector<Mat> kraus;
  for (int t = 0; t < d; ++t)
    for (int s = 0; s < d; ++s) {
      const double w = std::max(0.0, p[t * d + s]);
      if (w == 0.0) continue;
      kraus.push_back(discrete_weyl(d, t, s) * cplx(std::sqrt(w)));
    }
  if (kraus.empty()) kraus.push_back(Mat::identity(d));
  return choi_of_kraus(kraus, d, d);
}

/// The d^2 discrete Weyl pairs (U_g, V_g) with U = V = X^t Z^s.
inline std::vector<std::pair<Mat, Mat>> weyl_group_pairs(int d) {
  std::vector<std::pair<Mat, Mat>> g;
  for (int t = 0; t < d; ++t)
    for (int s = 0; s < d; ++s) {
      Mat w = discrete_weyl(d, t, s);
      g.emplace_back(w, w);
    }
  return g;
}

namespace detail {

inline Mat covariance_conjugator(const std::pair<Mat, Mat>& g, int d_in, int d_out) {
  const Mat& U = g.first;
  const Mat& V = g.second;
  if (U.rows() != d_in || U.cols() != d_in || V.rows() != d_out || V.cols() != d_out)
    throw std::invalid_argument("covariance: group element dimension mismatch");
  // conj(U) acts on the input factor, V on the output factor
  return tensor(V, U.conjugate());
}

}  // namespace detail

/// Max over g of the Frobenius norm of the commutator between the Choi matrix
/// and the conjugated group action; zero iff covariant for the listed pairs.
inline double covariance_defect(const ChoiMatrix& c, const std::vector<std::pair<Mat, Mat>>& group) {
  double worst = 0.0;
  for (const auto& g : group) {
    const Mat W = detail::covariance_conjugator(g, c.d_in, c.d_out);
    worst = std::max(worst, (W * c.J - c.J * W).frobenius_norm());
  }
  return worst;
}

/// Uniform group average M_g V_g^dagger Phi(U_g . U_g^dagger) V_g at the Choi
/// level; output is CPTP and covariant when the list forms a group.
inline ChoiMatrix group_average(const ChoiMatrix& c, const std::vector<std::pair<Mat, Mat>>& group) {
  if (group.empty()) throw std::invalid_argument("group_average: empty group");
  ChoiMatrix out{c.d_in, c.d_out, Mat(c.J.rows(), c.J.cols())};
  for (const auto& g : group) {
    const Mat W = detail::covariance_conjugator(g, c.d_in, c.d_out);
    out.J += W.adjoint() * c.J * W;
  }
  out.J *= cplx(1.0 / static_cast<double>(group.size()));
  out.J = out.J.hermitized();
  return out;
}

}  // namespace qdef
