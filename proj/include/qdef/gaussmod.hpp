#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdef {

/// Real 2x2 matrices; all the one-mode Gaussian shift analysis lives here.
struct Mat2 {
  double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static Mat2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }
  static Mat2 scale(double s) { return {{{s, 0.0}, {0.0, s}}}; }
  static Mat2 diag(double d0, double d1) { return {{{d0, 0.0}, {0.0, d1}}}; }
  static Mat2 rotation(double radians) {
    const double c = std::cos(radians), s = std::sin(radians);
    return {{{c, -s}, {s, c}}};
  }

  double det() const { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
  double trace() const { return a[0][0] + a[1][1]; }
  Mat2 transpose() const { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }
  double max_abs() const {
    return std::max(std::max(std::abs(a[0][0]), std::abs(a[0][1])),
                    std::max(std::abs(a[1][0]), std::abs(a[1][1])));
  }
  bool symmetric(double tol = 1e-9) const { return std::abs(a[0][1] - a[1][0]) <= tol; }

  Mat2 inverse() const {
    const double d = det();
    if (std::abs(d) <= 1e-12) throw std::invalid_argument("Mat2::inverse: singular matrix");
    return {{{a[1][1] / d, -a[0][1] / d}, {-a[1][0] / d, a[0][0] / d}}};
  }

  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out.a[i][j] = l.a[i][0] * r.a[0][j] + l.a[i][1] * r.a[1][j];
    return out;
  }
  friend Mat2 operator*(const Mat2& l, double s) {
    return {{{l.a[0][0] * s, l.a[0][1] * s}, {l.a[1][0] * s, l.a[1][1] * s}}};
  }
  friend Mat2 operator-(const Mat2& l, const Mat2& r) {
    return {{{l.a[0][0] - r.a[0][0], l.a[0][1] - r.a[0][1]},
             {l.a[1][0] - r.a[1][0], l.a[1][1] - r.a[1][1]}}};
  }
};

/// The symplectic form of one mode.
inline const Mat2 symplectic_form = {{{0.0, 1.0}, {-1.0, 0.0}}};

/// Shift model: rho_theta = W_{A theta} rho W^dagger, sigma_theta likewise
/// with B. Both matrices must be invertible.
struct ShiftModel {
  Mat2 A;
  Mat2 B;
};

inline void require_invertible(const Mat2& m, const char* who) {
  if (std::abs(m.det()) <= 1e-12) throw std::invalid_argument(std::string(who) + ": singular matrix");
}

/// Uncertainty condition for a one-mode covariance matrix: det >= 1.
inline bool is_valid_covariance(const Mat2& sigma, double tol = 1e-12) {
  if (!sigma.symmetric(1e-9)) throw std::invalid_argument("is_valid_covariance: asymmetric input");
  return sigma.det() >= 1.0 - tol;
}

/// C = (det B / det A) A B^{-1}; satisfies C^T J A = J B exactly.
inline Mat2 c_matrix(const ShiftModel& m) {
  require_invertible(m.A, "c_matrix");
  require_invertible(m.B, "c_matrix");
  return m.A * m.B.inverse() * (m.B.det() / m.A.det());
}

struct OmegaBudget {
  double value = 0.0;  // 1 - det C = 1 - det B / det A
  bool applicable = true;
};

/// Scalar noise budget of the covariant-channel construction; the free
/// unimodular factor is not determined and not returned. Negative budgets are
/// returned as-is and flagged not applicable.
inline OmegaBudget omega_budget(const ShiftModel& m) {
  require_invertible(m.A, "omega_budget");
  require_invertible(m.B, "omega_budget");
  OmegaBudget r;
  r.value = 1.0 - m.B.det() / m.A.det();
  r.applicable = r.value >= -1e-12;
  return r;
}

enum class Tri { yes, no, not_applicable };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "holds";
    case Tri::no: return "fails";
    case Tri::not_applicable: return "not_applicable";
  }
  return "unknown";
}

struct GaussReport {
  Tri status = Tri::no;
  std::string branch;
  std::vector<std::pair<std::string, double>> margins;
};

namespace detail {

// 2x2 symmetric PSD test via trace/det signs; boundary band 1e-12.
inline bool psd2(const Mat2& m, double tol = 1e-12) {
  return m.trace() >= -tol && m.det() >= -tol;
}

inline double min_eig2(const Mat2& m) {
  const double tr = m.trace();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * m.det()));
  return (tr - disc) / 2.0;
}

}  // namespace detail

/// Exact comparison conditions for one-mode Gaussian shift experiments.
/// A = B reduces to Sigma_rho <= Sigma_sigma; otherwise both displayed
/// conditions are evaluated where the noise budget exists.
inline GaussReport gaussian_ge_condition(const Mat2& sigma_rho, const Mat2& sigma_sigma,
                                         const ShiftModel& m) {
  if (!is_valid_covariance(sigma_rho) || !is_valid_covariance(sigma_sigma))
    throw std::invalid_argument("gaussian_ge_condition: invalid covariance matrix");
  require_invertible(m.A, "gaussian_ge_condition");
  require_invertible(m.B, "gaussian_ge_condition");
  GaussReport rep;
  if ((m.A - m.B).max_abs() <= 1e-12) {
    rep.branch = "A=B";
    const Mat2 diff = sigma_sigma - sigma_rho;
    rep.margins = {{"psd_trace", diff.trace()},
                   {"psd_det", diff.det()},
                   {"min_eigenvalue", detail::min_eig2(diff)}};
    rep.status = detail::psd2(diff) ? Tri::yes : Tri::no;
    return rep;
  }
  rep.branch = "general";
  const Mat2 aprime = m.A * m.B.inverse();
  const double da = aprime.det();
  rep.margins.push_back({"det_Aprime", da});
  if (std::abs(da - 1.0) <= 1e-12 || 1.0 - 1.0 / da < -1e-12) {
    rep.status = Tri::not_applicable;
    return rep;
  }
  const Mat2 M = sigma_sigma - (aprime.transpose() * sigma_rho * aprime) * (1.0 / (da * da));
  const double scale = 1.0 - 1.0 / da;
  const double det_cond = M.det() / (scale * scale);
  rep.margins.push_back({"psd_trace", M.trace()});
  rep.margins.push_back({"psd_det", M.det()});
  rep.margins.push_back({"min_eigenvalue", detail::min_eig2(M)});
  rep.margins.push_back({"determinant_condition", det_cond - 1.0});
  rep.status = (detail::psd2(M) && det_cond >= 1.0 - 1e-12) ? Tri::yes : Tri::no;
  return rep;
}

struct IsotropicReport {
  bool classical = false;
  Tri quantum = Tri::no;
  std::vector<std::pair<std::string, double>> margins;
};

/// Isotropic covariances Sigma = a^2 1: classical comparison is A'^T A' >= 1;
/// the quantum condition adds the determinant inequality.
inline IsotropicReport isotropic_check(double a, const Mat2& aprime) {
  if (!(a > 0.0)) throw std::invalid_argument("isotropic_check: a must be positive");
  require_invertible(aprime, "isotropic_check");
  IsotropicReport rep;
  const Mat2 gram = aprime.transpose() * aprime;
  const Mat2 cls = gram - Mat2::identity();
  rep.classical = detail::psd2(cls);
  rep.margins.push_back({"classical_min_eigenvalue", detail::min_eig2(cls)});
  const double da = aprime.det();
  rep.margins.push_back({"det_Aprime", da});
  if (std::abs(da - 1.0) <= 1e-12 || 1.0 - 1.0 / da < -1e-12) {
    rep.quantum = Tri::not_applicable;
    return rep;
  }
  const Mat2 inner = Mat2::identity() - gram * (1.0 / (da * da));
  const double lhs = inner.det();
  const double rhs = std::pow(a, -4.0) * (1.0 - 1.0 / da) * (1.0 - 1.0 / da);
  rep.margins.push_back({"determinant_margin", lhs - rhs});
  const bool q = rep.classical && lhs - rhs >= -1e-12;
  rep.quantum = q ? Tri::yes : Tri::no;
  return rep;
}

/// True iff A' is a scaled orthogonal matrix with scale >= 1 (within 1e-9).
inline bool a1_characterization(const Mat2& aprime, double tol = 1e-9) {
  require_invertible(aprime, "a1_characterization");
  const Mat2 gram = aprime.transpose() * aprime;
  const double alpha2 = (gram.a[0][0] + gram.a[1][1]) / 2.0;
  if (std::abs(gram.a[0][1]) > tol || std::abs(gram.a[1][0]) > tol) return false;
  if (std::abs(gram.a[0][0] - gram.a[1][1]) > 2.0 * tol) return false;
  return std::sqrt(alpha2) >= 1.0 - tol;
}

}  // namespace qdef
