#pragma once

#include <qdef/chan.hpp>
#include <qdef/matcore.hpp>
#include <qdef/util.hpp>

#include <string>
#include <vector>

namespace qdef {

/// Real-linear map on Hermitian matrices, stored as a (d_out^2) x (d_in^2)
/// real matrix in the fixed Hermitian bases of matcore (diagonal units first,
/// then per off-diagonal pair the symmetric and antisymmetric elements).
/// Real coordinates keep Hermitian inputs mapping to Hermitian outputs.
struct LinearStateMap {
  int d_in = 0;
  int d_out = 0;
  std::vector<double> m;  // row-major

  double& at(int r, int c) { return m[static_cast<std::size_t>(r) * herm_dim(d_in) + c]; }
  double at(int r, int c) const { return m[static_cast<std::size_t>(r) * herm_dim(d_in) + c]; }

  Mat apply(const Mat& x) const {
    if (x.rows() != d_in || x.cols() != d_in)
      throw std::invalid_argument("LinearStateMap::apply: dimension mismatch");
    const auto in = herm_to_coords(x.hermitized());
    std::vector<double> out(herm_dim(d_out), 0.0);
    for (int r = 0; r < herm_dim(d_out); ++r) {
      double s = 0.0;
      for (int c = 0; c < herm_dim(d_in); ++c) s += at(r, c) * in[c];
      out[r] = s;
    }
    return coords_to_herm(out, d_out);
  }

  /// Complex-linear extension evaluated on |i><j|.
  Mat apply_unit(int i, int j) const {
    if (i == j) {
      Mat e(d_in, d_in);
      e(i, i) = 1.0;
      return apply(e);
    }
    const int a = std::min(i, j), b = std::max(i, j);
    Mat s(d_in, d_in), k(d_in, d_in);
    static const double rt2 = std::sqrt(2.0);
    s(a, b) = 1.0 / rt2;
    s(b, a) = 1.0 / rt2;
    k(a, b) = cplx(0.0, 1.0 / rt2);
    k(b, a) = cplx(0.0, -1.0 / rt2);
    const Mat gs = apply(s), gk = apply(k);
    // E_ab = (S - i K)/sqrt(2), E_ba = (S + i K)/sqrt(2)
    const cplx sign = (i < j) ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    return (gs + gk * sign) * cplx(1.0 / rt2);
  }

  /// Choi matrix sum_ij Gamma(|i><j|) (x) |i><j|, output factor first.
  Mat to_choi() const {
    Mat J(d_in * d_out, d_in * d_out);
    for (int i = 0; i < d_in; ++i)
      for (int j = 0; j < d_in; ++j) {
        const Mat img = apply_unit(i, j);
        for (int a = 0; a < d_out; ++a)
          for (int b = 0; b < d_out; ++b) J(a * d_in + i, b * d_in + j) += img(a, b);
      }
    return J;
  }
};

inline LinearStateMap map_of_choi(const ChoiMatrix& c) {
  LinearStateMap g;
  g.d_in = c.d_in;
  g.d_out = c.d_out;
  g.m.assign(static_cast<std::size_t>(herm_dim(c.d_out)) * herm_dim(c.d_in), 0.0);
  for (int cidx = 0; cidx < herm_dim(c.d_in); ++cidx) {
    const Mat img = apply(c, herm_basis_element(c.d_in, cidx)).hermitized();
    const auto coords = herm_to_coords(img);
    for (int r = 0; r < herm_dim(c.d_out); ++r) g.at(r, cidx) = coords[r];
  }
  return g;
}

enum class ExtensionStatus { exact, partial };

struct ExtensionResult {
  LinearStateMap map;
  ExtensionStatus status = ExtensionStatus::exact;
  double residual = 0.0;
  int rank = 0;
};

/// Linear extension mapping each state to its target, defined on all of
/// Hermitian space by least squares. Dependent states with contradictory
/// targets are rejected; rank-deficient but consistent data yields a map
/// pinned down on the span only, flagged partial.
inline ExtensionResult linear_extension(const std::vector<Mat>& states,
                                        const std::vector<Mat>& targets, double tol = 1e-10) {
  if (states.empty() || states.size() != targets.size())
    throw std::invalid_argument("linear_extension: state/target count mismatch");
  const int d_in = states.front().rows();
  const int d_out = targets.front().rows();
  const int n = static_cast<int>(states.size());
  const int ni = herm_dim(d_in), no = herm_dim(d_out);

  std::vector<std::vector<double>> scoords, tcoords;
  for (int i = 0; i < n; ++i) {
    if (states[i].rows() != d_in || states[i].cols() != d_in ||
        targets[i].rows() != d_out || targets[i].cols() != d_out)
      throw std::invalid_argument("linear_extension: inconsistent dimensions");
    scoords.push_back(herm_to_coords(states[i].hermitized()));
    tcoords.push_back(herm_to_coords(targets[i].hermitized()));
  }

  // gram = S S^T over the state coordinates
  std::vector<double> gram(static_cast<std::size_t>(ni) * ni, 0.0);
  for (int a = 0; a < ni; ++a)
    for (int b = a; b < ni; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += scoords[i][a] * scoords[i][b];
      gram[static_cast<std::size_t>(a) * ni + b] = s;
      gram[static_cast<std::size_t>(b) * ni + a] = s;
    }
  PsdSolver solver;
  solver.factor(std::move(gram), ni);

  ExtensionResult res;
  res.rank = solver.rank();
  res.map.d_in = d_in;
  res.map.d_out = d_out;
  res.map.m.assign(static_cast<std::size_t>(no) * ni, 0.0);
  std::vector<double> rhs(ni);
  for (int r = 0; r < no; ++r) {
    for (int a = 0; a < ni; ++a) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += tcoords[i][r] * scoords[i][a];
      rhs[a] = s;
    }
    const auto row = solver.solve(rhs);
    for (int a = 0; a < ni; ++a) res.map.at(r, a) = row[a];
  }

  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double err = 0.0;
    for (int r = 0; r < no; ++r) {
      double s = -tcoords[i][r];
      for (int a = 0; a < ni; ++a) s += res.map.at(r, a) * scoords[i][a];
      err += s * s;
    }
    worst = std::max(worst, std::sqrt(err));
  }
  res.residual = worst;
  if (worst > tol)
    throw std::invalid_argument("linear_extension: targets are inconsistent on dependent states");
  res.status = (res.rank == ni) ? ExtensionStatus::exact : ExtensionStatus::partial;
  return res;
}

struct TracePreservationReport {
  bool ok = false;
  double defect = 0.0;
};

/// defect = max over basis elements of |tr Gamma(E) - tr E|.
inline TracePreservationReport check_trace_preserving(const LinearStateMap& g, double tol = 1e-9) {
  TracePreservationReport rep;
  for (int c = 0; c < herm_dim(g.d_in); ++c) {
    double tr_out = 0.0;
    for (int i = 0; i < g.d_out; ++i) tr_out += g.at(i, c);
    const double tr_in = c < g.d_in ? 1.0 : 0.0;
    rep.defect = std::max(rep.defect, std::abs(tr_out - tr_in));
  }
  rep.ok = rep.defect <= tol;
  return rep;
}

struct CpReport {
  bool ok = false;
  double min_choi_eigenvalue = 0.0;
};

inline CpReport check_complete_positivity(const LinearStateMap& g, double tol = 1e-9) {
  CpReport rep;
  const Mat J = g.to_choi().hermitized();
  rep.min_choi_eigenvalue = min_eigenvalue(J, 1e-8);
  rep.ok = rep.min_choi_eigenvalue >= -tol;
  return rep;
}

struct SampledPositivityReport {
  bool ok = false;
  double worst_violation = 0.0;  // max over samples of max(0, -lambda_min)
  double min_output_eigenvalue = 0.0;
};

/// Necessary-condition sampler only: positivity is tested on Haar-random pure
/// inputs, not decided. Fixed seeds reproduce identical verdicts.
inline SampledPositivityReport check_positivity_sampled(const LinearStateMap& g, int samples,
                                                        std::uint64_t seed, double tol = 1e-9) {
  if (samples < 1) throw std::invalid_argument("check_positivity_sampled: need at least one sample");
  NormalSampler rng(seed);
  SampledPositivityReport rep;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    std::vector<cplx> psi(g.d_in);
    double nrm = 0.0;
    for (int i = 0; i < g.d_in; ++i) {
      psi[i] = cplx(rng(), rng());
      nrm += std::norm(psi[i]);
    }
    nrm = std::sqrt(nrm);
    Mat proj(g.d_in, g.d_in);
    for (int i = 0; i < g.d_in; ++i)
      for (int j = 0; j < g.d_in; ++j) proj(i, j) = psi[i] * std::conj(psi[j]) / (nrm * nrm);
    const double lam = min_eigenvalue(g.apply(proj), 1e-8);
    worst = std::min(worst, lam);
  }
  rep.min_output_eigenvalue = worst;
  rep.worst_violation = std::max(0.0, -worst);
  rep.ok = worst >= -tol;
  return rep;
}

}  // namespace qdef
