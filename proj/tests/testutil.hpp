#pragma once

#include <qdef/matcore.hpp>
#include <qdef/util.hpp>

#include <vector>

namespace testutil {

using qdef::cplx;
using qdef::Mat;

inline Mat random_matrix(qdef::NormalSampler& g, int rows, int cols) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(), g());
  return m;
}

inline Mat random_hermitian(qdef::NormalSampler& g, int d) {
  return random_matrix(g, d, d).hermitized();
}

/// Random density matrix: G G^dagger normalized to unit trace.
inline Mat random_density(qdef::NormalSampler& g, int d) {
  Mat G = random_matrix(g, d, d);
  Mat rho = G * G.adjoint();
  rho *= cplx(1.0 / rho.trace().real());
  return rho.hermitized();
}

/// Haar-ish random unitary via Gram-Schmidt on a Gaussian matrix.
inline Mat random_unitary(qdef::NormalSampler& g, int d) {
  Mat A = random_matrix(g, d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < j; ++k) {
      cplx dot = 0.0;
      for (int i = 0; i < d; ++i) dot += std::conj(A(i, k)) * A(i, j);
      for (int i = 0; i < d; ++i) A(i, j) -= dot * A(i, k);
    }
    double nrm = 0.0;
    for (int i = 0; i < d; ++i) nrm += std::norm(A(i, j));
    nrm = std::sqrt(nrm);
    for (int i = 0; i < d; ++i) A(i, j) /= nrm;
  }
  return A;
}

inline std::vector<double> random_stochastic_vector(qdef::NormalSampler& g, int k) {
  std::vector<double> p(k);
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    p[i] = -std::log(g.uniform_open());
    s += p[i];
  }
  for (int i = 0; i < k; ++i) p[i] /= s;
  return p;
}

/// Random Kraus family of `n` operators mapping dim d_in to d_out, normalized
/// so the channel is trace preserving.
inline std::vector<Mat> random_kraus(qdef::NormalSampler& g, int d_in, int d_out, int n) {
  std::vector<Mat> K;
  K.reserve(n);
  for (int i = 0; i < n; ++i) K.push_back(random_matrix(g, d_out, d_in));
  Mat M(d_in, d_in);
  for (const Mat& k : K) M += k.adjoint() * k;
  qdef::Spectrum sp = qdef::hermitian_spectrum(M.hermitized());
  std::vector<double> inv_sqrt(sp.eigenvalues.size());
  for (std::size_t j = 0; j < inv_sqrt.size(); ++j)
    inv_sqrt[j] = 1.0 / std::sqrt(std::max(sp.eigenvalues[j], 1e-300));
  Mat W = qdef::spectral_apply(sp, inv_sqrt);
  for (Mat& k : K) k = k * W;
  return K;
}

inline Mat apply_kraus(const std::vector<Mat>& K, const Mat& rho) {
  Mat out(K.front().rows(), K.front().rows());
  for (const Mat& k : K) out += k * rho * k.adjoint();
  return out;
}

}  // namespace testutil
