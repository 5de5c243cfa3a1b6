#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdef {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Small dimensions only (<= ~100).
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(check_size(rows, cols)) {}

  static Mat identity(int d) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }
  static Mat zero(int rows, int cols) { return Mat(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<cplx>& data() const { return a_; }
  std::vector<cplx>& data() { return a_; }

  Mat adjoint() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  Mat transpose() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Mat conjugate() const {
    Mat r(rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = std::conj(a_[k]);
    return r;
  }

  cplx trace() const {
    require_square("trace");
    cplx t = 0.0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0.0;
    for (const cplx& v : a_) s = std::max(s, std::abs(v));
    return s;
  }

  /// max entrywise |M - M^dagger|.
  double hermiticity_defect() const {
    require_square("hermiticity_defect");
    double s = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int j = i; j < cols_; ++j)
        s = std::max(s, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return s;
  }

  bool is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

  /// (M + M^dagger)/2.
  Mat hermitized() const {
    require_square("hermitized");
    Mat r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        r(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return r;
  }

  Mat& operator+=(const Mat& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Mat& operator*=(cplx s) {
    for (cplx& v : a_) v *= s;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, cplx s) { return a *= s; }
  friend Mat operator*(cplx s, Mat a) { return a *= s; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Mat multiply: shape mismatch");
    Mat r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx(0.0)) continue;
        for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    }
    return r;
  }

 private:
  static std::size_t check_size(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("Mat: dimensions must be >= 1");
    return static_cast<std::size_t>(rows) * cols;
  }
  void require_square(const char* what) const {
    if (!square()) throw std::invalid_argument(std::string("Mat::") + what + ": matrix not square");
  }
  void require_same_shape(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> a_;
};

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// orthonormal eigenvector columns.
struct Spectrum {
  std::vector<double> eigenvalues;
  Mat eigenvectors;
};

namespace detail {

// One cyclic-Jacobi rotation zeroing A(p,q); accumulates into V.
inline void jacobi_rotate(Mat& A, Mat& V, int p, int q) {
  const cplx apq = A(p, q);
  const double abs_apq = std::abs(apq);
  if (abs_apq == 0.0) return;
  const cplx phase = apq / abs_apq;
  const double app = A(p, p).real();
  const double aqq = A(q, q).real();
  const double tau = (aqq - app) / (2.0 * abs_apq);
  double t;
  if (tau >= 0.0)
    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
  else
    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  // R differs from identity in columns p,q:
  //   R(p,p) = phase*c, R(p,q) = phase*s, R(q,p) = -s, R(q,q) = c.
  const int n = A.rows();
  for (int k = 0; k < n; ++k) {  // A <- A R
    const cplx akp = A(k, p), akq = A(k, q);
    A(k, p) = akp * (phase * c) - akq * s;
    A(k, q) = akp * (phase * s) + akq * c;
  }
  for (int k = 0; k < n; ++k) {  // A <- R^dagger A
    const cplx apk = A(p, k), aqk = A(q, k);
    A(p, k) = std::conj(phase) * c * apk - s * aqk;
    A(q, k) = std::conj(phase) * s * apk + c * aqk;
  }
  A(p, q) = 0.0;
  A(q, p) = 0.0;
  A(p, p) = cplx(A(p, p).real(), 0.0);
  A(q, q) = cplx(A(q, q).real(), 0.0);
  for (int k = 0; k < n; ++k) {  // V <- V R
    const cplx vkp = V(k, p), vkq = V(k, q);
    V(k, p) = vkp * (phase * c) - vkq * s;
    V(k, q) = vkp * (phase * s) + vkq * c;
  }
}

inline double offdiag_norm(const Mat& A) {
  double s = 0.0;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = i + 1; j < A.cols(); ++j) s += 2.0 * std::norm(A(i, j));
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition. Inputs within `tol` of Hermitian are
/// symmetrized first; anything farther off is rejected.
inline Spectrum hermitian_spectrum(const Mat& M, double tol = 1e-10) {
  if (!M.square()) throw std::invalid_argument("hermitian_spectrum: matrix not square");
  if (!M.is_hermitian(tol))
    throw std::invalid_argument("hermitian_spectrum: input is not Hermitian within tolerance");
  const int n = M.rows();
  Mat A = M.hermitized();
  Mat V = Mat::identity(n);
  const double norm = std::max(A.frobenius_norm(), 1e-300);
  const int max_sweeps = 80;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::offdiag_norm(A) <= 1e-15 * norm) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q)
        if (std::abs(A(p, q)) > 1e-18 * norm) detail::jacobi_rotate(A, V, p, q);
  }
  if (!converged && detail::offdiag_norm(A) > 1e-13 * norm)
    throw std::runtime_error("hermitian_spectrum: Jacobi iteration did not converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = A(i, i).real();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] < diag[b]; });

  Spectrum sp;
  sp.eigenvalues.resize(n);
  sp.eigenvectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    sp.eigenvalues[j] = diag[order[j]];
    for (int i = 0; i < n; ++i) sp.eigenvectors(i, j) = V(i, order[j]);
  }
  return sp;
}

/// Sum of |eigenvalues| of a Hermitian matrix.
inline double trace_norm(const Mat& M, double tol = 1e-10) {
  Spectrum sp = hermitian_spectrum(M, tol);
  double s = 0.0;
  for (double lam : sp.eigenvalues) s += std::abs(lam);
  return s;
}

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_eigenvalue(const Mat& M, double tol = 1e-10) {
  return hermitian_spectrum(M, tol).eigenvalues.front();
}

/// V f(Lambda) V^dagger for a spectral function applied entrywise to eigenvalues.
inline Mat spectral_apply(const Spectrum& sp, const std::vector<double>& fvals) {
  const int n = sp.eigenvectors.rows();
  Mat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k)
        s += sp.eigenvectors(i, k) * fvals[k] * std::conj(sp.eigenvectors(j, k));
      r(i, j) = s;
    }
  return r;
}

/// tr sqrt(rho^{1/2} sigma rho^{1/2}) for density matrices; eigenvalues are
/// clipped at zero before square roots to absorb PSD drift.
inline double fidelity(const Mat& rho, const Mat& sigma, double tol = 1e-9) {
  if (!rho.square() || !sigma.square() || rho.rows() != sigma.rows())
    throw std::invalid_argument("fidelity: dimension mismatch");
  Spectrum sr = hermitian_spectrum(rho, tol);
  Spectrum ss = hermitian_spectrum(sigma, tol);
  if (sr.eigenvalues.front() < -tol || ss.eigenvalues.front() < -tol)
    throw std::invalid_argument("fidelity: input is not positive semidefinite within tolerance");
  if (std::abs(std::accumulate(sr.eigenvalues.begin(), sr.eigenvalues.end(), 0.0) - 1.0) > 1e-6 ||
      std::abs(std::accumulate(ss.eigenvalues.begin(), ss.eigenvalues.end(), 0.0) - 1.0) > 1e-6)
    throw std::invalid_argument("fidelity: inputs must have unit trace");
  std::vector<double> roots(sr.eigenvalues.size());
  for (std::size_t k = 0; k < roots.size(); ++k) roots[k] = std::sqrt(std::max(0.0, sr.eigenvalues[k]));
  Mat sqrt_rho = spectral_apply(sr, roots);
  Mat inner = sqrt_rho * sigma * sqrt_rho;
  Spectrum si = hermitian_spectrum(inner.hermitized(), 1e-8);
  double f = 0.0;
  for (double lam : si.eigenvalues) f += std::sqrt(std::max(0.0, lam));
  return std::clamp(f, 0.0, 1.0);
}

inline Mat tensor(const Mat& A, const Mat& B) {
  Mat r(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      const cplx aij = A(i, j);
      if (aij == cplx(0.0)) continue;
      for (int k = 0; k < B.rows(); ++k)
        for (int l = 0; l < B.cols(); ++l)
          r(i * B.rows() + k, j * B.cols() + l) = aij * B(k, l);
    }
  return r;
}

/// Partial trace of M on C^{d1} (x) C^{d2}; `which` selects the factor traced
/// out (1 or 2).
inline Mat partial_trace(const Mat& M, int d1, int d2, int which) {
  if (!M.square() || M.rows() != d1 * d2)
    throw std::invalid_argument("partial_trace: dimensions do not match matrix size");
  if (which != 1 && which != 2) throw std::invalid_argument("partial_trace: which must be 1 or 2");
  if (which == 1) {
    Mat r(d2, d2);
    for (int k = 0; k < d2; ++k)
      for (int l = 0; l < d2; ++l) {
        cplx s = 0.0;
        for (int i = 0; i < d1; ++i) s += M(i * d2 + k, i * d2 + l);
        r(k, l) = s;
      }
    return r;
  }
  Mat r(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < d2; ++k) s += M(i * d2 + k, j * d2 + k);
      r(i, j) = s;
    }
  return r;
}

/// Discrete Weyl operator X_d^t Z_d^s, where X_d is the cyclic shift and
/// Z_d = diag(1, w, ..., w^{d-1}) with w = exp(2 pi i / d).
inline Mat discrete_weyl(int d, int t, int s) {
  if (d < 2) throw std::invalid_argument("discrete_weyl: dimension must be >= 2");
  if (t < 0 || t >= d || s < 0 || s >= d)
    throw std::invalid_argument("discrete_weyl: powers must lie in [0, d)");
  Mat W(d, d);
  const double w = 2.0 * M_PI / d;
  for (int j = 0; j < d; ++j) {
    // X^t Z^s |j> = w^{s j} |j + t mod d>
    const double ang = w * s * j;
    W((j + t) % d, j) = cplx(std::cos(ang), std::sin(ang));
  }
  return W;
}

// ---------------------------------------------------------------------------
// Real coordinates on the Hermitian matrices of dimension d. The basis is
// { E_ii } then, for each i<j in row-major order, (E_ij+E_ji)/sqrt(2) followed
// by i(E_ij-E_ji)/sqrt(2). Orthonormal for <A,B> = tr(AB), so Frobenius norms
// and inner products carry over to plain dot products.

inline int herm_dim(int d) { return d * d; }

inline std::vector<double> herm_to_coords(const Mat& H) {
  const int d = H.rows();
  std::vector<double> x(herm_dim(d));
  int k = 0;
  for (int i = 0; i < d; ++i) x[k++] = H(i, i).real();
  static const double rt2 = std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      x[k++] = rt2 * H(i, j).real();
      x[k++] = rt2 * H(i, j).imag();
    }
  return x;
}

inline Mat coords_to_herm(const double* x, int d) {
  Mat H(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) H(i, i) = x[k++];
  static const double rt2 = std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double re = x[k++] / rt2;
      const double im = x[k++] / rt2;
      H(i, j) = cplx(re, im);
      H(j, i) = cplx(re, -im);
    }
  return H;
}

inline Mat coords_to_herm(const std::vector<double>& x, int d) {
  if (static_cast<int>(x.size()) != herm_dim(d))
    throw std::invalid_argument("coords_to_herm: coordinate count mismatch");
  return coords_to_herm(x.data(), d);
}

inline Mat herm_basis_element(int d, int k) {
  std::vector<double> x(herm_dim(d), 0.0);
  x.at(k) = 1.0;
  return coords_to_herm(x.data(), d);
}

}  // namespace qdef
