#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace qdef {

/// Result of a 1-D golden-section search.
struct ScalarOpt {
  double x = 0.0;
  double value = 0.0;
};

/// Minimizes a unimodal-ish function on [lo, hi] by golden-section search,
/// shrinking the bracket to the requested width. Returns the best point seen,
/// which includes both endpoints.
inline ScalarOpt golden_section_minimize(const std::function<double(double)>& f,
                                         double lo, double hi, double width) {
  if (!(hi >= lo)) throw std::invalid_argument("golden_section_minimize: bad bracket");
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  ScalarOpt best{x1, f1};
  if (f2 < best.value) best = {x2, f2};
  const double flo = f(lo), fhi = f(hi);
  if (flo < best.value) best = {lo, flo};
  if (fhi < best.value) best = {hi, fhi};
  int guard = 0;
  while (b - a > width && guard++ < 400) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
    if (f1 < best.value) best = {x1, f1};
    if (f2 < best.value) best = {x2, f2};
  }
  return best;
}

inline ScalarOpt golden_section_maximize(const std::function<double(double)>& f,
                                         double lo, double hi, double width) {
  ScalarOpt r = golden_section_minimize([&](double s) { return -f(s); }, lo, hi, width);
  return {r.x, -r.value};
}

/// Dense symmetric positive-semidefinite solver: pivoted Cholesky with rank
/// detection. Solves G y = r for consistent right-hand sides; components in
/// the detected null space are set to zero.
class PsdSolver {
 public:
  PsdSolver() = default;

  /// Factors the n-by-n symmetric matrix G (row-major). Pivot threshold is
  /// rel_tol times the largest initial diagonal entry.
  void factor(std::vector<double> G, int n, double rel_tol = 1e-13) {
    n_ = n;
    L_ = std::move(G);
    perm_.resize(n);
    for (int i = 0; i < n; ++i) perm_[i] = i;
    double maxdiag = 0.0;
    for (int i = 0; i < n; ++i) maxdiag = std::max(maxdiag, L_[i * n + i]);
    const double thresh = std::max(maxdiag, 1.0) * rel_tol;
    rank_ = 0;
    for (int k = 0; k < n; ++k) {
      // choose the largest remaining diagonal as pivot
      int piv = k;
      double best = L_[idx(k, k)];
      for (int j = k + 1; j < n; ++j) {
        const double d = L_[idx(j, j)];
        if (d > best) {
          best = d;
          piv = j;
        }
      }
      if (best <= thresh) break;
      if (piv != k) swap_rows_cols(k, piv);
      const double lkk = std::sqrt(best);
      L_[idx(k, k)] = lkk;
      for (int i = k + 1; i < n; ++i) L_[idx(i, k)] /= lkk;
      // keep the trailing submatrix symmetric so later pivot swaps stay valid
      for (int j = k + 1; j < n; ++j) {
        const double ljk = L_[idx(j, k)];
        if (ljk == 0.0) continue;
        for (int i = j; i < n; ++i) {
          L_[idx(i, j)] -= L_[idx(i, k)] * ljk;
          if (i != j) L_[idx(j, i)] = L_[idx(i, j)];
        }
      }
      ++rank_;
    }
  }

  int rank() const { return rank_; }

  /// Solves G y = r using the factorization; consistent systems only.
  std::vector<double> solve(const std::vector<double>& r) const {
    if (static_cast<int>(r.size()) != n_) throw std::invalid_argument("PsdSolver::solve: size mismatch");
    std::vector<double> y(n_, 0.0);
    // forward substitution on the permuted system, rank_ rows
    std::vector<double> w(rank_);
    for (int i = 0; i < rank_; ++i) {
      double s = r[perm_[i]];
      for (int j = 0; j < i; ++j) s -= L_[idx(i, j)] * w[j];
      w[i] = s / L_[idx(i, i)];
    }
    for (int i = rank_ - 1; i >= 0; --i) {
      double s = w[i];
      for (int j = i + 1; j < rank_; ++j) s -= L_[idx(j, i)] * w[j];
      w[i] = s / L_[idx(i, i)];
    }
    for (int i = 0; i < rank_; ++i) y[perm_[i]] = w[i];
    return y;
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  void swap_rows_cols(int a, int b) {
    for (int j = 0; j < n_; ++j) std::swap(L_[idx(a, j)], L_[idx(b, j)]);
    for (int i = 0; i < n_; ++i) std::swap(L_[idx(i, a)], L_[idx(i, b)]);
    std::swap(perm_[a], perm_[b]);
  }

  int n_ = 0;
  int rank_ = 0;
  std::vector<double> L_;
  std::vector<int> perm_;
};

/// Standard normal deviates from a fully specified generator (mt19937_64 plus
/// Box-Muller), so that fixed seeds reproduce bit-identical streams across
/// standard library implementations.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform in (0, 1].
  double uniform_open() {
    const std::uint64_t v = rng_();
    return (static_cast<double>(v >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qdef
