#pragma once

#include <qdef/matcore.hpp>
#include <qdef/util.hpp>

#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace qdef {

// ---------------------------------------------------------------------------
// Linear objectives over affine slices of products of Hermitian PSD cones.
// A problem is a list of blocks (side length 1 means a nonnegative scalar,
// which makes plain LPs a special case), a real objective over the stacked
// Hermitian coordinates, and dense affine equality constraints A x = b.
// ---------------------------------------------------------------------------

class ConeProblem {
 public:
  /// Adds a Hermitian PSD block of side d (d = 1: nonnegative scalar).
  /// All blocks must be added before any constraint row.
  int add_block(int d) {
    if (d < 1) throw std::invalid_argument("ConeProblem::add_block: dimension must be >= 1");
    if (!rows_.empty())
      throw std::invalid_argument("ConeProblem::add_block: blocks must be added before rows");
    dims_.push_back(d);
    offsets_.push_back(n_);
    n_ += herm_dim(d);
    c_.resize(n_, 0.0);
    return static_cast<int>(dims_.size()) - 1;
  }
  int add_scalar_block() { return add_block(1); }

  int n() const { return n_; }
  int m() const { return static_cast<int>(rows_.size()); }
  int block_count() const { return static_cast<int>(dims_.size()); }
  int block_dim(int k) const { return dims_.at(k); }
  int block_offset(int k) const { return offsets_.at(k); }
  const std::vector<int>& block_dims() const { return dims_; }

  /// Objective contribution tr(C X) for block k.
  void set_objective(int block, const Mat& C) {
    check_block_mat(block, C, "set_objective");
    const auto coords = herm_to_coords(C);
    for (std::size_t i = 0; i < coords.size(); ++i) c_[offsets_[block] + i] += coords[i];
  }
  void set_objective_scalar(int block, double c) {
    if (dims_.at(block) != 1) throw std::invalid_argument("set_objective_scalar: block is not scalar");
    c_[offsets_[block]] += c;
  }
  const std::vector<double>& objective() const { return c_; }

  /// Adds one constraint row with the given right-hand side; coefficients
  /// start at zero.
  int add_row(double rhs) {
    rows_.emplace_back(n_, 0.0);
    b_.push_back(rhs);
    return static_cast<int>(rows_.size()) - 1;
  }

  double& coef(int row, int block, int coord) {
    if (coord < 0 || coord >= herm_dim(dims_.at(block)))
      throw std::invalid_argument("ConeProblem::coef: coordinate out of range");
    return rows_.at(row)[offsets_[block] + coord];
  }

  /// Row contribution tr(C X) for block k.
  void set_row_block(int row, int block, const Mat& C) {
    check_block_mat(block, C, "set_row_block");
    const auto coords = herm_to_coords(C);
    for (std::size_t i = 0; i < coords.size(); ++i) rows_.at(row)[offsets_[block] + i] += coords[i];
  }
  void set_row_scalar(int row, int block, double c) {
    if (dims_.at(block) != 1) throw std::invalid_argument("set_row_scalar: block is not scalar");
    rows_.at(row)[offsets_[block]] += c;
  }

  /// Adds the d_out^2 rows of a Hermitian matrix equation with right-hand
  /// side `rhs`; returns the first row index.
  int add_matrix_equation(const Mat& rhs) {
    const auto coords = herm_to_coords(rhs.hermitized());
    const int first = m();
    for (double v : coords) add_row(v);
    return first;
  }

  /// Adds the term op(X_block) to a matrix equation, assembling coefficients
  /// from images of the Hermitian basis. op must map the block dimension to
  /// Hermitian matrices of dimension d_out.
  void add_equation_term(int first_row, int d_out, int block,
                         const std::function<Mat(const Mat&)>& op) {
    const int db = dims_.at(block);
    for (int cidx = 0; cidx < herm_dim(db); ++cidx) {
      const Mat img = op(herm_basis_element(db, cidx));
      if (img.rows() != d_out || img.cols() != d_out)
        throw std::invalid_argument("add_equation_term: operator output dimension mismatch");
      const auto coords = herm_to_coords(img.hermitized());
      for (int r = 0; r < herm_dim(d_out); ++r)
        rows_.at(first_row + r)[offsets_[block] + cidx] += coords[r];
    }
  }

  /// Adds scale * X_block to a matrix equation (block dimension must equal
  /// the equation dimension).
  void add_equation_identity(int first_row, int block, double scale) {
    const int db = dims_.at(block);
    for (int cidx = 0; cidx < herm_dim(db); ++cidx)
      rows_.at(first_row + cidx)[offsets_[block] + cidx] += scale;
  }

  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& rhs() const { return b_; }

 private:
  void check_block_mat(int block, const Mat& C, const char* what) const {
    const int d = dims_.at(block);
    if (C.rows() != d || C.cols() != d)
      throw std::invalid_argument(std::string("ConeProblem::") + what + ": matrix dimension mismatch");
  }

  std::vector<int> dims_;
  std::vector<int> offsets_;
  int n_ = 0;
  std::vector<double> c_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> b_;
};

enum class SolveStatus { optimal, max_iter, infeasible_suspected };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible_suspected: return "infeasible_suspected";
  }
  return "unknown";
}

struct Solution {
  std::vector<double> x;
  double objective_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double cone_residual = 0.0;
  long iterations = 0;
  SolveStatus status = SolveStatus::max_iter;
  std::vector<int> blocks;
  std::vector<int> offsets;

  Mat block_matrix(int k) const {
    return coords_to_herm(x.data() + offsets.at(k), blocks.at(k));
  }
  double block_scalar(int k) const {
    if (blocks.at(k) != 1) throw std::invalid_argument("Solution::block_scalar: block is not scalar");
    return x[offsets.at(k)];
  }
};

struct SolveOptions {
  double tol = 1e-7;
  long max_iter = 200000;
  int threads = 1;
};

namespace detail {

// Projects one stacked coordinate block onto its PSD cone, in place.
inline void project_block(double* w, int d) {
  if (d == 1) {
    if (w[0] < 0.0) w[0] = 0.0;
    return;
  }
  Mat H = coords_to_herm(w, d);
  Spectrum sp = hermitian_spectrum(H, 1e-8);
  bool inside = true;
  for (double lam : sp.eigenvalues)
    if (lam < 0.0) { inside = false; break; }
  if (inside) return;  // already in the cone; keep coordinates bit-exact
  std::vector<double> clipped(sp.eigenvalues.size());
  for (std::size_t i = 0; i < clipped.size(); ++i) clipped[i] = std::max(0.0, sp.eigenvalues[i]);
  Mat P = spectral_apply(sp, clipped);
  const auto coords = herm_to_coords(P);
  for (int i = 0; i < herm_dim(d); ++i) w[i] = coords[i];
}

}  // namespace detail

/// Deterministic first-order solver: over-relaxed ADMM with exact affine
/// projection (prefactored) and eigenvalue clipping on the PSD blocks.
/// Fixed zero initialization and fixed iteration order; with threads > 1 the
/// block projections run concurrently but land in disjoint slots, so results
/// are bitwise independent of the thread count.
inline Solution solve(const ConeProblem& p, const SolveOptions& opts = {}) {
  if (opts.tol <= 0.0) throw std::invalid_argument("solve: tol must be positive");
  if (opts.max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");
  const int n = p.n();
  const int m = p.m();
  if (n == 0) throw std::invalid_argument("solve: empty problem");

  // row-normalized dense copy of the constraints
  std::vector<double> A(static_cast<std::size_t>(m) * n);
  std::vector<double> b(p.rhs());
  for (int i = 0; i < m; ++i) {
    const auto& row = p.rows()[i];
    double nrm = 0.0;
    for (double v : row) nrm += v * v;
    nrm = std::sqrt(nrm);
    const double scale = nrm > 1e-300 ? 1.0 / nrm : 1.0;
    for (int j = 0; j < n; ++j) A[static_cast<std::size_t>(i) * n + j] = row[j] * scale;
    b[i] *= scale;
  }
  // objective normalization (affects the iteration path only)
  std::vector<double> chat(p.objective());
  {
    double cn = 0.0;
    for (double v : chat) cn += v * v;
    cn = std::sqrt(cn);
    if (cn > 1e-300)
      for (double& v : chat) v /= cn;
  }

  // Gram matrix of the rows, factored once
  PsdSolver gram;
  if (m > 0) {
    std::vector<double> G(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        double s = 0.0;
        const double* ri = &A[static_cast<std::size_t>(i) * n];
        const double* rj = &A[static_cast<std::size_t>(j) * n];
        for (int k = 0; k < n; ++k) s += ri[k] * rj[k];
        G[static_cast<std::size_t>(i) * m + j] = s;
        G[static_cast<std::size_t>(j) * m + i] = s;
      }
    gram.factor(std::move(G), m);
  }

  std::vector<double> x(n, 0.0), z(n, 0.0), u(n, 0.0), v(n), w(n), zprev(n);
  std::vector<double> r(m), nu(m), az(m);
  double rho = 1.0;
  const double alpha = 1.6;

  const auto& dims = p.block_dims();
  const int nblocks = p.block_count();
  std::vector<int> offs(nblocks);
  for (int k = 0; k < nblocks; ++k) offs[k] = p.block_offset(k);

  // optional worker pool for the block projections
  const int nthreads = std::max(1, std::min(opts.threads, nblocks));
  std::vector<std::thread> pool;
  std::atomic<bool> quit{false};
  std::barrier start_gate(nthreads), done_gate(nthreads);
  if (nthreads > 1) {
    for (int tid = 1; tid < nthreads; ++tid) {
      pool.emplace_back([&, tid] {
        for (;;) {
          start_gate.arrive_and_wait();
          if (quit.load()) return;
          for (int k = tid; k < nblocks; k += nthreads)
            detail::project_block(w.data() + offs[k], dims[k]);
          done_gate.arrive_and_wait();
        }
      });
    }
  }
  auto project_all = [&] {
    if (nthreads > 1) {
      start_gate.arrive_and_wait();
      for (int k = 0; k < nblocks; k += nthreads) detail::project_block(w.data() + offs[k], dims[k]);
      done_gate.arrive_and_wait();
    } else {
      for (int k = 0; k < nblocks; ++k) detail::project_block(w.data() + offs[k], dims[k]);
    }
  };
  auto shutdown_pool = [&] {
    if (nthreads > 1) {
      quit.store(true);
      start_gate.arrive_and_wait();
      for (auto& t : pool) t.join();
    }
  };

  auto norm2 = [](const std::vector<double>& a) {
    double s = 0.0;
    for (double t : a) s += t * t;
    return std::sqrt(s);
  };

  Solution sol;
  sol.blocks = dims;
  sol.offsets = offs;
  sol.status = SolveStatus::max_iter;

  const int check_every = 25;
  double best_maxres = std::numeric_limits<double>::infinity();
  long last_improve = 0;
  long iter = 0;
  double consensus = 0.0, dualres = 0.0, primres = 0.0;

  for (iter = 1; iter <= opts.max_iter; ++iter) {
    // x-update: projection of z - u - c/rho onto the affine subspace
    for (int j = 0; j < n; ++j) v[j] = z[j] - u[j] - chat[j] / rho;
    if (m > 0) {
      for (int i = 0; i < m; ++i) {
        double s = -b[i];
        const double* ri = &A[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) s += ri[j] * v[j];
        r[i] = s;
      }
      nu = gram.solve(r);
      x = v;
      for (int i = 0; i < m; ++i) {
        const double ni = nu[i];
        if (ni == 0.0) continue;
        const double* ri = &A[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) x[j] -= ni * ri[j];
      }
    } else {
      x = v;
    }

    // over-relaxed z-update and dual update
    zprev = z;
    for (int j = 0; j < n; ++j) {
      const double xh = alpha * x[j] + (1.0 - alpha) * z[j];
      w[j] = xh + u[j];
    }
    project_all();
    for (int j = 0; j < n; ++j) {
      const double xh = alpha * x[j] + (1.0 - alpha) * zprev[j];
      const double znew = w[j];
      u[j] += xh - znew;
      z[j] = znew;
    }

    double dz = 0.0, gap = 0.0;
    for (int j = 0; j < n; ++j) {
      dz += (z[j] - zprev[j]) * (z[j] - zprev[j]);
      gap += (x[j] - z[j]) * (x[j] - z[j]);
    }
    dualres = rho * std::sqrt(dz);
    consensus = std::sqrt(gap);

    if (iter % check_every == 0 || iter == opts.max_iter) {
      if (m > 0) {
        for (int i = 0; i < m; ++i) {
          double s = -b[i];
          const double* ri = &A[static_cast<std::size_t>(i) * n];
          for (int j = 0; j < n; ++j) s += ri[j] * z[j];
          az[i] = s;
        }
        primres = norm2(az);
      } else {
        primres = 0.0;
      }
      if (primres <= opts.tol && dualres <= opts.tol && consensus <= opts.tol) {
        sol.status = SolveStatus::optimal;
        break;
      }
      const double maxres = std::max({primres, dualres, consensus});
      if (maxres < best_maxres * (1.0 - 1e-6)) {
        best_maxres = maxres;
        last_improve = iter;
      }
      if (best_maxres > 1e-3 && iter - last_improve >= 10000) {
        sol.status = SolveStatus::infeasible_suspected;
        break;
      }
    }

    // residual balancing on a fixed schedule keeps the iteration deterministic
    if (iter % 200 == 0) {
      if (consensus > 10.0 * dualres && rho < 1e6) {
        rho *= 2.0;
        for (double& t : u) t *= 0.5;
      } else if (dualres > 10.0 * consensus && rho > 1e-6) {
        rho *= 0.5;
        for (double& t : u) t *= 2.0;
      }
    }
  }
  shutdown_pool();
  if (iter > opts.max_iter) iter = opts.max_iter;

  sol.x = z;
  sol.iterations = iter;
  const auto& c = p.objective();
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += c[j] * z[j];
  sol.objective_value = obj;
  sol.primal_residual = primres;
  sol.dual_residual = dualres;
  double conres = 0.0;
  for (int k = 0; k < nblocks; ++k) {
    if (dims[k] == 1) {
      conres = std::max(conres, -std::min(0.0, z[offs[k]]));
    } else {
      const Mat H = coords_to_herm(z.data() + offs[k], dims[k]);
      conres = std::max(conres, -std::min(0.0, hermitian_spectrum(H, 1e-8).eigenvalues.front()));
    }
  }
  sol.cone_residual = conres;
  return sol;
}

/// min tr(P + N) subject to P - N = M over PSD P, N; the optimum is the trace
/// norm of the Hermitian matrix M.
inline ConeProblem make_trace_norm_problem(const Mat& M) {
  if (!M.square()) throw std::invalid_argument("make_trace_norm_problem: matrix not square");
  const int d = M.rows();
  ConeProblem p;
  const int P = p.add_block(d);
  const int N = p.add_block(d);
  p.set_objective(P, Mat::identity(d));
  p.set_objective(N, Mat::identity(d));
  const int eq = p.add_matrix_equation(M.hermitized());
  p.add_equation_identity(eq, P, 1.0);
  p.add_equation_identity(eq, N, -1.0);
  return p;
}

}  // namespace qdef
