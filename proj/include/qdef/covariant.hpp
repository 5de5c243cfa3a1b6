#pragma once

#include <qdef/chan.hpp>
#include <qdef/expmodel.hpp>
#include <qdef/sdpsolve.hpp>

#include <array>
#include <cmath>
#include <vector>

namespace qdef {

/// Depolarizing-orbit comparison in Bloch form: u is the z-component of the
/// rotated input state, target is the Bloch vector of the output state.
struct DepolarizingInstance {
  double u = 0.0;
  std::array<double, 3> target{0.0, 0.0, 0.0};
};

struct DepolarizingResult {
  double delta = 0.0;
  double lambda_opt = 0.0;
};

/// Closed form for min over lambda in [0,1] of (1/2) sqrt((z - lambda u)^2 +
/// x^2 + y^2); the optimal output shrinks the z component toward the target.
inline DepolarizingResult depolarizing_deficiency(const DepolarizingInstance& inst) {
  const double u = inst.u;
  const double x = inst.target[0], y = inst.target[1], z = inst.target[2];
  if (u < 0.0 || u > 1.0 + 1e-12)
    throw std::invalid_argument("depolarizing_deficiency: u must lie in [0, 1]");
  if (x * x + y * y + z * z > 1.0 + 1e-9)
    throw std::invalid_argument("depolarizing_deficiency: target outside the Bloch ball");
  DepolarizingResult r;
  if (u <= 1e-300) {
    // degenerate input at the center: every lambda gives the same output
    r.lambda_opt = 0.0;
    r.delta = 0.5 * std::sqrt(x * x + y * y + z * z);
    return r;
  }
  r.lambda_opt = std::clamp(z / u, 0.0, 1.0);
  if (z >= u)
    r.delta = 0.5 * std::sqrt((z - u) * (z - u) + x * x + y * y);
  else if (z >= 0.0)
    r.delta = 0.5 * std::sqrt(x * x + y * y);
  else
    r.delta = 0.5 * std::sqrt(z * z + x * x + y * y);
  return r;
}

// ---------------------------------------------------------------------------

/// Discrete-Weyl-orbit comparison: both experiments are the full group orbits
/// of rho0 and sigma0 under conjugation by X^t Z^s.
struct WeylOrbitInstance {
  int d = 2;
  Mat rho0;
  Mat sigma0;
};

struct WeylOrbitResult {
  double delta = 0.0;
  std::vector<double> weights;  // over the d^2 pairs (t, s), row-major
  Solution solver;
};

/// min over probability vectors p of || sum_w p_w W rho0 W^dagger - sigma0 ||_1,
/// solved as a small cone program (simplex block plus trace-norm split).
inline WeylOrbitResult weyl_orbit_deficiency(const WeylOrbitInstance& inst,
                                             const SolveOptions& opts = {}) {
  const int d = inst.d;
  if (d < 2) throw std::invalid_argument("weyl_orbit_deficiency: dimension must be >= 2");
  Experiment probe;
  probe.dim = d;
  probe.labels = {"rho0", "sigma0"};
  probe.states = {inst.rho0, inst.sigma0};
  require_valid(probe, "weyl_orbit_deficiency");

  std::vector<Mat> orbit;
  for (int t = 0; t < d; ++t)
    for (int s = 0; s < d; ++s) {
      const Mat w = discrete_weyl(d, t, s);
      orbit.push_back((w * inst.rho0 * w.adjoint()).hermitized());
    }
  const int k = static_cast<int>(orbit.size());

  ConeProblem p;
  std::vector<int> pb(k);
  for (int i = 0; i < k; ++i) pb[i] = p.add_scalar_block();
  const int P = p.add_block(d);
  const int N = p.add_block(d);
  p.set_objective(P, Mat::identity(d));
  p.set_objective(N, Mat::identity(d));
  const int sum_row = p.add_row(1.0);
  for (int i = 0; i < k; ++i) p.set_row_scalar(sum_row, pb[i], 1.0);
  const int eq = p.add_matrix_equation(inst.sigma0.hermitized());
  for (int i = 0; i < k; ++i) {
    const auto coords = herm_to_coords(orbit[i]);
    for (int r = 0; r < herm_dim(d); ++r) p.coef(eq + r, pb[i], 0) += coords[r];
  }
  p.add_equation_identity(eq, P, -1.0);
  p.add_equation_identity(eq, N, 1.0);

  Solution sol = solve(p, opts);

  WeylOrbitResult res;
  res.weights.resize(k);
  double wsum = 0.0;
  for (int i = 0; i < k; ++i) {
    res.weights[i] = std::max(0.0, sol.block_scalar(pb[i]));
    wsum += res.weights[i];
  }
  if (wsum > 0.0)
    for (double& w : res.weights) w /= wsum;
  Mat mix(d, d);
  for (int i = 0; i < k; ++i) mix += orbit[i] * cplx(res.weights[i]);
  res.delta = trace_norm((mix - inst.sigma0).hermitized(), 1e-6);
  res.solver = std::move(sol);
  return res;
}

// ---------------------------------------------------------------------------

namespace detail {

inline double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline std::array<double, 3> sub3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

}  // namespace detail

/// Euclidean distance from y0 to the convex hull of the four sign-flip images
/// of x0, by enumerating vertices, edges, triangles, and the full simplex.
/// Degenerate vertex sets are handled by rank detection.
inline double bloch_hull_deficiency(const std::array<double, 3>& x0,
                                    const std::array<double, 3>& y0) {
  using detail::dot3;
  using detail::norm3;
  using detail::sub3;
  if (norm3(x0) > 1.0 + 1e-9 || norm3(y0) > 1.0 + 1e-9)
    throw std::invalid_argument("bloch_hull_deficiency: vector outside the Bloch ball");
  const double rank_tol = 1e-12;
  const std::array<std::array<double, 3>, 4> v = {{
      {x0[0], x0[1], x0[2]},
      {-x0[0], -x0[1], x0[2]},
      {x0[0], -x0[1], -x0[2]},
      {-x0[0], x0[1], -x0[2]},
  }};

  double best = norm3(sub3(y0, v[0]));
  for (int i = 1; i < 4; ++i) best = std::min(best, norm3(sub3(y0, v[i])));

  // edges
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const auto e = sub3(v[j], v[i]);
      const double ee = dot3(e, e);
      if (ee <= rank_tol) continue;
      const double t = std::clamp(dot3(sub3(y0, v[i]), e) / ee, 0.0, 1.0);
      const std::array<double, 3> pt = {v[i][0] + t * e[0], v[i][1] + t * e[1], v[i][2] + t * e[2]};
      best = std::min(best, norm3(sub3(y0, pt)));
    }

  // triangles: project onto the plane, keep only interior projections
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        const auto e1 = sub3(v[j], v[i]), e2 = sub3(v[k], v[i]);
        const double g11 = dot3(e1, e1), g12 = dot3(e1, e2), g22 = dot3(e2, e2);
        const double det = g11 * g22 - g12 * g12;
        if (det <= rank_tol * std::max(1.0, g11 * g22)) continue;
        const auto w = sub3(y0, v[i]);
        const double r1 = dot3(w, e1), r2 = dot3(w, e2);
        const double s = (g22 * r1 - g12 * r2) / det;
        const double t = (g11 * r2 - g12 * r1) / det;
        if (s < -1e-12 || t < -1e-12 || s + t > 1.0 + 1e-12) continue;
        const std::array<double, 3> pt = {v[i][0] + s * e1[0] + t * e2[0],
                                          v[i][1] + s * e1[1] + t * e2[1],
                                          v[i][2] + s * e1[2] + t * e2[2]};
        best = std::min(best, norm3(sub3(y0, pt)));
      }

  // interior of the full simplex: solve for barycentric coordinates
  {
    const auto e1 = sub3(v[1], v[0]), e2 = sub3(v[2], v[0]), e3 = sub3(v[3], v[0]);
    const double det = e1[0] * (e2[1] * e3[2] - e2[2] * e3[1]) -
                       e2[0] * (e1[1] * e3[2] - e1[2] * e3[1]) +
                       e3[0] * (e1[1] * e2[2] - e1[2] * e2[1]);
    if (std::abs(det) > rank_tol) {
      const auto w = sub3(y0, v[0]);
      auto solve3 = [&](int col) {
        std::array<std::array<double, 3>, 3> m = {e1, e2, e3};
        m[col] = w;
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                m[1][0] * (m[0][1] * m[2][2] - m[0][2] * m[2][1]) +
                m[2][0] * (m[0][1] * m[1][2] - m[0][2] * m[1][1])) /
               det;
      };
      const double c1 = solve3(0), c2 = solve3(1), c3 = solve3(2);
      if (c1 >= -1e-12 && c2 >= -1e-12 && c3 >= -1e-12 && c1 + c2 + c3 <= 1.0 + 1e-12)
        best = 0.0;
    }
  }
  return best;
}

}  // namespace qdef
