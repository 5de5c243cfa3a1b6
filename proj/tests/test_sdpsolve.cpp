#include <qdef/sdpsolve.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace qdef;
using testutil::random_hermitian;

TEST_CASE("unconstrained PSD minimization lands at zero", "[sdpsolve]") {
  ConeProblem p;
  const int X = p.add_block(2);
  p.set_objective(X, Mat::identity(2));
  Solution s = solve(p);
  CHECK(s.status == SolveStatus::optimal);
  CHECK(s.objective_value == Catch::Approx(0.0).margin(1e-7));
  CHECK(s.cone_residual <= 1e-9);
}

TEST_CASE("trace-norm instance reproduces the eigenvalue oracle", "[sdpsolve]") {
  Mat m(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = -3.0;
  Solution s = solve(make_trace_norm_problem(m));
  CHECK(s.status == SolveStatus::optimal);
  CHECK(s.objective_value == Catch::Approx(5.0).margin(1e-6));

  NormalSampler g(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 5;
    Mat h = random_hermitian(g, d);
    Solution r = solve(make_trace_norm_problem(h));
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.objective_value == Catch::Approx(trace_norm(h)).margin(1e-6));
  }
}

TEST_CASE("LP embedding: simplex vertex optimum", "[sdpsolve]") {
  ConeProblem p;
  const int x0 = p.add_scalar_block();
  const int x1 = p.add_scalar_block();
  p.set_objective_scalar(x0, 0.2);
  p.set_objective_scalar(x1, 0.7);
  const int row = p.add_row(1.0);
  p.set_row_scalar(row, x0, 1.0);
  p.set_row_scalar(row, x1, 1.0);
  Solution s = solve(p);
  CHECK(s.status == SolveStatus::optimal);
  CHECK(s.objective_value == Catch::Approx(0.2).margin(1e-6));
  CHECK(s.block_scalar(x0) == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("weak duality on trace-norm instances", "[sdpsolve]") {
  NormalSampler g(22);
  for (int trial = 0; trial < 6; ++trial) {
    Mat h = random_hermitian(g, 3);
    Solution s = solve(make_trace_norm_problem(h));
    // any Hermitian X with ||X|| <= 1 gives the dual bound tr(h X)
    for (int k = 0; k < 4; ++k) {
      Mat y = random_hermitian(g, 3);
      Spectrum sp = hermitian_spectrum(y);
      std::vector<double> clip(sp.eigenvalues.size());
      for (std::size_t i = 0; i < clip.size(); ++i) clip[i] = std::clamp(sp.eigenvalues[i], -1.0, 1.0);
      Mat x = spectral_apply(sp, clip);
      CHECK((h * x).trace().real() <= s.objective_value + 1e-6);
    }
  }
}

TEST_CASE("solution is invariant under row scaling", "[sdpsolve]") {
  auto build = [](double s0, double s1) {
    ConeProblem p;
    const int P = p.add_block(2);
    const int N = p.add_block(2);
    p.set_objective(P, Mat::identity(2));
    p.set_objective(N, Mat::identity(2));
    Mat m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = cplx(0.3, 0.2);
    m(1, 0) = cplx(0.3, -0.2);
    m(1, 1) = -0.7;
    const int eq = p.add_matrix_equation(m);
    p.add_equation_identity(eq, P, 1.0);
    p.add_equation_identity(eq, N, -1.0);
    // rescale every row and rhs
    ConeProblem q;
    q.add_block(2);
    q.add_block(2);
    q.set_objective(0, Mat::identity(2));
    q.set_objective(1, Mat::identity(2));
    for (int r = 0; r < p.m(); ++r) {
      const double f = (r % 2 == 0) ? s0 : s1;
      const int nr = q.add_row(p.rhs()[r] * f);
      for (int blk = 0; blk < 2; ++blk)
        for (int c = 0; c < 4; ++c) {
          ConeProblem& pp = const_cast<ConeProblem&>(p);
          q.coef(nr, blk, c) = pp.coef(r, blk, c) * f;
        }
    }
    return q;
  };
  Solution a = solve(build(1.0, 1.0));
  Solution b = solve(build(7.5, 0.004));
  CHECK(a.status == SolveStatus::optimal);
  CHECK(b.status == SolveStatus::optimal);
  CHECK(a.objective_value == Catch::Approx(b.objective_value).margin(1e-9));
  for (std::size_t j = 0; j < a.x.size(); ++j)
    CHECK(a.x[j] == Catch::Approx(b.x[j]).margin(1e-8));
}

TEST_CASE("deterministic across repeated calls and thread counts", "[sdpsolve]") {
  NormalSampler g(23);
  Mat h = random_hermitian(g, 4);
  ConeProblem p = make_trace_norm_problem(h);

  Solution s1 = solve(p);
  Solution s2 = solve(p);
  REQUIRE(s1.x.size() == s2.x.size());
  for (std::size_t j = 0; j < s1.x.size(); ++j) CHECK(s1.x[j] == s2.x[j]);
  CHECK(s1.iterations == s2.iterations);

  SolveOptions multi;
  multi.threads = 3;
  Solution s3 = solve(p, multi);
  for (std::size_t j = 0; j < s1.x.size(); ++j) CHECK(s1.x[j] == s3.x[j]);
  CHECK(s1.iterations == s3.iterations);
}

TEST_CASE("infeasible instance is reported via status, not a crash", "[sdpsolve]") {
  ConeProblem p;
  const int x0 = p.add_scalar_block();
  p.set_objective_scalar(x0, 1.0);
  const int row = p.add_row(-1.0);
  p.set_row_scalar(row, x0, 1.0);  // x = -1 with x >= 0
  SolveOptions opts;
  opts.max_iter = 40000;
  Solution s = solve(p, opts);
  CHECK(s.status != SolveStatus::optimal);
}

TEST_CASE("shape errors throw", "[sdpsolve]") {
  ConeProblem p;
  const int X = p.add_block(2);
  CHECK_THROWS_AS(p.set_objective(X, Mat::identity(3)), std::invalid_argument);
  p.add_row(0.0);
  CHECK_THROWS_AS(p.add_block(2), std::invalid_argument);
  CHECK_THROWS_AS(solve(ConeProblem{}), std::invalid_argument);
}
