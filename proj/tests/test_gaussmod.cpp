#include <qdef/gaussmod.hpp>
#include <qdef/matcore.hpp>
#include <qdef/util.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace qdef;

namespace {

Mat2 random_mat2(NormalSampler& g) {
  Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.a[i][j] = g();
  return m;
}

Mat2 random_invertible(NormalSampler& g, double min_det = 1e-3) {
  for (;;) {
    Mat2 m = random_mat2(g);
    if (std::abs(m.det()) > min_det) return m;
  }
}

}  // namespace

TEST_CASE("covariance validity", "[gaussmod]") {
  CHECK(is_valid_covariance(Mat2::identity()));
  CHECK_FALSE(is_valid_covariance(Mat2::diag(0.5, 0.5)));
  Mat2 asym = {{{1.0, 0.5}, {-0.5, 1.0}}};
  CHECK_THROWS_AS(is_valid_covariance(asym), std::invalid_argument);
}

TEST_CASE("covariance validity equals the Sigma + iJ eigenvalue test", "[gaussmod]") {
  NormalSampler g(81);
  int checked = 0;
  while (checked < 30) {
    // random symmetric with positive diagonal
    Mat2 s;
    s.a[0][0] = 0.2 + 2.5 * g.uniform_open();
    s.a[1][1] = 0.2 + 2.5 * g.uniform_open();
    s.a[0][1] = s.a[1][0] = g();
    if (std::abs(s.det() - 1.0) < 1e-6) continue;  // stay off the boundary band
    Mat m(2, 2);
    m(0, 0) = s.a[0][0];
    m(1, 1) = s.a[1][1];
    m(0, 1) = cplx(s.a[0][1], 1.0);
    m(1, 0) = cplx(s.a[1][0], -1.0);
    const bool oracle = min_eigenvalue(m) >= -1e-12;
    CHECK(is_valid_covariance(s) == oracle);
    ++checked;
  }
}

TEST_CASE("c matrix", "[gaussmod]") {
  Mat2 a = {{{1.2, 0.3}, {-0.4, 0.9}}};
  CHECK((c_matrix({a, a}) - Mat2::identity()).max_abs() <= 1e-14);

  // A = 2, B = 1: det ratio 1/4 against A B^{-1} = 2 gives C = 1/2
  Mat2 c = c_matrix({Mat2::scale(2.0), Mat2::identity()});
  CHECK((c - Mat2::scale(0.5)).max_abs() <= 1e-14);

  NormalSampler g(82);
  for (int trial = 0; trial < 25; ++trial) {
    Mat2 A = random_invertible(g), B = random_invertible(g);
    Mat2 C = c_matrix({A, B});
    Mat2 resid = C.transpose() * symplectic_form * A - symplectic_form * B;
    CHECK(resid.max_abs() <= 1e-12 * std::max(1.0, A.max_abs() * B.max_abs() * C.max_abs()));
  }

  Mat2 singular = {{{1.0, 2.0}, {0.5, 1.0}}};
  CHECK_THROWS_AS(c_matrix({Mat2::identity(), singular}), std::invalid_argument);
}

TEST_CASE("omega budget", "[gaussmod]") {
  Mat2 a = {{{0.8, 0.1}, {0.2, 1.1}}};
  OmegaBudget zero = omega_budget({a, a});
  CHECK(zero.value == Catch::Approx(0.0).margin(1e-15));
  CHECK(zero.applicable);

  // det A = 2 det B
  OmegaBudget half = omega_budget({Mat2::diag(2.0, 1.0), Mat2::identity()});
  CHECK(half.value == Catch::Approx(0.5));
  CHECK(half.applicable);

  OmegaBudget neg = omega_budget({Mat2::identity(), Mat2::diag(2.0, 1.0)});
  CHECK(neg.value == Catch::Approx(-1.0));
  CHECK_FALSE(neg.applicable);
}

TEST_CASE("gaussian comparison, equal shifts", "[gaussmod]") {
  ShiftModel same{Mat2::identity(), Mat2::identity()};
  GaussReport r = gaussian_ge_condition(Mat2::identity(), Mat2::identity(), same);
  CHECK(r.status == Tri::yes);
  CHECK(r.branch == "A=B");

  r = gaussian_ge_condition(Mat2::scale(2.0), Mat2::identity(), same);
  CHECK(r.status == Tri::no);

  r = gaussian_ge_condition(Mat2::identity(), Mat2::scale(2.0), same);
  CHECK(r.status == Tri::yes);

  CHECK_THROWS_AS(gaussian_ge_condition(Mat2::diag(0.3, 0.3), Mat2::identity(), same),
                  std::invalid_argument);
}

TEST_CASE("gaussian comparison, general branch matches the isotropic reduction", "[gaussmod]") {
  NormalSampler g(83);
  int checked = 0;
  while (checked < 25) {
    Mat2 ap = random_invertible(g);
    if (ap.det() <= 1.02) continue;
    const double a = 1.0 + 1.5 * g.uniform_open();
    ShiftModel m{ap, Mat2::identity()};
    GaussReport full = gaussian_ge_condition(Mat2::scale(a * a), Mat2::scale(a * a), m);
    IsotropicReport iso = isotropic_check(a, ap);
    REQUIRE(full.status != Tri::not_applicable);
    CHECK((full.status == Tri::yes) == (iso.quantum == Tri::yes));
    ++checked;
  }

  // amplification direction is refused, not extrapolated
  ShiftModel shrink{Mat2::scale(0.5), Mat2::identity()};
  GaussReport na = gaussian_ge_condition(Mat2::identity(), Mat2::identity(), shrink);
  CHECK(na.status == Tri::not_applicable);

  // det A' = 1 with A != B is routed to not_applicable as well
  ShiftModel sheared{{{{1.0, 0.7}, {0.0, 1.0}}}, Mat2::identity()};
  na = gaussian_ge_condition(Mat2::identity(), Mat2::identity(), sheared);
  CHECK(na.status == Tri::not_applicable);
}

TEST_CASE("isotropic fixtures", "[gaussmod]") {
  // a = 1 with a scaled rotation: both conditions hold with zero margin
  IsotropicReport rot = isotropic_check(1.0, Mat2::rotation(M_PI / 6.0) * 1.3);
  CHECK(rot.classical);
  CHECK(rot.quantum == Tri::yes);

  // classical holds but quantum fails off the scaled-orthogonal family
  IsotropicReport gap = isotropic_check(1.0, Mat2::diag(1.5, 1.2));
  CHECK(gap.classical);
  CHECK(gap.quantum == Tri::no);

  IsotropicReport ident = isotropic_check(1.0, Mat2::identity());
  CHECK(ident.classical);
  CHECK(ident.quantum == Tri::not_applicable);

  CHECK_THROWS_AS(isotropic_check(0.0, Mat2::identity()), std::invalid_argument);
}

TEST_CASE("quantum implies classical on random samples", "[gaussmod]") {
  NormalSampler g(84);
  int quantum_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Mat2 ap = random_invertible(g);
    const double a = 0.5 + 2.0 * g.uniform_open();
    IsotropicReport rep = isotropic_check(a, ap);
    if (rep.quantum == Tri::yes) {
      CHECK(rep.classical);
      ++quantum_seen;
    }
  }
  // make sure scaled rotations are in the sample so the implication is exercised
  for (int trial = 0; trial < 10; ++trial) {
    Mat2 ap = Mat2::rotation(g()) * (1.0 + g.uniform_open());
    IsotropicReport rep = isotropic_check(2.0, ap);
    if (rep.quantum == Tri::yes) {
      CHECK(rep.classical);
      ++quantum_seen;
    }
  }
  CHECK(quantum_seen > 0);
}

TEST_CASE("a1 characterization", "[gaussmod]") {
  CHECK(a1_characterization(Mat2::rotation(0.7) * 2.0));
  CHECK_FALSE(a1_characterization(Mat2::scale(0.5)));
  CHECK_FALSE(a1_characterization(Mat2::diag(1.5, 1.2)));

  NormalSampler g(85);
  int checked = 0;
  while (checked < 40) {
    Mat2 ap;
    if (checked % 3 == 0) {
      ap = Mat2::rotation(g()) * (1.0 + g.uniform_open());
    } else {
      ap = random_mat2(g);
      if (ap.det() <= 1.0 + 1e-9) continue;
    }
    if (ap.det() <= 1.0) continue;
    IsotropicReport iso = isotropic_check(1.0, ap);
    REQUIRE(iso.quantum != Tri::not_applicable);
    CHECK(a1_characterization(ap) == (iso.quantum == Tri::yes));
    ++checked;
  }
}
