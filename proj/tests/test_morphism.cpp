#include <qdef/morphism.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace qdef;
using testutil::random_density;
using testutil::random_kraus;
using testutil::random_unitary;

namespace {

// Pauli tetrahedron completed to a spanning set of qubit density matrices.
std::vector<Mat> spanning_qubit_states() {
  std::vector<Mat> states;
  states.push_back(bloch_to_state(1.0, 0.0, 0.0));
  states.push_back(bloch_to_state(-1.0, 0.0, 0.0));
  states.push_back(bloch_to_state(0.0, 1.0, 0.0));
  states.push_back(bloch_to_state(0.0, 0.0, 1.0));
  states.push_back(bloch_to_state(0.0, 0.0, 0.0));
  return states;
}

std::vector<Mat> spanning_states(NormalSampler& g, int d) {
  std::vector<Mat> states;
  for (int k = 0; k < herm_dim(d) + 2; ++k) states.push_back(testutil::random_density(g, d));
  return states;
}

LinearStateMap qubit_transpose_map() {
  LinearStateMap g;
  g.d_in = g.d_out = 2;
  g.m.assign(16, 0.0);
  g.at(0, 0) = 1.0;
  g.at(1, 1) = 1.0;
  g.at(2, 2) = 1.0;
  g.at(3, 3) = -1.0;  // the antisymmetric element flips sign under transpose
  return g;
}

}  // namespace

TEST_CASE("identity extension", "[morphism]") {
  auto states = spanning_qubit_states();
  ExtensionResult res = linear_extension(states, states);
  CHECK(res.status == ExtensionStatus::exact);
  CHECK(res.rank == 4);
  CHECK(res.residual <= 1e-12);
  NormalSampler g(91);
  Mat h = testutil::random_hermitian(g, 2);
  CHECK((res.map.apply(h) - h).frobenius_norm() <= 1e-10);
}

TEST_CASE("unitary conjugation is recovered from the tetrahedron", "[morphism]") {
  NormalSampler g(92);
  Mat v = random_unitary(g, 2);
  auto states = spanning_qubit_states();
  std::vector<Mat> targets;
  for (const Mat& s : states) targets.push_back((v.adjoint() * s * v).hermitized());
  ExtensionResult res = linear_extension(states, targets);
  CHECK(res.status == ExtensionStatus::exact);
  for (int k = 0; k < herm_dim(2); ++k) {
    const Mat e = herm_basis_element(2, k);
    CHECK((res.map.apply(e) - v.adjoint() * e * v).frobenius_norm() <= 1e-10);
  }
}

TEST_CASE("contradictory targets on dependent states are rejected", "[morphism]") {
  Mat rho = bloch_to_state(0.0, 0.0, 0.5);
  Mat s0 = bloch_to_state(0.3, 0.0, 0.0), s1 = bloch_to_state(0.0, 0.3, 0.0);
  CHECK_THROWS_AS(linear_extension({rho, rho}, {s0, s1}), std::invalid_argument);
}

TEST_CASE("rank-deficient but consistent data is flagged partial", "[morphism]") {
  Mat rho = bloch_to_state(0.0, 0.0, 0.5);
  Mat s0 = bloch_to_state(0.3, 0.0, 0.0);
  ExtensionResult res = linear_extension({rho, rho}, {s0, s0});
  CHECK(res.status == ExtensionStatus::partial);
  CHECK(res.rank == 1);
  CHECK((res.map.apply(rho) - s0).frobenius_norm() <= 1e-10);
}

TEST_CASE("extension of channel outputs recovers the channel", "[morphism]") {
  NormalSampler g(93);
  for (int d : {2, 3}) {
    ChoiMatrix phi = choi_of_kraus(random_kraus(g, d, d, 3), d, d);
    auto states = spanning_states(g, d);
    std::vector<Mat> targets;
    for (const Mat& s : states) targets.push_back(apply(phi, s).hermitized());
    ExtensionResult res = linear_extension(states, targets);
    CHECK(res.status == ExtensionStatus::exact);
    CHECK((res.map.to_choi() - phi.J).frobenius_norm() <= 1e-8);
    CHECK(check_trace_preserving(res.map).ok);
    CHECK(check_complete_positivity(res.map).ok);
  }
}

TEST_CASE("trace preservation check", "[morphism]") {
  auto states = spanning_qubit_states();
  ExtensionResult res = linear_extension(states, states);
  TracePreservationReport tp = check_trace_preserving(res.map);
  CHECK(tp.ok);
  CHECK(tp.defect <= 1e-12);

  LinearStateMap scaled = res.map;
  for (double& v : scaled.m) v *= 0.9;
  tp = check_trace_preserving(scaled);
  CHECK_FALSE(tp.ok);
  CHECK(tp.defect == Catch::Approx(0.1).margin(1e-9));

  // any extension of density matrices to density matrices preserves trace:
  // use exactly herm_dim(2) independent states so any targets are consistent
  NormalSampler g(94);
  std::vector<Mat> rnd_states, rnd_targets;
  for (int i = 0; i < herm_dim(2); ++i) {
    rnd_states.push_back(random_density(g, 2));
    rnd_targets.push_back(random_density(g, 2));
  }
  ExtensionResult rnd = linear_extension(rnd_states, rnd_targets);
  CHECK(rnd.status == ExtensionStatus::exact);
  CHECK(check_trace_preserving(rnd.map).ok);
}

TEST_CASE("transpose map is positive but not completely positive", "[morphism]") {
  LinearStateMap t = qubit_transpose_map();

  // sanity: it really is the transpose
  NormalSampler g(95);
  Mat h = testutil::random_hermitian(g, 2);
  CHECK((t.apply(h) - h.transpose()).frobenius_norm() <= 1e-12);

  CpReport cp = check_complete_positivity(t);
  CHECK_FALSE(cp.ok);
  CHECK(cp.min_choi_eigenvalue == Catch::Approx(-1.0).margin(1e-9));

  SampledPositivityReport pos = check_positivity_sampled(t, 500, 7);
  CHECK(pos.ok);
  CHECK(pos.worst_violation <= 1e-9);
}

TEST_CASE("identity passes the sampler; a broken map fails it", "[morphism]") {
  auto states = spanning_qubit_states();
  LinearStateMap id = linear_extension(states, states).map;
  CHECK(check_positivity_sampled(id, 200, 3).ok);

  // constant map to |1><1| with a negative Choi block on the |0><0| direction
  LinearStateMap bad;
  bad.d_in = bad.d_out = 2;
  bad.m.assign(16, 0.0);
  // base: X -> tr(X) |1><1|, then subtract 0.2 <0|X|0> |0><0|
  bad.at(1, 0) = 1.0;
  bad.at(1, 1) = 1.0;
  bad.at(0, 0) = -0.2;
  SampledPositivityReport rep = check_positivity_sampled(bad, 10000, 11);
  CHECK_FALSE(rep.ok);
  CHECK(rep.worst_violation == Catch::Approx(0.2).margin(1e-3));

  // CP is sufficient for sampled positivity on everything we construct
  NormalSampler g(96);
  ChoiMatrix phi = choi_of_kraus(random_kraus(g, 2, 2, 2), 2, 2);
  LinearStateMap from_choi = map_of_choi(phi);
  CHECK(check_complete_positivity(from_choi).ok);
  CHECK(check_positivity_sampled(from_choi, 300, 5).ok);
  // the Choi matrix built from the map agrees with the original
  CHECK((from_choi.to_choi() - phi.J).frobenius_norm() <= 1e-11);
}

TEST_CASE("sampled verdicts are deterministic for fixed seeds", "[morphism]") {
  LinearStateMap t = qubit_transpose_map();
  SampledPositivityReport a = check_positivity_sampled(t, 100, 42);
  SampledPositivityReport b = check_positivity_sampled(t, 100, 42);
  CHECK(a.min_output_eigenvalue == b.min_output_eigenvalue);
  CHECK(a.worst_violation == b.worst_violation);
}
