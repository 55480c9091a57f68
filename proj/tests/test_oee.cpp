#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "support/oracles.hpp"

using namespace pardyn;

namespace {

template <int B>
std::vector<Eigen::Matrix<double, B, 1>> random_rhs(int n,
                                                    oracle::TestRng& rng) {
  std::vector<Eigen::Matrix<double, B, 1>> rhs(n);
  for (int k = 0; k < n; ++k) rhs[k] = rng.template matrix<B, 1>();
  return rhs;
}

template <int B>
void check_against_oracles(int max_n) {
  oracle::TestRng rng(101 + B);
  for (int n = 1; n <= max_n; ++n) {
    const auto sys = oracle::random_tridiag<B>(n, rng);
    const auto rhs = random_rhs<B>(n, rng);

    OeeTrace trace;
    const auto x = oee_solve<B, 1>(sys, rhs, &trace);
    const auto thomas = block_thomas_solve<B, 1>(sys, rhs);
    const auto dense = oracle::dense_tridiag_solve<B, 1>(sys, rhs);

    CHECK(oracle::rel_gap_blocks<B>(x, thomas) < 1e-10);
    CHECK(oracle::rel_gap_blocks<B>(x, dense) < 1e-10);
    CHECK(trace.rounds == ceil_log2(static_cast<std::size_t>(n)));
  }
}

}  // namespace

TEST_CASE("odd-even elimination agrees with block Thomas and a dense LU") {
  check_against_oracles<1>(48);
  check_against_oracles<2>(48);
  check_against_oracles<5>(48);
}

TEST_CASE("multi-column right-hand sides are carried through the rounds") {
  oracle::TestRng rng(111);
  const int n = 17;
  const auto sys = oracle::random_tridiag<5>(n, rng);
  std::vector<Eigen::Matrix<double, 5, 3>> rhs(n);
  for (int k = 0; k < n; ++k) rhs[k] = rng.matrix<5, 3>();

  const auto x = oee_solve<5, 3>(sys, rhs);
  const auto dense = oracle::dense_tridiag_solve<5, 3>(sys, rhs);
  double gap = 0.0;
  for (int k = 0; k < n; ++k) gap = std::max(gap, (x[k] - dense[k]).norm());
  CHECK(gap < 1e-10);
}

TEST_CASE("intermediate diagonal blocks stay symmetric") {
  // The elimination relies on (and must preserve) the symmetry of every
  // pivot block from round to round; check all intermediate states.
  oracle::TestRng rng(121);
  for (int n : {5, 16, 33, 100}) {
    const auto sys = oracle::random_tridiag<5>(n, rng);
    OeeState<5, 1> state{sys.diag, sys.upper, random_rhs<5>(n, rng), 1, 0};

    const int rounds = ceil_log2(static_cast<std::size_t>(n));
    for (int j = 0; j < rounds; ++j) {
      oee_eliminate_round(state);
      for (const auto& d : state.diag) {
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
    CHECK(state.round == rounds);
    // All couplings are gone once the distance has outgrown the system.
    CHECK(state.coupling.empty());
  }
}

TEST_CASE("eliminated couplings shrink by rows, distance doubles") {
  oracle::TestRng rng(122);
  const int n = 12;
  const auto sys = oracle::random_tridiag<2>(n, rng);
  OeeState<2, 1> state{sys.diag, sys.upper, random_rhs<2>(n, rng), 1, 0};

  oee_eliminate_round(state);
  CHECK(state.distance == 2);
  CHECK(state.coupling.size() == static_cast<std::size_t>(n - 2));

  oee_eliminate_round(state);
  CHECK(state.distance == 4);
  CHECK(state.coupling.size() == static_cast<std::size_t>(n - 4));
}

TEST_CASE("single-row system needs no elimination rounds") {
  oracle::TestRng rng(123);
  const auto sys = oracle::random_tridiag<5>(1, rng);
  const auto rhs = random_rhs<5>(1, rng);
  OeeTrace trace;
  const auto x = oee_solve<5, 1>(sys, rhs, &trace);
  CHECK(trace.rounds == 0);
  CHECK((sys.diag[0] * x[0] - rhs[0]).norm() < 1e-12);
}

TEST_CASE("singular pivot is reported with round and block position") {
  SymBlockTriDiagSystem<2> sys;
  sys.diag.resize(3, Eigen::Matrix2d::Identity());
  sys.upper.resize(2, 0.1 * Eigen::Matrix2d::Identity());
  sys.diag[1].setZero();  // rank-deficient pivot in the first round

  std::vector<Eigen::Vector2d> rhs(3, Eigen::Vector2d::Ones());
  try {
    oee_solve<2, 1>(sys, rhs);
    FAIL("expected SingularBlockError");
  } catch (const SingularBlockError& e) {
    CHECK(e.round() == 1);
    CHECK(e.index() == 1);
    CHECK(std::string(e.what()).find("singular pivot") != std::string::npos);
  }

  // Thomas walks the chain from the head, so its first pivot is diag[0].
  sys.diag[0].setZero();
  sys.diag[1].setIdentity();
  CHECK_THROWS_AS((block_thomas_solve<2, 1>(sys, rhs)), DynamicsError);
}

TEST_CASE("solves are reproducible call to call") {
  oracle::TestRng rng_a(131), rng_b(131);
  const auto sys_a = oracle::random_tridiag<5>(37, rng_a);
  const auto rhs_a = random_rhs<5>(37, rng_a);
  const auto sys_b = oracle::random_tridiag<5>(37, rng_b);
  const auto rhs_b = random_rhs<5>(37, rng_b);

  const auto xa = oee_solve<5, 1>(sys_a, rhs_a);
  const auto xb = oee_solve<5, 1>(sys_b, rhs_b);
  for (std::size_t k = 0; k < xa.size(); ++k) {
    CHECK((xa[k].array() == xb[k].array()).all());
  }
}
