#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "lpseq/moments.hpp"
#include "oracles.hpp"

using lpseq::SystemConfig;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("abs_moment closed forms") {
  CHECK(lpseq::abs_moment({}, 1.0) == 1.0);
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  CHECK(lpseq::abs_moment(zeros, 0.7) == 1.0);

  const std::vector<double> two{2.0};
  CHECK(rel_err(lpseq::abs_moment(two, 1.0), 1.0) < 1e-14);
  const std::vector<double> four{4.0};
  CHECK(rel_err(lpseq::abs_moment(four, 1.0), 3.0) < 1e-14);
  // E|x| = sqrt(2/pi) for unit variance.
  const std::vector<double> one{1.0};
  CHECK(rel_err(lpseq::abs_moment(one, 1.0), 0.7978845608028654) < 1e-14);
}

TEST_CASE("abs_moment against quadrature") {
  for (double alpha : {0.3, 1.0, 1.7, 3.0, 5.5}) {
    for (double sigma2 : {0.5, 1.0, 2.3}) {
      const std::vector<double> e{alpha};
      const double want = oracle::abs_moment_1d(alpha, sigma2);
      CHECK(rel_err(lpseq::abs_moment(e, sigma2), want) < 1e-9);
    }
  }
  // Coordinates are independent, so multi-index moments factor.
  const std::vector<double> mixed{1.5, 0.7, 2.2};
  const double want = oracle::abs_moment_1d(1.5, 1.3) * oracle::abs_moment_1d(0.7, 1.3) *
                      oracle::abs_moment_1d(2.2, 1.3);
  CHECK(rel_err(lpseq::abs_moment(mixed, 1.3), want) < 1e-9);
}

TEST_CASE("abs_moment scale homogeneity") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> uni(0.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> exps(4);
    double total = 0.0;
    for (auto& e : exps) {
      e = uni(gen);
      total += e;
    }
    const double sigma2 = 0.3 + uni(gen);
    const double lhs = lpseq::abs_moment(exps, sigma2);
    const double rhs = std::pow(sigma2, 0.5 * total) * lpseq::abs_moment(exps, 1.0);
    CHECK(rel_err(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("abs_moment rejects bad input") {
  const std::vector<double> neg{-0.5};
  CHECK_THROWS_AS(lpseq::abs_moment(neg, 1.0), std::domain_error);
  const std::vector<double> ok{1.0};
  CHECK_THROWS_AS(lpseq::abs_moment(ok, 0.0), std::domain_error);
  CHECK_THROWS_AS(lpseq::abs_moment(ok, -1.0), std::domain_error);
}

TEST_CASE("central_moment closed forms") {
  CHECK(lpseq::central_moment({}, 0.5) == 1.0);
  const std::vector<double> one{1.0};
  CHECK(lpseq::central_moment(one, 0.5) == 0.0);
  const std::vector<double> three{3.0};
  CHECK(lpseq::central_moment(three, 0.5) == 0.0);
  const std::vector<double> two{2.0};
  CHECK(rel_err(lpseq::central_moment(two, 0.5), 0.5) < 1e-14);
  const std::vector<double> four{4.0};
  CHECK(rel_err(lpseq::central_moment(four, 0.5), 3.0 * 0.25) < 1e-14);
  const std::vector<double> pair{2.0, 2.0};
  CHECK(rel_err(lpseq::central_moment(pair, 0.5), 0.25) < 1e-14);
  const std::vector<double> mixed{2.0, 1.0};
  CHECK(lpseq::central_moment(mixed, 0.5) == 0.0);

  const std::vector<double> frac{1.5};
  CHECK_THROWS_AS(lpseq::central_moment(frac, 0.5), std::domain_error);
}

TEST_CASE("second moment matrix structure") {
  SystemConfig cfg;
  cfg.num_nodes = 2;
  cfg.p = 2.0;
  const Eigen::MatrixXd c = lpseq::preprocessed_second_moment(cfg);
  REQUIRE(c.rows() == 2);
  CHECK(rel_err(c(0, 0), 1.0) < 1e-14);
  // Off-diagonal is E|x|^2 squared... with p = 2 each factor is E|x| = sqrt(2/pi).
  CHECK(rel_err(c(0, 1), 2.0 / 3.14159265358979323846) < 1e-14);
  CHECK(c(0, 1) == c(1, 0));

  SystemConfig big = cfg;
  big.num_nodes = 5;
  big.p = 1.3;
  big.sigma_x2 = 1.9;
  const Eigen::MatrixXd cb = lpseq::preprocessed_second_moment(big);
  CHECK((cb - cb.transpose()).norm() == 0.0);
  // All diagonal entries share one value, all off-diagonals another.
  for (int i = 1; i < 5; ++i) CHECK(cb(i, i) == cb(0, 0));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(cb(i, j) == cb(0, 1));
  CHECK(cb(0, 0) > cb(0, 1));  // Cauchy-Schwarz is strict for non-constant |x|^{p/2}

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cb);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("second moment tends to all-ones as p -> 0") {
  SystemConfig cfg;
  cfg.num_nodes = 3;
  cfg.p = 1e-6;
  const Eigen::MatrixXd c = lpseq::preprocessed_second_moment(cfg);
  CHECK((c - Eigen::MatrixXd::Ones(3, 3)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("fourth moment matrix for the quadratic case") {
  SystemConfig cfg;
  cfg.num_nodes = 1;
  cfg.p = 2.0;
  const Eigen::MatrixXd m1 = lpseq::preprocessed_fourth_moment(cfg);
  REQUIRE(m1.rows() == 1);
  CHECK(rel_err(m1(0, 0), 3.0) < 1e-14);

  cfg.num_nodes = 2;
  const Eigen::MatrixXd m = lpseq::preprocessed_fourth_moment(cfg);
  REQUIRE(m.rows() == 4);
  // Entry pairing phi_1^2 with phi_2^2 is E[x_1^2 x_2^2] = 1.
  CHECK(rel_err(m(0, 3), 1.0) < 1e-14);
  // For p = 2 the trace is sum over pairs of E[x_i^2 x_j^2]: 3 + 1 + 1 + 3.
  CHECK(rel_err(m.trace(), 8.0) < 1e-14);
}

TEST_CASE("fourth moment symmetry and rearrangement fixed point") {
  for (double p : {0.5, 1.0, 2.7}) {
    SystemConfig cfg;
    cfg.num_nodes = 3;
    cfg.p = p;
    cfg.sigma_x2 = 1.4;
    const Eigen::MatrixXd m = lpseq::preprocessed_fourth_moment(cfg);
    CHECK((m - m.transpose()).norm() == 0.0);
    // Entries depend only on the index multiset, which makes the matrix a
    // fixed point of the block rearrangement, bit for bit.
    CHECK((oracle::rearrange_blocks(m) - m).norm() == 0.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("fourth moment entry against Monte Carlo") {
  SystemConfig cfg;
  cfg.num_nodes = 3;
  cfg.p = 0.5;
  const Eigen::MatrixXd m = lpseq::preprocessed_fourth_moment(cfg);
  // Entry ((0,1),(1,2)) carries exponents p on node 1 and p/2 on nodes 0, 2.
  const double got = m(1 * 3 + 0, 2 * 3 + 1);
  const std::vector<double> exps{0.25, 0.5, 0.25};
  const auto st = oracle::mc_abs_product(exps, 1.0, 1000000, 2024);
  CHECK(std::abs(got - st.mean) < 3.0 * st.std_error);
}

TEST_CASE("noise energy moment") {
  CHECK(lpseq::noise_energy_moment(1, 0.0) == 0.0);
  CHECK(rel_err(lpseq::noise_energy_moment(1, 1.0), 3.0) < 1e-14);
  CHECK(rel_err(lpseq::noise_energy_moment(3, 0.1), 0.15) < 1e-14);

  // Cross-check against entry-wise assembly of E[(n^T n)^2]: sum over (i,j)
  // of E[n_i^2 n_j^2].
  for (int len : {3, 5}) {
    const double sn2 = 0.37;
    double want = 0.0;
    for (int i = 0; i < len; ++i)
      for (int j = 0; j < len; ++j) {
        std::vector<double> exps;
        if (i == j)
          exps = {4.0};
        else
          exps = {2.0, 2.0};
        want += lpseq::central_moment(exps, sn2);
      }
    CHECK(rel_err(lpseq::noise_energy_moment(len, sn2), want) < 1e-13);
  }
}

TEST_CASE("build_moments bundles the pieces") {
  SystemConfig cfg;
  cfg.num_nodes = 2;
  cfg.seq_len = 3;
  cfg.p = 1.0;
  cfg.sigma_n2 = 0.2;
  const lpseq::MomentSet mom = lpseq::build_moments(cfg);
  CHECK((mom.second_moment - lpseq::preprocessed_second_moment(cfg)).norm() == 0.0);
  CHECK((mom.fourth_moment - lpseq::preprocessed_fourth_moment(cfg)).norm() == 0.0);
  CHECK(mom.fourth_moment_trace == mom.fourth_moment.trace());
  CHECK(mom.noise_energy == lpseq::noise_energy_moment(3, 0.2));
}

TEST_CASE("config validation") {
  SystemConfig cfg;
  cfg.num_nodes = 2;
  cfg.seq_len = 2;
  CHECK_NOTHROW(cfg.validate());

  SystemConfig bad = cfg;
  bad.p = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad.p = 1e-7;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad.p = 65.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);

  bad = cfg;
  bad.num_nodes = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = cfg;
  bad.seq_len = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = cfg;
  bad.sigma_x2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = cfg;
  bad.sigma_n2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);

  // The dense fourth-moment table is capped; the second moment is not.
  SystemConfig wide = cfg;
  wide.num_nodes = 33;
  CHECK_THROWS_AS(lpseq::preprocessed_fourth_moment(wide), std::invalid_argument);
  CHECK_NOTHROW(lpseq::preprocessed_second_moment(wide));
}
